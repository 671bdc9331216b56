// Copyright 2026 The chanvec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <thread>

#include "chanvec/embed.h"
#include "chanvec/util.h"

namespace chanvec {

void EmbeddingConfig::Validate() const {
  if (dims < 1) Fail(ErrorCode::kInvalidArgument, "dims must be >= 1");
  if (window < 1) Fail(ErrorCode::kInvalidArgument, "window must be >= 1");
  if (negative_samples < 1) {
    Fail(ErrorCode::kInvalidArgument, "negative_samples must be >= 1");
  }
  if (epochs < 1) Fail(ErrorCode::kInvalidArgument, "epochs must be >= 1");
  if (!(initial_lr > 0.0) || !std::isfinite(initial_lr)) {
    Fail(ErrorCode::kInvalidArgument, "initial_lr must be positive");
  }
  if (min_count < 1) Fail(ErrorCode::kInvalidArgument, "min_count must be >= 1");
  if (threads < 0) Fail(ErrorCode::kInvalidArgument, "threads must be >= 0");
}

// ---------------------------------------------------------------------------
// EmbeddingSet

EmbeddingSet::EmbeddingSet(int dims,
                           std::map<ChannelId, std::vector<double>> vectors)
    : dims_(dims) {
  if (dims < 1) Fail(ErrorCode::kInvalidArgument, "dims must be >= 1");
  const auto d = static_cast<size_t>(dims);
  ids_.reserve(vectors.size());
  data_.reserve(vectors.size() * d);
  unit_.resize(vectors.size() * d, 0.0);
  has_direction_.resize(vectors.size(), 0);
  for (auto& [id, v] : vectors) {
    if (v.size() != d) {
      Fail(ErrorCode::kInvalidArgument,
           "vector for '" + id + "' has " + std::to_string(v.size()) +
               " entries, expected " + std::to_string(dims));
    }
    double norm2 = 0.0;
    for (double x : v) {
      if (!std::isfinite(x)) {
        Fail(ErrorCode::kInvalidArgument,
             "vector for '" + id + "' is not finite");
      }
      norm2 += x * x;
    }
    const size_t row = ids_.size();
    const double norm = std::sqrt(norm2);
    if (norm >= kMinNorm) {
      has_direction_[row] = 1;
      for (size_t j = 0; j < d; ++j) unit_[row * d + j] = v[j] / norm;
    }
    data_.insert(data_.end(), v.begin(), v.end());
    index_.emplace(id, row);
    ids_.push_back(id);
  }
}

std::optional<size_t> EmbeddingSet::Find(const ChannelId& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

size_t EmbeddingSet::IndexOf(const ChannelId& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) {
    Fail(ErrorCode::kUnknownChannel, "no embedding for '" + id + "'");
  }
  return it->second;
}

std::span<const double> EmbeddingSet::VectorAt(size_t row) const {
  const auto d = static_cast<size_t>(dims_);
  return std::span<const double>(data_).subspan(row * d, d);
}

std::span<const double> EmbeddingSet::Vector(const ChannelId& id) const {
  return VectorAt(IndexOf(id));
}

std::span<const double> EmbeddingSet::UnitAt(size_t row) const {
  const auto d = static_cast<size_t>(dims_);
  return std::span<const double>(unit_).subspan(row * d, d);
}

bool EmbeddingSet::HasDirection(const ChannelId& id) const {
  return HasDirection(IndexOf(id));
}

// ---------------------------------------------------------------------------
// Similarity search

double CosineSimilarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    Fail(ErrorCode::kInvalidArgument, "cosine of vectors of unequal length");
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (!(na > 0.0) || !(nb > 0.0)) {
    Fail(ErrorCode::kInvalidArgument, "cosine of a zero-norm vector");
  }
  const double c = dot / (std::sqrt(na) * std::sqrt(nb));
  return std::clamp(c, -1.0, 1.0);
}

std::vector<std::pair<size_t, double>> NearestRows(const EmbeddingSet& set,
                                                   size_t query_row, int k,
                                                   std::span<const size_t> pool) {
  if (k < 1) Fail(ErrorCode::kInvalidArgument, "k must be >= 1");
  if (!set.HasDirection(query_row)) {
    Fail(ErrorCode::kUnsupportedChannel,
         "'" + set.ids()[query_row] + "' has a zero-norm embedding");
  }
  const auto q = set.UnitAt(query_row);
  std::vector<std::pair<size_t, double>> scored;
  scored.reserve(pool.size());
  for (size_t row : pool) {
    if (row == query_row || !set.HasDirection(row)) continue;
    const auto u = set.UnitAt(row);
    double dot = 0.0;
    for (size_t j = 0; j < u.size(); ++j) dot += q[j] * u[j];
    scored.emplace_back(row, std::clamp(dot, -1.0, 1.0));
  }
  const auto& ids = set.ids();
  auto before = [&](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return ids[a.first] < ids[b.first];
  };
  const size_t keep = std::min(scored.size(), static_cast<size_t>(k));
  std::partial_sort(scored.begin(), scored.begin() + keep, scored.end(),
                    before);
  scored.resize(keep);
  return scored;
}

std::vector<Neighbor> Nearest(const EmbeddingSet& set, const ChannelId& query,
                              int k, const std::vector<ChannelId>* candidates) {
  const size_t q = set.IndexOf(query);
  std::vector<size_t> pool;
  if (candidates != nullptr) {
    pool.reserve(candidates->size());
    for (const ChannelId& c : *candidates) pool.push_back(set.IndexOf(c));
    std::sort(pool.begin(), pool.end());
    pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
  } else {
    pool.resize(set.size());
    std::iota(pool.begin(), pool.end(), size_t{0});
  }
  std::vector<Neighbor> out;
  for (const auto& [row, sim] : NearestRows(set, q, k, pool)) {
    out.push_back({set.ids()[row], sim});
  }
  return out;
}

// ---------------------------------------------------------------------------
// CBOW negative-sampling objective

namespace {

// log(1 + exp(x)) without overflow.
double Softplus(double x) {
  return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double Sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

std::vector<double> ContextMean(const CbowExample& ex) {
  if (ex.context.empty()) {
    Fail(ErrorCode::kInvalidArgument, "CBOW example without context");
  }
  const size_t d = ex.target.size();
  std::vector<double> h(d, 0.0);
  for (const auto& v : ex.context) {
    if (v.size() != d) Fail(ErrorCode::kInvalidArgument, "dimension mismatch");
    for (size_t j = 0; j < d; ++j) h[j] += v[j];
  }
  for (double& x : h) x /= static_cast<double>(ex.context.size());
  return h;
}

double Dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
  return s;
}

}  // namespace

double CbowLoss(const CbowExample& example) {
  const auto h = ContextMean(example);
  // -log s(x) = softplus(-x); -log s(-x) = softplus(x)
  double loss = Softplus(-Dot(example.target, h));
  for (const auto& n : example.negatives) loss += Softplus(Dot(n, h));
  return loss;
}

CbowGradient CbowLossGradient(const CbowExample& example) {
  const auto h = ContextMean(example);
  const size_t d = h.size();
  CbowGradient g;
  std::vector<double> d_h(d, 0.0);

  auto accumulate = [&](const std::vector<double>& out, double label,
                        std::vector<double>& d_out) {
    const double f = Dot(out, h);
    g.loss += label > 0 ? Softplus(-f) : Softplus(f);
    const double err = Sigmoid(f) - label;
    d_out.assign(d, 0.0);
    for (size_t j = 0; j < d; ++j) {
      d_out[j] = err * h[j];
      d_h[j] += err * out[j];
    }
  };
  accumulate(example.target, 1.0, g.d_target);
  g.d_negatives.resize(example.negatives.size());
  for (size_t i = 0; i < example.negatives.size(); ++i) {
    accumulate(example.negatives[i], 0.0, g.d_negatives[i]);
  }
  const double inv = 1.0 / static_cast<double>(example.context.size());
  g.d_context.assign(example.context.size(), std::vector<double>(d));
  for (auto& dc : g.d_context) {
    for (size_t j = 0; j < d; ++j) dc[j] = d_h[j] * inv;
  }
  return g;
}

// ---------------------------------------------------------------------------
// Training

namespace {

constexpr int64_t kProgressBatch = 1024;

size_t PhysicalMemoryBytes() {
  const long pages = sysconf(_SC_PHYS_PAGES);
  const long page = sysconf(_SC_PAGE_SIZE);
  if (pages <= 0 || page <= 0) return size_t{1} << 40;
  return static_cast<size_t>(pages) * static_cast<size_t>(page);
}

// Sampling table for the unigram^(3/4) noise distribution.
std::vector<int32_t> BuildNoiseTable(std::span<const int64_t> counts) {
  const size_t table_size =
      std::clamp<size_t>(counts.size() * 100, size_t{1} << 16, size_t{1} << 24);
  double total = 0.0;
  for (int64_t c : counts) total += std::pow(static_cast<double>(c), 0.75);
  std::vector<int32_t> table(table_size);
  size_t word = 0;
  double cumulative = std::pow(static_cast<double>(counts[0]), 0.75) / total;
  for (size_t i = 0; i < table_size; ++i) {
    table[i] = static_cast<int32_t>(word);
    if (static_cast<double>(i + 1) / static_cast<double>(table_size) >
            cumulative &&
        word + 1 < counts.size()) {
      ++word;
      cumulative += std::pow(static_cast<double>(counts[word]), 0.75) / total;
    }
  }
  return table;
}

struct Model {
  size_t dims;
  std::vector<float> input;
  std::vector<float> output;
  std::vector<int32_t> noise;
};

struct WorkerResult {
  double loss = 0.0;
  int64_t examples = 0;
};

WorkerResult TrainSlice(Model& model, const EmbeddingConfig& config,
                        std::span<const std::vector<int32_t>> sentences,
                        std::mt19937_64& rng, std::atomic<int64_t>& progress,
                        double total_positions) {
  const size_t d = model.dims;
  std::vector<float> h(d), grad_h(d);
  std::vector<int32_t> context;
  std::uniform_int_distribution<int> width(1, config.window);
  std::uniform_int_distribution<size_t> noise_index(0, model.noise.size() - 1);
  const double min_lr = config.initial_lr * 1e-4;

  WorkerResult result;
  int64_t local = 0;
  double lr = config.initial_lr *
              std::max(1e-4, 1.0 - static_cast<double>(progress.load()) /
                                       (total_positions + 1.0));
  for (const auto& sentence : sentences) {
    const int n = static_cast<int>(sentence.size());
    for (int pos = 0; pos < n; ++pos) {
      if (++local == kProgressBatch) {
        const int64_t done = progress.fetch_add(local) + local;
        local = 0;
        lr = std::max(min_lr,
                      config.initial_lr *
                          (1.0 - static_cast<double>(done) /
                                     (total_positions + 1.0)));
      }
      const int b = width(rng);
      context.clear();
      for (int c = std::max(0, pos - b); c <= std::min(n - 1, pos + b); ++c) {
        if (c != pos) context.push_back(sentence[c]);
      }
      if (context.empty()) continue;

      std::fill(h.begin(), h.end(), 0.0f);
      for (int32_t c : context) {
        const float* v = &model.input[static_cast<size_t>(c) * d];
        for (size_t j = 0; j < d; ++j) h[j] += v[j];
      }
      const float inv = 1.0f / static_cast<float>(context.size());
      for (size_t j = 0; j < d; ++j) h[j] *= inv;
      std::fill(grad_h.begin(), grad_h.end(), 0.0f);

      const int32_t center = sentence[pos];
      for (int s = 0; s <= config.negative_samples; ++s) {
        int32_t target;
        float label;
        if (s == 0) {
          target = center;
          label = 1.0f;
        } else {
          target = model.noise[noise_index(rng)];
          if (target == center) continue;
          label = 0.0f;
        }
        float* u = &model.output[static_cast<size_t>(target) * d];
        float f = 0.0f;
        for (size_t j = 0; j < d; ++j) f += h[j] * u[j];
        result.loss += label > 0 ? Softplus(-f) : Softplus(f);
        const auto err = static_cast<float>(Sigmoid(f) - label);
        const auto step = static_cast<float>(lr) * err;
        for (size_t j = 0; j < d; ++j) {
          grad_h[j] += err * u[j];
          u[j] -= step * h[j];
        }
      }
      // d(loss)/d(input_c) = grad_h / |context|
      const auto scale = static_cast<float>(lr) * inv;
      for (int32_t c : context) {
        float* v = &model.input[static_cast<size_t>(c) * d];
        for (size_t j = 0; j < d; ++j) v[j] -= scale * grad_h[j];
      }
      ++result.examples;
    }
  }
  progress.fetch_add(local);
  return result;
}

}  // namespace

EmbeddingSet TrainEmbeddings(const Corpus& corpus, const EmbeddingConfig& config,
                             TrainingStats* stats) {
  config.Validate();
  if (corpus.sentences.empty()) {
    Fail(ErrorCode::kEmptyCorpus, "cannot train on an empty corpus");
  }

  // Vocabulary in id order; counts are recomputed so hand-built corpora work.
  std::map<ChannelId, int64_t> counts;
  for (const auto& s : corpus.sentences) {
    for (const ChannelId& c : s) ++counts[c];
  }
  std::vector<ChannelId> vocab;
  std::vector<int64_t> vocab_counts;
  std::unordered_map<std::string_view, int32_t> index;
  for (const auto& [id, n] : counts) {
    if (n < config.min_count) continue;
    index.emplace(id, static_cast<int32_t>(vocab.size()));
    vocab.push_back(id);
    vocab_counts.push_back(n);
  }
  if (vocab.empty()) {
    Fail(ErrorCode::kEmptyCorpus, "no channel reaches min_count");
  }
  if (vocab.size() > static_cast<size_t>(std::numeric_limits<int32_t>::max())) {
    Fail(ErrorCode::kResourceExhausted, "vocabulary too large");
  }

  const auto d = static_cast<size_t>(config.dims);
  const size_t v = vocab.size();
  const double bytes = static_cast<double>(v) * static_cast<double>(d) *
                       (2.0 * sizeof(float) + 2.0 * sizeof(double));
  if (bytes > 0.8 * static_cast<double>(PhysicalMemoryBytes())) {
    Fail(ErrorCode::kResourceExhausted,
         "embedding matrices need " + std::to_string(bytes / (1 << 20)) +
             " MiB, more than available memory");
  }

  std::vector<std::vector<int32_t>> encoded;
  encoded.reserve(corpus.sentences.size());
  int64_t positions = 0;
  for (const auto& s : corpus.sentences) {
    std::vector<int32_t> e;
    e.reserve(s.size());
    for (const ChannelId& c : s) {
      if (auto it = index.find(c); it != index.end()) e.push_back(it->second);
    }
    if (e.size() >= 2) {
      positions += static_cast<int64_t>(e.size());
      encoded.push_back(std::move(e));
    }
  }
  if (encoded.empty()) {
    Fail(ErrorCode::kEmptyCorpus, "no sentence provides a context window");
  }

  Model model{d, std::vector<float>(v * d), std::vector<float>(v * d, 0.0f),
              BuildNoiseTable(vocab_counts)};
  {
    std::mt19937_64 init(MixSeed(config.seed, 0x1417));
    std::uniform_real_distribution<float> uniform(-0.5f, 0.5f);
    const float scale = 1.0f / static_cast<float>(d);
    for (float& x : model.input) x = uniform(init) * scale;
  }

  int workers = config.deterministic
                    ? 1
                    : (config.threads > 0 ? config.threads : WorkerCount());
  workers = std::max(1, std::min<int>(workers, static_cast<int>(encoded.size())));
  std::vector<std::mt19937_64> rngs;
  for (int w = 0; w < workers; ++w) {
    rngs.emplace_back(MixSeed(config.seed, 0x5eed0000ULL + w));
  }

  const double total_positions =
      static_cast<double>(positions) * static_cast<double>(config.epochs);
  std::atomic<int64_t> progress{0};
  std::span<const std::vector<int32_t>> all(encoded);
  TrainingStats local_stats;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::vector<WorkerResult> results(workers);
    auto slice = [&](int w) {
      const size_t begin = all.size() * w / workers;
      const size_t end = all.size() * (w + 1) / workers;
      return all.subspan(begin, end - begin);
    };
    if (workers == 1) {
      results[0] = TrainSlice(model, config, all, rngs[0], progress,
                              total_positions);
    } else {
      // Lock-free asynchronous updates to the shared matrices.
      std::vector<std::thread> threads;
      for (int w = 0; w < workers; ++w) {
        threads.emplace_back([&, w] {
          results[w] = TrainSlice(model, config, slice(w), rngs[w], progress,
                                  total_positions);
        });
      }
      for (auto& t : threads) t.join();
    }
    WorkerResult epoch_total;
    for (const auto& r : results) {
      epoch_total.loss += r.loss;
      epoch_total.examples += r.examples;
    }
    local_stats.examples += epoch_total.examples;
    local_stats.epoch_loss.push_back(
        epoch_total.examples > 0
            ? epoch_total.loss / static_cast<double>(epoch_total.examples)
            : 0.0);
  }

  std::map<ChannelId, std::vector<double>> vectors;
  for (size_t i = 0; i < v; ++i) {
    const float* row = &model.input[i * d];
    vectors.emplace(vocab[i], std::vector<double>(row, row + d));
  }
  if (stats != nullptr) *stats = std::move(local_stats);
  return EmbeddingSet(config.dims, std::move(vectors));
}

}  // namespace chanvec
