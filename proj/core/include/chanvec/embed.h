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

#ifndef CHANVEC_EMBED_H_
#define CHANVEC_EMBED_H_

// Channel embeddings trained with continuous-bag-of-words and negative
// sampling, plus cosine similarity and exhaustive nearest-neighbor search.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "chanvec/corpus.h"
#include "chanvec/error.h"

namespace chanvec {

struct EmbeddingConfig {
  int dims = 200;
  // Maximum context half-width; the effective width is drawn uniformly
  // from [1, window] at every position.
  int window = 8;
  int negative_samples = 5;
  int epochs = 15;
  double initial_lr = 0.025;
  int min_count = 5;
  uint64_t seed = 1;
  // Single worker, fixed seed, bitwise-reproducible output.
  bool deterministic = false;
  // Worker count when not deterministic; 0 means WorkerCount().
  int threads = 0;

  void Validate() const;
};

// Immutable map from channel id to a dense vector. Ids are kept sorted so
// iteration order never depends on insertion order.
class EmbeddingSet {
 public:
  EmbeddingSet() = default;
  // Throws kInvalidArgument on a length mismatch or a non-finite entry.
  EmbeddingSet(int dims, std::map<ChannelId, std::vector<double>> vectors);

  int dims() const { return dims_; }
  size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  const std::vector<ChannelId>& ids() const { return ids_; }

  bool Contains(const ChannelId& id) const { return index_.contains(id); }
  // Row index of `id`; throws kUnknownChannel.
  size_t IndexOf(const ChannelId& id) const;
  std::optional<size_t> Find(const ChannelId& id) const;

  std::span<const double> Vector(const ChannelId& id) const;
  std::span<const double> VectorAt(size_t row) const;

  // False for vectors with norm below kMinNorm; such channels have no
  // direction and are skipped by nearest-neighbor search.
  bool HasDirection(size_t row) const { return has_direction_[row] != 0; }
  bool HasDirection(const ChannelId& id) const;
  std::span<const double> UnitAt(size_t row) const;

  // Subset keeping only ids for which `keep` is true.
  template <typename Pred>
  EmbeddingSet Filter(Pred keep) const {
    std::map<ChannelId, std::vector<double>> kept;
    for (size_t i = 0; i < ids_.size(); ++i) {
      if (keep(ids_[i])) {
        auto v = VectorAt(i);
        kept.emplace(ids_[i], std::vector<double>(v.begin(), v.end()));
      }
    }
    return EmbeddingSet(dims_, std::move(kept));
  }

  static constexpr double kMinNorm = 1e-12;

  friend bool operator==(const EmbeddingSet& a, const EmbeddingSet& b) {
    return a.dims_ == b.dims_ && a.ids_ == b.ids_ && a.data_ == b.data_;
  }

 private:
  int dims_ = 0;
  std::vector<ChannelId> ids_;
  std::unordered_map<ChannelId, size_t> index_;
  std::vector<double> data_;
  std::vector<double> unit_;
  std::vector<char> has_direction_;
};

// dot(a, b) / (|a| |b|). Throws kInvalidArgument on a length mismatch or a
// zero-norm input.
double CosineSimilarity(std::span<const double> a, std::span<const double> b);

struct Neighbor {
  ChannelId id;
  double similarity = 0.0;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

// Top-k channels by descending cosine similarity to `query`, ties broken by
// ascending id. The query never appears in its own result. `candidates`
// restricts the pool (ids absent from the set throw kUnknownChannel);
// directionless vectors are never candidates. Returns fewer than k entries
// when the pool is smaller.
std::vector<Neighbor> Nearest(const EmbeddingSet& set, const ChannelId& query,
                              int k,
                              const std::vector<ChannelId>* candidates = nullptr);

// Row-index form used by the classifiers; `pool` holds row indices.
std::vector<std::pair<size_t, double>> NearestRows(const EmbeddingSet& set,
                                                   size_t query_row, int k,
                                                   std::span<const size_t> pool);

struct TrainingStats {
  // Mean negative-sampling loss per training example, one entry per epoch.
  std::vector<double> epoch_loss;
  int64_t examples = 0;
};

// Trains input vectors for every channel with corpus count >= min_count and
// returns them. Output vectors are discarded.
EmbeddingSet TrainEmbeddings(const Corpus& corpus, const EmbeddingConfig& config,
                             TrainingStats* stats = nullptr);

// One CBOW negative-sampling example in double precision:
//   h    = mean of the context input vectors
//   loss = -log s(u_target . h) - sum_n log s(-u_n . h)
// where s is the logistic function. The gradient form is what training
// applies (scaled by the learning rate).
struct CbowExample {
  std::vector<std::vector<double>> context;    // input vectors
  std::vector<double> target;                   // output vector
  std::vector<std::vector<double>> negatives;   // output vectors
};

struct CbowGradient {
  double loss = 0.0;
  std::vector<std::vector<double>> d_context;
  std::vector<double> d_target;
  std::vector<std::vector<double>> d_negatives;
};

double CbowLoss(const CbowExample& example);
CbowGradient CbowLossGradient(const CbowExample& example);

// word2vec text format: "<count> <dims>" then "<id> <v1> ... <vdims>" per
// line, six significant digits.
void WriteEmbeddingsText(const std::filesystem::path& path,
                         const EmbeddingSet& set);
EmbeddingSet ReadEmbeddingsText(const std::filesystem::path& path);

}  // namespace chanvec

#endif  // CHANVEC_EMBED_H_
