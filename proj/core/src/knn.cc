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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "chanvec/knn.h"

namespace chanvec {

std::string_view LabelKindName(LabelKind kind) {
  switch (kind) {
    case LabelKind::kBinary:
      return "binary";
    case LabelKind::kCategorical:
      return "categorical";
    case LabelKind::kNumeric:
      return "numeric";
  }
  return "binary";
}

LabelKind ParseLabelKind(std::string_view name) {
  if (name == "binary") return LabelKind::kBinary;
  if (name == "categorical") return LabelKind::kCategorical;
  if (name == "numeric") return LabelKind::kNumeric;
  Fail(ErrorCode::kInputFormat, "unknown label kind '" + std::string(name) + "'");
}

std::string LabelToString(const LabelValue& label) {
  if (const auto* s = std::get_if<std::string>(&label)) return *s;
  const double x = std::get<double>(label);
  if (x == std::floor(x) && std::abs(x) < 1e15) {
    return std::to_string(static_cast<long long>(x));
  }
  return std::to_string(x);
}

namespace {

void CheckLabel(LabelKind kind, const ChannelId& id, const LabelValue& label) {
  switch (kind) {
    case LabelKind::kBinary: {
      const auto* x = std::get_if<double>(&label);
      if (x == nullptr || (*x != 0.0 && *x != 1.0)) {
        Fail(ErrorCode::kInvalidArgument,
             "binary label for '" + id + "' must be 0 or 1");
      }
      break;
    }
    case LabelKind::kNumeric: {
      const auto* x = std::get_if<double>(&label);
      if (x == nullptr || !std::isfinite(*x)) {
        Fail(ErrorCode::kInvalidArgument,
             "numeric label for '" + id + "' must be a finite number");
      }
      break;
    }
    case LabelKind::kCategorical:
      if (!std::holds_alternative<std::string>(label)) {
        Fail(ErrorCode::kInvalidArgument,
             "categorical label for '" + id + "' must be a string");
      }
      break;
  }
}

}  // namespace

LabeledDataset::LabeledDataset(LabelKind kind,
                               std::map<ChannelId, LabelValue> labels)
    : kind_(kind), labels_(std::move(labels)) {
  if (labels_.empty()) {
    Fail(ErrorCode::kInvalidArgument, "labeled dataset is empty");
  }
  for (const auto& [id, label] : labels_) CheckLabel(kind_, id, label);
}

LabeledDataset LabeledDataset::Binary(const std::set<ChannelId>& positives,
                                      const std::set<ChannelId>& negatives) {
  std::map<ChannelId, LabelValue> labels;
  for (const auto& c : negatives) labels[c] = 0.0;
  for (const auto& c : positives) {
    if (labels.contains(c)) {
      Fail(ErrorCode::kInvalidArgument, "'" + c + "' is both positive and negative");
    }
    labels[c] = 1.0;
  }
  return LabeledDataset(LabelKind::kBinary, std::move(labels));
}

const LabelValue& LabeledDataset::at(const ChannelId& id) const {
  auto it = labels_.find(id);
  if (it == labels_.end()) {
    Fail(ErrorCode::kUnknownChannel, "'" + id + "' is not labeled");
  }
  return it->second;
}

bool LabeledDataset::IsPositive(const ChannelId& id) const {
  auto it = labels_.find(id);
  return it != labels_.end() && std::get<double>(it->second) == 1.0;
}

std::set<ChannelId> LabeledDataset::Positives() const {
  std::set<ChannelId> out;
  for (const auto& [id, label] : labels_) {
    if (std::get<double>(label) == 1.0) out.insert(id);
  }
  return out;
}

std::set<ChannelId> LabeledDataset::Negatives() const {
  std::set<ChannelId> out;
  for (const auto& [id, label] : labels_) {
    if (std::get<double>(label) == 0.0) out.insert(id);
  }
  return out;
}

void LabeledDataset::Set(const ChannelId& id, LabelValue label) {
  CheckLabel(kind_, id, label);
  labels_[id] = std::move(label);
}

LabeledDataset LabeledDataset::Without(const std::set<ChannelId>& removed) const {
  LabeledDataset out;
  out.kind_ = kind_;
  for (const auto& [id, label] : labels_) {
    if (!removed.contains(id)) out.labels_.emplace(id, label);
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// Labeled channels with a usable embedding, as row indices.
std::vector<size_t> PoolRows(const EmbeddingSet& set,
                             const std::vector<ChannelId>& channels) {
  std::vector<size_t> rows;
  rows.reserve(channels.size());
  for (const ChannelId& c : channels) {
    if (auto row = set.Find(c); row && set.HasDirection(*row)) {
      rows.push_back(*row);
    }
  }
  return rows;
}

std::vector<ChannelId> AllLabeled(const LabeledDataset& labeled) {
  std::vector<ChannelId> out;
  out.reserve(labeled.size());
  for (const auto& [id, label] : labeled.labels()) out.push_back(id);
  return out;
}

std::vector<NeighborLabel> LabeledNeighbors(const EmbeddingSet& set,
                                            const LabeledDataset& labeled,
                                            const ChannelId& query, int k,
                                            const std::vector<ChannelId>& pool) {
  if (k < 1) Fail(ErrorCode::kInvalidArgument, "k must be >= 1");
  const auto row = set.Find(query);
  if (!row || !set.HasDirection(*row)) {
    Fail(ErrorCode::kUnsupportedChannel, "no embedding for '" + query + "'");
  }
  const std::vector<size_t> rows = PoolRows(set, pool);
  std::vector<NeighborLabel> out;
  for (const auto& [r, sim] : NearestRows(set, *row, k, rows)) {
    const ChannelId& id = set.ids()[r];
    out.push_back({id, sim, labeled.at(id)});
  }
  if (out.empty()) {
    Fail(ErrorCode::kEmptyResult,
         "no labeled channel other than '" + query + "' has an embedding");
  }
  return out;
}

void RequireKind(const LabeledDataset& labeled, LabelKind kind) {
  if (labeled.kind() != kind) {
    Fail(ErrorCode::kInvalidArgument,
         "expected " + std::string(LabelKindName(kind)) + " labels, got " +
             std::string(LabelKindName(labeled.kind())));
  }
}

}  // namespace

Prediction KnnScoreFromPool(const EmbeddingSet& set,
                            const LabeledDataset& labeled,
                            const ChannelId& query, int k,
                            const std::vector<ChannelId>& pool) {
  RequireKind(labeled, LabelKind::kBinary);
  Prediction p;
  p.channel_id = query;
  p.neighbors = LabeledNeighbors(set, labeled, query, k, pool);
  double positives = 0.0;
  for (const auto& n : p.neighbors) positives += std::get<double>(n.label);
  p.score = positives / static_cast<double>(p.neighbors.size());
  p.predicted_label = Classify(p.score, 0.5) == Decision::kPositive ? 1.0 : 0.0;
  return p;
}

Prediction KnnScore(const EmbeddingSet& set, const LabeledDataset& labeled,
                    const ChannelId& query, int k) {
  return KnnScoreFromPool(set, labeled, query, k, AllLabeled(labeled));
}

Decision Classify(double score, double threshold) {
  return score >= threshold ? Decision::kPositive : Decision::kNegative;
}

Prediction KnnMulticlass(const EmbeddingSet& set, const LabeledDataset& labeled,
                         const ChannelId& query, int k) {
  RequireKind(labeled, LabelKind::kCategorical);
  Prediction p;
  p.channel_id = query;
  p.neighbors = LabeledNeighbors(set, labeled, query, k, AllLabeled(labeled));

  struct Vote {
    int count = 0;
    double similarity = 0.0;
  };
  std::map<std::string, Vote> votes;  // ordered: lexicographic tie-break
  for (const auto& n : p.neighbors) {
    Vote& v = votes[std::get<std::string>(n.label)];
    ++v.count;
    v.similarity += n.similarity;
  }
  auto best = votes.begin();
  for (auto it = std::next(votes.begin()); it != votes.end(); ++it) {
    const Vote& a = it->second;
    const Vote& b = best->second;
    if (a.count > b.count || (a.count == b.count && a.similarity > b.similarity)) {
      best = it;
    }
  }
  p.predicted_label = best->first;
  p.score = static_cast<double>(best->second.count) /
            static_cast<double>(p.neighbors.size());
  return p;
}

Prediction KnnRegression(const EmbeddingSet& set, const LabeledDataset& labeled,
                         const ChannelId& query, int k) {
  RequireKind(labeled, LabelKind::kNumeric);
  Prediction p;
  p.channel_id = query;
  p.neighbors = LabeledNeighbors(set, labeled, query, k, AllLabeled(labeled));
  double weighted = 0.0, weights = 0.0, plain = 0.0;
  for (const auto& n : p.neighbors) {
    const double label = std::get<double>(n.label);
    const double w = std::max(n.similarity, 0.0);
    weighted += w * label;
    weights += w;
    plain += label;
  }
  p.score = weights > 0.0
                ? weighted / weights
                : plain / static_cast<double>(p.neighbors.size());
  p.predicted_label = std::round(p.score);  // half away from zero
  return p;
}

double EnsembleScore(std::span<const Prediction> predictions) {
  if (predictions.empty()) {
    Fail(ErrorCode::kInvalidArgument, "ensemble of zero predictions");
  }
  const ChannelId& id = predictions.front().channel_id;
  double sum = 0.0;
  for (const Prediction& p : predictions) {
    if (p.channel_id != id) {
      Fail(ErrorCode::kInvalidArgument,
           "ensemble mixes channels '" + id + "' and '" + p.channel_id + "'");
    }
    sum += p.score;
  }
  return sum / static_cast<double>(predictions.size());
}

double SelectThreshold(std::span<const ScoredLabel> scores, double min_recall) {
  if (!(min_recall > 0.0 && min_recall <= 1.0)) {
    Fail(ErrorCode::kInvalidArgument, "min_recall must lie in (0, 1]");
  }
  std::vector<ScoredLabel> sorted(scores.begin(), scores.end());
  int64_t total_pos = 0;
  for (const auto& s : sorted) {
    if (s.label != 0 && s.label != 1) {
      Fail(ErrorCode::kInvalidArgument, "labels must be 0 or 1");
    }
    total_pos += s.label;
  }
  if (total_pos == 0) {
    Fail(ErrorCode::kInvalidArgument, "threshold selection needs a positive");
  }
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.score > b.score; });

  const double needed = min_recall * static_cast<double>(total_pos) - 1e-9;
  // Sweep thresholds from high to low; a candidate replaces the incumbent
  // only with strictly higher precision, so ties keep the higher threshold.
  bool found = false;
  double best_threshold = 0.0;
  int64_t best_tp = 0, best_predicted = 1;
  int64_t tp = 0, predicted = 0;
  auto consider = [&](double threshold) {
    if (static_cast<double>(tp) < needed || predicted == 0) return;
    if (!found || tp * best_predicted > best_tp * predicted) {
      found = true;
      best_threshold = threshold;
      best_tp = tp;
      best_predicted = predicted;
    }
  };
  size_t i = 0;
  while (i < sorted.size()) {
    const double t = sorted[i].score;
    while (i < sorted.size() && sorted[i].score == t) {
      tp += sorted[i].label;
      ++predicted;
      ++i;
    }
    if (t > 0.0) consider(t);
  }
  // Threshold 0 admits every score >= 0.
  tp = 0;
  predicted = 0;
  for (const auto& s : sorted) {
    if (s.score >= 0.0) {
      tp += s.label;
      ++predicted;
    }
  }
  consider(0.0);
  if (!found) {
    Fail(ErrorCode::kInvalidArgument, "no threshold reaches the recall floor");
  }
  return best_threshold;
}

}  // namespace chanvec
