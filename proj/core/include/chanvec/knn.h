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

#ifndef CHANVEC_KNN_H_
#define CHANVEC_KNN_H_

// K-nearest-neighbor classification over channel embeddings: binary
// scoring, multi-class vote, similarity-weighted regression, ensembling and
// threshold selection.

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "chanvec/embed.h"
#include "chanvec/error.h"

namespace chanvec {

enum class LabelKind { kBinary, kCategorical, kNumeric };

std::string_view LabelKindName(LabelKind kind);
LabelKind ParseLabelKind(std::string_view name);

// Binary (0/1) and numeric labels hold a double; categorical labels a string.
using LabelValue = std::variant<double, std::string>;

std::string LabelToString(const LabelValue& label);

class LabeledDataset {
 public:
  LabeledDataset() = default;
  // Throws kInvalidArgument when empty or when a label does not fit `kind`.
  LabeledDataset(LabelKind kind, std::map<ChannelId, LabelValue> labels);

  // Throws kInvalidArgument when a channel is in both sets.
  static LabeledDataset Binary(const std::set<ChannelId>& positives,
                               const std::set<ChannelId>& negatives);

  LabelKind kind() const { return kind_; }
  const std::map<ChannelId, LabelValue>& labels() const { return labels_; }
  size_t size() const { return labels_.size(); }
  bool Contains(const ChannelId& id) const { return labels_.contains(id); }
  const LabelValue& at(const ChannelId& id) const;

  // Binary datasets only.
  bool IsPositive(const ChannelId& id) const;
  std::set<ChannelId> Positives() const;
  std::set<ChannelId> Negatives() const;

  // Adds (or overwrites) one label, re-validating it.
  void Set(const ChannelId& id, LabelValue label);
  LabeledDataset Without(const std::set<ChannelId>& removed) const;

  friend bool operator==(const LabeledDataset&, const LabeledDataset&) = default;

 private:
  LabelKind kind_ = LabelKind::kBinary;
  std::map<ChannelId, LabelValue> labels_;
};

struct NeighborLabel {
  ChannelId id;
  double similarity = 0.0;
  LabelValue label;

  friend bool operator==(const NeighborLabel&, const NeighborLabel&) = default;
};

struct Prediction {
  ChannelId channel_id;
  // Binary: fraction of positive neighbors. Multi-class: vote share of the
  // winning label. Regression: weighted mean label.
  double score = 0.0;
  LabelValue predicted_label;
  // Descending similarity.
  std::vector<NeighborLabel> neighbors;

  friend bool operator==(const Prediction&, const Prediction&) = default;
};

inline constexpr int kDefaultK = 10;
inline constexpr int kDefaultTagK = 5;

// Mean binary label of the k nearest labeled channels. The query is never
// its own neighbor. Throws kUnsupportedChannel when the query has no
// (directional) embedding and kEmptyResult when no labeled channel has one.
// predicted_label is 1 when score >= 0.5.
Prediction KnnScore(const EmbeddingSet& set, const LabeledDataset& labeled,
                    const ChannelId& query, int k);

// Same as KnnScore but draws neighbors only from `pool` (a subset of the
// labeled channels).
Prediction KnnScoreFromPool(const EmbeddingSet& set,
                            const LabeledDataset& labeled,
                            const ChannelId& query, int k,
                            const std::vector<ChannelId>& pool);

enum class Decision { kNegative, kPositive };

// Positive iff score >= threshold.
Decision Classify(double score, double threshold);

// Modal label among the k nearest; ties go to the larger summed
// similarity, then the lexicographically smaller label.
Prediction KnnMulticlass(const EmbeddingSet& set, const LabeledDataset& labeled,
                         const ChannelId& query, int k);

// sum(w_i * label_i) / sum(w_i) with w_i = max(similarity_i, 0); falls back
// to the unweighted mean when every weight is zero. The predicted label is
// the score rounded half away from zero.
Prediction KnnRegression(const EmbeddingSet& set, const LabeledDataset& labeled,
                         const ChannelId& query, int k);

// Arithmetic mean of binary scores for one channel.
double EnsembleScore(std::span<const Prediction> predictions);

struct ScoredLabel {
  double score = 0.0;
  int label = 0;  // 0 or 1
};

// Threshold with the highest precision among those whose recall is at least
// `min_recall`; candidates are the distinct scores plus 0 and ties prefer
// the higher threshold. Throws kInvalidArgument without positives.
double SelectThreshold(std::span<const ScoredLabel> scores, double min_recall);

// Labels file: CSV with header channel_id,label_kind,label,tag.
struct LabelRow {
  ChannelId channel_id;
  LabelKind kind = LabelKind::kBinary;
  std::string label;
  std::string tag;
};

std::vector<LabelRow> ReadLabelsCsv(const std::filesystem::path& path);
void WriteLabelsCsv(const std::filesystem::path& path,
                    std::span<const LabelRow> rows);
// Rows whose tag equals `tag`. An empty tag selects the only tag when the
// file has exactly one, or every row when no row has a tag. Throws kInputFormat on mixed
// kinds, unparsable labels or conflicting duplicates.
LabeledDataset DatasetFromRows(std::span<const LabelRow> rows,
                               const std::string& tag);
std::vector<LabelRow> RowsFromDataset(const LabeledDataset& dataset,
                                      const std::string& tag);

}  // namespace chanvec

#endif  // CHANVEC_KNN_H_
