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

#ifndef CHANVEC_EVAL_H_
#define CHANVEC_EVAL_H_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "chanvec/embed.h"
#include "chanvec/knn.h"

namespace chanvec {

struct ConfusionCounts {
  int64_t tp = 0;
  int64_t fp = 0;
  int64_t tn = 0;
  int64_t fn = 0;

  int64_t total() const { return tp + fp + tn + fn; }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

// Precision, recall and AUC are absent when their denominator is zero (AUC
// is filled in separately by RocAuc).
struct MetricsReport {
  double base_rate = 0.0;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> roc_auc;
  ConfusionCounts counts;
};

// Per-channel score with its true binary label.
struct ScoredChannel {
  ChannelId channel_id;
  double score = 0.0;
  int label = 0;
};

std::vector<ScoredLabel> ToScoredLabels(std::span<const ScoredChannel> scored);

// Counts with "positive iff score >= threshold". Throws on empty input.
MetricsReport ConfusionMetrics(std::span<const ScoredLabel> predictions,
                               double threshold);

// Mann-Whitney AUC: P(score of a random positive > score of a random
// negative), ties counted one half. O(n log n). Throws kInvalidArgument
// unless both classes are present.
double RocAuc(std::span<const ScoredLabel> predictions);

// Number of folds that means hold-one-out.
inline constexpr int kHoldOneOut = 0;

struct CrossValidation {
  std::vector<ScoredChannel> scored;     // labeled-dataset order
  std::vector<ChannelId> unsupported;    // labeled channels without embeddings
};

// Fold assignment: supported channels are shuffled with `seed` and dealt
// round-robin into `folds` folds (kHoldOneOut: one channel per fold). Each
// fold is scored with every channel of the fold removed from the neighbor
// pool. Throws kInvalidArgument when folds < 2 (other than kHoldOneOut).
std::vector<std::vector<ChannelId>> AssignFolds(std::vector<ChannelId> channels,
                                                int folds, uint64_t seed);
CrossValidation CrossValidate(const EmbeddingSet& set,
                              const LabeledDataset& labeled, int k, int folds,
                              uint64_t seed = 0);

// Judgments for one tag: channel -> (reviewer -> 0/1).
using Annotations = std::map<ChannelId, std::map<std::string, int>>;

// Fraction of agreeing unordered reviewer pairs over every channel with at
// least two judgments. Absent when no such pair exists.
std::optional<double> ReviewerAgreement(const Annotations& annotations);

// Fraction of (model, reviewer) pairs that agree, over channels with a
// model prediction.
std::optional<double> ModelAgreement(const std::map<ChannelId, int>& predictions,
                                     const Annotations& annotations);

// Recall of a two-stage pipeline where stage 2 only sees stage 1's output.
double CombinedRecall(double recall_stage1, double recall_stage2);

// Group-size correction for a tag predicted on top of a discovery stage:
//   (pol_precision * tag_precision) / (pol_recall * tag_recall)
double TagMultiplier(double pol_precision, double pol_recall,
                     double tag_precision, double tag_recall);

struct TagStats {
  std::string tag;
  int64_t n_channels = 0;
  double precision = 0.0;
  double recall = 0.0;
  double multiplier = 1.0;
  std::optional<double> reviewer_agreement;
  std::optional<double> model_agreement;
};

enum class ChannelOrigin { kLabeled, kDiscovered };

std::string_view ChannelOriginName(ChannelOrigin origin);
ChannelOrigin ParseChannelOrigin(std::string_view name);

struct ChannelViews {
  ChannelId id;
  int64_t subscriber_count = 0;
  std::optional<int64_t> views_12mo;
  ChannelOrigin origin = ChannelOrigin::kLabeled;
};

// One row per tag. Discovered-channel views are scaled by the tag
// multiplier; labeled views are taken as is. The raw_* fields are the
// unscaled sums.
struct TagViews {
  std::string tag;
  double multiplier = 1.0;
  int64_t head_channels = 0;
  int64_t tail_channels = 0;
  double head_views = 0.0;
  double tail_views = 0.0;
  double total_views = 0.0;
  int64_t raw_head_views = 0;
  int64_t raw_tail_views = 0;
  // total_views over the views of every channel in the input.
  std::optional<double> share_of_all_views;
  std::optional<double> head_share;
};

struct ViewsReport {
  std::vector<TagViews> tags;
  // Channels skipped for missing view counts.
  std::vector<ChannelId> missing_views;
};

// Head channels have subscriber_count >= head_min_subs. Tags without an
// entry in `multipliers` use 1.
ViewsReport AggregateViews(
    std::span<const ChannelViews> channels,
    const std::map<ChannelId, std::set<std::string>>& tag_predictions,
    const std::map<std::string, double>& multipliers, int64_t head_min_subs);

inline constexpr int64_t kDefaultHeadMinSubs = 500'000;

}  // namespace chanvec

#endif  // CHANVEC_EVAL_H_
