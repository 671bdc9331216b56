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

#ifndef CHANVEC_DISCOVERY_H_
#define CHANVEC_DISCOVERY_H_

// Iterative candidate discovery: query commenter subscriptions for the
// newest candidates, retrain embeddings on everything gathered so far, and
// promote unlabeled channels whose K nearest labeled channels are mostly
// positive. A final ensemble pass then picks the discovered set.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "chanvec/corpus.h"
#include "chanvec/embed.h"
#include "chanvec/knn.h"

namespace chanvec {

struct ChannelMetadata {
  int64_t subscriber_count = 0;
  std::string title;

  friend bool operator==(const ChannelMetadata&, const ChannelMetadata&) = default;
};

// Where commenter subscriptions come from. Implementations must be
// idempotent for a fixed world and safe to call concurrently. Transient
// failures throw Error(kSourceFailure, ..., /*retryable=*/true).
class SubscriptionSource {
 public:
  virtual ~SubscriptionSource() = default;

  // Records of commenters found on the given channels.
  virtual std::vector<CommenterRecord> QueryCommenterSubs(
      const std::set<ChannelId>& channels) const = 0;

  // Metadata for the given channels; unknown channels are omitted.
  virtual std::map<ChannelId, ChannelMetadata> ChannelMetadataFor(
      const std::set<ChannelId>& channels) const = 0;
};

struct DiscoveryConfig {
  int k = kDefaultK;
  // Final-prediction threshold, and the per-round threshold when
  // reselect_threshold is false.
  double knn_threshold = 0.8;
  // Pick each round's threshold by cross validation on the labeled set.
  bool reselect_threshold = true;
  double min_recall = 0.9;
  int cv_folds = 5;
  // A round's candidates are kept only when there are more than tau.
  int tau = 50;
  int max_rounds = 4;
  int min_commenter_subs_embed = 5;
  int min_commenter_subs_final = 20;
  int64_t heuristic_negative_min_subs = 3'000'000;
  CorpusConfig corpus;
  EmbeddingConfig embedding_main;
  EmbeddingConfig embedding_small;
  uint64_t seed = 1;

  DiscoveryConfig();
  void Validate() const;
};

struct RoundSummary {
  int round = 0;
  int64_t new_candidates = 0;
  int64_t new_heuristic_negatives = 0;
  int64_t cumulative_channels = 0;
  double threshold = 0.0;
  // False when the round found tau or fewer channels and the loop stopped.
  bool accepted = false;

  friend bool operator==(const RoundSummary&, const RoundSummary&) = default;
};

struct DiscoveryState {
  // C: every candidate so far, the union of `rounds`.
  std::set<ChannelId> candidates;
  // C_1, C_2, ...; rounds[0] is the labeled set.
  std::vector<std::set<ChannelId>> rounds;
  // S: one record per commenter, merged across rounds.
  std::vector<CommenterRecord> records;
  LabeledDataset labeled;
  int iteration = 0;
  // Channel -> 1-based round in which it joined C.
  std::map<ChannelId, int> provenance;
  // Channels whose commenter subscriptions have been queried.
  std::set<ChannelId> queried;
  bool finished = false;
  std::vector<RoundSummary> log;
  // Main-dimension embeddings of the latest round. Not checkpointed.
  std::optional<EmbeddingSet> embeddings;

  // C_1 = every labeled channel.
  static DiscoveryState Initialize(LabeledDataset labeled);
  // Throws kInvalidArgument when the invariants between candidates, rounds
  // and provenance are broken.
  void Validate() const;
};

struct IterationResult {
  DiscoveryState state;
  std::set<ChannelId> new_candidates;
  double threshold = 0.0;
};

// One pass of the loop. `state` is untouched; on failure nothing changes.
IterationResult RunIteration(const DiscoveryState& state,
                             const SubscriptionSource& source,
                             const DiscoveryConfig& config);

// {c : subscriber_count(c) >= min_subs and c not in positives}
std::set<ChannelId> HeuristicNegatives(
    const std::map<ChannelId, ChannelMetadata>& metadata,
    const std::set<ChannelId>& positives, int64_t min_subs);

// Called after every round with the updated state.
using RoundObserver =
    std::function<void(const DiscoveryState&, const RoundSummary&)>;

// Runs rounds until one yields tau or fewer candidates or max_rounds is
// reached. After each round, queried popular channels that are not labeled
// positive join the labeled set as negatives. Resumes from `state` when it
// already holds rounds.
DiscoveryState RunDiscovery(DiscoveryState state,
                            const SubscriptionSource& source,
                            const DiscoveryConfig& config,
                            const RoundObserver& observer = {});
DiscoveryState RunDiscovery(const LabeledDataset& labeled,
                            const SubscriptionSource& source,
                            const DiscoveryConfig& config,
                            const RoundObserver& observer = {});

struct DiscoveredChannel {
  ChannelId channel_id;
  double score = 0.0;
  double main_score = 0.0;
  std::optional<double> small_score;
  int64_t commenter_subs = 0;
  int round = 0;
};

struct FinalPredictionResult {
  // Sorted by descending score, then id.
  std::vector<DiscoveredChannel> discovered;
  // Every scored candidate outside C_1, including rejected ones.
  std::vector<DiscoveredChannel> scored;
};

// Scores C_2..C_n with the mean of main- and small-dimension KNN scores and
// keeps channels at or above knn_threshold with at least
// min_commenter_subs_final commenter subscriptions.
FinalPredictionResult FinalPrediction(const DiscoveryState& state,
                                      const DiscoveryConfig& config);

// Checkpoint directory: records.jsonl plus state.json.
void SaveCheckpoint(const DiscoveryState& state, const std::filesystem::path& dir);
DiscoveryState LoadCheckpoint(const std::filesystem::path& dir);
bool HasCheckpoint(const std::filesystem::path& dir);

// One JSON object per round: round, new_candidates,
// new_heuristic_negatives, cumulative_channels, threshold, accepted.
std::string RoundSummaryJson(const RoundSummary& summary);
void WriteRoundLog(const std::filesystem::path& path,
                   const std::vector<RoundSummary>& log);

}  // namespace chanvec

#endif  // CHANVEC_DISCOVERY_H_
