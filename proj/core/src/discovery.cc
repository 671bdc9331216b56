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
#include <string>

#include "chanvec/discovery.h"
#include "chanvec/eval.h"
#include "chanvec/util.h"

namespace chanvec {

DiscoveryConfig::DiscoveryConfig() {
  embedding_main.dims = 200;
  embedding_small.dims = 16;
}

void DiscoveryConfig::Validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) Fail(ErrorCode::kInvalidArgument, what);
  };
  require(k >= 1, "k must be >= 1");
  require(knn_threshold >= 0.0 && knn_threshold <= 1.0,
          "knn_threshold must lie in [0, 1]");
  require(min_recall > 0.0 && min_recall <= 1.0, "min_recall must lie in (0, 1]");
  require(cv_folds >= 2, "cv_folds must be >= 2");
  require(tau >= 0, "tau must be >= 0");
  require(max_rounds >= 1, "max_rounds must be >= 1");
  require(min_commenter_subs_embed >= 0, "min_commenter_subs_embed must be >= 0");
  require(min_commenter_subs_final >= 0, "min_commenter_subs_final must be >= 0");
  require(heuristic_negative_min_subs >= 0,
          "heuristic_negative_min_subs must be >= 0");
  embedding_main.Validate();
  embedding_small.Validate();
}

DiscoveryState DiscoveryState::Initialize(LabeledDataset labeled) {
  if (labeled.kind() != LabelKind::kBinary) {
    Fail(ErrorCode::kInvalidArgument, "discovery needs binary labels");
  }
  DiscoveryState s;
  std::set<ChannelId> first;
  for (const auto& [id, label] : labeled.labels()) {
    first.insert(id);
    s.provenance[id] = 1;
  }
  s.candidates = first;
  s.rounds.push_back(std::move(first));
  s.labeled = std::move(labeled);
  return s;
}

void DiscoveryState::Validate() const {
  auto broken = [](const std::string& what) {
    Fail(ErrorCode::kInvalidArgument, "discovery state: " + what);
  };
  if (rounds.empty()) broken("no rounds");
  std::set<ChannelId> seen;
  for (size_t r = 0; r < rounds.size(); ++r) {
    for (const ChannelId& c : rounds[r]) {
      if (!seen.insert(c).second) broken("'" + c + "' appears in two rounds");
      auto p = provenance.find(c);
      if (p == provenance.end() || p->second != static_cast<int>(r) + 1) {
        broken("provenance of '" + c + "' disagrees with its round");
      }
    }
  }
  if (seen != candidates) broken("candidates differ from the union of rounds");
  if (provenance.size() != candidates.size()) broken("stray provenance entries");
  for (const auto& [id, label] : labeled.labels()) {
    if (!candidates.contains(id)) broken("labeled '" + id + "' is not a candidate");
  }
  for (const ChannelId& c : queried) {
    if (!candidates.contains(c)) broken("queried '" + c + "' is not a candidate");
  }
}

std::set<ChannelId> HeuristicNegatives(
    const std::map<ChannelId, ChannelMetadata>& metadata,
    const std::set<ChannelId>& positives, int64_t min_subs) {
  std::set<ChannelId> out;
  for (const auto& [id, meta] : metadata) {
    if (meta.subscriber_count >= min_subs && !positives.contains(id)) {
      out.insert(id);
    }
  }
  return out;
}

namespace {

struct RoundModel {
  Corpus corpus;
  ChannelCounts commenter_subs;
};

RoundModel BuildRoundCorpus(const std::vector<CommenterRecord>& records,
                            const DiscoveryConfig& config, int iteration) {
  RoundModel m;
  m.commenter_subs = ChannelSubCounts(records);
  m.corpus = ShuffleSentences(BuildCorpus(records, config.corpus),
                              MixSeed(config.seed, 0xc0 + iteration));
  return m;
}

EmbeddingSet TrainRoundEmbeddings(const RoundModel& model,
                                  EmbeddingConfig embedding,
                                  const DiscoveryConfig& config, int iteration) {
  embedding.seed = MixSeed(embedding.seed, static_cast<uint64_t>(iteration));
  const EmbeddingSet trained = TrainEmbeddings(model.corpus, embedding);
  return trained.Filter([&](const ChannelId& c) {
    auto it = model.commenter_subs.find(c);
    return it != model.commenter_subs.end() &&
           it->second >= config.min_commenter_subs_embed;
  });
}

bool Embedded(const EmbeddingSet& set, const ChannelId& c) {
  auto row = set.Find(c);
  return row && set.HasDirection(*row);
}

double RoundThreshold(const EmbeddingSet& set, const LabeledDataset& labeled,
                      const DiscoveryConfig& config, int iteration) {
  if (!config.reselect_threshold) return config.knn_threshold;
  try {
    const CrossValidation cv =
        CrossValidate(set, labeled, config.k, config.cv_folds,
                      MixSeed(config.seed, 0xf01d + iteration));
    const auto scored = ToScoredLabels(cv.scored);
    return SelectThreshold(scored, config.min_recall);
  } catch (const Error& e) {
    // Too few embedded labels to cross validate (e.g. no embedded positive).
    if (e.code() == ErrorCode::kInvalidArgument ||
        e.code() == ErrorCode::kEmptyResult) {
      return config.knn_threshold;
    }
    throw;
  }
}

}  // namespace

IterationResult RunIteration(const DiscoveryState& state,
                             const SubscriptionSource& source,
                             const DiscoveryConfig& config) {
  config.Validate();
  if (state.finished) Fail(ErrorCode::kInvalidArgument, "discovery has finished");
  if (state.iteration >= config.max_rounds) {
    Fail(ErrorCode::kInvalidArgument, "max_rounds already reached");
  }

  std::set<ChannelId> to_query;
  for (const ChannelId& c : state.rounds.back()) {
    if (!state.queried.contains(c)) to_query.insert(c);
  }
  const std::vector<CommenterRecord> fresh = source.QueryCommenterSubs(to_query);

  IterationResult result{state, {}, 0.0};
  DiscoveryState& next = result.state;
  MergeRecords(next.records, fresh);
  next.queried.insert(to_query.begin(), to_query.end());
  next.iteration = state.iteration + 1;

  const RoundModel model = BuildRoundCorpus(next.records, config, next.iteration);
  EmbeddingSet embeddings =
      TrainRoundEmbeddings(model, config.embedding_main, config, next.iteration);
  if (embeddings.empty()) {
    Fail(ErrorCode::kEmptyResult, "no channel has enough commenter subscriptions");
  }

  result.threshold = RoundThreshold(embeddings, next.labeled, config, next.iteration);
  for (const ChannelId& x : embeddings.ids()) {
    if (next.candidates.contains(x) || !Embedded(embeddings, x)) continue;
    const Prediction p = KnnScore(embeddings, next.labeled, x, config.k);
    if (Classify(p.score, result.threshold) == Decision::kPositive) {
      result.new_candidates.insert(x);
    }
  }

  RoundSummary summary;
  summary.round = next.iteration;
  summary.new_candidates = static_cast<int64_t>(result.new_candidates.size());
  summary.threshold = result.threshold;
  summary.accepted =
      result.new_candidates.size() > static_cast<size_t>(config.tau);
  if (summary.accepted) {
    const int round_no = static_cast<int>(next.rounds.size()) + 1;
    for (const ChannelId& c : result.new_candidates) next.provenance[c] = round_no;
    next.candidates.insert(result.new_candidates.begin(),
                           result.new_candidates.end());
    next.rounds.push_back(result.new_candidates);
  } else {
    next.finished = true;
  }
  summary.cumulative_channels = static_cast<int64_t>(next.candidates.size());
  next.log.push_back(summary);
  next.embeddings = std::move(embeddings);
  return result;
}

DiscoveryState RunDiscovery(DiscoveryState state,
                            const SubscriptionSource& source,
                            const DiscoveryConfig& config,
                            const RoundObserver& observer) {
  config.Validate();
  state.Validate();
  const auto positives = state.labeled.Positives();
  const auto negatives = state.labeled.Negatives();
  if (positives.size() < static_cast<size_t>(config.k) ||
      negatives.size() < static_cast<size_t>(config.k)) {
    Fail(ErrorCode::kInvalidArgument,
         "labeled set needs at least k positives and k negatives");
  }

  constexpr int kAttempts = 3;
  while (!state.finished && state.iteration < config.max_rounds) {
    std::optional<IterationResult> result;
    for (int attempt = 1; !result; ++attempt) {
      try {
        result = RunIteration(state, source, config);
      } catch (const Error& e) {
        if (!e.retryable() || attempt == kAttempts) throw;
      }
    }
    state = std::move(result->state);

    // Popular queried channels not labeled positive become negatives.
    const auto metadata = source.ChannelMetadataFor(state.queried);
    int64_t added = 0;
    for (const ChannelId& c :
         HeuristicNegatives(metadata, state.labeled.Positives(),
                            config.heuristic_negative_min_subs)) {
      if (state.labeled.Contains(c)) continue;
      state.labeled.Set(c, 0.0);
      ++added;
    }
    RoundSummary& summary = state.log.back();
    summary.new_heuristic_negatives = added;
    if (state.iteration >= config.max_rounds) state.finished = true;
    if (observer) observer(state, summary);
  }
  state.finished = true;
  return state;
}

DiscoveryState RunDiscovery(const LabeledDataset& labeled,
                            const SubscriptionSource& source,
                            const DiscoveryConfig& config,
                            const RoundObserver& observer) {
  return RunDiscovery(DiscoveryState::Initialize(labeled), source, config,
                      observer);
}

FinalPredictionResult FinalPrediction(const DiscoveryState& state,
                                      const DiscoveryConfig& config) {
  config.Validate();
  if (state.iteration == 0 || state.records.empty()) {
    Fail(ErrorCode::kInvalidArgument, "final prediction before any round");
  }
  const RoundModel model = BuildRoundCorpus(state.records, config, state.iteration);
  const EmbeddingSet main =
      state.embeddings ? *state.embeddings
                       : TrainRoundEmbeddings(model, config.embedding_main, config,
                                              state.iteration);
  const EmbeddingSet small = TrainRoundEmbeddings(model, config.embedding_small,
                                                  config, state.iteration);

  FinalPredictionResult result;
  for (const auto& [channel, round] : state.provenance) {
    // C_1 holds the labeled seed set; later labels are heuristic negatives.
    if (round == 1 || state.labeled.Contains(channel)) continue;
    if (!Embedded(main, channel)) continue;
    DiscoveredChannel d;
    d.channel_id = channel;
    d.round = round;
    std::vector<Prediction> predictions;
    predictions.push_back(KnnScore(main, state.labeled, channel, config.k));
    d.main_score = predictions.back().score;
    if (Embedded(small, channel)) {
      predictions.push_back(KnnScore(small, state.labeled, channel, config.k));
      d.small_score = predictions.back().score;
    }
    d.score = EnsembleScore(predictions);
    auto subs = model.commenter_subs.find(channel);
    d.commenter_subs = subs == model.commenter_subs.end() ? 0 : subs->second;
    result.scored.push_back(d);
    if (Classify(d.score, config.knn_threshold) == Decision::kPositive &&
        d.commenter_subs >= config.min_commenter_subs_final) {
      result.discovered.push_back(std::move(d));
    }
  }
  auto order = [](const DiscoveredChannel& a, const DiscoveredChannel& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.channel_id < b.channel_id;
  };
  std::sort(result.discovered.begin(), result.discovered.end(), order);
  std::sort(result.scored.begin(), result.scored.end(), order);
  return result;
}

}  // namespace chanvec
