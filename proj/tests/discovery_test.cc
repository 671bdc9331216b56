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
#include <atomic>
#include <filesystem>
#include <random>
#include <set>

#include "chanvec/discovery.h"
#include "chanvec/error.h"
#include "chanvec/synth.h"
#include "gtest/gtest.h"

namespace chanvec {
namespace {

// Returns every record that mentions a queried channel.
class FixedSource : public SubscriptionSource {
 public:
  FixedSource(std::vector<CommenterRecord> records,
              std::map<ChannelId, ChannelMetadata> metadata = {})
      : records_(std::move(records)), metadata_(std::move(metadata)) {}

  std::vector<CommenterRecord> QueryCommenterSubs(
      const std::set<ChannelId>& channels) const override {
    std::vector<CommenterRecord> out;
    for (const auto& r : records_) {
      if (std::any_of(r.channel_ids.begin(), r.channel_ids.end(),
                      [&](const ChannelId& c) { return channels.contains(c); })) {
        out.push_back(r);
      }
    }
    return out;
  }
  std::map<ChannelId, ChannelMetadata> ChannelMetadataFor(
      const std::set<ChannelId>& channels) const override {
    std::map<ChannelId, ChannelMetadata> out;
    for (const auto& c : channels) {
      if (auto it = metadata_.find(c); it != metadata_.end()) out.emplace(c, it->second);
    }
    return out;
  }

 private:
  std::vector<CommenterRecord> records_;
  std::map<ChannelId, ChannelMetadata> metadata_;
};

// Fails the first `failures` queries, retryably or not.
class FlakySource : public SubscriptionSource {
 public:
  FlakySource(const SubscriptionSource& inner, int failures, bool retryable)
      : inner_(inner), failures_(failures), retryable_(retryable) {}
  std::vector<CommenterRecord> QueryCommenterSubs(
      const std::set<ChannelId>& channels) const override {
    ++calls;
    if (calls <= failures_) throw Error(ErrorCode::kSourceFailure, "flaky", retryable_);
    return inner_.QueryCommenterSubs(channels);
  }
  std::map<ChannelId, ChannelMetadata> ChannelMetadataFor(
      const std::set<ChannelId>& channels) const override {
    return inner_.ChannelMetadataFor(channels);
  }
  mutable std::atomic<int> calls{0};

 private:
  const SubscriptionSource& inner_;
  int failures_;
  bool retryable_;
};

DiscoveryConfig SmallConfig() {
  DiscoveryConfig c;
  c.embedding_main.dims = 24;
  c.embedding_small.dims = 8;
  for (EmbeddingConfig* e : {&c.embedding_main, &c.embedding_small}) {
    e->epochs = 5;
    e->deterministic = true;
  }
  c.tau = 0;
  c.max_rounds = 3;
  c.min_commenter_subs_final = 5;
  return c;
}

struct Planted {
  Ecosystem eco;
  LabeledDataset labeled;
  std::set<ChannelId> held_out;  // unlabeled members of community 0
};

Planted MakePlanted(uint64_t seed, int per_community, int commenters, int n_pos) {
  EcosystemConfig w;
  w.n_communities = 5;
  w.channels_per_community = per_community;
  w.n_commenters = commenters;
  w.mean_subs_per_commenter = 15;
  w.seed = seed;
  Planted p{GenerateEcosystem(w), {}, {}};
  auto members = p.eco.truth->CommunityChannels(0);
  std::stable_sort(members.begin(), members.end(), [&](const auto& a, const auto& b) {
    return p.eco.truth->channels.at(a).subscriber_count >
           p.eco.truth->channels.at(b).subscriber_count;
  });
  std::set<ChannelId> pos(members.begin(), members.begin() + n_pos);
  p.held_out.insert(members.begin() + n_pos, members.end());
  std::vector<ChannelId> others;
  for (const auto& [id, t] : p.eco.truth->channels) {
    if (t.community != 0) others.push_back(id);
  }
  std::mt19937_64 rng(seed);
  std::shuffle(others.begin(), others.end(), rng);
  p.labeled = LabeledDataset::Binary(pos, std::set<ChannelId>(others.begin(), others.begin() + n_pos));
  return p;
}

void ExpectSameState(const DiscoveryState& a, const DiscoveryState& b) {
  EXPECT_EQ(a.candidates, b.candidates);
  EXPECT_EQ(a.rounds, b.rounds);
  EXPECT_EQ(a.records, b.records);
  EXPECT_EQ(a.labeled, b.labeled);
  EXPECT_EQ(a.iteration, b.iteration);
  EXPECT_EQ(a.provenance, b.provenance);
  EXPECT_EQ(a.queried, b.queried);
  EXPECT_EQ(a.finished, b.finished);
  EXPECT_EQ(a.log, b.log);
}

TEST(HeuristicNegatives, SetComprehension) {
  EXPECT_TRUE(HeuristicNegatives({}, {}, 3'000'000).empty());
  EXPECT_EQ(HeuristicNegatives({{"big", {3'000'000, ""}}}, {}, 3'000'000),
            std::set<ChannelId>{"big"});
  std::mt19937_64 rng(3);
  std::map<ChannelId, ChannelMetadata> meta;
  std::set<ChannelId> positives;
  for (int i = 0; i < 100; ++i) {
    const ChannelId id = "c" + std::to_string(i);
    meta[id] = {static_cast<int64_t>(rng() % 6'000'000), ""};
    if (rng() % 4 == 0) positives.insert(id);
  }
  std::set<ChannelId> want;
  for (const auto& [id, m] : meta) {
    if (m.subscriber_count >= 3'000'000 && !positives.contains(id)) want.insert(id);
  }
  EXPECT_EQ(HeuristicNegatives(meta, positives, 3'000'000), want);
}

TEST(DiscoveryState, InitializeAndValidate) {
  const auto labeled = LabeledDataset::Binary({"a", "b"}, {"c"});
  DiscoveryState s = DiscoveryState::Initialize(labeled);
  ASSERT_EQ(s.rounds.size(), 1u);
  EXPECT_EQ(s.candidates, (std::set<ChannelId>{"a", "b", "c"}));
  EXPECT_EQ(s.provenance.at("c"), 1);
  s.Validate();
  s.provenance["a"] = 2;
  EXPECT_THROW(s.Validate(), Error);
}

TEST(RunIteration, ClosedWorldStops) {
  std::vector<CommenterRecord> records;
  std::mt19937_64 rng(1);
  std::vector<ChannelId> channels;
  for (int i = 0; i < 12; ++i) channels.push_back("p" + std::to_string(i));
  for (int i = 0; i < 12; ++i) channels.push_back("n" + std::to_string(i));
  for (int u = 0; u < 300; ++u) {
    std::vector<ChannelId> pool(channels.begin() + (u % 2) * 12, channels.begin() + (u % 2) * 12 + 12);
    std::shuffle(pool.begin(), pool.end(), rng);
    records.push_back({"u" + std::to_string(u), {pool.begin(), pool.begin() + 5}, true});
  }
  const FixedSource source(records);
  std::set<ChannelId> pos(channels.begin(), channels.begin() + 12);
  std::set<ChannelId> neg(channels.begin() + 12, channels.end());
  const DiscoveryConfig config = SmallConfig();
  const DiscoveryState state = RunDiscovery(LabeledDataset::Binary(pos, neg), source, config);
  EXPECT_TRUE(state.finished);
  EXPECT_EQ(state.rounds.size(), 1u);
  ASSERT_EQ(state.log.size(), 1u);
  EXPECT_EQ(state.log[0].new_candidates, 0);
  EXPECT_FALSE(state.log[0].accepted);
  EXPECT_TRUE(FinalPrediction(state, config).discovered.empty());
}

TEST(RunIteration, FailureLeavesStateUntouched) {
  const Planted p = MakePlanted(2, 20, 2500, 10);
  const DiscoveryState before = DiscoveryState::Initialize(p.labeled);
  const DiscoveryState copy = before;
  const FlakySource broken(*p.eco.source, 100, true);
  try {
    RunIteration(before, broken, SmallConfig());
    FAIL();
  } catch (const Error& e) {
    EXPECT_TRUE(e.retryable());
  }
  ExpectSameState(before, copy);
}

TEST(RunDiscovery, RetriesTransientFailures) {
  const Planted p = MakePlanted(3, 20, 2500, 10);
  DiscoveryConfig config = SmallConfig();
  config.max_rounds = 2;
  const DiscoveryState clean = RunDiscovery(p.labeled, *p.eco.source, config);
  const FlakySource flaky(*p.eco.source, 2, true);
  ExpectSameState(RunDiscovery(p.labeled, flaky, config), clean);

  const FlakySource fatal(*p.eco.source, 1, false);
  EXPECT_THROW(RunDiscovery(p.labeled, fatal, config), Error);
  EXPECT_EQ(fatal.calls.load(), 1);
  const FlakySource persistent(*p.eco.source, 100, true);
  EXPECT_THROW(RunDiscovery(p.labeled, persistent, config), Error);
  EXPECT_EQ(persistent.calls.load(), 3);
}

TEST(RunDiscovery, NeedsKOfEachClass) {
  const Planted p = MakePlanted(3, 20, 2500, 5);
  try {
    RunDiscovery(p.labeled, *p.eco.source, SmallConfig());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
  }
}

TEST(RunDiscovery, PlantedCommunityFoundInRoundOne) {
  const Planted p = MakePlanted(4, 30, 6000, 12);
  DiscoveryConfig config = SmallConfig();
  config.max_rounds = 1;
  const DiscoveryState s = RunDiscovery(p.labeled, *p.eco.source, config);
  ASSERT_LE(s.rounds.size(), 2u);
  ASSERT_EQ(s.rounds.size(), 2u);
  int found = 0;
  for (const auto& c : p.held_out) found += s.rounds[1].contains(c);
  EXPECT_GE(found, 0.8 * static_cast<double>(p.held_out.size()));
}

TEST(RunDiscovery, LargeCommunityFromFewSeeds) {
  EcosystemConfig w;
  w.n_communities = 2;
  w.channels_per_community = 300;
  w.n_commenters = 20'000;
  w.mean_subs_per_commenter = 20;
  w.seed = 21;
  const Ecosystem eco = GenerateEcosystem(w);
  auto members = eco.truth->CommunityChannels(0);
  std::stable_sort(members.begin(), members.end(), [&](const auto& a, const auto& b) {
    return eco.truth->channels.at(a).subscriber_count >
           eco.truth->channels.at(b).subscriber_count;
  });
  const auto others = eco.truth->CommunityChannels(1);
  const auto labeled = LabeledDataset::Binary(
      std::set<ChannelId>(members.begin(), members.begin() + 50),
      std::set<ChannelId>(others.begin(), others.begin() + 50));
  DiscoveryConfig config = SmallConfig();
  config.embedding_main.dims = 32;
  const DiscoveryState s = RunDiscovery(labeled, *eco.source, config);
  int found = 0;
  for (auto it = members.begin() + 50; it != members.end(); ++it) {
    found += s.candidates.contains(*it);
  }
  EXPECT_GE(found, 0.9 * 250);
}

TEST(RunDiscovery, TauAtWorldSizeStopsAfterOneRound) {
  const Planted p = MakePlanted(5, 20, 2500, 10);
  DiscoveryConfig config = SmallConfig();
  config.tau = 100;
  config.max_rounds = 4;
  const DiscoveryState s = RunDiscovery(p.labeled, *p.eco.source, config);
  EXPECT_EQ(s.rounds.size(), 1u);
  EXPECT_EQ(s.log.size(), 1u);
  EXPECT_TRUE(s.finished);
}

TEST(RunDiscovery, RoundsAreDisjoint) {
  const Planted p = MakePlanted(6, 20, 3000, 10);
  DiscoveryConfig config = SmallConfig();
  config.max_rounds = 4;
  config.reselect_threshold = false;
  config.knn_threshold = 0.5;
  const DiscoveryState s = RunDiscovery(p.labeled, *p.eco.source, config);
  size_t total = 0;
  for (const auto& r : s.rounds) total += r.size();
  EXPECT_EQ(total, s.candidates.size());
  int64_t logged = static_cast<int64_t>(s.rounds[0].size());
  for (const auto& summary : s.log) {
    if (summary.accepted) logged += summary.new_candidates;
  }
  EXPECT_EQ(logged, static_cast<int64_t>(s.candidates.size()));
  for (const auto& [c, round] : s.provenance) {
    EXPECT_TRUE(s.rounds[static_cast<size_t>(round - 1)].contains(c));
  }
  EXPECT_LE(s.log.size(), 4u);
  s.Validate();
}

TEST(RunDiscovery, HeuristicNegativesJoinLabels) {
  const Planted p = MakePlanted(7, 20, 3000, 10);
  DiscoveryConfig config = SmallConfig();
  config.max_rounds = 2;
  config.heuristic_negative_min_subs = 200'000;
  const DiscoveryState s = RunDiscovery(p.labeled, *p.eco.source, config);
  int64_t added = 0;
  for (const auto& summary : s.log) added += summary.new_heuristic_negatives;
  EXPECT_EQ(static_cast<int64_t>(s.labeled.size()), static_cast<int64_t>(p.labeled.size()) + added);
  for (const auto& [c, label] : s.labeled.labels()) {
    if (p.labeled.Contains(c)) continue;
    EXPECT_TRUE(s.queried.contains(c));
    EXPECT_GE(p.eco.truth->channels.at(c).subscriber_count, 200'000);
    EXPECT_FALSE(s.labeled.IsPositive(c));
  }
}

TEST(RunDiscovery, ResumeFromCheckpointMatchesUninterrupted) {
  const Planted p = MakePlanted(8, 20, 3000, 10);
  DiscoveryConfig config = SmallConfig();
  config.max_rounds = 3;
  const DiscoveryState full = RunDiscovery(p.labeled, *p.eco.source, config);

  const auto dir = std::filesystem::temp_directory_path() / "chanvec_ckpt_test";
  std::filesystem::remove_all(dir);
  struct Crash {};
  try {
    RunDiscovery(p.labeled, *p.eco.source, config,
                 [&](const DiscoveryState& s, const RoundSummary&) {
                   SaveCheckpoint(s, dir);
                   throw Crash{};
                 });
  } catch (const Crash&) {
  }
  ASSERT_TRUE(HasCheckpoint(dir));
  DiscoveryState loaded = LoadCheckpoint(dir);
  EXPECT_EQ(loaded.iteration, 1);
  const DiscoveryState resumed = RunDiscovery(std::move(loaded), *p.eco.source, config);
  ExpectSameState(resumed, full);
  std::filesystem::remove_all(dir);
}

TEST(Checkpoint, RoundTrip) {
  const Planted p = MakePlanted(9, 20, 2500, 10);
  DiscoveryConfig config = SmallConfig();
  config.max_rounds = 1;
  const DiscoveryState s = RunDiscovery(p.labeled, *p.eco.source, config);
  const auto dir = std::filesystem::temp_directory_path() / "chanvec_ckpt_rt";
  SaveCheckpoint(s, dir);
  ExpectSameState(LoadCheckpoint(dir), s);
  EXPECT_FALSE(HasCheckpoint(dir / "nope"));
  std::filesystem::remove_all(dir);
}

// Positive and negative clusters plus X (19 commenters) and Y (40), both
// co-subscribed only with positives.
std::vector<CommenterRecord> ClusterRecords() {
  std::mt19937_64 rng(12);
  std::vector<CommenterRecord> records;
  for (int u = 0; u < 400; ++u) {
    const bool positive = u < 200;
    std::vector<ChannelId> pool;
    for (int i = 0; i < 12; ++i) pool.push_back((positive ? "p" : "n") + std::to_string(i));
    std::shuffle(pool.begin(), pool.end(), rng);
    CommenterRecord r{"u" + std::to_string(u), {pool.begin(), pool.begin() + 6}, true};
    if (positive && u < 19) r.channel_ids.push_back("X");
    if (positive && u >= 100 && u < 140) r.channel_ids.push_back("Y");
    records.push_back(std::move(r));
  }
  return records;
}

TEST(FinalPrediction, ExcludesSeedsAndThinChannels) {
  const auto records = ClusterRecords();
  std::set<ChannelId> pos, neg;
  for (int i = 0; i < 12; ++i) {
    pos.insert("p" + std::to_string(i));
    neg.insert("n" + std::to_string(i));
  }
  DiscoveryState s = DiscoveryState::Initialize(LabeledDataset::Binary(pos, neg));
  s.records = records;
  s.rounds.push_back({"X", "Y"});
  s.candidates.insert({"X", "Y"});
  s.provenance["X"] = 2;
  s.provenance["Y"] = 2;
  s.iteration = 1;
  s.finished = true;
  s.Validate();

  DiscoveryConfig config = SmallConfig();
  config.embedding_main.dims = 16;
  config.embedding_main.epochs = 15;
  config.embedding_small.epochs = 15;
  config.min_commenter_subs_final = 20;
  const FinalPredictionResult r = FinalPrediction(s, config);

  std::map<ChannelId, DiscoveredChannel> scored;
  for (const auto& d : r.scored) scored[d.channel_id] = d;
  ASSERT_TRUE(scored.contains("X"));
  EXPECT_EQ(scored["X"].commenter_subs, 19);
  EXPECT_GE(scored["X"].score, 0.8);
  EXPECT_EQ(scored["Y"].commenter_subs, 40);
  ASSERT_EQ(r.discovered.size(), 1u);
  EXPECT_EQ(r.discovered[0].channel_id, "Y");
  EXPECT_EQ(r.discovered[0].round, 2);
  for (const auto& d : r.scored) EXPECT_FALSE(s.rounds[0].contains(d.channel_id));
}

TEST(RoundLog, JsonFields) {
  RoundSummary s{2, 7, 1, 40, 0.8, true};
  const std::string j = RoundSummaryJson(s);
  for (const char* key : {"\"round\":2", "\"new_candidates\":7", "\"new_heuristic_negatives\":1",
                          "\"cumulative_channels\":40", "\"accepted\":true"}) {
    EXPECT_NE(j.find(key), std::string::npos) << key;
  }
}

}  // namespace
}  // namespace chanvec
