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

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "chanvec/corpus.h"
#include "chanvec/error.h"
#include "chanvec/synth.h"
#include "gtest/gtest.h"

namespace chanvec {
namespace {

namespace fs = std::filesystem;

EcosystemConfig Small(uint64_t seed = 1) {
  EcosystemConfig c;
  c.n_communities = 3;
  c.channels_per_community = 20;
  c.n_commenters = 1500;
  c.mean_subs_per_commenter = 10;
  c.seed = seed;
  return c;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

TEST(GenerateEcosystem, FullAffinityNeverCrosses) {
  EcosystemConfig c = Small();
  c.n_communities = 2;
  c.in_community_affinity = 1.0;
  const Ecosystem eco = GenerateEcosystem(c);
  for (const auto& [who, subs] : eco.truth->subscriptions) {
    std::set<int> communities;
    for (const auto& ch : subs) communities.insert(eco.truth->channels.at(ch).community);
    EXPECT_EQ(communities.size(), 1u) << who;
  }
}

TEST(GenerateEcosystem, SameSeedSameWorld) {
  const Ecosystem a = GenerateEcosystem(Small(3));
  const Ecosystem b = GenerateEcosystem(Small(3));
  EXPECT_EQ(*a.truth, *b.truth);
  const std::set<ChannelId> q = {"c00-0001", "c01-0002"};
  EXPECT_EQ(a.source->QueryCommenterSubs(q), b.source->QueryCommenterSubs(q));
  EXPECT_NE(*a.truth, *GenerateEcosystem(Small(4)).truth);
}

TEST(GenerateEcosystem, AffinityAndMeanSubs) {
  EcosystemConfig c;
  c.mean_subs_per_commenter = 20;
  c.seed = 9;
  const Ecosystem eco = GenerateEcosystem(c);
  ASSERT_EQ(eco.truth->channels.size(), 300u);
  ASSERT_EQ(eco.truth->subscriptions.size(), 20000u);
  double inside = 0, total = 0;
  for (const auto& [who, subs] : eco.truth->subscriptions) {
    // The home community is where most of a commenter's subscriptions sit.
    std::map<int, int> tally;
    for (const auto& ch : subs) ++tally[eco.truth->channels.at(ch).community];
    int best = 0;
    for (const auto& [comm, n] : tally) best = std::max(best, n);
    inside += best;
    total += static_cast<double>(subs.size());
  }
  EXPECT_NEAR(inside / total, 0.9, 0.02);
  EXPECT_NEAR(total / 20000.0, 20.0, 2.0);
}

TEST(GenerateEcosystem, SubscriberCountsInRange) {
  const Ecosystem eco = GenerateEcosystem(Small());
  for (const auto& [id, t] : eco.truth->channels) {
    EXPECT_GE(t.subscriber_count, 10'000);
    EXPECT_LE(t.subscriber_count, 10'000'000);
    EXPECT_GT(t.views_12mo, 0);
  }
  EXPECT_EQ(eco.truth->CommunityChannels(1).size(), 20u);
}

TEST(GenerateEcosystem, RejectsInfeasibleConfigs) {
  EcosystemConfig c = Small();
  c.mean_subs_per_commenter = 210;
  try {
    GenerateEcosystem(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInfeasible);
  }
  c = Small();
  c.in_community_affinity = 1.0;
  c.mean_subs_per_commenter = 25;
  EXPECT_THROW(GenerateEcosystem(c), Error);
  c = Small();
  c.in_community_affinity = 1.5;
  EXPECT_THROW(GenerateEcosystem(c), Error);
}

TEST(SyntheticSource, EmulatesCommentSampling) {
  const EcosystemConfig c = Small(5);
  const Ecosystem eco = GenerateEcosystem(c);
  const ChannelId channel = eco.truth->CommunityChannels(0)[0];
  const auto records = eco.source->QueryCommenterSubs({channel});
  ASSERT_FALSE(records.empty());
  int full = 0;
  std::set<std::string> seen;
  for (const auto& r : records) {
    EXPECT_TRUE(seen.insert(r.commenter_id).second);
    EXPECT_TRUE(eco.source->IsPublic(r.commenter_id));
    const auto& truth = eco.truth->subscriptions.at(r.commenter_id);
    EXPECT_NE(std::find(truth.begin(), truth.end(), channel), truth.end());
    if (r.full) {
      ++full;
      EXPECT_EQ(r.channel_ids, truth);
    } else {
      EXPECT_LE(static_cast<int>(r.channel_ids.size()), c.sample_subs_cap);
      for (const auto& ch : r.channel_ids) {
        EXPECT_NE(std::find(truth.begin(), truth.end(), ch), truth.end());
      }
    }
  }
  EXPECT_LE(full, c.full_subs_commenters_per_channel);
  EXPECT_GT(full, 0);

  const auto meta = eco.source->ChannelMetadataFor({channel, "no-such-channel"});
  ASSERT_EQ(meta.size(), 1u);
  EXPECT_EQ(meta.at(channel).subscriber_count, eco.truth->channels.at(channel).subscriber_count);
}

TEST(SyntheticSource, PublicRateIsRespected) {
  const Ecosystem eco = GenerateEcosystem(Small(6));
  double pub = 0;
  for (const auto& [who, subs] : eco.truth->subscriptions) pub += eco.source->IsPublic(who);
  EXPECT_NEAR(pub / static_cast<double>(eco.truth->subscriptions.size()), 0.30, 0.04);
}

TEST(WorldIo, ExportImportRoundTrip) {
  const EcosystemConfig c = Small(7);
  const Ecosystem eco = GenerateEcosystem(c);
  const fs::path dir = fs::temp_directory_path() / "chanvec_world_io";
  fs::remove_all(dir);
  ExportWorld(*eco.truth, c, dir);
  const World back = ImportWorld(dir);
  EXPECT_EQ(back.truth, *eco.truth);
  EXPECT_EQ(EcosystemConfigJson(back.config), EcosystemConfigJson(c));

  std::ifstream jsonl(dir / "subscriptions.jsonl");
  int64_t lines = 0;
  for (std::string line; std::getline(jsonl, line);) lines += !line.empty();
  int64_t nonempty = 0;
  for (const auto& [who, subs] : eco.truth->subscriptions) nonempty += !subs.empty();
  EXPECT_EQ(lines, nonempty);

  // Same corpus bytes from the original and the re-imported world.
  const CorpusConfig cc;
  WriteCorpusText(dir / "a.txt", ShuffleSentences(BuildCorpus(FullRecords(*eco.truth), cc), 1));
  WriteCorpusText(dir / "b.txt", ShuffleSentences(BuildCorpus(FullRecords(back.truth), cc), 1));
  EXPECT_EQ(std::hash<std::string>{}(Slurp(dir / "a.txt")),
            std::hash<std::string>{}(Slurp(dir / "b.txt")));
  EXPECT_EQ(Slurp(dir / "a.txt"), Slurp(dir / "b.txt"));
  fs::remove_all(dir);
}

TEST(WorldIo, MissingDirectoryFails) {
  EXPECT_THROW(ImportWorld(fs::temp_directory_path() / "chanvec_no_world"), Error);
}

}  // namespace
}  // namespace chanvec
