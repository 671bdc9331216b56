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

#ifndef CHANVEC_SYNTH_H_
#define CHANVEC_SYNTH_H_

// Synthetic subscription worlds with planted communities, and a
// SubscriptionSource that samples them the way a comment crawler would.

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "chanvec/discovery.h"

namespace chanvec {

struct EcosystemConfig {
  int n_communities = 5;
  int channels_per_community = 60;
  int n_commenters = 20'000;
  double mean_subs_per_commenter = 210.0;
  // Probability that a subscription stays in the commenter's home
  // community.
  double in_community_affinity = 0.9;
  // Fraction of commenters whose subscription page is public.
  double public_profile_rate = 0.30;
  // Subscriptions returned by a sampled (non-full) query.
  int sample_subs_cap = 30;
  // Commenters per queried channel that get a full subscription query.
  int full_subs_commenters_per_channel = 10;
  int comments_per_video = 100;
  int videos_sampled = 10;
  // Subscriber counts follow p(x) ~ x^-exponent on [min, max].
  double subscriber_exponent = 1.5;
  int64_t min_subscribers = 10'000;
  int64_t max_subscribers = 10'000'000;
  // Channels with at least this many subscribers fill every comment slot;
  // smaller ones fill a proportional share.
  int64_t comment_saturation_subs = 100'000;
  uint64_t seed = 1;

  int total_channels() const { return n_communities * channels_per_community; }
  // Throws kInvalidArgument for out-of-range values and kInfeasible when
  // commenters would need more subscriptions than channels exist.
  void Validate() const;
};

struct ChannelTruth {
  int community = 0;
  int64_t subscriber_count = 0;
  int64_t views_12mo = 0;
  std::string title;

  friend bool operator==(const ChannelTruth&, const ChannelTruth&) = default;
};

struct GroundTruth {
  std::map<ChannelId, ChannelTruth> channels;
  // Commenter -> complete subscription list in profile-page order.
  std::map<std::string, std::vector<ChannelId>> subscriptions;

  std::vector<ChannelId> CommunityChannels(int community) const;

  friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

// Emulates crawling: for each queried channel, draw comment slots from its
// subscribers (more slots for bigger channels), keep commenters with public
// profiles, give the first few a full record and the rest a capped sample.
// Responses are deterministic in (world seed, queried channel).
class SyntheticSource : public SubscriptionSource {
 public:
  SyntheticSource(std::shared_ptr<const GroundTruth> truth,
                  EcosystemConfig config);

  std::vector<CommenterRecord> QueryCommenterSubs(
      const std::set<ChannelId>& channels) const override;
  std::map<ChannelId, ChannelMetadata> ChannelMetadataFor(
      const std::set<ChannelId>& channels) const override;

  bool IsPublic(const std::string& commenter_id) const;
  const GroundTruth& truth() const { return *truth_; }
  const EcosystemConfig& config() const { return config_; }

 private:
  std::vector<CommenterRecord> QueryChannel(const ChannelId& channel) const;

  std::shared_ptr<const GroundTruth> truth_;
  EcosystemConfig config_;
  // Channel -> commenters subscribed to it.
  std::map<ChannelId, std::vector<const std::string*>> subscribers_;
};

struct Ecosystem {
  std::shared_ptr<const GroundTruth> truth;
  std::shared_ptr<const SyntheticSource> source;
};

Ecosystem GenerateEcosystem(const EcosystemConfig& config);

// Every commenter's full subscription list as a record.
std::vector<CommenterRecord> FullRecords(const GroundTruth& truth);

// Writes channels.csv (channel_id,community,subscriber_count,views_12mo,
// title), subscriptions.jsonl (full records) and world.json (the config).
void ExportWorld(const GroundTruth& truth, const EcosystemConfig& config,
                 const std::filesystem::path& dir);

struct World {
  GroundTruth truth;
  EcosystemConfig config;
};
World ImportWorld(const std::filesystem::path& dir);

std::string EcosystemConfigJson(const EcosystemConfig& config);
EcosystemConfig ParseEcosystemConfigJson(const std::string& text);

}  // namespace chanvec

#endif  // CHANVEC_SYNTH_H_
