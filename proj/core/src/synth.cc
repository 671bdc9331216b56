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
#include <cstdio>
#include <random>
#include <string>
#include <unordered_map>

#include "chanvec/synth.h"
#include "chanvec/util.h"

namespace chanvec {

void EcosystemConfig::Validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) Fail(ErrorCode::kInvalidArgument, what);
  };
  require(n_communities >= 1, "n_communities must be >= 1");
  require(channels_per_community >= 1, "channels_per_community must be >= 1");
  require(n_commenters >= 1, "n_commenters must be >= 1");
  require(mean_subs_per_commenter >= 1.0, "mean_subs_per_commenter must be >= 1");
  require(in_community_affinity > 0.0 && in_community_affinity <= 1.0,
          "in_community_affinity must lie in (0, 1]");
  require(public_profile_rate > 0.0 && public_profile_rate <= 1.0,
          "public_profile_rate must lie in (0, 1]");
  require(sample_subs_cap >= 1, "sample_subs_cap must be >= 1");
  require(full_subs_commenters_per_channel >= 0,
          "full_subs_commenters_per_channel must be >= 0");
  require(comments_per_video >= 1, "comments_per_video must be >= 1");
  require(videos_sampled >= 1, "videos_sampled must be >= 1");
  require(subscriber_exponent > 0.0, "subscriber_exponent must be positive");
  require(min_subscribers >= 1 && max_subscribers >= min_subscribers,
          "subscriber range must satisfy 1 <= min <= max");
  require(comment_saturation_subs >= 1, "comment_saturation_subs must be >= 1");
  if (mean_subs_per_commenter > total_channels()) {
    Fail(ErrorCode::kInfeasible,
         "mean subscriptions per commenter exceed the number of channels");
  }
  if (in_community_affinity == 1.0 &&
      mean_subs_per_commenter > channels_per_community) {
    Fail(ErrorCode::kInfeasible,
         "with affinity 1 commenters cannot subscribe to more channels than a "
         "community holds");
  }
}

std::vector<ChannelId> GroundTruth::CommunityChannels(int community) const {
  std::vector<ChannelId> out;
  for (const auto& [id, c] : channels) {
    if (c.community == community) out.push_back(id);
  }
  return out;
}

namespace {

std::string ChannelName(int community, int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "c%02d-%04d", community, index);
  return buf;
}

std::string CommenterName(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "u%07d", index);
  return buf;
}

// Inverse CDF of the truncated power law p(x) ~ x^-a on [lo, hi].
int64_t DrawSubscribers(double u, double a, double lo, double hi) {
  double x;
  if (std::abs(a - 1.0) < 1e-12) {
    x = lo * std::pow(hi / lo, u);
  } else {
    const double e = 1.0 - a;
    const double l = std::pow(lo, e), h = std::pow(hi, e);
    x = std::pow(l + u * (h - l), 1.0 / e);
  }
  return std::clamp(static_cast<int64_t>(std::llround(x)),
                    static_cast<int64_t>(lo), static_cast<int64_t>(hi));
}

}  // namespace

Ecosystem GenerateEcosystem(const EcosystemConfig& config) {
  config.Validate();
  auto truth = std::make_shared<GroundTruth>();
  const int per = config.channels_per_community;
  const int total = config.total_channels();

  std::mt19937_64 channel_rng(MixSeed(config.seed, 1));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<ChannelId> ids(static_cast<size_t>(total));
  for (int c = 0; c < config.n_communities; ++c) {
    for (int i = 0; i < per; ++i) {
      ChannelTruth t;
      t.community = c;
      t.subscriber_count = DrawSubscribers(
          unit(channel_rng), config.subscriber_exponent,
          static_cast<double>(config.min_subscribers),
          static_cast<double>(config.max_subscribers));
      t.views_12mo = static_cast<int64_t>(std::llround(
          static_cast<double>(t.subscriber_count) *
          (20.0 + 40.0 * unit(channel_rng))));
      t.title = "Community " + std::to_string(c) + " channel " + std::to_string(i);
      ids[static_cast<size_t>(c * per + i)] = ChannelName(c, i);
      truth->channels.emplace(ids[static_cast<size_t>(c * per + i)], std::move(t));
    }
  }

  std::mt19937_64 rng(MixSeed(config.seed, 2));
  std::uniform_int_distribution<int> pick_home(0, config.n_communities - 1);
  // 1 + Poisson(mean - 1) keeps every commenter subscribed somewhere.
  const double extra_mean = config.mean_subs_per_commenter - 1.0;
  std::poisson_distribution<int> extra(extra_mean > 0 ? extra_mean : 1.0);
  std::bernoulli_distribution stay_home(config.in_community_affinity);
  std::vector<char> chosen(static_cast<size_t>(total), 0);
  const int outside = total - per;

  for (int u = 0; u < config.n_commenters; ++u) {
    const int home = pick_home(rng);
    int wanted = std::min(total, 1 + (extra_mean > 0 ? extra(rng) : 0));
    if (config.in_community_affinity == 1.0) wanted = std::min(wanted, per);
    int home_left = per, away_left = outside;
    std::vector<ChannelId> subs;
    subs.reserve(static_cast<size_t>(wanted));
    std::vector<int> picked;
    for (int s = 0; s < wanted; ++s) {
      bool from_home = stay_home(rng);
      if (from_home && home_left == 0) from_home = false;
      if (!from_home && away_left == 0) {
        if (config.in_community_affinity < 1.0 && home_left > 0) {
          from_home = true;
        } else {
          break;
        }
      }
      if (!from_home && config.in_community_affinity == 1.0) break;
      int channel;
      do {
        if (from_home) {
          channel = home * per +
                    std::uniform_int_distribution<int>(0, per - 1)(rng);
        } else {
          int r = std::uniform_int_distribution<int>(0, outside - 1)(rng);
          channel = r < home * per ? r : r + per;
        }
      } while (chosen[static_cast<size_t>(channel)]);
      chosen[static_cast<size_t>(channel)] = 1;
      picked.push_back(channel);
      (from_home ? home_left : away_left) -= 1;
      subs.push_back(ids[static_cast<size_t>(channel)]);
    }
    for (int c : picked) chosen[static_cast<size_t>(c)] = 0;
    truth->subscriptions.emplace(CommenterName(u), std::move(subs));
  }

  Ecosystem eco;
  eco.truth = truth;
  eco.source = std::make_shared<SyntheticSource>(truth, config);
  return eco;
}

SyntheticSource::SyntheticSource(std::shared_ptr<const GroundTruth> truth,
                                 EcosystemConfig config)
    : truth_(std::move(truth)), config_(config) {
  for (const auto& [id, t] : truth_->channels) subscribers_[id];
  for (const auto& [commenter, subs] : truth_->subscriptions) {
    for (const ChannelId& c : subs) subscribers_[c].push_back(&commenter);
  }
}

bool SyntheticSource::IsPublic(const std::string& commenter_id) const {
  const uint64_t h = MixSeed(config_.seed ^ 0x9b11cULL, HashString(commenter_id));
  return ToUnitInterval(h) < config_.public_profile_rate;
}

std::vector<CommenterRecord> SyntheticSource::QueryChannel(
    const ChannelId& channel) const {
  auto it = subscribers_.find(channel);
  if (it == subscribers_.end() || it->second.empty()) return {};
  const auto& pool = it->second;
  const int64_t slots =
      static_cast<int64_t>(config_.videos_sampled) * config_.comments_per_video;
  const int64_t subs = truth_->channels.at(channel).subscriber_count;
  const int64_t draws = std::clamp<int64_t>(
      (slots * subs + config_.comment_saturation_subs - 1) /
          config_.comment_saturation_subs,
      1, slots);

  std::mt19937_64 rng(MixSeed(config_.seed, HashString(channel)));
  std::uniform_int_distribution<size_t> pick(0, pool.size() - 1);
  std::vector<const std::string*> commenters;
  std::unordered_map<const std::string*, bool> seen;
  for (int64_t i = 0; i < draws; ++i) {
    const std::string* who = pool[pick(rng)];
    if (seen.emplace(who, true).second) commenters.push_back(who);
  }

  std::vector<CommenterRecord> out;
  int full_left = config_.full_subs_commenters_per_channel;
  for (const std::string* who : commenters) {
    if (!IsPublic(*who)) continue;
    const auto& all = truth_->subscriptions.at(*who);
    CommenterRecord r;
    r.commenter_id = *who;
    if (full_left > 0) {
      --full_left;
      r.full = true;
      r.channel_ids = all;
    } else {
      const size_t n = std::min(all.size(),
                                static_cast<size_t>(config_.sample_subs_cap));
      r.channel_ids.assign(all.begin(), all.begin() + static_cast<ptrdiff_t>(n));
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<CommenterRecord> SyntheticSource::QueryCommenterSubs(
    const std::set<ChannelId>& channels) const {
  std::map<std::string, CommenterRecord> merged;
  for (const ChannelId& c : channels) {
    for (CommenterRecord& r : QueryChannel(c)) {
      auto [it, inserted] = merged.try_emplace(r.commenter_id, r);
      if (!inserted && r.full && !it->second.full) it->second = std::move(r);
    }
  }
  std::vector<CommenterRecord> out;
  out.reserve(merged.size());
  for (auto& [id, r] : merged) out.push_back(std::move(r));
  return out;
}

std::map<ChannelId, ChannelMetadata> SyntheticSource::ChannelMetadataFor(
    const std::set<ChannelId>& channels) const {
  std::map<ChannelId, ChannelMetadata> out;
  for (const ChannelId& c : channels) {
    auto it = truth_->channels.find(c);
    if (it == truth_->channels.end()) continue;
    out.emplace(c, ChannelMetadata{it->second.subscriber_count, it->second.title});
  }
  return out;
}

std::vector<CommenterRecord> FullRecords(const GroundTruth& truth) {
  std::vector<CommenterRecord> out;
  out.reserve(truth.subscriptions.size());
  for (const auto& [id, subs] : truth.subscriptions) {
    if (subs.empty()) continue;
    out.push_back({id, subs, true});
  }
  return out;
}

}  // namespace chanvec
