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

#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "chanvec/csv.h"
#include "chanvec/synth.h"

namespace chanvec {

using nlohmann::json;

std::string EcosystemConfigJson(const EcosystemConfig& c) {
  json j;
  j["n_communities"] = c.n_communities;
  j["channels_per_community"] = c.channels_per_community;
  j["n_commenters"] = c.n_commenters;
  j["mean_subs_per_commenter"] = c.mean_subs_per_commenter;
  j["in_community_affinity"] = c.in_community_affinity;
  j["public_profile_rate"] = c.public_profile_rate;
  j["sample_subs_cap"] = c.sample_subs_cap;
  j["full_subs_commenters_per_channel"] = c.full_subs_commenters_per_channel;
  j["comments_per_video"] = c.comments_per_video;
  j["videos_sampled"] = c.videos_sampled;
  j["subscriber_exponent"] = c.subscriber_exponent;
  j["min_subscribers"] = c.min_subscribers;
  j["max_subscribers"] = c.max_subscribers;
  j["comment_saturation_subs"] = c.comment_saturation_subs;
  j["seed"] = c.seed;
  return j.dump(2);
}

EcosystemConfig ParseEcosystemConfigJson(const std::string& text) {
  EcosystemConfig c;
  try {
    const json j = json::parse(text);
    c.n_communities = j.value("n_communities", c.n_communities);
    c.channels_per_community =
        j.value("channels_per_community", c.channels_per_community);
    c.n_commenters = j.value("n_commenters", c.n_commenters);
    c.mean_subs_per_commenter =
        j.value("mean_subs_per_commenter", c.mean_subs_per_commenter);
    c.in_community_affinity =
        j.value("in_community_affinity", c.in_community_affinity);
    c.public_profile_rate = j.value("public_profile_rate", c.public_profile_rate);
    c.sample_subs_cap = j.value("sample_subs_cap", c.sample_subs_cap);
    c.full_subs_commenters_per_channel = j.value(
        "full_subs_commenters_per_channel", c.full_subs_commenters_per_channel);
    c.comments_per_video = j.value("comments_per_video", c.comments_per_video);
    c.videos_sampled = j.value("videos_sampled", c.videos_sampled);
    c.subscriber_exponent = j.value("subscriber_exponent", c.subscriber_exponent);
    c.min_subscribers = j.value("min_subscribers", c.min_subscribers);
    c.max_subscribers = j.value("max_subscribers", c.max_subscribers);
    c.comment_saturation_subs =
        j.value("comment_saturation_subs", c.comment_saturation_subs);
    c.seed = j.value("seed", c.seed);
  } catch (const json::exception& e) {
    Fail(ErrorCode::kInputFormat, std::string("bad world config: ") + e.what());
  }
  return c;
}

void ExportWorld(const GroundTruth& truth, const EcosystemConfig& config,
                 const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) Fail(ErrorCode::kIo, "cannot create " + dir.string() + ": " + ec.message());

  {
    std::ofstream out(dir / "channels.csv", std::ios::binary);
    if (!out) Fail(ErrorCode::kIo, "cannot write channels.csv");
    csv::WriteRecord(out, {"channel_id", "community", "subscriber_count",
                           "views_12mo", "title"});
    for (const auto& [id, t] : truth.channels) {
      csv::WriteRecord(out, {id, std::to_string(t.community),
                             std::to_string(t.subscriber_count),
                             std::to_string(t.views_12mo), t.title});
    }
    if (!out) Fail(ErrorCode::kIo, "write failed for channels.csv");
  }
  WriteRecordsJsonl(dir / "subscriptions.jsonl", FullRecords(truth));
  {
    std::ofstream out(dir / "world.json", std::ios::binary);
    if (!out) Fail(ErrorCode::kIo, "cannot write world.json");
    out << EcosystemConfigJson(config) << '\n';
  }
}

World ImportWorld(const std::filesystem::path& dir) {
  World world;
  {
    std::ifstream in(dir / "world.json");
    if (!in) Fail(ErrorCode::kIo, "cannot open " + (dir / "world.json").string());
    std::stringstream ss;
    ss << in.rdbuf();
    world.config = ParseEcosystemConfigJson(ss.str());
  }
  {
    std::ifstream in(dir / "channels.csv");
    if (!in) Fail(ErrorCode::kIo, "cannot open " + (dir / "channels.csv").string());
    auto head = csv::ReadRecord(in);
    if (!head) Fail(ErrorCode::kInputFormat, "channels.csv is empty");
    const csv::Header header(std::move(*head));
    const size_t id = header.Index("channel_id");
    const size_t community = header.Index("community");
    const size_t subs = header.Index("subscriber_count");
    const auto views = header.Find("views_12mo");
    const auto title = header.Find("title");
    while (auto f = csv::ReadRecord(in)) {
      if (f->size() < header.size()) {
        Fail(ErrorCode::kInputFormat, "short row in channels.csv");
      }
      ChannelTruth t;
      try {
        t.community = std::stoi(f->at(community));
        t.subscriber_count = std::stoll(f->at(subs));
        if (views) t.views_12mo = std::stoll(f->at(*views));
      } catch (const std::exception&) {
        Fail(ErrorCode::kInputFormat, "bad number in channels.csv");
      }
      if (title) t.title = f->at(*title);
      world.truth.channels.emplace(f->at(id), std::move(t));
    }
  }
  for (auto& r : ReadRecordsJsonl(dir / "subscriptions.jsonl")) {
    world.truth.subscriptions[r.commenter_id] = std::move(r.channel_ids);
  }
  return world;
}

}  // namespace chanvec
