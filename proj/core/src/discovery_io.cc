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

#include "chanvec/discovery.h"

namespace chanvec {

using nlohmann::json;

namespace {

// Write to a sibling temp file, then rename over the target.
void WriteAtomically(const std::filesystem::path& path, const std::string& body) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) Fail(ErrorCode::kIo, "cannot write " + tmp);
    out << body;
    if (!out) Fail(ErrorCode::kIo, "write failed for " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) Fail(ErrorCode::kIo, "cannot rename " + tmp + ": " + ec.message());
}

json SummaryToJson(const RoundSummary& s) {
  json j;
  j["round"] = s.round;
  j["new_candidates"] = s.new_candidates;
  j["new_heuristic_negatives"] = s.new_heuristic_negatives;
  j["cumulative_channels"] = s.cumulative_channels;
  j["threshold"] = s.threshold;
  j["accepted"] = s.accepted;
  return j;
}

RoundSummary SummaryFromJson(const json& j) {
  RoundSummary s;
  s.round = j.at("round").get<int>();
  s.new_candidates = j.at("new_candidates").get<int64_t>();
  s.new_heuristic_negatives = j.at("new_heuristic_negatives").get<int64_t>();
  s.cumulative_channels = j.at("cumulative_channels").get<int64_t>();
  s.threshold = j.at("threshold").get<double>();
  s.accepted = j.at("accepted").get<bool>();
  return s;
}

}  // namespace

std::string RoundSummaryJson(const RoundSummary& summary) {
  return SummaryToJson(summary).dump();
}

void WriteRoundLog(const std::filesystem::path& path,
                   const std::vector<RoundSummary>& log) {
  std::string body;
  for (const auto& s : log) body += RoundSummaryJson(s) + "\n";
  WriteAtomically(path, body);
}

bool HasCheckpoint(const std::filesystem::path& dir) {
  return std::filesystem::exists(dir / "state.json") &&
         std::filesystem::exists(dir / "records.jsonl");
}

void SaveCheckpoint(const DiscoveryState& state, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) Fail(ErrorCode::kIo, "cannot create " + dir.string());

  std::string records;
  for (const auto& r : state.records) records += RecordToJson(r) + "\n";
  WriteAtomically(dir / "records.jsonl", records);

  json j;
  j["iteration"] = state.iteration;
  j["finished"] = state.finished;
  j["rounds"] = state.rounds;
  j["queried"] = state.queried;
  j["label_kind"] = std::string(LabelKindName(state.labeled.kind()));
  json labels = json::object();
  for (const auto& [id, label] : state.labeled.labels()) {
    if (const auto* x = std::get_if<double>(&label)) {
      labels[id] = *x;
    } else {
      labels[id] = std::get<std::string>(label);
    }
  }
  j["labels"] = labels;
  json log = json::array();
  for (const auto& s : state.log) log.push_back(SummaryToJson(s));
  j["log"] = log;
  // state.json last: its presence marks a complete checkpoint.
  WriteAtomically(dir / "state.json", j.dump(2) + "\n");
}

DiscoveryState LoadCheckpoint(const std::filesystem::path& dir) {
  std::ifstream in(dir / "state.json");
  if (!in) Fail(ErrorCode::kIo, "cannot open " + (dir / "state.json").string());
  std::stringstream ss;
  ss << in.rdbuf();
  DiscoveryState s;
  try {
    const json j = json::parse(ss.str());
    s.iteration = j.at("iteration").get<int>();
    s.finished = j.at("finished").get<bool>();
    s.rounds = j.at("rounds").get<std::vector<std::set<ChannelId>>>();
    s.queried = j.at("queried").get<std::set<ChannelId>>();
    const LabelKind kind = ParseLabelKind(j.at("label_kind").get<std::string>());
    std::map<ChannelId, LabelValue> labels;
    for (const auto& [id, v] : j.at("labels").items()) {
      if (v.is_string()) {
        labels[id] = v.get<std::string>();
      } else {
        labels[id] = v.get<double>();
      }
    }
    s.labeled = LabeledDataset(kind, std::move(labels));
    for (const auto& e : j.at("log")) s.log.push_back(SummaryFromJson(e));
  } catch (const json::exception& e) {
    Fail(ErrorCode::kInputFormat, std::string("bad checkpoint: ") + e.what());
  }
  for (size_t r = 0; r < s.rounds.size(); ++r) {
    for (const ChannelId& c : s.rounds[r]) {
      s.candidates.insert(c);
      s.provenance[c] = static_cast<int>(r) + 1;
    }
  }
  s.records = ReadRecordsJsonl(dir / "records.jsonl");
  try {
    s.Validate();
  } catch (const Error& e) {
    Fail(ErrorCode::kInputFormat, e.what());
  }
  return s;
}

}  // namespace chanvec
