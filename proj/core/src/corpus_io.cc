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

#include "chanvec/corpus.h"

namespace chanvec {

using nlohmann::json;

CommenterRecord ParseRecordJson(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    Fail(ErrorCode::kInputFormat, std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("commenter_id") ||
      !j.contains("channel_ids")) {
    Fail(ErrorCode::kInputFormat,
         "record needs 'commenter_id' and 'channel_ids'");
  }
  CommenterRecord r;
  try {
    r.commenter_id = j.at("commenter_id").get<std::string>();
    r.channel_ids = j.at("channel_ids").get<std::vector<std::string>>();
    r.full = j.value("full", false);
  } catch (const json::exception& e) {
    Fail(ErrorCode::kInputFormat, std::string("bad record field: ") + e.what());
  }
  try {
    ValidateRecord(r);
  } catch (const Error& e) {
    Fail(ErrorCode::kInputFormat, e.what());
  }
  return r;
}

std::string RecordToJson(const CommenterRecord& record) {
  json j;
  j["commenter_id"] = record.commenter_id;
  j["channel_ids"] = record.channel_ids;
  j["full"] = record.full;
  return j.dump();
}

std::vector<CommenterRecord> ReadRecordsJsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<CommenterRecord> records;
  std::string line;
  int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      records.push_back(ParseRecordJson(line));
    } catch (const Error& e) {
      Fail(e.code(), path.string() + ":" + std::to_string(line_no) + ": " +
                         e.what());
    }
  }
  return records;
}

void WriteRecordsJsonl(const std::filesystem::path& path,
                       std::span<const CommenterRecord> records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorCode::kIo, "cannot write " + path.string());
  for (const CommenterRecord& r : records) out << RecordToJson(r) << '\n';
  if (!out) Fail(ErrorCode::kIo, "write failed for " + path.string());
}

void WriteCorpusText(const std::filesystem::path& path, const Corpus& corpus) {
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorCode::kIo, "cannot write " + path.string());
  for (const auto& s : corpus.sentences) {
    for (size_t i = 0; i < s.size(); ++i) {
      if (s[i].find_first_of(" \t\r\n") != std::string::npos) {
        Fail(ErrorCode::kInvalidArgument,
             "channel id '" + s[i] + "' contains whitespace");
      }
      if (i > 0) out << ' ';
      out << s[i];
    }
    out << '\n';
  }
  if (!out) Fail(ErrorCode::kIo, "write failed for " + path.string());
}

Corpus ReadCorpusText(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot open " + path.string());
  Corpus corpus;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream words(line);
    std::vector<ChannelId> sentence;
    for (std::string w; words >> w;) sentence.push_back(std::move(w));
    if (sentence.empty()) continue;
    for (const ChannelId& c : sentence) ++corpus.channel_counts[c];
    corpus.sentences.push_back(std::move(sentence));
  }
  if (corpus.sentences.empty()) {
    Fail(ErrorCode::kEmptyCorpus, path.string() + " holds no sentences");
  }
  return corpus;
}

}  // namespace chanvec
