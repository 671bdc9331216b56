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

#ifndef CHANVEC_CORPUS_H_
#define CHANVEC_CORPUS_H_

// Subscription "sentences": one commenter's subscribed channels form one
// training sentence for the channel embedding model.

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chanvec/error.h"

namespace chanvec {

struct CommenterRecord {
  std::string commenter_id;
  std::vector<ChannelId> channel_ids;
  // True when the record holds the commenter's complete subscription list,
  // false for a capped sample.
  bool full = false;

  friend bool operator==(const CommenterRecord&,
                         const CommenterRecord&) = default;
};

// Throws kInvalidArgument unless the id is non-empty and channel_ids is
// non-empty with no duplicates.
void ValidateRecord(const CommenterRecord& record);

struct CorpusConfig {
  int min_channel_freq = 5;
  int min_sentence_len = 3;

  friend bool operator==(const CorpusConfig&, const CorpusConfig&) = default;
};

using ChannelCounts = std::map<ChannelId, int64_t>;

struct Corpus {
  std::vector<std::vector<ChannelId>> sentences;
  // Number of sentences containing each channel.
  ChannelCounts channel_counts;
  CorpusConfig config;

  int64_t TokenCount() const;

  friend bool operator==(const Corpus&, const Corpus&) = default;
};

// Deduplicates records by commenter id (the last record wins, at the
// position of the first occurrence), then alternates the channel-frequency
// and sentence-length filters until neither removes anything. Throws
// kEmptyCorpus when nothing survives.
Corpus BuildCorpus(std::span<const CommenterRecord> records,
                   const CorpusConfig& config);

// Permutes every sentence independently and uniformly. Deterministic in
// `seed`; counts are untouched.
Corpus ShuffleSentences(Corpus corpus, uint64_t seed);

// Distinct commenters subscribed to each channel, over unfiltered records.
ChannelCounts ChannelSubCounts(std::span<const CommenterRecord> records);

// Merges `incoming` into `records` keyed by commenter id. A full record is
// never replaced by a sampled one; otherwise the newer record wins.
void MergeRecords(std::vector<CommenterRecord>& records,
                  std::span<const CommenterRecord> incoming);

// Subscriptions file: one JSON object per line,
//   {"commenter_id": "...", "channel_ids": ["...", ...], "full": true}
CommenterRecord ParseRecordJson(std::string_view line);
std::string RecordToJson(const CommenterRecord& record);
std::vector<CommenterRecord> ReadRecordsJsonl(const std::filesystem::path& path);
void WriteRecordsJsonl(const std::filesystem::path& path,
                       std::span<const CommenterRecord> records);

// Corpus file: one sentence per line, channel ids separated by single
// spaces. Ids containing whitespace cannot be written.
void WriteCorpusText(const std::filesystem::path& path, const Corpus& corpus);
Corpus ReadCorpusText(const std::filesystem::path& path);

}  // namespace chanvec

#endif  // CHANVEC_CORPUS_H_
