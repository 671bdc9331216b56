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
#include <random>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>

#include "chanvec/corpus.h"

namespace chanvec {

void ValidateRecord(const CommenterRecord& record) {
  if (record.commenter_id.empty()) {
    Fail(ErrorCode::kInvalidArgument, "commenter record with empty id");
  }
  if (record.channel_ids.empty()) {
    Fail(ErrorCode::kInvalidArgument,
         "commenter '" + record.commenter_id + "' has no channels");
  }
  std::unordered_set<std::string_view> seen;
  for (const ChannelId& c : record.channel_ids) {
    if (c.empty()) {
      Fail(ErrorCode::kInvalidArgument,
           "commenter '" + record.commenter_id + "' lists an empty channel id");
    }
    if (!seen.insert(c).second) {
      Fail(ErrorCode::kInvalidArgument, "commenter '" + record.commenter_id +
                                            "' lists channel '" + c +
                                            "' twice");
    }
  }
}

int64_t Corpus::TokenCount() const {
  int64_t n = 0;
  for (const auto& s : sentences) n += static_cast<int64_t>(s.size());
  return n;
}

namespace {

ChannelCounts CountSentences(const std::vector<std::vector<ChannelId>>& sentences) {
  ChannelCounts counts;
  for (const auto& s : sentences) {
    for (const ChannelId& c : s) ++counts[c];
  }
  return counts;
}

}  // namespace

Corpus BuildCorpus(std::span<const CommenterRecord> records,
                   const CorpusConfig& config) {
  if (config.min_channel_freq < 1 || config.min_sentence_len < 1) {
    Fail(ErrorCode::kInvalidArgument,
         "min_channel_freq and min_sentence_len must be >= 1");
  }

  // Last record wins, keeping the slot of the first occurrence.
  std::unordered_map<std::string_view, size_t> slot;
  std::vector<const CommenterRecord*> unique;
  for (const CommenterRecord& r : records) {
    ValidateRecord(r);
    auto [it, inserted] = slot.try_emplace(r.commenter_id, unique.size());
    if (inserted) {
      unique.push_back(&r);
    } else {
      unique[it->second] = &r;
    }
  }

  Corpus corpus;
  corpus.config = config;
  corpus.sentences.reserve(unique.size());
  for (const CommenterRecord* r : unique) {
    corpus.sentences.push_back(r->channel_ids);
  }

  const auto min_len = static_cast<size_t>(config.min_sentence_len);
  ChannelCounts counts = CountSentences(corpus.sentences);
  while (true) {
    bool changed = false;
    std::vector<std::vector<ChannelId>> kept;
    kept.reserve(corpus.sentences.size());
    for (auto& s : corpus.sentences) {
      const auto old_size = s.size();
      std::erase_if(s, [&](const ChannelId& c) {
        return counts.at(c) < config.min_channel_freq;
      });
      if (s.size() != old_size) changed = true;
      if (s.size() >= min_len) {
        kept.push_back(std::move(s));
      } else {
        changed = true;
      }
    }
    corpus.sentences = std::move(kept);
    counts = CountSentences(corpus.sentences);
    if (!changed) break;
  }
  if (corpus.sentences.empty()) {
    Fail(ErrorCode::kEmptyCorpus, "no sentence survives the corpus filters");
  }
  corpus.channel_counts = std::move(counts);
  return corpus;
}

Corpus ShuffleSentences(Corpus corpus, uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (auto& s : corpus.sentences) std::shuffle(s.begin(), s.end(), rng);
  return corpus;
}

ChannelCounts ChannelSubCounts(std::span<const CommenterRecord> records) {
  // A commenter seen in several records counts once per channel.
  std::unordered_map<std::string_view, std::unordered_set<std::string_view>>
      commenters;
  for (const CommenterRecord& r : records) {
    for (const ChannelId& c : r.channel_ids) {
      commenters[c].insert(r.commenter_id);
    }
  }
  ChannelCounts counts;
  for (const auto& [channel, who] : commenters) {
    counts.emplace(std::string(channel), static_cast<int64_t>(who.size()));
  }
  return counts;
}

void MergeRecords(std::vector<CommenterRecord>& records,
                  std::span<const CommenterRecord> incoming) {
  std::unordered_map<std::string, size_t> slot;
  slot.reserve(records.size() + incoming.size());
  for (size_t i = 0; i < records.size(); ++i) {
    slot[records[i].commenter_id] = i;
  }
  for (const CommenterRecord& r : incoming) {
    auto [it, inserted] = slot.try_emplace(r.commenter_id, records.size());
    if (inserted) {
      records.push_back(r);
      continue;
    }
    CommenterRecord& existing = records[it->second];
    if (existing.full && !r.full) continue;
    existing = r;
  }
}

}  // namespace chanvec
