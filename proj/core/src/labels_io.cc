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

#include <cstdlib>
#include <fstream>
#include <string>

#include "chanvec/csv.h"
#include "chanvec/knn.h"

namespace chanvec {

std::vector<LabelRow> ReadLabelsCsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot open " + path.string());
  auto head = csv::ReadRecord(in);
  if (!head) Fail(ErrorCode::kInputFormat, path.string() + " is empty");
  const csv::Header header(std::move(*head));
  const size_t id_col = header.Index("channel_id");
  const size_t kind_col = header.Index("label_kind");
  const size_t label_col = header.Index("label");
  const auto tag_col = header.Find("tag");

  std::vector<LabelRow> rows;
  while (auto fields = csv::ReadRecord(in)) {
    if (fields->size() < header.size() && fields->size() <= label_col) {
      Fail(ErrorCode::kInputFormat, path.string() + ": short row");
    }
    LabelRow row;
    row.channel_id = fields->at(id_col);
    row.kind = ParseLabelKind(fields->at(kind_col));
    row.label = fields->at(label_col);
    if (tag_col && *tag_col < fields->size()) row.tag = fields->at(*tag_col);
    if (row.channel_id.empty()) {
      Fail(ErrorCode::kInputFormat, path.string() + ": empty channel_id");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void WriteLabelsCsv(const std::filesystem::path& path,
                    std::span<const LabelRow> rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorCode::kIo, "cannot write " + path.string());
  csv::WriteRecord(out, {"channel_id", "label_kind", "label", "tag"});
  for (const LabelRow& r : rows) {
    csv::WriteRecord(out, {r.channel_id, std::string(LabelKindName(r.kind)),
                           r.label, r.tag});
  }
  if (!out) Fail(ErrorCode::kIo, "write failed for " + path.string());
}

namespace {

LabelValue ParseLabel(LabelKind kind, const LabelRow& row) {
  if (kind == LabelKind::kCategorical) return row.label;
  char* end = nullptr;
  const double x = std::strtod(row.label.c_str(), &end);
  if (row.label.empty() || *end != '\0') {
    Fail(ErrorCode::kInputFormat, "label '" + row.label + "' of '" +
                                      row.channel_id + "' is not a number");
  }
  return x;
}

}  // namespace

LabeledDataset DatasetFromRows(std::span<const LabelRow> rows,
                               const std::string& tag) {
  std::set<std::string> tags;
  for (const auto& r : rows) {
    if (!r.tag.empty()) tags.insert(r.tag);
  }
  const bool any_tag = !tags.empty();
  // An empty selector picks the file's only tag.
  std::string wanted = tag;
  if (wanted.empty() && tags.size() == 1) wanted = *tags.begin();
  std::map<ChannelId, LabelValue> labels;
  std::optional<LabelKind> kind;
  for (const LabelRow& r : rows) {
    if (any_tag && r.tag != wanted) continue;
    if (kind && *kind != r.kind) {
      Fail(ErrorCode::kInputFormat, "tag '" + tag + "' mixes label kinds");
    }
    kind = r.kind;
    LabelValue v = ParseLabel(r.kind, r);
    auto [it, inserted] = labels.emplace(r.channel_id, v);
    if (!inserted && it->second != v) {
      Fail(ErrorCode::kInputFormat,
           "conflicting labels for '" + r.channel_id + "'");
    }
  }
  if (labels.empty()) {
    Fail(ErrorCode::kInputFormat, "no labels for tag '" + tag + "'");
  }
  try {
    return LabeledDataset(*kind, std::move(labels));
  } catch (const Error& e) {
    Fail(ErrorCode::kInputFormat, e.what());
  }
}

std::vector<LabelRow> RowsFromDataset(const LabeledDataset& dataset,
                                      const std::string& tag) {
  std::vector<LabelRow> rows;
  for (const auto& [id, label] : dataset.labels()) {
    rows.push_back({id, dataset.kind(), LabelToString(label), tag});
  }
  return rows;
}

}  // namespace chanvec
