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

#include "chanvec/csv.h"

#include <cstdlib>
#include <string>
#include <thread>

#include "chanvec/error.h"
#include "chanvec/util.h"

namespace chanvec {

int WorkerCount() {
  if (const char* env = std::getenv("CHANVEC_THREADS"); env != nullptr) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

namespace csv {

std::vector<std::string> ParseLine(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  if (quoted) Fail(ErrorCode::kInputFormat, "unterminated quote in CSV line");
  fields.push_back(std::move(field));
  return fields;
}

std::optional<std::vector<std::string>> ReadRecord(std::istream& in) {
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    return ParseLine(line);
  }
  return std::nullopt;
}

std::string Escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void WriteRecord(std::ostream& out, const std::vector<std::string>& fields) {
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out << ',';
    out << Escape(fields[i]);
  }
  out << '\n';
}

Header::Header(std::vector<std::string> columns)
    : columns_(std::move(columns)) {
  // Tolerate a UTF-8 byte-order mark on the first column.
  if (!columns_.empty() && columns_[0].rfind("\xEF\xBB\xBF", 0) == 0) {
    columns_[0].erase(0, 3);
  }
}

std::optional<size_t> Header::Find(std::string_view name) const {
  for (size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i] == name) return i;
  }
  return std::nullopt;
}

size_t Header::Index(std::string_view name) const {
  if (auto i = Find(name)) return *i;
  Fail(ErrorCode::kInputFormat,
       "missing CSV column '" + std::string(name) + "'");
}

}  // namespace csv
}  // namespace chanvec
