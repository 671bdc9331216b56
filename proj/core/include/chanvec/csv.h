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

#ifndef CHANVEC_CSV_H_
#define CHANVEC_CSV_H_

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace chanvec::csv {

// Minimal RFC 4180 reader: quoted fields, doubled quotes, CRLF tolerated.
// Embedded newlines inside quotes are not supported.
std::vector<std::string> ParseLine(std::string_view line);

// Reads the next non-empty record. Returns nullopt at end of stream.
std::optional<std::vector<std::string>> ReadRecord(std::istream& in);

std::string Escape(std::string_view field);
void WriteRecord(std::ostream& out, const std::vector<std::string>& fields);

// Header row -> column index; throws kInputFormat if a required column is
// missing.
class Header {
 public:
  explicit Header(std::vector<std::string> columns);
  size_t Index(std::string_view name) const;
  std::optional<size_t> Find(std::string_view name) const;
  size_t size() const { return columns_.size(); }

 private:
  std::vector<std::string> columns_;
};

}  // namespace chanvec::csv

#endif  // CHANVEC_CSV_H_
