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

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "chanvec/embed.h"

namespace chanvec {

void WriteEmbeddingsText(const std::filesystem::path& path,
                         const EmbeddingSet& set) {
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorCode::kIo, "cannot write " + path.string());
  out << set.size() << ' ' << set.dims() << '\n';
  char buf[32];
  for (size_t row = 0; row < set.size(); ++row) {
    const ChannelId& id = set.ids()[row];
    if (id.find_first_of(" \t\r\n") != std::string::npos) {
      Fail(ErrorCode::kInvalidArgument,
           "channel id '" + id + "' contains whitespace");
    }
    out << id;
    for (double x : set.VectorAt(row)) {
      std::snprintf(buf, sizeof(buf), "%.6g", x);
      out << ' ' << buf;
    }
    out << '\n';
  }
  if (!out) Fail(ErrorCode::kIo, "write failed for " + path.string());
}

EmbeddingSet ReadEmbeddingsText(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) {
    Fail(ErrorCode::kInputFormat, path.string() + " is empty");
  }
  std::istringstream header(line);
  long long count = -1, dims = -1;
  if (!(header >> count >> dims) || count < 0 || dims < 1) {
    Fail(ErrorCode::kInputFormat,
         path.string() + ": header must be '<count> <dims>'");
  }
  std::map<ChannelId, std::vector<double>> vectors;
  long long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::istringstream fields(line);
    std::string id;
    fields >> id;
    std::vector<double> v;
    v.reserve(static_cast<size_t>(dims));
    for (std::string tok; fields >> tok;) {
      char* end = nullptr;
      const double x = std::strtod(tok.c_str(), &end);
      if (end == tok.c_str() || *end != '\0') {
        Fail(ErrorCode::kInputFormat, path.string() + ":" +
                                          std::to_string(line_no) +
                                          ": bad number '" + tok + "'");
      }
      v.push_back(x);
    }
    if (static_cast<long long>(v.size()) != dims) {
      Fail(ErrorCode::kInputFormat, path.string() + ":" +
                                        std::to_string(line_no) + ": expected " +
                                        std::to_string(dims) + " values");
    }
    if (!vectors.emplace(id, std::move(v)).second) {
      Fail(ErrorCode::kInputFormat, path.string() + ": duplicate id '" + id + "'");
    }
  }
  if (static_cast<long long>(vectors.size()) != count) {
    Fail(ErrorCode::kInputFormat,
         path.string() + ": header promises " + std::to_string(count) +
             " vectors, found " + std::to_string(vectors.size()));
  }
  try {
    return EmbeddingSet(static_cast<int>(dims), std::move(vectors));
  } catch (const Error& e) {
    Fail(ErrorCode::kInputFormat, e.what());
  }
}

}  // namespace chanvec
