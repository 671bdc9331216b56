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

#ifndef CHANVEC_TOOLS_MANIFEST_H_
#define CHANVEC_TOOLS_MANIFEST_H_

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace chanvec::tools {

inline constexpr const char kToolVersion[] = "0.1.0";

// Hex SHA-256 of a file's bytes.
std::string FileSha256(const std::filesystem::path& path);

// Everything needed to re-run a command: its argv, resolved parameters,
// digests of every input and the list of outputs.
class RunManifest {
 public:
  RunManifest(std::string command, std::vector<std::string> argv);

  void SetParameter(const std::string& name, const std::string& value);
  void AddInput(const std::filesystem::path& path);
  void AddOutput(const std::filesystem::path& path);
  void SetSeed(unsigned long long seed) { seed_ = seed; }
  void SetExtra(const std::string& key, const std::string& json_value);

  // Stamps the finish time and writes the manifest atomically.
  void Write(const std::filesystem::path& path);

 private:
  std::string command_;
  std::vector<std::string> argv_;
  std::map<std::string, std::string> parameters_;
  std::map<std::string, std::string> inputs_;
  std::vector<std::string> outputs_;
  std::map<std::string, std::string> extra_;
  unsigned long long seed_ = 0;
  std::string started_at_;
};

// Writes `body` to a temporary sibling, then renames it into place.
void WriteFileAtomically(const std::filesystem::path& path,
                         const std::string& body);

}  // namespace chanvec::tools

#endif  // CHANVEC_TOOLS_MANIFEST_H_
