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

#include "manifest.h"

#include <openssl/evp.h>

#include <chrono>
#include <ctime>
#include <fstream>
#include <memory>

#include <nlohmann/json.hpp>

#include "chanvec/error.h"

namespace chanvec::tools {
namespace {

std::string UtcNow() {
  const auto now = std::chrono::system_clock::to_time_t(
      std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string FileSha256(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot open " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                               EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    Fail(ErrorCode::kIo, "SHA-256 unavailable");
  }
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof(buf));
    if (in.gcount() > 0) {
      EVP_DigestUpdate(ctx.get(), buf, static_cast<size_t>(in.gcount()));
    }
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex.push_back(kHex[digest[i] >> 4]);
    hex.push_back(kHex[digest[i] & 0xf]);
  }
  return hex;
}

void WriteFileAtomically(const std::filesystem::path& path,
                         const std::string& body) {
  const std::string tmp = path.string() + ".tmp";
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

RunManifest::RunManifest(std::string command, std::vector<std::string> argv)
    : command_(std::move(command)), argv_(std::move(argv)), started_at_(UtcNow()) {}

void RunManifest::SetParameter(const std::string& name, const std::string& value) {
  parameters_[name] = value;
}

void RunManifest::AddInput(const std::filesystem::path& path) {
  inputs_[path.string()] = FileSha256(path);
}

void RunManifest::AddOutput(const std::filesystem::path& path) {
  outputs_.push_back(path.string());
}

void RunManifest::SetExtra(const std::string& key, const std::string& json_value) {
  extra_[key] = json_value;
}

void RunManifest::Write(const std::filesystem::path& path) {
  nlohmann::json j;
  j["command"] = command_;
  j["argv"] = argv_;
  j["parameters"] = parameters_;
  j["inputs"] = inputs_;
  j["outputs"] = outputs_;
  j["seed"] = seed_;
  j["tool_version"] = kToolVersion;
  j["started_at"] = started_at_;
  j["finished_at"] = UtcNow();
  for (const auto& [key, value] : extra_) j[key] = nlohmann::json::parse(value);
  WriteFileAtomically(path, j.dump(2) + "\n");
}

}  // namespace chanvec::tools
