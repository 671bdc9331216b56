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

#ifndef CHANVEC_ERROR_H_
#define CHANVEC_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace chanvec {

// Channel and commenter identifiers are opaque strings.
using ChannelId = std::string;

enum class ErrorCode {
  kInvalidArgument,
  kEmptyCorpus,
  kUnknownChannel,
  kUnsupportedChannel,
  kInputFormat,
  kIo,
  kSourceFailure,
  kInfeasible,
  kEmptyResult,
  kResourceExhausted,
};

std::string_view ErrorCodeName(ErrorCode code);

// Every failure surfaced by the library is an Error. `retryable()` is set
// only for transient subscription-source failures.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, bool retryable = false);

  ErrorCode code() const { return code_; }
  bool retryable() const { return retryable_; }

 private:
  ErrorCode code_;
  bool retryable_;
};

[[noreturn]] void Fail(ErrorCode code, const std::string& message);

}  // namespace chanvec

#endif  // CHANVEC_ERROR_H_
