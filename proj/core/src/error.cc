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

#include "chanvec/error.h"

namespace chanvec {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return "invalid argument";
    case ErrorCode::kEmptyCorpus:
      return "empty corpus";
    case ErrorCode::kUnknownChannel:
      return "unknown channel";
    case ErrorCode::kUnsupportedChannel:
      return "unsupported channel";
    case ErrorCode::kInputFormat:
      return "input format";
    case ErrorCode::kIo:
      return "i/o";
    case ErrorCode::kSourceFailure:
      return "source failure";
    case ErrorCode::kInfeasible:
      return "infeasible parameters";
    case ErrorCode::kEmptyResult:
      return "empty result";
    case ErrorCode::kResourceExhausted:
      return "resource exhausted";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message, bool retryable)
    : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
      code_(code),
      retryable_(retryable) {}

void Fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace chanvec
