// Copyright 2026 The LightMC Authors.
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

#ifndef LIGHTMC_ERROR_H_
#define LIGHTMC_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace lightmc {

enum class ErrorCode {
  kInvalidArg,
  kInfeasibleCode,
  kDimensionMismatch,
  kIndexOutOfRange,
  kNonFiniteInput,
  kNonFiniteGradient,
  kEmptyDataset,
  kMissingClass,
  kConfigInvalid,
  kParseError,
  kEmptyFile,
  kTooFewInstances,
  kIoError,
};

std::string_view ErrorCodeName(ErrorCode code);

// All library failures are reported through this exception type. The code
// lets callers (and tests) distinguish failure classes without string
// matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArg: return "InvalidArg";
    case ErrorCode::kInfeasibleCode: return "InfeasibleCode";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kNonFiniteInput: return "NonFiniteInput";
    case ErrorCode::kNonFiniteGradient: return "NonFiniteGradient";
    case ErrorCode::kEmptyDataset: return "EmptyDataset";
    case ErrorCode::kMissingClass: return "MissingClass";
    case ErrorCode::kConfigInvalid: return "ConfigInvalid";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kEmptyFile: return "EmptyFile";
    case ErrorCode::kTooFewInstances: return "TooFewInstances";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace lightmc

#endif  // LIGHTMC_ERROR_H_
