// Copyright 2026 The Pooling Network Authors
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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pooling {

enum class ErrorCode {
  kDuplicateName,
  kInvalidBounds,
  kUnknownNode,
  kDuplicateEdge,
  kFrozenNetwork,
  kNetworkNotFrozen,
  kParseError,
  kUnknownConstraint,
  kUnknownVariable,
  kMissingVariableValue,
  kInvalidArgument,
  kEmptyLayer,
  kInfeasiblePool,
  kMissingQuality,
  kUnboundedBilinearVariable,
  kBoundsWiden,
  kAlreadyInstalled,
  kUnboundedOutputCapacity,
  kAlreadyRestricted,
  kInvalidWeights,
  kInfeasibleInput,
  kNumericalFailure,
  kNonLinearSideConstraints,
  kInfeasibleSpec,
  kEmptyInput,
  kNonPositiveShifted,
  kMissingRecord,
};

inline std::string_view ToString(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDuplicateName: return "DuplicateName";
    case ErrorCode::kInvalidBounds: return "InvalidBounds";
    case ErrorCode::kUnknownNode: return "UnknownNode";
    case ErrorCode::kDuplicateEdge: return "DuplicateEdge";
    case ErrorCode::kFrozenNetwork: return "FrozenNetwork";
    case ErrorCode::kNetworkNotFrozen: return "NetworkNotFrozen";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kUnknownConstraint: return "UnknownConstraint";
    case ErrorCode::kUnknownVariable: return "UnknownVariable";
    case ErrorCode::kMissingVariableValue: return "MissingVariableValue";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kEmptyLayer: return "EmptyLayer";
    case ErrorCode::kInfeasiblePool: return "InfeasiblePool";
    case ErrorCode::kMissingQuality: return "MissingQuality";
    case ErrorCode::kUnboundedBilinearVariable: return "UnboundedBilinearVariable";
    case ErrorCode::kBoundsWiden: return "BoundsWiden";
    case ErrorCode::kAlreadyInstalled: return "AlreadyInstalled";
    case ErrorCode::kUnboundedOutputCapacity: return "UnboundedOutputCapacity";
    case ErrorCode::kAlreadyRestricted: return "AlreadyRestricted";
    case ErrorCode::kInvalidWeights: return "InvalidWeights";
    case ErrorCode::kInfeasibleInput: return "InfeasibleInput";
    case ErrorCode::kNumericalFailure: return "NumericalFailure";
    case ErrorCode::kNonLinearSideConstraints: return "NonLinearSideConstraints";
    case ErrorCode::kInfeasibleSpec: return "InfeasibleSpec";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kNonPositiveShifted: return "NonPositiveShifted";
    case ErrorCode::kMissingRecord: return "MissingRecord";
  }
  return "Unknown";
}

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ToString(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace pooling
