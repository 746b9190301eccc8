// Copyright 2026 The Geomask Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GEOMASK_ERROR_H_
#define GEOMASK_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace geomask {

enum class ErrorCode {
  kInvalidArgument,
  kOutOfFrame,
  kDuplicateId,
  kInvalidPolygon,
  kMissingHeader,
  kRowParseError,
  kMissingProperty,
  kNonPositiveDensity,
  kUnknownLabel,
  kMissingRadius,
  kAmOutOfRange,
  kPointOutsideAllBlockGroups,
  kRejectionBudgetExceeded,
  kInvalidCoverage,
  kNoResidentialData,
  kTargetUnreachable,
  kMultipleUsers,
  kEmptyMap,
  kIo,
};

std::string_view ErrorCodeName(ErrorCode code);

// Every failure raised by the library carries one of the codes above so
// callers (and the CLI's exit-code mapping) can branch on the kind.
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
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kOutOfFrame: return "OutOfFrame";
    case ErrorCode::kDuplicateId: return "DuplicateId";
    case ErrorCode::kInvalidPolygon: return "InvalidPolygon";
    case ErrorCode::kMissingHeader: return "MissingHeader";
    case ErrorCode::kRowParseError: return "RowParseError";
    case ErrorCode::kMissingProperty: return "MissingProperty";
    case ErrorCode::kNonPositiveDensity: return "NonPositiveDensity";
    case ErrorCode::kUnknownLabel: return "UnknownLabel";
    case ErrorCode::kMissingRadius: return "MissingRadius";
    case ErrorCode::kAmOutOfRange: return "AMOutOfRange";
    case ErrorCode::kPointOutsideAllBlockGroups: return "PointOutsideAllBlockGroups";
    case ErrorCode::kRejectionBudgetExceeded: return "RejectionBudgetExceeded";
    case ErrorCode::kInvalidCoverage: return "InvalidCoverage";
    case ErrorCode::kNoResidentialData: return "NoResidentialData";
    case ErrorCode::kTargetUnreachable: return "TargetUnreachable";
    case ErrorCode::kMultipleUsers: return "MultipleUsers";
    case ErrorCode::kEmptyMap: return "EmptyMap";
    case ErrorCode::kIo: return "IoError";
  }
  return "Unknown";
}

}  // namespace geomask

#endif  // GEOMASK_ERROR_H_
