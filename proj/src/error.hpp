// Copyright 2026 The nlapi Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace nlapi {

enum class ErrorCode {
  kInvalidArgument,
  kMalformedDocument,
  kDuplicateName,
  kMissingReservedLabel,
  kInvalidRegistry,
  kEmptyQuery,
  kQueryTooLong,
  kClassificationUnavailable,
  kBackendUnavailable,
  kGenerationDegraded,
  kAssembly,
  kDuplicateDecision,
  kConflict,
  kIo,
  kInternal,
};

const char* ToString(ErrorCode code);

// All recoverable failures in the core are reported as Error. The C API maps
// the code onto nlapi_status; the HTTP layer maps it onto a status code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace nlapi
