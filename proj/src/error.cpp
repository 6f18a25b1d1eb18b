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
#include "error.hpp"

namespace nlapi {

const char* ToString(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kMalformedDocument: return "malformed_document";
    case ErrorCode::kDuplicateName: return "duplicate_name";
    case ErrorCode::kMissingReservedLabel: return "missing_reserved_label";
    case ErrorCode::kInvalidRegistry: return "invalid_registry";
    case ErrorCode::kEmptyQuery: return "empty_query";
    case ErrorCode::kQueryTooLong: return "query_too_long";
    case ErrorCode::kClassificationUnavailable: return "classification_unavailable";
    case ErrorCode::kBackendUnavailable: return "backend_unavailable";
    case ErrorCode::kGenerationDegraded: return "generation_degraded";
    case ErrorCode::kAssembly: return "assembly_error";
    case ErrorCode::kDuplicateDecision: return "duplicate_decision";
    case ErrorCode::kConflict: return "conflict";
    case ErrorCode::kIo: return "io_error";
    case ErrorCode::kInternal: return "internal";
  }
  return "unknown";
}

}  // namespace nlapi
