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

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace nlapi::text {

std::string Trim(std::string_view s);
std::string ToLower(std::string_view s);

// Lowercase, trim, and map inner runs of whitespace to a single underscore.
// Used to resolve labels such as "Calculator " / " Add".
std::string NormalizeIdentifier(std::string_view s);

// Lowercase, trim, and collapse whitespace runs to one space. Defines query
// equality for dataset uniqueness and cache keys.
std::string NormalizeQuery(std::string_view s);

// Trim and collapse whitespace runs to one space, keeping case.
std::string CollapseWhitespace(std::string_view s);

// Number of Unicode code points; invalid bytes count as one each.
std::size_t CodePointLength(std::string_view s);

// Replace invalid UTF-8 sequences with U+FFFD so the text can be emitted as JSON.
std::string SanitizeUtf8(std::string_view s);

std::uint64_t Fnv1a64(std::string_view s);
std::string Hex64(std::uint64_t v);

bool IsIdentifier(std::string_view s);  // [a-z][a-z0-9_]*

}  // namespace nlapi::text
