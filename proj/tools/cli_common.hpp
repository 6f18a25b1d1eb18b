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

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "nlapi/nlapi.h"

namespace nlapi_cli {

// Owns a string returned by the C API.
class CString {
 public:
  CString() = default;
  ~CString() { nlapi_string_free(p_); }
  CString(const CString&) = delete;
  CString& operator=(const CString&) = delete;

  char** out() { return &p_; }
  std::string str() const { return p_ ? std::string(p_) : std::string(); }

 private:
  char* p_ = nullptr;
};

inline int Report(nlapi_status st) {
  std::fprintf(stderr, "error: %s: %s\n", nlapi_status_name(st), nlapi_last_error());
  return st == NLAPI_ERR_INVALID_ARGUMENT ? 2 : 1;
}

inline const char* OrNull(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

inline std::string ReadFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void WriteFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
}

}  // namespace nlapi_cli
