// Copyright 2026 The schemapar Authors
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

#include <algorithm>
#include <filesystem>
#include <string>
#include <vector>

#include "schemapar/schema.hpp"
#include "schemapar/text.hpp"

namespace schemapar::testing {

inline std::string corpus_path(const std::string& name) {
  return std::string(SCHEMAPAR_CORPUS_DIR) + "/" + name;
}

inline std::string corpus_text(const std::string& name) { return read_file(corpus_path(name)); }

inline Schema corpus_schema(const std::string& name) { return parse_schema(corpus_text(name)); }

/// Every `.sch` file of the corpus, sorted.
inline std::vector<std::string> corpus_files() {
  std::vector<std::string> out;
  for (const auto& e : std::filesystem::directory_iterator(SCHEMAPAR_CORPUS_DIR)) {
    if (e.path().extension() == ".sch") out.push_back(e.path().filename().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace schemapar::testing
