// Copyright 2026 The Gazeloop Authors.
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

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace gazeloop {

using Json = nlohmann::json;

/// Every record written by this project carries this schema_version.
inline constexpr int kSchemaVersion = 1;

/// A parsed record and its 1-based line number.
struct JsonLine {
  std::size_t line = 0;
  Json record;
};

/// Splits `text` on '\n' and parses every non-blank line. Throws ParseError
/// naming the offending line. Records must be objects with a matching
/// schema_version.
std::vector<JsonLine> parse_jsonl(std::string_view text);

/// Record with `schema_version` and `record` fields set.
Json make_record(std::string_view kind);

/// One compact JSON document per line, '\n'-terminated.
std::string to_jsonl(const std::vector<Json>& records);

std::string read_text_file(const std::filesystem::path& path);
/// Writes atomically: a sibling temporary file is renamed over `path`.
void write_text_file(const std::filesystem::path& path, std::string_view text);

[[noreturn]] void throw_field_error(std::size_t line, const char* key, const char* detail);

/// Reads `key` from `record`, rethrowing lookup/type errors as ParseError for `line`.
template <typename T>
T field(const JsonLine& line, const char* key) {
  try {
    return line.record.at(key).get<T>();
  } catch (const std::exception& e) {
    throw_field_error(line.line, key, e.what());
  }
}

}  // namespace gazeloop
