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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gazeloop {

// Invalid arguments are reported with std::invalid_argument throughout. The
// types below cover the remaining failure classes callers need to tell apart.

/// Malformed input file. `line()` is 1-based; 0 when no line applies.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(line == 0 ? what
                                     : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Well-formed input that violates a dataset-level contract.
class InvalidDataset : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A transductive model was asked to score a graph it was not built for.
class UnseenNodeUnsupported : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A metric has no defined value for the given input.
class UndefinedResult : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotFound : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gazeloop
