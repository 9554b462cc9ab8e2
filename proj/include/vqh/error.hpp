// Copyright 2026 The VQH Authors
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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vqh {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed input document (CSV, JSON, WAV). Carries a 1-based position
/// when one is known; 0 means "not applicable".
class ParseError : public Error {
  public:
    ParseError(const std::string &what, std::size_t row = 0,
               std::size_t column = 0);

    [[nodiscard]] std::size_t row() const noexcept { return row_; }
    [[nodiscard]] std::size_t column() const noexcept { return column_; }

  private:
    std::size_t row_;
    std::size_t column_;
};

/// Operands of incompatible size (problem vs. configuration, spin counts...).
class DimensionError : public Error {
  public:
    using Error::Error;
};

/// Value outside its documented domain.
class DomainError : public Error {
  public:
    using Error::Error;
};

} // namespace vqh
