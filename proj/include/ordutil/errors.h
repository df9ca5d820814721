/*
 * Copyright 2026 The ordutil Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#ifndef ORDUTIL_ERRORS_H_
#define ORDUTIL_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ordutil {

// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input document or value does not satisfy the schema.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Statement text could not be parsed. Line and column are 1-based.
class ParseError : public ValidationError {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column)
      : ValidationError("line " + std::to_string(line) + ", column " +
                        std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// A statement produces more models (or model pairs) than allowed.
class CapExceededError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// The explicit feature space is too large to materialize.
class OracleLimitError : public Error {
 public:
  using Error::Error;
};

// Exact coefficient arithmetic would overflow.
class OverflowError : public Error {
 public:
  using Error::Error;
};

// Non-finite arithmetic or an unusable problem inside the dual solver.
class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace ordutil

#endif  // ORDUTIL_ERRORS_H_
