// seqcritic/errors.h

// Copyright 2026 The seqcritic Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SEQCRITIC_ERRORS_H_
#define SEQCRITIC_ERRORS_H_

#include <stdexcept>
#include <string>

namespace seqcritic {

// Bad user-supplied configuration (flags, config files, empty corpora).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text; `offset` is the byte position where parsing stopped.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// Well-formed input that lacks a required field.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(const std::string& what, std::string field)
      : std::runtime_error(what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// Shape mismatch inside a differentiable op; the message names the op.
class DimensionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// API misuse: double backward, stepping a terminal state, length mismatch.
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Training blew up (NaN loss or gradient).
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace seqcritic

#endif  // SEQCRITIC_ERRORS_H_
