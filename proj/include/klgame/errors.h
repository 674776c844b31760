// Copyright 2026 The klgame Authors.
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

#ifndef KLGAME_ERRORS_H_
#define KLGAME_ERRORS_H_

#include <stdexcept>
#include <string>
#include <utility>

namespace klgame {

// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// A distribution puts mass where the reference has none, so KL is infinite.
class SupportMismatch : public Error {
 public:
  using Error::Error;
};

// A reference distribution with zero total mass.
class DegenerateReference : public Error {
 public:
  using Error::Error;
};

// Violated precondition on an argument (bad simplex, negative beta, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class EnvironmentInvalid : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

class ConfigInvalid : public Error {
 public:
  ConfigInvalid(std::string field, const std::string& reason)
      : Error("invalid config field '" + field + "': " + reason),
        field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class ParseError : public Error {
 public:
  ParseError(int line, int column, const std::string& reason)
      : Error("parse error at line " + std::to_string(line) + ", column " +
              std::to_string(column) + ": " + reason),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace klgame

#endif  // KLGAME_ERRORS_H_
