// Copyright 2026 The mrea Authors.
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

#ifndef MREA_ERRORS_HPP_
#define MREA_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace mrea {

// Base class for every error raised by the library. The CLI maps subclasses
// onto exit codes, so new error kinds must derive from one of the three
// families below (input, data, solver).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid parameters or configuration.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class GridError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// Physical feasibility violations of a dispatch.
class InfeasibleSoc : public Error {
 public:
  InfeasibleSoc(std::string what, std::size_t interval)
      : Error(std::move(what)), interval_(interval) {}
  std::size_t interval() const { return interval_; }

 private:
  std::size_t interval_;
};

class RampViolation : public Error {
 public:
  using Error::Error;
};

// Input data problems.
class DataError : public Error {
 public:
  using Error::Error;
};

class ParseError : public DataError {
 public:
  ParseError(std::string what, std::size_t line)
      : DataError(std::move(what)), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class GapError : public DataError {
 public:
  GapError(std::string what, std::vector<std::string> locations)
      : DataError(std::move(what)), locations_(std::move(locations)) {}
  const std::vector<std::string>& locations() const { return locations_; }

 private:
  std::vector<std::string> locations_;
};

class LengthMismatch : public DataError {
 public:
  using DataError::DataError;
};

class DataGap : public DataError {
 public:
  using DataError::DataError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Raised when an optimization backend does not return an optimal solution.
class SolverFailure : public Error {
 public:
  SolverFailure(std::string what, std::string status)
      : Error(std::move(what)), status_(std::move(status)) {}
  const std::string& status() const { return status_; }

 private:
  std::string status_;
};

}  // namespace mrea

#endif  // MREA_ERRORS_HPP_
