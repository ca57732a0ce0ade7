// Copyright (c) 2026 The endpoint-rt Authors
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

#ifndef ENDPOINT_RT_ERROR_H_
#define ENDPOINT_RT_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace endpoint_rt {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A configuration value violates its invariant. `field()` names the offending
// field so the CLI can report it.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// An input stream is not time-sorted. `index()` is the position of the first
// element that is earlier than its predecessor.
class StreamOrderError : public Error {
 public:
  StreamOrderError(std::string stream, std::size_t index)
      : Error("stream '" + stream + "' is not time-sorted at index " +
              std::to_string(index)),
        stream_(std::move(stream)),
        index_(index) {}
  const std::string& stream() const { return stream_; }
  std::size_t index() const { return index_; }

 private:
  std::string stream_;
  std::size_t index_;
};

// Input data cannot be used (dimension mismatch, single-class labels, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

// Malformed file contents.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace endpoint_rt

#endif  // ENDPOINT_RT_ERROR_H_
