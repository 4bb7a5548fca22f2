// Copyright 2026 The wclner Authors.
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

#ifndef WCLNER_ERROR_HPP_
#define WCLNER_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wclner {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Incompatible tensor shapes or dimensions.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Invalid numeric state: non-finite values, bad hyperparameters.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Bad configuration (flags, config files, hyperparameter ranges).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed input data. Carries the file and 1-based line when known.
class DataError : public Error {
 public:
  DataError(const std::string& message, std::string file = {},
            std::size_t line = 0)
      : Error(Format(message, file, line)),
        file_(std::move(file)),
        line_(line) {}

  const std::string& file() const { return file_; }
  std::size_t line() const { return line_; }

 private:
  static std::string Format(const std::string& message,
                            const std::string& file, std::size_t line) {
    std::string out;
    if (!file.empty()) out += file + ":";
    if (line > 0) out += std::to_string(line) + ":";
    if (!out.empty()) out += " ";
    return out + message;
  }

  std::string file_;
  std::size_t line_ = 0;
};

}  // namespace wclner

#endif  // WCLNER_ERROR_HPP_
