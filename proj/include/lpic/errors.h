// Copyright 2026 The LPIC Authors
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

#ifndef LPIC_ERRORS_H_
#define LPIC_ERRORS_H_

#include <stdexcept>
#include <string>

namespace lpic {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Tensor or image shapes that do not agree with the model configuration.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Malformed file or container (bad magic, truncated, unsupported version).
class FormatError : public Error {
 public:
  using Error::Error;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

// The range decoder ran out of input or reached an impossible state.
class CorruptStreamError : public Error {
 public:
  using Error::Error;
};

// Container was produced with different weights than the ones supplied.
class FingerprintError : public Error {
 public:
  using Error::Error;
};

// NaN or infinity where only finite values are allowed.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace lpic

#endif  // LPIC_ERRORS_H_
