// Copyright 2026 The Beacon Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace beacon {

// Every failure raised by the library derives from Error so callers (the CLI
// in particular) can catch one type and still tell categories apart.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shapes of operands do not line up.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// A softmax row with every entry masked.
class DegenerateRowError : public Error {
 public:
  using Error::Error;
};

// Invalid hyperparameters or options.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed input data: token ids, labels, corpus files, snapshots.
class DataError : public Error {
 public:
  using Error::Error;
};

// API misuse, e.g. calling backward on a value from another tape.
class UsageError : public Error {
 public:
  using Error::Error;
};

// Internal state disagrees with a request (cache length, config hash).
class StateError : public Error {
 public:
  using Error::Error;
};

// NaN or infinity where a finite value is required.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace beacon
