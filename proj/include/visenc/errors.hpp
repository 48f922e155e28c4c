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

#include <stdexcept>
#include <string>

namespace visenc {

/// Caller broke a documented precondition (wrong shape, out-of-range argument).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Feature vectors of incompatible length were mixed.
class DimensionError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// Input data cannot be processed: malformed files, too-short series,
/// degenerate statistics.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A sample (or series) with zero spread was asked to be standardized.
class DegenerateSampleError : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace visenc
