// Copyright 2026 The pbopt Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PBOPT_ERROR_HPP
#define PBOPT_ERROR_HPP

#include <stdexcept>
#include <string>

namespace pbopt {

/// Raised when an exact (enumerating) routine is asked for a problem larger
/// than its configured capacity.
class capacity_error : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Raised when a loss lacks a capability the caller needs (e.g. a smooth
/// extension for straight-through or continuation).
class capability_error : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Bad numeric parameter (sample counts, learning rates, repetitions).
class parameter_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace pbopt

#endif  // PBOPT_ERROR_HPP
