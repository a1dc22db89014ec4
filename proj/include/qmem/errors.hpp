// Copyright 2026 The qmem Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace qmem {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A pure state whose squared norm is not 1.
class NormalizationError : public Error {
 public:
  using Error::Error;
};

/// A matrix that violates the density-matrix or unitarity invariants.
class InvalidState : public Error {
 public:
  using Error::Error;
};

class InvalidSystem : public Error {
 public:
  using Error::Error;
};

class InvalidPulse : public Error {
 public:
  using Error::Error;
};

/// Raised by the integrators: step underflow, non-finite values, bad rates.
class IntegrationError : public Error {
 public:
  using Error::Error;
};

}  // namespace qmem
