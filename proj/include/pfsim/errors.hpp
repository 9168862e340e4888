// Copyright 2026 The pfsim Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace pfsim {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller-supplied argument violates a documented precondition
/// (order n < 2, probability outside [0, 1], bad basis label, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Requested Hilbert space exceeds the dense size guard.
class SizeGuardError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// The Z3-only formulas (Fock parafermions, braiding chain) were asked for
/// another order.
class UnsupportedOrder : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// A numerical result violated an invariant that should hold exactly
/// (non-Hermitian Hamiltonian, vanishing overlap, fit divergence, ...).
class NumericalError : public Error {
 public:
  using Error::Error;
};

class NotHermitian : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class FitFailure : public NumericalError {
 public:
  FitFailure(const std::string& what, double residual)
      : NumericalError(what + " (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// KCBS settings whose cyclic neighbours are not orthogonal.
class CompatibilityViolation : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Two beam-displacer routes land on the same (mode, polarization) slot.
class RoutingCollision : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

}  // namespace pfsim
