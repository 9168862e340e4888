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

// Contextuality witnesses for a qutrit: the stabilizer (magic-state) witness
// built from Weyl-Heisenberg displacement operators, and the KCBS pentagon.

#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "pfsim/tensor_core.hpp"

namespace pfsim {

/// D_{x,z} = omega^{2xz} tau^x sigma^z; 2 is the inverse of 2 mod 3.
struct DisplacementOp {
  int x;
  int z;
  Operator matrix;

  /// Projector onto the eigenvector with eigenvalue omega^r:
  /// (1/3) sum_m (omega^{-r} D)^m, exact because D^3 = I with simple spectrum.
  Operator eigenprojector(int r) const {
    Operator p = Operator::zero(3);
    Operator term = Operator::identity(3);
    const Operator step = root_of_unity(3, -r) * matrix;
    for (int m = 0; m < 3; ++m) {
      p += term;
      term = term * step;
    }
    return (1.0 / 3.0) * p;
  }
};

inline DisplacementOp displacement(int x, int z) {
  const int xr = ((x % 3) + 3) % 3;
  const int zr = ((z % 3) + 3) % 3;
  const ClockShift cs = clock_shift_ops(3);
  Operator m = root_of_unity(3, 2L * xr * zr) * cs.tau.pow(static_cast<unsigned>(xr)) *
               cs.sigma.pow(static_cast<unsigned>(zr));
  return {xr, zr, std::move(m)};
}

/// {D_{0,1}, D_{1,0}, D_{1,1}, D_{1,2}} in this order.
inline std::array<DisplacementOp, 4> displacement_list() {
  return {displacement(0, 1), displacement(1, 0), displacement(1, 1), displacement(1, 2)};
}

/// r = x a + z b (mod 3), a = (1,0,1,2), b = -(0,1,1,1) = (0,2,2,2).
struct WitnessVector {
  std::array<int, 4> r;

  static WitnessVector from_xz(int x, int z) {
    constexpr std::array<int, 4> a{1, 0, 1, 2};
    constexpr std::array<int, 4> b{0, 2, 2, 2};
    WitnessVector w{};
    for (std::size_t j = 0; j < 4; ++j) w.r[j] = (((x * a[j] + z * b[j]) % 3) + 3) % 3;
    return w;
  }
};

/// A^{xz} = I - sum_j Pi_j^{r_j}.
inline Operator witness_operator(int x, int z) {
  if (x < 0 || x > 2 || z < 0 || z > 2) throw InvalidArgument("witness_operator: x, z in {0,1,2}");
  const auto ds = displacement_list();
  const WitnessVector w = WitnessVector::from_xz(x, z);
  Operator a = Operator::identity(3);
  for (std::size_t j = 0; j < 4; ++j) a -= ds[j].eigenprojector(w.r[j]);
  return a;
}

/// All nine witnesses, indexed 3x + z.
inline std::array<Operator, 9> witness_operators() {
  std::array<Operator, 9> out;
  for (int x = 0; x < 3; ++x) {
    for (int z = 0; z < 3; ++z) out[static_cast<std::size_t>(3 * x + z)] = witness_operator(x, z);
  }
  return out;
}

/// Tr[A^{xz} rho] indexed 3x + z.
inline std::array<double, 9> witness_table(const DensityMatrix& rho) {
  if (rho.dim() != 3) throw InvalidArgument("witness_table: expected a qutrit state");
  const auto ops = witness_operators();
  std::array<double, 9> t{};
  for (std::size_t i = 0; i < 9; ++i) t[i] = rho.expectation(ops[i]).real();
  return t;
}

struct MagicWitness {
  double value;  // M; > 0 certifies a distillation resource
  int x;
  int z;
};

/// M = max_{x,z} Tr[A^{xz} rho]. Ties within 1e-12 go to the
/// lexicographically smallest (x, z).
inline MagicWitness magic_witness(const DensityMatrix& rho) {
  const auto t = witness_table(rho);
  std::size_t best = 0;
  for (std::size_t i = 1; i < 9; ++i) {
    if (t[i] > t[best] + 1e-12) best = i;
  }
  return {t[best], static_cast<int>(best / 3), static_cast<int>(best % 3)};
}

// ---------------------------------------------------------------------------
// KCBS

/// Five rank-1 projectors B_i = |v_i><v_i| with B_i orthogonal to B_{i+1 mod 5}.
struct KcbsSettings {
  std::array<StateVector, 5> vectors;

  Operator projector(std::size_t i) const { return vectors[i].projector(); }

  /// max_i |<v_i|v_{i+1 mod 5}>|
  double max_neighbour_overlap() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < 5; ++i) {
      worst = std::max(worst, std::abs(vectors[i].inner(vectors[(i + 1) % 5])));
    }
    return worst;
  }
};

/// |k> = sqrt(1 - 1/sqrt5) (cos(2 k pi/5), sin(2 k pi/5), sqrt(1 + sqrt5)/2),
/// listed in the order k = 1, 3, 5, 2, 4 so consecutive settings are
/// orthogonal (the printed vectors are orthogonal for k and k + 2).
inline KcbsSettings kcbs_optimal_settings() {
  const double s5 = std::sqrt(5.0);
  const double scale = std::sqrt(1.0 - 1.0 / s5);
  const double height = std::sqrt(1.0 + s5) / 2.0;
  constexpr std::array<int, 5> order{1, 3, 5, 2, 4};
  KcbsSettings s;
  for (std::size_t i = 0; i < 5; ++i) {
    const double ang = 2.0 * order[i] * kPi / 5.0;
    Vector v(3);
    v << scale * std::cos(ang), scale * std::sin(ang), scale * height;
    // Already unit norm; StateVector only removes round-off here.
    s.vectors[i] = StateVector(std::move(v));
  }
  return s;
}

/// K = sum_i Tr[B_i rho]; K <= 2 for any non-contextual model, sqrt5 at most
/// in quantum theory.
inline double kcbs_value(const DensityMatrix& rho, const KcbsSettings& settings,
                         double compat_tol = 1e-10) {
  if (rho.dim() != 3) throw InvalidArgument("kcbs_value: expected a qutrit state");
  if (settings.max_neighbour_overlap() > compat_tol) {
    throw CompatibilityViolation("kcbs_value: neighbouring settings are not orthogonal");
  }
  double k = 0.0;
  for (std::size_t i = 0; i < 5; ++i) k += rho.expectation(settings.projector(i)).real();
  return k;
}

/// Probabilities P_{|i>}(B_{i+1} = 1) and P_{|i>}(B_{i-1} = 1); all zero for
/// compatible settings.
inline std::array<std::array<double, 2>, 5> kcbs_orthogonality_table(const KcbsSettings& s) {
  std::array<std::array<double, 2>, 5> t{};
  for (std::size_t i = 0; i < 5; ++i) {
    t[i][0] = std::norm(s.vectors[i].inner(s.vectors[(i + 1) % 5]));
    t[i][1] = std::norm(s.vectors[i].inner(s.vectors[(i + 4) % 5]));
  }
  return t;
}

inline constexpr double kKcbsQuantumMax = 2.23606797749978969640;  // sqrt(5)
inline constexpr double kKcbsClassicalBound = 2.0;

/// sqrt5 - K. The robust self-testing bound that turns this deficit into a
/// trace distance scales as O(sqrt(deficit)); its constant is not modelled.
inline double self_test_deficit(double k_observed) {
  if (k_observed < 0.0) throw InvalidArgument("self_test_deficit: K must be >= 0");
  if (k_observed > kKcbsQuantumMax + 1e-12) {
    throw NumericalError("self_test_deficit: K exceeds the quantum maximum sqrt(5)");
  }
  return kKcbsQuantumMax - k_observed;
}

}  // namespace pfsim
