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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "pfsim/witness.hpp"
#include "test_support.hpp"

using namespace pfsim;
using pfsim::testing::MatrixNear;

namespace {

DensityMatrix resource_rho() { return DensityMatrix::pure(StateVector({0.5, 0.0, -std::sqrt(3.0) / 2.0})); }

}  // namespace

TEST(displacement, simple_members_and_order_three) {
  const ClockShift cs = clock_shift_ops(3);
  EXPECT_TRUE(MatrixNear(displacement(0, 1).matrix, cs.sigma, 1e-15));
  EXPECT_TRUE(MatrixNear(displacement(1, 0).matrix, cs.tau, 1e-15));
  EXPECT_TRUE(MatrixNear(displacement(1, 1).matrix, omega3() * omega3() * (cs.tau * cs.sigma), 1e-15));
  for (int x = 0; x < 3; ++x) {
    for (int z = 0; z < 3; ++z) {
      EXPECT_TRUE(MatrixNear(displacement(x, z).matrix.pow(3), Operator::identity(3), 1e-13));
    }
  }
  // Indices are reduced mod 3.
  EXPECT_TRUE(MatrixNear(displacement(4, -2).matrix, displacement(1, 1).matrix, 1e-15));
}

TEST(displacement, eigenprojectors_resolve_identity) {
  for (const auto& d : displacement_list()) {
    Operator sum = Operator::zero(3);
    for (int r = 0; r < 3; ++r) {
      const Operator p = d.eigenprojector(r);
      EXPECT_TRUE(MatrixNear(p * p, p, 1e-14));
      EXPECT_NEAR(p.trace().real(), 1.0, 1e-14);
      EXPECT_TRUE(MatrixNear(d.matrix * p, root_of_unity(3, r) * p, 1e-14));
      sum += p;
    }
    EXPECT_TRUE(MatrixNear(sum, Operator::identity(3), 1e-14));
  }
}

TEST(displacement, listed_bases_are_mutually_unbiased) {
  const auto ds = displacement_list();
  for (std::size_t a = 0; a < 4; ++a) {
    for (std::size_t b = a + 1; b < 4; ++b) {
      for (int r = 0; r < 3; ++r) {
        for (int s = 0; s < 3; ++s) {
          EXPECT_NEAR((ds[a].eigenprojector(r) * ds[b].eigenprojector(s)).trace().real(), 1.0 / 3.0, 1e-14);
        }
      }
    }
  }
}

TEST(witness_operator, sum_and_trace) {
  Operator sum = Operator::zero(3);
  for (const auto& a : witness_operators()) {
    EXPECT_TRUE(a.is_hermitian(1e-14));
    EXPECT_NEAR(a.trace().real(), -1.0, 1e-14);
    sum += a;
  }
  EXPECT_TRUE(MatrixNear(sum, -3.0 * Operator::identity(3), 1e-13));
  EXPECT_THROW(witness_operator(3, 0), InvalidArgument);
  EXPECT_THROW(witness_operator(0, -1), InvalidArgument);
}

TEST(witness_table, resource_state_values) {
  const double h = std::sqrt(3.0) / 2.0;
  const std::array<double, 9> want{-0.25, -0.25, -0.25, h, -h / 2, -h / 2, -0.75, -0.75, -0.75};
  const auto t = witness_table(resource_rho());
  for (std::size_t i = 0; i < 9; ++i) EXPECT_NEAR(t[i], want[i], 1e-14) << i;
  const MagicWitness m = magic_witness(resource_rho());
  EXPECT_NEAR(m.value, h, 1e-14);
  EXPECT_EQ(m.x, 1);
  EXPECT_EQ(m.z, 0);
}

TEST(magic_witness, ties_go_to_first_index) {
  const MagicWitness m = magic_witness(DensityMatrix::maximally_mixed(3));
  EXPECT_NEAR(m.value, -1.0 / 3.0, 1e-14);
  EXPECT_EQ(m.x, 0);
  EXPECT_EQ(m.z, 0);
}

TEST(magic_witness, stabilizer_states_are_not_certified) {
  for (const auto& d : displacement_list()) {
    for (int r = 0; r < 3; ++r) {
      EXPECT_LE(magic_witness(DensityMatrix::normalized(d.eigenprojector(r))).value, 1e-12);
    }
  }
  EXPECT_THROW(witness_table(DensityMatrix::maximally_mixed(2)), InvalidArgument);
}

TEST(kcbs, optimal_settings_are_cyclically_orthogonal) {
  const KcbsSettings s = kcbs_optimal_settings();
  EXPECT_LT(s.max_neighbour_overlap(), 1e-15);
  for (const auto& row : kcbs_orthogonality_table(s)) {
    EXPECT_LT(row[0], 1e-30);
    EXPECT_LT(row[1], 1e-30);
  }
}

TEST(kcbs, optimal_state_reaches_sqrt5) {
  const KcbsSettings s = kcbs_optimal_settings();
  const DensityMatrix psi = DensityMatrix::pure(StateVector({0, 0, 1}));
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(psi.expectation(s.projector(i)).real(), 1.0 / std::sqrt(5.0), 1e-15);
  EXPECT_NEAR(kcbs_value(psi, s), std::sqrt(5.0), 1e-12);
  EXPECT_NEAR(kcbs_value(DensityMatrix::maximally_mixed(3), s), 5.0 / 3.0, 1e-14);
  EXPECT_NEAR(self_test_deficit(kcbs_value(psi, s)), 0.0, 1e-12);
}

TEST(kcbs, quantum_bound_holds_on_random_states) {
  std::mt19937_64 rng(21);
  const KcbsSettings s = kcbs_optimal_settings();
  for (int t = 0; t < 100; ++t) {
    const double k = kcbs_value(pfsim::testing::random_density(rng), s);
    EXPECT_LE(k, kKcbsQuantumMax + 1e-12);
    EXPECT_GE(k, 0.0);
  }
}

TEST(kcbs, incompatible_settings_and_bad_values_throw) {
  KcbsSettings s = kcbs_optimal_settings();
  std::swap(s.vectors[1], s.vectors[2]);
  EXPECT_THROW(kcbs_value(DensityMatrix::maximally_mixed(3), s), CompatibilityViolation);
  EXPECT_THROW(self_test_deficit(-0.1), InvalidArgument);
  EXPECT_THROW(self_test_deficit(2.3), NumericalError);
}
