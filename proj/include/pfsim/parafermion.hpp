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

// Parafermion operators from the Fradkin-Kadanoff map and the chain
// Hamiltonians built from them.

#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "pfsim/tensor_core.hpp"

namespace pfsim {

/// Parameters of the generic Z_n parafermion chain
///   H = -f e^{i theta} sum_j a_ja^dag a_jb - J e^{i phi} sum_j a_jb^dag a_(j+1)a + h.c.
struct ChainSpec {
  int n = 3;
  int length = 3;
  double f = 0.0;
  double J = 1.0;
  double theta = 0.0;
  double phi = 0.0;

  /// Validates and reduces the chiral phases mod 2 pi.
  static ChainSpec make(int n, int length, double f = 0.0, double J = 1.0, double theta = 0.0,
                        double phi = 0.0) {
    ChainSpec s{n, length, f, J, reduce_phase(theta), reduce_phase(phi)};
    s.validate();
    return s;
  }

  void validate() const {
    if (n < 2) throw InvalidArgument("ChainSpec: order n must be >= 2");
    if (length < 1) throw InvalidArgument("ChainSpec: length must be >= 1");
    checked_power(static_cast<std::size_t>(n), static_cast<std::size_t>(length));
  }

  std::size_t dim() const {
    return checked_power(static_cast<std::size_t>(n), static_cast<std::size_t>(length));
  }

  static double reduce_phase(double x) {
    double r = std::fmod(x, 2.0 * kPi);
    if (r < 0) r += 2.0 * kPi;
    return r;
  }
};

enum class Flavor { a, b };

struct ParafermionMode {
  int site;
  Flavor flavor;
};

enum class Picture { parafermion, spin };

struct HamiltonianStage {
  int stage;  // 0, 1 or 2
  Picture picture;
};

namespace detail {

inline void check_site(int k, const ChainSpec& spec) {
  if (k < 1 || k > spec.length) throw InvalidArgument("parafermion site out of range");
}

inline Operator site_sigma(int k, const ChainSpec& spec) {
  return embed_site(clock_shift_ops(spec.n).sigma, k, spec.length);
}

inline Operator site_tau(int k, const ChainSpec& spec) {
  return embed_site(clock_shift_ops(spec.n).tau, k, spec.length);
}

inline Operator hermitian_part_sum(const Operator& x) { return x + x.adjoint(); }

}  // namespace detail

/// alpha_ka = sigma_k prod_{j<k} tau_j ; alpha_kb = sigma_k prod_{j<=k} tau_j.
inline Operator fk_operator(ParafermionMode mode, const ChainSpec& spec) {
  spec.validate();
  detail::check_site(mode.site, spec);
  Operator out = detail::site_sigma(mode.site, spec);
  const int last = mode.flavor == Flavor::a ? mode.site - 1 : mode.site;
  for (int j = 1; j <= last; ++j) out = out * detail::site_tau(j, spec);
  return out;
}

/// Q = prod_k tau_k, the spin-picture form of prod_k alpha_ka^dag alpha_kb.
inline Operator parity_operator(const ChainSpec& spec) {
  spec.validate();
  Operator q = Operator::identity(spec.dim());
  for (int k = 1; k <= spec.length; ++k) q = q * detail::site_tau(k, spec);
  return q;
}

/// tau_k = alpha_ka^dag alpha_kb (inverse map).
inline Operator tau_from_parafermions(int k, const ChainSpec& spec) {
  return fk_operator({k, Flavor::a}, spec).adjoint() * fk_operator({k, Flavor::b}, spec);
}

/// sigma_k = alpha_ka prod_{j<k} alpha_jb^dag alpha_ja (inverse map).
inline Operator sigma_from_parafermions(int k, const ChainSpec& spec) {
  Operator out = fk_operator({k, Flavor::a}, spec);
  for (int j = 1; j < k; ++j) {
    out = out * fk_operator({j, Flavor::b}, spec).adjoint() * fk_operator({j, Flavor::a}, spec);
  }
  return out;
}

/// Fock parafermion annihilator
///   C_k = (2/3) a_ka - (1/3) sum_{m=1}^{2} omega^{m(m+1)/2} a_ka^{m+1} (a_kb^dag)^m.
/// Only defined for Z_3.
inline Operator fock_parafermion(int k, const ChainSpec& spec) {
  if (spec.n != 3) throw UnsupportedOrder("fock_parafermion: only Z_3 is supported");
  const Operator a = fk_operator({k, Flavor::a}, spec);
  const Operator bd = fk_operator({k, Flavor::b}, spec).adjoint();
  Operator out = (2.0 / 3.0) * a;
  for (unsigned m = 1; m <= 2; ++m) {
    out -= (1.0 / 3.0) * root_of_unity(3, static_cast<long>(m * (m + 1) / 2)) *
           (a.pow(m + 1) * bd.pow(m));
  }
  return out;
}

/// Hermitian terms (each already summed with its h.c.) of the three braiding
/// Hamiltonians on the 3-site Z_3 chain. Their sum is the Hamiltonian.
inline std::vector<Operator> braiding_hamiltonian_terms(HamiltonianStage stage) {
  if (stage.stage < 0 || stage.stage > 2) throw InvalidArgument("braiding stage must be 0, 1 or 2");
  const ChainSpec spec = ChainSpec::make(3, 3);
  const Complex chiral = std::polar(1.0, kPi / 6.0);
  using detail::hermitian_part_sum;
  std::vector<Operator> terms;

  if (stage.picture == Picture::parafermion) {
    auto al = [&](int k, Flavor f) { return fk_operator({k, f}, spec); };
    const Operator b1a2 = al(1, Flavor::b) * al(2, Flavor::a).adjoint();
    const Operator b2a3 = al(2, Flavor::b) * al(3, Flavor::a).adjoint();
    const Operator b3b1 = al(3, Flavor::b) * al(1, Flavor::b).adjoint();
    const Operator a1b1 = al(1, Flavor::a) * al(1, Flavor::b).adjoint();
    switch (stage.stage) {
      case 0:
        terms = {hermitian_part_sum(-chiral * b1a2), hermitian_part_sum(-chiral * b2a3)};
        break;
      case 1:
        terms = {hermitian_part_sum(-chiral * b2a3), hermitian_part_sum(-a1b1)};
        break;
      default:
        terms = {hermitian_part_sum(-chiral * b2a3), hermitian_part_sum(-chiral * b3b1)};
        break;
    }
  } else {
    auto s = [&](int k) { return detail::site_sigma(k, spec); };
    auto t = [&](int k) { return detail::site_tau(k, spec); };
    const Operator s2s3 = s(2) * s(3).adjoint();
    switch (stage.stage) {
      case 0:
        terms = {hermitian_part_sum(-chiral * (s(1) * s(2).adjoint())),
                 hermitian_part_sum(-chiral * s2s3)};
        break;
      case 1:
        terms = {hermitian_part_sum(-chiral * s2s3), hermitian_part_sum(-t(1))};
        break;
      default:
        terms = {hermitian_part_sum(-chiral * s2s3),
                 hermitian_part_sum(-chiral * (s(1) * t(2).adjoint() * t(3).adjoint() *
                                               s(3).adjoint()))};
        break;
    }
  }
  return terms;
}

inline Operator braiding_hamiltonian(HamiltonianStage stage) {
  const auto terms = braiding_hamiltonian_terms(stage);
  Operator h = Operator::zero(terms.front().dim());
  for (const auto& t : terms) h += t;
  if (!h.is_hermitian(1e-12)) {
    throw NotHermitian("braiding_hamiltonian: result is not Hermitian");
  }
  return h;
}

/// Generic Z_n chain built through the FK map (spin-picture matrix).
inline Operator generic_chain_hamiltonian(const ChainSpec& spec) {
  spec.validate();
  Operator h = Operator::zero(spec.dim());
  const Complex field = -spec.f * std::polar(1.0, spec.theta);
  const Complex bond = -spec.J * std::polar(1.0, spec.phi);
  for (int j = 1; j <= spec.length; ++j) {
    h += field * (fk_operator({j, Flavor::a}, spec).adjoint() * fk_operator({j, Flavor::b}, spec));
  }
  for (int j = 1; j < spec.length; ++j) {
    h += bond *
         (fk_operator({j, Flavor::b}, spec).adjoint() * fk_operator({j + 1, Flavor::a}, spec));
  }
  return detail::hermitian_part_sum(h);
}

/// Majorana chain i f sum gamma_ka gamma_kb + i J sum gamma_kb gamma_(k+1)a.
/// The n = 2 FK b-mode is Z X = iY times a string, so the Hermitian Majorana
/// is gamma_kb = -i alpha_kb; the result is f sum X_k + J sum Z_k Z_(k+1).
inline Operator majorana_chain_hamiltonian(double f, double J, int length) {
  const ChainSpec spec = ChainSpec::make(2, length);
  const auto gamma_a = [&](int k) { return fk_operator({k, Flavor::a}, spec); };
  const auto gamma_b = [&](int k) { return Complex{0.0, -1.0} * fk_operator({k, Flavor::b}, spec); };
  Operator h = Operator::zero(spec.dim());
  for (int k = 1; k <= length; ++k) h += (kI * f) * (gamma_a(k) * gamma_b(k));
  for (int k = 1; k < length; ++k) h += (kI * J) * (gamma_b(k) * gamma_a(k + 1));
  return h;
}

/// Sorted eigenvalues of a Hermitian operator.
inline RealVector spectrum(const Operator& h) { return hermitian_spectrum(h).values; }

struct GroundSpace {
  double energy = 0.0;
  std::vector<StateVector> basis;

  Operator projector() const {
    const std::size_t d = basis.front().dim();
    Operator p = Operator::zero(d);
    for (const auto& v : basis) p += v.projector();
    return p;
  }
};

/// Eigenvectors whose eigenvalue lies within degeneracy_tol * (spectral range)
/// of the minimum. The eigensolver returns them orthonormal.
inline GroundSpace ground_space(const Operator& h, double degeneracy_tol = 1e-9) {
  const Spectrum s = hermitian_spectrum(h);
  const double lo = s.values(0);
  const double range = s.values(s.values.size() - 1) - lo;
  const double cut = degeneracy_tol * std::max(range, 1.0);
  GroundSpace g;
  g.energy = lo;
  for (Eigen::Index i = 0; i < s.values.size() && s.values(i) - lo <= cut; ++i) {
    g.basis.emplace_back(s.vectors.col(i));
  }
  return g;
}

}  // namespace pfsim
