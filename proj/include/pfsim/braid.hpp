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

// Braiding of the two edge zero modes of the 3-site Z_3 chain, simulated as
// a cycle of ground-space projections (imaginary-time evolution), plus the
// dense three-mode encoding of the same cycle.

#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "pfsim/parafermion.hpp"

namespace pfsim {

enum class ProjectionKind { exact, exponential };

struct ProjectionMode {
  ProjectionKind kind = ProjectionKind::exact;
  double time = 0.0;  // only used by the exponential kind

  static ProjectionMode exact() { return {}; }
  static ProjectionMode exponential(double t) { return {ProjectionKind::exponential, t}; }
};

/// Spectral projector onto the ground space of h (exact), or
/// e^{-(h - E0) t}, which has unit gain on the ground sector and tends to the
/// exact projector as t grows.
inline Operator imaginary_time_projector(const Operator& h, ProjectionMode mode = {},
                                         double degeneracy_tol = 1e-9) {
  if (mode.kind == ProjectionKind::exact) return ground_space(h, degeneracy_tol).projector();
  if (!(mode.time >= 0.0)) throw InvalidArgument("imaginary_time_projector: t must be >= 0");
  const Spectrum s = hermitian_spectrum(h);
  const double e0 = s.values(0);
  RealVector gains = (-(s.values.array() - e0) * mode.time).exp().matrix();
  return Operator(s.vectors * gains.cast<Complex>().asDiagonal() * s.vectors.adjoint());
}

struct TaggedProjector {
  Operator projector;
  int stage;
  std::string label;
};

/// Ordered list of ground-space projectors, each tagged with the Hamiltonian
/// stage it came from. Elements are idempotent and Hermitian.
class ProjectorSequence {
 public:
  void push_back(TaggedProjector p, double tol = 1e-10) {
    const Operator& m = p.projector;
    if (distance(m * m, m) > tol || !m.is_hermitian(tol)) {
      throw NumericalError("ProjectorSequence: element '" + p.label + "' is not a projector");
    }
    items_.push_back(std::move(p));
  }
  const std::vector<TaggedProjector>& items() const { return items_; }

  /// Product applied left to right: items[0] acts first.
  Operator product() const {
    Operator out = Operator::identity(items_.front().projector.dim());
    for (const auto& p : items_) out = p.projector * out;
    return out;
  }

 private:
  std::vector<TaggedProjector> items_;
};

// ---------------------------------------------------------------------------
// Logical encoding: |psi_l^S> = (|000> + w^l |111> + w^{2l} |222>)/sqrt(3).

inline StateVector logical_basis_state(int l) {
  if (l < 0 || l > 2) throw InvalidArgument("logical index must be 0, 1 or 2");
  Vector v = Vector::Zero(27);
  for (int k = 0; k < 3; ++k) v(k * 9 + k * 3 + k) = root_of_unity(3, static_cast<long>(l) * k);
  return StateVector(std::move(v));
}

/// 27x3 isometry whose columns are |psi_0^S>, |psi_1^S>, |psi_2^S>.
inline Matrix logical_isometry() {
  Matrix w(27, 3);
  for (int l = 0; l < 3; ++l) w.col(l) = logical_basis_state(l).amplitudes();
  return w;
}

inline StateVector encode_logical(const StateVector& coeffs) {
  if (coeffs.dim() != 3) throw InvalidArgument("encode_logical: expected 3 coefficients");
  return StateVector(logical_isometry() * coeffs.amplitudes());
}

struct DecodedState {
  StateVector coeffs;
  double leakage;  // squared norm outside span{|psi_l^S>} (input-normalized)
};

inline DecodedState decode_logical(const Vector& state27) {
  if (state27.size() != 27) throw InvalidArgument("decode_logical: expected a 27-dim state");
  const double total = state27.squaredNorm();
  if (!(total > 0.0)) throw InvalidArgument("decode_logical: zero state");
  const Vector c = logical_isometry().adjoint() * state27;
  const double kept = c.squaredNorm();
  if (kept <= 1e-24 * total) throw NumericalError("decode_logical: state is fully leaked");
  return {StateVector(c), std::max(0.0, 1.0 - kept / total)};
}

inline DecodedState decode_logical(const StateVector& state27) {
  return decode_logical(state27.amplitudes());
}

// ---------------------------------------------------------------------------
// Projection cycle.

/// Projector onto the ground space of one Hermitian term of a stage.
inline Operator term_projector(int stage, std::size_t term, ProjectionMode mode = {}) {
  const auto terms = braiding_hamiltonian_terms({stage, Picture::spin});
  if (term >= terms.size()) throw InvalidArgument("term_projector: no such term");
  return imaginary_time_projector(terms[term], mode);
}

inline Operator stage_projector(int stage, ProjectionMode mode = {}) {
  return imaginary_time_projector(braiding_hamiltonian({stage, Picture::spin}), mode);
}

/// Pi_0 -> Pi_1' -> Pi_2' -> Pi_0, where Pi_1' projects on the local-field
/// term of H1 and Pi_2' on the long-range term of H2. The shared sigma_2
/// sigma_3^dag term of H1 and H2 is dropped: Pi_1' already lies inside its
/// ground space and both terms commute.
inline ProjectorSequence braid_projector_sequence(ProjectionMode mode = {}) {
  ProjectorSequence seq;
  const double tol = mode.kind == ProjectionKind::exact ? 1e-10 : 1e-8;
  seq.push_back({stage_projector(0, mode), 0, "H0"}, tol);
  seq.push_back({term_projector(1, 1, mode), 1, "H1 field term"}, tol);
  seq.push_back({term_projector(2, 1, mode), 2, "H2 long-range term"}, tol);
  seq.push_back({stage_projector(0, mode), 0, "H0"}, tol);
  return seq;
}

inline Operator braid_operator(ProjectionMode mode = {}) {
  return braid_projector_sequence(mode).product();
}

struct BraidResult {
  StateVector final_state;
  double input_leakage;   // weight of the input outside the H0 ground space
  double output_leakage;  // weight of the renormalized output outside it
  double survival;        // ||B psi||^2: amplitude kept by the dissipative cycle
};

inline BraidResult braid_full_space(const StateVector& state27, ProjectionMode mode = {}) {
  if (state27.dim() != 27) throw InvalidArgument("braid_full_space: expected a 27-dim state");
  const Operator p0 = stage_projector(0, mode);
  const double in_kept = (p0 * state27).squaredNorm();
  const Vector out = braid_operator(mode) * state27;
  const double survival = out.squaredNorm();
  if (!(survival > 1e-28)) {
    throw NumericalError("braid_full_space: evolution is orthogonal to the input");
  }
  StateVector final_state(out);
  const double out_kept = (p0 * final_state).squaredNorm();
  return {final_state, std::max(0.0, 1.0 - in_kept), std::max(0.0, 1.0 - out_kept), survival};
}

/// <psi_i^S| B |psi_j^S> for the full projection cycle.
inline Operator restricted_braid_matrix(ProjectionMode mode = {}) {
  const Matrix w = logical_isometry();
  return Operator(w.adjoint() * braid_operator(mode).matrix() * w);
}

/// Reduce an angle to (-pi, pi].
inline double wrap_angle(double x) {
  double r = std::remainder(x, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

/// phi_{B,l} = -arg <psi_l^S| Pi_1 Pi_2 |psi_l^S> with Pi_i the ground-space
/// projectors of H_i^S.
inline double berry_phase(int l, ProjectionMode mode = {}) {
  const StateVector psi = logical_basis_state(l);
  const Operator prod = stage_projector(1, mode) * stage_projector(2, mode);
  const Complex overlap = psi.amplitudes().dot(prod * psi);
  if (std::abs(overlap) < 1e-12) throw NumericalError("berry_phase: vanishing overlap");
  return wrap_angle(-std::arg(overlap));
}

struct BerryPhases {
  std::array<double, 3> absolute;
  double delta1;  // phi_{B,1} - phi_{B,0}
  double delta2;  // phi_{B,2} - phi_{B,0}
};

inline BerryPhases berry_phases(ProjectionMode mode = {}) {
  BerryPhases b{};
  for (int l = 0; l < 3; ++l) b.absolute[static_cast<std::size_t>(l)] = berry_phase(l, mode);
  b.delta1 = wrap_angle(b.absolute[1] - b.absolute[0]);
  b.delta2 = wrap_angle(b.absolute[2] - b.absolute[0]);
  return b;
}

// ---------------------------------------------------------------------------
// Dense encoding.

struct DenseGateSet {
  Operator P1;
  Operator R2;
  Operator P3;
  Operator Btilde;
  Operator Bs;
  Operator F;
};

inline DenseGateSet dense_braid_gates() {
  const Complex w = omega3();
  const Complex wb = std::conj(w);
  const double s = 1.0 / std::sqrt(3.0);
  DenseGateSet g;
  g.P1 = Operator::identity(3);
  g.R2 = s * Operator::from_rows({{1, wb, 1}, {1, 1, wb}, {1, w, w}});
  g.P3 = Operator::diagonal({1, 1, wb});
  g.Btilde = g.P3 * g.R2 * g.P1;
  g.F = fourier3();
  g.Bs = g.F.adjoint() * g.Btilde * g.F;
  return g;
}

/// e^{-i pi/6} diag(1, 1, omega).
inline Operator braid_target_matrix() {
  return std::polar(1.0, -kPi / 6.0) * Operator::diagonal({1, 1, omega3()});
}

/// Dense qutrit pipeline on logical coefficients: sigma-basis coefficients
/// k0 = F c are carried through k1 = P1 k0, k2 = R2 k1, k3 = P3 k2 and mapped
/// back with F^dag. Intermediate normalizations are dropped.
inline StateVector dense_braid(const StateVector& coeffs) {
  if (coeffs.dim() != 3) throw InvalidArgument("dense_braid: expected 3 coefficients");
  const DenseGateSet g = dense_braid_gates();
  Vector k = g.F.matrix() * coeffs.amplitudes();
  k = g.P1.matrix() * k;
  k = g.R2.matrix() * k;
  k = g.P3.matrix() * k;
  return StateVector(g.F.adjoint().matrix() * k);
}

inline StateVector full_braid(const StateVector& coeffs, ProjectionMode mode = {}) {
  return decode_logical(braid_full_space(encode_logical(coeffs), mode).final_state).coeffs;
}

struct EquivalenceResult {
  StateVector dense_out;
  StateVector full_out;
  double distance;  // trace distance between the two logical outputs
};

inline EquivalenceResult dense_vs_full_equivalence(const StateVector& coeffs,
                                                   ProjectionMode mode = {}) {
  StateVector d = dense_braid(coeffs);
  StateVector f = full_braid(coeffs, mode);
  const double dist = trace_distance(d, f);
  return {std::move(d), std::move(f), dist};
}

/// Relative phase gained by logical component l against component 0 across
/// the braid, read off the state's own amplitudes. Undefined (NaN) when
/// either component of the input vanishes.
inline double relative_phase_change(const StateVector& before, const StateVector& after, int l,
                                    double min_amplitude = 1e-6) {
  const auto li = static_cast<Eigen::Index>(l);
  if (std::abs(before[0]) < min_amplitude || std::abs(before[li]) < min_amplitude ||
      std::abs(after[0]) < min_amplitude || std::abs(after[li]) < min_amplitude) {
    return std::nan("");
  }
  const double pre = std::arg(before[li] * std::conj(before[0]));
  const double post = std::arg(after[li] * std::conj(after[0]));
  return wrap_angle(post - pre);
}

}  // namespace pfsim
