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

// Noise channels on the encoded chain (hopping, phase) and on a bare qutrit
// (flip, dephase), and witness sweeps over noise strength.

#pragma once

#include <cmath>
#include <functional>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "pfsim/braid.hpp"
#include "pfsim/witness.hpp"

namespace pfsim {

enum class TraceMode {
  preserving,  // output trace equals input trace
  renormalize  // trace may change; the caller renormalizes after application
};

struct ChannelTerm {
  double weight;
  Operator op;
};

/// rho -> sum_i w_i K_i rho K_i^dag.
struct Channel {
  std::string name;
  std::vector<ChannelTerm> terms;
  TraceMode trace_mode = TraceMode::preserving;

  std::size_t dim() const { return terms.empty() ? 0 : terms.front().op.dim(); }

  void validate() const {
    if (terms.empty()) throw InvalidArgument("Channel '" + name + "': no terms");
    for (const auto& t : terms) {
      if (!(t.weight >= 0.0 && t.weight <= 1.0)) {
        throw InvalidArgument("Channel '" + name + "': weight outside [0, 1]");
      }
      if (t.op.dim() != dim()) throw InvalidArgument("Channel '" + name + "': mixed dimensions");
    }
  }

  /// Raw image of an operator; no trace handling.
  Operator map(const Operator& rho) const {
    if (rho.dim() != dim()) throw InvalidArgument("Channel '" + name + "': dimension mismatch");
    Matrix out = Matrix::Zero(rho.matrix().rows(), rho.matrix().cols());
    for (const auto& t : terms) {
      if (t.weight == 0.0) continue;
      out += t.weight * (t.op.matrix() * rho.matrix() * t.op.matrix().adjoint());
    }
    return Operator(std::move(out));
  }

  /// sum_i w_i K_i^dag K_i; the identity for a trace-preserving channel.
  Operator trace_map() const {
    Matrix out = Matrix::Zero(static_cast<Eigen::Index>(dim()), static_cast<Eigen::Index>(dim()));
    for (const auto& t : terms) out += t.weight * (t.op.matrix().adjoint() * t.op.matrix());
    return Operator(std::move(out));
  }
};

namespace detail {

inline void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument(std::string(what) + ": probability outside [0, 1]");
}

inline Channel two_term(std::string name, double p, Operator k, TraceMode mode) {
  const std::size_t d = k.dim();
  return {std::move(name), {{1.0 - p, Operator::identity(d)}, {p, std::move(k)}}, mode};
}

inline Channel three_term(std::string name, double p, const Operator& k) {
  return {std::move(name),
          {{1.0 - p, Operator::identity(k.dim())}, {p / 2.0, k}, {p / 2.0, k.adjoint()}},
          TraceMode::preserving};
}

}  // namespace detail

/// Hopping error between sites 1 and 2 in the spin picture:
/// (1/9) sigma_1^dag (2 - tau_1 - tau_1^dag) tau_1 sigma_2 (2 - tau_2 - tau_2^dag).
inline Operator hopping_operator() {
  const ChainSpec spec = ChainSpec::make(3, 3);
  const Operator s1 = detail::site_sigma(1, spec);
  const Operator t1 = detail::site_tau(1, spec);
  const Operator s2 = detail::site_sigma(2, spec);
  const Operator t2 = detail::site_tau(2, spec);
  const Operator two = 2.0 * Operator::identity(27);
  return (1.0 / 9.0) * (s1.adjoint() * (two - t1 - t1.adjoint()) * t1 * s2 *
                        (two - t2 - t2.adjoint()));
}

/// Phase error on site 1: (3 - tau_1 - tau_1^dag)/3.
inline Operator phase_noise_operator() {
  const ChainSpec spec = ChainSpec::make(3, 3);
  const Operator t1 = detail::site_tau(1, spec);
  return (1.0 / 3.0) * (3.0 * Operator::identity(27) - t1 - t1.adjoint());
}

inline Channel hopping_channel(double p) {
  detail::check_probability(p, "hopping_channel");
  return detail::two_term("hopping", p, hopping_operator(), TraceMode::renormalize);
}

inline Channel phase_channel(double q) {
  detail::check_probability(q, "phase_channel");
  return detail::two_term("phase", q, phase_noise_operator(), TraceMode::renormalize);
}

/// T(rho) = (1-p) rho + (p/2)(tau rho tau^dag + tau^dag rho tau).
inline Channel flip_channel(double p) {
  detail::check_probability(p, "flip_channel");
  return detail::three_term("flip", p, clock_shift_ops(3).tau);
}

/// Sigma(rho) = (1-q) rho + (q/2)(sigma rho sigma^dag + sigma^dag rho sigma).
inline Channel dephase_channel(double q) {
  detail::check_probability(q, "dephase_channel");
  return detail::three_term("dephase", q, clock_shift_ops(3).sigma);
}

inline Channel identity_channel(std::size_t dim) {
  return {"identity", {{1.0, Operator::identity(dim)}}, TraceMode::preserving};
}

/// Sequential composition; channels[0] acts first. Any renormalizing member
/// makes the composite renormalizing.
inline Channel compose(const std::vector<Channel>& channels) {
  if (channels.empty()) throw InvalidArgument("compose: no channels");
  Channel out = channels.front();
  for (std::size_t c = 1; c < channels.size(); ++c) {
    const Channel& next = channels[c];
    if (next.dim() != out.dim()) throw InvalidArgument("compose: dimension mismatch");
    std::vector<ChannelTerm> terms;
    terms.reserve(out.terms.size() * next.terms.size());
    for (const auto& b : next.terms) {
      for (const auto& a : out.terms) terms.push_back({a.weight * b.weight, b.op * a.op});
    }
    out.name += "+" + next.name;
    out.terms = std::move(terms);
    if (next.trace_mode == TraceMode::renormalize) out.trace_mode = TraceMode::renormalize;
  }
  return out;
}

inline Channel compose(std::initializer_list<Channel> channels) {
  return compose(std::vector<Channel>(channels));
}

/// Apply and, in renormalize mode, rescale to unit trace.
inline DensityMatrix apply(const Channel& channel, const DensityMatrix& rho) {
  Operator out = channel.map(rho.op());
  const double tr = out.trace().real();
  if (channel.trace_mode == TraceMode::preserving) {
    if (std::abs(tr - 1.0) > 1e-12) {
      throw NumericalError("apply: channel '" + channel.name + "' changed the trace");
    }
    return DensityMatrix(std::move(out));
  }
  if (!(tr > 1e-300)) throw NumericalError("apply: channel '" + channel.name + "' annihilated the state");
  return DensityMatrix::normalized(out);
}

// ---------------------------------------------------------------------------
// Encoded qutrit on the chain. Logical basis e_l maps to |psi_l^S>.

inline DensityMatrix encode_density(const DensityMatrix& logical) {
  if (logical.dim() != 3) throw InvalidArgument("encode_density: expected a qutrit state");
  const Matrix w = logical_isometry();
  return DensityMatrix(Operator(w * logical.matrix() * w.adjoint()));
}

struct ChainNoiseResult {
  DensityMatrix logical;  // decoded after projecting back onto the code space
  double output_trace;    // Tr of the raw channel output
  double retained;        // fraction of the output inside the H0 ground space
  double leakage;         // fraction outside; retained + leakage = 1
};

/// Encode, apply a 27-dim channel, dissipate back onto the ground space of
/// H0 and decode.
inline ChainNoiseResult apply_chain_channel(const Channel& channel, const DensityMatrix& logical) {
  if (channel.dim() != 27) throw InvalidArgument("apply_chain_channel: expected a chain channel");
  const DensityMatrix encoded = encode_density(logical);
  const Operator out = channel.map(encoded.op());
  const double tr = out.trace().real();
  if (!(tr > 1e-300)) throw NumericalError("apply_chain_channel: channel annihilated the state");
  const Operator p0 = stage_projector(0);
  const double kept = (p0 * out).trace().real();
  const double lost = ((Operator::identity(27) - p0) * out).trace().real();
  if (!(kept > 1e-14 * tr)) throw NumericalError("apply_chain_channel: state fully leaked");
  const Matrix w = logical_isometry();
  const Operator decoded(w.adjoint() * out.matrix() * w);
  return {DensityMatrix::normalized(decoded), tr, kept / tr, lost / tr};
}

/// T_ij = <psi_i^S| E(|psi_j^S><psi_j^S|) |psi_i^S>, unnormalized.
inline Eigen::Matrix3d code_space_transfer(const Channel& channel) {
  if (channel.dim() != 27) throw InvalidArgument("code_space_transfer: expected a chain channel");
  Eigen::Matrix3d t;
  for (int j = 0; j < 3; ++j) {
    const StateVector pj = logical_basis_state(j);
    const Operator out = channel.map(pj.projector());
    for (int i = 0; i < 3; ++i) {
      const Vector v = logical_basis_state(i).amplitudes();
      t(i, j) = v.dot(out.matrix() * v).real();
    }
  }
  return t;
}

// ---------------------------------------------------------------------------
// Sweeps.

/// {0, step, ..., 1}; 1/step must be an integer.
inline std::vector<double> probability_grid(double step) {
  if (!(step > 0.0 && step <= 1.0)) throw InvalidArgument("grid step must lie in (0, 1]");
  const double n = std::round(1.0 / step);
  if (std::abs(n * step - 1.0) > 1e-9) throw InvalidArgument("grid step must divide 1");
  std::vector<double> g;
  for (int k = 0; k <= static_cast<int>(n); ++k) g.push_back(std::min(1.0, k / n));
  return g;
}

inline void validate_grid(const std::vector<double>& g) {
  if (g.empty()) throw InvalidArgument("empty grid");
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!(g[i] >= 0.0 && g[i] <= 1.0)) throw InvalidArgument("grid value outside [0, 1]");
    if (i > 0 && !(g[i] > g[i - 1])) throw InvalidArgument("grid must be strictly ascending");
  }
}

struct SweepPoint {
  double p;
  double q;
  double M;
  int argmax_x;
  int argmax_z;
  double K;
  double leakage;
  std::array<double, 9> witnesses;
  DensityMatrix state;  // logical state after the channel
  double sigma_M = 0.0;
  double sigma_K = 0.0;
};

struct SweepResult {
  std::string family;
  std::vector<double> p_grid;
  std::vector<double> q_grid;  // {0} for one-parameter families
  std::vector<SweepPoint> points;  // p-major order

  const SweepPoint& at(std::size_t ip, std::size_t iq) const {
    return points.at(ip * q_grid.size() + iq);
  }
};

using ChannelFamily = std::function<Channel(double p, double q)>;

/// Evaluate M and K after the channel at every (p, q). 27-dim families are
/// run on the encoded state and decoded; 3-dim ones act on the qutrit.
inline SweepResult sweep_witness(const std::string& family_name, const ChannelFamily& family,
                                 const DensityMatrix& initial, std::vector<double> p_grid,
                                 std::vector<double> q_grid = {0.0}) {
  validate_grid(p_grid);
  validate_grid(q_grid);
  const KcbsSettings kcbs = kcbs_optimal_settings();
  SweepResult r{family_name, std::move(p_grid), std::move(q_grid), {}};
  r.points.reserve(r.p_grid.size() * r.q_grid.size());
  for (double p : r.p_grid) {
    for (double q : r.q_grid) {
      const Channel c = family(p, q);
      double leakage = 0.0;
      DensityMatrix out = initial;
      if (c.dim() == 27) {
        ChainNoiseResult cr = apply_chain_channel(c, initial);
        leakage = cr.leakage;
        out = std::move(cr.logical);
      } else {
        out = apply(c, initial);
      }
      const MagicWitness m = magic_witness(out);
      r.points.push_back({p, q, m.value, m.x, m.z, kcbs_value(out, kcbs), leakage,
                          witness_table(out), std::move(out)});
    }
  }
  return r;
}

// Standard families.

inline Channel bare_family(double p, double q) { return compose({flip_channel(p), dephase_channel(q)}); }
inline Channel chain_family(double p, double q) { return compose({hopping_channel(p), phase_channel(q)}); }

/// (1/2)|0> - (sqrt3/2)|2>, a distillation resource state.
inline StateVector resource_state() { return StateVector({0.5, 0.0, -std::sqrt(3.0) / 2.0}); }

/// The KCBS-optimal state (0, 0, 1).
inline StateVector kcbs_state() { return StateVector({0.0, 0.0, 1.0}); }

}  // namespace pfsim
