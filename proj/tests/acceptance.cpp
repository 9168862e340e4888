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

// Acceptance runner: evaluates each criterion and prints one PASS/FAIL line.
// Exit status is nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pfsim/experiments.hpp"

using namespace pfsim;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

StateVector random_state(std::mt19937_64& rng, std::size_t dim) {
  std::normal_distribution<double> g;
  Vector v(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = Complex{g(rng), g(rng)};
  return StateVector(std::move(v));
}

DensityMatrix random_density(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix a(3, 3);
  for (Eigen::Index i = 0; i < 9; ++i) a(i / 3, i % 3) = Complex{g(rng), g(rng)};
  return DensityMatrix::normalized(Operator(a * a.adjoint()));
}

double max_entry(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

// 1. Ground-space braid matrix up to a global phase, under one second.
Outcome braid_matrix() {
  const auto t0 = Clock::now();
  const Operator r = restricted_braid_matrix();
  const Operator target = braid_target_matrix();
  const Complex ratio = target(0, 0) / r(0, 0);
  const Complex phase = ratio / std::abs(ratio);
  // Remove the global phase, then the common 1/(3 sqrt3) survival amplitude.
  const Matrix aligned = phase * r.matrix();
  const double gain = aligned.norm() / target.matrix().norm();
  const double err = max_entry(aligned / gain - target.matrix());
  const double dt = seconds_since(t0);
  return {err < 1e-9 && dt < 1.0, fmt("max entry error %.2e, amplitude %.6f, %.3f s", err, gain, dt)};
}

// 2. Relative Berry phases on every sample state, exact and exponential projectors.
Outcome berry_phases_on_samples() {
  double worst = 0.0;
  const auto set = experiments::SampleStateSet::standard();
  for (ProjectionMode mode : {ProjectionMode::exact(), ProjectionMode::exponential(50.0)}) {
    for (const auto& s : set.states) {
      const StateVector c = experiments::logical_from_operational(s.operational);
      const StateVector after = full_braid(c, mode);
      const double d1 = relative_phase_change(c, after, 1);
      const double d2 = relative_phase_change(c, after, 2);
      if (std::isnan(d1) || std::isnan(d2)) return {false, "undefined phase for " + s.name};
      worst = std::max({worst, std::abs(wrap_angle(d1)), std::abs(wrap_angle(d2 - 2 * kPi / 3))});
    }
  }
  return {worst < 1e-9, fmt("%g states x 2 modes, max phase error %.2e", static_cast<double>(set.states.size()), worst)};
}

// 3. Dense three-mode pipeline against the 27-dim chain.
Outcome dense_equivalence() {
  std::mt19937_64 rng(20240101);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) worst = std::max(worst, dense_vs_full_equivalence(random_state(rng, 3)).distance);
  return {worst < 1e-9, fmt("100 states, max trace distance %.2e", worst)};
}

// 4. Parafermion and spin pictures share spectra; threefold ground spaces.
Outcome spectra_equality() {
  double worst = 0.0;
  bool degenerate = true;
  std::ostringstream deg;
  for (int s = 0; s < 3; ++s) {
    const Operator hp = braiding_hamiltonian({s, Picture::parafermion});
    const Operator hs = braiding_hamiltonian({s, Picture::spin});
    worst = std::max(worst, (spectrum(hp) - spectrum(hs)).cwiseAbs().maxCoeff());
    const auto np = ground_space(hp).basis.size(), ns = ground_space(hs).basis.size();
    degenerate = degenerate && np == 3 && ns == 3;
    deg << (s ? "," : "") << np << "/" << ns;
  }
  return {worst < 1e-9 && degenerate, fmt("max eigenvalue gap %.2e, ground degeneracies ", worst) + deg.str()};
}

// 5. Hopping noise on the code space, compared literally with (1 - p) delta_ij.
Outcome hopping_identity() {
  double worst = 0.0, worst_p = 0.0;
  for (double p : probability_grid(0.25)) {
    const Eigen::Matrix3d t = code_space_transfer(hopping_channel(p));
    const Eigen::Matrix3d want = (1.0 - p) * Eigen::Matrix3d::Identity();
    const double e = (t - want).cwiseAbs().maxCoeff();
    if (e > worst) {
      worst = e;
      worst_p = p;
    }
  }
  return {worst < 1e-12, fmt("max deviation %.6f at p = %.2f (diagonal is 1 - p + 4p/81 = %.6f)", worst, worst_p,
                             1.0 - worst_p + 4.0 * worst_p / 81.0)};
}

// 6. M of the encoded resource state under chain noise.
Outcome protected_magic() {
  const DensityMatrix res = DensityMatrix::pure(resource_state());
  const auto grid = probability_grid(0.1);
  std::vector<double> values;
  for (double p : grid) values.push_back(magic_witness(apply_chain_channel(hopping_channel(p), res).logical).value);
  for (double q : grid) values.push_back(magic_witness(apply_chain_channel(phase_channel(q), res).logical).value);
  for (double p : grid) {
    for (double q : grid) values.push_back(magic_witness(apply_chain_channel(chain_family(p, q), res).logical).value);
  }
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double spread = *hi - *lo;
  return {spread < 1e-9 && *lo > 0.58,
          fmt("%g evaluations, M in [%.12f, %.12f]", static_cast<double>(values.size()), *lo, *hi)};
}

// 7. Bare qutrit under T: M reaches zero at p = 2/3, then grows through another witness.
Outcome bare_crossing() {
  const DensityMatrix res = DensityMatrix::pure(resource_state());
  const MagicWitness start = magic_witness(apply(flip_channel(0.0), res));
  const MagicWitness at = magic_witness(apply(flip_channel(2.0 / 3.0), res));
  bool rising = true, switched = true;
  double prev = at.value;
  for (double p : {0.7, 0.8, 0.9, 1.0}) {
    const MagicWitness m = magic_witness(apply(flip_channel(p), res));
    rising = rising && m.value > prev;
    switched = switched && (m.x != start.x || m.z != start.z);
    prev = m.value;
  }
  return {at.value <= 1e-9 && rising && switched,
          fmt("M(2/3) = %.6f, M(1) = %.6f, argmax moves from (%g,", at.value, prev, start.x) +
              std::to_string(start.z) + ") to (" +
              std::to_string(magic_witness(apply(flip_channel(1.0), res)).x) + "," +
              std::to_string(magic_witness(apply(flip_channel(1.0), res)).z) + ")"};
}

// 8. KCBS values: optimum, chain protection and the bare closed form.
Outcome kcbs_values() {
  const KcbsSettings s = kcbs_optimal_settings();
  const DensityMatrix psi = DensityMatrix::pure(kcbs_state());
  const double k0 = std::abs(kcbs_value(psi, s) - std::sqrt(5.0));
  double chain = 0.0, bare = 0.0;
  const double slope = (3.0 * std::sqrt(5.0) - 5.0) / 2.0;
  const auto grid = probability_grid(0.1);
  for (double p : grid) {
    chain = std::max(chain, std::abs(kcbs_value(apply_chain_channel(hopping_channel(p), psi).logical, s) - std::sqrt(5.0)));
    bare = std::max(bare, std::abs(kcbs_value(apply(flip_channel(p), psi), s) - (std::sqrt(5.0) - slope * p)));
  }
  return {k0 < 1e-12 && chain < 1e-12 && bare < 1e-12 && grid.size() == 11,
          fmt("|K - sqrt5| = %.1e, chain max %.1e, bare closed-form max %.1e", k0, chain, bare)};
}

// 9. Witness values permuted by the braid.
Outcome witness_permutation_check() {
  const Operator bs = dense_braid_gates().Bs;
  const auto perm = experiments::witness_permutation(bs);
  if (std::any_of(perm.begin(), perm.end(), [](int x) { return x < 0; })) return {false, "no permutation found"};
  std::mt19937_64 rng(909);
  double worst = 0.0, sorted_worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const DensityMatrix rho = random_density(rng);
    auto before = witness_table(rho);
    auto after = witness_table(rho.conjugated(bs));
    for (std::size_t a = 0; a < 9; ++a) {
      worst = std::max(worst, std::abs(after[static_cast<std::size_t>(perm[a])] - before[a]));
    }
    std::sort(before.begin(), before.end());
    std::sort(after.begin(), after.end());
    for (std::size_t a = 0; a < 9; ++a) sorted_worst = std::max(sorted_worst, std::abs(after[a] - before[a]));
  }
  std::ostringstream p;
  for (int x : perm) p << x;
  return {worst < 1e-10 && sorted_worst < 1e-10,
          fmt("20 states, per-value error %.1e, multiset error %.1e, permutation ", worst, sorted_worst) + p.str()};
}

// 10. Process tomography of the braid gate.
Outcome tomography_round_trip() {
  const Operator b = dense_braid_gates().Btilde;
  const ProcessMatrix theory = chi_theoretical(b);
  const ProbabilityTable probs = unitary_probabilities(b);
  const double f_clean = process_fidelity(qpt_fit(probs).chi, theory);
  const CountTable counts = simulate_counts(probs, 1000000, 20240607);
  const double f_sampled = process_fidelity(qpt_fit(counts).chi, theory);
  const BootstrapResult bs =
      bootstrap(counts, [&](const CountTable& t) { return process_fidelity(qpt_fit(t).chi, theory); }, 77, 100);
  const bool finite = std::isfinite(bs.mean) && std::isfinite(bs.sigma) && bs.sigma > 0.0 && bs.resamples == 100;
  return {f_clean >= 0.9999 && f_sampled >= 0.99 && finite,
          fmt("fidelity noiseless %.8f, sampled %.6f, bootstrap sigma %.2e", f_clean, f_sampled, bs.sigma)};
}

// 11. Optical compilation.
Outcome optics_round_trip() {
  const DenseGateSet g = dense_braid_gates();
  const double p3 = max_entry(phase_gate_simulate(compile_phase(g.P3)).matrix() - g.P3.matrix());
  double r = 0.0;
  for (const Operator* target : {&g.R2, &g.Btilde}) {
    const CompiledRGate c = compile_r_gate(*target);
    r = std::max(r, max_entry(r_gate_simulate(c.settings).matrix() / c.scale - target->matrix()));
  }
  double plates = 0.0;
  const Complex ref = phase_path_response(0.0);
  for (int k = 0; k < 10; ++k) {
    const double theta = kPi * k / 10.0 + 0.05;
    plates = std::max(plates, std::abs(phase_path_response(theta) / ref - std::polar(1.0, -2.0 * theta)));
  }
  return {p3 < 1e-9 && r < 1e-9 && plates < 1e-9,
          fmt("P3 error %.1e, R-gate error %.1e (scale 1/sqrt3), plate identity error %.1e", p3, r, plates)};
}

// 12. Z_3 algebra at n = 3, L = 3.
Outcome algebra_suite() {
  const auto t0 = Clock::now();
  const ChainSpec spec = ChainSpec::make(3, 3);
  const Complex w = omega3();
  const double tol = 1e-12;
  std::vector<Operator> modes;
  for (int k = 1; k <= 3; ++k) {
    modes.push_back(fk_operator({k, Flavor::a}, spec));
    modes.push_back(fk_operator({k, Flavor::b}, spec));
  }
  const Operator id = Operator::identity(27);
  double worst = 0.0;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    worst = std::max(worst, distance(modes[i].pow(3), id));
    worst = std::max(worst, distance(modes[i].adjoint(), modes[i].pow(2)));
    for (std::size_t j = i + 1; j < modes.size(); ++j) {
      worst = std::max(worst, distance(modes[i] * modes[j], w * (modes[j] * modes[i])));
    }
  }
  const ClockShift cs = clock_shift_ops(3);
  for (int k = 1; k <= 3; ++k) {
    worst = std::max(worst, distance(tau_from_parafermions(k, spec), embed_site(cs.tau, k, 3)));
    worst = std::max(worst, distance(sigma_from_parafermions(k, spec), embed_site(cs.sigma, k, 3)));
    for (int j = 1; j <= 3; ++j) {
      const Operator sj = embed_site(cs.sigma, j, 3), tk = embed_site(cs.tau, k, 3);
      worst = std::max(worst, distance(sj * tk, (j == k ? w : Complex{1.0}) * (tk * sj)));
    }
  }
  const Operator q = parity_operator(spec);
  for (int s = 0; s < 3; ++s) {
    for (Picture p : {Picture::spin, Picture::parafermion}) {
      worst = std::max(worst, commutator(braiding_hamiltonian({s, p}), q).norm());
    }
  }
  const double dt = seconds_since(t0);
  return {worst < tol && dt < 10.0, fmt("max residual %.1e, %.2f s", worst, dt)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"braid matrix", braid_matrix},
      {"berry phases", berry_phases_on_samples},
      {"dense encoding equivalence", dense_equivalence},
      {"spectra equality", spectra_equality},
      {"hopping noise identity", hopping_identity},
      {"protected magic witness", protected_magic},
      {"bare qutrit crossing", bare_crossing},
      {"kcbs values", kcbs_values},
      {"witness permutation", witness_permutation_check},
      {"tomography round trip", tomography_round_trip},
      {"optics verification", optics_round_trip},
      {"algebra suite", algebra_suite},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
