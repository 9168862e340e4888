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

// Qutrit process tomography: probability tables, Poisson shot noise,
// least-squares reconstruction of the process matrix chi in the
// Gell-Mann-plus-identity basis, basis change, fidelity and bootstrap.
//
// Convention: E(rho) = sum_jk chi_jk E_j rho E_k^dag.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "pfsim/tensor_core.hpp"

namespace pfsim {

using ProbabilityTable = Eigen::Matrix<double, 9, 9>;  // row: preparation, column: measurement

/// |0>, |1>, |2>, (|1>+|2>)/sqrt2, (|0>+|2>)/sqrt2, (|0>+|1>)/sqrt2,
/// (|1>-i|2>)/sqrt2, (|0>-i|2>)/sqrt2, (|0>-i|1>)/sqrt2.
struct TomographyBasisSet {
  std::array<StateVector, 9> vectors;

  static TomographyBasisSet standard() {
    const Complex mi{0.0, -1.0};
    return {{StateVector({1, 0, 0}), StateVector({0, 1, 0}), StateVector({0, 0, 1}),
             StateVector({0, 1, 1}), StateVector({1, 0, 1}), StateVector({1, 1, 0}),
             StateVector({0, 1, mi}), StateVector({1, 0, mi}), StateVector({1, mi, 0})}};
  }

  /// 9x9 Gram matrix of the vectorized projectors.
  Matrix projector_gram() const {
    Matrix g(9, 9);
    for (std::size_t a = 0; a < 9; ++a) {
      for (std::size_t b = 0; b < 9; ++b) {
        g(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
            std::norm(vectors[a].inner(vectors[b]));
      }
    }
    return g;
  }

  double condition_number() const {
    Eigen::JacobiSVD<Matrix> svd(projector_gram());
    const auto& s = svd.singularValues();
    return s(0) / s(s.size() - 1);
  }
};

class ProcessMatrix {
 public:
  explicit ProcessMatrix(Matrix chi) : chi_(std::move(chi)) {
    if (chi_.rows() != 9 || chi_.cols() != 9) throw InvalidArgument("ProcessMatrix: must be 9x9");
    if (!chi_.allFinite()) throw InvalidArgument("ProcessMatrix: non-finite entries");
  }

  const Matrix& matrix() const { return chi_; }
  Complex operator()(Eigen::Index j, Eigen::Index k) const { return chi_(j, k); }

  bool is_hermitian(double tol = 1e-10) const { return (chi_ - chi_.adjoint()).norm() <= tol; }

  double min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (chi_ + chi_.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
  }

  Operator apply(const Operator& rho) const {
    const auto e = gell_mann_basis();
    Matrix out = Matrix::Zero(3, 3);
    for (Eigen::Index j = 0; j < 9; ++j) {
      for (Eigen::Index k = 0; k < 9; ++k) {
        if (chi_(j, k) == Complex{}) continue;
        out += chi_(j, k) * e[static_cast<std::size_t>(j)].matrix() * rho.matrix() *
               e[static_cast<std::size_t>(k)].matrix().adjoint();
      }
    }
    return Operator(std::move(out));
  }

  /// sum_jk chi_jk E_k^dag E_j (= sum_r K_r^dag K_r); identity when the map
  /// is trace preserving.
  Operator trace_map() const {
    const auto e = gell_mann_basis();
    Matrix out = Matrix::Zero(3, 3);
    for (Eigen::Index j = 0; j < 9; ++j) {
      for (Eigen::Index k = 0; k < 9; ++k) {
        out += chi_(j, k) * e[static_cast<std::size_t>(k)].matrix().adjoint() *
               e[static_cast<std::size_t>(j)].matrix();
      }
    }
    return Operator(std::move(out));
  }

  double trace_preservation_residual() const {
    return (trace_map().matrix() - Matrix::Identity(3, 3)).norm();
  }

 private:
  Matrix chi_;
};

// ---------------------------------------------------------------------------
// Forward model.

namespace detail {

/// a[m][n](j) = <Phi_n| E_j |Psi_m>.
using Amplitudes = std::array<std::array<Vector, 9>, 9>;

inline Amplitudes forward_amplitudes(const TomographyBasisSet& preps, const TomographyBasisSet& meas) {
  const auto e = gell_mann_basis();
  Amplitudes a;
  for (std::size_t m = 0; m < 9; ++m) {
    for (std::size_t n = 0; n < 9; ++n) {
      Vector v(9);
      for (std::size_t j = 0; j < 9; ++j) {
        v(static_cast<Eigen::Index>(j)) =
            meas.vectors[n].amplitudes().dot(e[j].matrix() * preps.vectors[m].amplitudes());
      }
      a[m][n] = std::move(v);
    }
  }
  return a;
}

}  // namespace detail

/// p_mn = <Phi_n| E(|Psi_m><Psi_m|) |Phi_n> for any map Operator -> Operator.
template <class Map>
ProbabilityTable probabilities(const Map& channel,
                               const TomographyBasisSet& preps = TomographyBasisSet::standard(),
                               const TomographyBasisSet& meas = TomographyBasisSet::standard()) {
  ProbabilityTable p;
  for (std::size_t m = 0; m < 9; ++m) {
    const Operator out = channel(preps.vectors[m].projector());
    if (out.dim() != 3) throw InvalidArgument("probabilities: map must act on a qutrit");
    for (std::size_t n = 0; n < 9; ++n) {
      const Vector& phi = meas.vectors[n].amplitudes();
      p(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n)) = phi.dot(out.matrix() * phi).real();
    }
  }
  return p;
}

inline ProbabilityTable unitary_probabilities(const Operator& u,
                                              const TomographyBasisSet& preps = TomographyBasisSet::standard(),
                                              const TomographyBasisSet& meas = TomographyBasisSet::standard()) {
  if (u.dim() != 3) throw InvalidArgument("unitary_probabilities: expected 3x3");
  return probabilities([&u](const Operator& rho) { return u * rho * u.adjoint(); }, preps, meas);
}

inline ProbabilityTable process_probabilities(const ProcessMatrix& chi,
                                              const TomographyBasisSet& preps = TomographyBasisSet::standard(),
                                              const TomographyBasisSet& meas = TomographyBasisSet::standard()) {
  return probabilities([&chi](const Operator& rho) { return chi.apply(rho); }, preps, meas);
}

// ---------------------------------------------------------------------------
// Counts.

struct CountTable {
  Eigen::Matrix<std::int64_t, 9, 9> counts = Eigen::Matrix<std::int64_t, 9, 9>::Zero();
  std::int64_t shots = 0;  // trials per (preparation, measurement) cell
  std::uint64_t seed = 0;

  ProbabilityTable frequencies() const {
    if (shots <= 0) throw InvalidArgument("CountTable: shots must be positive");
    return counts.cast<double>() / static_cast<double>(shots);
  }

  void validate() const {
    if (shots <= 0) throw InvalidArgument("CountTable: shots must be positive");
    if ((counts.array() < 0).any()) throw InvalidArgument("CountTable: negative count");
  }
};

/// Draws one Poisson variate; a non-positive mean gives 0.
template <class Rng>
std::int64_t poisson_draw(double mean, Rng& rng) {
  if (!(mean > 0.0)) return 0;
  std::poisson_distribution<std::int64_t> d(mean);
  return d(rng);
}

/// Poisson counts with mean shots * p_mn, drawn row-major from one
/// mt19937_64 stream seeded with `seed`.
inline CountTable simulate_counts(const ProbabilityTable& probs, std::int64_t shots, std::uint64_t seed) {
  if (shots <= 0) throw InvalidArgument("simulate_counts: shots must be positive");
  if (!probs.allFinite()) throw InvalidArgument("simulate_counts: non-finite probability");
  std::mt19937_64 rng(seed);
  CountTable t;
  t.shots = shots;
  t.seed = seed;
  for (Eigen::Index m = 0; m < 9; ++m) {
    for (Eigen::Index n = 0; n < 9; ++n) {
      t.counts(m, n) = poisson_draw(static_cast<double>(shots) * std::max(0.0, probs(m, n)), rng);
    }
  }
  return t;
}

// ---------------------------------------------------------------------------
// Theory values.

/// chi_jk = c_j c_k^*, c_j = Tr[E_j^dag U]/2.
inline ProcessMatrix chi_theoretical(const Operator& u) {
  if (u.dim() != 3) throw InvalidArgument("chi_theoretical: expected a 3x3 operator");
  if (!u.is_unitary(1e-10)) throw InvalidArgument("chi_theoretical: operator is not unitary");
  const auto e = gell_mann_basis();
  Vector c(9);
  for (std::size_t j = 0; j < 9; ++j) c(static_cast<Eigen::Index>(j)) = (e[j].adjoint() * u).trace() / 2.0;
  return ProcessMatrix(c * c.adjoint());
}

/// u_im = Tr[E_i (F^dag E_m F)]/2: expansion of the rotated basis element.
inline Matrix fourier_basis_change() {
  const auto e = gell_mann_basis();
  const Operator f = fourier3();
  Matrix u(9, 9);
  for (std::size_t m = 0; m < 9; ++m) {
    const Operator rotated = f.adjoint() * e[m] * f;
    for (std::size_t i = 0; i < 9; ++i) {
      u(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m)) = (e[i].adjoint() * rotated).trace() / 2.0;
    }
  }
  return u;
}

/// chi in the eigenbasis of the parity operator: the process F^dag E(F . F^dag) F.
/// `inverse` undoes it.
inline ProcessMatrix chi_basis_change(const ProcessMatrix& chi, bool inverse = false) {
  const Matrix u = fourier_basis_change();
  if (inverse) return ProcessMatrix(u.adjoint() * chi.matrix() * u);
  return ProcessMatrix(u * chi.matrix() * u.adjoint());
}

/// Tr[a b] / sqrt(Tr[a^2] Tr[b^2]).
inline double process_fidelity(const ProcessMatrix& a, const ProcessMatrix& b) {
  const double na = (a.matrix() * a.matrix()).trace().real();
  const double nb = (b.matrix() * b.matrix()).trace().real();
  if (!(na > 0.0) || !(nb > 0.0)) throw InvalidArgument("process_fidelity: zero process matrix");
  return (a.matrix() * b.matrix()).trace().real() / std::sqrt(na * nb);
}

// ---------------------------------------------------------------------------
// Reconstruction.

/// Unconstrained least-squares chi from a probability table (Hermitian,
/// possibly non-positive).
inline ProcessMatrix linear_inversion(const ProbabilityTable& p,
                                      const TomographyBasisSet& preps = TomographyBasisSet::standard(),
                                      const TomographyBasisSet& meas = TomographyBasisSet::standard()) {
  const auto a = detail::forward_amplitudes(preps, meas);
  // Real parameters of a Hermitian 9x9: 9 diagonal, 36 real, 36 imaginary.
  Eigen::MatrixXd design(81, 81);
  Eigen::VectorXd rhs(81);
  for (std::size_t m = 0; m < 9; ++m) {
    for (std::size_t n = 0; n < 9; ++n) {
      const Eigen::Index row = static_cast<Eigen::Index>(9 * m + n);
      const Vector& v = a[m][n];
      Eigen::Index col = 0;
      for (Eigen::Index j = 0; j < 9; ++j) design(row, col++) = std::norm(v(j));
      for (Eigen::Index j = 0; j < 9; ++j) {
        for (Eigen::Index k = j + 1; k < 9; ++k) {
          // chi_jk = x + i y contributes 2 Re[(x + i y) v_j conj(v_k)].
          const Complex w = v(j) * std::conj(v(k));
          design(row, col++) = 2.0 * w.real();
          design(row, col++) = -2.0 * w.imag();
        }
      }
      rhs(row) = p(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
    }
  }
  const Eigen::VectorXd x = design.completeOrthogonalDecomposition().solve(rhs);
  Matrix chi = Matrix::Zero(9, 9);
  Eigen::Index col = 0;
  for (Eigen::Index j = 0; j < 9; ++j) chi(j, j) = x(col++);
  for (Eigen::Index j = 0; j < 9; ++j) {
    for (Eigen::Index k = j + 1; k < 9; ++k) {
      const Complex z{x(col), x(col + 1)};
      col += 2;
      chi(j, k) = z;
      chi(k, j) = std::conj(z);
    }
  }
  return ProcessMatrix(std::move(chi));
}

/// Nearest PSD matrix in Frobenius norm (negative eigenvalues clipped).
inline Matrix psd_projection(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (h + h.adjoint()));
  const Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * lam.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

enum class TraceConstraint {
  preserving,      // sum_r K_r^dag K_r = I
  non_increasing,  // sum_r K_r^dag K_r <= I, for lossy data
  automatic        // non_increasing if the linear estimate loses trace
};

struct FitOptions {
  TraceConstraint trace = TraceConstraint::automatic;
  double constraint_weight = 10.0;
  int max_iterations = 10000;
  double gradient_tol = 1e-10;
  double step_tol = 1e-15;
  double loss_threshold = 0.02;  // automatic mode: max eigenvalue of the trace map below 1 - this
};

struct FitResult {
  ProcessMatrix chi;
  double residual;          // sum_mn (p_mn - model_mn)^2
  double constraint_residual;
  double gradient_norm;
  int iterations;
  bool lossy;               // fitted as trace non-increasing
};

namespace detail {

struct FitProblem {
  std::array<Vector, 81> b;  // conj of forward amplitudes, row-major (m, n)
  Eigen::Matrix<double, 81, 1> p;
  std::array<Matrix, 9> e;
  bool lossy;
  double weight;

  static constexpr int kParams = 162;  // L = X + iY, both 9x9, column-major

  static Matrix unpack(const Eigen::VectorXd& x) {
    Matrix l(9, 9);
    for (Eigen::Index c = 0; c < 81; ++c) l(c % 9, c / 9) = Complex{x(c), x(81 + c)};
    return l;
  }

  static Eigen::VectorXd pack(const Matrix& l) {
    Eigen::VectorXd x(kParams);
    for (Eigen::Index c = 0; c < 81; ++c) {
      x(c) = l(c % 9, c / 9).real();
      x(81 + c) = l(c % 9, c / 9).imag();
    }
    return x;
  }

  /// Residual vector and Jacobian. Rows 0..80: data; then the trace
  /// constraint (9 rows for equality, 1 row for the inequality).
  void evaluate(const Eigen::VectorXd& x, Eigen::VectorXd& r, Eigen::MatrixXd* jac) const {
    const Matrix l = unpack(x);
    const Eigen::Index nc = lossy ? 1 : 9;
    r.resize(81 + nc);
    if (jac) jac->setZero(81 + nc, kParams);
    for (Eigen::Index i = 0; i < 81; ++i) {
      const Vector& bi = b[static_cast<std::size_t>(i)];
      const Vector v = l.adjoint() * bi;
      r(i) = v.squaredNorm() - p(i);
      if (!jac) continue;
      for (Eigen::Index q = 0; q < 9; ++q) {
        const Complex vq = std::conj(v(q));
        for (Eigen::Index pp = 0; pp < 9; ++pp) {
          const Complex g = vq * bi(pp);
          (*jac)(i, q * 9 + pp) = 2.0 * g.real();
          (*jac)(i, 81 + q * 9 + pp) = 2.0 * g.imag();
        }
      }
    }
    std::array<Matrix, 9> k;
    Matrix t = -Matrix::Identity(3, 3);
    for (Eigen::Index rr = 0; rr < 9; ++rr) {
      Matrix kr = Matrix::Zero(3, 3);
      for (Eigen::Index j = 0; j < 9; ++j) kr += l(j, rr) * e[static_cast<std::size_t>(j)];
      t += kr.adjoint() * kr;
      k[static_cast<std::size_t>(rr)] = std::move(kr);
    }
    if (!lossy) {
      // Independent real components of the Hermitian residual T.
      const auto comps = [](const Matrix& m, Eigen::VectorXd& out, Eigen::Index off) {
        out(off + 0) = m(0, 0).real();
        out(off + 1) = m(1, 1).real();
        out(off + 2) = m(2, 2).real();
        out(off + 3) = std::sqrt(2.0) * m(0, 1).real();
        out(off + 4) = std::sqrt(2.0) * m(0, 1).imag();
        out(off + 5) = std::sqrt(2.0) * m(0, 2).real();
        out(off + 6) = std::sqrt(2.0) * m(0, 2).imag();
        out(off + 7) = std::sqrt(2.0) * m(1, 2).real();
        out(off + 8) = std::sqrt(2.0) * m(1, 2).imag();
      };
      comps(t, r, 81);
      r.tail(9) *= weight;
      if (!jac) return;
      Eigen::VectorXd col(9);
      for (Eigen::Index rr = 0; rr < 9; ++rr) {
        const Matrix& kr = k[static_cast<std::size_t>(rr)];
        for (Eigen::Index pp = 0; pp < 9; ++pp) {
          const Matrix& ep = e[static_cast<std::size_t>(pp)];
          const Matrix a = ep.adjoint() * kr;
          comps(a + a.adjoint(), col, 0);
          jac->block(81, rr * 9 + pp, 9, 1) = weight * col;
          const Matrix bm = Complex{0.0, -1.0} * a;
          comps(bm + bm.adjoint(), col, 0);
          jac->block(81, 81 + rr * 9 + pp, 9, 1) = weight * col;
        }
      }
    } else {
      Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (t + t.adjoint()));
      const double excess = es.eigenvalues()(2);
      r(81) = weight * std::max(0.0, excess);
      if (!jac || excess <= 0.0) return;
      const Vector u = es.eigenvectors().col(2);
      for (Eigen::Index rr = 0; rr < 9; ++rr) {
        const Vector ku = k[static_cast<std::size_t>(rr)] * u;
        for (Eigen::Index pp = 0; pp < 9; ++pp) {
          const Complex s = (e[static_cast<std::size_t>(pp)] * u).dot(ku);  // u^dag E_p^dag K_r u
          (*jac)(81, rr * 9 + pp) = weight * 2.0 * s.real();
          (*jac)(81, 81 + rr * 9 + pp) = weight * 2.0 * s.imag();
        }
      }
    }
  }
};

}  // namespace detail

/// Levenberg-Marquardt on chi = L L^dag (full complex 9x9 factor), started
/// from the PSD projection of the linear-inversion estimate. The trace
/// constraint enters as a weighted penalty.
inline FitResult qpt_fit(const ProbabilityTable& p, const FitOptions& opt = {},
                         const TomographyBasisSet& preps = TomographyBasisSet::standard(),
                         const TomographyBasisSet& meas = TomographyBasisSet::standard()) {
  if (!p.allFinite()) throw InvalidArgument("qpt_fit: non-finite probabilities");
  const ProcessMatrix lin = linear_inversion(p, preps, meas);
  const Matrix start = psd_projection(lin.matrix());

  bool lossy = opt.trace == TraceConstraint::non_increasing;
  if (opt.trace == TraceConstraint::automatic) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(ProcessMatrix(start).trace_map().matrix());
    lossy = es.eigenvalues()(2) < 1.0 - opt.loss_threshold;
  }

  detail::FitProblem prob;
  const auto amp = detail::forward_amplitudes(preps, meas);
  for (std::size_t m = 0; m < 9; ++m) {
    for (std::size_t n = 0; n < 9; ++n) {
      prob.b[9 * m + n] = amp[m][n].conjugate();
      prob.p(static_cast<Eigen::Index>(9 * m + n)) = p(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
    }
  }
  const auto gm = gell_mann_basis();
  for (std::size_t j = 0; j < 9; ++j) prob.e[j] = gm[j].matrix();
  prob.lossy = lossy;
  prob.weight = opt.constraint_weight;

  Eigen::SelfAdjointEigenSolver<Matrix> es(start);
  const Matrix l0 = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().cast<Complex>().asDiagonal();
  Eigen::VectorXd x = detail::FitProblem::pack(l0);

  Eigen::VectorXd r;
  Eigen::MatrixXd jac;
  prob.evaluate(x, r, &jac);
  double cost = r.squaredNorm();
  double mu = 1e-3;
  int it = 0;
  double gnorm = (jac.transpose() * r).norm();
  bool converged = gnorm < opt.gradient_tol;
  for (; it < opt.max_iterations && !converged; ++it) {
    const Eigen::VectorXd g = jac.transpose() * r;
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    bool accepted = false;
    while (!accepted) {
      Eigen::MatrixXd a = jtj;
      a.diagonal().array() += mu * (1.0 + jtj.diagonal().array());
      const Eigen::VectorXd step = a.ldlt().solve(-g);
      Eigen::VectorXd trial_r;
      const Eigen::VectorXd trial = x + step;
      prob.evaluate(trial, trial_r, nullptr);
      const double trial_cost = trial_r.squaredNorm();
      if (trial_cost < cost) {
        x = trial;
        mu = std::max(mu / 3.0, 1e-12);
        accepted = true;
        const bool tiny = step.norm() <= opt.step_tol * (1.0 + x.norm()) || cost - trial_cost <= 1e-32;
        cost = trial_cost;
        if (tiny) converged = true;
      } else {
        mu *= 4.0;
        if (mu > 1e16) {
          converged = true;  // no descent direction left at working precision
          break;
        }
      }
    }
    prob.evaluate(x, r, &jac);
    gnorm = (jac.transpose() * r).norm();
    if (gnorm < opt.gradient_tol) converged = true;
  }

  const Matrix l = detail::FitProblem::unpack(x);
  ProcessMatrix chi(l * l.adjoint());
  const double data_res = r.head(81).squaredNorm();
  const double cons_res = r.tail(r.size() - 81).norm() / opt.constraint_weight;
  if (!converged) throw FitFailure("qpt_fit: iteration cap reached", data_res);
  return {std::move(chi), data_res, cons_res, gnorm, it, lossy};
}

inline FitResult qpt_fit(const CountTable& counts, const FitOptions& opt = {}) {
  counts.validate();
  return qpt_fit(counts.frequencies(), opt);
}

// ---------------------------------------------------------------------------
// State tomography.

/// <Phi_n| rho |Phi_n> for the nine measurement vectors.
inline Eigen::Matrix<double, 9, 1> state_probabilities(const DensityMatrix& rho,
                                                       const TomographyBasisSet& meas = TomographyBasisSet::standard()) {
  if (rho.dim() != 3) throw InvalidArgument("state_probabilities: expected a qutrit state");
  Eigen::Matrix<double, 9, 1> p;
  for (std::size_t n = 0; n < 9; ++n) {
    const Vector& phi = meas.vectors[n].amplitudes();
    p(static_cast<Eigen::Index>(n)) = phi.dot(rho.matrix() * phi).real();
  }
  return p;
}

/// Linear inversion from the nine projector frequencies, then the nearest
/// unit-trace PSD matrix (eigenvalues clipped and renormalized).
inline DensityMatrix state_linear_inversion(const Eigen::Matrix<double, 9, 1>& p,
                                            const TomographyBasisSet& meas = TomographyBasisSet::standard()) {
  // Parameters: 3 diagonal, then Re/Im of (0,1), (0,2), (1,2).
  constexpr std::array<std::pair<int, int>, 3> off{{{0, 1}, {0, 2}, {1, 2}}};
  Eigen::Matrix<double, 9, 9> design;
  for (std::size_t n = 0; n < 9; ++n) {
    const Vector& v = meas.vectors[n].amplitudes();
    const auto row = static_cast<Eigen::Index>(n);
    for (Eigen::Index j = 0; j < 3; ++j) design(row, j) = std::norm(v(j));
    for (std::size_t o = 0; o < 3; ++o) {
      const Complex w = std::conj(v(off[o].first)) * v(off[o].second);
      design(row, 3 + 2 * static_cast<Eigen::Index>(o)) = 2.0 * w.real();
      design(row, 4 + 2 * static_cast<Eigen::Index>(o)) = -2.0 * w.imag();
    }
  }
  const Eigen::Matrix<double, 9, 1> x = design.colPivHouseholderQr().solve(p);
  Matrix rho = Matrix::Zero(3, 3);
  for (Eigen::Index j = 0; j < 3; ++j) rho(j, j) = x(j);
  for (std::size_t o = 0; o < 3; ++o) {
    const Complex z{x(3 + 2 * static_cast<Eigen::Index>(o)), x(4 + 2 * static_cast<Eigen::Index>(o))};
    rho(off[o].first, off[o].second) = z;
    rho(off[o].second, off[o].first) = std::conj(z);
  }
  Matrix proj = psd_projection(rho);
  const double tr = proj.trace().real();
  if (!(tr > 0.0)) throw NumericalError("state_linear_inversion: no positive part");
  return DensityMatrix(Operator(proj / tr), 1e-9);
}

// ---------------------------------------------------------------------------
// Bootstrap.

struct BootstrapResult {
  double mean;
  double sigma;  // sample standard deviation over resamples
  int resamples;
};

/// Seed for resample r, derived from the master seed.
inline std::uint64_t derived_seed(std::uint64_t master, std::uint64_t r) {
  std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                    static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(r >> 32)};
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
}

/// Re-draws every count as Poisson(observed), recomputes `statistic`, and
/// returns the mean and spread over `resamples` draws.
template <class Counts, class Statistic>
BootstrapResult bootstrap(const Counts& counts, Statistic statistic, std::uint64_t seed,
                          int resamples = 100) {
  if (resamples < 2) throw InvalidArgument("bootstrap: need at least 2 resamples");
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(resamples));
  for (int r = 0; r < resamples; ++r) {
    std::mt19937_64 rng(derived_seed(seed, static_cast<std::uint64_t>(r)));
    Counts draw = counts;
    for (auto& c : draw) {
      if (c < 0) throw InvalidArgument("bootstrap: negative count");
      c = poisson_draw(static_cast<double>(c), rng);
    }
    values.push_back(statistic(draw));
  }
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(values.size() - 1);
  return {mean, std::sqrt(var), resamples};
}

/// CountTable overload: resamples the 81 cells.
template <class Statistic>
BootstrapResult bootstrap(const CountTable& table, Statistic statistic, std::uint64_t seed,
                          int resamples = 100) {
  table.validate();
  std::vector<std::int64_t> flat(table.counts.data(), table.counts.data() + 81);
  return bootstrap(
      flat,
      [&](const std::vector<std::int64_t>& d) {
        CountTable t = table;
        std::copy(d.begin(), d.end(), t.counts.data());
        return statistic(t);
      },
      seed, resamples);
}

}  // namespace pfsim
