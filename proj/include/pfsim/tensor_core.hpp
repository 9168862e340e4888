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

// Dense complex linear algebra for small qudit chains.
//
// Site-ordering convention (used by every module): for a chain of L sites
// the basis index of |k_1 k_2 ... k_L> is sum_j k_j * n^(L-j), i.e. site 1 is
// the leftmost and most significant tensor factor.

#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

#include "pfsim/errors.hpp"

namespace pfsim {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr Complex kI{0.0, 1.0};

/// Largest Hilbert-space dimension the dense kernels accept (3^6).
inline constexpr std::size_t kMaxHilbertDim = 729;

/// e^{2 pi i k / n}, built from the angle rather than decimal literals.
inline Complex root_of_unity(int n, long k) {
  const long r = ((k % n) + n) % n;
  return std::polar(1.0, 2.0 * kPi * static_cast<double>(r) / n);
}

/// omega = e^{2 pi i / 3}.
inline Complex omega3() { return root_of_unity(3, 1); }

inline std::size_t checked_power(std::size_t base, std::size_t exp) {
  std::size_t out = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    out *= base;
    if (out > kMaxHilbertDim) {
      throw SizeGuardError("Hilbert dimension " + std::to_string(base) + "^" +
                           std::to_string(exp) + " exceeds the dense limit " +
                           std::to_string(kMaxHilbertDim));
    }
  }
  return out;
}

/// Square complex matrix. Hermiticity and unitarity are predicates, not
/// assumptions.
class Operator {
 public:
  Operator() = default;
  explicit Operator(Matrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) {
      throw InvalidArgument("Operator must be square");
    }
  }

  static Operator identity(std::size_t dim) {
    return Operator(Matrix::Identity(static_cast<Eigen::Index>(dim),
                                     static_cast<Eigen::Index>(dim)));
  }
  static Operator zero(std::size_t dim) {
    return Operator(Matrix::Zero(static_cast<Eigen::Index>(dim),
                                 static_cast<Eigen::Index>(dim)));
  }
  static Operator diagonal(const std::vector<Complex>& d) {
    Vector v(static_cast<Eigen::Index>(d.size()));
    for (std::size_t i = 0; i < d.size(); ++i) v(static_cast<Eigen::Index>(i)) = d[i];
    return Operator(v.asDiagonal().toDenseMatrix());
  }
  static Operator from_rows(std::initializer_list<std::initializer_list<Complex>> rows) {
    const auto n = static_cast<Eigen::Index>(rows.size());
    Matrix m(n, n);
    Eigen::Index i = 0;
    for (const auto& row : rows) {
      if (static_cast<Eigen::Index>(row.size()) != n) {
        throw InvalidArgument("from_rows: ragged matrix");
      }
      Eigen::Index j = 0;
      for (const auto& x : row) m(i, j++) = x;
      ++i;
    }
    return Operator(std::move(m));
  }

  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  const Matrix& matrix() const { return m_; }
  Complex operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

  Operator adjoint() const { return Operator(m_.adjoint()); }
  Complex trace() const { return m_.trace(); }
  double norm() const { return m_.norm(); }

  Operator pow(unsigned k) const {
    Matrix out = Matrix::Identity(m_.rows(), m_.cols());
    Matrix base = m_;
    while (k > 0) {
      if (k & 1u) out = out * base;
      base = base * base;
      k >>= 1u;
    }
    return Operator(std::move(out));
  }

  bool is_hermitian(double tol = 1e-10) const {
    return (m_ - m_.adjoint()).norm() <= tol * std::max(1.0, m_.norm());
  }
  bool is_unitary(double tol = 1e-10) const {
    return (m_.adjoint() * m_ - Matrix::Identity(m_.rows(), m_.cols())).norm() <= tol;
  }

  Operator& operator+=(const Operator& o) {
    m_ += o.m_;
    return *this;
  }
  Operator& operator-=(const Operator& o) {
    m_ -= o.m_;
    return *this;
  }
  Operator& operator*=(Complex s) {
    m_ *= s;
    return *this;
  }

  friend Operator operator*(const Operator& a, const Operator& b) {
    return Operator(a.m_ * b.m_);
  }
  friend Operator operator+(const Operator& a, const Operator& b) {
    return Operator(a.m_ + b.m_);
  }
  friend Operator operator-(const Operator& a, const Operator& b) {
    return Operator(a.m_ - b.m_);
  }
  friend Operator operator-(const Operator& a) { return Operator(-a.m_); }
  friend Operator operator*(Complex s, const Operator& a) { return Operator(s * a.m_); }
  friend Operator operator*(double s, const Operator& a) { return Operator(s * a.m_); }

 private:
  Matrix m_;
};

/// Frobenius distance ||a - b||.
inline double distance(const Operator& a, const Operator& b) {
  return (a.matrix() - b.matrix()).norm();
}

inline Operator commutator(const Operator& a, const Operator& b) { return a * b - b * a; }

inline Operator kron(const Operator& a, const Operator& b) {
  const auto na = static_cast<Eigen::Index>(a.dim());
  const auto nb = static_cast<Eigen::Index>(b.dim());
  Matrix out(na * nb, na * nb);
  for (Eigen::Index i = 0; i < na; ++i) {
    for (Eigen::Index j = 0; j < na; ++j) {
      out.block(i * nb, j * nb, nb, nb) = a(i, j) * b.matrix();
    }
  }
  return Operator(std::move(out));
}

/// Normalized pure state.
class StateVector {
 public:
  StateVector() = default;
  explicit StateVector(Vector amplitudes) : v_(std::move(amplitudes)) {
    const double n = v_.norm();
    if (!(n > 0.0) || !std::isfinite(n)) {
      throw InvalidArgument("StateVector: zero or non-finite norm");
    }
    v_ /= n;
  }
  StateVector(std::initializer_list<Complex> amps)
      : StateVector(to_vector(amps)) {}

  std::size_t dim() const { return static_cast<std::size_t>(v_.size()); }
  const Vector& amplitudes() const { return v_; }
  Complex operator[](Eigen::Index i) const { return v_(i); }

  /// <this|other>
  Complex inner(const StateVector& other) const { return v_.dot(other.v_); }
  Operator projector() const { return Operator(v_ * v_.adjoint()); }

 private:
  static Vector to_vector(std::initializer_list<Complex> amps) {
    Vector v(static_cast<Eigen::Index>(amps.size()));
    Eigen::Index i = 0;
    for (const auto& a : amps) v(i++) = a;
    return v;
  }

  Vector v_;
};

/// Raw (unnormalized) action of an operator on a state.
inline Vector operator*(const Operator& op, const StateVector& s) {
  return op.matrix() * s.amplitudes();
}

/// Trace distance between pure states, insensitive to global phase.
/// 1 - |<a|b>|^2 is evaluated as (1/2) sum_ij |a_i b_j - a_j b_i|^2 so that
/// nearly equal states do not lose precision to cancellation.
inline double trace_distance(const StateVector& a, const StateVector& b) {
  if (a.dim() != b.dim()) throw InvalidArgument("trace_distance: dimension mismatch");
  const Vector& u = a.amplitudes();
  const Vector& v = b.amplitudes();
  const Matrix wedge = u * v.transpose() - v * u.transpose();
  return std::sqrt(0.5 * wedge.squaredNorm());
}

/// Eigen-decomposition of a Hermitian operator, eigenvalues ascending.
struct Spectrum {
  RealVector values;
  Matrix vectors;  // columns are eigenvectors
};

inline Spectrum hermitian_spectrum(const Operator& h, double tol = 1e-10) {
  if (!h.is_hermitian(tol)) {
    throw NotHermitian("hermitian_spectrum: operator is not Hermitian");
  }
  // Symmetrize so round-off in the strictly lower triangle is not ignored.
  const Matrix sym = 0.5 * (h.matrix() + h.matrix().adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("hermitian_spectrum: eigensolver failed");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

/// Trace distance (1/2)||a - b||_1 between Hermitian operators.
inline double trace_distance(const Operator& a, const Operator& b) {
  const Spectrum s = hermitian_spectrum(a - b, 1e-8);
  return 0.5 * s.values.cwiseAbs().sum();
}

/// Unit-trace positive semidefinite matrix.
class DensityMatrix {
 public:
  DensityMatrix() = default;
  explicit DensityMatrix(Operator rho, double tol = 1e-10) : rho_(std::move(rho)) {
    if (std::abs(rho_.trace() - 1.0) > tol) {
      throw InvalidArgument("DensityMatrix: trace is not 1");
    }
    if (!rho_.is_hermitian(tol)) {
      throw InvalidArgument("DensityMatrix: not Hermitian");
    }
    if (hermitian_spectrum(rho_, tol).values.minCoeff() < -tol) {
      throw InvalidArgument("DensityMatrix: not positive semidefinite");
    }
  }
  static DensityMatrix pure(const StateVector& s) { return DensityMatrix(s.projector()); }
  static DensityMatrix maximally_mixed(std::size_t dim) {
    return DensityMatrix((1.0 / static_cast<double>(dim)) * Operator::identity(dim));
  }
  /// Divides by the trace first; throws on vanishing trace.
  static DensityMatrix normalized(const Operator& op, double tol = 1e-10) {
    const Complex t = op.trace();
    if (std::abs(t) < 1e-300) throw NumericalError("DensityMatrix: zero trace");
    return DensityMatrix((1.0 / t.real()) * op, tol);
  }

  std::size_t dim() const { return rho_.dim(); }
  const Operator& op() const { return rho_; }
  const Matrix& matrix() const { return rho_.matrix(); }

  /// Tr[A rho]
  Complex expectation(const Operator& a) const { return (a.matrix() * rho_.matrix()).trace(); }

  /// U rho U^dag
  DensityMatrix conjugated(const Operator& u) const {
    return DensityMatrix(u * rho_ * u.adjoint(), 1e-9);
  }

 private:
  Operator rho_;
};

// ---------------------------------------------------------------------------
// Clock and shift operators.

struct ClockShift {
  Operator tau;    // cyclic shift |k> -> |k+1>
  Operator sigma;  // diag(1, omega, ..., omega^{n-1})
};

inline ClockShift clock_shift_ops(int n) {
  if (n < 2) throw InvalidArgument("clock_shift_ops: order n must be >= 2");
  const auto d = static_cast<Eigen::Index>(n);
  Matrix tau = Matrix::Zero(d, d);
  Matrix sigma = Matrix::Zero(d, d);
  for (Eigen::Index k = 0; k < d; ++k) {
    tau((k + 1) % d, k) = 1.0;
    sigma(k, k) = root_of_unity(n, k);
  }
  return {Operator(std::move(tau)), Operator(std::move(sigma))};
}

enum class BasisKind { sigma, tau, chi };

/// Eigenvector of sigma, tau or chi = sigma*tau with eigenvalue omega^index.
struct BasisLabel {
  BasisKind kind;
  int index;
};

/// The kets are normalized with first component real positive, matching the
/// explicit qutrit kets used throughout the braid derivation.
inline StateVector eigenbasis(BasisLabel label, int n = 3) {
  if (n < 2) throw InvalidArgument("eigenbasis: order n must be >= 2");
  if (label.index < 0 || label.index >= n) {
    throw InvalidArgument("eigenbasis: index out of range");
  }
  const auto d = static_cast<Eigen::Index>(n);
  const long k = label.index;
  Vector v(d);
  switch (label.kind) {
    case BasisKind::sigma:
      v.setZero();
      v(k) = 1.0;
      break;
    case BasisKind::tau:
      for (Eigen::Index j = 0; j < d; ++j) v(j) = root_of_unity(n, -j * k);
      break;
    case BasisKind::chi:
      // chi|j> = omega^{j+1}|j+1>; the cyclic recursion closes on omega^k
      // only for odd n.
      if (n % 2 == 0) {
        throw InvalidArgument("eigenbasis: chi eigenvalues are not powers of omega for even n");
      }
      for (Eigen::Index j = 0; j < d; ++j) {
        v(j) = root_of_unity(n, j * (j + 1) / 2 - j * k);
      }
      break;
  }
  return StateVector(std::move(v));
}

/// I^{(j-1)} (x) op (x) I^{(L-j)}, site 1 leftmost.
inline Operator embed_site(const Operator& op, int site, int length) {
  if (length < 1) throw InvalidArgument("embed_site: chain length must be >= 1");
  if (site < 1 || site > length) throw InvalidArgument("embed_site: site out of range");
  const std::size_t n = op.dim();
  const std::size_t left = checked_power(n, static_cast<std::size_t>(site - 1));
  const std::size_t right = checked_power(n, static_cast<std::size_t>(length - site));
  checked_power(n, static_cast<std::size_t>(length));
  return kron(kron(Operator::identity(left), op), Operator::identity(right));
}

/// E_0 = sqrt(2/3) I followed by the eight Gell-Mann matrices; every element
/// satisfies Tr[E_j^dag E_k] = 2 delta_jk.
inline std::array<Operator, 9> gell_mann_basis() {
  const Complex i = kI;
  const double r3 = 1.0 / std::sqrt(3.0);
  return {
      std::sqrt(2.0 / 3.0) * Operator::identity(3),
      Operator::from_rows({{0, 1, 0}, {1, 0, 0}, {0, 0, 0}}),
      Operator::from_rows({{0, -i, 0}, {i, 0, 0}, {0, 0, 0}}),
      Operator::from_rows({{1, 0, 0}, {0, -1, 0}, {0, 0, 0}}),
      Operator::from_rows({{0, 0, 1}, {0, 0, 0}, {1, 0, 0}}),
      Operator::from_rows({{0, 0, -i}, {0, 0, 0}, {i, 0, 0}}),
      Operator::from_rows({{0, 0, 0}, {0, 0, 1}, {0, 1, 0}}),
      Operator::from_rows({{0, 0, 0}, {0, 0, -i}, {0, i, 0}}),
      r3 * Operator::from_rows({{1, 0, 0}, {0, 1, 0}, {0, 0, -2}}),
  };
}

/// Qutrit Fourier matrix F with columns (1, omega^l, omega^{2l})/sqrt(3); maps
/// parity-eigenbasis coefficients to sigma-basis coefficients.
inline Operator fourier3() {
  Matrix f(3, 3);
  for (Eigen::Index r = 0; r < 3; ++r) {
    for (Eigen::Index c = 0; c < 3; ++c) f(r, c) = root_of_unity(3, r * c) / std::sqrt(3.0);
  }
  return Operator(std::move(f));
}

}  // namespace pfsim
