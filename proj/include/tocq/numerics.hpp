#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace tocq {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr Complex kI{0.0, 1.0};

// Internal units are rad/ns for angular frequencies and ns for time.
namespace units {

inline constexpr double mhz(double f) { return kTwoPi * f * 1e-3; }
inline constexpr double khz(double f) { return kTwoPi * f * 1e-6; }
inline constexpr double to_mhz(double omega) { return omega / (kTwoPi * 1e-3); }
inline constexpr double to_khz(double omega) { return omega / (kTwoPi * 1e-6); }
inline constexpr double ps(double t) { return t * 1e-3; }

}  // namespace units

/// Wraps an angle into (-pi, pi].
inline double canonical_angle(double a) {
  double r = std::remainder(a, kTwoPi);
  if (r <= -kPi) r += kTwoPi;
  return r;
}

inline double max_abs(const CMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline bool is_hermitian(const CMatrix& m, double tol = 1e-10) {
  return m.rows() == m.cols() && max_abs(m - m.adjoint()) <= tol;
}

inline bool is_unitary(const CMatrix& m, double tol = 1e-10) {
  if (m.rows() != m.cols()) return false;
  return max_abs(m.adjoint() * m - CMatrix::Identity(m.rows(), m.cols())) <= tol;
}

/// Uniform time discretisation. n_steps * dt equals t1 - t0 up to rounding.
struct TimeGrid {
  double t0 = 0.0;
  double t1 = 0.0;
  double dt = 0.0;
  std::size_t n_steps = 0;

  /// Smallest uniform grid on [t0, t1] whose step does not exceed max_dt.
  static TimeGrid covering(double t0, double t1, double max_dt) {
    if (!(max_dt > 0.0)) throw std::invalid_argument("TimeGrid: dt must be positive");
    if (!(t1 >= t0)) throw std::invalid_argument("TimeGrid: t1 < t0");
    TimeGrid g;
    g.t0 = t0;
    g.t1 = t1;
    const double span = t1 - t0;
    g.n_steps = span == 0.0 ? 0 : static_cast<std::size_t>(std::ceil(span / max_dt - 1e-9));
    g.dt = g.n_steps == 0 ? max_dt : span / static_cast<double>(g.n_steps);
    return g;
  }

  double at(std::size_t k) const {
    return k >= n_steps ? t1 : t0 + static_cast<double>(k) * dt;
  }
};

/// Kronecker product, row-major block convention: (a ⊗ b)(i*rb + k, j*cb + l) = a(i,j) b(k,l).
inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// exp(-i h s) for Hermitian h, via eigendecomposition.
inline CMatrix expm_hermitian(const CMatrix& h, double s) {
  if (!is_hermitian(h, 1e-10))
    throw std::invalid_argument("expm_hermitian: matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  const CVector phases =
      (es.eigenvalues().cast<Complex>() * Complex(0.0, -s)).array().exp().matrix();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

/// Bessel function of the first kind J_n(x) for |n| <= 64, |x| <= 10.
///
/// Miller's downward recurrence normalised with J_0 + 2 sum_k J_2k = 1. The
/// start order sits far enough above max(n, x) that the truncation error is
/// below double precision over the whole supported range.
inline double bessel_j(int n, double x) {
  if (n < -64 || n > 64) throw std::invalid_argument("bessel_j: |n| must be <= 64");
  if (!(std::abs(x) <= 10.0)) throw std::invalid_argument("bessel_j: |x| must be <= 10");
  if (n < 0) return (n % 2 == 0 ? 1.0 : -1.0) * bessel_j(-n, x);
  if (x < 0.0) return (n % 2 == 0 ? 1.0 : -1.0) * bessel_j(n, -x);
  if (x == 0.0) return n == 0 ? 1.0 : 0.0;

  constexpr double kBig = 1e250;
  const int start = 2 * ((std::max(n, static_cast<int>(x)) + 50) / 2);
  const double two_over_x = 2.0 / x;
  double j_next = 0.0;  // J_{k+1}
  double j = 1.0;       // J_k, unnormalised
  double norm = 0.0;
  double result = 0.0;
  for (int k = start; k > 0; --k) {
    const double j_prev = k * two_over_x * j - j_next;
    j_next = j;
    j = j_prev;
    if (std::abs(j) > kBig) {
      j /= kBig;
      j_next /= kBig;
      norm /= kBig;
      result /= kBig;
    }
    // j now holds J_{k-1}
    if (k - 1 == n) result = j;
    if ((k - 1) % 2 == 0 && k - 1 > 0) norm += 2.0 * j;
  }
  norm += j;
  return result / norm;
}

/// One classical fourth-order Runge-Kutta step of dy/dt = f(t, y).
template <class State, class Derivative>
State rk4_step(Derivative&& f, const State& y, double t, double dt) {
  const State k1 = f(t, y);
  const State k2 = f(t + 0.5 * dt, State(y + (0.5 * dt) * k1));
  const State k3 = f(t + 0.5 * dt, State(y + (0.5 * dt) * k2));
  const State k4 = f(t + dt, State(y + dt * k3));
  return State(y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

/// Hermitian operator stored as a real diagonal plus off-diagonal entries;
/// each entry (r, c, v) stands for v|r><c| + conj(v)|c><r|, r != c.
struct SparseHermitian {
  struct Entry {
    Eigen::Index row;
    Eigen::Index col;
    Complex value;
  };

  Eigen::VectorXd diag;
  std::vector<Entry> entries;

  SparseHermitian() = default;
  explicit SparseHermitian(Eigen::Index dim) : diag(Eigen::VectorXd::Zero(dim)) {}

  Eigen::Index dim() const { return diag.size(); }

  static SparseHermitian from_dense(const CMatrix& h, double drop = 0.0) {
    if (!is_hermitian(h, 1e-10)) throw std::invalid_argument("SparseHermitian: matrix is not Hermitian");
    SparseHermitian s(h.rows());
    for (Eigen::Index i = 0; i < h.rows(); ++i) {
      s.diag(i) = h(i, i).real();
      for (Eigen::Index j = i + 1; j < h.cols(); ++j)
        if (std::abs(h(i, j)) > drop) s.entries.push_back({i, j, h(i, j)});
    }
    return s;
  }

  CMatrix dense() const {
    CMatrix h = diag.cast<Complex>().asDiagonal();
    for (const auto& e : entries) {
      h(e.row, e.col) += e.value;
      h(e.col, e.row) += std::conj(e.value);
    }
    return h;
  }

  /// out += -i [H, rho]
  void add_commutator(const CMatrix& rho, CMatrix& out) const {
    const Eigen::Index n = dim();
    for (Eigen::Index c = 0; c < n; ++c)
      for (Eigen::Index r = 0; r < n; ++r) out(r, c) += Complex(0.0, diag(c) - diag(r)) * rho(r, c);
    for (const auto& e : entries) {
      const Complex v = -kI * e.value;
      const Complex vc = -kI * std::conj(e.value);
      for (Eigen::Index k = 0; k < n; ++k) {
        // H rho: rows r and c
        out(e.row, k) += v * rho(e.col, k);
        out(e.col, k) += vc * rho(e.row, k);
        // rho H: (rho H)(:, c) += rho(:, r) v, (rho H)(:, r) += rho(:, c) conj(v)
        out(k, e.col) -= v * rho(k, e.row);
        out(k, e.row) -= vc * rho(k, e.col);
      }
    }
  }

  /// out += -i H psi
  void add_action(const CMatrix& psi, CMatrix& out) const {
    for (Eigen::Index m = 0; m < dim(); ++m) out.row(m) += Complex(0.0, -diag(m)) * psi.row(m);
    for (const auto& e : entries) {
      out.row(e.row) += (-kI * e.value) * psi.row(e.col);
      out.row(e.col) += (-kI * std::conj(e.value)) * psi.row(e.row);
    }
  }
};

// Pauli matrices and basis projectors used throughout the tests and builders.
namespace pauli {

inline CMatrix identity() { return CMatrix::Identity(2, 2); }
inline CMatrix x() {
  CMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
inline CMatrix y() {
  CMatrix m(2, 2);
  m << 0, -kI, kI, 0;
  return m;
}
inline CMatrix z() {
  CMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

}  // namespace pauli

/// |row><col| in dimension dim.
inline CMatrix ket_bra(Eigen::Index dim, Eigen::Index row, Eigen::Index col) {
  CMatrix m = CMatrix::Zero(dim, dim);
  m(row, col) = 1.0;
  return m;
}

}  // namespace tocq
