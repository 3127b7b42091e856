#pragma once

// Master equation
//   d rho/dt = -i [H(t), rho] + sum_k rate_k A(L_k),
//   A(L) = 2 L rho L^dag - L^dag L rho - rho L^dag L,
// integrated with fixed-step RK4. Rates multiply A directly, so a decay rate r
// enters as r/2 (and the excited population decays as exp(-r t)).

#include "tocq/device_model.hpp"
#include "tocq/error.hpp"
#include "tocq/numerics.hpp"

#include <Eigen/Sparse>

#include <functional>
#include <sstream>
#include <string>
#include <vector>

namespace tocq {

using SparseMatrix = Eigen::SparseMatrix<Complex>;
using DensityMatrix = CMatrix;

/// Fills the Hamiltonian at time t into the supplied storage.
using HamiltonianFn = std::function<void(double, SparseHermitian&)>;

inline HamiltonianFn hamiltonian_of(const RotatingFrameModel& model) {
  return [&model](double t, SparseHermitian& h) { model.fill(t, h); };
}

inline HamiltonianFn hamiltonian_of(std::function<CMatrix(double)> dense) {
  return [dense = std::move(dense)](double t, SparseHermitian& h) { h = SparseHermitian::from_dense(dense(t)); };
}

inline HamiltonianFn constant_hamiltonian(const CMatrix& h0) {
  const SparseHermitian s = SparseHermitian::from_dense(h0);
  return [s](double, SparseHermitian& h) { h = s; };
}

struct CollapseTerm {
  std::string label;
  SparseMatrix op;
  double rate = 0.0;  // prefactor of A(op)
};

/// Collapse operators plus a precomputed form of the dissipator: the jump
/// part L rho L^dag from the non-zero entries of L, and the anticommutator
/// part from diag(L^dag L) when that product is diagonal (it is for
/// annihilation and number operators); other terms use sparse products.
class CollapseSet {
 public:
  void add(std::string label, const SparseMatrix& op, double rate) {
    if (!(rate >= 0.0)) throw std::invalid_argument("CollapseSet: rates must be >= 0");
    if (rate == 0.0) return;
    if (op.rows() != op.cols()) throw std::invalid_argument("CollapseSet: operator must be square");
    if (dim_ == 0) {
      dim_ = op.rows();
      decay_ = Eigen::VectorXd::Zero(dim_);
    } else if (op.rows() != dim_) {
      throw std::invalid_argument("CollapseSet: inconsistent operator dimensions");
    }
    terms_.push_back({std::move(label), op, rate});
    Jumps j;
    j.rate = rate;
    for (Eigen::Index k = 0; k < op.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(op, k); it; ++it)
        if (it.value() != Complex(0.0)) j.entries.push_back({it.row(), it.col(), it.value()});
    jumps_.push_back(std::move(j));
    const SparseMatrix ldl = (SparseMatrix(op.adjoint()) * op).pruned();
    bool diagonal = true;
    for (Eigen::Index k = 0; k < ldl.outerSize() && diagonal; ++k)
      for (SparseMatrix::InnerIterator it(ldl, k); it; ++it)
        if (it.row() != it.col()) diagonal = false;
    if (diagonal) {
      for (Eigen::Index k = 0; k < ldl.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(ldl, k); it; ++it) decay_(it.row()) += rate * it.value().real();
    } else {
      general_.push_back({rate, ldl});
    }
  }
  void add(std::string label, const CMatrix& op, double rate) { add(std::move(label), SparseMatrix(op.sparseView()), rate); }

  const std::vector<CollapseTerm>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  /// out += sum rate A(L) for the current rho.
  void add_dissipator(const CMatrix& rho, CMatrix& out) const {
    if (terms_.empty()) return;
    if (rho.rows() != dim_) throw std::invalid_argument("CollapseSet: dimension mismatch");
    const Eigen::Index n = dim_;
    for (Eigen::Index c = 0; c < n; ++c)
      for (Eigen::Index r = 0; r < n; ++r) out(r, c) -= (decay_(r) + decay_(c)) * rho(r, c);
    for (const auto& j : jumps_) {
      const double two_r = 2.0 * j.rate;
      for (const auto& a : j.entries)
        for (const auto& b : j.entries) out(a.row, b.row) += two_r * a.value * std::conj(b.value) * rho(a.col, b.col);
    }
    for (const auto& g : general_) {
      out.noalias() -= g.rate * (g.ldl * rho);
      out.noalias() -= g.rate * (rho * g.ldl);
    }
  }

 private:
  struct Entry {
    Eigen::Index row;
    Eigen::Index col;
    Complex value;
  };
  struct Jumps {
    double rate = 0.0;
    std::vector<Entry> entries;
  };
  struct General {
    double rate;
    SparseMatrix ldl;
  };

  Eigen::Index dim_ = 0;
  std::vector<CollapseTerm> terms_;
  std::vector<Jumps> jumps_;
  Eigen::VectorXd decay_;
  std::vector<General> general_;
};

/// Annihilation operator of transmon k on the basis (b|n> = sqrt(n)|n-1>).
inline SparseMatrix annihilation(const ProductBasis& basis, int k) {
  std::vector<Eigen::Triplet<Complex>> trip;
  for (Eigen::Index n = 0; n < basis.dim(); ++n) {
    Occupation occ = basis.state(n);
    const int nk = occ[static_cast<std::size_t>(k)];
    if (nk == 0) continue;
    occ[static_cast<std::size_t>(k)] -= 1;
    if (const auto m = basis.find(occ)) trip.emplace_back(*m, n, std::sqrt(double(nk)));
  }
  SparseMatrix b(basis.dim(), basis.dim());
  b.setFromTriplets(trip.begin(), trip.end());
  return b;
}

/// Per transmon: b_k with r_minus/2 and b_k^dag b_k with r_z/2 on A(.).
/// Zero-rate terms are dropped.
inline CollapseSet collapse_operators(const LatticeSpec& lat, const ProductBasis& basis) {
  if (basis.n_transmons() != lat.size()) throw std::invalid_argument("collapse_operators: basis/lattice mismatch");
  CollapseSet c;
  for (int k = 0; k < lat.size(); ++k) {
    const SparseMatrix b = annihilation(basis, k);
    const SparseMatrix n = SparseMatrix(b.adjoint()) * b;
    c.add("decay_" + std::to_string(k), b, 0.5 * lat.transmon(k).r_minus);
    c.add("dephasing_" + std::to_string(k), n, 0.5 * lat.transmon(k).r_z);
  }
  return c;
}

/// out = -i[H, rho] + sum rate A(L)
inline void lindblad_rhs(const SparseHermitian& h, const CollapseSet& c, const CMatrix& rho, CMatrix& out) {
  out.setZero(rho.rows(), rho.cols());
  h.add_commutator(rho, out);
  c.add_dissipator(rho, out);
}

struct DensityDiagnostics {
  double hermiticity = 0.0;
  double trace_error = 0.0;
  double min_eigenvalue = 0.0;
};

inline DensityDiagnostics diagnose(const CMatrix& rho) {
  DensityDiagnostics d;
  d.hermiticity = max_abs(rho - rho.adjoint());
  d.trace_error = std::abs(rho.trace() - 1.0);
  const CMatrix herm = 0.5 * (rho + rho.adjoint());
  d.min_eigenvalue = Eigen::SelfAdjointEigenSolver<CMatrix>(herm, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  return d;
}

inline bool is_density_matrix(const CMatrix& rho, double herm_tol = 1e-10, double trace_tol = 1e-9,
                              double eig_floor = -1e-8) {
  if (rho.rows() != rho.cols()) return false;
  const auto d = diagnose(rho);
  return d.hermiticity <= herm_tol && d.trace_error <= trace_tol && d.min_eigenvalue >= eig_floor;
}

struct Trajectory {
  std::vector<double> times;
  std::vector<CMatrix> states;
};

struct EvolveOptions {
  std::size_t stride = 0;               // keep every stride-th step (0: endpoints only)
  double positivity_floor = -1e-6;      // abort below this eigenvalue at sampled steps
  bool check_positivity = true;
};

/// Observer called with (step index, time, states) at every sampled step,
/// including the initial and final ones.
using BatchObserver = std::function<void(std::size_t, double, const std::vector<CMatrix>&)>;

/// RK4 integration of several operators under one Hamiltonian and collapse
/// set; H(t) is evaluated once per stage and shared across the batch.
inline void evolve_batch(std::vector<CMatrix>& states, const HamiltonianFn& h, const CollapseSet& c,
                         const TimeGrid& grid, std::size_t stride = 0, const BatchObserver& observer = {}) {
  if (states.empty()) return;
  const Eigen::Index n = states.front().rows();
  for (const auto& s : states)
    if (s.rows() != n || s.cols() != n) throw std::invalid_argument("evolve: inconsistent operator shapes");
  SparseHermitian hs(n);
  const std::size_t m = states.size();
  std::vector<CMatrix> k1(m), k2(m), k3(m), k4(m), tmp(m);
  auto eval = [&](double t, const std::vector<CMatrix>& in, std::vector<CMatrix>& out) {
    h(t, hs);
    if (hs.dim() != n) throw std::invalid_argument("evolve: Hamiltonian dimension mismatch");
    for (std::size_t i = 0; i < m; ++i) lindblad_rhs(hs, c, in[i], out[i]);
  };
  auto sample = [&](std::size_t k) {
    if (!observer) return;
    if (k == 0 || k == grid.n_steps || (stride > 0 && k % stride == 0)) observer(k, grid.at(k), states);
  };
  sample(0);
  const double dt = grid.dt;
  for (std::size_t k = 0; k < grid.n_steps; ++k) {
    const double t = grid.at(k);
    eval(t, states, k1);
    for (std::size_t i = 0; i < m; ++i) tmp[i] = states[i] + (0.5 * dt) * k1[i];
    eval(t + 0.5 * dt, tmp, k2);
    for (std::size_t i = 0; i < m; ++i) tmp[i] = states[i] + (0.5 * dt) * k2[i];
    eval(t + 0.5 * dt, tmp, k3);
    for (std::size_t i = 0; i < m; ++i) tmp[i] = states[i] + dt * k3[i];
    eval(t + dt, tmp, k4);
    for (std::size_t i = 0; i < m; ++i) states[i] += (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    sample(k + 1);
  }
}

inline void check_positive(const CMatrix& rho, double t, double floor, double dt) {
  const auto d = diagnose(rho);
  if (!(d.min_eigenvalue >= floor) || !std::isfinite(d.trace_error)) {
    std::ostringstream os;
    os << "density matrix lost positivity at t=" << t << " ns (min eigenvalue " << d.min_eigenvalue
       << ", trace error " << d.trace_error << ", dt=" << dt << " ns); reduce the step";
    throw PhysicsError(os.str());
  }
}

inline Trajectory evolve(const DensityMatrix& rho0, const HamiltonianFn& h, const CollapseSet& c,
                         const TimeGrid& grid, const EvolveOptions& opt = {}) {
  Trajectory tr;
  std::vector<CMatrix> states{rho0};
  evolve_batch(states, h, c, grid, opt.stride, [&](std::size_t, double t, const std::vector<CMatrix>& s) {
    if (opt.check_positivity) check_positive(s.front(), t, opt.positivity_floor, grid.dt);
    tr.times.push_back(t);
    tr.states.push_back(s.front());
  });
  return tr;
}

/// Time-ordered product of exp(-i H(t_mid) dt).
inline CMatrix unitary_propagate(const HamiltonianFn& h, const TimeGrid& grid, Eigen::Index dim) {
  CMatrix u = CMatrix::Identity(dim, dim);
  SparseHermitian hs(dim);
  for (std::size_t k = 0; k < grid.n_steps; ++k) {
    h(grid.at(k) + 0.5 * grid.dt, hs);
    u = expm_hermitian(hs.dense(), grid.dt) * u;
  }
  return u;
}

/// Choi matrix sum_{kl} |k><l| (x) P E(V|k><l|V^dag) P on the logical space
/// spanned by the columns of the isometry v (physical dim x d).
inline CMatrix assemble_choi(const std::vector<CMatrix>& outputs, const CMatrix& v) {
  const Eigen::Index d = v.cols();
  CMatrix choi(d * d, d * d);
  for (Eigen::Index k = 0; k < d; ++k)
    for (Eigen::Index l = 0; l < d; ++l)
      choi.block(k * d, l * d, d, d) = v.adjoint() * outputs[static_cast<std::size_t>(k * d + l)] * v;
  return choi;
}

inline std::vector<CMatrix> choi_inputs(const CMatrix& v) {
  const Eigen::Index d = v.cols();
  std::vector<CMatrix> in;
  for (Eigen::Index k = 0; k < d; ++k)
    for (Eigen::Index l = 0; l < d; ++l) in.push_back(v.col(k) * v.col(l).adjoint());
  return in;
}

struct ChoiSample {
  double t;
  CMatrix choi;
};

/// Evolves the d^2 operator-basis inputs and returns the logical Choi matrix;
/// the observer (optional) sees the Choi matrix at sampled steps.
inline CMatrix choi_from_evolution(const HamiltonianFn& h, const CollapseSet& c, const TimeGrid& grid,
                                   const CMatrix& isometry, std::size_t stride = 0,
                                   const std::function<void(const ChoiSample&)>& observer = {}) {
  const Eigen::Index d = isometry.cols();
  if (d != 2 && d != 4) throw std::invalid_argument("choi_from_evolution: logical dimension must be 2 or 4");
  std::vector<CMatrix> states = choi_inputs(isometry);
  BatchObserver obs;
  if (observer)
    obs = [&](std::size_t, double t, const std::vector<CMatrix>& s) { observer({t, assemble_choi(s, isometry)}); };
  evolve_batch(states, h, c, grid, stride, obs);
  const CMatrix choi = assemble_choi(states, isometry);
  const double min_eig =
      Eigen::SelfAdjointEigenSolver<CMatrix>(0.5 * (choi + choi.adjoint()), Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  if (min_eig < -1e-6) throw PhysicsError("Choi matrix not positive (min eigenvalue " + std::to_string(min_eig) + ")");
  return choi;
}

inline CMatrix choi_from_evolution(const HamiltonianFn& h, const CollapseSet& c, const TimeGrid& grid,
                                   const Encoding& enc, const ProductBasis& basis) {
  return choi_from_evolution(h, c, grid, enc.isometry(basis));
}

}  // namespace tocq
