#pragma once

// Transmon lattices under parametric frequency modulation.
//
// All model Hamiltonians are built on a ProductBasis (full tensor product or
// truncated by total excitation number) and expressed in a rotating frame
//   |m> -> exp(-i theta_m(t)) |m>,
//   theta_m(t) = E_m t + n_j(m) Gamma [sin(nu t + phi(t)) - sin(phi0)] + rho_m t,
// where E_m are bare energies, j the driven transmon and rho_m an optional
// per-state frame offset (used to centre the logical detuning). The drive
// sideband factor exp(-i Gamma sin(...)) is expanded with Jacobi-Anger.

#include "tocq/error.hpp"
#include "tocq/numerics.hpp"
#include "tocq/toc_engine.hpp"

#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tocq {

struct TransmonSpec {
  double omega0 = 0.0;   // bare 0-1 frequency
  double alpha = 0.0;    // anharmonicity (positive)
  int levels = 3;
  double r_minus = 0.0;  // decay rate
  double r_z = 0.0;      // dephasing rate

  void validate() const {
    if (!(alpha > 0.0)) throw std::invalid_argument("TransmonSpec: alpha must be positive");
    if (levels < 3) throw std::invalid_argument("TransmonSpec: at least 3 levels required");
    if (r_minus < 0.0 || r_z < 0.0) throw std::invalid_argument("TransmonSpec: rates must be >= 0");
  }

  /// Energy of the Fock level n.
  double level_energy(int n) const { return omega0 * n - 0.5 * alpha * n * (n - 1); }
};

class LatticeSpec {
 public:
  LatticeSpec() = default;
  explicit LatticeSpec(std::vector<TransmonSpec> transmons) : transmons_(std::move(transmons)) {
    for (const auto& t : transmons_) t.validate();
  }

  void set_coupling(int i, int j, double g) {
    if (i == j || i < 0 || j < 0 || i >= size() || j >= size())
      throw std::invalid_argument("LatticeSpec: bad coupling indices");
    if (!(g > 0.0)) throw std::invalid_argument("LatticeSpec: coupling must be positive");
    couplings_[key(i, j)] = g;
  }

  bool has_coupling(int i, int j) const { return couplings_.count(key(i, j)) != 0; }

  double coupling(int i, int j) const {
    const auto it = couplings_.find(key(i, j));
    if (it == couplings_.end())
      throw std::invalid_argument("LatticeSpec: no coupling between transmons " + std::to_string(i) +
                                  " and " + std::to_string(j));
    return it->second;
  }

  /// Delta_ij = omega_i0 - omega_j0
  double detuning(int i, int j) const { return transmons_.at(i).omega0 - transmons_.at(j).omega0; }

  int size() const { return static_cast<int>(transmons_.size()); }
  const TransmonSpec& transmon(int k) const { return transmons_.at(k); }
  TransmonSpec& transmon(int k) { return transmons_.at(k); }
  const std::vector<TransmonSpec>& transmons() const { return transmons_; }
  const std::map<std::pair<int, int>, double>& couplings() const { return couplings_; }

  /// The two-transmon lattice (i, j) in that order, keeping g_ij.
  LatticeSpec pair(int i, int j) const {
    LatticeSpec out({transmons_.at(i), transmons_.at(j)});
    out.set_coupling(0, 1, coupling(i, j));
    return out;
  }

 private:
  static std::pair<int, int> key(int i, int j) { return i < j ? std::pair{i, j} : std::pair{j, i}; }

  std::vector<TransmonSpec> transmons_;
  std::map<std::pair<int, int>, double> couplings_;
};

/// omega_j(t) = omega_j0 + epsilon cos(nu t + phi0 + eta t)
struct DriveSpec {
  int target = 0;
  double epsilon = 0.0;
  double nu = 0.0;
  double phi0 = 0.0;
  double eta = 0.0;

  /// Modulation index Gamma = epsilon / (nu + eta); constant for a linear phase.
  double gamma() const { return epsilon / (nu + eta); }
  double phase(double t) const { return (nu + eta) * t + phi0; }

  static DriveSpec from_gamma(int target, double gamma, double nu, double phi0, double eta) {
    return {target, gamma * (nu + eta), nu, phi0, eta};
  }

  /// Only meaningful for drives specified by epsilon: Gamma = epsilon / (nu + eta)
  /// then depends on the pulse, which is trusted for |eta| < 0.2 nu.
  void validate_epsilon_form() const {
    validate();
    if (!(std::abs(eta) < 0.2 * nu))
      throw std::invalid_argument("DriveSpec: |eta| must stay below 0.2 nu when the drive is set by epsilon");
  }

  void validate() const {
    if (!(epsilon >= 0.0)) throw std::invalid_argument("DriveSpec: epsilon must be >= 0");
    if (!(nu > 0.0)) throw std::invalid_argument("DriveSpec: nu must be positive");
    if (!(std::abs(eta) < nu)) throw std::invalid_argument("DriveSpec: |eta| must stay below nu");
    if (!std::isfinite(gamma())) throw std::invalid_argument("DriveSpec: modulation index not finite");
  }
};

using Occupation = std::vector<int>;

/// Product Fock basis of n transmons, ordered like the Kronecker product
/// (first transmon most significant), optionally truncated to total
/// excitation number <= max_excitation.
class ProductBasis {
 public:
  static ProductBasis full(int n_transmons, int levels = 3) { return ProductBasis(n_transmons, levels, -1); }
  static ProductBasis truncated(int n_transmons, int max_excitation, int levels = 3) {
    if (max_excitation < 0) throw std::invalid_argument("ProductBasis: negative excitation cap");
    return ProductBasis(n_transmons, levels, max_excitation);
  }

  Eigen::Index dim() const { return static_cast<Eigen::Index>(states_.size()); }
  int n_transmons() const { return n_; }
  int levels() const { return levels_; }
  bool is_full() const { return cap_ < 0; }
  const Occupation& state(Eigen::Index k) const { return states_.at(static_cast<std::size_t>(k)); }
  const std::vector<Occupation>& states() const { return states_; }

  std::optional<Eigen::Index> find(const Occupation& occ) const {
    if (static_cast<int>(occ.size()) != n_) return std::nullopt;
    const auto it = index_.find(code(occ));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  Eigen::Index index(const Occupation& occ) const {
    const auto k = find(occ);
    if (!k) throw std::invalid_argument("ProductBasis: state not in basis");
    return *k;
  }

  CVector ket(const Occupation& occ) const {
    CVector v = CVector::Zero(dim());
    v(index(occ)) = 1.0;
    return v;
  }

  int excitation(Eigen::Index k) const {
    int s = 0;
    for (int n : state(k)) s += n;
    return s;
  }

  /// Diagonal of b_k^dag b_k.
  Eigen::VectorXd number(int k) const {
    Eigen::VectorXd v(dim());
    for (Eigen::Index m = 0; m < dim(); ++m) v(m) = state(m).at(static_cast<std::size_t>(k));
    return v;
  }

 private:
  ProductBasis(int n, int levels, int cap) : n_(n), levels_(levels), cap_(cap) {
    if (n < 1 || levels < 2) throw std::invalid_argument("ProductBasis: bad shape");
    Occupation occ(static_cast<std::size_t>(n), 0);
    long total = 1;
    for (int k = 0; k < n; ++k) total *= levels;
    for (long c = 0; c < total; ++c) {
      long rest = c;
      int sum = 0;
      for (int k = n - 1; k >= 0; --k) {
        occ[static_cast<std::size_t>(k)] = static_cast<int>(rest % levels);
        sum += occ[static_cast<std::size_t>(k)];
        rest /= levels;
      }
      if (cap >= 0 && sum > cap) continue;
      index_[c] = static_cast<Eigen::Index>(states_.size());
      states_.push_back(occ);
    }
  }

  long code(const Occupation& occ) const {
    long c = 0;
    for (int v : occ) {
      if (v < 0 || v >= levels_) return -1;
      c = c * levels_ + v;
    }
    return c;
  }

  int n_;
  int levels_;
  int cap_;
  std::vector<Occupation> states_;
  std::map<long, Eigen::Index> index_;
};

enum class EncodingKind { S1, S2 };

/// Single-excitation encodings. S1 = {|10>, |01>}; S2 = {|1010>, |1001>,
/// |0110>, |0101>} (transmon order T1 T2 T3 T4) with auxiliary |0200>.
struct Encoding {
  EncodingKind kind;
  std::vector<Occupation> kets;
  std::optional<Occupation> aux;

  static Encoding s1() { return {EncodingKind::S1, {{1, 0}, {0, 1}}, std::nullopt}; }
  static Encoding s2() {
    return {EncodingKind::S2, {{1, 0, 1, 0}, {1, 0, 0, 1}, {0, 1, 1, 0}, {0, 1, 0, 1}}, Occupation{0, 2, 0, 0}};
  }

  Eigen::Index dim() const { return static_cast<Eigen::Index>(kets.size()); }
  int n_transmons() const { return static_cast<int>(kets.front().size()); }
  /// Smallest excitation cap that contains every logical and auxiliary ket.
  int max_excitation() const { return kind == EncodingKind::S1 ? 1 : 2; }

  /// Columns are the logical kets embedded in the basis.
  CMatrix isometry(const ProductBasis& basis) const {
    CMatrix v = CMatrix::Zero(basis.dim(), dim());
    for (Eigen::Index k = 0; k < dim(); ++k) v(basis.index(kets[static_cast<std::size_t>(k)]), k) = 1.0;
    return v;
  }
};

struct DriftSpec {
  double beta = 0.0;
  double omega_ref = 0.0;

  void validate() const {
    if (!(std::abs(beta) <= 0.5)) throw std::invalid_argument("DriftSpec: |beta| must be <= 0.5");
  }
};

/// Bare energy E_m = sum_k (omega_k n_k - alpha_k n_k (n_k - 1) / 2).
inline Eigen::VectorXd bare_energies(const LatticeSpec& lat, const ProductBasis& basis) {
  if (basis.n_transmons() != lat.size()) throw std::invalid_argument("bare_energies: basis/lattice mismatch");
  Eigen::VectorXd e = Eigen::VectorXd::Zero(basis.dim());
  for (Eigen::Index m = 0; m < basis.dim(); ++m)
    for (int k = 0; k < lat.size(); ++k) e(m) += lat.transmon(k).level_energy(basis.state(m)[static_cast<std::size_t>(k)]);
  return e;
}

/// One term of b_p^dag b_q restricted to the basis: amplitude |m><n|.
struct Hop {
  Eigen::Index m;
  Eigen::Index n;
  double amplitude;
};

/// Matrix elements of g (b_p^dag b_q) between basis states; the Hermitian
/// conjugate is implied.
inline std::vector<Hop> coupling_hops(const ProductBasis& basis, int p, int q, double g) {
  std::vector<Hop> hops;
  for (Eigen::Index n = 0; n < basis.dim(); ++n) {
    Occupation occ = basis.state(n);
    const int nq = occ[static_cast<std::size_t>(q)];
    const int np = occ[static_cast<std::size_t>(p)];
    if (nq < 1 || np + 1 >= basis.levels()) continue;
    occ[static_cast<std::size_t>(q)] -= 1;
    occ[static_cast<std::size_t>(p)] += 1;
    if (const auto m = basis.find(occ)) hops.push_back({*m, n, g * std::sqrt(double(nq)) * std::sqrt(double(np + 1))});
  }
  return hops;
}

/// Solves phi + sign * gamma * sin(phi) = target for phi in (-pi, pi]: the
/// drive phase whose sideband carries the requested effective phase after the
/// sin(phi0) reference offset of the accumulated modulation. For gamma > 1
/// there can be three roots; the one closest to the target is returned (the
/// branch connected to gamma -> 0).
inline double drive_phase_for(double target, double gamma, int sign) {
  const double y = canonical_angle(target);
  auto f = [&](double x) { return x + sign * gamma * std::sin(x) - y; };
  constexpr int kSamples = 720;
  double best = y, best_dist = std::numeric_limits<double>::infinity();
  double a = -kPi, fa = f(a);
  for (int i = 1; i <= kSamples; ++i) {
    const double b = -kPi + kTwoPi * i / kSamples;
    const double fb = f(b);
    if (fa == 0.0 || (fa < 0.0) != (fb < 0.0)) {
      double lo = a, hi = b;
      for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        ((f(mid) < 0.0) == (f(lo) < 0.0) ? lo : hi) = mid;
      }
      const double root = canonical_angle(0.5 * (lo + hi));
      const double dist = std::abs(canonical_angle(root - y));
      if (dist < best_dist) {
        best_dist = dist;
        best = root;
      }
    }
    a = b;
    fa = fb;
  }
  if (fa == 0.0 && std::abs(canonical_angle(a - y)) < best_dist) best = canonical_angle(a);
  return best;
}

/// Rotating-frame Hamiltonian of a modulated lattice (see file comment).
class RotatingFrameModel {
 public:
  RotatingFrameModel(const LatticeSpec& lat, ProductBasis basis, const DriveSpec& drive,
                     const std::vector<std::pair<int, int>>& pairs, int n_bessel)
      : basis_(std::move(basis)), drive_(drive), n_bessel_(n_bessel) {
    if (n_bessel < 1) throw std::invalid_argument("RotatingFrameModel: n_bessel must be >= 1");
    if (drive.target < 0 || drive.target >= lat.size())
      throw std::invalid_argument("RotatingFrameModel: drive target out of range");
    energies_ = bare_energies(lat, basis_);
    frame_ = Eigen::VectorXd::Zero(basis_.dim());
    extra_diag_ = Eigen::VectorXd::Zero(basis_.dim());
    const Eigen::VectorXd nj = basis_.number(drive.target);
    for (const auto& [p, q] : pairs) {
      const double g = lat.coupling(p, q);
      for (const Hop& h : coupling_hops(basis_, p, q, g))
        terms_.push_back({h.m, h.n, h.amplitude, static_cast<int>(nj(h.m) - nj(h.n))});
    }
    const double gamma = drive.gamma();
    bessel_.resize(2 * static_cast<std::size_t>(n_bessel) + 1);
    for (int n = -n_bessel; n <= n_bessel; ++n) bessel_[static_cast<std::size_t>(n + n_bessel)] = bessel_j(n, gamma);
    offset_ = std::exp(kI * gamma * std::sin(drive.phi0));
  }

  const ProductBasis& basis() const { return basis_; }
  Eigen::Index dim() const { return basis_.dim(); }
  const DriveSpec& drive() const { return drive_; }
  const Eigen::VectorXd& energies() const { return energies_; }

  /// Adds rho_m to the frame rotation of basis state m (diagonal becomes -rho_m).
  void set_frame_offset(const Occupation& occ, double rho) { frame_(basis_.index(occ)) = rho; }
  /// Extra static diagonal term (drift error).
  void add_diagonal(const Eigen::VectorXd& d) { extra_diag_ += d; }

  /// K(t) = sum_{|n| <= N} J_n(Gamma) exp(-i n (nu t + phi(t))) times exp(i Gamma sin phi0).
  Complex sideband(double t) const {
    const Complex w = std::exp(-kI * drive_.phase(t));
    const Complex wc = std::conj(w);
    Complex sum = bessel_[static_cast<std::size_t>(n_bessel_)];
    Complex up = 1.0, down = 1.0;
    for (int n = 1; n <= n_bessel_; ++n) {
      up *= w;
      down *= wc;
      sum += bessel_[static_cast<std::size_t>(n_bessel_ + n)] * up + bessel_[static_cast<std::size_t>(n_bessel_ - n)] * down;
    }
    return sum * offset_;
  }

  void fill(double t, SparseHermitian& h) const {
    if (h.dim() != dim()) h = SparseHermitian(dim());
    h.diag = extra_diag_ - frame_;
    h.entries.resize(terms_.size());
    const Complex k = sideband(t);
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      const Term& term = terms_[i];
      const Complex factor = term.d == 0 ? Complex(1.0) : (term.d < 0 ? k : std::conj(k));
      const double w = energies_(term.m) - energies_(term.n) + frame_(term.m) - frame_(term.n);
      h.entries[i] = {term.m, term.n, term.amplitude * factor * std::exp(kI * (w * t))};
    }
  }

  SparseHermitian at(double t) const {
    SparseHermitian h(dim());
    fill(t, h);
    return h;
  }

  CMatrix dense(double t) const { return at(t).dense(); }

 private:
  struct Term {
    Eigen::Index m;
    Eigen::Index n;
    double amplitude;
    int d;  // change of the driven transmon's occupation, m relative to n
  };

  ProductBasis basis_;
  DriveSpec drive_;
  int n_bessel_;
  Eigen::VectorXd energies_;
  Eigen::VectorXd frame_;
  Eigen::VectorXd extra_diag_;
  std::vector<Term> terms_;
  std::vector<double> bessel_;
  Complex offset_;
};

// ---- two-transmon pair -------------------------------------------------------

namespace detail {

inline std::pair<LatticeSpec, DriveSpec> pair_with_drive(const LatticeSpec& lat, int i, int j, const DriveSpec& drive) {
  if (drive.target != i && drive.target != j) throw std::invalid_argument("pair: drive must act on i or j");
  DriveSpec d = drive;
  d.target = drive.target == i ? 0 : 1;
  return {lat.pair(i, j), d};
}

}  // namespace detail

/// Lab-frame H0_ij(t) on the 9-dim pair space (order i, j) with the driven
/// transmon's frequency modulated.
inline CMatrix pair_lab_hamiltonian(const LatticeSpec& lat, int i, int j, const DriveSpec& drive, double t) {
  const auto [pair, d] = detail::pair_with_drive(lat, i, j, drive);
  const ProductBasis basis = ProductBasis::full(2);
  CMatrix h = bare_energies(pair, basis).cast<Complex>().asDiagonal();
  const double shift = drive.epsilon * std::cos(d.phase(t));
  const Eigen::VectorXd nj = basis.number(d.target);
  for (Eigen::Index m = 0; m < basis.dim(); ++m) h(m, m) += nj(m) * shift;
  for (const Hop& hop : coupling_hops(basis, 0, 1, pair.coupling(0, 1))) {
    h(hop.m, hop.n) += hop.amplitude;
    h(hop.n, hop.m) += hop.amplitude;
  }
  return h;
}

/// Diagonal U^I(t) = exp(-i theta_m(t)) with the modulation phase integrated
/// analytically; U^I(0) = I.
inline CMatrix interaction_frame_unitary(const LatticeSpec& lat, int i, int j, const DriveSpec& drive, double t) {
  const auto [pair, d] = detail::pair_with_drive(lat, i, j, drive);
  const ProductBasis basis = ProductBasis::full(2);
  const Eigen::VectorXd e = bare_energies(pair, basis);
  const Eigen::VectorXd nj = basis.number(d.target);
  const double mod = d.gamma() * (std::sin(d.phase(t)) - std::sin(d.phi0));
  CMatrix u = CMatrix::Zero(basis.dim(), basis.dim());
  for (Eigen::Index m = 0; m < basis.dim(); ++m) u(m, m) = std::exp(-kI * (e(m) * t + nj(m) * mod));
  return u;
}

inline RotatingFrameModel pair_interaction_model(const LatticeSpec& lat, int i, int j, const DriveSpec& drive,
                                                 int n_bessel, const ProductBasis& basis = ProductBasis::full(2)) {
  const auto [pair, d] = detail::pair_with_drive(lat, i, j, drive);
  return RotatingFrameModel(pair, basis, d, {{0, 1}}, n_bessel);
}

/// H^I_ij(t) with the sideband series truncated to |n| <= n_bessel.
inline CMatrix interaction_hamiltonian_pair(const LatticeSpec& lat, int i, int j, const DriveSpec& drive, double t,
                                            int n_bessel) {
  return pair_interaction_model(lat, i, j, drive, n_bessel).dense(t);
}

/// Single logical qubit on S1 = {|10>, |01>} of transmons (0, 1), drive on
/// transmon 1, rotating at -delta/2 and +delta/2 on the logical kets so that
/// the logical block carries (delta/2) sigma_z.
inline RotatingFrameModel single_qubit_model(const LatticeSpec& lat, const DriveSpec& drive, double delta, int n_bessel,
                                             const ProductBasis& basis = ProductBasis::full(2),
                                             std::optional<DriftSpec> drift = std::nullopt) {
  if (lat.size() != 2) throw std::invalid_argument("single_qubit_model: expects a 2-transmon lattice");
  RotatingFrameModel model(lat, basis, drive, {{0, 1}}, n_bessel);
  model.set_frame_offset({1, 0}, -0.5 * delta);
  model.set_frame_offset({0, 1}, 0.5 * delta);
  if (drift) {
    drift->validate();
    model.add_diagonal(drift->beta * drift->omega_ref * (basis.number(0) - basis.number(1)));
  }
  return model;
}

inline CMatrix rotating_frame_hamiltonian_single(const LatticeSpec& lat, const DriveSpec& drive, double t, double delta,
                                                 int n_bessel) {
  return single_qubit_model(lat, drive, delta, n_bessel).dense(t);
}

/// Two logical qubits on S2 (transmons T1..T4 as indices 0..3), drive on T2
/// (index 1), |11>_L = |0101> and |a> = |0200> rotated so that the (|a>, |11>_L)
/// block carries (delta2/2) sigma_z. Spectators add couplings (0,1) and (2,3).
inline RotatingFrameModel cp_model(const LatticeSpec& lat4, const DriveSpec& drive, double delta2, int n_bessel,
                                   bool include_spectators, const ProductBasis& basis = ProductBasis::full(4)) {
  if (lat4.size() != 4) throw std::invalid_argument("cp_model: expects a 4-transmon lattice");
  if (drive.target != 1) throw std::invalid_argument("cp_model: drive must act on T2");
  std::vector<std::pair<int, int>> pairs{{1, 3}};
  if (include_spectators) {
    pairs.emplace_back(0, 1);
    pairs.emplace_back(2, 3);
  }
  RotatingFrameModel model(lat4, basis, drive, pairs, n_bessel);
  model.set_frame_offset({0, 2, 0, 0}, -0.5 * delta2);
  model.set_frame_offset({0, 1, 0, 1}, 0.5 * delta2);
  return model;
}

inline CMatrix cp_interaction_hamiltonian(const LatticeSpec& lat4, const DriveSpec& drive, double t, double delta2,
                                          int n_bessel, bool include_spectators) {
  return cp_model(lat4, drive, delta2, n_bessel, include_spectators).dense(t);
}

/// beta Omega (n_1 - n_2) on the full pair space.
inline CMatrix drift_perturbation(const DriftSpec& d) {
  d.validate();
  const ProductBasis basis = ProductBasis::full(2);
  return (d.beta * d.omega_ref * (basis.number(0) - basis.number(1))).cast<Complex>().asDiagonal();
}

inline CMatrix logical_projector(const Encoding& enc, const ProductBasis& basis, bool include_aux = false) {
  CMatrix v = enc.isometry(basis);
  CMatrix p = v * v.adjoint();
  if (include_aux && enc.aux) p(basis.index(*enc.aux), basis.index(*enc.aux)) = 1.0;
  return p;
}

inline CMatrix logical_projector(const Encoding& enc, bool include_aux = false) {
  return logical_projector(enc, ProductBasis::full(enc.n_transmons()), include_aux);
}

// ---- effective two-level reductions --------------------------------------------

/// Logical Rabi frequency of S1: Omega = 2 g J_1(Gamma).
inline double effective_rabi_single(double g, double gamma) { return 2.0 * g * bessel_j(1, gamma); }

/// |11>_L <-> |a> Rabi frequency: the |11><02| element carries sqrt(2) g, so
/// Omega = 2 sqrt(2) g J_1(Gamma').
inline double effective_rabi_cp(double g, double gamma) { return 2.0 * std::sqrt(2.0) * g * bessel_j(1, gamma); }

inline PulseSpec effective_pulse_single(double g, double gamma, double delta, double eta, double phi0, double tau) {
  if (!(gamma > 0.0 && gamma <= 2.5)) throw std::invalid_argument("effective_pulse_single: Gamma must be in (0, 2.5]");
  return {effective_rabi_single(g, gamma), delta, eta, phi0, tau};
}

/// nu = Delta_12 - delta
inline double single_qubit_resonance(double delta12, double delta) { return delta12 - delta; }
/// nu = Delta_24 - alpha_2 - delta_2
inline double cp_resonance(double delta24, double alpha2, double delta2) { return delta24 - alpha2 - delta2; }

/// Modulation on transmon 1 of a pair realising the effective pulse p on S1.
inline DriveSpec single_qubit_drive(const LatticeSpec& lat, const PulseSpec& p, double gamma) {
  const double nu = single_qubit_resonance(lat.detuning(0, 1), p.delta());
  DriveSpec d = DriveSpec::from_gamma(1, gamma, nu, drive_phase_for(p.phi0(), gamma, -1), p.eta());
  d.validate();
  return d;
}

/// Modulation on T2 realising the effective pulse p on (|a>, |11>_L). The
/// resonant sideband is J_{-1} = -J_1, hence the extra pi.
inline DriveSpec cp_drive(const LatticeSpec& lat4, const PulseSpec& p, double gamma) {
  const double nu = cp_resonance(lat4.detuning(1, 3), lat4.transmon(1).alpha, p.delta());
  DriveSpec d = DriveSpec::from_gamma(1, gamma, nu, drive_phase_for(p.phi0() - kPi, gamma, +1), p.eta());
  d.validate();
  return d;
}

}  // namespace tocq
