#pragma once

#include "tocq/numerics.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tocq {

enum class GateKind { S, T, H, CP };

inline std::string_view to_string(GateKind k) {
  switch (k) {
    case GateKind::S: return "S";
    case GateKind::T: return "T";
    case GateKind::H: return "H";
    case GateKind::CP: return "CP";
  }
  return "?";
}

inline GateKind parse_gate_kind(std::string_view s) {
  if (s == "S" || s == "s") return GateKind::S;
  if (s == "T" || s == "t") return GateKind::T;
  if (s == "H" || s == "h") return GateKind::H;
  if (s == "CP" || s == "cp") return GateKind::CP;
  throw std::invalid_argument("unknown gate '" + std::string(s) + "' (expected S, T, H or CP)");
}

/// Square time-optimal pulse: constant amplitude and detuning, drive phase
/// linear in time, phi(t) = phi0 + eta t.
class PulseSpec {
 public:
  PulseSpec(double omega, double delta, double eta, double phi0, double tau)
      : omega_(omega), delta_(delta), eta_(eta), phi0_(phi0), tau_(tau) {
    if (!(omega > 0.0) || !std::isfinite(omega))
      throw std::invalid_argument("PulseSpec: drive amplitude must be positive");
    if (!(tau > 0.0) || !std::isfinite(tau))
      throw std::invalid_argument("PulseSpec: duration must be positive");
    if (!std::isfinite(delta) || !std::isfinite(eta) || !std::isfinite(phi0))
      throw std::invalid_argument("PulseSpec: non-finite parameter");
  }

  double omega() const { return omega_; }
  double delta() const { return delta_; }
  double eta() const { return eta_; }
  double phi0() const { return phi0_; }
  double tau() const { return tau_; }

  double phase(double t) const { return phi0_ + eta_ * t; }
  /// chi = arccot((eta - delta) / omega), in (0, pi).
  double chi() const { return std::atan2(omega_, eta_ - delta_); }
  /// Lagrange constant c = cot chi of the brachistochrone solution.
  double lagrange_constant() const { return (eta_ - delta_) / omega_; }
  double phi_minus() const { return 0.5 * eta_ * tau_; }
  double phi_plus() const { return phi0_ + 0.5 * eta_ * tau_; }
  /// Closed-form rotation angle gamma' = Omega tau / (2 sin chi).
  double gamma_prime() const { return 0.5 * std::hypot(omega_, eta_ - delta_) * tau_; }

  PulseSpec truncated(double t) const { return {omega_, delta_, eta_, phi0_, t}; }

 private:
  double omega_, delta_, eta_, phi0_, tau_;
};

/// Target gate parameters: U = diag(e^{-i phi-}, e^{i phi-}) U_g(gamma', chi, phi0).
class GateTarget {
 public:
  GateTarget(double gamma_prime, double chi, double phi_minus, double phi0)
      : gamma_prime_(wrap_rotation(gamma_prime)),
        chi_(chi),
        phi_minus_(canonical_angle(phi_minus)),
        phi0_(canonical_angle(phi0)) {
    if (!(chi > 0.0 && chi < kPi)) throw std::invalid_argument("GateTarget: chi must lie in (0, pi)");
  }

  static GateTarget hadamard() { return {kPi / 2, kPi / 4, kPi, kPi}; }
  static GateTarget s_gate() { return {kPi, kPi / 2, -3 * kPi / 4, 0.0}; }
  static GateTarget t_gate() { return {kPi, kPi / 2, -7 * kPi / 8, 0.0}; }
  /// Conditional phase gamma on the |11> partner of a full Rabi loop.
  static GateTarget conditional_phase(double gamma) { return {kPi, kPi / 2, gamma - kPi, 0.0}; }

  double gamma_prime() const { return gamma_prime_; }
  double chi() const { return chi_; }
  double phi_minus() const { return phi_minus_; }
  double phi0() const { return phi0_; }

  /// True when sin(gamma') = 0, i.e. the unitary does not depend on chi.
  bool chi_free() const { return std::abs(std::sin(gamma_prime_)) < 1e-12; }

  CMatrix unitary() const {
    const double cg = std::cos(gamma_prime_), sg = std::sin(gamma_prime_);
    const double cc = std::cos(chi_), sc = std::sin(chi_);
    CMatrix ug(2, 2);
    ug << cg + kI * sg * cc, -kI * sg * sc * std::exp(-kI * phi0_),
        -kI * sg * sc * std::exp(kI * phi0_), cg - kI * sg * cc;
    CMatrix d = CMatrix::Zero(2, 2);
    d(0, 0) = std::exp(-kI * phi_minus_);
    d(1, 1) = std::exp(kI * phi_minus_);
    return d * ug;
  }

 private:
  static double wrap_rotation(double g) {
    double r = std::fmod(g, kTwoPi);
    if (r <= 0.0) r += kTwoPi;
    return r;
  }

  double gamma_prime_, chi_, phi_minus_, phi0_;
};

inline GateTarget standard_target(GateKind k) {
  switch (k) {
    case GateKind::S: return GateTarget::s_gate();
    case GateKind::T: return GateTarget::t_gate();
    case GateKind::H: return GateTarget::hadamard();
    case GateKind::CP: return GateTarget::conditional_phase(kPi / 2);
  }
  throw std::invalid_argument("standard_target: unknown gate");
}

/// H(t) = 1/2 [[delta, Omega e^{-i phi}], [Omega e^{i phi}, -delta]].
inline CMatrix two_level_hamiltonian(const PulseSpec& p, double t) {
  if (t < -1e-12 || t > p.tau() + 1e-12)
    throw std::invalid_argument("two_level_hamiltonian: t outside [0, tau]");
  const Complex off = 0.5 * p.omega() * std::exp(-kI * p.phase(t));
  CMatrix h(2, 2);
  h << 0.5 * p.delta(), off, std::conj(off), -0.5 * p.delta();
  return h;
}

/// Closed-form evolution operator U(t) of a square TOC pulse, valid for any
/// 0 <= t <= tau. U(0) = I.
inline CMatrix ideal_evolution_at(const PulseSpec& p, double t) {
  if (t <= 0.0) return CMatrix::Identity(2, 2);
  const double chi = p.chi();
  const double gp = 0.5 * std::hypot(p.omega(), p.eta() - p.delta()) * t;
  const double pm = 0.5 * p.eta() * t;
  const double pp = p.phi0() + pm;
  const double cg = std::cos(gp), sg = std::sin(gp);
  const double cc = std::cos(chi), sc = std::sin(chi);
  CMatrix u(2, 2);
  u << (cg + kI * sg * cc) * std::exp(-kI * pm), kI * sg * sc * std::exp(-kI * (pp - kPi)),
      kI * sg * sc * std::exp(kI * (pp - kPi)), (cg - kI * sg * cc) * std::exp(kI * pm);
  return u;
}

inline CMatrix ideal_evolution(const PulseSpec& p) { return ideal_evolution_at(p, p.tau()); }

/// Dressed-state angles sampled on a grid; gamma is the accumulated overall phase.
struct AuxiliaryTrajectory {
  std::vector<double> times;
  std::vector<double> chi;
  std::vector<double> xi;
  std::vector<double> gamma;
};

/// Closed-form TOC trajectory: chi constant, xi(t) = phi(t) - pi.
inline AuxiliaryTrajectory design_trajectory(const PulseSpec& p, const TimeGrid& grid) {
  AuxiliaryTrajectory tr;
  const double chi = p.chi();
  for (std::size_t k = 0; k <= grid.n_steps; ++k) {
    const double t = grid.at(k);
    tr.times.push_back(t);
    tr.chi.push_back(chi);
    tr.xi.push_back(p.phase(t) - kPi);
    tr.gamma.push_back(0.5 * std::hypot(p.omega(), p.eta() - p.delta()) * t - 0.5 * p.eta() * t);
  }
  return tr;
}

namespace detail {

// Integrand of the overall phase, (2 xi' sin^2(chi/2) - delta) / (2 cos chi).
inline double phase_integrand(const PulseSpec& p, double chi, double xi_dot) {
  const double s = std::sin(0.5 * chi);
  return (2.0 * xi_dot * s * s - p.delta()) / (2.0 * std::cos(chi));
}

inline double xi_rate(const PulseSpec& p, double t, double chi, double xi) {
  return p.delta() - p.omega() * std::cos(p.phase(t) - xi) / std::tan(chi);
}

}  // namespace detail

/// Integrates the invariant equations chi' = Omega sin(phi - xi),
/// xi' = delta - Omega cot(chi) cos(phi - xi) from the pulse's initial dressed
/// state, accumulating the overall phase with Simpson's rule per step.
inline AuxiliaryTrajectory integrate_trajectory(const PulseSpec& p, const TimeGrid& grid) {
  using State = Eigen::Vector2d;
  auto rhs = [&p](double t, const State& y) {
    State d;
    d(0) = p.omega() * std::sin(p.phase(t) - y(1));
    d(1) = detail::xi_rate(p, t, y(0), y(1));
    return d;
  };
  AuxiliaryTrajectory tr;
  State y(p.chi(), p.phi0() - kPi);
  double gamma = 0.0;
  tr.times.push_back(grid.t0);
  tr.chi.push_back(y(0));
  tr.xi.push_back(y(1));
  tr.gamma.push_back(0.0);
  for (std::size_t k = 0; k < grid.n_steps; ++k) {
    const double t = grid.at(k);
    const State mid = rk4_step(rhs, y, t, 0.5 * grid.dt);
    const State next = rk4_step(rhs, y, t, grid.dt);
    auto f = [&](double tt, const State& s) {
      return detail::phase_integrand(p, s(0), detail::xi_rate(p, tt, s(0), s(1)));
    };
    gamma += grid.dt / 6.0 * (f(t, y) + 4.0 * f(t + 0.5 * grid.dt, mid) + f(t + grid.dt, next));
    y = next;
    tr.times.push_back(grid.at(k + 1));
    tr.chi.push_back(y(0));
    tr.xi.push_back(y(1));
    tr.gamma.push_back(gamma);
  }
  return tr;
}

/// Overall phase gamma(tau) by quadrature along the integrated dressed-state
/// trajectory. gamma(tau) + phi- equals the closed-form gamma'. When cos chi
/// vanishes the integrand is 0/0 and the resonant limit gamma' = Omega tau / 2
/// is returned in its place.
inline double overall_phase(const PulseSpec& p, std::size_t steps = 2000) {
  if (std::abs(std::cos(p.chi())) < 1e-9) return 0.5 * p.omega() * p.tau() - p.phi_minus();
  const TimeGrid grid = TimeGrid::covering(0.0, p.tau(), p.tau() / static_cast<double>(steps));
  return integrate_trajectory(p, grid).gamma.back();
}

/// Lewis-Riesenfeld invariant with mu = 1.
inline CMatrix invariant_operator(double chi, double xi) {
  CMatrix m(2, 2);
  m << std::cos(chi), std::sin(chi) * std::exp(-kI * xi), std::sin(chi) * std::exp(kI * xi),
      -std::cos(chi);
  return 0.5 * m;
}

/// max_t || i dI/dt - [H(t), I(t)] ||_max, with I built from the given dressed
/// trajectory and H from the pulse. Angle rates come from a five-point stencil
/// on the sampled trajectory; dI/dt follows by the chain rule.
inline double invariant_residual(const PulseSpec& p, const AuxiliaryTrajectory& tr) {
  const std::size_t n = tr.times.size();
  if (n < 5) throw std::invalid_argument("invariant_residual: need at least 5 samples");
  const double h = tr.times[1] - tr.times[0];
  auto deriv = [&](const std::vector<double>& v, std::size_t k) {
    std::size_t c = std::clamp<std::size_t>(k, 2, n - 3);
    const double s = static_cast<double>(k) - static_cast<double>(c);
    // derivative of the degree-4 interpolant through v[c-2..c+2] at offset s
    const double x[5] = {-2, -1, 0, 1, 2};
    double d = 0.0;
    for (int i = 0; i < 5; ++i) {
      double wsum = 0.0;
      for (int j = 0; j < 5; ++j) {
        if (j == i) continue;
        double prod = 1.0 / (x[i] - x[j]);
        for (int m = 0; m < 5; ++m)
          if (m != i && m != j) prod *= (s - x[m]) / (x[i] - x[m]);
        wsum += prod;
      }
      d += wsum * v[c - 2 + static_cast<std::size_t>(i)];
    }
    return d / h;
  };
  double worst = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double chi = tr.chi[k], xi = tr.xi[k];
    const double chi_dot = deriv(tr.chi, k), xi_dot = deriv(tr.xi, k);
    CMatrix d_chi(2, 2), d_xi(2, 2);
    d_chi << -std::sin(chi), std::cos(chi) * std::exp(-kI * xi), std::cos(chi) * std::exp(kI * xi),
        std::sin(chi);
    d_xi << 0.0, -kI * std::sin(chi) * std::exp(-kI * xi), kI * std::sin(chi) * std::exp(kI * xi), 0.0;
    const CMatrix i_dot = 0.5 * (chi_dot * d_chi + xi_dot * d_xi);
    const CMatrix inv = invariant_operator(chi, xi);
    const double t = std::clamp(tr.times[k], 0.0, p.tau());
    const CMatrix h_t = two_level_hamiltonian(p, t);
    worst = std::max(worst, max_abs(kI * i_dot - (h_t * inv - inv * h_t)));
  }
  return worst;
}

inline double invariant_residual(const PulseSpec& p, const TimeGrid& grid) {
  return invariant_residual(p, design_trajectory(p, grid));
}

/// Phase-maximised overlap |Tr(U^dag V)| / d.
inline double unitary_overlap(const CMatrix& u, const CMatrix& v) {
  return std::abs((u.adjoint() * v).trace()) / static_cast<double>(u.rows());
}

/// Detunings compatible with a chi-fixed target: delta_k = 2(phi- + k pi)/tau - Omega cot chi.
inline std::vector<double> admissible_detunings(const GateTarget& target, double omega, int k_min = -3,
                                                int k_max = 3) {
  const double tau = 2.0 * target.gamma_prime() * std::sin(target.chi()) / omega;
  std::vector<double> out;
  for (int k = k_min; k <= k_max; ++k)
    out.push_back(2.0 * (target.phi_minus() + kPi * k) / tau - omega / std::tan(target.chi()));
  return out;
}

/// Solves for a minimal-time square pulse realising the target (up to global
/// phase) at drive amplitude omega.
///
/// If the target fixes chi, tau = 2 gamma' sin chi / Omega and the detuning is
/// restricted to the discrete family admissible_detunings(); a requested delta
/// within 1e-3 Omega of a family member snaps to it, otherwise the call fails.
/// Without a requested delta the smallest non-negative member is used.
///
/// If sin gamma' = 0 the target is chi-independent; chi is then solved from
/// the winding condition eta tau = 2(phi- + k pi) for each branch k and the
/// branch with the smallest tau wins. A detuning is required in this case.
inline PulseSpec synthesize(const GateTarget& target, double omega, std::optional<double> delta = {}) {
  if (!(omega > 0.0)) throw std::invalid_argument("synthesize: omega must be positive");
  const double gp = target.gamma_prime();

  if (!target.chi_free()) {
    const double chi = target.chi();
    const double tau = 2.0 * gp * std::sin(chi) / omega;
    const auto family = admissible_detunings(target, omega, -64, 64);
    double chosen = std::numeric_limits<double>::quiet_NaN();
    if (delta) {
      double best = std::numeric_limits<double>::infinity();
      for (double d : family)
        if (std::abs(d - *delta) < std::abs(best - *delta)) best = d;
      if (std::abs(best - *delta) > 1e-3 * omega) {
        std::ostringstream msg;
        msg << "synthesize: detuning " << units::to_mhz(*delta)
            << " MHz is not admissible for this target; admissible values (MHz):";
        for (double d : admissible_detunings(target, omega)) msg << ' ' << units::to_mhz(d);
        throw std::invalid_argument(msg.str());
      }
      chosen = best;
    } else {
      double best = std::numeric_limits<double>::infinity();
      for (double d : family)
        if (d >= -1e-12 && d < best) best = d;
      chosen = best;
    }
    const double eta = chosen + omega / std::tan(chi);
    return {omega, chosen, eta, target.phi0(), tau};
  }

  if (!delta) throw std::invalid_argument("synthesize: a detuning is required when chi is free");
  const double x = *delta / omega;
  const double radius = std::sqrt(1.0 + x * x);
  const int k_lo = static_cast<int>(std::floor((-radius * gp - target.phi_minus()) / kPi)) - 1;
  const int k_hi = static_cast<int>(std::ceil((radius * gp - target.phi_minus()) / kPi)) + 1;
  double best_s = std::numeric_limits<double>::infinity();
  double best_c = 0.0;
  for (int k = k_lo; k <= k_hi; ++k) {
    const double m = (target.phi_minus() + kPi * k) / gp;
    const double disc = 1.0 + x * x - m * m;
    if (disc < 0.0) continue;
    for (double sign : {1.0, -1.0}) {
      const double s = (m * x + sign * std::sqrt(disc)) / (1.0 + x * x);
      if (s > 1e-12 && s <= 1.0 + 1e-12 && s < best_s) {
        best_s = std::min(s, 1.0);
        best_c = m - x * s;
      }
    }
  }
  if (!std::isfinite(best_s)) {
    std::ostringstream msg;
    msg << "synthesize: no pulse reaches this target at detuning " << units::to_mhz(*delta)
        << " MHz; admissible detunings: any real value for some winding, check gamma'";
    throw std::invalid_argument(msg.str());
  }
  const double tau = 2.0 * gp * best_s / omega;
  const double eta = *delta + omega * best_c / best_s;
  return {omega, *delta, eta, target.phi0(), tau};
}

/// Closed-form gate times. For CP, omega is the |11> <-> |a> Rabi amplitude and
/// gamma_cp the conditional phase in (0, 2 pi).
inline double gate_time(GateKind kind, double omega, double delta, double gamma_cp = kPi / 2) {
  if (!(omega > 0.0)) throw std::invalid_argument("gate_time: omega must be positive");
  const double o2 = omega * omega, d2 = delta * delta;
  switch (kind) {
    case GateKind::S: return kPi / (2.0 * (o2 + d2)) * (std::sqrt(16.0 * d2 + 7.0 * o2) - 3.0 * delta);
    case GateKind::T: return kPi / (4.0 * (o2 + d2)) * (std::sqrt(64.0 * d2 + 15.0 * o2) - 7.0 * delta);
    case GateKind::H: return kPi / (std::sqrt(2.0) * omega);
    case GateKind::CP: {
      if (!(gamma_cp > 0.0 && gamma_cp < kTwoPi))
        throw std::invalid_argument("gate_time: conditional phase must lie in (0, 2 pi)");
      const double radicand = kPi * kPi * d2 - o2 * (gamma_cp * gamma_cp - kTwoPi * gamma_cp);
      if (radicand < 0.0) throw std::invalid_argument("gate_time: negative radicand, infeasible CP parameters");
      const double tau = 2.0 / (o2 + d2) * (delta * (gamma_cp - kPi) + std::sqrt(radicand));
      if (!(tau > 0.0)) throw std::invalid_argument("gate_time: non-positive CP gate time");
      return tau;
    }
  }
  throw std::invalid_argument("gate_time: unknown gate");
}

struct DetuningOptimum {
  double delta;
  double tau;
};

/// Minimises gate_time over [lo, hi]: 256-point scan, then golden-section
/// refinement inside the bracket around the best sample.
inline DetuningOptimum optimal_detuning(GateKind kind, double omega, double lo, double hi,
                                        double gamma_cp = kPi / 2) {
  if (!(hi >= lo)) throw std::invalid_argument("optimal_detuning: empty range");
  auto f = [&](double d) { return gate_time(kind, omega, d, gamma_cp); };
  constexpr int kScan = 256;
  const double step = (hi - lo) / (kScan - 1);
  int best = 0;
  double best_val = f(lo);
  for (int i = 1; i < kScan; ++i) {
    const double v = f(lo + step * i);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  double a = lo + step * std::max(0, best - 1);
  double b = lo + step * std::min(kScan - 1, best + 1);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 100 && (b - a) > 1e-12 * std::max(1.0, std::abs(b)); ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  const double mid = 0.5 * (a + b);
  DetuningOptimum out{mid, f(mid)};
  if (best_val < out.tau) out = {lo + step * best, best_val};
  return out;
}

}  // namespace tocq
