#pragma once

// Reproducible recipes: each one resolves a config into models, runs the
// master equation and returns tables ready for CSV output.

#include "tocq/config.hpp"
#include "tocq/device_model.hpp"
#include "tocq/lindblad.hpp"
#include "tocq/metrics.hpp"
#include "tocq/toc_engine.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <thread>

namespace tocq {

// ---- tables and output ------------------------------------------------------

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add(std::vector<double> row) {
    if (row.size() != columns.size()) throw std::logic_error("Table: row width mismatch");
    rows.push_back(std::move(row));
  }

  std::size_t column(const std::string& name) const {
    for (std::size_t k = 0; k < columns.size(); ++k)
      if (columns[k] == name) return k;
    throw std::out_of_range("Table: no column " + name);
  }
};

inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

inline void write_csv(std::ostream& os, const Table& t) {
  for (std::size_t k = 0; k < t.columns.size(); ++k) os << (k ? "," : "") << t.columns[k];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t k = 0; k < row.size(); ++k) os << (k ? "," : "") << format_number(row[k]);
    os << '\n';
  }
}

inline void write_csv(const std::string& path, const Table& t) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  write_csv(out, t);
}

/// Sidecar metadata written next to every CSV as <csv>.json.
struct RunMetadata {
  std::string recipe;
  Json config;
  Json axes = Json::object();
  Json results = Json::object();
  double wall_time_s = 0.0;

  Json to_json() const {
    return {{"recipe", recipe}, {"config_hash", config::hash(config)}, {"config", config},
            {"axes", axes},     {"results", results},                  {"wall_time_s", wall_time_s}};
  }
};

inline void write_sidecar(const std::string& csv_path, const RunMetadata& meta) {
  std::ofstream out(csv_path + ".json");
  if (!out) throw ConfigError("cannot write '" + csv_path + ".json'");
  out << meta.to_json().dump(2) << '\n';
}

// ---- worker pool ----------------------------------------------------------------

/// Runs fn(i) for i in [0, n) on `jobs` threads. Work items must be
/// independent; the first exception is rethrown after all workers stop.
template <class Fn>
void parallel_for(std::size_t n, int jobs, Fn&& fn) {
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(n, static_cast<std::size_t>(std::max(jobs, 1))));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
  if (n == 0) return {};
  if (n == 1) return {lo};
  std::vector<double> v(n);
  for (std::size_t k = 0; k < n; ++k) v[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
  return v;
}

// ---- single logical qubit ----------------------------------------------------------

struct SingleQubitSetup {
  LatticeSpec lattice;
  config::DriveRequest drive;
  std::map<GateKind, double> gate_delta;  // requested detunings (rad/ns)
  config::SimulationOptions sim;
};

inline SingleQubitSetup parse_single_qubit(const Json& root) {
  SingleQubitSetup s;
  const Json& device = config::require(root, "device", "");
  s.lattice = config::parse_lattice(device);
  if (s.lattice.size() != 2) throw ConfigError("device.transmons: the single-qubit recipes need exactly 2 transmons");
  if (!s.lattice.has_coupling(0, 1)) throw ConfigError("missing required field 'device.couplings' entry for pair [0, 1]");
  s.drive = config::parse_drive(device);
  if (s.drive.target != 1) throw ConfigError("device.drive.target must be 1 (the second transmon) for S1");
  if (root.contains("gates")) {
    for (auto kind : {GateKind::H, GateKind::S, GateKind::T}) {
      const std::string name(to_string(kind));
      if (root.at("gates").contains(name))
        s.gate_delta[kind] = units::mhz(config::number(root.at("gates").at(name), "delta_mhz", "gates." + name));
    }
  }
  s.sim = config::parse_simulation(root);
  return s;
}

/// Fully resolved single-qubit gate: effective pulse, physical drive and model.
struct SingleGate {
  GateKind kind;
  PulseSpec pulse;
  DriveSpec drive;
  double gamma_mod;
  ProductBasis basis;
  RotatingFrameModel model;
  CollapseSet collapse;
  TimeGrid grid;
  CMatrix target;
};

struct SingleGateOptions {
  std::optional<DriftSpec> drift;
};

inline SingleGate build_single_gate(const SingleQubitSetup& s, GateKind kind, const SingleGateOptions& opt = {}) {
  if (kind == GateKind::CP) throw std::invalid_argument("build_single_gate: CP is a two-qubit gate");
  const double g = s.lattice.coupling(0, 1);
  const GateTarget target = standard_target(kind);
  // With epsilon given, Gamma depends on nu + eta, which depend on the pulse;
  // iterate the fixed point (eta << nu, converges in a few rounds).
  double gamma = s.drive.gamma ? *s.drive.gamma : s.drive.epsilon.value() / single_qubit_resonance(s.lattice.detuning(0, 1), 0.0);
  std::optional<PulseSpec> pulse;
  for (int it = 0; it < 100; ++it) {
    const double omega = effective_rabi_single(g, gamma);
    std::optional<double> delta;
    if (auto f = s.gate_delta.find(kind); f != s.gate_delta.end()) delta = f->second;
    // the Hadamard detuning is forced by the target; a quoted value only
    // selects among admissible ones at the configured operating point
    if (kind == GateKind::H && delta) {
      const auto admissible = admissible_detunings(target, omega);
      bool near = false;
      for (double a : admissible) near = near || std::abs(a - *delta) <= 1e-3 * omega;
      if (!near) delta.reset();
    }
    pulse = synthesize(target, omega, delta);
    const double nu = s.drive.nu.value_or(single_qubit_resonance(s.lattice.detuning(0, 1), pulse->delta()));
    const double next = s.drive.resolve_gamma(nu, pulse->eta());
    if (std::abs(next - gamma) < 1e-14) break;
    gamma = next;
  }
  DriveSpec drive = single_qubit_drive(s.lattice, *pulse, gamma);
  if (s.drive.nu) drive = DriveSpec::from_gamma(1, gamma, *s.drive.nu, drive.phi0, drive.eta);
  if (s.drive.epsilon && !s.drive.gamma)
    drive.validate_epsilon_form();
  else
    drive.validate();
  ProductBasis basis = s.sim.full_basis ? ProductBasis::full(2) : ProductBasis::truncated(2, Encoding::s1().max_excitation());
  std::optional<DriftSpec> drift = opt.drift;
  RotatingFrameModel model = single_qubit_model(s.lattice, drive, pulse->delta(), s.sim.n_bessel, basis, drift);
  CollapseSet c = s.sim.decoherence ? collapse_operators(s.lattice, basis) : CollapseSet{};
  const TimeGrid grid = TimeGrid::covering(0.0, pulse->tau(), units::ps(s.sim.dt_ps));
  return {kind, *pulse, drive, gamma, basis, std::move(model), std::move(c), grid, ideal_evolution(*pulse)};
}

/// Choi-based average gate fidelity of the open-system gate at t = tau.
inline FidelityReport single_gate_fidelity(const SingleGate& gate) {
  const CMatrix v = Encoding::s1().isometry(gate.basis);
  const CMatrix choi = choi_from_evolution(hamiltonian_of(gate.model), gate.collapse, gate.grid, v);
  return avg_gate_fidelity_from_choi(choi, gate.target, 2);
}

inline FidelityReport single_gate_fidelity(const SingleQubitSetup& s, GateKind kind, const SingleGateOptions& opt = {}) {
  return single_gate_fidelity(build_single_gate(s, kind, opt));
}

struct DynamicsResult {
  Table table;
  FidelityReport final_fidelity;
  double trace_fidelity_fit = 0.0;  // trace formula on the leading-unitary fit
  double tau_ns = 0.0;
  PulseSpec pulse;
};

/// Initial state for the population traces: |0>_L for H, (|0>_L + |1>_L)/sqrt2
/// for the phase gates (which act trivially on basis kets).
inline CVector dynamics_initial_state(GateKind kind) {
  CVector psi(2);
  if (kind == GateKind::H)
    psi << 1.0, 0.0;
  else
    psi << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  return psi;
}

/// Columns t_ns, P0, P1, F with F the Choi-based gate fidelity against the
/// ideal evolution up to t.
inline DynamicsResult run_single_gate_dynamics(const SingleQubitSetup& s, GateKind kind) {
  const SingleGate gate = build_single_gate(s, kind);
  const CMatrix v = Encoding::s1().isometry(gate.basis);
  std::vector<CMatrix> states = choi_inputs(v);
  const CVector psi = v * dynamics_initial_state(kind);
  states.push_back(psi * psi.adjoint());
  const auto stride = static_cast<std::size_t>(std::max(1.0, std::round(s.sim.sample_ps / s.sim.dt_ps)));
  DynamicsResult r{{{"t_ns", "P0", "P1", "F"}, {}}, {}, 0.0, gate.pulse.tau(), gate.pulse};
  CMatrix final_choi;
  evolve_batch(states, hamiltonian_of(gate.model), gate.collapse, gate.grid, stride,
               [&](std::size_t, double t, const std::vector<CMatrix>& st) {
                 const std::vector<CMatrix> choi_part(st.begin(), st.begin() + 4);
                 const CMatrix choi = assemble_choi(choi_part, v);
                 const CMatrix& rho = st.back();
                 check_positive(rho, t, -1e-6, gate.grid.dt);
                 const FidelityReport f = avg_gate_fidelity_from_choi(choi, ideal_evolution_at(gate.pulse, t), 2);
                 const double p0 = rho(gate.basis.index({1, 0}), gate.basis.index({1, 0})).real();
                 const double p1 = rho(gate.basis.index({0, 1}), gate.basis.index({0, 1})).real();
                 r.table.add({t, p0, p1, f.value});
                 final_choi = choi;
               });
  r.final_fidelity = avg_gate_fidelity_from_choi(final_choi, gate.target, 2);
  r.trace_fidelity_fit = gate_fidelity_trace(gate.target, leading_unitary_fit(final_choi, 2)).value;
  return r;
}

/// Gate fidelity over (Delta_12, g_12); Omega, tau and nu follow each cell.
inline Table run_fidelity_sweep(const SingleQubitSetup& base, GateKind kind, const std::vector<double>& delta12_mhz,
                                const std::vector<double>& g12_mhz, int jobs = 1) {
  const std::size_t n1 = delta12_mhz.size(), n2 = g12_mhz.size();
  std::vector<double> values(n1 * n2, std::numeric_limits<double>::quiet_NaN());
  parallel_for(n1 * n2, jobs, [&](std::size_t i) {
    SingleQubitSetup s = base;
    const std::size_t a = i / n2, b = i % n2;
    s.lattice.transmon(0).omega0 = s.lattice.transmon(1).omega0 + units::mhz(delta12_mhz[a]);
    s.lattice.set_coupling(0, 1, units::mhz(g12_mhz[b]));
    values[i] = single_gate_fidelity(s, kind).value;
  });
  Table t{{"delta12_mhz", "g12_mhz", "F"}, {}};
  for (std::size_t i = 0; i < n1 * n2; ++i) t.add({delta12_mhz[i / n2], g12_mhz[i % n2], values[i]});
  return t;
}

/// F(beta) under the drift term beta Omega (n_1 - n_2).
inline Table run_drift_robustness(const SingleQubitSetup& s, GateKind kind, const std::vector<double>& betas, int jobs = 1) {
  std::vector<double> values(betas.size());
  const double omega = effective_rabi_single(s.lattice.coupling(0, 1), build_single_gate(s, kind).gamma_mod);
  parallel_for(betas.size(), jobs, [&](std::size_t i) {
    SingleGateOptions opt;
    opt.drift = DriftSpec{betas[i], omega};
    values[i] = single_gate_fidelity(s, kind, opt).value;
  });
  Table t{{"beta", "F"}, {}};
  for (std::size_t i = 0; i < betas.size(); ++i) t.add({betas[i], values[i]});
  return t;
}

/// Second-order (Bloch-Siegert) shift of |10> relative to |01> from the
/// off-resonant sidebands n != 1 of the logical coupling:
/// 2 sum_{n != 1} (g J_n)^2 / ((1 - n) nu).
inline double sideband_stark_shift(double g, double gamma, double nu, int n_bessel) {
  double s = 0.0;
  for (int n = -n_bessel; n <= n_bessel; ++n)
    if (n != 1) s += std::pow(g * bessel_j(n, gamma), 2) / ((1 - n) * nu);
  return 2.0 * s;
}

/// Drift at which the Bloch-Siegert shift is cancelled: the drift moves |10>
/// against |01> by 2 beta Omega, so the fidelity peaks near -shift / (2 Omega).
inline double predicted_drift_peak(const SingleQubitSetup& s, const SingleGate& gate) {
  const double shift = sideband_stark_shift(s.lattice.coupling(0, 1), gate.gamma_mod, gate.drive.nu + gate.drive.eta, s.sim.n_bessel);
  return -shift / (2.0 * gate.pulse.omega());
}

/// Vertex of the parabola through the best sample of a (beta, F) curve and its
/// neighbours; the sample itself when it sits on the boundary.
inline double parabolic_peak(const Table& curve) {
  const auto& r = curve.rows;
  std::size_t best = 0;
  for (std::size_t k = 1; k < r.size(); ++k)
    if (r[k][1] > r[best][1]) best = k;
  if (best == 0 || best + 1 == r.size()) return r[best][0];
  const double x0 = r[best - 1][0], x1 = r[best][0], x2 = r[best + 1][0];
  const double y0 = r[best - 1][1], y1 = r[best][1], y2 = r[best + 1][1];
  const double num = (x1 - x0) * (x1 - x0) * (y1 - y2) - (x1 - x2) * (x1 - x2) * (y1 - y0);
  const double den = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0);
  return den == 0.0 ? x1 : x1 - 0.5 * num / den;
}

/// Effective-vs-full RWA check: infidelity between the
/// ideal two-level gate and the unitary logical block of the full model.
inline double effective_vs_full_infidelity(const SingleQubitSetup& s, GateKind kind) {
  SingleQubitSetup closed = s;
  closed.sim.decoherence = false;
  closed.sim.full_basis = true;
  const SingleGate gate = build_single_gate(closed, kind);
  const CMatrix u = unitary_propagate(hamiltonian_of(gate.model), gate.grid, gate.basis.dim());
  const CMatrix v = Encoding::s1().isometry(gate.basis);
  const CMatrix block = v.adjoint() * u * v;
  return 1.0 - gate_fidelity_trace(gate.target, block).value;
}

/// Largest effective-vs-full gap over Delta_12 in [1, 1 + span] times the
/// configured value. The gap oscillates with nu tau under an envelope set by
/// g / Delta_12; the band covers at least one oscillation at the defaults.
inline double effective_vs_full_envelope(const SingleQubitSetup& s, GateKind kind, double scale = 1.0, int samples = 8,
                                         double span = 0.2) {
  const double base = scale * s.lattice.detuning(0, 1);
  double worst = 0.0;
  for (double f : linspace(1.0, 1.0 + span, static_cast<std::size_t>(samples))) {
    SingleQubitSetup shifted = s;
    shifted.lattice.transmon(0).omega0 = s.lattice.transmon(1).omega0 + f * base;
    worst = std::max(worst, effective_vs_full_infidelity(shifted, kind));
  }
  return worst;
}

// ---- CP gate -------------------------------------------------------------------

struct CpSetup {
  LatticeSpec lattice;
  config::DriveRequest drive;
  double delta2 = 0.0;
  double gamma = kPi / 2;
  config::SimulationOptions sim;
};

inline CpSetup parse_cp(const Json& root) {
  CpSetup s;
  const Json& device = config::require(root, "device", "");
  s.lattice = config::parse_lattice(device);
  if (s.lattice.size() != 4) throw ConfigError("device.transmons: the CP recipes need exactly 4 transmons");
  if (!s.lattice.has_coupling(1, 3)) throw ConfigError("missing required field 'device.couplings' entry for pair [1, 3]");
  s.drive = config::parse_drive(device);
  if (s.drive.target != 1) throw ConfigError("device.drive.target must be 1 (T2) for the CP gate");
  const Json& cp = config::require(root, "cp", "");
  s.delta2 = units::mhz(config::number(cp, "delta2_mhz", "cp"));
  s.gamma = config::number(cp, "gamma", "cp");
  if (!(s.gamma > 0.0 && s.gamma < kTwoPi)) throw ConfigError("cp.gamma must lie in (0, 2 pi)");
  s.sim = config::parse_simulation(root);
  return s;
}

struct CpGate {
  PulseSpec pulse;
  DriveSpec drive;
  double gamma_mod;
  ProductBasis basis;
  RotatingFrameModel model;
  CollapseSet collapse;
  TimeGrid grid;
};

inline CpGate build_cp_gate(const CpSetup& s, bool include_spectators) {
  if (include_spectators && (!s.lattice.has_coupling(0, 1) || !s.lattice.has_coupling(2, 3)))
    throw ConfigError("spectator model needs couplings [0, 1] and [2, 3]");
  const double g = s.lattice.coupling(1, 3);
  const double alpha2 = s.lattice.transmon(1).alpha;
  double gamma = s.drive.gamma ? *s.drive.gamma : s.drive.epsilon.value() / cp_resonance(s.lattice.detuning(1, 3), alpha2, 0.0);
  std::optional<PulseSpec> pulse;
  for (int it = 0; it < 100; ++it) {
    pulse = synthesize(GateTarget::conditional_phase(s.gamma), effective_rabi_cp(g, gamma), s.delta2);
    const double nu = s.drive.nu.value_or(cp_resonance(s.lattice.detuning(1, 3), alpha2, pulse->delta()));
    const double next = s.drive.resolve_gamma(nu, pulse->eta());
    if (std::abs(next - gamma) < 1e-14) break;
    gamma = next;
  }
  DriveSpec drive = cp_drive(s.lattice, *pulse, gamma);
  if (s.drive.nu) drive = DriveSpec::from_gamma(1, gamma, *s.drive.nu, drive.phi0, drive.eta);
  if (s.drive.epsilon && !s.drive.gamma)
    drive.validate_epsilon_form();
  else
    drive.validate();
  ProductBasis basis = s.sim.full_basis ? ProductBasis::full(4) : ProductBasis::truncated(4, Encoding::s2().max_excitation());
  RotatingFrameModel model = cp_model(s.lattice, drive, pulse->delta(), s.sim.n_bessel, include_spectators, basis);
  CollapseSet c = s.sim.decoherence ? collapse_operators(s.lattice, basis) : CollapseSet{};
  const TimeGrid grid = TimeGrid::covering(0.0, pulse->tau(), units::ps(s.sim.dt_ps));
  return {*pulse, drive, gamma, basis, std::move(model), std::move(c), grid};
}

/// Ideal state at time t for the initial (|10>_L + |11>_L)/sqrt2: the
/// (|a>, |11>_L) block follows the two-level pulse, |10>_L is idle.
inline CVector cp_ideal_state(const CpGate& gate, double t) {
  const Encoding enc = Encoding::s2();
  const CMatrix u = ideal_evolution_at(gate.pulse, t);
  CVector psi = CVector::Zero(gate.basis.dim());
  psi(gate.basis.index(enc.kets[2])) = 1.0 / std::sqrt(2.0);
  psi(gate.basis.index(*enc.aux)) = u(0, 1) / std::sqrt(2.0);
  psi(gate.basis.index(enc.kets[3])) = u(1, 1) / std::sqrt(2.0);
  return psi;
}

inline CVector cp_initial_state(const ProductBasis& basis) {
  const Encoding enc = Encoding::s2();
  return (basis.ket(enc.kets[2]) + basis.ket(enc.kets[3])) / std::sqrt(2.0);
}

/// State fidelity of the CP gate at tau for the initial (|10>_L + |11>_L)/sqrt2.
inline double cp_state_fidelity(const CpSetup& s, bool include_spectators) {
  const CpGate gate = build_cp_gate(s, include_spectators);
  const CVector psi0 = cp_initial_state(gate.basis);
  const Trajectory tr = evolve(psi0 * psi0.adjoint(), hamiltonian_of(gate.model), gate.collapse, gate.grid);
  return state_fidelity(tr.states.back(), cp_ideal_state(gate, gate.pulse.tau()));
}

/// Two-pair (spectators off) state fidelity over (Delta_24, g_24).
inline Table run_cp_sweep(const CpSetup& base, const std::vector<double>& delta24_mhz, const std::vector<double>& g24_mhz,
                          int jobs = 1) {
  const std::size_t n1 = delta24_mhz.size(), n2 = g24_mhz.size();
  std::vector<double> values(n1 * n2);
  parallel_for(n1 * n2, jobs, [&](std::size_t i) {
    CpSetup s = base;
    const std::size_t a = i / n2, b = i % n2;
    s.lattice.transmon(3).omega0 = s.lattice.transmon(1).omega0 - units::mhz(delta24_mhz[a]);
    s.lattice.set_coupling(1, 3, units::mhz(g24_mhz[b]));
    values[i] = cp_state_fidelity(s, false);
  });
  Table t{{"delta24_mhz", "g24_mhz", "F"}, {}};
  for (std::size_t i = 0; i < n1 * n2; ++i) t.add({delta24_mhz[i / n2], g24_mhz[i % n2], values[i]});
  return t;
}

struct CpDynamicsResult {
  Table table;
  double final_fidelity = 0.0;
  double tau_ns = 0.0;
  PulseSpec pulse;
};

/// Four-transmon dynamics, columns t_ns, P00, P01, P10, P11, Pa, F_S.
inline CpDynamicsResult run_cp_dynamics_full(const CpSetup& s, bool include_spectators = true) {
  const CpGate gate = build_cp_gate(s, include_spectators);
  const Encoding enc = Encoding::s2();
  std::vector<CVector> kets;
  for (const auto& k : enc.kets) kets.push_back(gate.basis.ket(k));
  kets.push_back(gate.basis.ket(*enc.aux));
  const CVector psi0 = cp_initial_state(gate.basis);
  const auto stride = static_cast<std::size_t>(std::max(1.0, std::round(s.sim.sample_ps / s.sim.dt_ps)));
  const Trajectory tr = evolve(psi0 * psi0.adjoint(), hamiltonian_of(gate.model), gate.collapse, gate.grid, {stride});
  CpDynamicsResult r{{{"t_ns", "P00", "P01", "P10", "P11", "Pa", "F_S"}, {}}, 0.0, gate.pulse.tau(), gate.pulse};
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    const Populations p = populations(tr.states[k], kets);
    const double f = state_fidelity(tr.states[k], cp_ideal_state(gate, tr.times[k]));
    r.table.add({tr.times[k], p.values[0], p.values[1], p.values[2], p.values[3], p.values[4], f});
  }
  r.final_fidelity = r.table.rows.back().back();
  return r;
}

/// tau_2 Omega over (gamma, delta_2/Omega) from the closed form; infeasible
/// cells are NaN.
inline Table run_tau2_surface(const std::vector<double>& gammas, const std::vector<double>& ratios, double omega) {
  Table t{{"gamma", "ratio", "tau2_omega", "tau2_ns"}, {}};
  for (double g : gammas)
    for (double x : ratios) {
      double tau = std::numeric_limits<double>::quiet_NaN();
      try {
        tau = gate_time(GateKind::CP, omega, x * omega, g);
      } catch (const std::invalid_argument&) {
      }
      t.add({g, x, tau * omega, tau});
    }
  return t;
}

// ---- default grids ---------------------------------------------------------------

namespace grids {
inline std::vector<double> delta12_mhz() { return linspace(400.0, 650.0, 26); }
inline std::vector<double> g12_mhz() { return linspace(10.0, 20.0, 21); }
inline std::vector<double> beta() { return linspace(-0.1, 0.1, 41); }
inline std::vector<double> delta24_mhz() { return linspace(400.0, 800.0, 21); }
inline std::vector<double> g24_mhz() { return linspace(4.0, 10.0, 13); }
/// Interior points 2 pi k / 48, k = 1..47 (includes pi/2, pi, 3pi/2).
inline std::vector<double> gamma() {
  std::vector<double> v;
  for (int k = 1; k < 48; ++k) v.push_back(kTwoPi * k / 48.0);
  return v;
}
inline std::vector<double> ratio() { return linspace(0.0, 4.0, 41); }
}  // namespace grids

// ---- config validation ---------------------------------------------------------

struct CheckResult {
  std::string name;
  double value;
  double tolerance;
  bool pass;
};

/// Invariant suite on a config: synthesized pulses, closed forms, model
/// Hermiticity and a short open-system run. Works for both config kinds.
inline std::vector<CheckResult> validate_config(const Json& root) {
  std::vector<CheckResult> out;
  auto check_le = [&](std::string name, double v, double tol) { out.push_back({std::move(name), v, tol, v <= tol}); };
  auto hermiticity = [](const RotatingFrameModel& m, double tau) {
    double worst = 0.0;
    for (int k = 0; k <= 100; ++k) {
      const CMatrix h = m.dense(tau * k / 100.0);
      worst = std::max(worst, max_abs(h - h.adjoint()));
    }
    return worst;
  };
  auto short_run = [&](const std::string& label, const RotatingFrameModel& m, const CollapseSet& c, const CVector& psi,
                       const TimeGrid& g) {
    const TimeGrid part = TimeGrid::covering(0.0, std::min(g.t1, 2.0), g.dt);
    const Trajectory tr = evolve(psi * psi.adjoint(), hamiltonian_of(m), c, part, {100});
    double trace = 0.0, herm = 0.0, neg = 0.0;
    for (const auto& rho : tr.states) {
      const auto d = diagnose(rho);
      trace = std::max(trace, d.trace_error);
      herm = std::max(herm, d.hermiticity);
      neg = std::max(neg, -d.min_eigenvalue);
    }
    check_le(label + ": trace error", trace, 1e-9);
    check_le(label + ": hermiticity", herm, 1e-10);
    check_le(label + ": negative eigenvalue", neg, 1e-8);
  };
  const int n = static_cast<int>(config::require(config::require(root, "device", ""), "transmons", "device").size());
  if (n == 2) {
    const SingleQubitSetup s = parse_single_qubit(root);
    for (auto kind : {GateKind::H, GateKind::S, GateKind::T}) {
      const SingleGate g = build_single_gate(s, kind);
      const std::string k(to_string(kind));
      check_le(k + ": invariant residual", invariant_residual(g.pulse, TimeGrid::covering(0.0, g.pulse.tau(), g.pulse.tau() / 400)), 1e-8);
      check_le(k + ": closed-form vs quadrature phase",
               std::abs(canonical_angle(overall_phase(g.pulse) + g.pulse.phi_minus() - g.pulse.gamma_prime())), 1e-9);
      check_le(k + ": target reproduced", 1.0 - unitary_overlap(ideal_evolution(g.pulse), standard_target(kind).unitary()), 1e-12);
      check_le(k + ": model hermiticity", hermiticity(g.model, g.pulse.tau()), 1e-12);
      if (kind == GateKind::S || kind == GateKind::T)
        check_le(k + ": gate time closed form", std::abs(g.pulse.tau() - gate_time(kind, g.pulse.omega(), g.pulse.delta())) / g.pulse.tau(), 1e-9);
      const CMatrix v = Encoding::s1().isometry(g.basis);
      short_run(k, g.model, g.collapse, v.col(0), g.grid);
    }
  } else if (n == 4) {
    const CpSetup s = parse_cp(root);
    for (bool spect : {false, true}) {
      if (spect && (!s.lattice.has_coupling(0, 1) || !s.lattice.has_coupling(2, 3))) continue;
      const CpGate g = build_cp_gate(s, spect);
      const std::string k = spect ? "CP (spectators)" : "CP (two-pair)";
      check_le(k + ": invariant residual", invariant_residual(g.pulse, TimeGrid::covering(0.0, g.pulse.tau(), g.pulse.tau() / 400)), 1e-8);
      check_le(k + ": gate time closed form",
               std::abs(g.pulse.tau() - gate_time(GateKind::CP, g.pulse.omega(), g.pulse.delta(), s.gamma)) / g.pulse.tau(), 1e-9);
      check_le(k + ": model hermiticity", hermiticity(g.model, g.pulse.tau()), 1e-12);
      short_run(k, g.model, g.collapse, cp_initial_state(g.basis), g.grid);
    }
  } else {
    throw ConfigError("device.transmons: expected 2 (single qubit) or 4 (CP) transmons");
  }
  return out;
}

}  // namespace tocq
