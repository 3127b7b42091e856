// tocq: pulse synthesis queries and simulation recipes.
//
// All user-facing frequencies are plain f in MHz (the 2 pi is applied
// internally), rates in kHz, times in ns (dt in ps).

#include "tocq/experiments.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

namespace {

using namespace tocq;

enum class ConfigKind { SingleQubit, Cp };

struct Common {
  std::string config_path;
  std::string out;
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::optional<double> dt_ps;
  std::optional<int> bessel_order;
  bool no_decoherence = false;
  bool full_basis = false;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config_path, "Device/recipe JSON file (relative paths also tried under $TOCQ_CONFIG_DIR)");
  sub->add_option("--out", c.out, "Output CSV path; a <out>.json sidecar is written next to it (default: CSV on stdout)");
  sub->add_option("--jobs", c.jobs, "Worker threads for sweeps")->check(CLI::PositiveNumber);
  sub->add_option("--dt-ps", c.dt_ps, "RK4 step in ps, in (0, 1]");
  sub->add_option("--bessel-order", c.bessel_order, "Sideband truncation |n| <= N of the Jacobi-Anger series");
  sub->add_flag("--no-decoherence", c.no_decoherence, "Drop all collapse operators");
  sub->add_flag("--full-basis", c.full_basis, "Use the full 3^n product space instead of the excitation-truncated one");
  sub->add_option("--set", c.overrides, "Config override key.path=value (JSON value), repeatable");
}

std::string resolve_config_path(const std::string& path) {
  namespace fs = std::filesystem;
  if (fs::exists(path) || fs::path(path).is_absolute()) return path;
  if (const char* dir = std::getenv("TOCQ_CONFIG_DIR")) {
    const fs::path candidate = fs::path(dir) / path;
    if (fs::exists(candidate)) return candidate.string();
  }
  return path;
}

Json load_config(const Common& c, ConfigKind kind) {
  Json cfg;
  if (!c.config_path.empty()) {
    cfg = config::load_file(resolve_config_path(c.config_path));
  } else if (const char* dir = std::getenv("TOCQ_CONFIG_DIR");
             dir && std::filesystem::exists(std::filesystem::path(dir) / (kind == ConfigKind::Cp ? "cp_gate.json" : "single_qubit.json"))) {
    cfg = config::load_file((std::filesystem::path(dir) / (kind == ConfigKind::Cp ? "cp_gate.json" : "single_qubit.json")).string());
  } else {
    cfg = kind == ConfigKind::Cp ? config::default_cp() : config::default_single_qubit();
  }
  for (const auto& o : c.overrides) config::apply_override(cfg, o);
  if (c.dt_ps) cfg["simulation"]["dt_ps"] = *c.dt_ps;
  if (c.bessel_order) cfg["simulation"]["n_bessel"] = *c.bessel_order;
  if (c.no_decoherence) cfg["simulation"]["decoherence"] = false;
  if (c.full_basis) cfg["simulation"]["full_basis"] = true;
  return cfg;
}

/// "lo:hi:n" -> n evenly spaced values.
std::vector<double> parse_range(const std::string& spec, const std::string& flag) {
  double lo = 0.0, hi = 0.0;
  long n = 0;
  char c1 = 0, c2 = 0;
  std::istringstream is(spec);
  if (!(is >> lo >> c1 >> hi >> c2 >> n) || c1 != ':' || c2 != ':' || n < 1 || !is.eof())
    throw ConfigError("--" + flag + " expects lo:hi:n, got '" + spec + "'");
  return linspace(lo, hi, static_cast<std::size_t>(n));
}

void emit(const Common& c, const Table& t, RunMetadata meta, std::chrono::steady_clock::time_point start) {
  meta.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (c.out.empty()) {
    write_csv(std::cout, t);
    return;
  }
  write_csv(c.out, t);
  write_sidecar(c.out, meta);
  Json summary = meta.results;
  summary["csv"] = c.out;
  summary["rows"] = t.rows.size();
  std::cout << summary.dump() << '\n';
}

Json axis(const std::vector<double>& v) { return {{"min", v.front()}, {"max", v.back()}, {"points", v.size()}}; }

GateKind single_gate_kind(const std::string& name) {
  const GateKind k = parse_gate_kind(name);
  if (k == GateKind::CP) throw ConfigError("--gate must be one of H, S, T for this subcommand");
  return k;
}

/// MHz value that converts back to exactly `omega`, so printed numbers can be
/// fed back in without drifting by an ulp.
double printable_mhz(double omega) {
  const double guess = units::to_mhz(omega);
  double up = guess, down = guess;
  for (int k = 0; k < 16; ++k) {
    if (units::mhz(up) == omega) return up;
    if (units::mhz(down) == omega) return down;
    up = std::nextafter(up, std::numeric_limits<double>::infinity());
    down = std::nextafter(down, -std::numeric_limits<double>::infinity());
  }
  return guess;
}

Json pulse_json(GateKind kind, const PulseSpec& p) {
  return {{"gate", std::string(to_string(kind))},
          {"omega_mhz", printable_mhz(p.omega())},
          {"delta_mhz", printable_mhz(p.delta())},
          {"eta_mhz", printable_mhz(p.eta())},
          {"phi0", p.phi0()},
          {"tau_ns", p.tau()},
          {"chi", p.chi()},
          {"gamma_prime", p.gamma_prime()}};
}

int run(int argc, char** argv) {
  CLI::App app{"Time-optimal transmon gate synthesis and open-system simulation (frequencies in MHz)"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  // synth / gate-time
  std::string gate = "H";
  double omega_mhz = 0.0;
  std::optional<double> delta_mhz;
  double cp_phase = kPi / 2;

  auto* synth = app.add_subcommand("synth", "Synthesize a time-optimal pulse and print it as JSON");
  synth->add_option("--gate", gate, "Target gate: H, S, T or CP")->required();
  synth->add_option("--omega-mhz", omega_mhz, "Rabi amplitude Omega/2pi in MHz")->required()->check(CLI::PositiveNumber);
  synth->add_option("--delta-mhz", delta_mhz, "Detuning delta/2pi in MHz (default: fastest admissible)");
  synth->add_option("--gamma", cp_phase, "Conditional phase for CP, rad in (0, 2pi)");

  auto* gate_time_cmd = app.add_subcommand("gate-time", "Closed-form gate time in ns");
  gate_time_cmd->add_option("--gate", gate, "Target gate: H, S, T or CP")->required();
  gate_time_cmd->add_option("--omega-mhz", omega_mhz, "Rabi amplitude Omega/2pi in MHz")->required()->check(CLI::PositiveNumber);
  gate_time_cmd->add_option("--delta-mhz", delta_mhz, "Detuning delta/2pi in MHz (default 0)");
  gate_time_cmd->add_option("--gamma", cp_phase, "Conditional phase for CP, rad in (0, 2pi)");

  // recipes
  Common common;
  std::string range_a, range_b;
  bool two_pair = false;
  std::optional<double> tau2_omega_mhz;

  auto* dynamics = app.add_subcommand("dynamics", "Single-gate populations and fidelity vs time (t_ns,P0,P1,F)");
  dynamics->add_option("--gate", gate, "H, S or T")->required();
  add_common(dynamics, common);

  auto* sweep = app.add_subcommand("sweep", "Gate fidelity over (Delta_12, g_12) (delta12_mhz,g12_mhz,F)");
  sweep->add_option("--gate", gate, "H, S or T")->required();
  sweep->add_option("--delta12-mhz", range_a, "Delta_12/2pi grid lo:hi:n in MHz (default 400:650:26)");
  sweep->add_option("--g12-mhz", range_b, "g_12/2pi grid lo:hi:n in MHz (default 10:20:21)");
  add_common(sweep, common);

  auto* robustness = app.add_subcommand("robustness", "Fidelity under frequency drift beta Omega (beta,F)");
  robustness->add_option("--gate", gate, "H, S or T (default H)");
  robustness->add_option("--beta", range_a, "beta grid lo:hi:n, dimensionless (default -0.1:0.1:41)");
  add_common(robustness, common);

  auto* tau2 = app.add_subcommand("tau2-surface", "CP gate time over (gamma, delta_2/Omega) (gamma,ratio,tau2_omega,tau2_ns)");
  tau2->add_option("--omega-mhz", tau2_omega_mhz, "Omega/2pi in MHz (default: from the CP config)");
  tau2->add_option("--ratio", range_a, "delta_2/Omega grid lo:hi:n (default 0:4:41)");
  add_common(tau2, common);

  auto* cp_sweep = app.add_subcommand("cp-sweep", "Two-pair CP state fidelity over (Delta_24, g_24) (delta24_mhz,g24_mhz,F)");
  cp_sweep->add_option("--delta24-mhz", range_a, "Delta_24/2pi grid lo:hi:n in MHz (default 400:800:21)");
  cp_sweep->add_option("--g24-mhz", range_b, "g_24/2pi grid lo:hi:n in MHz (default 4:10:13)");
  add_common(cp_sweep, common);

  auto* cp_dynamics = app.add_subcommand("cp-dynamics", "CP populations and state fidelity vs time (t_ns,P00,P01,P10,P11,Pa,F_S)");
  cp_dynamics->add_flag("--two-pair", two_pair, "Leave out the spectator transmons' couplings");
  add_common(cp_dynamics, common);

  std::string validate_kind = "auto";
  auto* validate = app.add_subcommand("validate", "Run the invariant suite on a config; exit 3 on any violation");
  validate->add_option("--kind", validate_kind, "Default config when --config is absent: single or cp")
      ->check(CLI::IsMember({"auto", "single", "cp"}));
  add_common(validate, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  const auto start = std::chrono::steady_clock::now();

  if (synth->parsed()) {
    const GateKind kind = parse_gate_kind(gate);
    const GateTarget target = kind == GateKind::CP ? GateTarget::conditional_phase(cp_phase) : standard_target(kind);
    std::optional<double> delta;
    if (delta_mhz) delta = units::mhz(*delta_mhz);
    const PulseSpec p = synthesize(target, units::mhz(omega_mhz), delta);
    std::cout << pulse_json(kind, p).dump(2) << '\n';
    return 0;
  }
  if (gate_time_cmd->parsed()) {
    const GateKind kind = parse_gate_kind(gate);
    const double tau = gate_time(kind, units::mhz(omega_mhz), units::mhz(delta_mhz.value_or(0.0)), cp_phase);
    std::cout << Json{{"gate", std::string(to_string(kind))}, {"tau_ns", tau}}.dump(2) << '\n';
    return 0;
  }
  if (dynamics->parsed()) {
    const GateKind kind = single_gate_kind(gate);
    const Json cfg = load_config(common, ConfigKind::SingleQubit);
    const DynamicsResult r = run_single_gate_dynamics(parse_single_qubit(cfg), kind);
    RunMetadata meta{"dynamics", cfg};
    meta.axes = {{"gate", std::string(to_string(kind))}};
    meta.results = {{"gate", std::string(to_string(kind))},
                    {"tau_ns", r.tau_ns},
                    {"fidelity", r.final_fidelity.value},
                    {"fidelity_method", std::string(to_string(r.final_fidelity.method))},
                    {"leakage", r.final_fidelity.leakage},
                    {"trace_fidelity_leading_unitary", r.trace_fidelity_fit}};
    emit(common, r.table, meta, start);
    return 0;
  }
  if (sweep->parsed()) {
    const GateKind kind = single_gate_kind(gate);
    const Json cfg = load_config(common, ConfigKind::SingleQubit);
    const auto d = range_a.empty() ? grids::delta12_mhz() : parse_range(range_a, "delta12-mhz");
    const auto g = range_b.empty() ? grids::g12_mhz() : parse_range(range_b, "g12-mhz");
    const Table t = run_fidelity_sweep(parse_single_qubit(cfg), kind, d, g, common.jobs);
    RunMetadata meta{"sweep", cfg};
    meta.axes = {{"gate", std::string(to_string(kind))}, {"delta12_mhz", axis(d)}, {"g12_mhz", axis(g)}};
    meta.results = {{"gate", std::string(to_string(kind))}, {"cells", t.rows.size()}};
    emit(common, t, meta, start);
    return 0;
  }
  if (robustness->parsed()) {
    const GateKind kind = single_gate_kind(gate);
    const Json cfg = load_config(common, ConfigKind::SingleQubit);
    const SingleQubitSetup s = parse_single_qubit(cfg);
    const auto betas = range_a.empty() ? grids::beta() : parse_range(range_a, "beta");
    const Table t = run_drift_robustness(s, kind, betas, common.jobs);
    RunMetadata meta{"robustness", cfg};
    meta.axes = {{"gate", std::string(to_string(kind))}, {"beta", axis(betas)}};
    meta.results = {{"gate", std::string(to_string(kind))},
                    {"peak_beta", parabolic_peak(t)},
                    {"predicted_peak_beta", predicted_drift_peak(s, build_single_gate(s, kind))}};
    emit(common, t, meta, start);
    return 0;
  }
  if (tau2->parsed()) {
    const Json cfg = load_config(common, ConfigKind::Cp);
    double omega = 0.0;
    if (tau2_omega_mhz) {
      if (!(*tau2_omega_mhz > 0.0)) throw ConfigError("--omega-mhz must be positive");
      omega = units::mhz(*tau2_omega_mhz);
    } else {
      omega = build_cp_gate(parse_cp(cfg), false).pulse.omega();
    }
    const auto ratios = range_a.empty() ? grids::ratio() : parse_range(range_a, "ratio");
    const auto gammas = grids::gamma();
    const Table t = run_tau2_surface(gammas, ratios, omega);
    RunMetadata meta{"tau2-surface", cfg};
    meta.axes = {{"gamma", axis(gammas)}, {"ratio", axis(ratios)}};
    meta.results = {{"omega_mhz", units::to_mhz(omega)}};
    emit(common, t, meta, start);
    return 0;
  }
  if (cp_sweep->parsed()) {
    const Json cfg = load_config(common, ConfigKind::Cp);
    const auto d = range_a.empty() ? grids::delta24_mhz() : parse_range(range_a, "delta24-mhz");
    const auto g = range_b.empty() ? grids::g24_mhz() : parse_range(range_b, "g24-mhz");
    const Table t = run_cp_sweep(parse_cp(cfg), d, g, common.jobs);
    RunMetadata meta{"cp-sweep", cfg};
    meta.axes = {{"delta24_mhz", axis(d)}, {"g24_mhz", axis(g)}};
    meta.results = {{"cells", t.rows.size()}};
    emit(common, t, meta, start);
    return 0;
  }
  if (cp_dynamics->parsed()) {
    const Json cfg = load_config(common, ConfigKind::Cp);
    const CpDynamicsResult r = run_cp_dynamics_full(parse_cp(cfg), !two_pair);
    RunMetadata meta{"cp-dynamics", cfg};
    meta.axes = {{"spectators", !two_pair}};
    meta.results = {{"tau_ns", r.tau_ns}, {"state_fidelity", r.final_fidelity}};
    emit(common, r.table, meta, start);
    return 0;
  }
  if (validate->parsed()) {
    ConfigKind kind = validate_kind == "cp" ? ConfigKind::Cp : ConfigKind::SingleQubit;
    const Json cfg = load_config(common, kind);
    bool ok = true;
    for (const auto& c : validate_config(cfg)) {
      std::printf("%s %s: %.3e (limit %.1e)\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.value, c.tolerance);
      ok = ok && c.pass;
    }
    return ok ? 0 : 3;
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const tocq::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const tocq::PhysicsError& e) {
    std::cerr << "physics error: " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
