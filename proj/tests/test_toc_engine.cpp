#include "tocq/toc_engine.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

namespace tocq {
namespace {

using units::mhz;

const double kOmegaRef = mhz(16.18);

PulseSpec hadamard_pulse() { return synthesize(GateTarget::hadamard(), kOmegaRef); }

TEST(TwoLevelHamiltonian, ZeroPhase) {
  const PulseSpec p(0.1, 0.0, 0.0, 0.0, 10.0);
  CMatrix expected(2, 2);
  expected << 0.0, 0.05, 0.05, 0.0;
  EXPECT_LT(max_abs(two_level_hamiltonian(p, 0.0) - expected), 1e-16);
}

TEST(TwoLevelHamiltonian, ZeroAmplitudeRejected) {
  EXPECT_THROW(PulseSpec(0.0, 0.2, 0.0, 0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(PulseSpec(0.1, 0.2, 0.0, 0.0, 0.0), std::invalid_argument);
}

TEST(TwoLevelHamiltonian, SymbolicSubstitution) {
  // phi(t) = pi/2 + 0.05 t reaches 3 pi/2 at t = pi / 0.05.
  const PulseSpec p(0.1, 0.1, 0.05, kPi / 2, 100.0);
  const CMatrix h = two_level_hamiltonian(p, kPi / 0.05);
  EXPECT_NEAR(std::abs(h(0, 1) - 0.05 * std::exp(kI * kPi / 2.0)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(h(1, 0) - 0.05 * std::exp(-kI * kPi / 2.0)), 0.0, 1e-14);
  EXPECT_DOUBLE_EQ(h(0, 0).real(), 0.05);
  EXPECT_TRUE(is_hermitian(h, 1e-15));
}

TEST(OverallPhase, HadamardPulse) {
  const PulseSpec p = hadamard_pulse();
  EXPECT_NEAR(p.gamma_prime(), kPi / 2, 1e-12);
  EXPECT_NEAR(overall_phase(p) + p.phi_minus(), kPi / 2, 1e-9);
}

TEST(OverallPhase, ResonantLimit) {
  const PulseSpec p(0.2, 0.3, 0.3, 0.0, 7.0);
  EXPECT_NEAR(p.chi(), kPi / 2, 1e-15);
  EXPECT_NEAR(overall_phase(p) + p.phi_minus(), 0.5 * 0.2 * 7.0, 1e-12);
}

TEST(OverallPhase, SGateQuadrature) {
  const PulseSpec p = synthesize(GateTarget::s_gate(), kOmegaRef, mhz(25.0));
  EXPECT_NEAR(overall_phase(p) + p.phi_minus(), kPi, 1e-6);
}

TEST(OverallPhase, QuadratureMatchesClosedFormOnRandomPulses) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> om(0.02, 0.3), de(-0.3, 0.3), et(-0.6, 0.6), ph(-kPi, kPi),
      ta(1.0, 40.0);
  int checked = 0;
  while (checked < 100) {
    const PulseSpec p(om(rng), de(rng), et(rng), ph(rng), ta(rng));
    if (std::abs(std::cos(p.chi())) < 0.05) continue;  // integrand near 0/0
    ++checked;
    EXPECT_NEAR(overall_phase(p) + p.phi_minus(), p.gamma_prime(), 1e-9);
  }
}

TEST(IdealEvolution, FullLoopIsDiagonalPhase) {
  // gamma' = 2 pi: tau = 4 pi sin(chi) / Omega.
  const double omega = 0.1, delta = 0.05, eta = 0.12;
  const double chi = std::atan2(omega, eta - delta);
  const PulseSpec p(omega, delta, eta, 0.3, 4 * kPi * std::sin(chi) / omega);
  EXPECT_NEAR(p.gamma_prime(), kTwoPi, 1e-12);
  const CMatrix u = ideal_evolution(p);
  EXPECT_LT(std::abs(u(0, 0) - std::exp(-kI * p.phi_minus())), 1e-12);
  EXPECT_LT(std::abs(u(1, 1) - std::exp(kI * p.phi_minus())), 1e-12);
  EXPECT_LT(std::abs(u(0, 1)), 1e-12);
}

TEST(IdealEvolution, HadamardWithUnitNormalisation) {
  const PulseSpec p = hadamard_pulse();
  EXPECT_NEAR(p.eta() * p.tau(), kTwoPi, 1e-12);
  CMatrix expected(2, 2);
  expected << 1, 1, 1, -1;
  expected *= -kI / std::sqrt(2.0);
  EXPECT_LT(max_abs(ideal_evolution(p) - expected), 1e-12);
}

TEST(IdealEvolution, MatchesTimeOrderedPropagation) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> om(0.05, 0.2), de(-0.2, 0.2), et(-0.4, 0.4), ph(-kPi, kPi),
      ta(2.0, 25.0);
  for (int trial = 0; trial < 12; ++trial) {
    const PulseSpec p(om(rng), de(rng), et(rng), ph(rng), ta(rng));
    const auto steps = static_cast<std::size_t>(std::ceil(p.tau() / units::ps(1.0)));
    const CMatrix numeric =
        oracle::schrodinger_rk4([&](double t) { return two_level_hamiltonian(p, std::min(t, p.tau())); }, 2,
                                0.0, p.tau(), steps);
    const CMatrix closed = ideal_evolution(p);
    EXPECT_LT(max_abs(numeric - closed), 1e-7);
    EXPECT_LT(max_abs(closed.adjoint() * closed - CMatrix::Identity(2, 2)), 1e-10);
  }
}

TEST(InvariantResidual, HadamardPulseSatisfiesInvariantEquation) {
  const PulseSpec p = hadamard_pulse();
  EXPECT_LT(invariant_residual(p, TimeGrid::covering(0.0, p.tau(), 0.01)), 1e-8);
}

TEST(InvariantResidual, WrongPhaseSlopeIsDetected) {
  const PulseSpec p = hadamard_pulse();
  const PulseSpec wrong(p.omega(), p.delta(), p.eta() + 0.1 * p.omega(), p.phi0(), p.tau());
  const auto trajectory = design_trajectory(p, TimeGrid::covering(0.0, p.tau(), 0.01));
  EXPECT_GT(invariant_residual(wrong, trajectory), 1e-3);
}

TEST(InvariantResidual, ResonantPulse) {
  const PulseSpec p(0.1, 0.2, 0.2, 0.4, 15.0);
  EXPECT_LT(invariant_residual(p, TimeGrid::covering(0.0, p.tau(), 0.01)), 1e-8);
}

TEST(InvariantResidual, IntegratedTrajectoryAgreesWithDesign) {
  const PulseSpec p = synthesize(GateTarget::t_gate(), kOmegaRef, mhz(15.0));
  const TimeGrid g = TimeGrid::covering(0.0, p.tau(), 0.005);
  EXPECT_LT(invariant_residual(p, integrate_trajectory(p, g)), 1e-8);
}

TEST(Synthesize, HadamardForcesDetuning) {
  const PulseSpec p = hadamard_pulse();
  EXPECT_NEAR(units::to_mhz(p.delta()), 29.58, 0.01);
  EXPECT_NEAR(p.delta(), (2 * std::sqrt(2.0) - 1) * kOmegaRef, 1e-12);
  EXPECT_NEAR(p.tau(), 21.9, 0.05);
  EXPECT_NEAR(p.chi(), kPi / 4, 1e-12);
  EXPECT_LT(oracle::phase_aligned_distance(ideal_evolution(p), GateTarget::hadamard().unitary()), 1e-8);
}

TEST(Synthesize, HadamardAcceptsRoundedQuotedDetuning) {
  const PulseSpec p = synthesize(GateTarget::hadamard(), kOmegaRef, mhz(29.58));
  EXPECT_NEAR(p.delta(), (2 * std::sqrt(2.0) - 1) * kOmegaRef, 1e-12);
}

TEST(Synthesize, HadamardRejectsInadmissibleDetuning) {
  try {
    synthesize(GateTarget::hadamard(), kOmegaRef, mhz(20.0));
    FAIL() << "expected an error";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("admissible"), std::string::npos);
  }
}

TEST(Synthesize, SGateAtReferenceDetuning) {
  const PulseSpec p = synthesize(GateTarget::s_gate(), kOmegaRef, mhz(25.0));
  EXPECT_NEAR(p.tau(), 9.5, 0.05);
  EXPECT_NEAR(p.tau(), gate_time(GateKind::S, kOmegaRef, mhz(25.0)), 1e-10);
  EXPECT_LT(oracle::phase_aligned_distance(ideal_evolution(p), GateTarget::s_gate().unitary()), 1e-8);
}

TEST(Synthesize, ChiFreeTargetNeedsDetuning) {
  EXPECT_THROW(synthesize(GateTarget::s_gate(), kOmegaRef), std::invalid_argument);
}

TEST(Synthesize, IdentityTargetFullLoop) {
  const GateTarget id(kTwoPi, kPi / 3, 0.0, 0.0);
  for (double d : {0.0, 0.05, -0.07}) {
    const PulseSpec p = synthesize(id, 0.1, d);
    EXPECT_NEAR(p.tau(), 4 * kPi * std::sin(p.chi()) / 0.1, 1e-10);
    EXPECT_LT(oracle::phase_aligned_distance(ideal_evolution(p), CMatrix::Identity(2, 2)), 1e-8);
  }
}

TEST(Synthesize, RandomTargetsReproducedWithInvariants) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> g(0.2, 6.0), c(0.1, 3.0), a(-kPi, kPi), om(0.03, 0.2);
  for (int trial = 0; trial < 50; ++trial) {
    const GateTarget target(g(rng), c(rng), a(rng), a(rng));
    const PulseSpec p = synthesize(target, om(rng));
    EXPECT_LT(oracle::phase_aligned_distance(ideal_evolution(p), target.unitary()), 1e-8);
    EXPECT_LT(invariant_residual(p, TimeGrid::covering(0.0, p.tau(), p.tau() / 400)), 1e-8);
  }
}

TEST(GateTime, ReferenceOperatingPoints) {
  EXPECT_NEAR(gate_time(GateKind::S, kOmegaRef, mhz(25.0)), 9.52, 0.005);
  EXPECT_NEAR(gate_time(GateKind::T, kOmegaRef, mhz(15.0)), 7.80, 0.005);
  EXPECT_NEAR(gate_time(GateKind::H, kOmegaRef, 0.0), 21.85, 0.005);
}

TEST(GateTime, ZeroDetuningReduction) {
  EXPECT_NEAR(gate_time(GateKind::S, kOmegaRef, 0.0), kPi * std::sqrt(7.0) / (2 * kOmegaRef), 1e-12);
}

TEST(GateTime, ControlledPhaseCaptionCell) {
  const double omega = mhz(27.0) / 2.3929;
  EXPECT_NEAR(units::to_mhz(omega), 11.2834, 1e-3);
  EXPECT_NEAR(gate_time(GateKind::CP, omega, mhz(27.0), kPi / 2), 17.8, 0.05);
}

TEST(GateTime, ControlledPhaseRejectsOutOfRangePhase) {
  EXPECT_THROW(gate_time(GateKind::CP, 0.1, 0.1, 0.0), std::invalid_argument);
  EXPECT_THROW(gate_time(GateKind::CP, 0.1, 0.1, kTwoPi + 0.1), std::invalid_argument);
  EXPECT_THROW(gate_time(GateKind::S, 0.0, 0.1), std::invalid_argument);
}

TEST(GateTime, ClosedFormsMatchRootSolveOnGrid) {
  for (int i = 0; i < 20; ++i) {
    const double omega = mhz(5.0 + 25.0 * i / 19.0);
    for (int j = 0; j < 20; ++j) {
      const double delta = mhz(50.0 * j / 19.0);
      const double s_ref = oracle::phase_gate_time_root_solve(-3 * kPi / 4, omega, delta);
      const double t_ref = oracle::phase_gate_time_root_solve(-7 * kPi / 8, omega, delta);
      EXPECT_NEAR(gate_time(GateKind::S, omega, delta) / s_ref, 1.0, 1e-6);
      EXPECT_NEAR(gate_time(GateKind::T, omega, delta) / t_ref, 1.0, 1e-6);
    }
  }
}

TEST(GateTime, ControlledPhaseClosedFormIsZeroWindingBranch) {
  // The CP closed form is the k = 0 winding (eta tau = 2(gamma - pi)) of the
  // root-solve; other windings can be faster away from the operating point.
  const double omega = mhz(11.2834);
  for (double gamma : {0.3, kPi / 2, 2.0, kPi, 4.0, 5.9})
    for (double ratio : {0.0, 0.5, 1.3, 2.3929, 4.0}) {
      const double ref = oracle::phase_gate_time_root_solve(gamma - kPi, omega, ratio * omega, 0, 0);
      EXPECT_NEAR(gate_time(GateKind::CP, omega, ratio * omega, gamma) / ref, 1.0, 1e-6)
          << "gamma=" << gamma << " ratio=" << ratio;
    }
}

TEST(GateTime, ControlledPhaseZeroWindingIsFastestAtOperatingPoint) {
  const double omega = mhz(11.2834);
  const double all = oracle::phase_gate_time_root_solve(-kPi / 2, omega, mhz(27.0));
  EXPECT_NEAR(gate_time(GateKind::CP, omega, mhz(27.0), kPi / 2) / all, 1.0, 1e-6);
}

TEST(GateTime, ControlledPhaseSynthesisMatchesClosedFormAtOperatingPoint) {
  const double omega = mhz(11.2834);
  const PulseSpec p = synthesize(GateTarget::conditional_phase(kPi / 2), omega, mhz(27.0));
  EXPECT_NEAR(p.tau(), gate_time(GateKind::CP, omega, mhz(27.0), kPi / 2), 1e-10);
  // |11> is the second effective level and picks up e^{i gamma}
  EXPECT_LT(std::abs(ideal_evolution(p)(1, 1) - std::exp(kI * kPi / 2.0)), 1e-10);
}

TEST(OptimalDetuning, NoWorseThanEndpoint) {
  const auto opt = optimal_detuning(GateKind::S, kOmegaRef, 0.0, 3 * kOmegaRef);
  EXPECT_LE(opt.tau, gate_time(GateKind::S, kOmegaRef, 0.0) + 1e-12);
}

TEST(OptimalDetuning, MatchesDenseScan) {
  const double lo = 0.0, hi = 3 * kOmegaRef;
  double scan_best = 1e300;
  for (int i = 0; i < 10000; ++i)
    scan_best = std::min(scan_best, gate_time(GateKind::T, kOmegaRef, lo + (hi - lo) * i / 9999.0));
  const auto opt = optimal_detuning(GateKind::T, kOmegaRef, lo, hi);
  EXPECT_LE(opt.tau, 7.80);
  EXPECT_LE(opt.tau, scan_best + 1e-9);
  EXPECT_NEAR(gate_time(GateKind::T, kOmegaRef, opt.delta), opt.tau, 1e-12);
}

TEST(OptimalDetuning, ControlledPhaseProfileDecreases) {
  const double omega = mhz(11.2834);
  double prev = 1e300;
  for (int i = 0; i <= 400; ++i) {
    const double tau = gate_time(GateKind::CP, omega, 4.0 * omega * i / 400.0, kPi / 2);
    EXPECT_LE(tau, prev + 1e-12);
    prev = tau;
  }
  const auto opt = optimal_detuning(GateKind::CP, omega, 0.0, 4 * omega, kPi / 2);
  EXPECT_NEAR(opt.delta, 4 * omega, 1e-6 * omega);
}

}  // namespace
}  // namespace tocq
