#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "pdmlab/classical.hpp"

using namespace pdmlab;

namespace {

ClassicalSystem make_system(MassProfile m, VectorPotential a, ScalarField v) { return {std::move(m), std::move(a), std::move(v), {}}; }

MassProfile bump() { return make_mass_profile("rational-bump", {{"m0", 1.0}, {"a", 1.0}}); }

// Hamilton's equations from central differences of H, the oracle for the flow.
PhaseVelocity fd_flow(const ClassicalState& s, const ClassicalSystem& sys, double h = 1e-5) {
  auto dh = [&](double ClassicalState::*member) {
    ClassicalState lo = s, hi = s;
    lo.*member -= h;
    hi.*member += h;
    return (classical_energy(hi, sys) - classical_energy(lo, sys)) / (2 * h);
  };
  return {dh(&ClassicalState::px), dh(&ClassicalState::py), -dh(&ClassicalState::x), -dh(&ClassicalState::y)};
}

}  // namespace

TEST(Flow, Oscillator) {
  const auto sys = make_system(constant_mass(1.0), zero_vector_potential(), make_scalar_field("harmonic-x", {{"k", 1.0}}));
  const PhaseVelocity f = hamiltonian_flow({1.0, 0.0, 0.0, 0.0}, sys);
  EXPECT_DOUBLE_EQ(f.dx, 0.0);
  EXPECT_DOUBLE_EQ(f.dy, 0.0);
  EXPECT_DOUBLE_EQ(f.dpx, -1.0);
  EXPECT_DOUBLE_EQ(f.dpy, 0.0);
}

TEST(Flow, QuadraticMassSlice) {
  const auto sys = make_system(make_mass_profile("quadratic", {{"m0", 1.0}, {"lambda", 1.0}}), zero_vector_potential(), zero_field());
  const ClassicalState s{1.0, 0.0, 2.0, 0.0};
  const PhaseVelocity f = hamiltonian_flow(s, sys);
  EXPECT_DOUBLE_EQ(f.dx, 1.0);
  EXPECT_DOUBLE_EQ(f.dpx, 1.0);
  const PhaseVelocity fd = fd_flow(s, sys);
  EXPECT_NEAR(f.dpx, fd.dpx, 1e-8);
}

TEST(Flow, CyclotronKick) {
  const auto sys = make_system(constant_mass(1.0), make_vector_potential("landau-x", 1.0), zero_field());
  const PhaseVelocity f = hamiltonian_flow({0.0, 0.0, 1.0, 0.0}, sys);
  EXPECT_DOUBLE_EQ(f.dx, 1.0);
  EXPECT_DOUBLE_EQ(f.dy, 0.0);
  EXPECT_DOUBLE_EQ(f.dpx, 0.0);
  EXPECT_DOUBLE_EQ(f.dpy, -1.0);
}

TEST(Flow, MatchesFiniteDifferencesOfH) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> pos(-2.0, 2.0), mom(-1.5, 1.5);
  const std::vector<MassProfile> masses{bump(), make_mass_profile("quadratic", {{"m0", 1.0}, {"lambda", 0.5}}),
                                        make_mass_profile("constant", {{"m0", 2.0}})};
  const std::vector<ScalarField> potentials{zero_field(), make_scalar_field("harmonic", {{"k", 1.0}}),
                                            make_scalar_field("linear", {{"c0", 0.0}, {"cx", 0.3}, {"cy", -0.7}})};
  for (const auto& m : masses) {
    for (const char* gauge : {"symmetric", "landau-x"}) {
      for (const auto& v : potentials) {
        const auto sys = make_system(m, make_vector_potential(gauge, 1.3), v);
        for (int n = 0; n < 100; ++n) {
          const ClassicalState s{pos(rng), pos(rng), mom(rng), mom(rng)};
          const PhaseVelocity a = hamiltonian_flow(s, sys), b = fd_flow(s, sys);
          const double scale = std::max({std::abs(a.dx), std::abs(a.dy), std::abs(a.dpx), std::abs(a.dpy)});
          for (auto [x, y] : {std::pair{a.dx, b.dx}, {a.dy, b.dy}, {a.dpx, b.dpx}, {a.dpy, b.dpy}}) {
            EXPECT_LE(std::abs(x - y), 1e-6 * scale) << m.kind() << " " << gauge << " " << v.kind();
          }
        }
      }
    }
  }
}

TEST(PseudoMomentum, Examples) {
  const auto free4 = make_system(constant_mass(4.0), zero_vector_potential(), zero_field());
  const auto pi = pseudo_momentum({0.3, 0.2, 2.0, 0.0}, free4);
  EXPECT_DOUBLE_EQ(pi[0], 1.0);
  EXPECT_DOUBLE_EQ(pi[1], 0.0);

  // uniform A = (1, 0) from a linear field with zero curl
  const VectorPotential a{make_scalar_field("constant", {{"c", 1.0}}), zero_field(), "constant", 0.0};
  const auto pi0 = pseudo_momentum({0.5, -0.5, 1.0, 0.0}, make_system(constant_mass(1.0), a, zero_field()));
  EXPECT_DOUBLE_EQ(pi0[0], 0.0);
  EXPECT_DOUBLE_EQ(pi0[1], 0.0);
}

TEST(Trajectory, OscillatorClosesAfterOnePeriod) {
  const auto sys = make_system(constant_mass(1.0), zero_vector_potential(), make_scalar_field("harmonic-x", {{"k", 1.0}}));
  const auto path = integrate_trajectory({1.0, 0.0, 0.0, 0.0}, sys, 2.0 * std::numbers::pi, 1e-3);
  EXPECT_DOUBLE_EQ(path.back().t, 2.0 * std::numbers::pi);
  EXPECT_NEAR(path.back().x, 1.0, 1e-8);
  EXPECT_NEAR(path.back().px, 0.0, 1e-8);
  EXPECT_DOUBLE_EQ(path[1].t, 1e-3);
  EXPECT_LE(summarize(path, sys).closure_error, 1e-8);
}

TEST(Trajectory, CyclotronOrbitIsACircle) {
  const auto sys = make_system(constant_mass(1.0), make_vector_potential("symmetric", 1.0), zero_field());
  const auto path = integrate_trajectory({0.3, -0.2, 0.9, 0.4}, sys, 10.0, 1e-3);
  // guiding center (x + v_y / w, y - v_x / w) and radius |v| / w, w = eB/M = 1
  auto center = [&sys](const ClassicalState& s) {
    const PhaseVelocity f = hamiltonian_flow(s, sys);
    return std::array<double, 3>{s.x + f.dy, s.y - f.dx, std::hypot(f.dx, f.dy)};
  };
  const auto c0 = center(path.front());
  const auto pi = pseudo_momentum(path.front(), sys);
  EXPECT_NEAR(c0[2], std::hypot(pi[0], pi[1]), 1e-14);
  for (const auto& s : path) {
    const auto c = center(s);
    ASSERT_NEAR(c[0], c0[0], 1e-8);
    ASSERT_NEAR(c[1], c0[1], 1e-8);
    ASSERT_NEAR(c[2], c0[2], 1e-8);
  }
}

TEST(Trajectory, QuasiFreeConservesEnergyAndPiSquared) {
  const auto sys = make_system(bump(), zero_vector_potential(), zero_field());
  const auto path = integrate_trajectory({0.5, -0.3, 0.2, 0.1}, sys, 10.0, 1e-3);
  const auto s = summarize(path, sys);
  EXPECT_LE(s.energy_drift, 1e-8);
  EXPECT_LE(s.pi_squared_drift, 1e-8);
  for (const auto& st : path) {
    const auto pi = pseudo_momentum(st, sys);
    ASSERT_NEAR(pi[0] * pi[0] + pi[1] * pi[1], 2.0 * classical_energy(st, sys), 1e-12);
  }
}

TEST(Trajectory, PiSquaredIsTwiceKineticEnergy) {
  const ScalarField v = make_scalar_field("harmonic", {{"k", 1.0}});
  const auto sys = make_system(bump(), make_vector_potential("symmetric", 1.0), v);
  const auto path = integrate_trajectory({0.4, 0.1, 0.3, -0.2}, sys, 5.0, 1e-2);
  for (const auto& s : path) {
    const auto pi = pseudo_momentum(s, sys);
    ASSERT_NEAR(pi[0] * pi[0] + pi[1] * pi[1], 2.0 * (classical_energy(s, sys) - v(s.x, s.y)), 1e-12);
  }
}

TEST(Trajectory, EnergyDriftIsFourthOrder) {
  const auto quasi_free = make_system(bump(), zero_vector_potential(), zero_field());
  auto drift = [](const ClassicalSystem& sys, const ClassicalState& s0, double t_end, double dt) {
    return summarize(integrate_trajectory(s0, sys, t_end, dt), sys).energy_drift;
  };
  const ClassicalState a{0.5, -0.3, 0.2, 0.1};
  EXPECT_NEAR(drift(quasi_free, a, 10.0, 0.04) / drift(quasi_free, a, 10.0, 0.02), 16.0, 16.0 * 0.3);
  const auto full = make_system(bump(), make_vector_potential("symmetric", 1.0), make_scalar_field("harmonic", {{"k", 1.0}}));
  const ClassicalState b{0.8, 0.2, 0.5, -0.6};
  EXPECT_NEAR(drift(full, b, 2.0, 0.01) / drift(full, b, 2.0, 0.005), 16.0, 16.0 * 0.3);
}

TEST(Trajectory, AbortsWithPartialPathWhenMassVanishes) {
  const auto sys = make_system(make_mass_profile("linear", {{"m0", 1.0}, {"gx", 1.0}, {"gy", 0.0}}), zero_vector_potential(),
                          zero_field());
  try {
    integrate_trajectory({0.0, 0.0, -1.0, 0.0}, sys, 10.0, 1e-3);
    FAIL() << "expected TrajectoryAborted";
  } catch (const TrajectoryAborted& e) {
    EXPECT_GT(e.partial().size(), 10u);
    EXPECT_LT(e.partial().back().t, 10.0);
    EXPECT_GT(e.partial().back().x, -1.0);
  }
  EXPECT_THROW(pseudo_momentum({-2.0, 0.0, 0.0, 0.0}, sys), PhysicsError);
}

TEST(Trajectory, RejectsBadSteps) {
  const auto sys = make_system(constant_mass(1.0), zero_vector_potential(), zero_field());
  EXPECT_THROW(integrate_trajectory({}, sys, 1.0, 0.0), ConfigError);
  EXPECT_THROW(integrate_trajectory({}, sys, 1.0, -1e-3), ConfigError);
  EXPECT_THROW(integrate_trajectory({}, sys, 0.0, 1e-3), ConfigError);
  EXPECT_THROW(integrate_trajectory({NAN, 0, 0, 0}, sys, 1.0, 1e-3), ConfigError);
}

TEST(Trajectory, CsvFormat) {
  const auto sys = make_system(constant_mass(4.0), zero_vector_potential(), zero_field());
  std::ostringstream os;
  write_trajectory_csv({{0.0, 0.0, 2.0, 0.0, 0.0}}, sys, os);
  EXPECT_EQ(os.str(), "t,x,y,px,py,pix,piy,energy\n0,0,0,2,0,1,0,0.5\n");
}
