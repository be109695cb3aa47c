#pragma once

// Classical charged particle with position-dependent mass,
//   H = |P - eA|^2 / (2M) + V,
// integrated in canonical variables (x, y, Px, Py) with fixed-step RK4.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "pdmlab/errors.hpp"
#include "pdmlab/fields.hpp"

namespace pdmlab {

struct ClassicalState {
  double x = 0.0, y = 0.0;
  double px = 0.0, py = 0.0;
  double t = 0.0;
};

struct PhaseVelocity {
  double dx, dy, dpx, dpy;
};

struct ClassicalSystem {
  MassProfile mass;
  VectorPotential a;
  ScalarField potential;
  PhysicalConstants constants;
};

namespace detail {

inline double checked_mass(const MassProfile& m, double x, double y) {
  const double value = m(x, y);
  if (!(value > kMinimumMass) || !std::isfinite(value)) {
    throw PhysicsError("mass profile '" + m.kind() + "' is not positive at (" + std::to_string(x) + ", " +
                       std::to_string(y) + "): M = " + std::to_string(value));
  }
  return value;
}

}  // namespace detail

/// Kinetic momentum P - eA at the state's position.
inline std::array<double, 2> kinetic_momentum(const ClassicalState& s, const ClassicalSystem& sys) {
  const auto a = sys.a(s.x, s.y);
  return {s.px - sys.constants.charge * a[0], s.py - sys.constants.charge * a[1]};
}

inline double classical_energy(const ClassicalState& s, const ClassicalSystem& sys) {
  const double m = detail::checked_mass(sys.mass, s.x, s.y);
  const auto u = kinetic_momentum(s, sys);
  return (u[0] * u[0] + u[1] * u[1]) / (2.0 * m) + sys.potential(s.x, s.y);
}

/// Pi_j = (P_j - e A_j) / sqrt(M).
inline std::array<double, 2> pseudo_momentum(const ClassicalState& s, const ClassicalSystem& sys) {
  const double m = detail::checked_mass(sys.mass, s.x, s.y);
  const auto u = kinetic_momentum(s, sys);
  const double f = 1.0 / std::sqrt(m);
  return {u[0] * f, u[1] * f};
}

/// Hamilton's equations:
///   x_j' = u_j / M
///   P_j' = |u|^2 dM_j / (2 M^2) + (e / M) sum_k u_k dA_k/dx_j - dV_j
/// with u = P - eA.
inline PhaseVelocity hamiltonian_flow(const ClassicalState& s, const ClassicalSystem& sys) {
  const double m = detail::checked_mass(sys.mass, s.x, s.y);
  const auto u = kinetic_momentum(s, sys);
  const double e = sys.constants.charge;
  const Gradient dm = sys.mass.gradient(s.x, s.y);
  const Gradient dax = sys.a.ax.gradient(s.x, s.y);
  const Gradient day = sys.a.ay.gradient(s.x, s.y);
  const Gradient dv = sys.potential.gradient(s.x, s.y);
  const double u2 = u[0] * u[0] + u[1] * u[1];
  const double c = u2 / (2.0 * m * m);
  PhaseVelocity f{};
  f.dx = u[0] / m;
  f.dy = u[1] / m;
  f.dpx = c * dm[0] + (e / m) * (u[0] * dax[0] + u[1] * day[0]) - dv[0];
  f.dpy = c * dm[1] + (e / m) * (u[0] * dax[1] + u[1] * day[1]) - dv[1];
  return f;
}

/// Thrown when the path leaves the region of positive mass. Carries every
/// state computed before the failing step.
class TrajectoryAborted : public PhysicsError {
 public:
  TrajectoryAborted(const std::string& what, std::vector<ClassicalState> partial)
      : PhysicsError(what), partial_(std::move(partial)) {}
  const std::vector<ClassicalState>& partial() const { return partial_; }

 private:
  std::vector<ClassicalState> partial_;
};

namespace detail {

inline ClassicalState rk4_step(const ClassicalState& s, const ClassicalSystem& sys, double dt) {
  auto shifted = [&s](const PhaseVelocity& k, double f) {
    return ClassicalState{s.x + f * k.dx, s.y + f * k.dy, s.px + f * k.dpx, s.py + f * k.dpy, s.t};
  };
  const PhaseVelocity k1 = hamiltonian_flow(s, sys);
  const PhaseVelocity k2 = hamiltonian_flow(shifted(k1, 0.5 * dt), sys);
  const PhaseVelocity k3 = hamiltonian_flow(shifted(k2, 0.5 * dt), sys);
  const PhaseVelocity k4 = hamiltonian_flow(shifted(k3, dt), sys);
  const double w = dt / 6.0;
  return {s.x + w * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx),
          s.y + w * (k1.dy + 2.0 * k2.dy + 2.0 * k3.dy + k4.dy),
          s.px + w * (k1.dpx + 2.0 * k2.dpx + 2.0 * k3.dpx + k4.dpx),
          s.py + w * (k1.dpy + 2.0 * k2.dpy + 2.0 * k3.dpy + k4.dpy), s.t + dt};
}

}  // namespace detail

/// States at t = 0, dt, 2dt, ...; the last step is shortened so the final
/// state sits exactly at t_end.
inline std::vector<ClassicalState> integrate_trajectory(const ClassicalState& state0, const ClassicalSystem& sys,
                                                        double t_end, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("trajectory: dt must be > 0");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ConfigError("trajectory: t_end must be > 0");
  for (double v : {state0.x, state0.y, state0.px, state0.py}) {
    if (!std::isfinite(v)) throw ConfigError("trajectory: initial state must be finite");
  }
  const auto steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
  std::vector<ClassicalState> out;
  out.reserve(steps + 1);
  ClassicalState s = state0;
  s.t = 0.0;
  try {
    classical_energy(s, sys);
    out.push_back(s);
    for (std::size_t i = 1; i <= steps; ++i) {
      const double h = i == steps ? t_end - static_cast<double>(steps - 1) * dt : dt;
      s = detail::rk4_step(s, sys, h);
      s.t = i == steps ? t_end : static_cast<double>(i) * dt;
      classical_energy(s, sys);
      out.push_back(s);
    }
  } catch (const PhysicsError& e) {
    throw TrajectoryAborted(std::string("trajectory aborted at t = ") + std::to_string(s.t) + ": " + e.what(),
                            std::move(out));
  }
  return out;
}

struct ConservationSummary {
  double energy0 = 0.0;
  /// max |H(t) - H(0)| / |H(0)|
  double energy_drift = 0.0;
  /// max ||Pi(t)|^2 - |Pi(0)|^2| / |Pi(0)|^2
  double pi_squared_drift = 0.0;
  /// max |Pi_j(t) - Pi_j(0)|, informational only.
  double pi_x_drift = 0.0;
  double pi_y_drift = 0.0;
  /// max over components of |state(t_end) - state(0)|
  double closure_error = 0.0;
};

inline ConservationSummary summarize(const std::vector<ClassicalState>& path, const ClassicalSystem& sys) {
  if (path.empty()) throw ConfigError("summarize: empty trajectory");
  ConservationSummary c;
  const auto& s0 = path.front();
  c.energy0 = classical_energy(s0, sys);
  const auto pi0 = pseudo_momentum(s0, sys);
  const double p2_0 = pi0[0] * pi0[0] + pi0[1] * pi0[1];
  const double e_scale = std::abs(c.energy0) > 0.0 ? std::abs(c.energy0) : 1.0;
  const double p_scale = p2_0 > 0.0 ? p2_0 : 1.0;
  for (const auto& s : path) {
    const auto pi = pseudo_momentum(s, sys);
    c.energy_drift = std::max(c.energy_drift, std::abs(classical_energy(s, sys) - c.energy0) / e_scale);
    c.pi_squared_drift = std::max(c.pi_squared_drift, std::abs(pi[0] * pi[0] + pi[1] * pi[1] - p2_0) / p_scale);
    c.pi_x_drift = std::max(c.pi_x_drift, std::abs(pi[0] - pi0[0]));
    c.pi_y_drift = std::max(c.pi_y_drift, std::abs(pi[1] - pi0[1]));
  }
  const auto& s1 = path.back();
  c.closure_error = std::max({std::abs(s1.x - s0.x), std::abs(s1.y - s0.y), std::abs(s1.px - s0.px),
                              std::abs(s1.py - s0.py)});
  return c;
}

inline void write_trajectory_csv(const std::vector<ClassicalState>& path, const ClassicalSystem& sys,
                                 std::ostream& os) {
  os << "t,x,y,px,py,pix,piy,energy\n";
  char buf[256];
  for (const auto& s : path) {
    const auto pi = pseudo_momentum(s, sys);
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", s.t, s.x, s.y, s.px, s.py,
                  pi[0], pi[1], classical_energy(s, sys));
    os << buf;
  }
}

}  // namespace pdmlab
