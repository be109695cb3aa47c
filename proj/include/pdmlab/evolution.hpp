#pragma once

// 1D wavepacket propagation with the Cayley (Crank-Nicolson) form
//   (1 + i dt H / 2hbar) psi' = (1 - i dt H / 2hbar) psi
// and Ehrenfest-relation diagnostics.

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "pdmlab/errors.hpp"
#include "pdmlab/fields.hpp"
#include "pdmlab/grid.hpp"
#include "pdmlab/operators.hpp"

namespace pdmlab {

struct Wavefunction1D {
  Grid1D grid;
  ComplexVector psi;

  double norm() const { return psi.squaredNorm() * grid.h; }
  Wavefunction1D normalized() const {
    const double n = norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw PhysicsError("wavefunction cannot be normalized");
    return {grid, psi / std::sqrt(n)};
  }
};

struct PacketParams {
  double x0 = 0.0;
  double k0 = 0.0;
  /// Position standard deviation of |psi|^2.
  double sigma = 1.0;
};

/// exp(-(x - x0)^2 / (4 sigma^2) + i k0 x), normalized on the grid.
inline Wavefunction1D gaussian_packet(const Grid1D& grid, const PacketParams& p) {
  if (!(p.sigma > 0.0)) throw ConfigError("packet: sigma must be > 0");
  ComplexVector psi(static_cast<Eigen::Index>(grid.n));
  for (std::size_t i = 0; i < grid.n; ++i) {
    const double x = grid.coordinate(i);
    const double d = x - p.x0;
    psi[static_cast<Eigen::Index>(i)] = std::exp(-d * d / (4.0 * p.sigma * p.sigma)) * std::polar(1.0, p.k0 * x);
  }
  return Wavefunction1D{grid, psi}.normalized();
}

class CrankNicolson {
 public:
  CrankNicolson(const LinearOperator& h, double dt, const PhysicalConstants& constants = {}) : dt_(dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("propagation: dt must be > 0");
    const double scale = std::max(h.max_abs(), 1e-300);
    if (h.hermiticity_defect() > 1e-10 * scale) throw ConfigError("propagation: Hamiltonian is not Hermitian");
    const int n = static_cast<int>(h.dim());
    SparseMatrix identity(n, n);
    identity.setIdentity();
    const Complex c(0.0, 0.5 * dt / constants.hbar);
    const Eigen::SparseMatrix<Complex> lhs = identity + c * h.matrix();
    rhs_ = identity - c * h.matrix();
    lu_.compute(lhs);
    if (lu_.info() != Eigen::Success) throw SolverError("propagation: LU factorization failed");
  }

  ComplexVector step(const ComplexVector& psi) const {
    ComplexVector out = lu_.solve(rhs_ * psi);
    if (lu_.info() != Eigen::Success) throw SolverError("propagation: linear solve failed");
    return out;
  }

  double dt() const { return dt_; }

 private:
  double dt_;
  SparseMatrix rhs_;
  Eigen::SparseLU<Eigen::SparseMatrix<Complex>> lu_;
};

inline Wavefunction1D propagate(const Wavefunction1D& psi, const LinearOperator& h, double dt, std::size_t steps,
                                const PhysicalConstants& constants = {}) {
  if (h.dim() != psi.grid.n) throw ConfigError("propagation: Hamiltonian and wavefunction sizes differ");
  const CrankNicolson cn(h, dt, constants);
  Wavefunction1D out = psi;
  for (std::size_t s = 0; s < steps; ++s) out.psi = cn.step(out.psi);
  return out;
}

struct Expectations {
  double mean_x;
  /// Re <psi, -i hbar D psi>
  double mean_p_canonical;
  /// <psi, Pi psi> with the Hermitian Pi = -i hbar (F D + D F) / 2, F = M^(-1/2).
  double mean_pi;
};

inline constexpr double kNormalizationTolerance = 1e-8;

/// Precomputed observables for repeated measurements on one grid.
class Observables {
 public:
  Observables(const Grid1D& grid, const MassProfile& mass, const PhysicalConstants& constants = {})
      : grid_(grid),
        p_(Complex(0.0, -constants.hbar) * build_derivative(grid, Axis::x, 1).matrix()),
        pi_(build_pdm_momentum(grid, mass, Axis::x, MomentumForm::hermitian, constants).matrix()) {
    x_.resize(static_cast<Eigen::Index>(grid.n));
    for (std::size_t i = 0; i < grid.n; ++i) x_[static_cast<Eigen::Index>(i)] = grid.coordinate(i);
  }

  Expectations measure(const ComplexVector& psi) const {
    const double norm = psi.squaredNorm() * grid_.h;
    if (std::abs(norm - 1.0) > kNormalizationTolerance) {
      throw ConfigError("expectations need a normalized wavefunction (norm = " + std::to_string(norm) + ")");
    }
    const double h = grid_.h;
    Expectations e{};
    e.mean_x = psi.cwiseAbs2().dot(x_) * h;
    e.mean_p_canonical = psi.dot(p_ * psi).real() * h;
    e.mean_pi = psi.dot(pi_ * psi).real() * h;
    return e;
  }

 private:
  Grid1D grid_;
  SparseMatrix p_;
  SparseMatrix pi_;
  Eigen::VectorXd x_;
};

inline Expectations expectations(const Wavefunction1D& psi, const MassProfile& mass,
                                 const PhysicalConstants& constants = {}) {
  return Observables(psi.grid, mass, constants).measure(psi.psi);
}

struct EhrenfestSample {
  double t;
  double mean_x;
  double mean_p;
  double mean_pi;
  double norm;
  double energy;
};

struct EhrenfestReport {
  std::vector<EhrenfestSample> series;
  /// |d<x>/dt - <p>/M(<x>)| at interior samples (centered difference, step 2 dt).
  std::vector<double> residuals;
  double max_residual = 0.0;
  double max_norm_drift = 0.0;
  double max_energy_drift = 0.0;
};

/// Evolves a Gaussian packet under the corrected 1D Hamiltonian
/// (1/2) Pi^2 + V and measures how far d<x>/dt is from <p>/M(<x>). For
/// constant mass this is the Ehrenfest relation; for a varying mass the
/// naive relation is expected to fail.
inline EhrenfestReport ehrenfest_check(const Grid1D& grid, const MassProfile& mass, const ScalarField& potential,
                                       const PhysicalConstants& constants, const PacketParams& packet, double dt,
                                       std::size_t steps) {
  if (steps < 2) throw ConfigError("ehrenfest: need at least 2 steps");
  const LinearOperator h = build_corrected_hamiltonian(grid, mass, zero_vector_potential(), potential, constants);
  const CrankNicolson cn(h, dt, constants);
  const Observables obs(grid, mass, constants);

  EhrenfestReport r;
  Wavefunction1D psi = gaussian_packet(grid, packet);
  auto record = [&](double t) {
    const Expectations e = obs.measure(psi.psi);
    const double energy = psi.psi.dot(h.apply(psi.psi)).real() * grid.h;
    r.series.push_back({t, e.mean_x, e.mean_p_canonical, e.mean_pi, psi.norm(), energy});
  };
  record(0.0);
  for (std::size_t s = 1; s <= steps; ++s) {
    psi.psi = cn.step(psi.psi);
    record(static_cast<double>(s) * dt);
  }

  const auto& first = r.series.front();
  for (std::size_t i = 1; i + 1 < r.series.size(); ++i) {
    const auto& s = r.series[i];
    const double velocity = (r.series[i + 1].mean_x - r.series[i - 1].mean_x) / (2.0 * dt);
    const double m = mass(s.mean_x, 0.0);
    const double res = std::abs(velocity - s.mean_p / m);
    r.residuals.push_back(res);
    r.max_residual = std::max(r.max_residual, res);
  }
  for (const auto& s : r.series) {
    r.max_norm_drift = std::max(r.max_norm_drift, std::abs(s.norm - first.norm));
    const double scale = std::abs(first.energy) > 0.0 ? std::abs(first.energy) : 1.0;
    r.max_energy_drift = std::max(r.max_energy_drift, std::abs(s.energy - first.energy) / scale);
  }
  return r;
}

inline void write_time_series_csv(const EhrenfestReport& r, std::ostream& os) {
  os << "t,mean_x,mean_p,mean_pi,norm,energy\n";
  char buf[256];
  for (const auto& s : r.series) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", s.t, s.mean_x, s.mean_p, s.mean_pi, s.norm,
                  s.energy);
    os << buf;
  }
}

}  // namespace pdmlab
