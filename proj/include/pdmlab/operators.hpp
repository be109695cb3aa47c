#pragma once

// Hamiltonian and momentum operators for a position-dependent-mass particle
// in a magnetic field, assembled as sparse matrices on a Dirichlet grid.
//
// Every first-order Hermitian operator of continuum form -i hbar (f d + f'/2)
// is discretized as -i hbar (F D + D F) / 2 with D the antisymmetric central
// difference, so symmetric compositions are Hermitian to rounding.

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "pdmlab/errors.hpp"
#include "pdmlab/fields.hpp"
#include "pdmlab/grid.hpp"

namespace pdmlab {

/// von Roos ordering triplet, alpha + beta + gamma = -1.
struct OrderingParams {
  double alpha;
  double beta;
  double gamma;
};

inline constexpr double kOrderingConstraintTolerance = 1e-12;

inline OrderingParams make_ordering(double alpha, double beta, double gamma) {
  if (!std::isfinite(alpha) || !std::isfinite(beta) || !std::isfinite(gamma)) {
    throw ConfigError("ordering parameters must be finite");
  }
  if (std::abs(alpha + beta + gamma + 1.0) > kOrderingConstraintTolerance) {
    throw ConfigError("ordering (" + std::to_string(alpha) + ", " + std::to_string(beta) + ", " +
                      std::to_string(gamma) + ") violates the von Roos constraint alpha + beta + gamma = -1");
  }
  return {alpha, beta, gamma};
}

namespace orderings {
inline constexpr OrderingParams zhu_kroemer{-0.5, 0.0, -0.5};
inline constexpr OrderingParams symmetric_split{-0.25, -0.5, -0.25};
inline constexpr OrderingParams bendaniel_duke{0.0, -1.0, 0.0};
}  // namespace orderings

inline OrderingParams ordering_preset(const std::string& name) {
  if (name == "zhu-kroemer" || name == "ZK") return orderings::zhu_kroemer;
  if (name == "symmetric-split") return orderings::symmetric_split;
  if (name == "bendaniel-duke" || name == "BDD") return orderings::bendaniel_duke;
  throw ConfigError("unknown ordering preset '" + name + "'");
}

enum class MomentumForm {
  /// P = -i hbar [D - dM/(4M)], not Hermitian.
  canonical,
  /// Pi = -i hbar (F D + D F) / 2 with F = M^(-1/2), exactly Hermitian.
  hermitian,
};

struct ExpandedHamiltonian {
  LinearOperator literal;
  LinearOperator symmetrized;
};

namespace detail {

inline const Complex kI{0.0, 1.0};

template <GridLike G>
std::vector<double> mass_samples(const G& grid, const MassProfile& mass) {
  auto m = sample_nodes(grid, mass);
  for (std::size_t k = 0; k < m.size(); ++k) {
    if (!(m[k] >= kMinimumMass) || !std::isfinite(m[k])) {
      const Node p = grid.node(k);
      throw PhysicsError("mass profile '" + mass.kind() + "' is not positive at node " + std::to_string(k) + " (" +
                         std::to_string(p.x) + ", " + std::to_string(p.y) + "): M = " + std::to_string(m[k]));
    }
  }
  return m;
}

inline SparseMatrix power_diagonal(const std::vector<double>& m, double exponent) {
  std::vector<double> out(m.size());
  for (std::size_t k = 0; k < m.size(); ++k) out[k] = std::pow(m[k], exponent);
  return diagonal_matrix(out);
}

template <GridLike G>
SparseMatrix potential_diagonal(const G& grid, const ScalarField& v) {
  return sample_diagonal(grid, v).matrix();
}

inline const ScalarField& component(const VectorPotential& a, Axis axis) { return axis == Axis::x ? a.ax : a.ay; }

// diag(A_axis(node) * M(node)^power)
template <GridLike G>
SparseMatrix scaled_potential(const G& grid, const VectorPotential& a, Axis axis, const std::vector<double>& m,
                              double power) {
  const auto values = sample_nodes(grid, component(a, axis));
  std::vector<double> out(values.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = values[k] * std::pow(m[k], power);
  return diagonal_matrix(out);
}

template <GridLike G>
SparseMatrix von_roos_kinetic(const G& grid, const std::vector<double>& m, const OrderingParams& o,
                              const PhysicalConstants& c) {
  const SparseMatrix ma = power_diagonal(m, o.alpha);
  const SparseMatrix mb = power_diagonal(m, o.beta);
  const SparseMatrix mg = power_diagonal(m, o.gamma);
  const int n = static_cast<int>(grid.size());
  SparseMatrix h(n, n);
  for (Axis axis : axes(grid)) {
    const SparseMatrix d = build_derivative(grid, axis, 1).matrix();
    const SparseMatrix left = ma * d * mb * d * mg;
    const SparseMatrix right = mg * d * mb * d * ma;
    h += Complex(-0.25 * c.hbar * c.hbar) * (left + right);
  }
  return h;
}

template <GridLike G>
SparseMatrix momentum(const G& grid, const std::vector<double>& m, const MassProfile& mass, Axis axis,
                      MomentumForm form, const PhysicalConstants& c) {
  const SparseMatrix d = build_derivative(grid, axis, 1).matrix();
  if (form == MomentumForm::canonical) {
    std::vector<double> g(m.size());
    for (std::size_t k = 0; k < m.size(); ++k) {
      const Node p = grid.node(k);
      g[k] = mass.gradient(p.x, p.y)[static_cast<int>(axis)] / (4.0 * m[k]);
    }
    return Complex(0.0, -c.hbar) * SparseMatrix(d - diagonal_matrix(g));
  }
  const SparseMatrix f = power_diagonal(m, -0.5);
  return Complex(0.0, -0.5 * c.hbar) * SparseMatrix(f * d + d * f);
}

}  // namespace detail

/// H = -(hbar^2/4) sum_j [M^a D_j M^b D_j M^g + M^g D_j M^b D_j M^a] + V.
template <GridLike G>
LinearOperator build_von_roos(const G& grid, const MassProfile& mass, const OrderingParams& ordering,
                              const ScalarField& potential, const PhysicalConstants& constants = {}) {
  const auto m = detail::mass_samples(grid, mass);
  SparseMatrix h = detail::von_roos_kinetic(grid, m, ordering, constants);
  h += detail::potential_diagonal(grid, potential);
  return LinearOperator(std::move(h));
}

template <GridLike G>
LinearOperator build_pdm_momentum(const G& grid, const MassProfile& mass, Axis axis, MomentumForm form,
                                  const PhysicalConstants& constants = {}) {
  const auto m = detail::mass_samples(grid, mass);
  return LinearOperator(detail::momentum(grid, m, mass, axis, form, constants));
}

/// H = 1/2 sum_j O_j^2 + V with O_j = Pi_j - e A_j / sqrt(M).
template <GridLike G>
LinearOperator build_corrected_hamiltonian(const G& grid, const MassProfile& mass, const VectorPotential& a,
                                           const ScalarField& potential, const PhysicalConstants& constants = {}) {
  const auto m = detail::mass_samples(grid, mass);
  const int n = static_cast<int>(grid.size());
  SparseMatrix h(n, n);
  for (Axis axis : axes(grid)) {
    const SparseMatrix pi = detail::momentum(grid, m, mass, axis, MomentumForm::hermitian, constants);
    const SparseMatrix coupling = constants.charge * detail::scaled_potential(grid, a, axis, m, -0.5);
    const SparseMatrix o = pi - coupling;
    h += Complex(0.5) * SparseMatrix(o * o);
  }
  h += detail::potential_diagonal(grid, potential);
  return LinearOperator(std::move(h));
}

/// Term-by-term assembly
///   1/2 sum_j [Pi_j^2 + (eA_j/sqrt M)^2 - (eA_j/M) P_j - Pi_j (eA_j/sqrt M)] + V
/// with the canonical P_j in the third term, as written. The literal form is
/// not Hermitian at finite h; its defect is recorded on `literal`.
template <GridLike G>
ExpandedHamiltonian build_expanded_hamiltonian(const G& grid, const MassProfile& mass, const VectorPotential& a,
                                               const ScalarField& potential,
                                               const PhysicalConstants& constants = {}) {
  const auto m = detail::mass_samples(grid, mass);
  const int n = static_cast<int>(grid.size());
  SparseMatrix h(n, n);
  for (Axis axis : axes(grid)) {
    const SparseMatrix pi = detail::momentum(grid, m, mass, axis, MomentumForm::hermitian, constants);
    const SparseMatrix p = detail::momentum(grid, m, mass, axis, MomentumForm::canonical, constants);
    const SparseMatrix a_half = constants.charge * detail::scaled_potential(grid, a, axis, m, -0.5);
    const SparseMatrix a_full = constants.charge * detail::scaled_potential(grid, a, axis, m, -1.0);
    const SparseMatrix terms = pi * pi + a_half * a_half - a_full * p - pi * a_half;
    h += Complex(0.5) * terms;
  }
  h += detail::potential_diagonal(grid, potential);
  LinearOperator literal(h);
  LinearOperator symmetrized = literal.symmetrized();
  return {std::move(literal), std::move(symmetrized)};
}

/// von Roos kinetic term plus the magnetic terms written with A~ = A / M:
///   H_vR(V = 0) - (e/2) sum_j [A~_j p_j + p_j A~_j] + (e^2/2) M |A~|^2 + V,
/// with p_j = -i hbar D_j.
template <GridLike G>
LinearOperator build_dutra_oliveira_hamiltonian(const G& grid, const MassProfile& mass, const VectorPotential& a,
                                                const ScalarField& potential,
                                                const OrderingParams& ordering = orderings::zhu_kroemer,
                                                const PhysicalConstants& constants = {}) {
  const auto m = detail::mass_samples(grid, mass);
  SparseMatrix h = detail::von_roos_kinetic(grid, m, ordering, constants);
  std::vector<double> a_squared(m.size(), 0.0);
  for (Axis axis : axes(grid)) {
    const SparseMatrix p = Complex(0.0, -constants.hbar) * build_derivative(grid, axis, 1).matrix();
    const SparseMatrix scaled = detail::scaled_potential(grid, a, axis, m, -1.0);
    h -= Complex(0.5 * constants.charge) * SparseMatrix(scaled * p + p * scaled);
    const auto values = sample_nodes(grid, detail::component(a, axis));
    for (std::size_t k = 0; k < m.size(); ++k) {
      const double tilde = values[k] / m[k];
      a_squared[k] += m[k] * tilde * tilde;
    }
  }
  for (auto& v : a_squared) v *= 0.5 * constants.charge * constants.charge;
  h += diagonal_matrix(a_squared);
  h += detail::potential_diagonal(grid, potential);
  return LinearOperator(std::move(h));
}

/// Constant-mass Hamiltonian on the compact 3-point Laplacian,
/// -(hbar^2 / 2 m0) sum_j D2_j + V. Unlike the D-squared forms above it has
/// no decoupled sublattices, so it is the reference for oscillator spectra.
template <GridLike G>
LinearOperator build_constant_mass_hamiltonian(const G& grid, double m0, const ScalarField& potential,
                                               const PhysicalConstants& constants = {}) {
  if (!(m0 > 0.0)) throw ConfigError("constant mass must be > 0");
  const int n = static_cast<int>(grid.size());
  SparseMatrix h(n, n);
  for (Axis axis : axes(grid)) {
    h += Complex(-0.5 * constants.hbar * constants.hbar / m0) * build_derivative(grid, axis, 2).matrix();
  }
  h += detail::potential_diagonal(grid, potential);
  return LinearOperator(std::move(h));
}

/// diag(exp(i e chi / hbar)), the wavefunction side of A -> A + grad chi.
template <GridLike G>
LinearOperator gauge_phase(const G& grid, const ScalarField& chi, const PhysicalConstants& constants = {}) {
  const auto values = sample_nodes(grid, chi);
  std::vector<Complex> phases(values.size());
  for (std::size_t k = 0; k < values.size(); ++k) {
    phases[k] = std::polar(1.0, constants.charge * values[k] / constants.hbar);
  }
  return LinearOperator(diagonal_matrix(phases));
}

/// ||A - B||_max, the largest entry magnitude of the difference.
inline double max_abs_difference(const LinearOperator& a, const LinearOperator& b) {
  return max_abs(SparseMatrix(a.matrix() - b.matrix()));
}

/// max_k |((A - B) phi)_k| for a smooth probe phi: the discrete consistency
/// error between two discretizations of the same continuum operator.
inline double consistency_defect(const LinearOperator& a, const LinearOperator& b, const ComplexVector& probe) {
  const ComplexVector diff = a.apply(probe) - b.apply(probe);
  return diff.cwiseAbs().maxCoeff();
}

/// exp(-|r - c|^2 / (2 sigma^2)) sampled on the nodes.
template <GridLike G>
ComplexVector gaussian_probe(const G& grid, double sigma, Node center = {0.0, 0.0}) {
  ComplexVector v(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Node p = grid.node(k);
    const double dx = p.x - center.x;
    const double dy = G::dimension == 1 ? 0.0 : p.y - center.y;
    v[static_cast<Eigen::Index>(k)] = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
  }
  return v;
}

}  // namespace pdmlab
