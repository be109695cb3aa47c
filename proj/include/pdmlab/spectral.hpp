#pragma once

// Lowest eigenpairs of Hermitian grid operators and level-by-level spectrum
// comparison.

#include <Eigen/Dense>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "pdmlab/errors.hpp"
#include "pdmlab/grid.hpp"
#include "pdmlab/lanczos.hpp"

namespace pdmlab {

enum class SolverMethod { dense, lanczos };

inline const char* to_string(SolverMethod m) { return m == SolverMethod::dense ? "dense" : "lanczos"; }

inline SolverMethod parse_solver_method(const std::string& s) {
  if (s == "dense") return SolverMethod::dense;
  if (s == "lanczos") return SolverMethod::lanczos;
  throw ConfigError("unknown solver method '" + s + "' (expected dense or lanczos)");
}

inline constexpr std::size_t kDenseDimensionLimit = 2500;

struct SolverOptions {
  std::size_t k = 5;
  SolverMethod method = SolverMethod::lanczos;
  /// Residual bound relative to ||H||_inf.
  double tol = 1e-8;
  std::uint64_t seed = 1;
  std::size_t max_restarts = 2000;
  /// 0 picks max(30 * block, 120).
  std::size_t max_basis = 0;
  /// 0 picks k + 2.
  std::size_t block = 0;
};

struct Spectrum {
  std::vector<double> eigenvalues;
  /// Columns normalized so that sum |psi|^2 * cell_volume = 1.
  Eigen::MatrixXcd eigenvectors;
  /// ||H psi - E psi||_2 for the unit 2-norm eigenvector.
  std::vector<double> residuals;
  SolverMethod method = SolverMethod::dense;
  std::size_t iterations = 0;
  double norm_bound = 0.0;
  double cell_volume = 1.0;

  std::size_t size() const { return eigenvalues.size(); }
  double max_residual() const {
    return residuals.empty() ? 0.0 : *std::max_element(residuals.begin(), residuals.end());
  }
};

namespace detail {

inline void check_solve_preconditions(const LinearOperator& op, const SolverOptions& opts) {
  const double scale = std::max(op.max_abs(), 1e-300);
  if (op.hermiticity_defect() > 1e-10 * scale) {
    throw ConfigError("eigensolver input is not Hermitian (defect " + std::to_string(op.hermiticity_defect()) +
                      "); symmetrize it first");
  }
  if (opts.k < 1 || 4 * opts.k > op.dim()) {
    throw ConfigError("eigensolver: k = " + std::to_string(opts.k) + " outside [1, dim/4] for dim " +
                      std::to_string(op.dim()));
  }
  if (!(opts.tol > 0.0)) throw ConfigError("eigensolver: tol must be > 0");
  if (opts.method == SolverMethod::dense && op.dim() > kDenseDimensionLimit) {
    throw ConfigError("dense solver limited to dim <= " + std::to_string(kDenseDimensionLimit));
  }
}

inline Spectrum package(const Eigen::VectorXd& values, const Eigen::MatrixXcd& unit_vectors,
                        const Eigen::VectorXd& residuals, double cell_volume) {
  Spectrum s;
  s.eigenvalues.assign(values.data(), values.data() + values.size());
  s.residuals.assign(residuals.data(), residuals.data() + residuals.size());
  s.eigenvectors = unit_vectors / std::sqrt(cell_volume);
  s.cell_volume = cell_volume;
  return s;
}

}  // namespace detail

/// k lowest eigenpairs. Residuals are recomputed from an explicit product
/// with H and must satisfy ||H psi - E psi|| <= tol * ||H||_inf.
inline Spectrum solve_lowest(const LinearOperator& op, const SolverOptions& opts, double cell_volume = 1.0) {
  detail::check_solve_preconditions(op, opts);
  if (!(cell_volume > 0.0)) throw ConfigError("eigensolver: cell volume must be > 0");
  const double norm = op.norm_bound();
  const double abs_tol = opts.tol * norm;
  const Eigen::Index k = static_cast<Eigen::Index>(opts.k);

  Spectrum s;
  if (opts.method == SolverMethod::dense) {
    const Eigen::MatrixXcd dense = Eigen::MatrixXcd(op.matrix());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dense);
    if (es.info() != Eigen::Success) throw SolverError("dense eigensolver failed");
    const Eigen::MatrixXcd v = es.eigenvectors().leftCols(k);
    const Eigen::VectorXd e = es.eigenvalues().head(k);
    const Eigen::MatrixXcd r = op.matrix() * v - v * e.asDiagonal();
    Eigen::VectorXd res(k);
    for (Eigen::Index c = 0; c < k; ++c) res[c] = r.col(c).norm();
    s = detail::package(e, v, res, cell_volume);
    s.iterations = 1;
  } else {
    const std::size_t block = opts.block ? opts.block : opts.k + 2;
    const std::size_t basis = opts.max_basis ? opts.max_basis : std::max<std::size_t>(30 * block, 120);
    detail::BlockLanczos solver(op.matrix(), block, basis, opts.seed);
    const auto result = solver.run(opts.k, abs_tol, opts.max_restarts);
    if (!result.converged) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "lanczos did not converge after %zu restarts (%zu matvecs): worst residual %.3e > %.3e",
                    result.restarts, result.matvecs, result.residuals.maxCoeff(), abs_tol);
      throw SolverError(buf);
    }
    s = detail::package(result.values, result.vectors, result.residuals, cell_volume);
    s.iterations = result.matvecs;
  }
  s.method = opts.method;
  s.norm_bound = norm;
  if (s.max_residual() > abs_tol) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "eigensolver residual %.3e exceeds %.3e", s.max_residual(), abs_tol);
    throw SolverError(buf);
  }
  return s;
}

struct LevelDifference {
  std::size_t level;
  double e1, e2;
  double abs_diff;
  double rel_diff;
};

struct ComparisonReport {
  std::vector<LevelDifference> levels;
  double max_abs_diff = 0.0;
  double mean_abs_diff = 0.0;
  double max_rel_diff = 0.0;
  double mean_rel_diff = 0.0;
};

/// rel_diff = |e1 - e2| / max(|e1|, |e2|), 0 when both vanish.
inline ComparisonReport compare_spectra(const std::vector<double>& s1, const std::vector<double>& s2, std::size_t k) {
  if (k == 0 || k > s1.size() || k > s2.size()) {
    throw ConfigError("compare_spectra: k = " + std::to_string(k) + " exceeds available levels");
  }
  ComparisonReport r;
  for (std::size_t i = 0; i < k; ++i) {
    const double d = std::abs(s1[i] - s2[i]);
    const double scale = std::max(std::abs(s1[i]), std::abs(s2[i]));
    const double rel = scale > 0.0 ? d / scale : 0.0;
    r.levels.push_back({i, s1[i], s2[i], d, rel});
    r.max_abs_diff = std::max(r.max_abs_diff, d);
    r.max_rel_diff = std::max(r.max_rel_diff, rel);
    r.mean_abs_diff += d / static_cast<double>(k);
    r.mean_rel_diff += rel / static_cast<double>(k);
  }
  return r;
}

inline ComparisonReport compare_spectra(const Spectrum& s1, const Spectrum& s2, std::size_t k) {
  return compare_spectra(s1.eigenvalues, s2.eigenvalues, k);
}

/// Per-level discretization error of a fine solve from one coarser solve,
/// assuming O(h^2) convergence: |E_fine - E_coarse| / (r^2 - 1), r = h_coarse / h_fine.
inline std::vector<double> richardson_error(const std::vector<double>& fine, const std::vector<double>& coarse,
                                            double ratio, std::size_t k) {
  if (!(ratio > 1.0)) throw ConfigError("richardson_error: refinement ratio must be > 1");
  if (k > fine.size() || k > coarse.size()) throw ConfigError("richardson_error: not enough levels");
  std::vector<double> err(k);
  for (std::size_t i = 0; i < k; ++i) err[i] = std::abs(fine[i] - coarse[i]) / (ratio * ratio - 1.0);
  return err;
}

inline constexpr const char* kVerdictDistinct = "distinct";
inline constexpr const char* kVerdictIndistinguishable = "indistinguishable at this resolution";

struct DistinctnessVerdict {
  ComparisonReport report;
  std::vector<double> error_first, error_second;
  /// 5 * max(error_first, error_second, resolution floor) per level.
  std::vector<double> threshold;
  bool distinct = false;

  const char* label() const { return distinct ? kVerdictDistinct : kVerdictIndistinguishable; }
};

/// "distinct" iff some level among the first k differs by more than five
/// times its refinement-estimated discretization error. The floor keeps
/// solver noise from counting as a difference when both errors vanish.
inline DistinctnessVerdict assess_distinctness(const Spectrum& first_fine, const Spectrum& first_coarse,
                                               const Spectrum& second_fine, const Spectrum& second_coarse,
                                               double ratio, std::size_t k) {
  DistinctnessVerdict v;
  v.report = compare_spectra(first_fine, second_fine, k);
  v.error_first = richardson_error(first_fine.eigenvalues, first_coarse.eigenvalues, ratio, k);
  v.error_second = richardson_error(second_fine.eigenvalues, second_coarse.eigenvalues, ratio, k);
  for (std::size_t i = 0; i < k; ++i) {
    const double floor = first_fine.residuals[i] + second_fine.residuals[i] +
                         1e-10 * std::max(first_fine.norm_bound, second_fine.norm_bound);
    const double t = 5.0 * std::max({v.error_first[i], v.error_second[i], floor});
    v.threshold.push_back(t);
    v.distinct = v.distinct || v.report.levels[i].abs_diff > t;
  }
  return v;
}

inline void write_spectrum_csv(const Spectrum& s, std::ostream& os) {
  os << "index,energy,residual\n";
  char buf[96];
  for (std::size_t i = 0; i < s.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", i, s.eigenvalues[i], s.residuals[i]);
    os << buf;
  }
}

inline nlohmann::json to_json(const ComparisonReport& r) {
  nlohmann::json levels = nlohmann::json::array();
  for (const auto& l : r.levels) {
    levels.push_back({{"level", l.level}, {"e1", l.e1}, {"e2", l.e2}, {"abs_diff", l.abs_diff}, {"rel_diff", l.rel_diff}});
  }
  return {{"levels", levels},
          {"summary",
           {{"max_abs_diff", r.max_abs_diff},
            {"mean_abs_diff", r.mean_abs_diff},
            {"max_rel_diff", r.max_rel_diff},
            {"mean_rel_diff", r.mean_rel_diff}}}};
}

}  // namespace pdmlab
