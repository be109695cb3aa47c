#pragma once

// Command implementations behind the pdmlab CLI. Each command validates its
// config, computes, and writes its reports into an output directory.
// Reports other than timing.json depend only on the config.

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "pdmlab/classical.hpp"
#include "pdmlab/config.hpp"
#include "pdmlab/errors.hpp"
#include "pdmlab/evolution.hpp"
#include "pdmlab/operators.hpp"
#include "pdmlab/spectral.hpp"

namespace pdmlab {

namespace fs = std::filesystem;

enum ExitCode : int {
  kExitOk = 0,
  kExitValidationFailed = 1,
  kExitConfig = 2,
  kExitSolver = 3,
  kExitPhysics = 4,
  kExitInternal = 70,
};

/// PDMLAB_THREADS, default 1. Every kernel here is single-threaded, so the
/// value is only validated and reported.
inline int thread_count() {
  const char* env = std::getenv("PDMLAB_THREADS");
  if (env == nullptr || *env == '\0') return 1;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1 || v > 4096) throw ConfigError("PDMLAB_THREADS must be a positive integer");
  return static_cast<int>(v);
}

struct Physics {
  MassProfile mass;
  ScalarField potential;
  VectorPotential a;
  PhysicalConstants constants;
};

inline Physics make_physics(const RunConfig& c) { return {make_mass(c), make_potential(c), make_gauge(c), c.constants}; }

struct BuiltOperator {
  /// Matrix handed to the eigensolver (symmetrized for the literal expanded form).
  LinearOperator op;
  /// Hermiticity defect of the matrix as assembled, before any symmetrization.
  double assembled_defect = 0.0;
};

template <GridLike G>
BuiltOperator build_operator(const G& grid, const BuilderSpec& spec, const Physics& p) {
  if (spec.builder == "von_roos") {
    if (p.a.field_strength != 0.0) throw ConfigError("builder von_roos has no magnetic coupling; set gauge.B = 0");
    auto op = build_von_roos(grid, p.mass, spec.ordering.params, p.potential, p.constants);
    const double d = op.hermiticity_defect();
    return {std::move(op), d};
  }
  if (spec.builder == "corrected") {
    auto op = build_corrected_hamiltonian(grid, p.mass, p.a, p.potential, p.constants);
    const double d = op.hermiticity_defect();
    return {std::move(op), d};
  }
  if (spec.builder == "expanded") {
    auto e = build_expanded_hamiltonian(grid, p.mass, p.a, p.potential, p.constants);
    return {std::move(e.symmetrized), e.literal.hermiticity_defect()};
  }
  if (spec.builder == "dutra_oliveira") {
    auto op = build_dutra_oliveira_hamiltonian(grid, p.mass, p.a, p.potential, spec.ordering.params, p.constants);
    const double d = op.hermiticity_defect();
    return {std::move(op), d};
  }
  if (spec.builder == "constant_mass") {
    if (!p.mass.is_constant()) throw ConfigError("builder constant_mass needs mass.kind = constant");
    if (p.a.field_strength != 0.0) throw ConfigError("builder constant_mass has no magnetic coupling; set gauge.B = 0");
    auto op = build_constant_mass_hamiltonian(grid, p.mass.m0, p.potential, p.constants);
    const double d = op.hermiticity_defect();
    return {std::move(op), d};
  }
  throw ConfigError("unknown builder '" + spec.builder + "'");
}

namespace detail {

inline void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw ConfigError("cannot create output directory '" + dir.string() + "'");
}

inline void write_text(const fs::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + file.string() + "'");
  out << text;
  if (!out) throw ConfigError("failed writing '" + file.string() + "'");
}

inline void write_json(const fs::path& file, const Json& j) { write_text(file, j.dump(2) + "\n"); }

inline Json grid_json(const Grid2D& g) {
  return {{"nx", g.nx},
          {"ny", g.ny},
          {"bounds", {g.bounds.xmin, g.bounds.xmax, g.bounds.ymin, g.bounds.ymax}},
          {"hx", g.hx},
          {"hy", g.hy},
          {"dim", g.size()}};
}

inline Json spectrum_json(const Spectrum& s) {
  return {{"eigenvalues", s.eigenvalues},
          {"residuals", s.residuals},
          {"method", to_string(s.method)},
          {"iterations", s.iterations},
          {"norm_bound", s.norm_bound}};
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace detail

struct SpectrumRun {
  Spectrum spectrum;
  double assembled_defect = 0.0;
  double solver_defect = 0.0;
  double norm_max = 0.0;
  double build_seconds = 0.0;
  double solve_seconds = 0.0;
};

inline SpectrumRun run_spectrum(const Grid2D& grid, const BuilderSpec& spec, const Physics& physics,
                                const SolverOptions& solver) {
  SpectrumRun r;
  auto t0 = std::chrono::steady_clock::now();
  BuiltOperator built = build_operator(grid, spec, physics);
  r.build_seconds = detail::seconds_since(t0);
  r.assembled_defect = built.assembled_defect;
  r.solver_defect = built.op.hermiticity_defect();
  r.norm_max = built.op.max_abs();
  t0 = std::chrono::steady_clock::now();
  r.spectrum = solve_lowest(built.op, solver, grid.cell_volume());
  r.solve_seconds = detail::seconds_since(t0);
  return r;
}

/// spectrum.csv, spectrum.json (diagnostics plus resolved config) and
/// timing.json (wall times, not reproducible by nature).
inline SpectrumRun cmd_spectrum(const RunConfig& c, const fs::path& out) {
  const Grid2D grid = make_config_grid(c);
  const Physics physics = make_physics(c);
  const int threads = thread_count();
  SpectrumRun r = run_spectrum(grid, c.build, physics, c.solver);

  detail::ensure_directory(out);
  std::ostringstream csv;
  write_spectrum_csv(r.spectrum, csv);
  detail::write_text(out / "spectrum.csv", csv.str());
  Json j = {{"config", resolved_config(c)},
            {"builder", c.build.builder},
            {"grid", detail::grid_json(grid)},
            {"hermiticity_defect", r.assembled_defect},
            {"solver_matrix_hermiticity_defect", r.solver_defect},
            {"norm_max", r.norm_max},
            {"spectrum", detail::spectrum_json(r.spectrum)}};
  detail::write_json(out / "spectrum.json", j);
  detail::write_json(out / "timing.json",
                     {{"build_seconds", r.build_seconds}, {"solve_seconds", r.solve_seconds}, {"threads", threads}});
  return r;
}

struct ComparisonRun {
  DistinctnessVerdict verdict;
  Spectrum first, second, first_coarse, second_coarse;
  Grid2D fine, coarse;
  double ratio = 0.0;
};

/// Solves both Hamiltonians on the configured grid and on a coarser one
/// (n / coarse_divisor per axis, same bounds) and decides whether their
/// spectra are distinguishable beyond discretization error.
inline ComparisonRun run_comparison(const RunConfig& c) {
  if (!c.compare) throw ConfigError("config: missing 'compare' block");
  const Grid2D fine = make_config_grid(c);
  const std::size_t d = c.compare->coarse_divisor;
  const Grid2D coarse = make_grid(fine.nx / d, fine.ny / d, fine.bounds);
  const Physics physics = make_physics(c);
  ComparisonRun r{.fine = fine, .coarse = coarse};
  r.first = run_spectrum(fine, c.compare->first, physics, c.solver).spectrum;
  r.second = run_spectrum(fine, c.compare->second, physics, c.solver).spectrum;
  r.first_coarse = run_spectrum(coarse, c.compare->first, physics, c.solver).spectrum;
  r.second_coarse = run_spectrum(coarse, c.compare->second, physics, c.solver).spectrum;
  // The smaller ratio gives the larger (more conservative) error estimate.
  r.ratio = std::min(coarse.hx / fine.hx, coarse.hy / fine.hy);
  r.verdict = assess_distinctness(r.first, r.first_coarse, r.second, r.second_coarse, r.ratio, c.solver.k);
  return r;
}

inline ComparisonRun cmd_compare(const RunConfig& c, const fs::path& out) {
  thread_count();
  ComparisonRun r = run_comparison(c);
  detail::ensure_directory(out);
  Json report = to_json(r.verdict.report);
  report["config"] = resolved_config(c);
  report["verdict"] = r.verdict.label();
  report["grid"] = detail::grid_json(r.fine);
  report["refinement"] = {{"coarse_grid", detail::grid_json(r.coarse)},
                          {"ratio", r.ratio},
                          {"error_first", r.verdict.error_first},
                          {"error_second", r.verdict.error_second},
                          {"threshold", r.verdict.threshold},
                          {"coarse_first", r.first_coarse.eigenvalues},
                          {"coarse_second", r.second_coarse.eigenvalues}};
  report["first"] = detail::spectrum_json(r.first);
  report["second"] = detail::spectrum_json(r.second);
  detail::write_json(out / "compare.json", report);
  return r;
}

struct ClassicalRun {
  std::vector<ClassicalState> path;
  ConservationSummary summary;
};

/// trajectory.csv and classical.json. A mass-positivity abort still writes
/// the partial trajectory before the error propagates.
inline ClassicalRun cmd_classical(const RunConfig& c, const fs::path& out) {
  if (!c.trajectory) throw ConfigError("config: missing 'trajectory' block");
  thread_count();
  const Physics p = make_physics(c);
  const ClassicalSystem sys{p.mass, p.a, p.potential, p.constants};
  detail::ensure_directory(out);
  ClassicalRun r;
  try {
    r.path = integrate_trajectory(c.trajectory->state0, sys, c.trajectory->t_end, c.trajectory->dt);
  } catch (const TrajectoryAborted& e) {
    std::ostringstream csv;
    write_trajectory_csv(e.partial(), sys, csv);
    detail::write_text(out / "trajectory.csv", csv.str());
    detail::write_json(out / "classical.json",
                       {{"config", resolved_config(c)}, {"aborted", e.what()}, {"states", e.partial().size()}});
    throw;
  }
  r.summary = summarize(r.path, sys);
  std::ostringstream csv;
  write_trajectory_csv(r.path, sys, csv);
  detail::write_text(out / "trajectory.csv", csv.str());
  const auto& s = r.summary;
  detail::write_json(out / "classical.json",
                     {{"config", resolved_config(c)},
                      {"states", r.path.size()},
                      {"energy0", s.energy0},
                      {"energy_drift", s.energy_drift},
                      {"pi_squared_drift", s.pi_squared_drift},
                      {"closure_error", s.closure_error},
                      {"informational", {{"pi_x_drift", s.pi_x_drift}, {"pi_y_drift", s.pi_y_drift}}}});
  return r;
}

/// evolution.csv (t, <x>, <p>, <Pi>, norm, energy) and evolve.json with the
/// Ehrenfest residual |d<x>/dt - <p>/M(<x>)|. Fields are evaluated on y = 0.
inline EhrenfestReport cmd_evolve(const RunConfig& c, const fs::path& out) {
  if (!c.evolve) throw ConfigError("config: missing 'evolve' block");
  thread_count();
  if (c.gauge.field != 0.0) throw ConfigError("evolve is field-free; set gauge.B = 0");
  const auto& e = *c.evolve;
  const Grid1D grid = make_grid_1d(e.n, e.xmin, e.xmax);
  const EhrenfestReport r = ehrenfest_check(grid, make_mass(c), make_potential(c), c.constants, e.packet, e.dt, e.steps);
  detail::ensure_directory(out);
  std::ostringstream csv;
  write_time_series_csv(r, csv);
  detail::write_text(out / "evolution.csv", csv.str());
  detail::write_json(out / "evolve.json", {{"config", resolved_config(c)},
                                           {"ehrenfest_residual", r.max_residual},
                                           {"norm_drift", r.max_norm_drift},
                                           {"energy_drift", r.max_energy_drift},
                                           {"samples", r.series.size()}});
  return r;
}

}  // namespace pdmlab
