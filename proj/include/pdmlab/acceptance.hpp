#pragma once

// Acceptance suite: twelve end-to-end criteria, each printing one verdict
// line. Shared by `pdmlab validate` and the acceptance test binary.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pdmlab/classical.hpp"
#include "pdmlab/commands.hpp"
#include "pdmlab/config.hpp"
#include "pdmlab/evolution.hpp"
#include "pdmlab/operators.hpp"
#include "pdmlab/spectral.hpp"

namespace pdmlab {

struct AcceptanceOptions {
  /// Multiplies every numeric tolerance; 1 is the stated suite.
  double tolerance_scale = 1.0;
  /// Criterion ids to run; empty runs all.
  std::vector<std::string> only;
};

struct CriterionResult {
  std::string id;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct Criterion {
  std::string id;
  std::string title;
  std::function<CriterionResult(const AcceptanceOptions&)> run;
};

namespace acceptance {

inline std::string format(const char* fmt, ...) {
  char buf[1024];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, args);
  va_end(args);
  return buf;
}

inline std::string join(const std::vector<double>& v, const char* fmt = "%.6g") {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + format(fmt, v[i]);
  return s;
}

inline Grid2D square(std::size_t n, double half) { return make_grid(n, n, {-half, half, -half, half}); }

inline MassProfile bump() { return make_mass_profile("rational-bump", {{"m0", 1.0}, {"a", 1.0}}); }
inline MassProfile quadratic(double lambda) { return make_mass_profile("quadratic", {{"m0", 1.0}, {"lambda", lambda}}); }
inline ScalarField oscillator() { return make_scalar_field("harmonic", {{"k", 1.0}}); }

inline double relative_difference(const LinearOperator& a, const LinearOperator& b) {
  return max_abs_difference(a, b) / std::max(a.max_abs(), b.max_abs());
}

inline SolverOptions lanczos(std::size_t k) {
  SolverOptions o;
  o.k = k;
  return o;
}

class TempDir {
 public:
  TempDir() {
    std::string pattern = (std::filesystem::temp_directory_path() / "pdmlab-XXXXXX").string();
    if (::mkdtemp(pattern.data()) == nullptr) throw std::runtime_error("cannot create temporary directory");
    path_ = pattern;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Worst relative mismatch between the analytic flow and central differences
// of the classical Hamiltonian, over `count` random phase-space points.
inline double flow_gradient_mismatch(const ClassicalSystem& sys, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(-2.0, 2.0), mom(-1.5, 1.5);
  double worst = 0.0;
  for (std::size_t n = 0; n < count; ++n) {
    const ClassicalState s{pos(rng), pos(rng), mom(rng), mom(rng), 0.0};
    const PhaseVelocity f = hamiltonian_flow(s, sys);
    auto partial = [&](int which) {
      const double h = 1e-5;
      ClassicalState lo = s, hi = s;
      double* lo_v[] = {&lo.x, &lo.y, &lo.px, &lo.py};
      double* hi_v[] = {&hi.x, &hi.y, &hi.px, &hi.py};
      *lo_v[which] -= h;
      *hi_v[which] += h;
      return (classical_energy(hi, sys) - classical_energy(lo, sys)) / (2.0 * h);
    };
    // x' = dH/dPx, P' = -dH/dx
    const double fd[4] = {partial(2), partial(3), -partial(0), -partial(1)};
    const double an[4] = {f.dx, f.dy, f.dpx, f.dpy};
    double scale = 0.0, err = 0.0;
    for (int i = 0; i < 4; ++i) {
      scale = std::max(scale, std::abs(an[i]));
      err = std::max(err, std::abs(an[i] - fd[i]));
    }
    worst = std::max(worst, err / scale);
  }
  return worst;
}

inline RunConfig base_config(std::size_t n, double half) {
  RunConfig c;
  c.grid = GridSpec{n, n, {-half, half, -half, half}};
  return c;
}

// ---------------------------------------------------------------------------

inline CriterionResult ac01(const AcceptanceOptions& o) {
  const double tol = 1e-12 * o.tolerance_scale;
  const Grid2D g = square(16, 2.0);
  const MassProfile m = constant_mass(2.0);
  const ScalarField v = oscillator();
  const auto zk = build_von_roos(g, m, orderings::zhu_kroemer, v);
  const auto mm = build_von_roos(g, m, orderings::symmetric_split, v);
  const auto bdd = build_von_roos(g, m, orderings::bendaniel_duke, v);
  const double ordering_diff = std::max(relative_difference(zk, mm), relative_difference(zk, bdd));

  double builder_diff = std::max(relative_difference(zk, build_corrected_hamiltonian(g, m, zero_vector_potential(), v)),
                                 relative_difference(zk, build_dutra_oliveira_hamiltonian(g, m, zero_vector_potential(), v)));
  std::size_t cases = 0;
  for (const char* gauge : {"symmetric", "landau-x"}) {
    for (const auto& pot : {make_scalar_field("zero"), oscillator(),
                            make_scalar_field("linear", {{"c0", 0.3}, {"cx", 0.5}, {"cy", -0.2}}),
                            make_scalar_field("bilinear", {{"c", 0.7}})}) {
      const auto a = make_vector_potential(gauge, 1.0);
      const auto corrected = build_corrected_hamiltonian(g, m, a, pot);
      const auto expanded = build_expanded_hamiltonian(g, m, a, pot);
      for (const auto& ord : {orderings::zhu_kroemer, orderings::symmetric_split, orderings::bendaniel_duke}) {
        builder_diff = std::max(builder_diff,
                                relative_difference(corrected, build_dutra_oliveira_hamiltonian(g, m, a, pot, ord)));
      }
      builder_diff = std::max({builder_diff, relative_difference(corrected, expanded.literal),
                               relative_difference(corrected, expanded.symmetrized)});
      ++cases;
    }
  }
  CriterionResult r;
  r.passed = ordering_diff <= tol && builder_diff <= tol;
  r.detail = format("orderings max|dH|/|H|=%.2e, builders max|dH|/|H|=%.2e over %zu (A,V) cases (tol %.0e)",
                    ordering_diff, builder_diff, cases, tol);
  return r;
}

inline CriterionResult ac02(const AcceptanceOptions& o) {
  const double tol = 0.03 * o.tolerance_scale;
  const Grid2D g = square(64, 8.0);
  const auto t0 = std::chrono::steady_clock::now();
  const auto h = build_corrected_hamiltonian(g, constant_mass(1.0), make_vector_potential("landau-x", 1.0), zero_field());
  const Spectrum s = solve_lowest(h, lanczos(5), g.cell_volume());
  const double seconds = detail::seconds_since(t0);
  double worst = 0.0;
  for (double e : s.eigenvalues) worst = std::max(worst, std::abs(e - 0.5) / 0.5);
  CriterionResult r;
  r.passed = worst <= tol && seconds <= 60.0;
  r.detail = format("landau-x gauge, E = [%s], max rel err %.2e (tol %.2g), %.1f s (limit 60 s), %zu matvecs",
                    join(s.eigenvalues).c_str(), worst, tol, seconds, s.iterations);
  return r;
}

inline CriterionResult ac03(const AcceptanceOptions& o) {
  const double tol = 0.01 * o.tolerance_scale;
  const Grid2D g = square(64, 8.0);
  const auto h = build_constant_mass_hamiltonian(g, 1.0, oscillator());
  const Spectrum s = solve_lowest(h, lanczos(6), g.cell_volume());
  const double expected[6] = {1, 2, 2, 3, 3, 3};
  double worst = 0.0;
  for (std::size_t i = 0; i < 6; ++i) worst = std::max(worst, std::abs(s.eigenvalues[i] - expected[i]) / expected[i]);
  CriterionResult r;
  r.passed = worst <= tol;
  r.detail = format("compact-stencil H, E = [%s], max rel err %.2e (tol %.2g)", join(s.eigenvalues).c_str(), worst, tol);
  return r;
}

inline bool ratio_near_four(double ratio, double scale) { return std::abs(ratio - 4.0) <= 0.8 * scale; }

inline CriterionResult ac04(const AcceptanceOptions& o) {
  const MassProfile m = quadratic(0.5);
  std::vector<double> diff, normalized, probe;
  for (std::size_t n : {16, 32, 64}) {
    const Grid2D g = square(n, 2.0);
    const auto corrected = build_corrected_hamiltonian(g, m, zero_vector_potential(), zero_field());
    const auto mm = build_von_roos(g, m, orderings::symmetric_split, zero_field());
    diff.push_back(max_abs_difference(corrected, mm));
    normalized.push_back(diff.back() / mm.max_abs());
    probe.push_back(consistency_defect(corrected, mm, gaussian_probe(g, 0.5)));
  }
  const double r1 = diff[0] / diff[1], r2 = diff[1] / diff[2];
  CriterionResult r;
  r.passed = ratio_near_four(r1, o.tolerance_scale) && ratio_near_four(r2, o.tolerance_scale);
  r.detail = format("||H_corr - H_split||_max = [%s], halving ratios %.3f %.3f (need 4+-0.8); "
                    "info: /||H||_max ratios %.2f %.2f, probe defect ratios %.2f %.2f",
                    join(diff).c_str(), r1, r2, normalized[0] / normalized[1], normalized[1] / normalized[2],
                    probe[0] / probe[1], probe[1] / probe[2]);
  return r;
}

inline CriterionResult ac05(const AcceptanceOptions& o) {
  const MassProfile m = quadratic(0.1);
  const VectorPotential a = make_vector_potential("symmetric", 1.0);
  std::vector<double> diff, defect, probe;
  for (std::size_t n : {16, 32, 64}) {
    const Grid2D g = square(n, 2.0);
    const auto corrected = build_corrected_hamiltonian(g, m, a, zero_field());
    const auto expanded = build_expanded_hamiltonian(g, m, a, zero_field());
    diff.push_back(max_abs_difference(expanded.symmetrized, corrected));
    defect.push_back(expanded.literal.hermiticity_defect());
    probe.push_back(consistency_defect(expanded.symmetrized, corrected, gaussian_probe(g, 0.5)));
  }
  const double d1 = diff[0] / diff[1], d2 = diff[1] / diff[2];
  const double h1 = defect[0] / defect[1], h2 = defect[1] / defect[2];
  CriterionResult r;
  r.passed = ratio_near_four(d1, o.tolerance_scale) && ratio_near_four(d2, o.tolerance_scale) &&
             ratio_near_four(h1, o.tolerance_scale) && ratio_near_four(h2, o.tolerance_scale);
  r.detail = format("||sym(H_exp) - H_corr||_max = [%s] ratios %.3f %.3f; literal defect = [%s] ratios %.3f %.3f "
                    "(need 4+-0.8); info: probe defect ratios %.2f %.2f",
                    join(diff).c_str(), d1, d2, join(defect).c_str(), h1, h2, probe[0] / probe[1], probe[1] / probe[2]);
  return r;
}

inline CriterionResult ac06(const AcceptanceOptions& o) {
  const double tol = 0.02 * o.tolerance_scale;
  std::vector<double> worst;
  std::string levels;
  for (std::size_t n : {32, 64}) {
    const Grid2D g = square(n, 8.0);
    const auto hs = build_corrected_hamiltonian(g, bump(), make_vector_potential("symmetric", 1.0), zero_field());
    const auto hl = build_corrected_hamiltonian(g, bump(), make_vector_potential("landau-x", 1.0), zero_field());
    const Spectrum ss = solve_lowest(hs, lanczos(5), g.cell_volume());
    const Spectrum sl = solve_lowest(hl, lanczos(5), g.cell_volume());
    worst.push_back(compare_spectra(ss, sl, 5).max_rel_diff);
    levels += format(" n=%zu sym [%s] landau-x [%s];", n, join(ss.eigenvalues, "%.4f").c_str(),
                     join(sl.eigenvalues, "%.4f").c_str());
  }
  CriterionResult r;
  r.passed = worst[1] <= tol && worst[1] < worst[0];
  r.detail = format("max rel gauge disagreement n=32 %.3e, n=64 %.3e (tol %.2g, must shrink);%s", worst[0], worst[1],
                    tol, levels.c_str());
  return r;
}

inline CriterionResult verdict_result(const ComparisonRun& run, const std::string& json_verdict) {
  CriterionResult r;
  const auto& v = run.verdict;
  double best = 0.0;
  for (std::size_t i = 0; i < v.report.levels.size(); ++i) {
    best = std::max(best, v.report.levels[i].abs_diff / v.threshold[i]);
  }
  r.passed = v.distinct && json_verdict == kVerdictDistinct;
  r.detail = format("E1 = [%s], E2 = [%s], max |dE| / (5 x refinement err) = %.2f, compare.json verdict \"%s\"",
                    join(run.first.eigenvalues, "%.5f").c_str(), join(run.second.eigenvalues, "%.5f").c_str(), best,
                    json_verdict.c_str());
  return r;
}

inline CriterionResult run_compare_criterion(RunConfig c) {
  TempDir dir;
  const ComparisonRun run = cmd_compare(c, dir.path());
  const Json j = Json::parse(slurp(dir.path() / "compare.json"));
  return verdict_result(run, j.at("verdict").get<std::string>());
}

inline CriterionResult ac07(const AcceptanceOptions&) {
  RunConfig c = base_config(64, 8.0);
  c.mass = FieldSpec{"rational-bump", {{"m0", 1.0}, {"a", 1.0}}};
  c.gauge = {"landau-x", 1.0};
  c.solver = lanczos(5);
  c.compare = CompareSpec{{"corrected", {}}, {"dutra_oliveira", {}}, 2};
  return run_compare_criterion(c);
}

inline CriterionResult ac08(const AcceptanceOptions&) {
  RunConfig c = base_config(64, 8.0);
  c.mass = FieldSpec{"quadratic", {{"m0", 1.0}, {"lambda", 1.0}}};
  c.potential = FieldSpec{"harmonic", {{"k", 1.0}}};
  c.solver = lanczos(5);
  c.compare = CompareSpec{{"von_roos", {"zhu-kroemer", orderings::zhu_kroemer}},
                          {"von_roos", {"symmetric-split", orderings::symmetric_split}},
                          2};
  return run_compare_criterion(c);
}

inline CriterionResult ac09(const AcceptanceOptions& o) {
  const double tol = 1e-13 * o.tolerance_scale;
  const Grid2D g = square(32, 4.0);
  const VectorPotential a = make_vector_potential("symmetric", 1.0);
  const ScalarField v = oscillator();
  double worst = 0.0;
  auto check = [&](const LinearOperator& h) { worst = std::max(worst, h.hermiticity_defect() / h.max_abs()); };
  for (const MassProfile& m : {bump(), quadratic(1.0), constant_mass(1.5)}) {
    for (const auto& ord : {orderings::zhu_kroemer, orderings::symmetric_split, orderings::bendaniel_duke}) {
      check(build_von_roos(g, m, ord, v));
      check(build_dutra_oliveira_hamiltonian(g, m, a, v, ord));
    }
    check(build_corrected_hamiltonian(g, m, a, v));
    check(build_corrected_hamiltonian(g, m, make_vector_potential("landau-x", 1.0), v));
  }
  check(build_constant_mass_hamiltonian(g, 1.5, v));

  const Grid2D small = square(20, 4.0);
  const auto h = build_corrected_hamiltonian(small, bump(), make_vector_potential("landau-x", 1.0), v);
  SolverOptions dense = lanczos(6);
  dense.method = SolverMethod::dense;
  const Spectrum sd = solve_lowest(h, dense, small.cell_volume());
  const Spectrum sl = solve_lowest(h, lanczos(6), small.cell_volume());
  const double agree = compare_spectra(sd, sl, 6).max_rel_diff;
  const double agree_tol = 1e-9 * o.tolerance_scale;
  CriterionResult r;
  r.passed = worst <= tol && agree <= agree_tol;
  r.detail = format("max defect/||H||_max = %.2e (tol %.0e); dense vs lanczos 20x20 max rel diff %.2e (tol %.0e)",
                    worst, tol, agree, agree_tol);
  return r;
}

inline CriterionResult ac10(const AcceptanceOptions& o) {
  const double tol = 1e-8 * o.tolerance_scale;
  const ClassicalSystem free{bump(), zero_vector_potential(), zero_field(), {}};
  const auto path = integrate_trajectory({0.5, -0.3, 0.2, 0.1, 0.0}, free, 10.0, 1e-3);
  const ConservationSummary s = summarize(path, free);

  double mismatch = 0.0;
  std::uint64_t seed = 7;
  for (const MassProfile& m : {bump(), quadratic(0.5), constant_mass(2.0)}) {
    for (const char* gauge : {"symmetric", "landau-x"}) {
      for (const auto& v : {zero_field(), oscillator(), make_scalar_field("bilinear", {{"c", 0.4}})}) {
        mismatch = std::max(mismatch, flow_gradient_mismatch({m, make_vector_potential(gauge, 1.0), v, {}}, 100, seed++));
      }
    }
  }
  const double fd_tol = 1e-6 * o.tolerance_scale;
  CriterionResult r;
  r.passed = s.energy_drift <= tol && s.pi_squared_drift <= tol && mismatch <= fd_tol;
  r.detail = format("quasi-free bump, t in [0,10]: H drift %.2e, |Pi|^2 drift %.2e (tol %.0e); "
                    "flow vs finite-difference max rel err %.2e over 18x100 points (tol %.0e); "
                    "info: component drift Pi_x %.2e Pi_y %.2e",
                    s.energy_drift, s.pi_squared_drift, tol, mismatch, fd_tol, s.pi_x_drift, s.pi_y_drift);
  return r;
}

inline CriterionResult ac11(const AcceptanceOptions& o) {
  const Grid1D g = make_grid_1d(2000, -10.0, 10.0);
  const PacketParams packet{0.5, 2.0, 1.0};
  const auto rc = ehrenfest_check(g, constant_mass(1.0), zero_field(), {}, packet, 1e-3, 1000);
  const auto rn = ehrenfest_check(g, quadratic(1.0), zero_field(), {}, packet, 1e-3, 1000);
  const double const_tol = 1e-3 * o.tolerance_scale;
  CriterionResult r;
  r.passed = rc.max_residual <= const_tol && rn.max_residual > 1e-2;
  r.detail = format("r_const = %.3e (tol %.0e), r_naive = %.3e (must exceed 1e-02); n=2000 on [-10,10], dt=1e-3, "
                    "1000 steps",
                    rc.max_residual, const_tol, rn.max_residual);
  return r;
}

inline CriterionResult ac12(const AcceptanceOptions&) {
  RunConfig c = base_config(24, 4.0);
  c.mass = FieldSpec{"rational-bump", {{"m0", 1.0}, {"a", 1.0}}};
  c.gauge = {"landau-x", 1.0};
  c.potential = FieldSpec{"harmonic", {{"k", 1.0}}};
  c.solver = lanczos(4);
  c.solver.seed = 42;
  TempDir a, b;
  cmd_spectrum(c, a.path());
  cmd_spectrum(c, b.path());
  bool same = true;
  std::string files;
  for (const char* f : {"spectrum.csv", "spectrum.json"}) {
    const std::string x = slurp(a.path() / f), y = slurp(b.path() / f);
    same = same && !x.empty() && x == y;
    files += format(" %s %zu bytes %s;", f, x.size(), x == y ? "identical" : "DIFFER");
  }
  CriterionResult r;
  r.passed = same;
  r.detail = "two cmd_spectrum runs, seed 42:" + files;
  return r;
}

}  // namespace acceptance

inline const std::vector<Criterion>& acceptance_criteria() {
  using namespace acceptance;
  static const std::vector<Criterion> list{
      {"AC01", "constant-mass collapse", ac01},
      {"AC02", "Landau levels, constant mass", ac02},
      {"AC03", "2D harmonic oscillator", ac03},
      {"AC04", "symmetric-split factorization identity, O(h^2) decay", ac04},
      {"AC05", "expanded vs corrected Hamiltonian, O(h^2) decay", ac05},
      {"AC06", "gauge invariance of the corrected Hamiltonian", ac06},
      {"AC07", "corrected vs Dutra-Oliveira spectra distinct", ac07},
      {"AC08", "ZK vs symmetric-split ordering spectra distinct", ac08},
      {"AC09", "hermiticity and dense/lanczos agreement", ac09},
      {"AC10", "classical conservation and flow consistency", ac10},
      {"AC11", "Ehrenfest relation, constant vs PDM", ac11},
      {"AC12", "determinism of cmd_spectrum outputs", ac12},
  };
  return list;
}

/// Runs the selected criteria, printing "ID PASS|FAIL title: detail" per line.
/// A criterion that throws is reported as FAIL with the error text.
inline std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts, std::ostream& os) {
  std::vector<CriterionResult> results;
  for (const auto& c : acceptance_criteria()) {
    if (!opts.only.empty() && std::find(opts.only.begin(), opts.only.end(), c.id) == opts.only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
      r = c.run(opts);
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("error: ") + e.what();
    }
    r.id = c.id;
    r.title = c.title;
    r.seconds = detail::seconds_since(t0);
    os << r.id << ' ' << (r.passed ? "PASS" : "FAIL") << "  " << r.title << " [" << acceptance::format("%.1f s", r.seconds)
       << "]: " << r.detail << std::endl;
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace pdmlab
