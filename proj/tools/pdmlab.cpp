// pdmlab spectrum|compare|classical|evolve|validate --config <path> --out <dir>

#include <CLI11.hpp>

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "pdmlab/pdmlab.hpp"

namespace {

using namespace pdmlab;

std::vector<std::string> split_ids(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string id; std::getline(ss, id, ',');) {
    if (id.empty()) continue;
    bool known = false;
    for (const auto& c : acceptance_criteria()) known = known || c.id == id;
    if (!known) throw ConfigError("unknown criterion id '" + id + "'");
    out.push_back(id);
  }
  return out;
}

int validate(bool list, const std::string& only, double scale, const std::string& out) {
  if (list) {
    for (const auto& c : acceptance_criteria()) std::cout << c.id << "  " << c.title << "\n";
    return kExitOk;
  }
  if (!(scale >= 0.0)) throw ConfigError("--tolerance-scale must be >= 0");
  AcceptanceOptions opts;
  opts.tolerance_scale = scale;
  opts.only = split_ids(only);
  const auto results = run_acceptance(opts, std::cout);
  std::size_t passed = 0;
  Json report = Json::array();
  for (const auto& r : results) {
    passed += r.passed ? 1 : 0;
    report.push_back({{"id", r.id}, {"title", r.title}, {"passed", r.passed}, {"detail", r.detail}});
  }
  std::cout << passed << "/" << results.size() << " criteria passed\n";
  if (!out.empty()) {
    detail::ensure_directory(out);
    detail::write_json(fs::path(out) / "validate.json", {{"criteria", report}, {"tolerance_scale", scale}});
  }
  return passed == results.size() ? kExitOk : kExitValidationFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pdmlab: position-dependent-mass Hamiltonians in magnetic fields"};
  app.require_subcommand(1);

  std::string config, out = ".";
  auto add_io = [&](CLI::App* sub) {
    sub->add_option("--config", config, "JSON run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory");
  };
  auto* spectrum = app.add_subcommand("spectrum", "lowest eigenvalues of one Hamiltonian");
  auto* compare = app.add_subcommand("compare", "spectra of two Hamiltonians with a refinement-based verdict");
  auto* classical = app.add_subcommand("classical", "classical trajectory and conservation summary");
  auto* evolve = app.add_subcommand("evolve", "1D wavepacket propagation and Ehrenfest residual");
  for (auto* sub : {spectrum, compare, classical, evolve}) add_io(sub);

  auto* validate_cmd = app.add_subcommand("validate", "run the acceptance suite");
  bool list = false;
  std::string only, validate_out, unused_config;
  double scale = 1.0;
  validate_cmd->add_flag("--list", list, "print criterion ids without running");
  validate_cmd->add_option("--only", only, "comma-separated criterion ids");
  validate_cmd->add_option("--tolerance-scale", scale, "multiply every tolerance (testing the failure path)");
  validate_cmd->add_option("--config", unused_config, "accepted for symmetry; the suite is self-contained");
  validate_cmd->add_option("--out", validate_out, "write validate.json here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*validate_cmd) return validate(list, only, scale, validate_out);
    const RunConfig c = load_config(config);
    if (*spectrum) {
      const auto r = cmd_spectrum(c, out);
      std::cout << "lowest " << r.spectrum.size() << " eigenvalues written to " << (fs::path(out) / "spectrum.csv").string()
                << "\n";
    } else if (*compare) {
      const auto r = cmd_compare(c, out);
      std::cout << "verdict: " << r.verdict.label() << "\n";
    } else if (*classical) {
      const auto r = cmd_classical(c, out);
      std::cout << "energy drift " << r.summary.energy_drift << ", |Pi|^2 drift " << r.summary.pi_squared_drift << "\n";
    } else if (*evolve) {
      const auto r = cmd_evolve(c, out);
      std::cout << "ehrenfest residual " << r.max_residual << "\n";
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const PhysicsError& e) {
    std::cerr << "physics error: " << e.what() << "\n";
    return kExitPhysics;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInternal;
  }
}
