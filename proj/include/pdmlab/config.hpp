#pragma once

// Strict JSON run configuration. Every block is validated (including the
// physics objects it describes) before any command does work, and unknown
// keys are rejected at every level.

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "pdmlab/classical.hpp"
#include "pdmlab/errors.hpp"
#include "pdmlab/evolution.hpp"
#include "pdmlab/fields.hpp"
#include "pdmlab/grid.hpp"
#include "pdmlab/operators.hpp"
#include "pdmlab/spectral.hpp"

namespace pdmlab {

using Json = nlohmann::json;

struct FieldSpec {
  std::string kind;
  Params params;
};

struct GridSpec {
  std::size_t nx = 0, ny = 0;
  Bounds2D bounds{};
};

struct GaugeSpec {
  std::string kind = "symmetric";
  double field = 0.0;
};

/// Named preset or an explicit triplet ("custom").
struct OrderingSpec {
  std::string preset = "zhu-kroemer";
  OrderingParams params = orderings::zhu_kroemer;
};

inline const std::vector<std::string>& builder_names() {
  static const std::vector<std::string> names{"von_roos", "corrected", "expanded", "dutra_oliveira", "constant_mass"};
  return names;
}

struct BuilderSpec {
  std::string builder = "corrected";
  OrderingSpec ordering;
};

struct CompareSpec {
  BuilderSpec first, second;
  /// Coarse grid for the refinement error estimate has n / coarse_divisor nodes per axis.
  std::size_t coarse_divisor = 2;
};

struct TrajectorySpec {
  ClassicalState state0;
  double t_end = 0.0;
  double dt = 0.0;
};

struct EvolveSpec {
  std::size_t n = 0;
  double xmin = 0.0, xmax = 0.0;
  PacketParams packet;
  double dt = 0.0;
  std::size_t steps = 0;
};

struct RunConfig {
  PhysicalConstants constants;
  std::optional<GridSpec> grid;
  std::optional<FieldSpec> mass;
  FieldSpec potential{"zero", {}};
  GaugeSpec gauge;
  BuilderSpec build;
  SolverOptions solver;
  std::optional<CompareSpec> compare;
  std::optional<TrajectorySpec> trajectory;
  std::optional<EvolveSpec> evolve;
};

namespace detail {

// Field-by-field reader that remembers which keys were consumed.
class ObjectReader {
 public:
  ObjectReader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const Json& at(const std::string& key) {
    if (!j_.contains(key)) throw ConfigError(path_ + ": missing key '" + key + "'");
    seen_.insert(key);
    return j_.at(key);
  }

  double number(const std::string& key) {
    const Json& v = at(key);
    if (!v.is_number()) throw ConfigError(name(key) + ": expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(name(key) + ": must be finite");
    return d;
  }

  double number_or(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

  std::uint64_t integer(const std::string& key) {
    const Json& v = at(key);
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
      throw ConfigError(name(key) + ": expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }

  std::string string(const std::string& key) {
    const Json& v = at(key);
    if (!v.is_string()) throw ConfigError(name(key) + ": expected a string");
    return v.get<std::string>();
  }

  std::string name(const std::string& key) const { return path_ + "." + key; }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.contains(it.key())) throw ConfigError(path_ + ": unknown key '" + it.key() + "'");
    }
  }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

inline FieldSpec read_field(const Json& j, const std::string& path) {
  ObjectReader r(j, path);
  FieldSpec f;
  f.kind = r.string("kind");
  if (r.has("params")) {
    ObjectReader p(r.at("params"), path + ".params");
    for (auto it = j.at("params").begin(); it != j.at("params").end(); ++it) f.params[it.key()] = p.number(it.key());
    p.finish();
  }
  r.finish();
  return f;
}

inline OrderingSpec read_ordering(const Json& j, const std::string& path) {
  ObjectReader r(j, path);
  OrderingSpec o;
  if (r.has("preset")) {
    if (r.has("alpha") || r.has("beta") || r.has("gamma")) {
      throw ConfigError(path + ": give either a preset or alpha/beta/gamma, not both");
    }
    o.preset = r.string("preset");
    o.params = ordering_preset(o.preset);
  } else {
    o.preset = "custom";
    o.params = make_ordering(r.number("alpha"), r.number("beta"), r.number("gamma"));
  }
  r.finish();
  return o;
}

inline std::string read_builder_name(ObjectReader& r, const std::string& key) {
  const std::string b = r.string(key);
  for (const auto& n : builder_names()) {
    if (n == b) return b;
  }
  throw ConfigError(r.name(key) + ": unknown builder '" + b +
                    "' (von_roos, corrected, expanded, dutra_oliveira, constant_mass)");
}

inline BuilderSpec read_builder_spec(const Json& j, const std::string& path, const OrderingSpec& fallback) {
  ObjectReader r(j, path);
  BuilderSpec b;
  b.builder = read_builder_name(r, "builder");
  b.ordering = r.has("ordering") ? read_ordering(r.at("ordering"), path + ".ordering") : fallback;
  r.finish();
  return b;
}

inline std::size_t checked_size(std::uint64_t v, const std::string& what) {
  if (v > static_cast<std::uint64_t>(std::numeric_limits<int>::max())) throw ConfigError(what + ": too large");
  return static_cast<std::size_t>(v);
}

}  // namespace detail

inline MassProfile make_mass(const RunConfig& c) {
  if (!c.mass) throw ConfigError("config: missing 'mass' block");
  return make_mass_profile(c.mass->kind, c.mass->params);
}

inline ScalarField make_potential(const RunConfig& c) { return make_scalar_field(c.potential.kind, c.potential.params); }

inline VectorPotential make_gauge(const RunConfig& c) { return make_vector_potential(c.gauge.kind, c.gauge.field); }

inline Grid2D make_config_grid(const RunConfig& c) {
  if (!c.grid) throw ConfigError("config: missing 'grid' block");
  return make_grid(c.grid->nx, c.grid->ny, c.grid->bounds);
}

inline RunConfig parse_config(const Json& j) {
  detail::ObjectReader top(j, "config");
  RunConfig c;

  if (top.has("constants")) {
    detail::ObjectReader r(top.at("constants"), "constants");
    c.constants.hbar = r.number_or("hbar", 1.0);
    c.constants.charge = r.number_or("charge", 1.0);
    r.finish();
  }
  c.constants.validate();

  if (top.has("grid")) {
    detail::ObjectReader r(top.at("grid"), "grid");
    GridSpec g;
    g.nx = detail::checked_size(r.integer("nx"), "grid.nx");
    g.ny = detail::checked_size(r.integer("ny"), "grid.ny");
    const Json& b = r.at("bounds");
    if (!b.is_array() || b.size() != 4) throw ConfigError("grid.bounds: expected [xmin, xmax, ymin, ymax]");
    double v[4];
    for (std::size_t i = 0; i < 4; ++i) {
      if (!b[i].is_number()) throw ConfigError("grid.bounds: expected numbers");
      v[i] = b[i].get<double>();
    }
    g.bounds = {v[0], v[1], v[2], v[3]};
    r.finish();
    make_grid(g.nx, g.ny, g.bounds);
    c.grid = g;
  }

  if (top.has("mass")) c.mass = detail::read_field(top.at("mass"), "mass");
  if (top.has("potential")) c.potential = detail::read_field(top.at("potential"), "potential");
  if (top.has("gauge")) {
    detail::ObjectReader r(top.at("gauge"), "gauge");
    c.gauge.kind = r.string("kind");
    c.gauge.field = r.number("B");
    r.finish();
  }
  if (top.has("ordering")) c.build.ordering = detail::read_ordering(top.at("ordering"), "ordering");
  if (top.has("builder")) {
    c.build.builder = detail::read_builder_name(top, "builder");
  }

  if (top.has("solver")) {
    detail::ObjectReader r(top.at("solver"), "solver");
    if (r.has("k")) c.solver.k = detail::checked_size(r.integer("k"), "solver.k");
    if (r.has("method")) c.solver.method = parse_solver_method(r.string("method"));
    c.solver.tol = r.number_or("tol", c.solver.tol);
    if (r.has("seed")) c.solver.seed = r.integer("seed");
    r.finish();
    if (c.solver.k < 1) throw ConfigError("solver.k must be >= 1");
    if (!(c.solver.tol > 0.0)) throw ConfigError("solver.tol must be > 0");
  }

  if (top.has("compare")) {
    detail::ObjectReader r(top.at("compare"), "compare");
    CompareSpec s;
    s.first = detail::read_builder_spec(r.at("first"), "compare.first", c.build.ordering);
    s.second = detail::read_builder_spec(r.at("second"), "compare.second", c.build.ordering);
    if (r.has("coarse_divisor")) s.coarse_divisor = detail::checked_size(r.integer("coarse_divisor"), "compare.coarse_divisor");
    if (s.coarse_divisor < 2) throw ConfigError("compare.coarse_divisor must be >= 2");
    r.finish();
    c.compare = s;
  }

  if (top.has("trajectory")) {
    detail::ObjectReader r(top.at("trajectory"), "trajectory");
    TrajectorySpec t;
    detail::ObjectReader s(r.at("state0"), "trajectory.state0");
    t.state0 = {s.number("x"), s.number("y"), s.number("px"), s.number("py"), 0.0};
    s.finish();
    t.t_end = r.number("t_end");
    t.dt = r.number("dt");
    r.finish();
    if (!(t.dt > 0.0)) throw ConfigError("trajectory.dt must be > 0");
    if (!(t.t_end > 0.0)) throw ConfigError("trajectory.t_end must be > 0");
    c.trajectory = t;
  }

  if (top.has("evolve")) {
    detail::ObjectReader r(top.at("evolve"), "evolve");
    EvolveSpec e;
    e.n = detail::checked_size(r.integer("n"), "evolve.n");
    const Json& b = r.at("bounds");
    if (!b.is_array() || b.size() != 2 || !b[0].is_number() || !b[1].is_number()) {
      throw ConfigError("evolve.bounds: expected [xmin, xmax]");
    }
    e.xmin = b[0].get<double>();
    e.xmax = b[1].get<double>();
    detail::ObjectReader p(r.at("packet"), "evolve.packet");
    e.packet = {p.number("x0"), p.number("k0"), p.number("sigma")};
    p.finish();
    e.dt = r.number("dt");
    e.steps = detail::checked_size(r.integer("steps"), "evolve.steps");
    r.finish();
    make_grid_1d(e.n, e.xmin, e.xmax);
    if (!(e.dt > 0.0)) throw ConfigError("evolve.dt must be > 0");
    if (!(e.packet.sigma > 0.0)) throw ConfigError("evolve.packet.sigma must be > 0");
    if (e.steps < 2) throw ConfigError("evolve.steps must be >= 2");
    c.evolve = e;
  }
  top.finish();

  // Build the physics objects once so catalog errors surface before any work.
  if (c.mass) make_mass(c);
  make_potential(c);
  make_gauge(c);
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

namespace detail {

inline Json to_json(const FieldSpec& f) {
  Json params = Json::object();
  for (const auto& [k, v] : f.params) params[k] = v;
  return {{"kind", f.kind}, {"params", params}};
}

// Presets stay names so the output parses back as input.
inline Json to_json(const OrderingSpec& o) {
  if (o.preset != "custom") return {{"preset", o.preset}};
  return {{"alpha", o.params.alpha}, {"beta", o.params.beta}, {"gamma", o.params.gamma}};
}

inline Json to_json(const BuilderSpec& b) { return {{"builder", b.builder}, {"ordering", to_json(b.ordering)}}; }

}  // namespace detail

/// Fully resolved configuration, defaults filled in. Embedded in every report.
inline Json resolved_config(const RunConfig& c) {
  Json j;
  j["constants"] = {{"hbar", c.constants.hbar}, {"charge", c.constants.charge}};
  if (c.grid) {
    const auto& b = c.grid->bounds;
    j["grid"] = {{"nx", c.grid->nx}, {"ny", c.grid->ny}, {"bounds", {b.xmin, b.xmax, b.ymin, b.ymax}}};
  }
  if (c.mass) j["mass"] = detail::to_json(*c.mass);
  j["potential"] = detail::to_json(c.potential);
  j["gauge"] = {{"kind", c.gauge.kind}, {"B", c.gauge.field}};
  j["ordering"] = detail::to_json(c.build.ordering);
  j["builder"] = c.build.builder;
  j["solver"] = {{"k", c.solver.k}, {"method", to_string(c.solver.method)}, {"tol", c.solver.tol}, {"seed", c.solver.seed}};
  if (c.compare) {
    j["compare"] = {{"first", detail::to_json(c.compare->first)},
                    {"second", detail::to_json(c.compare->second)},
                    {"coarse_divisor", c.compare->coarse_divisor}};
  }
  if (c.trajectory) {
    const auto& s = c.trajectory->state0;
    j["trajectory"] = {{"state0", {{"x", s.x}, {"y", s.y}, {"px", s.px}, {"py", s.py}}},
                       {"t_end", c.trajectory->t_end},
                       {"dt", c.trajectory->dt}};
  }
  if (c.evolve) {
    const auto& e = *c.evolve;
    j["evolve"] = {{"n", e.n},
                   {"bounds", {e.xmin, e.xmax}},
                   {"packet", {{"x0", e.packet.x0}, {"k0", e.packet.k0}, {"sigma", e.packet.sigma}}},
                   {"dt", e.dt},
                   {"steps", e.steps}};
  }
  return j;
}

}  // namespace pdmlab
