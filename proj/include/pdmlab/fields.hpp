#pragma once

// Analytic field catalog: mass profiles M(x, y), scalar potentials V(x, y),
// gauge functions chi(x, y) and uniform-field vector potentials.
//
// Fields are immutable closures over their parameters, so one definition
// serves every grid resolution.

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pdmlab/errors.hpp"

namespace pdmlab {

struct PhysicalConstants {
  double hbar = 1.0;
  double charge = 1.0;

  void validate() const {
    if (!std::isfinite(hbar) || hbar <= 0.0) throw ConfigError("hbar must be finite and > 0");
    if (!std::isfinite(charge)) throw ConfigError("charge must be finite");
  }
};

using Params = std::map<std::string, double>;
using Gradient = std::array<double, 2>;
/// Second derivatives (xx, xy, yy).
using Hessian = std::array<double, 3>;

class ScalarField {
 public:
  using ValueFn = std::function<double(double, double)>;
  using GradientFn = std::function<Gradient(double, double)>;
  using HessianFn = std::function<Hessian(double, double)>;

  ScalarField(std::string kind, Params params, ValueFn value, GradientFn gradient,
              std::optional<HessianFn> hessian = std::nullopt)
      : kind_(std::move(kind)),
        params_(std::move(params)),
        value_(std::move(value)),
        gradient_(std::move(gradient)),
        hessian_(std::move(hessian)) {}

  double operator()(double x, double y) const { return value_(x, y); }
  Gradient gradient(double x, double y) const { return gradient_(x, y); }

  bool has_hessian() const { return hessian_.has_value(); }
  Hessian hessian(double x, double y) const {
    if (!hessian_) throw ConfigError("field '" + kind_ + "' has no analytic second derivatives");
    return (*hessian_)(x, y);
  }

  const std::string& kind() const { return kind_; }
  const Params& params() const { return params_; }

 private:
  std::string kind_;
  Params params_;
  ValueFn value_;
  GradientFn gradient_;
  std::optional<HessianFn> hessian_;
};

namespace detail {

// Rejects unknown names and reports missing ones so config typos surface early.
inline void require_params(const std::string& what, const std::string& kind, const Params& params,
                           const std::vector<std::string>& names) {
  for (const auto& [name, value] : params) {
    bool known = false;
    for (const auto& n : names) known = known || (n == name);
    if (!known) throw ConfigError(what + " '" + kind + "': unknown parameter '" + name + "'");
    if (!std::isfinite(value)) throw ConfigError(what + " '" + kind + "': parameter '" + name + "' is not finite");
  }
  for (const auto& n : names) {
    if (!params.contains(n)) throw ConfigError(what + " '" + kind + "': missing parameter '" + n + "'");
  }
}

}  // namespace detail

/// Scalar potentials and gauge functions.
///   zero                      0
///   constant   {c}            c
///   harmonic   {k}            k (x^2 + y^2) / 2
///   harmonic-x {k}            k x^2 / 2
///   linear     {c0, cx, cy}   c0 + cx x + cy y
///   bilinear   {c}            c x y
inline ScalarField make_scalar_field(const std::string& kind, const Params& params = {}) {
  const std::string what = "scalar field";
  if (kind == "zero") {
    detail::require_params(what, kind, params, {});
    return {kind, params, [](double, double) { return 0.0; }, [](double, double) { return Gradient{0.0, 0.0}; },
            [](double, double) { return Hessian{0.0, 0.0, 0.0}; }};
  }
  if (kind == "constant") {
    detail::require_params(what, kind, params, {"c"});
    const double c = params.at("c");
    return {kind, params, [c](double, double) { return c; }, [](double, double) { return Gradient{0.0, 0.0}; },
            [](double, double) { return Hessian{0.0, 0.0, 0.0}; }};
  }
  if (kind == "harmonic") {
    detail::require_params(what, kind, params, {"k"});
    const double k = params.at("k");
    return {kind, params, [k](double x, double y) { return 0.5 * k * (x * x + y * y); },
            [k](double x, double y) { return Gradient{k * x, k * y}; },
            [k](double, double) { return Hessian{k, 0.0, k}; }};
  }
  if (kind == "harmonic-x") {
    detail::require_params(what, kind, params, {"k"});
    const double k = params.at("k");
    return {kind, params, [k](double x, double) { return 0.5 * k * x * x; },
            [k](double x, double) { return Gradient{k * x, 0.0}; },
            [k](double, double) { return Hessian{k, 0.0, 0.0}; }};
  }
  if (kind == "linear") {
    detail::require_params(what, kind, params, {"c0", "cx", "cy"});
    const double c0 = params.at("c0"), cx = params.at("cx"), cy = params.at("cy");
    return {kind, params, [c0, cx, cy](double x, double y) { return c0 + cx * x + cy * y; },
            [cx, cy](double, double) { return Gradient{cx, cy}; },
            [](double, double) { return Hessian{0.0, 0.0, 0.0}; }};
  }
  if (kind == "bilinear") {
    detail::require_params(what, kind, params, {"c"});
    const double c = params.at("c");
    return {kind, params, [c](double x, double y) { return c * x * y; },
            [c](double x, double y) { return Gradient{c * y, c * x}; },
            [c](double, double) { return Hessian{0.0, c, 0.0}; }};
  }
  throw ConfigError("unknown scalar field kind '" + kind + "'");
}

inline ScalarField zero_field() { return make_scalar_field("zero"); }

/// Smallest mass accepted on a grid node or along a trajectory.
inline constexpr double kMinimumMass = 1e-12;

/// Position-dependent mass. Catalog kinds are positive on all of R^2; the
/// operator builders still check positivity on the nodes they actually use.
struct MassProfile {
  ScalarField field;
  double m0;

  double operator()(double x, double y) const { return field(x, y); }
  Gradient gradient(double x, double y) const { return field.gradient(x, y); }
  const std::string& kind() const { return field.kind(); }
  bool is_constant() const { return field.kind() == "constant"; }
};

/// Mass catalog.
///   constant      {m0}          m0
///   rational-bump {m0, a}       m0 / (1 + (x^2 + y^2) / a^2)
///   quadratic     {m0, lambda}  m0 (1 + lambda (x^2 + y^2))
///   linear        {m0, gx, gy}  m0 (1 + gx x + gy y), crosses zero unless gx = gy = 0
inline MassProfile make_mass_profile(const std::string& kind, const Params& params) {
  const std::string what = "mass profile";
  auto positive_m0 = [&]() {
    const double m0 = params.at("m0");
    if (m0 <= 0.0) throw ConfigError("mass profile '" + kind + "': m0 must be > 0");
    return m0;
  };
  if (kind == "constant") {
    detail::require_params(what, kind, params, {"m0"});
    const double m0 = positive_m0();
    return {ScalarField(kind, params, [m0](double, double) { return m0; },
                        [](double, double) { return Gradient{0.0, 0.0}; },
                        [](double, double) { return Hessian{0.0, 0.0, 0.0}; }),
            m0};
  }
  if (kind == "rational-bump") {
    detail::require_params(what, kind, params, {"m0", "a"});
    const double m0 = positive_m0();
    const double a = params.at("a");
    if (a <= 0.0) throw ConfigError("mass profile 'rational-bump': a must be > 0");
    const double inv_a2 = 1.0 / (a * a);
    auto value = [m0, inv_a2](double x, double y) { return m0 / (1.0 + (x * x + y * y) * inv_a2); };
    auto gradient = [m0, inv_a2](double x, double y) {
      const double s = 1.0 + (x * x + y * y) * inv_a2;
      const double c = -2.0 * m0 * inv_a2 / (s * s);
      return Gradient{c * x, c * y};
    };
    auto hessian = [m0, inv_a2](double x, double y) {
      const double s = 1.0 + (x * x + y * y) * inv_a2;
      const double s2 = s * s, s3 = s2 * s;
      const double q = 8.0 * m0 * inv_a2 * inv_a2 / s3;
      const double d = -2.0 * m0 * inv_a2 / s2;
      return Hessian{d + q * x * x, q * x * y, d + q * y * y};
    };
    return {ScalarField(kind, params, value, gradient, hessian), m0};
  }
  if (kind == "quadratic") {
    detail::require_params(what, kind, params, {"m0", "lambda"});
    const double m0 = positive_m0();
    const double lambda = params.at("lambda");
    if (lambda < 0.0) throw ConfigError("mass profile 'quadratic': lambda must be >= 0");
    return {ScalarField(kind, params, [m0, lambda](double x, double y) { return m0 * (1.0 + lambda * (x * x + y * y)); },
                        [m0, lambda](double x, double y) {
                          return Gradient{2.0 * m0 * lambda * x, 2.0 * m0 * lambda * y};
                        },
                        [m0, lambda](double, double) {
                          return Hessian{2.0 * m0 * lambda, 0.0, 2.0 * m0 * lambda};
                        }),
            m0};
  }
  if (kind == "linear") {
    detail::require_params(what, kind, params, {"m0", "gx", "gy"});
    const double m0 = positive_m0();
    const double gx = params.at("gx"), gy = params.at("gy");
    return {ScalarField(kind, params, [m0, gx, gy](double x, double y) { return m0 * (1.0 + gx * x + gy * y); },
                        [m0, gx, gy](double, double) { return Gradient{m0 * gx, m0 * gy}; },
                        [](double, double) { return Hessian{0.0, 0.0, 0.0}; }),
            m0};
  }
  throw ConfigError("unknown mass profile kind '" + kind + "'");
}

inline MassProfile constant_mass(double m0) { return make_mass_profile("constant", {{"m0", m0}}); }

struct VectorPotential {
  ScalarField ax;
  ScalarField ay;
  std::string gauge;
  double field_strength = 0.0;

  std::array<double, 2> operator()(double x, double y) const { return {ax(x, y), ay(x, y)}; }
};

/// Uniform field B along z.
///   symmetric   A = (-B y / 2, B x / 2)
///   landau-x    A = (-B y, 0)
inline VectorPotential make_vector_potential(const std::string& gauge, double field) {
  if (!std::isfinite(field)) throw ConfigError("vector potential: B must be finite");
  auto linear = [](double cx, double cy) { return make_scalar_field("linear", {{"c0", 0.0}, {"cx", cx}, {"cy", cy}}); };
  if (gauge == "symmetric") return {linear(0.0, -0.5 * field), linear(0.5 * field, 0.0), gauge, field};
  if (gauge == "landau-x") return {linear(0.0, -field), linear(0.0, 0.0), gauge, field};
  throw ConfigError("unknown gauge '" + gauge + "'");
}

inline VectorPotential zero_vector_potential() { return make_vector_potential("symmetric", 0.0); }

/// A + grad(chi). The transformed components carry analytic gradients built
/// from chi's Hessian, so chi must provide one.
inline VectorPotential gauge_transform(const VectorPotential& a, const ScalarField& chi) {
  if (!chi.has_hessian()) throw ConfigError("gauge function '" + chi.kind() + "' needs analytic second derivatives");
  auto shifted = [&chi](const ScalarField& component, int axis) {
    return ScalarField(
        component.kind() + "+grad(" + chi.kind() + ")", component.params(),
        [component, chi, axis](double x, double y) { return component(x, y) + chi.gradient(x, y)[axis]; },
        [component, chi, axis](double x, double y) {
          const Gradient g = component.gradient(x, y);
          const Hessian h = chi.hessian(x, y);
          return axis == 0 ? Gradient{g[0] + h[0], g[1] + h[1]} : Gradient{g[0] + h[1], g[1] + h[2]};
        });
  };
  return {shifted(a.ax, 0), shifted(a.ay, 1), a.gauge + "+grad(" + chi.kind() + ")", a.field_strength};
}

/// dAy/dx - dAx/dy from the analytic gradients.
inline double curl(const VectorPotential& a, double x, double y) {
  return a.ay.gradient(x, y)[0] - a.ax.gradient(x, y)[1];
}

}  // namespace pdmlab
