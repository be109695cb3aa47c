#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "pdmlab/fields.hpp"

using namespace pdmlab;

namespace {

// Central-difference oracle for the analytic gradients.
Gradient fd_gradient(const ScalarField& f, double x, double y, double h = 1e-5) {
  return {(f(x + h, y) - f(x - h, y)) / (2 * h), (f(x, y + h) - f(x, y - h)) / (2 * h)};
}

Hessian fd_hessian(const ScalarField& f, double x, double y, double h = 1e-5) {
  const Gradient gxp = f.gradient(x + h, y), gxm = f.gradient(x - h, y);
  const Gradient gyp = f.gradient(x, y + h), gym = f.gradient(x, y - h);
  return {(gxp[0] - gxm[0]) / (2 * h), (gyp[0] - gym[0]) / (2 * h), (gyp[1] - gym[1]) / (2 * h)};
}

const std::vector<std::pair<double, double>> kPoints{{0.0, 0.0}, {0.7, -0.3}, {-1.4, 2.2}, {3.0, 0.5}};

std::vector<ScalarField> catalog() {
  return {make_scalar_field("zero"),
          make_scalar_field("constant", {{"c", 2.5}}),
          make_scalar_field("harmonic", {{"k", 1.3}}),
          make_scalar_field("harmonic-x", {{"k", 0.8}}),
          make_scalar_field("linear", {{"c0", 0.1}, {"cx", -0.4}, {"cy", 0.9}}),
          make_scalar_field("bilinear", {{"c", 0.6}}),
          make_mass_profile("constant", {{"m0", 2.0}}).field,
          make_mass_profile("rational-bump", {{"m0", 1.5}, {"a", 0.8}}).field,
          make_mass_profile("quadratic", {{"m0", 1.0}, {"lambda", 0.5}}).field,
          make_mass_profile("linear", {{"m0", 1.0}, {"gx", 0.2}, {"gy", -0.1}}).field};
}

}  // namespace

TEST(Fields, CatalogValues) {
  EXPECT_DOUBLE_EQ(make_scalar_field("harmonic", {{"k", 2.0}})(1.0, 2.0), 5.0);
  EXPECT_DOUBLE_EQ(make_scalar_field("harmonic-x", {{"k", 2.0}})(1.0, 2.0), 1.0);
  EXPECT_DOUBLE_EQ(make_scalar_field("bilinear", {{"c", 0.5}})(2.0, 3.0), 3.0);
  EXPECT_DOUBLE_EQ(make_mass_profile("rational-bump", {{"m0", 1.0}, {"a", 1.0}})(1.0, 1.0), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(make_mass_profile("quadratic", {{"m0", 1.0}, {"lambda", 1.0}})(1.0, 0.0), 2.0);
  EXPECT_DOUBLE_EQ(make_mass_profile("linear", {{"m0", 2.0}, {"gx", 0.5}, {"gy", 0.0}})(-2.0, 7.0), 0.0);
}

TEST(Fields, GradientsMatchFiniteDifferences) {
  for (const auto& f : catalog()) {
    for (auto [x, y] : kPoints) {
      const Gradient g = f.gradient(x, y), fd = fd_gradient(f, x, y);
      const double scale = std::max({1.0, std::abs(g[0]), std::abs(g[1])});
      EXPECT_NEAR(g[0], fd[0], 1e-7 * scale) << f.kind() << " at " << x << "," << y;
      EXPECT_NEAR(g[1], fd[1], 1e-7 * scale) << f.kind() << " at " << x << "," << y;
    }
  }
}

TEST(Fields, HessiansMatchFiniteDifferences) {
  for (const auto& f : catalog()) {
    ASSERT_TRUE(f.has_hessian()) << f.kind();
    for (auto [x, y] : kPoints) {
      const Hessian h = f.hessian(x, y), fd = fd_hessian(f, x, y);
      for (int i = 0; i < 3; ++i) EXPECT_NEAR(h[i], fd[i], 1e-6) << f.kind() << " component " << i;
    }
  }
}

TEST(Fields, StrictParameterNames) {
  EXPECT_THROW(make_scalar_field("harmonic", {}), ConfigError);
  EXPECT_THROW(make_scalar_field("harmonic", {{"k", 1.0}, {"kk", 2.0}}), ConfigError);
  EXPECT_THROW(make_scalar_field("zero", {{"c", 1.0}}), ConfigError);
  EXPECT_THROW(make_scalar_field("cubic", {}), ConfigError);
  EXPECT_THROW(make_scalar_field("constant", {{"c", NAN}}), ConfigError);
}

TEST(Fields, MassProfileValidation) {
  EXPECT_THROW(make_mass_profile("constant", {{"m0", 0.0}}), ConfigError);
  EXPECT_THROW(make_mass_profile("constant", {{"m0", -1.0}}), ConfigError);
  EXPECT_THROW(make_mass_profile("rational-bump", {{"m0", 1.0}, {"a", 0.0}}), ConfigError);
  EXPECT_THROW(make_mass_profile("quadratic", {{"m0", 1.0}, {"lambda", -0.1}}), ConfigError);
  EXPECT_THROW(make_mass_profile("gaussian", {{"m0", 1.0}}), ConfigError);
  EXPECT_TRUE(constant_mass(3.0).is_constant());
  EXPECT_FALSE(make_mass_profile("quadratic", {{"m0", 1.0}, {"lambda", 0.0}}).is_constant());
}

TEST(Fields, ConstantsValidation) {
  EXPECT_NO_THROW(PhysicalConstants{}.validate());
  EXPECT_THROW((PhysicalConstants{0.0, 1.0}.validate()), ConfigError);
  EXPECT_THROW((PhysicalConstants{1.0, INFINITY}.validate()), ConfigError);
}

TEST(Fields, VectorPotentialsCarryUniformField) {
  for (const char* gauge : {"symmetric", "landau-x"}) {
    const auto a = make_vector_potential(gauge, 1.7);
    for (auto [x, y] : kPoints) EXPECT_NEAR(curl(a, x, y), 1.7, 1e-14) << gauge;
  }
  const auto s = make_vector_potential("symmetric", 2.0);
  EXPECT_DOUBLE_EQ(s(1.0, 3.0)[0], -3.0);
  EXPECT_DOUBLE_EQ(s(1.0, 3.0)[1], 1.0);
  const auto l = make_vector_potential("landau-x", 2.0);
  EXPECT_DOUBLE_EQ(l(1.0, 3.0)[0], -6.0);
  EXPECT_DOUBLE_EQ(l(1.0, 3.0)[1], 0.0);
  EXPECT_THROW(make_vector_potential("coulomb", 1.0), ConfigError);
}

TEST(Fields, GaugeTransformAddsGradientAndKeepsCurl) {
  const auto a = make_vector_potential("symmetric", 1.0);
  const auto chi = make_scalar_field("bilinear", {{"c", 0.5}});
  const auto t = gauge_transform(a, chi);
  for (auto [x, y] : kPoints) {
    EXPECT_NEAR(t(x, y)[0], a(x, y)[0] + 0.5 * y, 1e-14);
    EXPECT_NEAR(t(x, y)[1], a(x, y)[1] + 0.5 * x, 1e-14);
    EXPECT_NEAR(curl(t, x, y), 1.0, 1e-14);
    const Gradient g = t.ax.gradient(x, y), fd = fd_gradient(t.ax, x, y);
    EXPECT_NEAR(g[0], fd[0], 1e-8);
    EXPECT_NEAR(g[1], fd[1], 1e-8);
  }
  // symmetric + grad(xy/2) is the Landau gauge A = (0, x)
  EXPECT_NEAR(t(0.3, 0.9)[0], 0.0, 1e-15);
  EXPECT_NEAR(t(0.3, 0.9)[1], 0.3, 1e-15);

  const ScalarField no_hessian("custom", {}, [](double, double) { return 0.0; },
                               [](double, double) { return Gradient{0.0, 0.0}; });
  EXPECT_THROW(gauge_transform(a, no_hessian), ConfigError);
}
