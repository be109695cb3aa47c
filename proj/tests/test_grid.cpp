#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "pdmlab/grid.hpp"

using namespace pdmlab;

TEST(Grid, SpacingAndIndexing) {
  const Grid2D g = make_grid(4, 3, {-1.0, 1.0, 0.0, 2.0});
  EXPECT_DOUBLE_EQ(g.hx, 0.4);
  EXPECT_DOUBLE_EQ(g.hy, 0.5);
  EXPECT_EQ(g.size(), 12u);
  EXPECT_EQ(g.index(1, 2), 9u);
  EXPECT_DOUBLE_EQ(g.node(9).x, -0.2);
  EXPECT_DOUBLE_EQ(g.node(9).y, 1.5);
  EXPECT_DOUBLE_EQ(g.cell_volume(), 0.2);

  const Grid1D l = make_grid_1d(9, 0.0, 1.0);
  EXPECT_DOUBLE_EQ(l.h, 0.1);
  EXPECT_DOUBLE_EQ(l.coordinate(0), 0.1);
  EXPECT_DOUBLE_EQ(l.coordinate(8), 0.9);
}

TEST(Grid, RejectsDegenerateInput) {
  EXPECT_THROW(make_grid(2, 8, {0, 1, 0, 1}), ConfigError);
  EXPECT_THROW(make_grid(8, 8, {1, 1, 0, 1}), ConfigError);
  EXPECT_THROW(make_grid(8, 8, {0, 1, 0, NAN}), ConfigError);
  EXPECT_THROW(make_grid_1d(2, 0, 1), ConfigError);
  EXPECT_THROW(make_grid_1d(8, 1, 0), ConfigError);
  const Grid2D g = make_grid(4, 4, {0, 1, 0, 1});
  EXPECT_THROW(build_derivative(g, Axis::x, 3), ConfigError);
}

TEST(Grid, FirstDerivativeIsExactlyAntisymmetric) {
  const Grid2D g = make_grid(7, 5, {-1.0, 2.0, 0.0, 1.0});
  for (Axis axis : {Axis::x, Axis::y}) {
    const SparseMatrix d = build_derivative(g, axis, 1).matrix();
    const SparseMatrix sum = d + SparseMatrix(d.transpose());
    EXPECT_EQ(max_abs(sum), 0.0);
    // i D is Hermitian
    EXPECT_EQ(hermiticity_defect(SparseMatrix(Complex(0, 1) * d)), 0.0);
  }
  const SparseMatrix d2 = build_derivative(g, Axis::y, 2).matrix();
  EXPECT_EQ(max_abs(SparseMatrix(d2 - SparseMatrix(d2.transpose()))), 0.0);
}

TEST(Grid, DerivativesActAlongTheirAxis) {
  const Grid2D g = make_grid(16, 12, {-1.0, 1.0, -2.0, 1.0});
  ComplexVector f(static_cast<Eigen::Index>(g.size()));
  for (std::size_t k = 0; k < g.size(); ++k) f[static_cast<Eigen::Index>(k)] = 2.0 * g.node(k).x - 3.0 * g.node(k).y;
  const ComplexVector dx = build_derivative(g, Axis::x, 1).apply(f);
  const ComplexVector dy = build_derivative(g, Axis::y, 1).apply(f);
  // interior nodes see the exact slope of a linear function
  for (std::size_t j = 1; j + 1 < g.ny; ++j) {
    for (std::size_t i = 1; i + 1 < g.nx; ++i) {
      const auto k = static_cast<Eigen::Index>(g.index(i, j));
      EXPECT_NEAR(dx[k].real(), 2.0, 1e-12);
      EXPECT_NEAR(dy[k].real(), -3.0, 1e-12);
    }
  }
}

TEST(Grid, StencilsConvergeSecondOrder) {
  // sin vanishes on the walls of [0, pi], so the Dirichlet truncation is exact.
  auto error = [](std::size_t n, int order) {
    const Grid1D g = make_grid_1d(n, 0.0, std::numbers::pi);
    ComplexVector f(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) f[static_cast<Eigen::Index>(i)] = std::sin(g.coordinate(i));
    const ComplexVector d = build_derivative(g, Axis::x, order).apply(f);
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = g.coordinate(i);
      const double exact = order == 1 ? std::cos(x) : -std::sin(x);
      // skip the wall-adjacent nodes for D1, where the odd extension is not sin
      if (order == 1 && (i == 0 || i + 1 == n)) continue;
      worst = std::max(worst, std::abs(d[static_cast<Eigen::Index>(i)].real() - exact));
    }
    return worst;
  };
  for (int order : {1, 2}) {
    const double ratio = error(31, order) / error(63, order);
    EXPECT_NEAR(ratio, 4.0, 0.4) << "order " << order;
  }
}

TEST(Grid, HermiticityDefectOfDiagonalI) {
  EXPECT_DOUBLE_EQ(hermiticity_defect(diagonal_matrix(std::vector<Complex>{{0, 1}, {0, 1}})), 2.0);
  EXPECT_DOUBLE_EQ(LinearOperator(diagonal_matrix(std::vector<Complex>{{0, 1}})).hermiticity_defect(), 2.0);
  EXPECT_DOUBLE_EQ(hermiticity_defect(diagonal_matrix(std::vector<double>{1.0, -2.0})), 0.0);
}

TEST(Grid, LinearOperatorChecks) {
  EXPECT_THROW(LinearOperator(SparseMatrix(2, 3)), ConfigError);
  SparseMatrix bad(2, 2);
  bad.insert(0, 1) = Complex(NAN, 0.0);
  EXPECT_THROW(LinearOperator{bad}, PhysicsError);

  SparseMatrix m(2, 2);
  m.insert(0, 1) = Complex(1.0, 2.0);
  m.insert(1, 1) = -3.0;
  const LinearOperator op(m);
  EXPECT_DOUBLE_EQ(op.max_abs(), 3.0);
  EXPECT_DOUBLE_EQ(op.norm_bound(), 3.0);
  EXPECT_NEAR(op.hermiticity_defect(), std::sqrt(5.0), 1e-15);
  EXPECT_EQ(op.symmetrized().hermiticity_defect(), 0.0);
}

TEST(Grid, SampleDiagonalRejectsNonFinite) {
  const Grid2D g = make_grid(4, 4, {-1, 1, -1, 1});
  EXPECT_THROW(sample_diagonal(g, [&g](double x, double) { return 1.0 / (x - g.node(5).x); }), PhysicsError);
  const auto d = sample_diagonal(g, [](double x, double y) { return x + 10 * y; });
  EXPECT_DOUBLE_EQ(d.matrix().coeff(5, 5).real(), g.node(5).x + 10 * g.node(5).y);
}

TEST(Grid, CoordinateListIsSortedAndExact) {
  SparseMatrix m(3, 3);
  m.insert(2, 0) = Complex(0.1, -1.0 / 3.0);
  m.insert(0, 2) = 1.0;
  m.insert(0, 0) = Complex(0.0, 2.0);
  std::ostringstream os;
  write_coordinate_list(m, os);
  EXPECT_EQ(os.str(),
            "0 0 0 2\n"
            "0 2 1 0\n"
            "2 0 0.10000000000000001 -0.33333333333333331\n");
}
