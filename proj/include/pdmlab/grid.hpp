#pragma once

// Tensor-product grids with Dirichlet walls and sparse finite-difference
// building blocks. Interior nodes only; the wavefunction vanishes on the
// (excluded) boundary nodes.

#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <complex>
#include <concepts>
#include <cstddef>
#include <cstdio>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "pdmlab/errors.hpp"

namespace pdmlab {

using Complex = std::complex<double>;
using SparseMatrix = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;
using ComplexVector = Eigen::VectorXcd;

enum class Axis { x = 0, y = 1 };

inline const char* to_string(Axis axis) { return axis == Axis::x ? "x" : "y"; }

struct Node {
  double x;
  double y;
};

struct Bounds2D {
  double xmin, xmax, ymin, ymax;
};

struct Grid1D {
  static constexpr int dimension = 1;

  std::size_t n;
  double xmin, xmax;
  double h;

  std::size_t size() const { return n; }
  Node node(std::size_t index) const { return {xmin + static_cast<double>(index + 1) * h, 0.0}; }
  double coordinate(std::size_t index) const { return node(index).x; }
  double spacing(Axis) const { return h; }
  double cell_volume() const { return h; }
};

struct Grid2D {
  static constexpr int dimension = 2;

  std::size_t nx, ny;
  Bounds2D bounds;
  double hx, hy;

  std::size_t size() const { return nx * ny; }
  std::size_t index(std::size_t i, std::size_t j) const { return i + nx * j; }
  Node node(std::size_t i, std::size_t j) const {
    return {bounds.xmin + static_cast<double>(i + 1) * hx, bounds.ymin + static_cast<double>(j + 1) * hy};
  }
  Node node(std::size_t index) const { return node(index % nx, index / nx); }
  double spacing(Axis axis) const { return axis == Axis::x ? hx : hy; }
  double cell_volume() const { return hx * hy; }
};

template <class G>
concept GridLike = requires(const G& g, std::size_t i) {
  { G::dimension } -> std::convertible_to<int>;
  { g.size() } -> std::convertible_to<std::size_t>;
  { g.node(i) } -> std::same_as<Node>;
  { g.cell_volume() } -> std::convertible_to<double>;
};

template <GridLike G>
std::vector<Axis> axes(const G&) {
  if constexpr (G::dimension == 1) {
    return {Axis::x};
  } else {
    return {Axis::x, Axis::y};
  }
}

inline Grid2D make_grid(std::size_t nx, std::size_t ny, Bounds2D b) {
  if (nx < 3 || ny < 3) throw ConfigError("grid: nx and ny must be >= 3");
  if (!(b.xmax > b.xmin) || !(b.ymax > b.ymin) || !std::isfinite(b.xmin) || !std::isfinite(b.xmax) ||
      !std::isfinite(b.ymin) || !std::isfinite(b.ymax)) {
    throw ConfigError("grid: degenerate bounds");
  }
  return {nx, ny, b, (b.xmax - b.xmin) / static_cast<double>(nx + 1), (b.ymax - b.ymin) / static_cast<double>(ny + 1)};
}

inline Grid1D make_grid_1d(std::size_t n, double xmin, double xmax) {
  if (n < 3) throw ConfigError("grid: n must be >= 3");
  if (!(xmax > xmin) || !std::isfinite(xmin) || !std::isfinite(xmax)) throw ConfigError("grid: degenerate bounds");
  return {n, xmin, xmax, (xmax - xmin) / static_cast<double>(n + 1)};
}

/// Max over stored entries of |H_mn - conj(H_nm)|; absent entries count as 0.
inline double hermiticity_defect(const SparseMatrix& m) {
  const SparseMatrix adjoint = m.adjoint();
  const SparseMatrix diff = m - adjoint;
  double worst = 0.0;
  for (int k = 0; k < diff.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(diff, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
  }
  return worst;
}

inline double max_abs(const SparseMatrix& m) {
  double worst = 0.0;
  for (int k = 0; k < m.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
  }
  return worst;
}

/// Sparse complex matrix acting on grid-sampled wavefunctions. The
/// hermiticity defect is recorded once, at construction.
class LinearOperator {
 public:
  LinearOperator() = default;
  explicit LinearOperator(SparseMatrix matrix) : matrix_(std::move(matrix)) {
    if (matrix_.rows() != matrix_.cols()) throw ConfigError("linear operator must be square");
    matrix_.makeCompressed();
    defect_ = pdmlab::hermiticity_defect(matrix_);
    for (int k = 0; k < matrix_.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(matrix_, k); it; ++it) {
        if (!std::isfinite(it.value().real()) || !std::isfinite(it.value().imag())) {
          throw PhysicsError("linear operator has a non-finite entry");
        }
      }
    }
  }

  const SparseMatrix& matrix() const { return matrix_; }
  std::size_t dim() const { return static_cast<std::size_t>(matrix_.rows()); }
  double hermiticity_defect() const { return defect_; }
  /// Largest entry magnitude, written ||H||_max.
  double max_abs() const { return pdmlab::max_abs(matrix_); }
  /// Max absolute row sum; bounds the spectral norm from above.
  double norm_bound() const {
    double worst = 0.0;
    for (int k = 0; k < matrix_.outerSize(); ++k) {
      double row = 0.0;
      for (SparseMatrix::InnerIterator it(matrix_, k); it; ++it) row += std::abs(it.value());
      worst = std::max(worst, row);
    }
    return worst;
  }
  ComplexVector apply(const ComplexVector& v) const { return matrix_ * v; }

  /// (H + H^dagger) / 2.
  LinearOperator symmetrized() const {
    const SparseMatrix adjoint = matrix_.adjoint();
    return LinearOperator(SparseMatrix(0.5 * (matrix_ + adjoint)));
  }

 private:
  SparseMatrix matrix_;
  double defect_ = 0.0;
};

inline double hermiticity_defect(const LinearOperator& op) { return op.hermiticity_defect(); }

namespace detail {

// 1D stencil matrix of size n: order 1 -> (-1, 0, 1) / 2h, order 2 -> (1, -2, 1) / h^2.
inline std::vector<Eigen::Triplet<Complex>> stencil_1d(std::size_t n, double h, int order) {
  std::vector<Eigen::Triplet<Complex>> t;
  const int size = static_cast<int>(n);
  if (order == 1) {
    const double c = 1.0 / (2.0 * h);
    for (int i = 0; i < size; ++i) {
      if (i > 0) t.emplace_back(i, i - 1, -c);
      if (i + 1 < size) t.emplace_back(i, i + 1, c);
    }
  } else if (order == 2) {
    const double c = 1.0 / (h * h);
    for (int i = 0; i < size; ++i) {
      if (i > 0) t.emplace_back(i, i - 1, c);
      t.emplace_back(i, i, -2.0 * c);
      if (i + 1 < size) t.emplace_back(i, i + 1, c);
    }
  } else {
    throw ConfigError("derivative order must be 1 or 2");
  }
  return t;
}

}  // namespace detail

/// Central-difference derivative along one axis. Order 1 is exactly
/// antisymmetric, order 2 exactly symmetric.
inline LinearOperator build_derivative(const Grid1D& grid, Axis axis, int order) {
  if (axis != Axis::x) throw ConfigError("1D grid only has the x axis");
  const auto t = detail::stencil_1d(grid.n, grid.h, order);
  SparseMatrix m(static_cast<int>(grid.n), static_cast<int>(grid.n));
  m.setFromTriplets(t.begin(), t.end());
  return LinearOperator(std::move(m));
}

inline LinearOperator build_derivative(const Grid2D& grid, Axis axis, int order) {
  const bool along_x = axis == Axis::x;
  const std::size_t n_along = along_x ? grid.nx : grid.ny;
  const auto line = detail::stencil_1d(n_along, grid.spacing(axis), order);
  std::vector<Eigen::Triplet<Complex>> t;
  t.reserve(line.size() * (along_x ? grid.ny : grid.nx));
  if (along_x) {
    // I_y (x) D
    for (std::size_t j = 0; j < grid.ny; ++j) {
      for (const auto& e : line) {
        t.emplace_back(static_cast<int>(grid.index(static_cast<std::size_t>(e.row()), j)),
                       static_cast<int>(grid.index(static_cast<std::size_t>(e.col()), j)), e.value());
      }
    }
  } else {
    // D (x) I_x
    for (std::size_t i = 0; i < grid.nx; ++i) {
      for (const auto& e : line) {
        t.emplace_back(static_cast<int>(grid.index(i, static_cast<std::size_t>(e.row()))),
                       static_cast<int>(grid.index(i, static_cast<std::size_t>(e.col()))), e.value());
      }
    }
  }
  const int n = static_cast<int>(grid.size());
  SparseMatrix m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  return LinearOperator(std::move(m));
}

/// Node samples of an arbitrary real function of (x, y).
template <GridLike G, class F>
  requires std::invocable<const F&, double, double>
std::vector<double> sample_nodes(const G& grid, const F& f) {
  std::vector<double> out(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Node p = grid.node(k);
    out[k] = f(p.x, p.y);
  }
  return out;
}

inline SparseMatrix diagonal_matrix(const std::vector<Complex>& values) {
  const int n = static_cast<int>(values.size());
  SparseMatrix m(n, n);
  m.reserve(Eigen::VectorXi::Constant(n, 1));
  for (int k = 0; k < n; ++k) m.insert(k, k) = values[static_cast<std::size_t>(k)];
  m.makeCompressed();
  return m;
}

inline SparseMatrix diagonal_matrix(const std::vector<double>& values) {
  return diagonal_matrix(std::vector<Complex>(values.begin(), values.end()));
}

/// Multiplication operator diag(f(node)). Fails on non-finite samples.
template <GridLike G, class F>
  requires std::invocable<const F&, double, double>
LinearOperator sample_diagonal(const G& grid, const F& f) {
  const auto values = sample_nodes(grid, f);
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!std::isfinite(values[k])) {
      const Node p = grid.node(k);
      throw PhysicsError("non-finite field sample at node " + std::to_string(k) + " (" + std::to_string(p.x) + ", " +
                         std::to_string(p.y) + ")");
    }
  }
  return LinearOperator(diagonal_matrix(values));
}

/// Coordinate-list dump, one "row col real imag" line per stored entry,
/// sorted by (row, col), 17 significant digits.
inline void write_coordinate_list(const SparseMatrix& m, std::ostream& os) {
  char buffer[128];
  std::vector<std::pair<int, Complex>> row_entries;
  for (int row = 0; row < m.outerSize(); ++row) {
    row_entries.clear();
    for (SparseMatrix::InnerIterator it(m, row); it; ++it) row_entries.emplace_back(static_cast<int>(it.col()), it.value());
    std::sort(row_entries.begin(), row_entries.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [col, value] : row_entries) {
      std::snprintf(buffer, sizeof buffer, "%d %d %.17g %.17g\n", row, col, value.real(), value.imag());
      os << buffer;
    }
  }
}

inline void write_coordinate_list(const LinearOperator& op, std::ostream& os) {
  write_coordinate_list(op.matrix(), os);
}

}  // namespace pdmlab
