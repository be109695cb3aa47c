#pragma once

// Thick-restart block Lanczos for the lowest eigenpairs of a sparse Hermitian
// matrix. The Krylov basis is kept fully orthogonal (classical Gram-Schmidt,
// repeated until it sticks) and H*Q is stored alongside Q, so every restart
// is a plain Rayleigh-Ritz step on T = Q^H H Q.

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>

#include "pdmlab/errors.hpp"
#include "pdmlab/grid.hpp"

namespace pdmlab::detail {

struct LanczosResult {
  Eigen::VectorXd values;
  Eigen::MatrixXcd vectors;  // unit 2-norm columns
  Eigen::VectorXd residuals;
  std::size_t matvecs = 0;
  std::size_t restarts = 0;
  bool converged = false;
};

class BlockLanczos {
 public:
  BlockLanczos(const SparseMatrix& h, std::size_t block, std::size_t max_basis, std::uint64_t seed)
      : h_(h),
        n_(h.rows()),
        block_(static_cast<Eigen::Index>(block)),
        m_(std::min<Eigen::Index>(static_cast<Eigen::Index>(max_basis), h.rows())),
        q_(n_, m_),
        hq_(n_, m_),
        rng_(seed) {
    if (block_ < 1 || m_ < block_) throw SolverError("lanczos: basis must hold at least one block");
  }

  LanczosResult run(std::size_t k, double abs_tol, std::size_t max_restarts) {
    const Eigen::Index want = static_cast<Eigen::Index>(k);
    LanczosResult out;
    Eigen::Index last = append(random_block(block_));
    for (std::size_t restart = 0;; ++restart) {
      while (cols_ < m_ && last > 0) {
        const Eigen::MatrixXcd next = hq_.middleCols(cols_ - last, last);
        last = append(next);
      }

      Eigen::MatrixXcd t = q_.leftCols(cols_).adjoint() * hq_.leftCols(cols_);
      t = (0.5 * (t + t.adjoint())).eval();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(t);
      if (es.info() != Eigen::Success) throw SolverError("lanczos: projected eigenproblem failed");
      const Eigen::VectorXd& theta = es.eigenvalues();
      const Eigen::MatrixXcd& s = es.eigenvectors();

      // Residuals certified by an explicit product with H.
      const Eigen::MatrixXcd y = q_.leftCols(cols_) * s.leftCols(want);
      const Eigen::MatrixXcd r = h_ * y - y * theta.head(want).asDiagonal();
      matvecs_ += static_cast<std::size_t>(want);
      Eigen::VectorXd res(want);
      for (Eigen::Index c = 0; c < want; ++c) res[c] = r.col(c).norm();

      const bool exhausted = cols_ == n_ || last == 0;
      out.converged = res.maxCoeff() <= abs_tol;
      if (out.converged || exhausted || restart >= max_restarts) {
        out.values = theta.head(want);
        out.vectors = y;
        out.residuals = res;
        out.matvecs = matvecs_;
        out.restarts = restart;
        return out;
      }

      // Keep the lowest Ritz vectors, continue from the residual block of
      // the lowest ones; that block is orthogonal to the kept span.
      const Eigen::Index keep = std::min(cols_ - block_, std::max(want + block_, cols_ / 2));
      const Eigen::MatrixXcd sk = s.leftCols(keep);
      const Eigen::MatrixXcd qk = q_.leftCols(cols_) * sk;
      const Eigen::MatrixXcd hqk = hq_.leftCols(cols_) * sk;
      q_.leftCols(keep) = qk;
      hq_.leftCols(keep) = hqk;
      cols_ = keep;
      const Eigen::Index nb = std::min(block_, keep);
      const Eigen::MatrixXcd cont = hq_.leftCols(nb) - q_.leftCols(nb) * theta.head(nb).asDiagonal();
      last = append(cont);
    }
  }

 private:
  Eigen::VectorXcd random_vector() {
    Eigen::VectorXcd v(n_);
    for (Eigen::Index i = 0; i < n_; ++i) v[i] = Complex(normal_(rng_), normal_(rng_));
    return v;
  }

  Eigen::MatrixXcd random_block(Eigen::Index b) {
    Eigen::MatrixXcd x(n_, b);
    for (Eigen::Index c = 0; c < b; ++c) x.col(c) = random_vector();
    return x;
  }

  // Orthonormalizes the columns of x against the basis and each other and
  // appends them. Rank-deficient columns are replaced by random directions.
  Eigen::Index append(const Eigen::MatrixXcd& x) {
    const Eigen::Index start = cols_;
    for (Eigen::Index c = 0; c < x.cols() && cols_ < m_; ++c) {
      Eigen::VectorXcd v = x.col(c);
      bool placed = false;
      for (int attempt = 0; attempt < 4 && !placed; ++attempt) {
        if (attempt > 0 || v.norm() == 0.0) v = random_vector();
        const double original = v.norm();
        double previous = original;
        double now = original;
        for (int pass = 0; pass < 4; ++pass) {
          if (cols_ > 0) v -= q_.leftCols(cols_) * (q_.leftCols(cols_).adjoint() * v);
          now = v.norm();
          if (now > 0.7 * previous) break;
          previous = now;
        }
        if (now > 1e-10 * original) {
          q_.col(cols_) = v / now;
          placed = true;
        }
      }
      if (!placed) throw SolverError("lanczos: could not extend the Krylov basis");
      ++cols_;
    }
    const Eigen::Index added = cols_ - start;
    if (added > 0) {
      hq_.middleCols(start, added) = h_ * q_.middleCols(start, added);
      matvecs_ += static_cast<std::size_t>(added);
    }
    return added;
  }

  const SparseMatrix& h_;
  Eigen::Index n_;
  Eigen::Index block_;
  Eigen::Index m_;
  Eigen::MatrixXcd q_;
  Eigen::MatrixXcd hq_;
  Eigen::Index cols_ = 0;
  std::size_t matvecs_ = 0;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_;
};

}  // namespace pdmlab::detail
