#pragma once
// Smallest eigenpairs of a symmetric definite pencil A x = lambda M x.
//
// Small problems go to a dense generalized solver. Large ones use block
// Krylov iteration on (A - s M)^-1 M with full M-reorthogonalization and
// Rayleigh-Ritz on the original pencil. Completeness of the returned set is
// certified by Sylvester inertia: the LDL^T factorization of A - t M at a
// point t inside the first gap beyond the k-th value must show exactly as
// many negative pivots as Ritz values below t.

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "stekiso/error.hpp"

namespace stekiso {

using SparseMatrix = Eigen::SparseMatrix<double>;

struct EigenOptions {
  int dense_threshold = 1200;  // use the dense solver up to this size
  int block_size = 6;
  int max_basis = 600;
  double tol = 1e-11;  // relative residual
  unsigned seed = 12345;
};

struct EigenResult {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;  // M-orthonormal columns
  double max_residual = 0;  // relative
  std::string method;
  int negative_count_check = -1;  // inertia count at the certification shift
};

namespace detail {

inline double inf_norm(const SparseMatrix& a) {
  Eigen::VectorXd rows = Eigen::VectorXd::Zero(a.rows());
  for (int k = 0; k < a.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(a, k); it; ++it) rows[it.row()] += std::abs(it.value());
  return a.rows() ? rows.maxCoeff() : 0.0;
}

struct Inertia {
  int negative = 0;
  double min_abs_pivot = 0;
  bool ok = false;
};

inline Inertia inertia(const SparseMatrix& a) {
  Eigen::SimplicialLDLT<SparseMatrix> f(a);
  Inertia r;
  if (f.info() != Eigen::Success) return r;
  const auto& d = f.vectorD();
  r.ok = d.allFinite();
  r.negative = static_cast<int>((d.array() < 0).count());
  r.min_abs_pivot = d.size() ? d.cwiseAbs().minCoeff() : 0.0;
  return r;
}

inline double relative_residual(const SparseMatrix& a, const SparseMatrix& m, const Eigen::VectorXd& x, double lambda,
                                double norm_a, double norm_m) {
  const Eigen::VectorXd r = a * x - lambda * (m * x);
  return r.norm() / ((norm_a + std::abs(lambda) * norm_m) * x.norm());
}

}  // namespace detail

inline EigenResult dense_smallest(const Eigen::MatrixXd& a, const Eigen::MatrixXd& m, int k) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(a, m, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (es.info() != Eigen::Success) throw SolverError("dense generalized eigensolver failed");
  EigenResult r;
  r.values = es.eigenvalues().head(k);
  r.vectors = es.eigenvectors().leftCols(k);
  r.method = "dense";
  for (int j = 0; j < k; ++j) {
    const Eigen::VectorXd res = a * r.vectors.col(j) - r.values[j] * (m * r.vectors.col(j));
    const double scale = (a.cwiseAbs().rowwise().sum().maxCoeff() + std::abs(r.values[j]) * m.cwiseAbs().rowwise().sum().maxCoeff()) *
                         r.vectors.col(j).norm();
    r.max_residual = std::max(r.max_residual, res.norm() / scale);
  }
  return r;
}

/// k smallest eigenpairs of the sparse symmetric pencil (A, M), M positive definite.
inline EigenResult smallest_eigenpairs(const SparseMatrix& a, const SparseMatrix& m, int k, const EigenOptions& opt = {}) {
  const int n = static_cast<int>(a.rows());
  if (k < 1 || k > n) throw InvalidInput("requested " + std::to_string(k) + " eigenvalues of a pencil of size " + std::to_string(n));
  if (n <= opt.dense_threshold) return dense_smallest(Eigen::MatrixXd(a), Eigen::MatrixXd(m), k);

  const double norm_a = detail::inf_norm(a), norm_m = detail::inf_norm(m);
  // shift strictly below the spectrum: no negative pivots in A - s M
  const double unit = norm_a / norm_m;
  double s = -1e-3 * unit;
  for (int tries = 0;; ++tries) {
    const auto in = detail::inertia(a - s * m);
    if (in.ok && in.negative == 0 && in.min_abs_pivot > 1e-12 * norm_a) break;
    if (tries > 60) throw SolverError("could not place a shift below the spectrum");
    s = 2 * s - 1e-3 * unit;
  }
  Eigen::SimplicialLDLT<SparseMatrix> solver(a - s * m);
  if (solver.info() != Eigen::Success) throw SolverError("shifted factorization failed");

  const int b = opt.block_size;
  const int cap = std::min(n, opt.max_basis);
  Eigen::MatrixXd V(n, 0), H(0, 0);  // H = V^T A V, grown column by column
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> normal;

  auto orthonormalize_into_basis = [&](Eigen::MatrixXd w) {
    for (int j = 0; j < w.cols(); ++j) {
      Eigen::VectorXd x = w.col(j);
      for (int attempt = 0; attempt < 3; ++attempt) {
        const double before = std::sqrt(std::max(0.0, x.dot(m * x)));
        for (int pass = 0; pass < 2; ++pass) {
          const Eigen::VectorXd mx = m * x;
          x -= V * (V.transpose() * mx);
        }
        const double after = std::sqrt(std::max(0.0, x.dot(m * x)));
        if (after > 1e-8 * before && after > 0) {
          x /= after;
          break;
        }
        for (int i = 0; i < n; ++i) x[i] = normal(rng);  // breakdown: restart with a random direction
      }
      if (V.cols() >= cap) return;
      V.conservativeResize(Eigen::NoChange, V.cols() + 1);
      V.col(V.cols() - 1) = x;
      const Eigen::VectorXd c = V.transpose() * (a * x);
      const int sz = static_cast<int>(V.cols());
      H.conservativeResize(sz, sz);
      H.col(sz - 1) = c;
      H.row(sz - 1) = c.transpose();
    }
  };

  Eigen::MatrixXd start(n, b);
  for (int j = 0; j < b; ++j)
    for (int i = 0; i < n; ++i) start(i, j) = normal(rng);
  orthonormalize_into_basis(start);
  int block_begin = 0;
  int want = k;
  EigenResult best;
  while (true) {
    const int block_end = static_cast<int>(V.cols());
    Eigen::MatrixXd w = solver.solve(m * V.middleCols(block_begin, block_end - block_begin));
    block_begin = block_end;
    orthonormalize_into_basis(w);
    const int size = static_cast<int>(V.cols());
    const bool full = size >= cap;
    if (size < want + 2 && !full) continue;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    const auto& theta = es.eigenvalues();
    // extend `want` until a gap separates the k-th value from the next one
    want = k;
    while (want < size - 1 && theta[want] - theta[want - 1] <= 1e-8 * (std::abs(theta[want]) + unit)) ++want;
    if (want >= size - 1 && !full) continue;
    const int nchk = std::min(want + 1, size);
    Eigen::MatrixXd x = V * es.eigenvectors().leftCols(nchk);
    double worst = 0;
    for (int j = 0; j < std::min(want, nchk); ++j)
      worst = std::max(worst, detail::relative_residual(a, m, x.col(j), theta[j], norm_a, norm_m));
    if (worst > opt.tol) {
      if (full) throw SolverError("block Krylov iteration did not converge; worst residual " + std::to_string(worst));
      continue;
    }
    const double t = 0.5 * (theta[want - 1] + theta[want]);
    const auto in = detail::inertia(a - t * m);
    if (!in.ok) throw SolverError("inertia factorization failed");
    if (in.negative > want) {
      // a wanted eigenvalue has not entered the basis yet; keep expanding
      if (full) throw SolverError("missed eigenvalues: inertia count " + std::to_string(in.negative) +
                                  " exceeds converged count " + std::to_string(want));
      continue;
    }
    if (in.negative < want) throw SolverError("inertia count below the converged Ritz count");
    best.values = theta.head(k);
    best.vectors = x.leftCols(k);
    best.max_residual = worst;
    best.method = "block-krylov-shift-invert";
    best.negative_count_check = in.negative;
    return best;
  }
}

}  // namespace stekiso
