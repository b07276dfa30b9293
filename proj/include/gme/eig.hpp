#pragma once

// Largest eigenvalue of Hermitian linear operators: thick-restart Lanczos and power iteration.

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCore>

#include "gme/types.hpp"

namespace gme {

enum class EigMethod { Power, Lanczos };

struct EigOptions {
  double tol = 1e-10;  ///< relative residual target |Ax - theta x| <= tol |theta|
  long max_iter = 20000;  ///< operator applications
  std::uint64_t seed = 12345;
  EigMethod method = EigMethod::Lanczos;
  int krylov_dim = 24;  ///< Lanczos basis size before restart
  int keep = 4;         ///< Ritz vectors retained at restart
};

struct EigResult {
  double value = 0.0;
  double residual = 0.0;  ///< relative residual of the returned pair
  long iterations = 0;
  bool converged = false;
  CVector vector;
};

/// y = A x for a Hermitian operator of a fixed dimension.
using LinearOperator = std::function<void(const CVector& x, CVector& y)>;

inline CVector random_unit_vector(Eigen::Index dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  CVector v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const double re = g(rng);
    const double im = g(rng);
    v[i] = cplx(re, im);
  }
  return v / v.norm();
}

inline EigResult power_max(const LinearOperator& op, Eigen::Index dim, const EigOptions& opts) {
  EigResult res;
  CVector x = random_unit_vector(dim, opts.seed);
  CVector y(dim);
  double best_res = INFINITY;
  for (long it = 1; it <= opts.max_iter; ++it) {
    op(x, y);
    const double theta = x.dot(y).real();
    const double r = (y - theta * x).norm() / std::max(std::abs(theta), 1e-300);
    res.iterations = it;
    if (r < best_res) {
      best_res = r;
      res.value = theta;
      res.residual = r;
      res.vector = x;
    }
    if (r <= opts.tol) {
      res.converged = true;
      return res;
    }
    const double ny = y.norm();
    if (ny == 0.0) {
      res.value = 0.0;
      res.residual = 0.0;
      res.converged = true;
      return res;
    }
    x = y / ny;
  }
  return res;
}

/// Thick-restart Lanczos with full reorthogonalization; targets the largest algebraic eigenvalue.
inline EigResult lanczos_max(const LinearOperator& op, Eigen::Index dim, const EigOptions& opts) {
  EigResult res;
  if (dim <= 0) throw std::invalid_argument("lanczos_max: empty operator");
  const int m = static_cast<int>(std::min<Eigen::Index>(std::max(opts.krylov_dim, 3), dim));
  const int keep_max = std::max(1, std::min(opts.keep, m - 2));

  std::vector<CVector> basis;
  basis.reserve(m + 1);
  basis.push_back(random_unit_vector(dim, opts.seed));
  CMatrix h = CMatrix::Zero(m, m);
  int kept = 0;
  CVector w(dim);
  long applications = 0;

  while (true) {
    double beta = 0.0;
    int filled = kept;
    bool invariant = false;
    for (int j = kept; j < m; ++j) {
      op(basis[j], w);
      ++applications;
      // Two passes of classical Gram-Schmidt against the whole basis.
      for (int pass = 0; pass < 2; ++pass) {
        for (int i = 0; i <= j; ++i) {
          const cplx c = basis[i].dot(w);
          w -= c * basis[i];
          h(i, j) += c;
        }
      }
      for (int i = 0; i < j; ++i) h(j, i) = std::conj(h(i, j));
      h(j, j) = h(j, j).real();
      filled = j + 1;
      beta = w.norm();
      const double scale = std::max(h.topLeftCorner(filled, filled).cwiseAbs().maxCoeff(), 1e-300);
      if (beta <= 1e-14 * scale) {
        invariant = true;
        break;
      }
      if (static_cast<int>(basis.size()) <= j + 1)
        basis.push_back(w / beta);
      else
        basis[j + 1] = w / beta;
    }

    Eigen::SelfAdjointEigenSolver<CMatrix> es(h.topLeftCorner(filled, filled));
    const auto& theta = es.eigenvalues();
    const CMatrix& u = es.eigenvectors();
    const int top = filled - 1;
    const double value = theta(top);
    const double resid = invariant ? 0.0 : std::abs(beta * u(filled - 1, top)) / std::max(std::abs(value), 1e-300);

    res.value = value;
    res.residual = resid;
    res.iterations = applications;
    if (invariant || resid <= opts.tol || applications >= opts.max_iter) {
      res.converged = invariant || resid <= opts.tol;
      res.vector = CVector::Zero(dim);
      for (int j = 0; j < filled; ++j) res.vector += u(j, top) * basis[j];
      return res;
    }

    // Restart with the top Ritz vectors plus the residual direction.
    const int p = std::min(keep_max, filled - 1);
    std::vector<CVector> ritz(p, CVector::Zero(dim));
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < filled; ++j) ritz[i] += u(j, top - i) * basis[j];
    CVector next = basis[filled];
    for (int i = 0; i < p; ++i) basis[i] = std::move(ritz[i]);
    basis[p] = std::move(next);
    basis.resize(p + 1);
    h.setZero();
    for (int i = 0; i < p; ++i) h(i, i) = theta(top - i);
    kept = p;
  }
}

inline EigResult largest_eigenvalue(const LinearOperator& op, Eigen::Index dim, const EigOptions& opts) {
  return opts.method == EigMethod::Power ? power_max(op, dim, opts) : lanczos_max(op, dim, opts);
}

/// Largest eigenvalue of a small dense Hermitian matrix.
inline double largest_eigenvalue_dense(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(m.rows() - 1);
}

/// Largest squared singular value, computed on the smaller Gram side.
inline EigResult smax_squared(const Eigen::SparseMatrix<cplx, Eigen::RowMajor>& m, const EigOptions& opts) {
  if (m.nonZeros() == 0) throw std::invalid_argument("smax_squared: zero matrix");
  if (m.cols() <= m.rows()) {
    LinearOperator op = [&m](const CVector& x, CVector& y) {
      CVector t = m * x;
      y.noalias() = m.adjoint() * t;
    };
    return largest_eigenvalue(op, m.cols(), opts);
  }
  LinearOperator op = [&m](const CVector& x, CVector& y) {
    CVector t = m.adjoint() * x;
    y.noalias() = m * t;
  };
  return largest_eigenvalue(op, m.rows(), opts);
}

}  // namespace gme
