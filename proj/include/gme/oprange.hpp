#pragma once

// Maximal separable numerical range M(X) = max <ab|X|ab> of bipartite Hermitian operators.

#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>

#include "gme/eig.hpp"
#include "gme/oracle.hpp"
#include "gme/sym.hpp"

namespace gme {

/// Hermitian operator on C^{dA} (x) C^{dB}; row index a*dB + b.
class HermitianOperator {
 public:
  HermitianOperator(int da, int db, CMatrix m, double tol = 1e-12) : da_(da), db_(db), m_(std::move(m)) {
    if (da < 2 || db < 2) throw std::invalid_argument("operator local dimensions must be >= 2");
    if (m_.rows() != da * db || m_.cols() != da * db)
      throw std::invalid_argument("operator matrix must be " + std::to_string(da * db) + " x " + std::to_string(da * db));
    if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > tol) throw std::invalid_argument("operator is not Hermitian");
    m_ = 0.5 * (m_ + m_.adjoint()).eval();
  }

  int dim_a() const { return da_; }
  int dim_b() const { return db_; }
  const CMatrix& matrix() const { return m_; }

  HermitianOperator shifted(double c) const {
    return HermitianOperator(da_, db_, m_ + c * CMatrix::Identity(m_.rows(), m_.cols()));
  }

 private:
  int da_, db_;
  CMatrix m_;
};

struct RangeBound {
  double value = 0.0;
  long iterations = 0;
  double residual = 0.0;
  bool converged = true;
};

/// The five product states of the two-qutrit tiles basis.
inline std::vector<CVector> upb_tiles_states() {
  const double r2 = 1.0 / std::sqrt(2.0), r3 = 1.0 / std::sqrt(3.0);
  auto ket = [](std::initializer_list<double> v) {
    CVector x(3);
    int i = 0;
    for (double c : v) x[i++] = c;
    return x;
  };
  auto prod = [](const CVector& a, const CVector& b) {
    CVector out(9);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) out[3 * i + j] = a[i] * b[j];
    return out;
  };
  return {prod(ket({1, 0, 0}), ket({r2, -r2, 0})), prod(ket({r2, -r2, 0}), ket({0, 0, 1})),
          prod(ket({0, 0, 1}), ket({0, r2, -r2})), prod(ket({0, r2, -r2}), ket({1, 0, 0})),
          prod(ket({r3, r3, r3}), ket({r3, r3, r3}))};
}

/// 1 - P with P the projector onto the tiles basis.
inline HermitianOperator upb_tiles_operator() {
  CMatrix p = CMatrix::Zero(9, 9);
  for (const auto& v : upb_tiles_states()) p += v * v.adjoint();
  return HermitianOperator(3, 3, CMatrix::Identity(9, 9) - p);
}

namespace detail {

// Applies the two-copy operator X on the factor pair (A_j, B_j) of a tensor laid out as
// A_1..A_k (row) x B_1..B_k (column), row-major.
inline void apply_pair(std::vector<cplx>& t, const CMatrix& x, int da, int db, int k, int j) {
  std::size_t stride_a = 1, stride_b = 1, cols = 1;
  for (int i = 0; i < k; ++i) cols *= db;
  for (int i = j + 1; i < k; ++i) {
    stride_a *= da;
    stride_b *= db;
  }
  stride_a *= cols;
  const int dd = da * db;
  std::vector<std::size_t> off(dd);
  for (int a = 0; a < da; ++a)
    for (int b = 0; b < db; ++b) off[a * db + b] = a * stride_a + b * stride_b;
  CVector in(dd), out(dd);
  for (std::size_t base = 0; base < t.size(); ++base) {
    if ((base / stride_a) % da != 0 || (base / stride_b) % db != 0) continue;
    for (int i = 0; i < dd; ++i) in[i] = t[base + off[i]];
    out.noalias() = x * in;
    for (int i = 0; i < dd; ++i) t[base + off[i]] = out[i];
  }
}

}  // namespace detail

/// lambda_max((S_A (x) S_B)^dagger X^{(x)k} (S_A (x) S_B))^{1/k}; X^{(x)k} is applied factor by factor.
inline RangeBound m_h1_bound(const HermitianOperator& x, int k, const EigOptions& eig = {},
                             std::size_t cap = kDefaultMaxEntries) {
  if (k < 1) throw std::invalid_argument("m_h1_upper: k must be >= 1");
  const int da = x.dim_a(), db = x.dim_b();
  if (k == 1) {
    return {largest_eigenvalue_dense(x.matrix()), 1, 0.0, true};
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(x.matrix(), Eigen::EigenvaluesOnly);
  if (es.eigenvalues()(0) < -1e-12) throw std::invalid_argument("m_h1_upper needs a positive semidefinite operator for k > 1");
  const double full = std::pow(double(da) * db, k);
  if (full > static_cast<double>(cap))
    throw CapExceeded("operator lift", full > 1e18 ? SIZE_MAX : static_cast<std::size_t>(full), cap);

  const SparseMatrix sa = symmetric_isometry(da, k, cap), sb = symmetric_isometry(db, k, cap);
  const Eigen::Index na = sa.cols(), nb = sb.cols();
  const Eigen::Index ra = sa.rows(), rb = sb.rows();
  using RowMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const CMatrix& xm = x.matrix();
  LinearOperator op = [&](const CVector& v, CVector& y) {
    Eigen::Map<const RowMat> coeff(v.data(), na, nb);
    RowMat half = coeff * sb.transpose();
    std::vector<cplx> lifted(static_cast<std::size_t>(ra * rb));
    Eigen::Map<RowMat> lm(lifted.data(), ra, rb);
    lm.noalias() = sa * half;
    for (int j = 0; j < k; ++j) detail::apply_pair(lifted, xm, da, db, k, j);
    RowMat back = sa.transpose() * lm;
    RowMat proj = back * sb;
    y = Eigen::Map<CVector>(proj.data(), na * nb);
  };
  const EigResult e = largest_eigenvalue(op, na * nb, eig);
  return {kth_root(e.value, k), e.iterations, e.residual, e.converged};
}

inline double m_h1_upper(const HermitianOperator& x, int k, const EigOptions& eig = {},
                         std::size_t cap = kDefaultMaxEntries) {
  return m_h1_bound(x, k, eig, cap).value;
}

/// Matrix of X (x) 1^{(x)k-1} between symmetric product states |D^nu D^mu>, built from the Dicke split.
inline SparseMatrix m_h3_matrix(const HermitianOperator& x, int k, std::size_t cap = kDefaultMaxEntries) {
  if (k < 1) throw std::invalid_argument("m_h3: k must be >= 1");
  const int da = x.dim_a(), db = x.dim_b();
  const OccupationIndex ia(da, k), ib(db, k);
  const std::size_t dim = ia.size() * ib.size();
  check_cap("operator symmetric space", dim, cap);
  const CMatrix& xm = x.matrix();
  std::vector<Eigen::Triplet<cplx>> trip;
  const double k2 = double(k) * k;
  for (std::size_t i = 0; i < ia.size(); ++i)
    for (std::size_t j = 0; j < ib.size(); ++j) {
      const Eigen::Index row = static_cast<Eigen::Index>(i * ib.size() + j);
      for (int a = 0; a < da; ++a) {
        if (ia[i][a] == 0) continue;
        Occupation ra = ia[i];
        --ra[a];
        for (int b = 0; b < db; ++b) {
          if (ib[j][b] == 0) continue;
          Occupation rb = ib[j];
          --rb[b];
          const double w = std::sqrt(double(ia[i][a]) * ib[j][b]);
          for (int a2 = 0; a2 < da; ++a2) {
            ++ra[a2];
            const int i2 = ia.rank(ra);
            for (int b2 = 0; b2 < db; ++b2) {
              ++rb[b2];
              const int j2 = ib.rank(rb);
              const cplx val = xm(a * db + b, a2 * db + b2);
              if (val != 0.0) {
                const double w2 = std::sqrt(double(ra[a2]) * rb[b2]);
                trip.emplace_back(row, static_cast<Eigen::Index>(i2 * ib.size() + j2), val * w * w2 / k2);
              }
              --rb[b2];
            }
            --ra[a2];
          }
        }
      }
    }
  SparseMatrix h(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  h.setFromTriplets(trip.begin(), trip.end());
  return h;
}

/// lambda_max of the symmetric-extension matrix; nonincreasing in k.
inline RangeBound m_h3_bound(const HermitianOperator& x, int k, const EigOptions& eig = {},
                             std::size_t cap = kDefaultMaxEntries) {
  const SparseMatrix h = m_h3_matrix(x, k, cap);
  if (h.rows() <= 400) return {largest_eigenvalue_dense(CMatrix(h)), 1, 0.0, true};
  LinearOperator op = [&h](const CVector& v, CVector& y) { y.noalias() = h * v; };
  const EigResult e = largest_eigenvalue(op, h.rows(), eig);
  return {e.value, e.iterations, e.residual, e.converged};
}

inline double m_h3_upper(const HermitianOperator& x, int k, const EigOptions& eig = {},
                         std::size_t cap = kDefaultMaxEntries) {
  return m_h3_bound(x, k, eig, cap).value;
}

struct SeesawResult {
  double value = 0.0;
  CVector a, b;
  int best_restart = -1;
};

/// Alternating top-eigenvector updates of <b|X|b> and <a|X|a>; a certified lower bound on M(X).
inline SeesawResult seesaw_lower(const HermitianOperator& x, const OracleOptions& opts = {}) {
  const int da = x.dim_a(), db = x.dim_b();
  const CMatrix& xm = x.matrix();
  auto top = [](const CMatrix& m) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
    return std::pair{es.eigenvalues()(m.rows() - 1), CVector(es.eigenvectors().col(m.rows() - 1))};
  };
  SeesawResult best;
  best.value = -INFINITY;
  for (int r = 0; r < opts.restarts; ++r) {
    CVector b = haar_vector(db, opts.seed, r, 1);
    CVector a;
    double value = -INFINITY;
    for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
      CMatrix ea = CMatrix::Zero(da, da);
      for (int i = 0; i < da; ++i)
        for (int i2 = 0; i2 < da; ++i2)
          for (int j = 0; j < db; ++j)
            for (int j2 = 0; j2 < db; ++j2) ea(i, i2) += std::conj(b[j]) * xm(i * db + j, i2 * db + j2) * b[j2];
      a = top(ea).second;
      CMatrix eb = CMatrix::Zero(db, db);
      for (int j = 0; j < db; ++j)
        for (int j2 = 0; j2 < db; ++j2)
          for (int i = 0; i < da; ++i)
            for (int i2 = 0; i2 < da; ++i2) eb(j, j2) += std::conj(a[i]) * xm(i * db + j, i2 * db + j2) * a[i2];
      const auto [v, bn] = top(eb);
      b = bn;
      const double gain = v - value;
      value = v;
      if (gain < opts.tol) break;
    }
    if (value > best.value) {
      best.value = value;
      best.a = a;
      best.b = b;
      best.best_restart = r;
    }
  }
  return best;
}

}  // namespace gme
