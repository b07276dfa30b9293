#pragma once

// Third hierarchy: symmetric extensions of |psi><psi| (x) 1, realised as largest squared singular values of V_k.

#include <chrono>
#include <cmath>
#include <string>
#include <vector>

#include "gme/eig.hpp"
#include "gme/sym.hpp"

namespace gme {

enum class H3Route { Auto, General, Symmetric };

inline std::string to_string(H3Route r) {
  switch (r) {
    case H3Route::Auto: return "auto";
    case H3Route::General: return "general";
    case H3Route::Symmetric: return "symmetric";
  }
  return "unknown";
}

struct H3Options {
  H3Route route = H3Route::Auto;
  EigOptions eig{};
  std::size_t memory_cap = kDefaultMaxEntries;
};

/// sqrt(C(k,alpha) C(n,ell-alpha) / C(k+n,ell)); zero outside the support.
inline double mu_symmetric(int alpha, int ell, int k, int n) {
  if (alpha < 0 || alpha > k || ell < 0 || ell > k + n) throw std::invalid_argument("mu_symmetric: index out of range");
  if (alpha > ell || ell - alpha > n) return 0.0;
  return std::exp(0.5 * (log_binomial(k, alpha) + log_binomial(n, ell - alpha) - log_binomial(k + n, ell)));
}

/// (k+n+1) x (k+1) matrix with entries a_{ell-alpha} mu(alpha, ell); `a` holds the Dicke
/// coefficients of a symmetric n-qubit state indexed by the number of ones.
inline SparseMatrix build_vk_symmetric(const std::vector<cplx>& a, int k) {
  if (k < 0) throw std::invalid_argument("build_vk_symmetric: k must be >= 0");
  const int n = static_cast<int>(a.size()) - 1;
  if (n < 1) throw std::invalid_argument("build_vk_symmetric: need at least one qubit");
  SparseMatrix v(k + n + 1, k + 1);
  std::vector<Eigen::Triplet<cplx>> trip;
  for (int ell = 0; ell <= k + n; ++ell)
    for (int alpha = std::max(0, ell - n); alpha <= std::min(k, ell); ++alpha) {
      const cplx val = a[ell - alpha] * mu_symmetric(alpha, ell, k, n);
      if (val != 0.0) trip.emplace_back(ell, alpha, val);
    }
  v.setFromTriplets(trip.begin(), trip.end());
  return v;
}

/// Validates symmetry by rebuilding the state from its Dicke coefficients.
inline SparseMatrix build_vk_symmetric(const State& psi, int k) {
  const auto a = symmetric_qubit_coefficients(psi, 1e-10);
  const State rebuilt = symmetric_qubit_state(a);
  for (std::size_t i = 0; i < psi.size(); ++i)
    if (std::abs(rebuilt[i] - psi[i]) > 1e-8) throw std::invalid_argument("state is not permutation symmetric");
  return build_vk_symmetric(a, k);
}

/// V_k for N qubits as a linear map: columns are excitation counts alpha_p in 0..k-1 of the
/// k-1 identity copies (mixed radix k), rows are counts ell_p = alpha_p + x_p in 0..k (mixed radix k+1).
class VkGeneral {
 public:
  VkGeneral(const State& psi, int k) : psi_(psi), k_(k), n_(psi.parties()) {
    if (!psi.all_qubits()) throw std::invalid_argument("general V_k needs qubit parties");
    if (k < 1) throw std::invalid_argument("V_k level must be >= 1");
    rows_ = cols_ = 1;
    for (int p = 0; p < n_; ++p) {
      rows_ *= k + 1;
      cols_ *= k;
    }
    row_stride_.assign(n_, 1);
    for (int p = n_ - 1; p > 0; --p) row_stride_[p - 1] = row_stride_[p] * (k + 1);
    const std::size_t nx = std::size_t{1} << n_;
    offset_.resize(nx);
    for (std::size_t x = 0; x < nx; ++x) {
      std::size_t off = 0;
      for (int p = 0; p < n_; ++p)
        if ((x >> (n_ - 1 - p)) & 1U) off += row_stride_[p];
      offset_[x] = off;
    }
    w0_.resize(k);
    w1_.resize(k);
    for (int alpha = 0; alpha < k; ++alpha) {
      w0_[alpha] = std::sqrt(double(k - alpha) / k);
      w1_[alpha] = std::sqrt(double(alpha + 1) / k);
    }
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  /// Calls f(row, col, value) for every nonzero, column by column.
  template <class F>
  void for_each(F&& f) const {
    const std::size_t nx = std::size_t{1} << n_;
    std::vector<int> alpha(n_, 0);
    std::vector<cplx> coeff(nx);
    std::size_t base = 0;
    for (std::size_t col = 0; col < cols_; ++col) {
      // coeff[x] = a_x * prod_p w(alpha_p, x_p), built bit by bit from the most significant party.
      coeff[0] = 1.0;
      std::size_t filled = 1;
      for (int p = 0; p < n_; ++p) {
        for (std::size_t i = filled; i-- > 0;) {
          coeff[2 * i + 1] = coeff[i] * w1_[alpha[p]];
          coeff[2 * i] = coeff[i] * w0_[alpha[p]];
        }
        filled *= 2;
      }
      for (std::size_t x = 0; x < nx; ++x) {
        const cplx v = coeff[x] * psi_[x];
        if (v != 0.0) f(base + offset_[x], col, v);
      }
      for (int p = n_ - 1; p >= 0; --p) {
        base += row_stride_[p];
        if (++alpha[p] < k_) break;
        base -= row_stride_[p] * k_;
        alpha[p] = 0;
      }
    }
  }

  /// y = V^dagger V x on the column space.
  void gram(const CVector& x, CVector& y) const {
    CVector t = CVector::Zero(static_cast<Eigen::Index>(rows_));
    for_each([&](std::size_t r, std::size_t c, cplx v) { t[r] += v * x[c]; });
    y.setZero(static_cast<Eigen::Index>(cols_));
    for_each([&](std::size_t r, std::size_t c, cplx v) { y[c] += std::conj(v) * t[r]; });
  }

  SparseMatrix to_sparse(std::size_t cap = kDefaultMaxEntries) const {
    check_cap("general V_k entries", cols_ << n_, cap);
    std::vector<Eigen::Triplet<cplx>> trip;
    for_each([&](std::size_t r, std::size_t c, cplx v) {
      trip.emplace_back(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c), v);
    });
    SparseMatrix m(static_cast<Eigen::Index>(rows_), static_cast<Eigen::Index>(cols_));
    m.setFromTriplets(trip.begin(), trip.end());
    return m;
  }

 private:
  const State& psi_;
  int k_;
  int n_;
  std::size_t rows_ = 1, cols_ = 1;
  std::vector<std::size_t> row_stride_, offset_;
  std::vector<double> w0_, w1_;
};

inline SparseMatrix build_vk_general(const State& psi, int k, std::size_t cap = kDefaultMaxEntries) {
  return VkGeneral(psi, k).to_sparse(cap);
}

/// xi_k for the general builder, matrix-free on the column space.
inline EigResult xi_general(const State& psi, int k, const EigOptions& eig, std::size_t cap = kDefaultMaxEntries) {
  const VkGeneral v(psi, k);
  check_cap("general V_k rows", v.rows(), cap);
  EigOptions opts = eig;
  if (v.cols() > (std::size_t{1} << 18)) opts.krylov_dim = std::min(opts.krylov_dim, 16);
  LinearOperator op = [&v](const CVector& x, CVector& y) { v.gram(x, y); };
  return largest_eigenvalue(op, static_cast<Eigen::Index>(v.cols()), opts);
}

inline EigResult xi_symmetric(const State& psi, int k, const EigOptions& eig) {
  return smax_squared(build_vk_symmetric(psi, k), eig);
}

/// Upper bound xi_k on Lambda^2. No lower bound is produced by this hierarchy.
inline BoundReport h3_bound(const State& psi, int k, const H3Options& opts = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  if (!psi.all_qubits()) throw std::invalid_argument("h3 supports qubit parties only");
  H3Route route = opts.route;
  if (route == H3Route::Auto) {
    double rows = std::pow(double(k + 1), psi.parties());
    route = rows <= static_cast<double>(opts.memory_cap) || !is_permutation_symmetric(psi) ? H3Route::General
                                                                                            : H3Route::Symmetric;
  }
  const EigResult e =
      route == H3Route::General ? xi_general(psi, k, opts.eig, opts.memory_cap) : xi_symmetric(psi, k, opts.eig);
  BoundReport r;
  r.method = Method::H3;
  r.level = k;
  r.lambda2_upper = e.value;
  r.iterations = e.iterations;
  r.seed = opts.eig.seed;
  r.converged = e.converged;
  r.residual = e.residual;
  r.detail = to_string(route);
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace gme
