#pragma once

// First hierarchy: norms of the symmetrized k-copy vector and Schmidt tightenings across copy cuts.

#include <chrono>
#include <cmath>
#include <string>
#include <vector>

#include "gme/eig.hpp"
#include "gme/sym.hpp"

namespace gme {

enum class H1Improvement { NormOnly, SchmidtFirstCopy, SchmidtBalanced };

struct H1Options {
  int level = 1;
  H1Improvement improvement = H1Improvement::NormOnly;
  std::size_t memory_cap = kDefaultMaxEntries;
  EigOptions eig{};
};

inline std::string to_string(H1Improvement m) {
  switch (m) {
    case H1Improvement::NormOnly: return "norm";
    case H1Improvement::SchmidtFirstCopy: return "schmidt-first";
    case H1Improvement::SchmidtBalanced: return "schmidt-balanced";
  }
  return "unknown";
}

/// C(k+d-1, k)^(-n/k), evaluated in log space.
inline double dk_coefficient(int n, int d, int k) {
  if (n < 2 || d < 2 || k < 1) throw std::invalid_argument("dk_coefficient: need n >= 2, d >= 2, k >= 1");
  return std::exp(-static_cast<double>(n) / k * log_binomial(k + d - 1, k));
}

/// Squared norm of the symmetrized k-copy vector: the passing probability of the k-copy product test.
inline double product_test_probability(const State& psi, int k, std::size_t cap = kDefaultMaxEntries) {
  return dicke_overlap_accumulate(psi, k, cap).norm_squared();
}

inline BoundReport h1_bounds(const State& psi, const H1Options& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  if (opts.level < 1) throw std::invalid_argument("h1: level must be >= 1");
  const DickeTensor c = dicke_overlap_accumulate(psi, opts.level, opts.memory_cap);
  BoundReport r;
  r.method = Method::H1Norm;
  r.level = opts.level;
  r.lambda2_upper = kth_root(c.norm_squared(), opts.level);
  r.dk = dk_coefficient(psi.parties(), psi.max_dim(), opts.level);
  r.lambda2_lower = *r.dk * *r.lambda2_upper;
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

namespace detail {

// Per-party table of the Dicke split |D_k^nu> -> |D_{k1}^mu>|D_{k2}^lambda>:
// entry (mu, lambda) holds the position of nu = mu + lambda at level k and the split coefficient.
struct CutTable {
  std::size_t left = 0, right = 0;
  std::vector<std::size_t> target;
  std::vector<double> weight;
};

inline CutTable cut_table(int d, int k1, int k2) {
  const OccupationIndex left(d, k1), right(d, k2), full(d, k1 + k2);
  CutTable t;
  t.left = left.size();
  t.right = right.size();
  t.target.resize(t.left * t.right);
  t.weight.resize(t.left * t.right);
  for (std::size_t i = 0; i < t.left; ++i)
    for (std::size_t j = 0; j < t.right; ++j) {
      Occupation nu(d);
      for (int x = 0; x < d; ++x) nu[x] = left[i][x] + right[j][x];
      t.target[i * t.right + j] = static_cast<std::size_t>(full.rank(nu));
      t.weight[i * t.right + j] = dicke_bipartite_split(nu, left[i]);
    }
  return t;
}

// |F_k> regrouped as a matrix G[left copies, right copies] in the per-party occupation bases.
// Columns are streamed over the larger side; the Gram matrix lives on the smaller side.
class CopyCut {
 public:
  CopyCut(const DickeTensor& c, int k1) : c_(c) {
    const int n = static_cast<int>(c.party_dims.size());
    const int k2 = c.k - k1;
    std::size_t left = 1, right = 1;
    for (int p = 0; p < n; ++p) {
      tables_.push_back(cut_table(c.party_dims[p], k1, k2));
      left *= tables_.back().left;
      right *= tables_.back().right;
    }
    small_is_left_ = left <= right;
    for (const auto& t : tables_) {
      small_shape_.push_back(small_is_left_ ? t.left : t.right);
      large_shape_.push_back(small_is_left_ ? t.right : t.left);
    }
    small_ = small_is_left_ ? left : right;
    large_ = small_is_left_ ? right : left;
    strides_.assign(n, 1);
    for (int p = n - 1; p > 0; --p) strides_[p - 1] = strides_[p] * c.shape[p];
  }

  std::size_t small_size() const { return small_; }
  std::size_t large_size() const { return large_; }

  /// g with Gram = sum over the large side of g g^dagger.
  void column(std::size_t large_flat, CVector& g) const {
    const int n = static_cast<int>(tables_.size());
    std::vector<std::size_t> ld(n), sd(n, 0), pidx(n + 1, 0);
    std::vector<double> pw(n + 1, 1.0);
    for (int p = n - 1; p >= 0; --p) {
      ld[p] = large_flat % large_shape_[p];
      large_flat /= large_shape_[p];
    }
    int from = 0;
    for (std::size_t flat = 0; flat < small_; ++flat) {
      for (int p = from; p < n; ++p) {
        const auto& t = tables_[p];
        const std::size_t e = small_is_left_ ? sd[p] * t.right + ld[p] : ld[p] * t.right + sd[p];
        pidx[p + 1] = pidx[p] + t.target[e] * strides_[p];
        pw[p + 1] = pw[p] * t.weight[e];
      }
      const cplx v = pw[n] * c_.coeffs[pidx[n]];
      g[flat] = small_is_left_ ? v : std::conj(v);
      int p = n - 1;
      while (p >= 0 && ++sd[p] == small_shape_[p]) sd[p--] = 0;
      from = std::max(p, 0);
    }
  }

 private:
  const DickeTensor& c_;
  std::vector<CutTable> tables_;
  std::vector<std::size_t> small_shape_, large_shape_, strides_;
  std::size_t small_ = 1, large_ = 1;
  bool small_is_left_ = true;
};

inline EigResult copy_cut_smax_squared(const DickeTensor& c, int k1, const EigOptions& eig) {
  const CopyCut cut(c, k1);
  const std::size_t s = cut.small_size();
  CVector g(s);
  if (s <= 256) {
    constexpr std::size_t block = 256;
    CMatrix gram = CMatrix::Zero(s, s);
    CMatrix b(s, block);
    std::size_t filled = 0;
    for (std::size_t l = 0; l < cut.large_size(); ++l) {
      cut.column(l, g);
      b.col(filled++) = g;
      if (filled == block || l + 1 == cut.large_size()) {
        gram.selfadjointView<Eigen::Lower>().rankUpdate(b.leftCols(filled));
        filled = 0;
      }
    }
    CMatrix full = gram.selfadjointView<Eigen::Lower>();
    EigResult r;
    r.value = largest_eigenvalue_dense(full);
    r.converged = true;
    r.iterations = 1;
    return r;
  }
  LinearOperator op = [&cut](const CVector& x, CVector& y) {
    CVector col(x.size());
    y.setZero(x.size());
    for (std::size_t l = 0; l < cut.large_size(); ++l) {
      cut.column(l, col);
      y += col * col.dot(x);
    }
  };
  return largest_eigenvalue(op, static_cast<Eigen::Index>(s), eig);
}

}  // namespace detail

/// Largest eigenvalue of the copy-cut reduced density matrix of |F_k>, taken to the power 1/k.
/// The lower bound is the norm-based one from the same coefficients.
inline BoundReport h1_schmidt_upper(const State& psi, const H1Options& opts) {
  if (opts.improvement == H1Improvement::NormOnly)
    throw std::invalid_argument("h1_schmidt_upper: choose a Schmidt improvement");
  if (opts.level < 1) throw std::invalid_argument("h1: level must be >= 1");
  const auto t0 = std::chrono::steady_clock::now();
  const int k = opts.level;
  const DickeTensor c = dicke_overlap_accumulate(psi, k, opts.memory_cap);
  const int k1 = opts.improvement == H1Improvement::SchmidtFirstCopy ? 1 : k / 2;
  const EigResult e = detail::copy_cut_smax_squared(c, k1, opts.eig);

  BoundReport r;
  r.method = Method::H1Schmidt;
  r.level = k;
  r.lambda2_upper = kth_root(e.value, k);
  r.dk = dk_coefficient(psi.parties(), psi.max_dim(), k);
  r.lambda2_lower = *r.dk * kth_root(c.norm_squared(), k);
  r.iterations = e.iterations;
  r.seed = opts.eig.seed;
  r.converged = e.converged;
  if (!e.converged || e.iterations > 1) r.residual = e.residual;
  r.detail = to_string(opts.improvement) + " cut " + std::to_string(k1) + "|" + std::to_string(k - k1);
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

/// Norm bound or Schmidt tightening, as selected by the options.
inline BoundReport h1_report(const State& psi, const H1Options& opts) {
  return opts.improvement == H1Improvement::NormOnly ? h1_bounds(psi, opts) : h1_schmidt_upper(psi, opts);
}

}  // namespace gme
