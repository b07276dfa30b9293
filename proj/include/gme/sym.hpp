#pragma once

// Occupation-number (generalized Dicke) bases, the copy-by-copy Dicke overlap
// recursion, symmetric isometries and Dicke-basis partial traces.

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <vector>

#include <Eigen/SparseCore>

#include "gme/core.hpp"

namespace gme {

/// Counts per local level; k = sum of counts.
using Occupation = std::vector<int>;

using SparseMatrix = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

/// Number of occupations of k items into d levels, C(k+d-1, d-1).
inline std::size_t symmetric_dimension(int d, int k) {
  return static_cast<std::size_t>(binomial(k + d - 1, d - 1));
}

/// All occupations of k items into d levels, lexicographically descending on the count vector.
/// For qubits the position equals the count of level 1 (the number of excitations).
inline std::vector<Occupation> enumerate_symmetric_basis(int d, int k) {
  if (d < 1 || k < 0) throw std::invalid_argument("enumerate_symmetric_basis: need d >= 1, k >= 0");
  std::vector<Occupation> out;
  out.reserve(symmetric_dimension(d, k));
  Occupation cur(d, 0);
  auto rec = [&](auto&& self, int level, int remaining) -> void {
    if (level == d - 1) {
      cur[level] = remaining;
      out.push_back(cur);
      return;
    }
    for (int c = remaining; c >= 0; --c) {
      cur[level] = c;
      self(self, level + 1, remaining - c);
    }
  };
  rec(rec, 0, k);
  return out;
}

/// Position lookup for the occupations of one (d, k).
class OccupationIndex {
 public:
  OccupationIndex(int d, int k) : d_(d), k_(k), list_(enumerate_symmetric_basis(d, k)) {
    for (std::size_t i = 0; i < list_.size(); ++i) rank_.emplace(list_[i], static_cast<int>(i));
  }
  int d() const { return d_; }
  int k() const { return k_; }
  std::size_t size() const { return list_.size(); }
  const Occupation& operator[](std::size_t i) const { return list_[i]; }
  const std::vector<Occupation>& list() const { return list_; }
  /// -1 when the occupation is not a member.
  int rank(const Occupation& o) const {
    auto it = rank_.find(o);
    return it == rank_.end() ? -1 : it->second;
  }

 private:
  int d_;
  int k_;
  std::vector<Occupation> list_;
  std::map<Occupation, int> rank_;
};

inline double log_multinomial(const Occupation& o) {
  double r = std::lgamma(std::accumulate(o.begin(), o.end(), 0) + 1.0);
  for (int c : o) r -= std::lgamma(c + 1.0);
  return r;
}

/// Coefficients of a symmetric multi-party vector in the product of per-party occupation bases.
struct DickeTensor {
  int k = 0;
  std::vector<int> party_dims;
  std::vector<std::size_t> shape;  ///< occupations per party
  std::vector<cplx> coeffs;        ///< row-major over `shape`

  double norm_squared() const {
    CompensatedSum s;
    for (const auto& z : coeffs) s.add(std::norm(z));
    return s.value();
  }
};

inline std::vector<std::size_t> dicke_shape(const std::vector<int>& dims, int k) {
  std::vector<std::size_t> shape;
  for (int d : dims) shape.push_back(symmetric_dimension(d, k));
  return shape;
}

inline std::size_t shape_product(const std::vector<std::size_t>& shape) {
  std::size_t total = 1;
  for (auto s : shape) {
    if (s != 0 && total > SIZE_MAX / s) return SIZE_MAX;
    total *= s;
  }
  return total;
}

namespace detail {

// Per-party transitions between occupation levels l-1 -> l:
// for target occupation i at level l and local level x with nu_x > 0,
// the source index of nu - e_x at level l-1 and the split weight sqrt(nu_x / l).
struct LevelTransitions {
  struct Step {
    int x;
    int prev;
    double weight;
  };
  std::vector<std::vector<Step>> steps;  // per target occupation
};

inline LevelTransitions level_transitions(int d, int level, const OccupationIndex& prev,
                                          const OccupationIndex& cur) {
  LevelTransitions t;
  t.steps.resize(cur.size());
  for (std::size_t i = 0; i < cur.size(); ++i) {
    Occupation o = cur[i];
    for (int x = 0; x < d; ++x) {
      if (o[x] == 0) continue;
      const double w = std::sqrt(static_cast<double>(o[x]) / level);
      --o[x];
      t.steps[i].push_back({x, prev.rank(o), w});
      ++o[x];
    }
  }
  return t;
}

}  // namespace detail

/// c[nu_1..nu_n] = <D_k^{nu_1} ... D_k^{nu_n} | psi^{(x)k}> for arbitrary local dimensions,
/// extending one copy at a time through the single-copy Dicke split.
inline DickeTensor dicke_overlap_accumulate_general(const State& psi, int k,
                                                    std::size_t max_entries = kDefaultMaxEntries) {
  if (k < 1) throw std::invalid_argument("dicke_overlap_accumulate: k must be >= 1");
  const int n = psi.parties();
  const auto& dims = psi.dims();
  check_cap("Dicke coefficient tensor", shape_product(dicke_shape(dims, k)), max_entries);

  std::vector<OccupationIndex> prev_idx, cur_idx;
  for (int d : dims) prev_idx.emplace_back(d, 1);
  DickeTensor c{1, dims, dicke_shape(dims, 1), psi.amplitudes()};
  // Level-1 occupations are the unit vectors e_x in descending order, so position x is level x
  // and the amplitude tensor already is the level-1 coefficient tensor.

  for (int level = 2; level <= k; ++level) {
    cur_idx.clear();
    std::vector<detail::LevelTransitions> trans;
    for (int p = 0; p < n; ++p) {
      cur_idx.emplace_back(dims[p], level);
      trans.push_back(detail::level_transitions(dims[p], level, prev_idx[p], cur_idx[p]));
    }
    DickeTensor next{level, dims, dicke_shape(dims, level), {}};
    next.coeffs.assign(shape_product(next.shape), 0.0);

    std::vector<std::size_t> prev_strides(n, 1);
    for (int p = n - 1; p > 0; --p) prev_strides[p - 1] = prev_strides[p] * c.shape[p];
    std::vector<std::size_t> amp_strides = row_major_strides(dims);

    std::vector<std::size_t> target(n, 0);
    // Depth-first walk over the per-party split choices of the current target occupation.
    std::vector<std::size_t> choice(n + 1, 0);
    std::vector<double> wacc(n + 1, 1.0);
    std::vector<std::size_t> prev_acc(n + 1, 0), amp_acc(n + 1, 0);
    for (std::size_t flat = 0; flat < next.coeffs.size(); ++flat) {
      cplx sum = 0.0;
      int depth = 0;
      choice[0] = 0;
      while (depth >= 0) {
        if (depth == n) {
          sum += wacc[n] * psi[amp_acc[n]] * c.coeffs[prev_acc[n]];
          --depth;
          continue;
        }
        const auto& steps = trans[depth].steps[target[depth]];
        if (choice[depth] >= steps.size()) {
          choice[depth] = 0;
          --depth;
          continue;
        }
        const auto& st = steps[choice[depth]++];
        wacc[depth + 1] = wacc[depth] * st.weight;
        prev_acc[depth + 1] = prev_acc[depth] + static_cast<std::size_t>(st.prev) * prev_strides[depth];
        amp_acc[depth + 1] = amp_acc[depth] + static_cast<std::size_t>(st.x) * amp_strides[depth];
        ++depth;
        if (depth < n) choice[depth] = 0;
      }
      next.coeffs[flat] = sum;
      for (int p = n - 1; p >= 0; --p) {
        if (++target[p] < next.shape[p]) break;
        target[p] = 0;
      }
    }
    c = std::move(next);
    prev_idx = std::move(cur_idx);
    cur_idx = {};
  }
  return c;
}

/// Qubit-only recursion indexed directly by excitation counts j in {0..k}.
inline DickeTensor dicke_overlap_accumulate_qubits(const State& psi, int k,
                                                   std::size_t max_entries = kDefaultMaxEntries) {
  if (!psi.all_qubits()) throw std::invalid_argument("qubit Dicke recursion needs qubit parties");
  if (k < 1) throw std::invalid_argument("dicke_overlap_accumulate: k must be >= 1");
  const int n = psi.parties();
  check_cap("Dicke coefficient tensor", shape_product(dicke_shape(psi.dims(), k)), max_entries);

  std::vector<cplx> prev = psi.amplitudes();  // level 1: j = bit value
  std::size_t prev_radix = 2;
  for (int level = 2; level <= k; ++level) {
    const std::size_t radix = level + 1;
    std::size_t total = 1;
    for (int p = 0; p < n; ++p) total *= radix;
    std::vector<cplx> cur(total, 0.0);
    std::vector<double> w0(radix), w1(radix);
    for (std::size_t j = 0; j < radix; ++j) {
      w0[j] = j + 1 <= static_cast<std::size_t>(level) ? std::sqrt(double(level - j) / level) : 0.0;
      w1[j] = j >= 1 ? std::sqrt(double(j) / level) : 0.0;
    }
    std::vector<std::size_t> prev_stride(n, 1);
    for (int p = n - 1; p > 0; --p) prev_stride[p - 1] = prev_stride[p] * prev_radix;

    std::vector<std::size_t> j(n, 0);
    std::vector<double> wacc(n + 1);
    std::vector<std::size_t> pacc(n + 1), aacc(n + 1);
    std::vector<int> bit(n + 1);
    for (std::size_t flat = 0; flat < total; ++flat) {
      cplx sum = 0.0;
      int depth = 0;
      bit[0] = -1;
      wacc[0] = 1.0;
      pacc[0] = 0;
      aacc[0] = 0;
      while (depth >= 0) {
        if (depth == n) {
          sum += wacc[n] * psi[aacc[n]] * prev[pacc[n]];
          --depth;
          continue;
        }
        if (++bit[depth] > 1) {
          --depth;
          continue;
        }
        const int b = bit[depth];
        const double w = b == 0 ? w0[j[depth]] : w1[j[depth]];
        if (w == 0.0) continue;
        wacc[depth + 1] = wacc[depth] * w;
        pacc[depth + 1] = pacc[depth] + (j[depth] - b) * prev_stride[depth];
        aacc[depth + 1] = (aacc[depth] << 1) | static_cast<std::size_t>(b);
        ++depth;
        bit[depth] = -1;
      }
      cur[flat] = sum;
      for (int p = n - 1; p >= 0; --p) {
        if (++j[p] < radix) break;
        j[p] = 0;
      }
    }
    prev = std::move(cur);
    prev_radix = radix;
  }
  return DickeTensor{k, psi.dims(), dicke_shape(psi.dims(), k), std::move(prev)};
}

/// Coefficients of Pi_k^{(x)n} |psi>^{(x)k} in the per-party occupation bases.
inline DickeTensor dicke_overlap_accumulate(const State& psi, int k,
                                            std::size_t max_entries = kDefaultMaxEntries) {
  if (psi.all_qubits()) return dicke_overlap_accumulate_qubits(psi, k, max_entries);
  return dicke_overlap_accumulate_general(psi, k, max_entries);
}

/// Isometry from the symmetric occupation basis into (C^d)^{(x)k}; copy 1 is the most significant digit.
inline SparseMatrix symmetric_isometry(int d, int k, std::size_t max_entries = kDefaultMaxEntries) {
  if (d < 2 || k < 1) throw std::invalid_argument("symmetric_isometry: need d >= 2, k >= 1");
  const double full = std::pow(static_cast<double>(d), k);
  if (full > static_cast<double>(max_entries))
    throw CapExceeded("symmetric isometry", full > 1e18 ? SIZE_MAX : static_cast<std::size_t>(full), max_entries);
  const std::size_t rows = static_cast<std::size_t>(full);
  const OccupationIndex idx(d, k);
  SparseMatrix s(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(idx.size()));
  s.reserve(Eigen::VectorXi::Constant(static_cast<Eigen::Index>(rows), 1));
  std::vector<int> digits(k, 0);
  Occupation o(d, 0);
  o[0] = k;
  for (std::size_t r = 0; r < rows; ++r) {
    const int col = idx.rank(o);
    s.insert(static_cast<Eigen::Index>(r), col) = std::exp(-0.5 * log_multinomial(o));
    for (int c = k - 1; c >= 0; --c) {
      --o[digits[c]];
      if (++digits[c] < d) {
        ++o[digits[c]];
        break;
      }
      digits[c] = 0;
      ++o[0];
    }
  }
  s.makeCompressed();
  return s;
}

/// Tr_{2..k} |D_k^alpha><D_k^beta| as a d x d matrix: entry (x,y) = sqrt(alpha_x beta_y)/k
/// when alpha - e_x = beta - e_y, zero otherwise.
inline CMatrix dicke_partial_trace(int k, const Occupation& alpha, const Occupation& beta) {
  if (alpha.size() != beta.size()) throw std::invalid_argument("dicke_partial_trace: label sizes differ");
  const int sa = std::accumulate(alpha.begin(), alpha.end(), 0);
  const int sb = std::accumulate(beta.begin(), beta.end(), 0);
  if (sa != k || sb != k) throw std::invalid_argument("dicke_partial_trace: labels do not sum to k");
  for (int c : alpha)
    if (c < 0) throw std::invalid_argument("dicke_partial_trace: negative count");
  for (int c : beta)
    if (c < 0) throw std::invalid_argument("dicke_partial_trace: negative count");
  const int d = static_cast<int>(alpha.size());
  CMatrix m = CMatrix::Zero(d, d);
  for (int x = 0; x < d; ++x) {
    if (alpha[x] == 0) continue;
    for (int y = 0; y < d; ++y) {
      if (beta[y] == 0) continue;
      Occupation a = alpha, b = beta;
      --a[x];
      --b[y];
      if (a == b) m(x, y) = std::sqrt(double(alpha[x]) * beta[y]) / k;
    }
  }
  return m;
}

/// Qubit form; labels count the zeros, as in |D_k^i> = sum of permutations of |0>^i |1>^{k-i}.
inline CMatrix dicke_partial_trace(int k, int alpha_zeros, int beta_zeros) {
  if (alpha_zeros < 0 || alpha_zeros > k || beta_zeros < 0 || beta_zeros > k)
    throw std::invalid_argument("dicke_partial_trace: label out of range");
  return dicke_partial_trace(k, Occupation{alpha_zeros, k - alpha_zeros}, Occupation{beta_zeros, k - beta_zeros});
}

/// Coefficient of |D_{k1}^mu>|D_{k-k1}^{nu-mu}> in |D_k^nu>.
inline double dicke_bipartite_split(const Occupation& nu, const Occupation& mu) {
  Occupation rest(nu.size());
  for (std::size_t x = 0; x < nu.size(); ++x) {
    rest[x] = nu[x] - mu[x];
    if (rest[x] < 0) return 0.0;
  }
  return std::exp(0.5 * (log_multinomial(mu) + log_multinomial(rest) - log_multinomial(nu)));
}

}  // namespace gme
