#pragma once

// Multipartite pure states, named constructors and bipartite Schmidt data.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gme/types.hpp"

namespace gme {

/// Dense complex tensor, row-major over `dims` (last index fastest). No normalization invariant.
struct Tensor {
  std::vector<int> dims;
  std::vector<cplx> data;

  std::size_t size() const { return data.size(); }
  double norm() const {
    CompensatedSum s;
    for (const auto& z : data) s.add(std::norm(z));
    return std::sqrt(s.value());
  }
};

/// Normalized pure state of n >= 2 parties with local dimensions >= 2.
class State {
 public:
  State(std::vector<int> dims, std::vector<cplx> amplitudes, std::string label = {})
      : dims_(std::move(dims)), amps_(std::move(amplitudes)), label_(std::move(label)) {
    if (dims_.size() < 2) throw std::invalid_argument("state needs at least two parties");
    for (int d : dims_)
      if (d < 2) throw std::invalid_argument("every local dimension must be >= 2");
    if (checked_product(dims_) != amps_.size())
      throw std::invalid_argument("amplitude count " + std::to_string(amps_.size()) +
                                  " does not match product of dims " +
                                  std::to_string(checked_product(dims_)));
    CompensatedSum s;
    for (const auto& z : amps_) s.add(std::norm(z));
    input_norm_ = std::sqrt(s.value());
    if (!(input_norm_ > 0.0) || !std::isfinite(input_norm_))
      throw std::invalid_argument("state has zero or non-finite norm");
    for (auto& z : amps_) z /= input_norm_;
  }

  const std::vector<int>& dims() const { return dims_; }
  const std::vector<cplx>& amplitudes() const { return amps_; }
  const std::string& label() const { return label_; }
  int parties() const { return static_cast<int>(dims_.size()); }
  int max_dim() const { return *std::max_element(dims_.begin(), dims_.end()); }
  std::size_t size() const { return amps_.size(); }
  /// Norm of the amplitudes as supplied, before normalization.
  double input_norm() const { return input_norm_; }

  bool all_qubits() const {
    return std::all_of(dims_.begin(), dims_.end(), [](int d) { return d == 2; });
  }

  std::size_t flat_index(const std::vector<int>& idx) const {
    std::size_t flat = 0;
    for (std::size_t p = 0; p < dims_.size(); ++p) flat = flat * dims_[p] + idx[p];
    return flat;
  }

  cplx operator[](std::size_t flat) const { return amps_[flat]; }

  Tensor as_tensor() const { return Tensor{dims_, amps_}; }

  State with_label(std::string label) const {
    State s = *this;
    s.label_ = std::move(label);
    return s;
  }

 private:
  std::vector<int> dims_;
  std::vector<cplx> amps_;
  std::string label_;
  double input_norm_ = 1.0;
};

/// Split of the parties into two nonempty complementary sets.
class Bipartition {
 public:
  Bipartition(std::vector<int> left, int parties) : parties_(parties) {
    std::vector<bool> in_left(parties, false);
    for (int p : left) {
      if (p < 0 || p >= parties) throw std::invalid_argument("bipartition index out of range");
      if (in_left[p]) throw std::invalid_argument("bipartition index repeated");
      in_left[p] = true;
    }
    for (int p = 0; p < parties; ++p) (in_left[p] ? left_ : right_).push_back(p);
    if (left_.empty() || right_.empty())
      throw std::invalid_argument("bipartition sides must both be nonempty");
  }

  const std::vector<int>& left() const { return left_; }
  const std::vector<int>& right() const { return right_; }
  int parties() const { return parties_; }

 private:
  int parties_;
  std::vector<int> left_;
  std::vector<int> right_;
};

// ---------------------------------------------------------------------------
// Bound reports

enum class Method { H1Norm, H1Schmidt, H2, H3, Oracle, ExactSymmetric, SvdBipartite };

inline std::string to_string(Method m) {
  switch (m) {
    case Method::H1Norm: return "H1_norm";
    case Method::H1Schmidt: return "H1_schmidt";
    case Method::H2: return "H2";
    case Method::H3: return "H3";
    case Method::Oracle: return "oracle";
    case Method::ExactSymmetric: return "exact_symmetric";
    case Method::SvdBipartite: return "svd_bipartite";
  }
  return "unknown";
}

/// Result of one bound computation. Lambda^2 bounds, derived E_G bounds and diagnostics.
struct BoundReport {
  Method method = Method::H1Norm;
  int level = 0;
  std::optional<double> lambda2_upper;
  std::optional<double> lambda2_lower;
  std::optional<double> dk;
  long iterations = 0;
  std::uint64_t seed = 0;
  double wall_time = 0.0;
  bool converged = true;
  std::optional<double> residual;
  std::string detail;

  std::optional<double> eg_upper() const {
    if (!lambda2_lower) return std::nullopt;
    return 1.0 - *lambda2_lower;
  }
  std::optional<double> eg_lower() const {
    if (!lambda2_upper) return std::nullopt;
    return 1.0 - *lambda2_upper;
  }

  /// Bounds lie in [0, 1 + 1e-9] and lower <= upper + 1e-9.
  bool valid() const {
    auto in_range = [](const std::optional<double>& v) {
      return !v || (*v >= 0.0 && *v <= 1.0 + 1e-9);
    };
    if (!in_range(lambda2_upper) || !in_range(lambda2_lower)) return false;
    if (lambda2_upper && lambda2_lower && *lambda2_lower > *lambda2_upper + 1e-9) return false;
    return true;
  }
};

// ---------------------------------------------------------------------------
// Named states

namespace detail {

inline void check_qubit_count(int n, int min_n = 2) {
  if (n < min_n) throw std::invalid_argument("need at least " + std::to_string(min_n) + " qubits");
  if (n > 24) throw std::invalid_argument("qubit count too large for dense storage");
}

inline void check_weight(double s) {
  if (!(s >= 0.0 && s <= 1.0)) throw std::invalid_argument("superposition weight s must lie in [0,1]");
}

inline int popcount(std::size_t x) { return static_cast<int>(__builtin_popcountll(x)); }

}  // namespace detail

inline State ghz_state(int n) {
  detail::check_qubit_count(n);
  std::vector<cplx> a(std::size_t{1} << n, 0.0);
  a.front() = a.back() = 1.0 / std::sqrt(2.0);
  return State(std::vector<int>(n, 2), std::move(a), "ghz:" + std::to_string(n));
}

/// Dicke state with `excitations` ones among n qubits, equal weights.
inline State dicke_state(int n, int excitations) {
  detail::check_qubit_count(n);
  if (excitations < 0 || excitations > n) throw std::invalid_argument("excitation count out of range");
  std::vector<cplx> a(std::size_t{1} << n, 0.0);
  for (std::size_t x = 0; x < a.size(); ++x)
    if (detail::popcount(x) == excitations) a[x] = 1.0;
  return State(std::vector<int>(n, 2), std::move(a),
               "dicke:" + std::to_string(n) + "," + std::to_string(excitations));
}

inline State w_state(int n) { return dicke_state(n, 1).with_label("w:" + std::to_string(n)); }

/// Product state |x_1 ... x_n> of computational basis levels.
inline State basis_state(const std::vector<int>& dims, const std::vector<int>& levels) {
  if (dims.size() != levels.size()) throw std::invalid_argument("basis_state: size mismatch");
  std::vector<cplx> a(checked_product(dims), 0.0);
  std::size_t flat = 0;
  for (std::size_t p = 0; p < dims.size(); ++p) {
    if (levels[p] < 0 || levels[p] >= dims[p]) throw std::invalid_argument("basis_state: level out of range");
    flat = flat * dims[p] + levels[p];
  }
  a[flat] = 1.0;
  return State(dims, std::move(a), "basis");
}

/// Tensor product of per-party vectors.
inline State product_state(const std::vector<CVector>& factors) {
  std::vector<int> dims;
  std::vector<cplx> a{1.0};
  for (const auto& f : factors) {
    dims.push_back(static_cast<int>(f.size()));
    std::vector<cplx> next(a.size() * f.size());
    for (std::size_t i = 0; i < a.size(); ++i)
      for (Eigen::Index j = 0; j < f.size(); ++j) next[i * f.size() + j] = a[i] * f[j];
    a = std::move(next);
  }
  return State(std::move(dims), std::move(a), "product");
}

/// Symmetric simple graph on n vertices.
using Adjacency = std::vector<std::vector<int>>;

inline void validate_adjacency(const Adjacency& adj) {
  const std::size_t n = adj.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (adj[i].size() != n) throw std::invalid_argument("adjacency matrix must be square");
    if (adj[i][i] != 0) throw std::invalid_argument("adjacency matrix must have zero diagonal");
    for (std::size_t j = 0; j < n; ++j) {
      if (adj[i][j] != 0 && adj[i][j] != 1) throw std::invalid_argument("adjacency entries must be 0 or 1");
      if (adj[i][j] != adj[j][i]) throw std::invalid_argument("adjacency matrix must be symmetric");
    }
  }
}

/// Graph state: controlled-Z on every edge applied to |+>^n.
inline State graph_state(const Adjacency& adj, std::string label = "graph") {
  validate_adjacency(adj);
  const int n = static_cast<int>(adj.size());
  detail::check_qubit_count(n);
  std::vector<cplx> a(std::size_t{1} << n);
  for (std::size_t x = 0; x < a.size(); ++x) {
    int parity = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (adj[i][j] && ((x >> (n - 1 - i)) & 1U) && ((x >> (n - 1 - j)) & 1U)) parity ^= 1;
    a[x] = parity ? -1.0 : 1.0;
  }
  return State(std::vector<int>(n, 2), std::move(a), std::move(label));
}

inline Adjacency cycle_graph(int n) {
  if (n < 3) throw std::invalid_argument("cycle graph needs n >= 3");
  Adjacency adj(n, std::vector<int>(n, 0));
  for (int i = 0; i < n; ++i) adj[i][(i + 1) % n] = adj[(i + 1) % n][i] = 1;
  return adj;
}

/// (|001> + |010> + |100> - |111>) / 2
inline State b_state() {
  std::vector<cplx> a(8, 0.0);
  a[1] = a[2] = a[4] = 0.5;
  a[7] = -0.5;
  return State({2, 2, 2}, std::move(a), "b_state");
}

/// sqrt(s)|W> + sqrt(1-s)|GHZ> on three qubits.
inline State wghz_state(double s) {
  detail::check_weight(s);
  const auto w = w_state(3).amplitudes();
  const auto g = ghz_state(3).amplitudes();
  std::vector<cplx> a(8);
  for (int i = 0; i < 8; ++i) a[i] = std::sqrt(s) * w[i] + std::sqrt(1.0 - s) * g[i];
  std::ostringstream lbl;
  lbl << "wghz:" << s;
  return State({2, 2, 2}, std::move(a), lbl.str());
}

/// sqrt(s)|D_1^5> + sqrt(1-s)|D_2^5>.
inline State dicke12_state(double s) {
  detail::check_weight(s);
  const auto d1 = dicke_state(5, 1).amplitudes();
  const auto d2 = dicke_state(5, 2).amplitudes();
  std::vector<cplx> a(32);
  for (int i = 0; i < 32; ++i) a[i] = std::sqrt(s) * d1[i] + std::sqrt(1.0 - s) * d2[i];
  std::ostringstream lbl;
  lbl << "dicke12:" << s;
  return State(std::vector<int>(5, 2), std::move(a), lbl.str());
}

// ---------------------------------------------------------------------------
// Elementary operations

inline cplx overlap(const State& a, const State& b) {
  if (a.dims() != b.dims()) throw std::invalid_argument("overlap: dimension mismatch");
  cplx s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

/// Unnormalized tensor <v|_party |psi> with that party removed.
inline Tensor contract_party(const Tensor& t, int party, const CVector& v) {
  if (party < 0 || party >= static_cast<int>(t.dims.size()))
    throw std::invalid_argument("contract_party: party out of range");
  if (v.size() != t.dims[party]) throw std::invalid_argument("contract_party: vector length mismatch");
  std::size_t outer = 1, inner = 1;
  for (int p = 0; p < party; ++p) outer *= t.dims[p];
  for (std::size_t p = party + 1; p < t.dims.size(); ++p) inner *= t.dims[p];
  const std::size_t d = t.dims[party];
  Tensor out;
  out.dims = t.dims;
  out.dims.erase(out.dims.begin() + party);
  out.data.assign(outer * inner, 0.0);
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t x = 0; x < d; ++x) {
      const cplx w = std::conj(v[x]);
      const cplx* src = &t.data[(o * d + x) * inner];
      cplx* dst = &out.data[o * inner];
      for (std::size_t i = 0; i < inner; ++i) dst[i] += w * src[i];
    }
  return out;
}

inline Tensor contract_party(const State& s, int party, const CVector& v) {
  return contract_party(s.as_tensor(), party, v);
}

/// Applies a d x d matrix to one tensor index.
inline Tensor apply_on_party(const Tensor& t, int party, const CMatrix& u) {
  const std::size_t d = t.dims[party];
  if (static_cast<std::size_t>(u.rows()) != d || static_cast<std::size_t>(u.cols()) != d)
    throw std::invalid_argument("apply_on_party: matrix size mismatch");
  std::size_t outer = 1, inner = 1;
  for (int p = 0; p < party; ++p) outer *= t.dims[p];
  for (std::size_t p = party + 1; p < t.dims.size(); ++p) inner *= t.dims[p];
  Tensor out{t.dims, std::vector<cplx>(t.data.size(), 0.0)};
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t y = 0; y < d; ++y)
      for (std::size_t x = 0; x < d; ++x) {
        const cplx w = u(y, x);
        if (w == 0.0) continue;
        const cplx* src = &t.data[(o * d + x) * inner];
        cplx* dst = &out.data[(o * d + y) * inner];
        for (std::size_t i = 0; i < inner; ++i) dst[i] += w * src[i];
      }
  return out;
}

inline State apply_local_unitary(const State& s, int party, const CMatrix& u) {
  if (party < 0 || party >= s.parties()) throw std::invalid_argument("apply_local_unitary: party out of range");
  if (u.rows() != s.dims()[party] || u.cols() != s.dims()[party])
    throw std::invalid_argument("apply_local_unitary: matrix size mismatch");
  const CMatrix defect = u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols());
  if (defect.cwiseAbs().maxCoeff() > 1e-10) throw std::invalid_argument("apply_local_unitary: matrix is not unitary");
  Tensor t = apply_on_party(s.as_tensor(), party, u);
  return State(s.dims(), std::move(t.data), s.label());
}

/// Reshapes the amplitudes into a (left parties) x (right parties) matrix.
inline CMatrix bipartite_matrix(const State& s, const Bipartition& cut) {
  if (cut.parties() != s.parties()) throw std::invalid_argument("bipartition does not match state");
  const auto& dims = s.dims();
  std::size_t rows = 1, cols = 1;
  for (int p : cut.left()) rows *= dims[p];
  for (int p : cut.right()) cols *= dims[p];
  CMatrix m(rows, cols);
  std::vector<int> idx(dims.size(), 0);
  for (std::size_t flat = 0; flat < s.size(); ++flat) {
    std::size_t r = 0, c = 0;
    for (int p : cut.left()) r = r * dims[p] + idx[p];
    for (int p : cut.right()) c = c * dims[p] + idx[p];
    m(r, c) = s[flat];
    for (int p = s.parties() - 1; p >= 0; --p) {
      if (++idx[p] < dims[p]) break;
      idx[p] = 0;
    }
  }
  return m;
}

/// Largest squared Schmidt coefficient across the cut.
inline double schmidt_max(const State& s, const Bipartition& cut) {
  const CMatrix m = bipartite_matrix(s, cut);
  Eigen::JacobiSVD<CMatrix> svd(m);
  const double smax = svd.singularValues()(0);
  return smax * smax;
}

/// Reduced density matrix on the given parties (others traced out).
inline CMatrix reduced_density_matrix(const State& s, const std::vector<int>& keep) {
  const Bipartition cut(keep, s.parties());
  const CMatrix m = bipartite_matrix(s, cut);
  return m * m.adjoint();
}

// ---------------------------------------------------------------------------
// Symmetry helpers

/// True when all local dims agree and the amplitudes are invariant under party permutations.
inline bool is_permutation_symmetric(const State& s, double tol = 1e-10) {
  const auto& dims = s.dims();
  for (int d : dims)
    if (d != dims[0]) return false;
  const int n = s.parties();
  const std::size_t d = dims[0];
  std::vector<int> idx(n, 0);
  for (std::size_t flat = 0; flat < s.size(); ++flat) {
    for (int p = 0; p + 1 < n; ++p) {
      std::vector<int> sw = idx;
      std::swap(sw[p], sw[p + 1]);
      if (std::abs(s[flat] - s[s.flat_index(sw)]) > tol) return false;
    }
    for (int p = n - 1; p >= 0; --p) {
      if (++idx[p] < static_cast<int>(d)) break;
      idx[p] = 0;
    }
  }
  return true;
}

/// Coefficients a_j of a symmetric n-qubit state in the normalized Dicke basis |D_n^j>, j = number of ones.
inline std::vector<cplx> symmetric_qubit_coefficients(const State& s, double tol = 1e-10) {
  if (!s.all_qubits()) throw std::invalid_argument("symmetric coefficients need qubit parties");
  if (!is_permutation_symmetric(s, tol)) throw std::invalid_argument("state is not permutation symmetric");
  const int n = s.parties();
  std::vector<cplx> a(n + 1);
  for (int j = 0; j <= n; ++j) {
    const std::size_t x = (std::size_t{1} << j) - 1;  // j trailing ones
    a[j] = s[x] * std::sqrt(binomial(n, j));
  }
  return a;
}

/// Builds the n-qubit symmetric state sum_j a_j |D_n^j>.
inline State symmetric_qubit_state(const std::vector<cplx>& a, std::string label = "symmetric") {
  const int n = static_cast<int>(a.size()) - 1;
  detail::check_qubit_count(n);
  std::vector<cplx> amps(std::size_t{1} << n);
  for (std::size_t x = 0; x < amps.size(); ++x) {
    const int j = detail::popcount(x);
    amps[x] = a[j] / std::sqrt(binomial(n, j));
  }
  return State(std::vector<int>(n, 2), std::move(amps), std::move(label));
}

}  // namespace gme
