#pragma once

// Cross-checks of the fast paths against dense references at small sizes.

#include <chrono>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "brute_force.hpp"
#include "gme/gme.hpp"

namespace gme::cli {

struct SelftestOptions {
  bool quick = false;
  std::string fault;  ///< "mu" corrupts the mu table
};

struct CheckResult {
  std::string name;
  double residual = 0.0;
  double tol = 0.0;
  bool pass() const { return residual <= tol; }
};

namespace selftest_detail {

inline double max_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  if (a.size() != b.size()) return INFINITY;
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double mu_rule(bool corrupt) {
  double worst = 0.0;
  for (int k = 0; k <= 8; ++k)
    for (int n = 1; n <= 8; ++n)
      for (int ell = 0; ell <= k + n; ++ell) {
        double s = 0.0;
        for (int alpha = 0; alpha <= k; ++alpha) {
          const double mu = mu_symmetric(alpha, ell, k, n) * (corrupt ? 1.01 : 1.0);
          s += mu * mu;
        }
        worst = std::max(worst, std::abs(s - 1.0));
      }
  return worst;
}

inline double recursion(int max_k) {
  double worst = 0.0;
  for (std::uint64_t seed : {1, 2}) {
    const State q = bf::random_state({2, 2, 2}, seed);
    const State t = bf::random_state({3, 3}, seed + 10);
    for (int k = 1; k <= max_k; ++k) {
      worst = std::max(worst, max_diff(dicke_overlap_accumulate(q, k).coeffs, bf::friedland_coefficients(q, k)));
      if (k <= 3)
        worst = std::max(worst, max_diff(dicke_overlap_accumulate(t, k).coeffs, bf::friedland_coefficients(t, k)));
    }
  }
  return worst;
}

inline double isometry() {
  double worst = 0.0;
  for (auto [d, k] : std::vector<std::pair<int, int>>{{2, 3}, {3, 4}}) {
    const CMatrix s = CMatrix(symmetric_isometry(d, k));
    worst = std::max(worst, (s.adjoint() * s - CMatrix::Identity(s.cols(), s.cols())).cwiseAbs().maxCoeff());
    worst = std::max(worst, (s - bf::dicke_basis(d, k)).cwiseAbs().maxCoeff());
  }
  return worst;
}

inline double partial_trace(int max_k) {
  double worst = 0.0;
  for (int d : {2, 3})
    for (int k = 1; k <= (d == 2 ? max_k : 3); ++k) {
      const auto occ = enumerate_symmetric_basis(d, k);
      for (const auto& a : occ)
        for (const auto& b : occ) {
          const CMatrix dense = bf::partial_trace_first(bf::dicke_vector(d, a), bf::dicke_vector(d, b), d, k);
          worst = std::max(worst, (dicke_partial_trace(k, a, b) - dense).cwiseAbs().maxCoeff());
        }
    }
  return worst;
}

inline double vk_general(int max_k) {
  double worst = 0.0;
  const EigOptions eig{.tol = 1e-13};
  for (std::uint64_t seed : {3, 4}) {
    const State s = bf::random_state({2, 2, 2}, seed);
    for (int k = 1; k <= max_k; ++k)
      worst = std::max(worst, std::abs(xi_general(s, k, eig).value - bf::eigenbound_general(s, k)));
  }
  return worst;
}

inline double vk_symmetric(int max_k) {
  double worst = 0.0;
  const EigOptions eig{.tol = 1e-13};
  const State s = bf::random_symmetric_qubits(3, 5);
  for (int k = 0; k <= max_k; ++k)
    worst = std::max(worst, std::abs(xi_symmetric(s, k, eig).value - bf::eigenbound_symmetric(s, k)));
  return worst;
}

inline double trees() {
  double worst = 0.0;
  const State s = bf::random_state({2, 2, 2}, 6);
  const std::vector<std::vector<TreeEdge>> cases{{{0, 1, 0}}, {{0, 1, 0}, {1, 2, 1}}, {{0, 1, 0}, {0, 2, 1}}};
  for (const auto& edges : cases) {
    TreeSpec t{static_cast<int>(edges.size()) + 1, 3, edges, "test"};
    std::vector<bf::Edge> be;
    for (const auto& e : edges) be.push_back({e.u, e.v, e.type});
    worst = std::max(worst, max_diff(contract_tree(s, t).data, bf::tree_contraction(s, t.vertices, be)));
    worst = std::max(worst, std::abs(h2_projected_norm_squared(s, t) - bf::tree_projected_norm2(s, t.vertices, be)));
  }
  return worst;
}

inline double h1_cuts() {
  double worst = 0.0;
  const State s = bf::random_state({2, 2, 2}, 7);
  for (int k = 2; k <= 3; ++k)
    for (int k1 : {1, k / 2}) {
      const DickeTensor c = dicke_overlap_accumulate(s, k);
      const double fast = detail::copy_cut_smax_squared(c, k1, EigOptions{}).value;
      worst = std::max(worst, std::abs(fast - bf::friedland_cut_eigenvalue(s, k, k1)));
    }
  return worst;
}

inline CMatrix random_psd(int dim, std::uint64_t seed) {
  const CMatrix u = bf::random_unitary(dim, seed);
  CMatrix d = CMatrix::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) d(i, i) = 0.1 + 0.9 * i / dim;
  return u * d * u.adjoint();
}

inline double operator_h3(int max_k) {
  double worst = 0.0;
  const CMatrix xr = random_psd(9, 8);
  for (const CMatrix& x : {upb_tiles_operator().matrix(), xr}) {
    const HermitianOperator op(3, 3, x, 1e-10);
    for (int k = 1; k <= max_k; ++k) {
      const CMatrix dense = bf::compress_symmetric(bf::pair_operator(x, 3, 3, k, 0), 3, 3, k);
      worst = std::max(worst, (CMatrix(m_h3_matrix(op, k)) - dense).cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

inline double operator_h1() {
  const CMatrix x = random_psd(9, 9);
  const HermitianOperator op(3, 3, x, 1e-10);
  const int k = 2;
  const CMatrix lift = bf::pair_operator(x, 3, 3, k, 0) * bf::pair_operator(x, 3, 3, k, 1);
  const double dense = std::sqrt(bf::top_eigenvalue(bf::compress_symmetric(lift, 3, 3, k)));
  return std::abs(m_h1_upper(op, k, EigOptions{.tol = 1e-13}) - dense);
}

// Returns the largest violation of lower <= upper between oracle and hierarchy values.
inline double sandwich() {
  double worst = 0.0;
  for (std::uint64_t seed : {11, 12}) {
    const State s = bf::random_state({2, 2, 2}, seed);
    const double lower = als_lower(s, OracleOptions{.restarts = 16}).lambda2;
    for (int k : {1, 2, 3}) {
      worst = std::max(worst, lower - *h1_bounds(s, H1Options{.level = k}).lambda2_upper);
      worst = std::max(worst, lower - *h3_bound(s, k).lambda2_upper);
      worst = std::max(worst, lower - *h2_bounds(s, path_cyclic(k, 3)).lambda2_upper);
    }
    const State b = bf::random_state({2, 3}, seed);
    const double exact = schmidt_max(b, Bipartition({0}, 2));
    for (int k : {1, 2, 4, 8}) {
      const BoundReport r = h1_bounds(b, H1Options{.level = k});
      worst = std::max({worst, exact - *r.lambda2_upper, *r.lambda2_lower - exact});
    }
  }
  return std::max(worst, 0.0);
}

inline double lanczos() {
  const CMatrix u = bf::random_unitary(60, 13);
  CMatrix d = CMatrix::Zero(60, 60);
  for (int i = 0; i < 60; ++i) d(i, i) = std::sin(0.37 * i);
  const CMatrix m = u * d * u.adjoint();
  LinearOperator op = [&m](const CVector& x, CVector& y) { y = m * x; };
  return std::abs(lanczos_max(op, 60, EigOptions{.tol = 1e-13}).value - bf::top_eigenvalue(m));
}

}  // namespace selftest_detail

inline std::vector<CheckResult> run_selftest(const SelftestOptions& opts) {
  namespace sd = selftest_detail;
  const int kmax = opts.quick ? 3 : 4;
  std::vector<CheckResult> out;
  out.push_back({"mu-sum-rule", sd::mu_rule(opts.fault == "mu"), 1e-12});
  out.push_back({"dicke-recursion-vs-symmetrization", sd::recursion(kmax), 1e-10});
  out.push_back({"symmetric-isometry", sd::isometry(), 1e-12});
  out.push_back({"dicke-partial-trace", sd::partial_trace(kmax + 2), 1e-12});
  out.push_back({"vk-general-vs-dense", sd::vk_general(opts.quick ? 2 : 3), 1e-9});
  out.push_back({"vk-symmetric-vs-dense", sd::vk_symmetric(3), 1e-9});
  out.push_back({"tree-contraction-vs-loops", sd::trees(), 1e-12});
  out.push_back({"h1-copy-cut-vs-dense", sd::h1_cuts(), 1e-10});
  out.push_back({"operator-h3-vs-dense-lift", sd::operator_h3(opts.quick ? 2 : 3), 1e-10});
  out.push_back({"operator-h1-vs-dense-lift", sd::operator_h1(), 1e-9});
  out.push_back({"oracle-hierarchy-sandwich", sd::sandwich(), 1e-9});
  out.push_back({"lanczos-vs-dense", sd::lanczos(), 1e-9});
  return out;
}

}  // namespace gme::cli
