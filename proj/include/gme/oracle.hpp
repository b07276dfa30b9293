#pragma once

// Reference values: alternating optimisation over product states and the symmetric one-parameter maximum.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "gme/core.hpp"

namespace gme {

struct OracleOptions {
  int restarts = 64;
  double tol = 1e-12;
  int max_sweeps = 2000;
  std::uint64_t seed = 2024;
};

struct OracleResult {
  double lambda2 = 0.0;
  std::vector<CVector> witness;  ///< unit vector per party
  int best_restart = -1;
  long sweeps = 0;  ///< total over restarts
};

/// Haar-random unit vector; the stream depends only on (seed, restart, party).
inline CVector haar_vector(int d, std::uint64_t seed, int restart, int party) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(restart), static_cast<std::uint32_t>(party)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> g(0.0, 1.0);
  CVector v(d);
  for (int i = 0; i < d; ++i) {
    const double re = g(rng);
    const double im = g(rng);
    v[i] = cplx(re, im);
  }
  return v / v.norm();
}

/// <v_1 ... v_n | psi>.
inline cplx product_overlap(const State& psi, const std::vector<CVector>& v) {
  if (static_cast<int>(v.size()) != psi.parties()) throw std::invalid_argument("product_overlap: one vector per party");
  Tensor t = psi.as_tensor();
  for (int p = psi.parties() - 1; p >= 0; --p) t = contract_party(t, p, v[p]);
  return t.data.at(0);
}

namespace detail {

// alpha[x_p] = sum over the other indices of psi[x] prod_{q != p} conj(v_q[x_q]).
inline CVector contract_all_but(const State& psi, const std::vector<CVector>& v, int party) {
  const auto& dims = psi.dims();
  const int n = psi.parties();
  CVector alpha = CVector::Zero(dims[party]);
  std::vector<int> idx(n, 0);
  for (std::size_t flat = 0; flat < psi.size(); ++flat) {
    cplx w = psi[flat];
    for (int q = 0; q < n; ++q)
      if (q != party) w *= std::conj(v[q][idx[q]]);
    alpha[idx[party]] += w;
    for (int q = n - 1; q >= 0; --q) {
      if (++idx[q] < dims[q]) break;
      idx[q] = 0;
    }
  }
  return alpha;
}

}  // namespace detail

/// Best product-state overlap found by round-robin single-party updates over seeded restarts.
/// Any product state is feasible, so the result is a certified lower bound on Lambda^2.
inline OracleResult als_lower(const State& psi, const OracleOptions& opts = {}) {
  if (opts.restarts < 1 || opts.max_sweeps < 1 || !(opts.tol > 0.0))
    throw std::invalid_argument("als_lower: restarts, sweeps and tol must be positive");
  const int n = psi.parties();
  OracleResult best;
  for (int r = 0; r < opts.restarts; ++r) {
    std::vector<CVector> v;
    for (int p = 0; p < n; ++p) v.push_back(haar_vector(psi.dims()[p], opts.seed, r, p));
    double value = std::norm(product_overlap(psi, v));
    for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
      ++best.sweeps;
      double current = value;
      for (int p = 0; p < n; ++p) {
        const CVector alpha = detail::contract_all_but(psi, v, p);
        const double norm = alpha.norm();
        if (norm == 0.0) continue;
        v[p] = alpha / norm;
        current = norm * norm;
      }
      const double gain = current - value;
      value = current;
      if (gain < opts.tol) break;
    }
    if (value > best.lambda2) {
      best.lambda2 = value;
      best.witness = v;
      best.best_restart = r;
    }
  }
  if (best.witness.empty()) {
    for (int p = 0; p < n; ++p) best.witness.push_back(haar_vector(psi.dims()[p], opts.seed, 0, p));
    best.lambda2 = std::norm(product_overlap(psi, best.witness));
    best.best_restart = 0;
  }
  return best;
}

inline BoundReport oracle_report(const State& psi, const OracleOptions& opts = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  const OracleResult o = als_lower(psi, opts);
  BoundReport r;
  r.method = Method::Oracle;
  r.level = opts.restarts;
  r.lambda2_lower = o.lambda2;
  r.iterations = o.sweeps;
  r.seed = opts.seed;
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

namespace detail {

// |<(cos t|0> + e^{i f} sin t|1>)^n | psi>|^2 in terms of the Dicke coefficients.
inline double symmetric_overlap2(const std::vector<cplx>& a, double theta, double phi) {
  const int n = static_cast<int>(a.size()) - 1;
  const double c = std::cos(theta), s = std::sin(theta);
  cplx sum = 0.0;
  for (int j = 0; j <= n; ++j)
    sum += a[j] * std::sqrt(binomial(n, j)) * std::pow(c, n - j) * std::pow(s, j) * std::polar(1.0, -j * phi);
  return std::norm(sum);
}

}  // namespace detail

/// Lambda^2 of a permutation-symmetric qubit state: grid search over symmetric product states,
/// then Brent refinement. Nonnegative Dicke coefficients (after a global phase) reduce to phi = 0.
inline double symmetric_exact(const State& psi, int grid_points = 181) {
  if (grid_points < 3) throw std::invalid_argument("symmetric_exact: need at least 3 grid points");
  std::vector<cplx> a = symmetric_qubit_coefficients(psi, 1e-10);
  std::size_t lead = 0;
  for (std::size_t j = 1; j < a.size(); ++j)
    if (std::abs(a[j]) > std::abs(a[lead])) lead = j;
  const cplx phase = std::polar(1.0, -std::arg(a[lead]));
  bool nonnegative = true;
  for (auto& z : a) {
    z *= phase;
    if (std::abs(z.imag()) > 1e-12 || z.real() < -1e-12) nonnegative = false;
  }

  constexpr double half_pi = std::numbers::pi / 2;
  constexpr int bits = std::numeric_limits<double>::digits / 2 + 4;
  const double dt = half_pi / (grid_points - 1);

  auto refine_theta = [&](double t, double phi) {
    const auto r = boost::math::tools::brent_find_minima(
        [&](double x) { return -detail::symmetric_overlap2(a, x, phi); }, std::max(0.0, t - dt),
        std::min(half_pi, t + dt), bits);
    return std::pair{r.first, -r.second};
  };

  if (nonnegative) {
    int best = 0;
    double best_val = -1.0;
    for (int i = 0; i < grid_points; ++i) {
      const double v = detail::symmetric_overlap2(a, i * dt, 0.0);
      if (v > best_val) {
        best_val = v;
        best = i;
      }
    }
    return std::max(best_val, refine_theta(best * dt, 0.0).second);
  }

  const int phi_points = 2 * (grid_points - 1);
  const double dp = 2 * std::numbers::pi / phi_points;
  struct Cand {
    double value, theta, phi;
  };
  std::vector<Cand> grid;
  for (int i = 0; i < grid_points; ++i)
    for (int j = 0; j < phi_points; ++j) grid.push_back({detail::symmetric_overlap2(a, i * dt, j * dp), i * dt, j * dp});
  const std::size_t top = std::min<std::size_t>(5, grid.size());
  std::partial_sort(grid.begin(), grid.begin() + top, grid.end(),
                    [](const Cand& x, const Cand& y) { return x.value > y.value; });
  double best = grid.front().value;
  for (std::size_t c = 0; c < top; ++c) {
    double theta = grid[c].theta, phi = grid[c].phi, value = grid[c].value;
    for (int round = 0; round < 60; ++round) {
      const auto [t, vt] = refine_theta(theta, phi);
      const auto rp = boost::math::tools::brent_find_minima(
          [&](double x) { return -detail::symmetric_overlap2(a, t, x); }, phi - dp, phi + dp, bits);
      const double gain = std::max(vt, -rp.second) - value;
      if (vt > value) theta = t;
      if (-rp.second > std::max(value, vt)) phi = rp.first;
      value = std::max({value, vt, -rp.second});
      if (gain < 1e-15) break;
    }
    best = std::max(best, value);
  }
  return best;
}

inline BoundReport exact_symmetric_report(const State& psi, int grid_points = 181) {
  const auto t0 = std::chrono::steady_clock::now();
  BoundReport r;
  r.method = Method::ExactSymmetric;
  r.level = grid_points;
  const double v = symmetric_exact(psi, grid_points);
  r.lambda2_upper = v;
  r.lambda2_lower = v;
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

/// Exact Lambda^2 of a two-party state: the largest squared Schmidt coefficient.
inline BoundReport svd_bipartite_report(const State& psi) {
  if (psi.parties() != 2) throw std::invalid_argument("svd_bipartite needs a two-party state");
  BoundReport r;
  r.method = Method::SvdBipartite;
  const double v = schmidt_max(psi, Bipartition({0}, 2));
  r.lambda2_upper = v;
  r.lambda2_lower = v;
  return r;
}

}  // namespace gme
