// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "brute_force.hpp"
#include "cli_app.hpp"

using namespace gme;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Criterion {
  std::string name;
  std::function<bool(std::ostream&)> check;
};

json run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  if (code != 0) throw std::runtime_error("cli exit " + std::to_string(code) + ": " + err.str());
  return json::parse(out.str());
}

// Reference values.
constexpr double kUpbH1Bound = 0.976057;
constexpr double kUpbH3Bound = 0.973382;
constexpr double kUpbSeesaw = 0.97158;
constexpr double kC5Eg = 0.86855;

bool upb_h1(std::ostream& log) {
  const auto t0 = Clock::now();
  const RangeBound r = m_h1_bound(upb_tiles_operator(), 7);
  const double t = seconds_since(t0);
  log << "value=" << r.value << " window=[" << kUpbSeesaw - 1e-3 << ", " << kUpbH1Bound + 1e-4
      << "] converged=" << r.converged << " time=" << t << "s (limit 300s)";
  return r.converged && r.value >= kUpbSeesaw - 1e-3 && r.value <= kUpbH1Bound + 1e-4 && t <= 300.0;
}

bool upb_h3(std::ostream& log) {
  const auto t0 = Clock::now();
  const RangeBound r = m_h3_bound(upb_tiles_operator(), 11);
  const double t = seconds_since(t0);
  const double lower = seesaw_lower(upb_tiles_operator()).value;
  log << "value=" << r.value << " limit=" << kUpbH3Bound + 1e-4 << " seesaw=" << lower << " time=" << t
      << "s (limit 120s)";
  return r.converged && r.value <= kUpbH3Bound + 1e-4 && r.value >= lower && t <= 120.0;
}

bool upb_seesaw(std::ostream& log) {
  const auto t0 = Clock::now();
  const double v = seesaw_lower(upb_tiles_operator()).value;
  const double t = seconds_since(t0);
  log << "value=" << v << " target=" << kUpbSeesaw << " +-1e-3 time=" << t << "s (limit 60s)";
  return std::abs(v - kUpbSeesaw) <= 1e-3 && t <= 60.0;
}

bool c5_bracketing(std::ostream& log) {
  const auto t0 = Clock::now();
  const State c5 = graph_state(cycle_graph(5));
  const double eg_upper = 1.0 - als_lower(c5, OracleOptions{.restarts = 256}).lambda2;
  bool ok = std::abs(eg_upper - kC5Eg) <= 1e-3;
  double worst_lower = -1.0;
  std::string worst_name;
  auto consider = [&](const BoundReport& r, const std::string& name) {
    ok &= r.valid();
    if (*r.eg_lower() > worst_lower) {
      worst_lower = *r.eg_lower();
      worst_name = name;
    }
  };
  for (int k = 1; k <= 10; ++k) consider(h1_bounds(c5, H1Options{.level = k}), "h1:" + std::to_string(k));
  for (int k = 2; k <= 8; ++k)
    consider(h1_schmidt_upper(c5, H1Options{.level = k, .improvement = H1Improvement::SchmidtFirstCopy}),
             "h1-schmidt:" + std::to_string(k));
  for (int k = 2; k <= 6; ++k) consider(h2_bounds(c5, path_cyclic(k, 5)), "h2:path-cyclic:" + std::to_string(k));
  double prev = 1.0;
  bool monotone = true;
  for (int k = 2; k <= 16; ++k) {
    const BoundReport r = h3_bound(c5, k);
    ok &= r.converged;
    monotone &= *r.lambda2_upper <= prev + 1e-9;
    prev = *r.lambda2_upper;
    consider(r, "h3:" + std::to_string(k));
  }
  const double t = seconds_since(t0);
  ok &= monotone && worst_lower <= kC5Eg + 1e-6 && t <= 600.0;
  log << "als_eg_upper=" << eg_upper << " best_eg_lower=" << worst_lower << " (" << worst_name
      << ") xi_16=" << prev << " monotone=" << monotone << " time=" << t << "s (limit 600s)";
  return ok;
}

bool fig2_sweep(std::ostream& log) {
  const auto t0 = Clock::now();
  const json rec = run_cli({"sweep", "--family", "wghz", "--points", "51", "--h1", "25", "--h2", "path-cyclic:10",
                            "--h3", "60", "--exact"})["records"];
  const double t = seconds_since(t0);
  double h3_gap = 0.0, excess = -1.0;
  int rows = 0;
  for (const auto& r : rec) {
    ++rows;
    const double exact = r["eg_exact"].get<double>();
    if (r["eg_lower"].is_null()) continue;
    const double lower = r["eg_lower"].get<double>();
    if (r["method"] != "exact_symmetric") excess = std::max(excess, lower - exact);
    if (r["method"] == "H3") h3_gap = std::max(h3_gap, exact - lower);
  }
  log << "rows=" << rows << " max_h3_gap=" << h3_gap << " (limit 0.01) max_excess=" << excess
      << " (limit 1e-6) time=" << t << "s (limit 1200s)";
  return rows == 51 * 4 && h3_gap <= 0.01 && excess <= 1e-6 && t <= 1200.0;
}

bool bipartite(std::ostream& log) {
  int violations = 0;
  double qubit_gap = 0.0;
  for (int d : {2, 3})
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const State s = bf::random_state({d, d}, 1000 * d + seed);
      const double exact = schmidt_max(s, Bipartition({0}, 2));
      for (int k : {1, 2, 4, 8, 16, 25}) {
        const BoundReport r = h1_bounds(s, H1Options{.level = k});
        if (*r.lambda2_lower > exact + 1e-9 || exact > *r.lambda2_upper + 1e-9) ++violations;
        if (d == 2 && k == 25) qubit_gap = std::max(qubit_gap, *r.lambda2_upper - exact);
      }
    }
  log << "violations=" << violations << " max_qubit_gap_k25=" << qubit_gap << " (limit 0.025)";
  return violations == 0 && qubit_gap <= 0.025;
}

double max_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  if (a.size() != b.size()) return INFINITY;
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

bool brute_force(std::ostream& log) {
  const auto t0 = Clock::now();
  double recursion = 0.0, vk = 0.0, op = 0.0;
  for (std::uint64_t seed : {1, 2, 3}) {
    const State s = bf::random_state({2, 2, 2}, 70 + seed);
    for (int k = 1; k <= 4; ++k)
      recursion = std::max(recursion, max_diff(dicke_overlap_accumulate(s, k).coeffs, bf::friedland_coefficients(s, k)));
    for (int k = 1; k <= 3; ++k)
      vk = std::max(vk, std::abs(xi_general(s, k, EigOptions{.tol = 1e-13}).value - bf::eigenbound_general(s, k)));
  }
  const CMatrix u = bf::random_unitary(9, 80);
  const CMatrix random_x = u * Eigen::VectorXd::LinSpaced(9, 0.0, 1.0).cast<cplx>().asDiagonal() * u.adjoint();
  for (const CMatrix& x : {upb_tiles_operator().matrix(), random_x}) {
    const HermitianOperator h(3, 3, x, 1e-10);
    for (int k = 1; k <= 3; ++k) {
      const CMatrix dense = bf::compress_symmetric(bf::pair_operator(x, 3, 3, k, 0), 3, 3, k);
      op = std::max(op, (CMatrix(m_h3_matrix(h, k)) - dense).cwiseAbs().maxCoeff());
    }
  }
  const double t = seconds_since(t0);
  log << "recursion=" << recursion << " vk=" << vk << " operator_h3=" << op << " (limit 1e-9) time=" << t
      << "s (limit 120s)";
  return recursion <= 1e-9 && vk <= 1e-9 && op <= 1e-9 && t <= 120.0;
}

bool b_state_convergence(std::ostream& log) {
  const BoundReport r = h3_bound(b_state(), 40);
  log << "xi_40=" << *r.lambda2_upper << " window=[" << 0.5 - 1e-6 << ", 0.52]";
  return r.converged && *r.lambda2_upper >= 0.5 - 1e-6 && *r.lambda2_upper <= 0.52;
}

bool dicke12_ordering(std::ostream& log) {
  const json rec =
      run_cli({"sweep", "--family", "dicke12", "--points", "51", "--h2", "path:1", "path:1,2", "path:1,2,3,4"})["records"];
  int violations = 0;
  double worst = -INFINITY;
  for (std::size_t i = 0; i + 2 < rec.size(); i += 3) {
    const double a = rec[i]["eg_lower"].get<double>();
    const double b = rec[i + 1]["eg_lower"].get<double>();
    const double c = rec[i + 2]["eg_lower"].get<double>();
    worst = std::max({worst, a - b, b - c});
    if (a > b + 1e-9 || b > c + 1e-9) ++violations;
  }
  log << "points=" << rec.size() / 3 << " violations=" << violations << " max_step_excess=" << worst;
  return rec.size() == 51 * 3 && violations == 0;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"upb-h1-level7", upb_h1},
      {"upb-h3-level11", upb_h3},
      {"upb-seesaw", upb_seesaw},
      {"c5-bracketing", c5_bracketing},
      {"wghz-sweep-51-points", fig2_sweep},
      {"bipartite-h1-sandwich", bipartite},
      {"small-brute-force-equivalence", brute_force},
      {"b-state-h3-level40", b_state_convergence},
      {"dicke12-path-ordering", dicke12_ordering},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    std::ostringstream log;
    log.precision(9);
    bool pass = false;
    try {
      pass = c.check(log);
    } catch (const std::exception& e) {
      log << "exception: " << e.what();
    }
    std::cout << (pass ? "PASS " : "FAIL ") << c.name << ": " << log.str() << std::endl;
    failed += !pass;
  }
  std::cout << criteria.size() - failed << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed ? 1 : 0;
}
