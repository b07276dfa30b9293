#pragma once

// Command-line front end: bound, exact, sweep, oprange and selftest subcommands.

#include <atomic>
#include <exception>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "gme/gme.hpp"
#include "selftest.hpp"

namespace gme::cli {

enum ExitCode { kOk = 0, kUsage = 1, kNoConvergence = 2, kSelftestFailed = 3 };

inline constexpr const char* kSweepSchema = "gme-sweep-v1";
inline constexpr const char* kReportSchema = "gme-report-v1";

struct CommonFlags {
  std::string format = "json";
  std::string out;
  std::uint64_t seed = 12345;
  std::size_t cap = kDefaultMaxEntries;
  double tol = 1e-10;
  long max_iter = 20000;
  std::string eig = "lanczos";
  bool timing = false;
  int restarts = 64;
};

struct BoundFlags {
  std::string state;
  std::string hierarchy;
  int level = 4;
  std::string improve = "norm";
  std::string tree;
  std::string route = "auto";
  int grid = 181;
};

struct SweepFlags {
  std::string family;
  std::string state;
  int points = 51;
  std::optional<int> h1;
  std::vector<std::string> h2;
  std::optional<int> h3;
  bool exact = false;
  std::string improve = "schmidt-first";
  std::string route = "auto";
  std::string hierarchy;
  std::string levels;
  int threads = 0;
};

struct OprangeFlags {
  std::string op = "upb";
  std::string hierarchy = "h1";
  int level = 2;
};

/// One row of a sweep table.
struct SweepRow {
  double parameter = 0.0;
  BoundReport report;
  std::optional<double> exact_lambda2;
};

inline EigOptions eig_options(const CommonFlags& c) {
  EigOptions e;
  e.tol = c.tol;
  e.max_iter = c.max_iter;
  e.seed = c.seed;
  e.method = c.eig == "power" ? EigMethod::Power : EigMethod::Lanczos;
  return e;
}

inline H1Improvement parse_improvement(const std::string& s) {
  if (s == "norm") return H1Improvement::NormOnly;
  if (s == "schmidt-first") return H1Improvement::SchmidtFirstCopy;
  if (s == "schmidt-balanced") return H1Improvement::SchmidtBalanced;
  throw std::invalid_argument("unknown improvement '" + s + "'");
}

inline H3Route parse_route(const std::string& s) {
  if (s == "auto") return H3Route::Auto;
  if (s == "general") return H3Route::General;
  if (s == "symmetric") return H3Route::Symmetric;
  throw std::invalid_argument("unknown h3 route '" + s + "'");
}

/// "a..b" or a comma list.
inline std::vector<int> parse_levels(const std::string& s) {
  std::vector<int> out;
  const auto dots = s.find("..");
  if (dots != std::string::npos) {
    const int a = detail::parse_int(s.substr(0, dots), "level");
    const int b = detail::parse_int(s.substr(dots + 2), "level");
    if (a > b) throw std::invalid_argument("empty level range '" + s + "'");
    for (int k = a; k <= b; ++k) out.push_back(k);
  } else {
    for (const auto& part : detail::split(s, ',')) out.push_back(detail::parse_int(part, "level"));
  }
  for (int k : out)
    if (k < 1) throw std::invalid_argument("levels must be >= 1");
  if (out.empty()) throw std::invalid_argument("no levels given");
  return out;
}

inline BoundReport compute_bound(const State& psi, const std::string& hierarchy, int level, const CommonFlags& c,
                                 const std::string& improve, const std::string& tree, const std::string& route,
                                 int grid) {
  if (hierarchy == "h1") {
    H1Options o;
    o.level = level;
    o.improvement = parse_improvement(improve);
    o.memory_cap = c.cap;
    o.eig = eig_options(c);
    return h1_report(psi, o);
  }
  if (hierarchy == "h2") {
    const TreeSpec t = tree.empty() ? path_cyclic(level, psi.parties()) : parse_tree(tree, psi.parties());
    return h2_bounds(psi, t, c.cap);
  }
  if (hierarchy == "h3") {
    H3Options o;
    o.route = parse_route(route);
    o.eig = eig_options(c);
    o.memory_cap = c.cap;
    return h3_bound(psi, level, o);
  }
  if (hierarchy == "oracle") {
    OracleOptions o;
    o.restarts = c.restarts;
    o.seed = c.seed;
    return oracle_report(psi, o);
  }
  if (hierarchy == "exact") return psi.parties() == 2 ? svd_bipartite_report(psi) : exact_symmetric_report(psi, grid);
  throw std::invalid_argument("unknown hierarchy '" + hierarchy + "'");
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return out + "\"";
}

inline std::string csv_header() {
  return "parameter,method,level,detail,lambda2_lower,lambda2_upper,eg_lower,eg_upper,eg_exact,converged";
}

inline std::string csv_row(const SweepRow& r) {
  std::ostringstream os;
  std::optional<double> eg_exact;
  if (r.exact_lambda2) eg_exact = 1.0 - *r.exact_lambda2;
  os << csv_number(r.parameter) << ',' << to_string(r.report.method) << ',' << r.report.level << ','
     << csv_escape(r.report.detail) << ',' << csv_number(r.report.lambda2_lower) << ','
     << csv_number(r.report.lambda2_upper) << ',' << csv_number(r.report.eg_lower()) << ','
     << csv_number(r.report.eg_upper()) << ',' << csv_number(eg_exact) << ','
     << (r.report.converged ? "true" : "false");
  return os.str();
}

inline json row_json(const SweepRow& r, bool timing) {
  json j = report_to_json(r.report, timing);
  j["parameter"] = r.parameter;
  j["eg_exact"] = r.exact_lambda2 ? json(1.0 - *r.exact_lambda2) : json(nullptr);
  return j;
}

/// Runs tasks on a pool, keeping results in task order; rethrows the first failure by index.
template <class T>
std::vector<T> run_pool(std::size_t count, int threads, const std::function<T(std::size_t)>& task) {
  std::vector<T> out(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        out[i] = task(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int n = std::max(1, std::min<int>(threads, static_cast<int>(count)));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

class Emitter {
 public:
  Emitter(const std::string& path, std::ostream& fallback) : out_(&fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw std::invalid_argument("cannot write '" + path + "'");
      out_ = &file_;
    }
  }
  std::ostream& stream() { return *out_; }

 private:
  std::ofstream file_;
  std::ostream* out_;
};

inline int emit_reports(const std::vector<SweepRow>& rows, const json& header, const CommonFlags& c, std::ostream& out,
                        const char* schema) {
  Emitter em(c.out, out);
  if (c.format == "csv") {
    em.stream() << "# schema: " << schema << '\n' << csv_header() << '\n';
    for (const auto& r : rows) em.stream() << csv_row(r) << '\n';
  } else {
    json j = header;
    j["schema"] = schema;
    json arr = json::array();
    for (const auto& r : rows) arr.push_back(row_json(r, c.timing));
    j["records"] = arr;
    em.stream() << j.dump(2) << '\n';
  }
  for (const auto& r : rows)
    if (!r.report.converged) return kNoConvergence;
  return kOk;
}

inline int cmd_bound(const BoundFlags& b, const CommonFlags& c, std::ostream& out, std::ostream& err) {
  const State psi = make_named_state(b.state, &err);
  std::vector<SweepRow> rows{{0.0, compute_bound(psi, b.hierarchy, b.level, c, b.improve, b.tree, b.route, b.grid), {}}};
  json header{{"state", psi.label()}, {"dims", psi.dims()}};
  if (b.hierarchy == "oracle" && c.format == "json") {
    OracleOptions o;
    o.restarts = c.restarts;
    o.seed = c.seed;
    const OracleResult res = als_lower(psi, o);
    json w = json::array();
    for (const auto& v : res.witness) {
      json vec = json::array();
      for (Eigen::Index i = 0; i < v.size(); ++i) vec.push_back(json::array({v[i].real(), v[i].imag()}));
      w.push_back(vec);
    }
    header["witness"] = w;
  }
  return emit_reports(rows, header, c, out, kReportSchema);
}

inline int cmd_sweep(const SweepFlags& s, const CommonFlags& c, std::ostream& out, std::ostream& err) {
  const int threads = s.threads > 0 ? s.threads : std::max(1u, std::thread::hardware_concurrency());
  std::vector<SweepRow> rows;
  json header;
  if (!s.family.empty()) {
    if (s.family != "wghz" && s.family != "dicke12") throw std::invalid_argument("unknown family '" + s.family + "'");
    if (!s.state.empty()) throw std::invalid_argument("use either --family or --state");
    if (s.points < 2) throw std::invalid_argument("--points must be >= 2");
    if (!s.h1 && s.h2.empty() && !s.h3 && !s.exact) throw std::invalid_argument("sweep needs at least one method");
    auto point = [&](std::size_t i) {
      const double x = double(i) / (s.points - 1);
      const State psi = s.family == "wghz" ? wghz_state(x) : dicke12_state(x);
      std::vector<SweepRow> pr;
      std::optional<double> exact;
      if (s.exact) exact = symmetric_exact(psi);
      if (s.h1) pr.push_back({x, compute_bound(psi, "h1", *s.h1, c, s.improve, "", s.route, 0), exact});
      for (const auto& t : s.h2) pr.push_back({x, compute_bound(psi, "h2", 0, c, "", t, s.route, 0), exact});
      if (s.h3) pr.push_back({x, compute_bound(psi, "h3", *s.h3, c, "", "", s.route, 0), exact});
      if (s.exact) {
        BoundReport r;
        r.method = Method::ExactSymmetric;
        r.lambda2_upper = r.lambda2_lower = *exact;
        pr.push_back({x, r, exact});
      }
      return pr;
    };
    const auto per_point = run_pool<std::vector<SweepRow>>(s.points, threads, point);
    for (const auto& pr : per_point) rows.insert(rows.end(), pr.begin(), pr.end());
    header = {{"family", s.family}, {"points", s.points}};
  } else {
    if (s.state.empty()) throw std::invalid_argument("sweep needs --family or --state");
    if (s.hierarchy.empty() || s.levels.empty()) throw std::invalid_argument("level sweeps need --hierarchy and --levels");
    const State psi = make_named_state(s.state, &err);
    const auto levels = parse_levels(s.levels);
    auto task = [&](std::size_t i) {
      const int k = levels[i];
      return SweepRow{double(k), compute_bound(psi, s.hierarchy, k, c, s.improve, "", s.route, 181), {}};
    };
    rows = run_pool<SweepRow>(levels.size(), threads, task);
    header = {{"state", psi.label()}, {"dims", psi.dims()}, {"hierarchy", s.hierarchy}};
  }
  return emit_reports(rows, header, c, out, kSweepSchema);
}

inline int cmd_oprange(const OprangeFlags& o, const CommonFlags& c, std::ostream& out) {
  const HermitianOperator x = make_named_operator(o.op);
  json j{{"schema", "gme-oprange-v1"}, {"operator", o.op}, {"dims", {x.dim_a(), x.dim_b()}}};
  bool converged = true;
  if (o.hierarchy == "h1" || o.hierarchy == "h3") {
    const RangeBound r =
        o.hierarchy == "h1" ? m_h1_bound(x, o.level, eig_options(c), c.cap) : m_h3_bound(x, o.level, eig_options(c), c.cap);
    j["method"] = o.hierarchy == "h1" ? "H1" : "H3";
    j["level"] = o.level;
    j["bound"] = "upper";
    j["delta"] = r.value;
    j["epsilon"] = 1.0 - r.value;
    j["iterations"] = r.iterations;
    j["residual"] = r.residual;
    j["converged"] = r.converged;
    converged = r.converged;
  } else if (o.hierarchy == "seesaw") {
    OracleOptions opts;
    opts.restarts = c.restarts;
    opts.seed = c.seed;
    const SeesawResult r = seesaw_lower(x, opts);
    j["method"] = "seesaw";
    j["level"] = c.restarts;
    j["bound"] = "lower";
    j["delta"] = r.value;
    j["epsilon"] = 1.0 - r.value;
    j["seed"] = c.seed;
  } else {
    throw std::invalid_argument("unknown operator hierarchy '" + o.hierarchy + "'");
  }
  Emitter em(c.out, out);
  if (c.format == "csv") {
    em.stream() << "# schema: gme-oprange-v1\nmethod,level,bound,delta,epsilon\n"
                << j["method"].get<std::string>() << ',' << j["level"].get<int>() << ',' << j["bound"].get<std::string>()
                << ',' << csv_number(j["delta"].get<double>()) << ',' << csv_number(j["epsilon"].get<double>()) << '\n';
  } else {
    em.stream() << j.dump(2) << '\n';
  }
  return converged ? kOk : kNoConvergence;
}

inline int cmd_selftest(const SelftestOptions& s, const CommonFlags& c, std::ostream& out) {
  Emitter em(c.out, out);
  const auto results = run_selftest(s);
  int failed = 0;
  for (const auto& r : results) {
    em.stream() << (r.pass() ? "PASS " : "FAIL ") << r.name << " residual=" << std::setprecision(3) << r.residual
                << " tol=" << r.tol << '\n';
    if (!r.pass()) ++failed;
  }
  em.stream() << "selftest: " << results.size() - failed << " passed, " << failed << " failed\n";
  return failed ? kSelftestFailed : kOk;
}

inline void add_common(CLI::App* sub, CommonFlags& c) {
  sub->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  sub->add_option("--out", c.out, "Output path (default: standard output)");
  sub->add_option("--seed", c.seed, "Random seed");
  sub->add_option("--cap", c.cap, "Maximum dense tensor entries")->check(CLI::PositiveNumber);
  sub->add_option("--tol", c.tol, "Eigensolver relative residual")->check(CLI::PositiveNumber);
  sub->add_option("--max-iter", c.max_iter, "Eigensolver operator applications")->check(CLI::PositiveNumber);
  sub->add_option("--eig", c.eig, "Eigensolver")->check(CLI::IsMember({"lanczos", "power"}));
  sub->add_option("--restarts", c.restarts, "Oracle / see-saw restarts")->check(CLI::PositiveNumber);
  sub->add_flag("--timing", c.timing, "Include wall-clock times in the output");
}

/// Parses and runs one command line. Returns the process exit code.
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bounds on the geometric measure of entanglement of multipartite pure states", "gme"};
  app.require_subcommand(1);
  CommonFlags common;

  BoundFlags bound;
  auto* b = app.add_subcommand("bound", "Upper/lower bounds on Lambda^2 from one method");
  b->add_option("--state", bound.state, "State descriptor, e.g. ghz:3, wghz:0.3, file:psi.json")->required();
  b->add_option("--hierarchy", bound.hierarchy, "Method")
      ->required()
      ->check(CLI::IsMember({"h1", "h2", "h3", "oracle", "exact"}));
  b->add_option("--level", bound.level, "Hierarchy level k")->check(CLI::PositiveNumber);
  b->add_option("--improve", bound.improve, "h1 tightening")->check(CLI::IsMember({"norm", "schmidt-first", "schmidt-balanced"}));
  b->add_option("--tree", bound.tree, "h2 tree, e.g. path:1,3,2 or tree:(0-1:1),(1-2:2)");
  b->add_option("--h3-route", bound.route, "h3 builder")->check(CLI::IsMember({"auto", "general", "symmetric"}));
  b->add_option("--grid", bound.grid, "Grid points for the symmetric exact solver")->check(CLI::PositiveNumber);
  add_common(b, common);

  BoundFlags exact;
  auto* e = app.add_subcommand("exact", "Exact Lambda^2 for two-party or permutation-symmetric qubit states");
  e->add_option("--state", exact.state, "State descriptor")->required();
  e->add_option("--grid", exact.grid, "Grid points")->check(CLI::PositiveNumber);
  add_common(e, common);

  SweepFlags sweep;
  auto* s = app.add_subcommand("sweep", "Parameter or level sweeps");
  s->add_option("--family", sweep.family, "State family: wghz or dicke12");
  s->add_option("--state", sweep.state, "Fixed state for a level sweep");
  s->add_option("--points", sweep.points, "Parameter grid points");
  s->add_option("--h1", sweep.h1, "h1 level");
  s->add_option("--h2", sweep.h2, "h2 trees")->expected(1, -1);
  s->add_option("--h3", sweep.h3, "h3 level");
  s->add_flag("--exact", sweep.exact, "Add the symmetric exact value");
  s->add_option("--improve", sweep.improve, "h1 tightening")->check(CLI::IsMember({"norm", "schmidt-first", "schmidt-balanced"}));
  s->add_option("--h3-route", sweep.route, "h3 builder")->check(CLI::IsMember({"auto", "general", "symmetric"}));
  s->add_option("--hierarchy", sweep.hierarchy, "Method for level sweeps")->check(CLI::IsMember({"h1", "h2", "h3"}));
  s->add_option("--levels", sweep.levels, "Levels, a..b or a,b,c");
  s->add_option("--threads", sweep.threads, "Worker threads (default: logical cores)");
  add_common(s, common);

  OprangeFlags oprange;
  auto* o = app.add_subcommand("oprange", "Separable numerical range of a bipartite operator");
  o->add_option("--operator", oprange.op, "upb or file:op.json");
  o->add_option("--hierarchy", oprange.hierarchy, "Method")->check(CLI::IsMember({"h1", "h3", "seesaw"}));
  o->add_option("--level", oprange.level, "Level k")->check(CLI::PositiveNumber);
  add_common(o, common);

  SelftestOptions st;
  auto* t = app.add_subcommand("selftest", "Cross-check fast paths against dense references");
  t->add_flag("--quick", st.quick, "Smaller sizes");
  t->add_option("--inject-fault", st.fault, "Corrupt a component to exercise failure reporting")
      ->check(CLI::IsMember({"mu"}));
  add_common(t, common);

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (b->parsed()) return cmd_bound(bound, common, out, err);
    if (e->parsed()) {
      exact.hierarchy = "exact";
      return cmd_bound(exact, common, out, err);
    }
    if (s->parsed()) return cmd_sweep(sweep, common, out, err);
    if (o->parsed()) return cmd_oprange(oprange, common, out);
    if (t->parsed()) return cmd_selftest(st, common, out);
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(std::move(args), out, err);
}

}  // namespace gme::cli
