#include <gtest/gtest.h>

#include <chrono>
#include <filesystem>
#include <fstream>

#include "cli_app.hpp"

using gme::json;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = gme::cli::run(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

json records(const Outcome& o) { return json::parse(o.out).at("records"); }

void check_report_invariants(const json& rec) {
  const auto up = rec["lambda2_upper"], lo = rec["lambda2_lower"];
  if (!up.is_null()) {
    EXPECT_GE(up.get<double>(), 0.0);
    EXPECT_LE(up.get<double>(), 1.0 + 1e-9);
  }
  if (!lo.is_null()) {
    EXPECT_GE(lo.get<double>(), 0.0);
    EXPECT_LE(lo.get<double>(), 1.0 + 1e-9);
  }
  if (!up.is_null() && !lo.is_null()) EXPECT_LE(lo.get<double>(), up.get<double>() + 1e-9);
}

}  // namespace

TEST(Cli, BoundH3Ghz) {
  const Outcome o = run({"bound", "--state", "ghz:3", "--hierarchy", "h3", "--level", "60"});
  ASSERT_EQ(o.code, 0) << o.err;
  const json j = json::parse(o.out);
  EXPECT_EQ(j["schema"], "gme-report-v1");
  const json rec = j["records"][0];
  EXPECT_NEAR(rec["lambda2_upper"].get<double>(), 0.5, 1e-3);
  EXPECT_EQ(rec["method"], "H3");
  EXPECT_TRUE(rec["lambda2_lower"].is_null());
  check_report_invariants(rec);
}

TEST(Cli, BoundH1Schmidt) {
  const Outcome o = run({"bound", "--state", "w:3", "--hierarchy", "h1", "--level", "25", "--improve", "schmidt-first"});
  ASSERT_EQ(o.code, 0) << o.err;
  const json rec = records(o)[0];
  EXPECT_EQ(rec["method"], "H1_schmidt");
  EXPECT_EQ(rec["level"], 25);
  check_report_invariants(rec);
}

TEST(Cli, BoundOracleFromFile) {
  const auto path = (std::filesystem::temp_directory_path() / "gme_cli_state.json").string();
  std::ofstream(path) << gme::state_to_json(gme::w_state(3)).dump();
  const Outcome o = run({"bound", "--state", "file:" + path, "--hierarchy", "oracle", "--restarts", "128"});
  ASSERT_EQ(o.code, 0) << o.err;
  const json j = json::parse(o.out);
  EXPECT_NEAR(j["records"][0]["lambda2_lower"].get<double>(), 4.0 / 9.0, 1e-9);
  ASSERT_EQ(j["witness"].size(), 3u);
  EXPECT_EQ(j["witness"][0].size(), 2u);
}

TEST(Cli, BoundH2AndExact) {
  const Outcome h2 = run({"bound", "--state", "b", "--hierarchy", "h2", "--tree", "path:1,2"});
  ASSERT_EQ(h2.code, 0) << h2.err;
  EXPECT_EQ(records(h2)[0]["detail"], "path:1,2");
  const Outcome ex = run({"exact", "--state", "w:3"});
  ASSERT_EQ(ex.code, 0) << ex.err;
  EXPECT_NEAR(records(ex)[0]["lambda2_upper"].get<double>(), 4.0 / 9.0, 1e-12);
  const Outcome bell = run({"exact", "--state", "bell"});
  EXPECT_NEAR(records(bell)[0]["lambda2_upper"].get<double>(), 0.5, 1e-12);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"bound", "--state", "ghz:3"}).code, 1);
  EXPECT_EQ(run({"bound", "--state", "ghz:3", "--hierarchy", "h9"}).code, 1);
  const Outcome unknown = run({"bound", "--state", "zzz:3", "--hierarchy", "h1"});
  EXPECT_EQ(unknown.code, 1);
  EXPECT_NE(unknown.err.find("unknown state"), std::string::npos);
  EXPECT_TRUE(unknown.out.empty());
  EXPECT_EQ(run({"bound", "--state", "ghz:3", "--hierarchy", "h1", "--level", "50", "--cap", "100"}).code, 1);
  EXPECT_EQ(run({"sweep", "--family", "wghz"}).code, 1);
  EXPECT_EQ(run({"sweep", "--state", "c5", "--hierarchy", "h3", "--levels", "5..2"}).code, 1);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, NonConvergenceExitCode) {
  const Outcome o = run({"bound", "--state", "c5", "--hierarchy", "h3", "--level", "6", "--max-iter", "3", "--tol", "1e-14"});
  EXPECT_EQ(o.code, 2);
  const json rec = records(o)[0];
  EXPECT_FALSE(rec["converged"].get<bool>());
  EXPECT_FALSE(rec["residual"].is_null());
}

TEST(Cli, SweepCsvSchemaAndOrder) {
  const Outcome o = run({"sweep", "--family", "wghz", "--points", "5", "--h1", "4", "--h2", "path-cyclic:3", "--h3", "6",
                         "--exact", "--format", "csv", "--threads", "3"});
  ASSERT_EQ(o.code, 0) << o.err;
  std::istringstream in(o.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "# schema: gme-sweep-v1");
  std::getline(in, line);
  EXPECT_EQ(line, gme::cli::csv_header());
  std::vector<std::string> methods;
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    methods.push_back(line.substr(line.find(',') + 1, line.find(',', line.find(',') + 1) - line.find(',') - 1));
  }
  EXPECT_EQ(rows, 20);
  EXPECT_EQ(methods[0], "H1_schmidt");
  EXPECT_EQ(methods[1], "H2");
  EXPECT_EQ(methods[2], "H3");
  EXPECT_EQ(methods[3], "exact_symmetric");
}

TEST(Cli, SweepJsonBracketsExact) {
  const Outcome o = run({"sweep", "--family", "wghz", "--points", "6", "--h1", "6", "--h3", "12", "--exact"});
  ASSERT_EQ(o.code, 0) << o.err;
  for (const auto& rec : records(o)) {
    check_report_invariants(rec);
    if (!rec["eg_lower"].is_null()) EXPECT_LE(rec["eg_lower"].get<double>(), rec["eg_exact"].get<double>() + 1e-6);
  }
}

TEST(Cli, LevelSweepMonotone) {
  const Outcome o = run({"sweep", "--state", "graph-c5", "--hierarchy", "h3", "--levels", "2..6"});
  ASSERT_EQ(o.code, 0) << o.err;
  const json rec = records(o);
  ASSERT_EQ(rec.size(), 5u);
  for (std::size_t i = 1; i < rec.size(); ++i) {
    EXPECT_EQ(rec[i]["level"].get<int>(), static_cast<int>(i) + 2);
    EXPECT_LE(rec[i]["lambda2_upper"].get<double>(), rec[i - 1]["lambda2_upper"].get<double>() + 1e-9);
  }
}

TEST(Cli, Deterministic) {
  const std::vector<std::string> args{"sweep", "--family", "dicke12", "--points", "4", "--h2", "path:1", "path:1,2",
                                      "--threads", "4"};
  const Outcome a = run(args);
  const Outcome b = run(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  const Outcome c = run({"bound", "--state", "c5", "--hierarchy", "oracle", "--restarts", "8", "--seed", "5"});
  const Outcome d = run({"bound", "--state", "c5", "--hierarchy", "oracle", "--restarts", "8", "--seed", "5"});
  EXPECT_EQ(c.out, d.out);
  EXPECT_EQ(json::parse(c.out)["records"][0]["seed"], 5);
}

TEST(Cli, TimingOnlyWhenRequested) {
  const Outcome plain = run({"bound", "--state", "ghz:3", "--hierarchy", "h1", "--level", "3"});
  EXPECT_FALSE(records(plain)[0].contains("wall_time"));
  const Outcome timed = run({"bound", "--state", "ghz:3", "--hierarchy", "h1", "--level", "3", "--timing"});
  EXPECT_TRUE(records(timed)[0].contains("wall_time"));
}

TEST(Cli, OutFile) {
  const auto path = (std::filesystem::temp_directory_path() / "gme_cli_out.json").string();
  std::filesystem::remove(path);
  const Outcome o = run({"bound", "--state", "ghz:3", "--hierarchy", "h1", "--level", "2", "--out", path});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_TRUE(o.out.empty());
  std::ifstream in(path);
  const json j = json::parse(in);
  EXPECT_NEAR(j["records"][0]["lambda2_upper"].get<double>(), std::sqrt(5.0 / 8.0), 1e-14);
}

TEST(Cli, Oprange) {
  const Outcome h3 = run({"oprange", "--operator", "upb", "--hierarchy", "h3", "--level", "5"});
  ASSERT_EQ(h3.code, 0) << h3.err;
  const json j = json::parse(h3.out);
  EXPECT_EQ(j["schema"], "gme-oprange-v1");
  EXPECT_NEAR(j["delta"].get<double>() + j["epsilon"].get<double>(), 1.0, 1e-15);
  const Outcome ss = run({"oprange", "--operator", "upb", "--hierarchy", "seesaw", "--restarts", "16", "--format", "csv"});
  ASSERT_EQ(ss.code, 0) << ss.err;
  EXPECT_EQ(ss.out.rfind("# schema: gme-oprange-v1\n", 0), 0u);
  EXPECT_EQ(run({"oprange", "--operator", "nope"}).code, 1);
}

TEST(Cli, SelftestQuickPassesAndFaultFails) {
  const auto t0 = std::chrono::steady_clock::now();
  const Outcome ok = run({"selftest", "--quick"});
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_EQ(ok.code, 0) << ok.out;
  EXPECT_EQ(ok.out.find("FAIL"), std::string::npos);
  EXPECT_LT(seconds, 60.0);
  const Outcome bad = run({"selftest", "--quick", "--inject-fault", "mu"});
  EXPECT_EQ(bad.code, 3);
  EXPECT_NE(bad.out.find("FAIL mu-sum-rule"), std::string::npos);
}
