#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"

using hyptest::io::json;

namespace {

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "hyptest");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Result r;
  r.code = hyptest::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string data(const std::string& name) { return std::string(HYPTEST_DATA_DIR) + "/" + name; }

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string l; std::getline(ss, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST(CliNorm, SymmetricPoint) {
  const auto r = run({"norm", "--alpha", "0.5"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["alpha"], 0.5);
  EXPECT_EQ(j["sigma"], 0.5);
  EXPECT_EQ(j["config"]["command"], "norm");
}

TEST(CliNorm, FivePercent) {
  const auto r = run({"norm", "--alpha", "0.05"});
  ASSERT_EQ(r.code, 0);
  EXPECT_NEAR(json::parse(r.out)["sigma"].get<double>(), 0.3909, 1e-4);
}

TEST(CliNorm, Csv) {
  const auto r = run({"--format", "csv", "norm", "--alpha", "0.5"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "alpha,sigma,s_star\n0.5,0.5,0\n");
}

TEST(CliNorm, ExitCodes) {
  const auto bad = run({"norm", "--alpha", "1.5"});
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.err.find("alpha"), std::string::npos);
  EXPECT_EQ(run({"norm", "--alpha", "0.3", "--tol", "1e-300"}).code, 3);
  EXPECT_EQ(run({"norm", "--alpha", "0.3", "--bogus", "1"}).code, 2);
  EXPECT_EQ(run({"norm"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"norm", "--alpha", "abc"}).code, 2);
  EXPECT_EQ(run({"--format", "xml", "norm", "--alpha", "0.3"}).code, 2);
}

TEST(CliNormTable, FiftyMonotoneRows) {
  const auto r = run({"norm-table", "--alphas", "0.01:0.5:0.01"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 51u);
  EXPECT_EQ(rows[0], "alpha,sigma,s_star");
  EXPECT_EQ(rows[50].substr(0, 8), "0.5,0.5,");
  double prev = 0.0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto c1 = rows[i].find(',');
    const auto c2 = rows[i].find(',', c1 + 1);
    const double sigma = std::stod(rows[i].substr(c1 + 1, c2 - c1 - 1));
    EXPECT_GT(sigma, prev) << rows[i];
    prev = sigma;
  }
}

TEST(CliNormTable, ComplementaryPairAgrees) {
  const auto r = run({"norm-table", "--alphas", "0.25:0.75:0.5"});
  ASSERT_EQ(r.code, 0);
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[1].substr(rows[1].find(',')), rows[2].substr(rows[2].find(',')));
}

TEST(CliNormTable, InvalidRanges) {
  EXPECT_EQ(run({"norm-table", "--alphas", "0.5:0.1:0.1"}).code, 2);
  EXPECT_EQ(run({"norm-table", "--alphas", "0.1:0.5:0"}).code, 2);
  EXPECT_EQ(run({"norm-table", "--alphas", "0.1-0.5"}).code, 2);
  EXPECT_EQ(run({"norm-table", "--alphas", "0.1:1.5:0.5"}).code, 2);
}

TEST(CliBound, BinaryFromKl) {
  const auto r = run({"bound", "binary", "--alpha", "0.05", "--n", "5", "--kl", "0.020136"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_NEAR(j["subgauss"].get<double>(), 0.8246, 1e-4);
  EXPECT_NEAR(j["pinsker"].get<double>(), 0.7756, 1e-4);
  EXPECT_EQ(j["config"]["kl"], 0.020136);
}

TEST(CliBound, BinaryIdenticalFiles) {
  const auto r = run({"bound", "binary", "--p0", data("bern05.json"), "--p1", data("bern05.json"), "--alpha",
                      "0.5", "--n", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["subgauss"], 1.0);
  EXPECT_EQ(j["pinsker"], 1.0);
}

TEST(CliBound, BinaryNeedsDivergence) {
  EXPECT_EQ(run({"bound", "binary", "--alpha", "0.05", "--n", "5"}).code, 2);
  EXPECT_EQ(run({"bound", "binary", "--alpha", "0.05", "--n", "5", "--p0", data("bern05.json")}).code, 2);
  EXPECT_EQ(run({"bound", "binary", "--alpha", "0.05", "--n", "5", "--p0", data("bern05.json"), "--p1",
                 data("gauss0.json")})
                .code,
            2);
  EXPECT_EQ(run({"bound", "binary", "--alpha", "0.05", "--n", "5", "--kl", "0.1", "--p0", data("nope.json"),
                 "--p1", data("nope.json")})
                .code,
            2);
}

TEST(CliBound, MaryUniform) {
  const auto r = run({"bound", "mary", "--m", "3", "--n", "1", "--delta", "0.01"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_NEAR(j["uniform_delta"].get<double>(), 0.59596, 1e-5);
  EXPECT_NEAR(j["fano"].get<double>(), -0.01443, 1e-5);
}

TEST(CliBound, MaryInlineMatrixAndFiles) {
  const auto r = run({"bound", "mary", "--n", "2", "--kl-matrix", "[[0,0.1],[0.2,0]]", "--alphas", "0.1,0.2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["fano"], "not applicable");
  EXPECT_TRUE(j["a_posteriori"].get<bool>());

  const auto h = run({"bound", "mary", "--n", "1", "--hypotheses", data("mary_delta001")});
  ASSERT_EQ(h.code, 0) << h.err;
  EXPECT_LE(json::parse(h.out)["delta"].get<double>(), 0.01);

  EXPECT_EQ(run({"bound", "mary", "--n", "1", "--kl-matrix", "[[0,1],[1"}).code, 2);
  EXPECT_EQ(run({"bound", "mary", "--n", "1", "--m", "3"}).code, 2);
  EXPECT_EQ(run({"bound", "mary", "--n", "1"}).code, 2);
}

TEST(CliExact, BernoulliInstance) {
  const auto r = run({"exact", "--p0", data("bern05.json"), "--p1", data("bern06.json"), "--n", "3", "--c", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_NEAR(j["rates"]["alpha"].get<double>(), 0.5, 1e-15);
  EXPECT_NEAR(j["rates"]["beta"].get<double>(), 0.352, 1e-15);
  EXPECT_TRUE(j["validity"]["all"].get<bool>());
  EXPECT_EQ(j["config"]["p1"]["p"], 0.6);
}

TEST(CliExact, Errors) {
  EXPECT_EQ(run({"exact", "--p0", data("gauss0.json"), "--p1", data("gauss1.json"), "--n", "3"}).code, 2);
  EXPECT_EQ(run({"exact", "--p0", data("bern05.json"), "--p1", data("bern06.json"), "--n", "0"}).code, 2);
  EXPECT_EQ(run({"exact", "--p0", data("bern05.json"), "--p1", data("bern06.json"), "--n", "3", "--c", "-1"}).code,
            2);
  EXPECT_EQ(run({"--format", "csv", "exact", "--p0", data("bern05.json"), "--p1", data("bern06.json"), "--n",
                 "3"})
                .code,
            2);
}

TEST(CliSimulate, WithinHalfWidths) {
  const auto r = run({"--seed", "7", "simulate", "--p0", data("bern05.json"), "--p1", data("bern06.json"), "--n",
                      "3", "--c", "0", "--trials", "100000"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rates = json::parse(r.out)["rates"];
  EXPECT_NEAR(rates["alpha"].get<double>(), 0.5, 3.0 * rates["half_width_alpha"].get<double>());
  EXPECT_NEAR(rates["beta"].get<double>(), 0.352, 3.0 * rates["half_width_beta"].get<double>());
}

TEST(CliSimulate, ByteIdenticalAndJobsInvariant) {
  const std::vector<std::string> base{"simulate", "--p0", data("gauss0.json"), "--p1", data("gauss1.json"),
                                      "--n", "4", "--trials", "30000"};
  auto with = [&](std::vector<std::string> pre) {
    pre.insert(pre.end(), base.begin(), base.end());
    return run(pre).out;
  };
  const auto a = with({"--seed", "3"});
  EXPECT_EQ(a, with({"--seed", "3"}));
  EXPECT_EQ(a, with({"--seed", "3", "--jobs", "2"}));
  EXPECT_EQ(a, with({"--seed", "3", "--jobs", "8"}));
  EXPECT_NE(a, with({"--seed", "4"}));
}

TEST(CliMary, DeltaTriple) {
  const auto r = run({"--seed", "7", "mary", "--hypotheses", data("mary_delta001"), "--n", "1", "--trials",
                      "100000", "--delta", "0.01"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  const double amax = j["confusion"]["alpha_max"].get<double>();
  const double hw = j["confusion"]["half_width_max"].get<double>();
  EXPECT_GE(amax, 0.59596 - 3.0 * hw);
  EXPECT_TRUE(j["validity"]["all"].get<bool>());
  EXPECT_EQ(j["config"]["mode"], "monte-carlo");
}

TEST(CliMary, ExactMode) {
  const auto r = run({"mary", "--hypotheses", data("mary_delta001"), "--n", "2", "--exact"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["confusion"]["mode"], "exact");
  EXPECT_TRUE(j["validity"]["rows_sum_to_one"].get<bool>());
  EXPECT_EQ(run({"mary", "--hypotheses", data("no_such_dir"), "--n", "1"}).code, 2);
}

TEST(CliCompare, ThreeHypothesesAlwaysSubgauss) {
  const auto r = run({"compare", "--delta", "0.01", "--m-range", "3:50", "--n-range", "1:100"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 1u + 48u * 100u);
  EXPECT_EQ(rows[0], "M,n,subgauss,fano,winner");
  bool saw_fano = false;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto winner = rows[i].substr(rows[i].rfind(',') + 1);
    if (rows[i].rfind("3,", 0) == 0) {
      EXPECT_EQ(winner, "subgauss") << rows[i];
    }
    saw_fano = saw_fano || winner == "fano";
  }
  EXPECT_TRUE(saw_fano);
}

TEST(CliCompare, ZeroDeltaAndErrors) {
  const auto r = run({"compare", "--delta", "0", "--m-range", "2:4", "--n-range", "1:1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(lines(r.out)[1], "2,1,0.5,NA,subgauss");
  EXPECT_EQ(run({"compare", "--delta", "0.01", "--m-range", "3-50"}).code, 2);
  EXPECT_EQ(run({"compare", "--delta", "0.01", "--n-range", "1:2.5:0.5"}).code, 2);
  EXPECT_EQ(run({"compare"}).code, 2);
  const auto js = run({"--format", "json", "compare", "--delta", "0.01", "--m-range", "2:3", "--n-range", "1:2"});
  ASSERT_EQ(js.code, 0);
  EXPECT_EQ(json::parse(js.out)["rows"].size(), 4u);
}

TEST(CliOutput, WritesFile) {
  const auto path = std::filesystem::temp_directory_path() / "hyptest_cli_out.json";
  std::filesystem::remove(path);
  const auto r = run({"--out", path.string(), "norm", "--alpha", "0.2"});
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  std::ifstream f(path);
  const auto j = json::parse(f);
  EXPECT_EQ(j["alpha"], 0.2);
  std::filesystem::remove(path);
}
