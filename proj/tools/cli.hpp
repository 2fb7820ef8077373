#ifndef HYPTEST_TOOLS_CLI_HPP
#define HYPTEST_TOOLS_CLI_HPP

// hyptest command-line driver.
//
// Exit codes: 0 success, 2 validation error, 3 numerical failure.

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "hyptest/hyptest.hpp"
#include "hyptest/io.hpp"

namespace hyptest::cli {

using io::json;

enum ExitCode : int { kOk = 0, kValidation = 2, kNumerical = 3 };

struct Range {
  double start = 0.0;
  double stop = 0.0;
  double step = 1.0;
};

inline double parse_double(const std::string& s, const std::string& what) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) throw domain_error("invalid number in " + what + ": '" + s + "'");
  return v;
}

/// start:stop[:step]; the step defaults to 1.
inline Range parse_range(const std::string& text, const std::string& what) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() < 2 || parts.size() > 3)
    throw domain_error(what + ": expected start:stop[:step], got '" + text + "'");
  Range r{parse_double(parts[0], what), parse_double(parts[1], what),
          parts.size() == 3 ? parse_double(parts[2], what) : 1.0};
  if (!(r.step > 0.0)) throw domain_error(what + ": step must be positive");
  if (r.stop < r.start) throw domain_error(what + ": empty range '" + text + "'");
  return r;
}

/// start, start + step, ... up to stop; stop is included when it lies on the
/// grid (to within 1e-9 steps) and is then emitted exactly.
inline std::vector<double> expand(const Range& r) {
  const double span = (r.stop - r.start) / r.step;
  const auto count = static_cast<long>(std::floor(span + 1e-9)) + 1;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  for (long i = 0; i < count; ++i) {
    double v = r.start + static_cast<double>(i) * r.step;
    if (std::abs(v - r.stop) <= 1e-9 * r.step) v = r.stop;
    out.push_back(v);
  }
  return out;
}

inline std::vector<int> expand_int(const std::string& text, const std::string& what) {
  const Range r = parse_range(text, what);
  std::vector<int> out;
  for (double v : expand(r)) {
    if (v != std::floor(v)) throw domain_error(what + ": values must be integers");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

inline std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ',');) out.push_back(parse_double(p, what));
  if (out.empty()) throw domain_error(what + ": empty list");
  return out;
}

/// Inline JSON (starts with '[') or a path to a JSON file holding an M x M array.
inline Matrix parse_matrix(const std::string& text) {
  json j;
  if (!text.empty() && text.front() == '[') {
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw domain_error(std::string("--kl-matrix: ") + e.what());
    }
  } else {
    j = io::read_json_file(text);
  }
  if (!j.is_array()) throw domain_error("--kl-matrix must be a JSON array of arrays");
  Matrix m;
  for (const auto& row : j) {
    if (!row.is_array()) throw domain_error("--kl-matrix must be a JSON array of arrays");
    std::vector<double> r;
    for (const auto& v : row) {
      if (v.is_number()) r.push_back(v.get<double>());
      else if (v == "inf") r.push_back(kInf);
      else throw domain_error("--kl-matrix entries must be numbers or \"inf\"");
    }
    m.push_back(std::move(r));
  }
  return m;
}

inline std::uint64_t default_seed() {
  if (const char* env = std::getenv("HYPTEST_SEED")) {
    std::uint64_t v = 0;
    const std::string s(env);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc() && ptr == s.data() + s.size()) return v;
  }
  return 1;
}

struct Options {
  std::string format;
  std::uint64_t seed = default_seed();
  std::string out_path;
  int jobs = 1;

  // norm / norm-table
  double alpha = 0.0;
  std::string alphas_range;
  double tol = subgauss::kDefaultTolerance;

  // bound
  int n = 1;
  std::optional<double> kl;
  std::optional<double> kl01;
  std::string p0_path;
  std::string p1_path;
  double resolution = 1e-4;
  std::string kl_matrix;
  std::optional<int> m;
  std::optional<double> delta;
  std::string alphas_list;
  std::string hypotheses_dir;

  // testing
  double c = 0.0;
  std::int64_t trials = 100000;
  bool exact = false;

  // compare
  std::string m_range = "3:50";
  std::string n_range = "1:100";
};

class Runner {
 public:
  Runner(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int run(int argc, const char* const* argv) {
    CLI::App app{"Sub-Gaussian error bounds for likelihood-based hypothesis tests"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--format", opt_.format, "Output format: json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--seed", opt_.seed, "Random seed (default: $HYPTEST_SEED or 1)");
    app.add_option("--out", opt_.out_path, "Write output to this file instead of stdout");
    app.add_option("--jobs", opt_.jobs, "Worker threads for Monte Carlo")->check(CLI::PositiveNumber);

    auto* norm = app.add_subcommand("norm", "Sub-Gaussian norm of an indicator with mean alpha");
    norm->add_option("--alpha", opt_.alpha, "Type I error in [0, 1]")->required();
    norm->add_option("--tol", opt_.tol, "Residual tolerance");

    auto* table = app.add_subcommand("norm-table", "Norm over a grid of alphas (CSV: alpha,sigma,s_star)");
    table->add_option("--alphas", opt_.alphas_range, "start:stop:step, start included, stop included when on grid")
        ->required();
    table->add_option("--tol", opt_.tol, "Residual tolerance");

    auto* bound = app.add_subcommand("bound", "Evaluate closed-form error bounds");
    bound->require_subcommand(1);
    auto* binary = bound->add_subcommand("binary", "Pinsker and sub-Gaussian bounds on alpha + beta");
    binary->add_option("--alpha", opt_.alpha, "Type I error")->required();
    binary->add_option("--n", opt_.n, "Sample size")->required();
    binary->add_option("--kl", opt_.kl, "D(P1 || P0) in nats");
    binary->add_option("--kl01", opt_.kl01, "D(P0 || P1) in nats, enables the implicit beta floor");
    binary->add_option("--p0", opt_.p0_path, "H0 distribution spec (JSON)");
    binary->add_option("--p1", opt_.p1_path, "H1 distribution spec (JSON)");
    binary->add_option("--resolution", opt_.resolution, "Grid step for the implicit beta floor");
    auto* mary = bound->add_subcommand("mary", "M-ary sub-Gaussian and Fano bounds on alpha_max");
    mary->add_option("--n", opt_.n, "Sample size")->required();
    mary->add_option("--kl-matrix", opt_.kl_matrix, "M x M matrix, entry (j,i) = D(P_j || P_i): inline JSON or file");
    mary->add_option("--m", opt_.m, "Number of hypotheses (with --delta: uniform KL matrix)");
    mary->add_option("--delta", opt_.delta, "Uniform bound on pairwise KL");
    mary->add_option("--hypotheses", opt_.hypotheses_dir, "Directory of distribution specs");
    mary->add_option("--alphas", opt_.alphas_list, "Comma-separated per-hypothesis errors (a-posteriori norms)");

    auto add_pair = [&](CLI::App* sub) {
      sub->add_option("--p0", opt_.p0_path, "H0 distribution spec (JSON)")->required();
      sub->add_option("--p1", opt_.p1_path, "H1 distribution spec (JSON)")->required();
      sub->add_option("--n", opt_.n, "Sample size")->required();
      sub->add_option("--c", opt_.c, "Threshold in nats per sample")->default_val(0.0);
    };
    auto* exact = app.add_subcommand("exact", "Exact alpha, beta of the likelihood-ratio test");
    add_pair(exact);
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo alpha, beta of the likelihood-ratio test");
    add_pair(simulate);
    simulate->add_option("--trials", opt_.trials, "Trials per hypothesis")->check(CLI::PositiveNumber);

    auto* mtest = app.add_subcommand("mary", "Confusion matrix of the maximum-likelihood M-ary test");
    mtest->add_option("--hypotheses", opt_.hypotheses_dir, "Directory of distribution specs")->required();
    mtest->add_option("--n", opt_.n, "Sample size")->required();
    mtest->add_option("--trials", opt_.trials, "Trials per hypothesis")->check(CLI::PositiveNumber);
    mtest->add_flag("--exact", opt_.exact, "Enumerate instead of simulating");
    mtest->add_option("--delta", opt_.delta, "Uniform bound on pairwise KL (default: observed max)");

    auto* compare = app.add_subcommand("compare", "Sub-Gaussian vs Fano dominance over (M, n)");
    compare->add_option("--delta", opt_.delta, "Uniform bound on pairwise KL")->required();
    compare->add_option("--m-range", opt_.m_range, "start:stop[:step] over M (default 3:50)");
    compare->add_option("--n-range", opt_.n_range, "start:stop[:step] over n (default 1:100)");

    try {
      app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e, out_, err_);
      return code == 0 ? kOk : kValidation;
    }

    try {
      std::string text;
      if (*norm) text = cmd_norm();
      else if (*table) text = cmd_norm_table();
      else if (*binary) text = cmd_bound_binary();
      else if (*mary) text = cmd_bound_mary();
      else if (*exact) text = cmd_exact();
      else if (*simulate) text = cmd_simulate();
      else if (*mtest) text = cmd_mary();
      else if (*compare) text = cmd_compare();
      emit(text);
      return kOk;
    } catch (const solver_failure& e) {
      err_ << "error: " << e.what() << '\n';
      return kNumerical;
    } catch (const domain_error& e) {
      err_ << "error: " << e.what() << '\n';
      return kValidation;
    }
  }

 private:
  std::string format_or(const char* fallback) const {
    return opt_.format.empty() ? fallback : opt_.format;
  }

  void require_json(const char* command) const {
    if (format_or("json") != "json")
      throw domain_error(std::string(command) + " only supports --format json");
  }

  static std::string dump(const json& j) { return j.dump(2) + "\n"; }

  void emit(const std::string& text) {
    if (opt_.out_path.empty()) {
      out_ << text;
      return;
    }
    std::ofstream f(opt_.out_path, std::ios::binary);
    if (!f) throw domain_error("cannot write " + opt_.out_path);
    f << text;
  }

  std::string cmd_norm() {
    const auto fit = subgauss::solve_norm(opt_.alpha, opt_.tol);
    if (format_or("json") == "csv") return "alpha,sigma,s_star\n" + csv_row(fit);
    json j = io::to_json(fit);
    j["config"] = {{"command", "norm"}, {"alpha", opt_.alpha}, {"tol", opt_.tol}};
    return dump(j);
  }

  static std::string csv_row(const SubGaussFit& f) {
    return io::format_number(f.alpha) + "," + io::format_number(f.sigma) + "," +
           io::format_number(f.s_star) + "\n";
  }

  std::string cmd_norm_table() {
    const auto alphas = expand(parse_range(opt_.alphas_range, "--alphas"));
    const auto fits = subgauss::norm_table(alphas, opt_.tol);
    if (format_or("csv") == "csv") {
      std::string text = "alpha,sigma,s_star\n";
      for (const auto& f : fits) text += csv_row(f);
      return text;
    }
    json rows = json::array();
    for (const auto& f : fits) rows.push_back(io::to_json(f));
    return dump({{"config", {{"command", "norm-table"}, {"alphas", opt_.alphas_range}, {"tol", opt_.tol}}},
                 {"rows", rows}});
  }

  std::string cmd_bound_binary() {
    require_json("bound binary");
    json config = {{"command", "bound binary"}, {"alpha", opt_.alpha}, {"n", opt_.n}};
    double kl10 = 0.0;
    std::optional<double> kl01 = opt_.kl01;
    const bool have_files = !opt_.p0_path.empty() || !opt_.p1_path.empty();
    if (have_files) {
      if (opt_.kl) throw domain_error("give either --kl or --p0/--p1, not both");
      if (opt_.p0_path.empty() || opt_.p1_path.empty())
        throw domain_error("--p0 and --p1 must be given together");
      const auto p0 = io::load_distribution(opt_.p0_path);
      const auto p1 = io::load_distribution(opt_.p1_path);
      kl10 = hyptest::kl(p1, p0);
      kl01 = hyptest::kl(p0, p1);
      config["p0"] = io::to_json(p0);
      config["p1"] = io::to_json(p1);
    } else {
      if (!opt_.kl) throw domain_error("one of --kl or --p0/--p1 is required");
      kl10 = *opt_.kl;
      config["kl"] = io::number(kl10);
      if (kl01) config["kl01"] = io::number(*kl01);
    }
    auto report = bounds::subgauss_binary(opt_.alpha, opt_.n, kl10);
    report.kl_01 = kl01;
    if (kl01) {
      report.implicit_beta_floor =
          bounds::subgauss_binary_symmetric(opt_.alpha, opt_.n, *kl01, opt_.resolution);
      config["resolution"] = opt_.resolution;
    }
    json j = io::to_json(report);
    j["config"] = config;
    return dump(j);
  }

  std::string cmd_bound_mary() {
    require_json("bound mary");
    json config = {{"command", "bound mary"}, {"n", opt_.n}};
    Matrix kl;
    const int sources = (!opt_.kl_matrix.empty()) + (!opt_.hypotheses_dir.empty()) + opt_.m.has_value();
    if (sources != 1) throw domain_error("give exactly one of --kl-matrix, --hypotheses, or --m with --delta");
    if (!opt_.kl_matrix.empty()) {
      kl = parse_matrix(opt_.kl_matrix);
      config["kl_matrix"] = io::numbers(kl);
    } else if (!opt_.hypotheses_dir.empty()) {
      const auto hyps = io::load_hypotheses(opt_.hypotheses_dir);
      if (hyps.size() < 2) throw domain_error("--hypotheses needs at least two specs");
      kl = bounds::kl_matrix(hyps);
      json hj = json::array();
      for (const auto& h : hyps) hj.push_back(io::to_json(h));
      config["hypotheses"] = hj;
    } else {
      if (!opt_.delta) throw domain_error("--m requires --delta");
      if (*opt_.m < 2) throw domain_error("--m must be at least 2");
      kl.assign(*opt_.m, std::vector<double>(*opt_.m, *opt_.delta));
      for (int i = 0; i < *opt_.m; ++i) kl[i][i] = 0.0;
      config["m"] = *opt_.m;
    }
    if (opt_.delta) config["delta"] = *opt_.delta;
    std::optional<std::vector<double>> alphas;
    if (!opt_.alphas_list.empty()) {
      alphas = parse_list(opt_.alphas_list, "--alphas");
      config["alphas"] = *alphas;
    }
    json j = io::to_json(bounds::mary_bounds(kl, opt_.n, alphas, opt_.delta));
    j["config"] = config;
    return dump(j);
  }

  struct Pair {
    Distribution p0;
    Distribution p1;
    BinaryTestConfig cfg;
    json config;
  };

  Pair load_pair(const char* command) const {
    Pair p{io::load_distribution(opt_.p0_path), io::load_distribution(opt_.p1_path),
           BinaryTestConfig{opt_.c, opt_.n}, json::object()};
    p.cfg.validate();
    p.config = {{"command", command},
                {"p0", io::to_json(p.p0)},
                {"p1", io::to_json(p.p1)},
                {"n", opt_.n},
                {"c", opt_.c},
                {"c_prime", io::number(p.cfg.c_prime())}};
    return p;
  }

  std::string binary_report(const Pair& p, const ErrorRates& rates, json config) const {
    auto report = bounds::subgauss_binary(rates.alpha, p.cfg.n, hyptest::kl(p.p1, p.p0));
    report.kl_01 = hyptest::kl(p.p0, p.p1);
    report.implicit_beta_floor =
        bounds::subgauss_binary_symmetric(rates.alpha, p.cfg.n, *report.kl_01, opt_.resolution);
    const auto validity = testing::verify_bounds(rates, report);
    return dump({{"config", config},
                 {"rates", io::to_json(rates)},
                 {"bounds", io::to_json(report)},
                 {"validity", io::to_json(validity)}});
  }

  std::string cmd_exact() {
    require_json("exact");
    const auto p = load_pair("exact");
    return binary_report(p, testing::exact_binary(p.p0, p.p1, p.cfg), p.config);
  }

  std::string cmd_simulate() {
    require_json("simulate");
    const auto p = load_pair("simulate");
    json config = p.config;
    config["trials"] = opt_.trials;
    config["seed"] = opt_.seed;
    const auto rates = testing::simulate_binary(p.p0, p.p1, p.cfg, opt_.trials, opt_.seed, opt_.jobs);
    return binary_report(p, rates, config);
  }

  std::string cmd_mary() {
    require_json("mary");
    const auto hyps = io::load_hypotheses(opt_.hypotheses_dir);
    if (hyps.size() < 2) throw domain_error("--hypotheses needs at least two specs");
    json hj = json::array();
    for (const auto& h : hyps) hj.push_back(io::to_json(h));
    json config = {{"command", "mary"}, {"hypotheses", hj}, {"n", opt_.n},
                   {"mode", opt_.exact ? "exact" : "monte-carlo"}};
    if (!opt_.exact) {
      config["trials"] = opt_.trials;
      config["seed"] = opt_.seed;
    }
    if (opt_.delta) config["delta"] = *opt_.delta;
    const auto cm = opt_.exact
                        ? testing::confusion_matrix_exact(hyps, opt_.n)
                        : testing::confusion_matrix_mc(hyps, opt_.n, opt_.trials, opt_.seed, opt_.jobs);
    const auto report = bounds::mary_bounds(bounds::kl_matrix(hyps), opt_.n, std::nullopt, opt_.delta);
    const auto validity = testing::verify_bounds(cm, report);
    return dump({{"config", config},
                 {"confusion", io::to_json(cm)},
                 {"bounds", io::to_json(report)},
                 {"validity", io::to_json(validity)}});
  }

  std::string cmd_compare() {
    const auto ms = expand_int(opt_.m_range, "--m-range");
    const auto ns = expand_int(opt_.n_range, "--n-range");
    const auto cells = bounds::dominance_map(ms, ns, *opt_.delta);
    if (format_or("csv") == "csv") {
      std::string text = "M,n,subgauss,fano,winner\n";
      for (const auto& c : cells)
        text += std::to_string(c.m) + "," + std::to_string(c.n) + "," + io::format_number(c.subgauss) +
                "," + (c.fano ? io::format_number(*c.fano) : std::string("NA")) + "," +
                bounds::to_string(c.winner) + "\n";
      return text;
    }
    json rows = json::array();
    for (const auto& c : cells)
      rows.push_back({{"m", c.m},
                      {"n", c.n},
                      {"subgauss", io::number(c.subgauss)},
                      {"fano", c.fano ? io::number(*c.fano) : json("not applicable")},
                      {"winner", bounds::to_string(c.winner)}});
    return dump({{"config",
                  {{"command", "compare"}, {"delta", *opt_.delta}, {"m_range", opt_.m_range},
                   {"n_range", opt_.n_range}}},
                 {"rows", rows}});
  }

  std::ostream& out_;
  std::ostream& err_;
  Options opt_;
};

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  return Runner(out, err).run(argc, argv);
}

}  // namespace hyptest::cli

#endif  // HYPTEST_TOOLS_CLI_HPP
