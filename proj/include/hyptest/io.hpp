#ifndef HYPTEST_IO_HPP
#define HYPTEST_IO_HPP

// JSON encoding of distribution specs and reports (nlohmann/json).
//
// Distribution specs:
//   {"type":"bernoulli","p":0.6}
//   {"type":"categorical","probs":[0.2,0.3,0.5]}
//   {"type":"gaussian","mean":0.0,"std":1.0}
//
// Non-finite numbers are written as the strings "inf", "-inf" and "nan".

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "json.hpp"

#include "hyptest/bounds.hpp"
#include "hyptest/distributions.hpp"
#include "hyptest/errors.hpp"
#include "hyptest/subgauss.hpp"
#include "hyptest/testing.hpp"

namespace hyptest::io {

using json = nlohmann::ordered_json;

inline json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

inline json numbers(const std::vector<double>& v) {
  json out = json::array();
  for (double x : v) out.push_back(number(x));
  return out;
}

inline json numbers(const Matrix& m) {
  json out = json::array();
  for (const auto& row : m) out.push_back(numbers(row));
  return out;
}

/// Locale-independent shortest representation with 12 significant digits.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
  return std::string(buf, res.ptr);
}

namespace detail {

inline double get_number(const json& j, const char* key) {
  if (!j.contains(key)) throw domain_error(std::string("distribution spec: missing \"") + key + "\"");
  const auto& v = j.at(key);
  if (!v.is_number()) throw domain_error(std::string("distribution spec: \"") + key + "\" must be a number");
  return v.get<double>();
}

}  // namespace detail

inline Distribution distribution_from_json(const json& j) {
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string())
    throw domain_error("distribution spec must be an object with a string \"type\"");
  const auto type = j.at("type").get<std::string>();
  if (type == "bernoulli") return Distribution::bernoulli(detail::get_number(j, "p"));
  if (type == "gaussian")
    return Distribution::gaussian(detail::get_number(j, "mean"), detail::get_number(j, "std"));
  if (type == "categorical") {
    if (!j.contains("probs") || !j.at("probs").is_array())
      throw domain_error("distribution spec: categorical needs a \"probs\" array");
    std::vector<double> probs;
    for (const auto& p : j.at("probs")) {
      if (!p.is_number()) throw domain_error("distribution spec: probs must be numbers");
      probs.push_back(p.get<double>());
    }
    return Distribution::categorical(std::move(probs));
  }
  throw domain_error("distribution spec: unknown type \"" + type + "\"");
}

inline json to_json(const Distribution& d) {
  if (d.is_bernoulli()) return {{"type", "bernoulli"}, {"p", d.as_categorical().probs[1]}};
  if (d.is_discrete()) return {{"type", "categorical"}, {"probs", d.as_categorical().probs}};
  const auto& g = d.as_gaussian();
  return {{"type", "gaussian"}, {"mean", g.mean}, {"std", g.std}};
}

inline json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw domain_error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw domain_error(path.string() + ": " + e.what());
  }
}

inline Distribution load_distribution(const std::filesystem::path& path) {
  try {
    return distribution_from_json(read_json_file(path));
  } catch (const domain_error& e) {
    throw domain_error(path.string() + ": " + e.what());
  }
}

/// All *.json specs in a directory, ordered by file name.
inline std::vector<Distribution> load_hypotheses(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) throw domain_error("not a directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::vector<Distribution> out;
  for (const auto& f : files) out.push_back(load_distribution(f));
  return out;
}

inline json to_json(const SubGaussFit& f) {
  return {{"alpha", number(f.alpha)},
          {"sigma", number(f.sigma)},
          {"s_star", number(f.s_star)},
          {"residual", number(f.residual)},
          {"iterations", f.iterations}};
}

inline json to_json(const BinaryBoundReport& r) {
  json out = {{"alpha", number(r.alpha)},
              {"n", r.n},
              {"kl_10", number(r.kl_10)},
              {"kl_01", r.kl_01 ? number(*r.kl_01) : json(nullptr)},
              {"pinsker", number(r.pinsker)},
              {"subgauss", number(r.subgauss)},
              {"beta_floor", number(r.beta_floor)},
              {"sigma_used", number(r.sigma_used)}};
  out["implicit_beta_floor"] = r.implicit_beta_floor ? number(*r.implicit_beta_floor) : json(nullptr);
  return out;
}

inline json to_json(const MaryBoundReport& r) {
  return {{"m", r.m},
          {"n", r.n},
          {"kl_matrix", numbers(r.kl_matrix)},
          {"a_posteriori", r.a_posteriori},
          {"sigmas", numbers(r.sigmas)},
          {"per_reference", numbers(r.per_reference)},
          {"per_reference_max", number(r.per_reference_max)},
          {"mean_sqrt", number(r.mean_sqrt)},
          {"delta", number(r.delta)},
          {"uniform_delta", number(r.uniform_delta)},
          {"fano", r.fano ? number(*r.fano) : json("not applicable")}};
}

inline json to_json(const ErrorRates& r) {
  return {{"alpha", number(r.alpha)},
          {"beta", number(r.beta)},
          {"mode", to_string(r.mode)},
          {"trials", r.trials},
          {"half_width_alpha", number(r.half_width_alpha)},
          {"half_width_beta", number(r.half_width_beta)}};
}

inline json to_json(const ConfusionMatrix& cm) {
  return {{"mode", to_string(cm.mode)},
          {"trials", cm.trials},
          {"entries", numbers(cm.entries)},
          {"tie_count", cm.tie_count},
          {"tie_mass", numbers(cm.tie_mass)},
          {"alphas", numbers(cm.alphas)},
          {"alpha_max", number(cm.alpha_max)},
          {"half_widths", numbers(cm.half_widths)},
          {"half_width_max", number(cm.half_width_max)}};
}

inline json to_json(const testing::BinaryValidity& v) {
  return {{"error_sum", number(v.error_sum)},
          {"mean_gap", number(v.mean_gap)},
          {"gap_limit", number(v.gap_limit)},
          {"slack", number(v.slack)},
          {"subgauss_holds", v.subgauss_holds},
          {"pinsker_holds", v.pinsker_holds},
          {"gap_holds", v.gap_holds},
          {"subgauss_dominates_pinsker", v.subgauss_dominates_pinsker},
          {"symmetric_holds", v.symmetric_holds ? json(*v.symmetric_holds) : json(nullptr)},
          {"all", v.all()}};
}

inline json to_json(const testing::MaryValidity& v) {
  return {{"alpha_max", number(v.alpha_max)},
          {"slack", number(v.slack)},
          {"rows_sum_to_one", v.rows_sum_to_one},
          {"per_reference_holds", v.per_reference_holds},
          {"per_reference_a_posteriori_holds", v.per_reference_a_posteriori_holds},
          {"per_reference_a_posteriori", numbers(v.a_posteriori.per_reference)},
          {"mean_sqrt_holds", v.mean_sqrt_holds},
          {"uniform_delta_holds", v.uniform_delta_holds},
          {"fano_holds", v.fano_holds ? json(*v.fano_holds) : json("not applicable")},
          {"all", v.all()}};
}

}  // namespace hyptest::io

#endif  // HYPTEST_IO_HPP
