#ifndef HYPTEST_BOUNDS_HPP
#define HYPTEST_BOUNDS_HPP

// Lower bounds on testing errors in terms of KL divergences.
//
// Bound values are returned raw: a negative value is a valid (if
// uninformative) lower bound and is never clamped away. Types that carry a
// clamped companion field say so explicitly.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "hyptest/distributions.hpp"
#include "hyptest/errors.hpp"
#include "hyptest/subgauss.hpp"

namespace hyptest {

using Matrix = std::vector<std::vector<double>>;

struct BinaryBoundReport {
  double alpha = 0.0;
  int n = 1;
  double kl_10 = 0.0;  // D(P1 || P0)
  std::optional<double> kl_01;  // D(P0 || P1), when known
  double pinsker = 1.0;
  double subgauss = 1.0;
  double beta_floor = 1.0;  // clamp(subgauss - alpha, 0, 1)
  double sigma_used = 0.0;
  std::optional<double> implicit_beta_floor;  // symmetric form, needs kl_01
};

struct MaryBoundReport {
  int m = 2;
  int n = 1;
  Matrix kl_matrix;                   // (j, i) = D(P_j || P_i)
  std::vector<double> per_reference;  // bound using hypothesis j as reference
  double per_reference_max = 0.0;
  std::vector<double> sigmas;         // sigma_i used in per_reference
  bool a_posteriori = false;          // sigmas from supplied alphas, else 0.5
  double mean_sqrt = 0.0;
  double delta = 0.0;
  double uniform_delta = 0.0;
  std::optional<double> fano;         // empty when M = 2
};

namespace bounds {

namespace detail {

inline void check_n(int n) {
  if (n < 1) throw domain_error("sample size n must be at least 1");
}

inline void check_kl(double kl, const char* what) {
  if (std::isnan(kl) || kl < 0.0) throw domain_error(std::string(what) + " must be nonnegative");
}

inline double root(double c, double kl) { return std::sqrt(c * kl); }

}  // namespace detail

/// alpha + beta >= 1 - sqrt(n kl_10 / 2). -inf when kl_10 is infinite.
inline double pinsker_binary(int n, double kl_10) {
  detail::check_n(n);
  detail::check_kl(kl_10, "kl_10");
  return 1.0 - detail::root(0.5 * n, kl_10);
}

/// Admissible mean gap sigma * sqrt(2 n kl).
inline double gap_bound(double sigma, double kl, int n) {
  detail::check_n(n);
  detail::check_kl(kl, "kl");
  if (std::isnan(sigma) || sigma < 0.0) throw domain_error("sigma must be nonnegative");
  if (sigma == 0.0) return 0.0;
  return sigma * detail::root(2.0 * n, kl);
}

/// Sub-Gaussian binary bound alpha + beta >= 1 - sigma(alpha) sqrt(2 n kl_10).
inline BinaryBoundReport subgauss_binary(double alpha, int n, double kl_10) {
  detail::check_n(n);
  detail::check_kl(kl_10, "kl_10");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw domain_error("alpha must lie in [0, 1]");

  BinaryBoundReport r;
  r.alpha = alpha;
  r.n = n;
  r.kl_10 = kl_10;
  r.pinsker = pinsker_binary(n, kl_10);
  r.sigma_used = subgauss::solve_norm(alpha).sigma;
  r.subgauss = 1.0 - gap_bound(r.sigma_used, kl_10, n);
  r.beta_floor = std::clamp(r.subgauss - alpha, 0.0, 1.0);
  return r;
}

/// Implicit beta floor from alpha + beta >= 1 - sigma(beta) sqrt(2 n kl_01).
///
/// Scans beta = 0, resolution, 2 resolution, ..., 1 and returns the first grid
/// point satisfying the inequality (to within 1e-12). Returns 0 when beta = 0
/// already qualifies.
inline double subgauss_binary_symmetric(double alpha, int n, double kl_01,
                                        double resolution = 1e-4) {
  detail::check_n(n);
  detail::check_kl(kl_01, "kl_01");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw domain_error("alpha must lie in [0, 1]");
  if (!(resolution > 0.0 && resolution <= 1.0)) throw domain_error("resolution must lie in (0, 1]");

  const auto steps = static_cast<long>(std::ceil(1.0 / resolution - 1e-9));
  for (long i = 0; i <= steps; ++i) {
    const double beta = std::min(1.0, static_cast<double>(i) * resolution);
    const double rhs = 1.0 - gap_bound(subgauss::solve_norm(beta).sigma, kl_01, n);
    if (alpha + beta >= rhs - 1e-12) return beta;
  }
  return 1.0;
}

inline void check_kl_matrix(const Matrix& kl) {
  const std::size_t m = kl.size();
  if (m < 2) throw domain_error("kl matrix must be at least 2x2");
  for (std::size_t j = 0; j < m; ++j) {
    if (kl[j].size() != m) throw domain_error("kl matrix must be square");
    for (std::size_t i = 0; i < m; ++i) {
      detail::check_kl(kl[j][i], "kl matrix entries");
      if (i == j && kl[j][i] != 0.0) throw domain_error("kl matrix diagonal must be zero");
    }
  }
}

/// Pairwise D(P_j || P_i) for a list of hypotheses.
inline Matrix kl_matrix(const std::vector<Distribution>& hypotheses) {
  Matrix out(hypotheses.size(), std::vector<double>(hypotheses.size(), 0.0));
  for (std::size_t j = 0; j < hypotheses.size(); ++j)
    for (std::size_t i = 0; i < hypotheses.size(); ++i)
      if (i != j) out[j][i] = kl(hypotheses[j], hypotheses[i]);
  return out;
}

/// 1 - 1/M - sqrt(n delta / 2)
inline double uniform_delta_bound(int m, int n, double delta) {
  return 1.0 - 1.0 / m - detail::root(0.5 * n, delta);
}

/// 1 - (n delta + ln 2) / ln(M - 1); empty for M = 2.
inline std::optional<double> fano_bound(int m, int n, double delta) {
  if (m <= 2) return std::nullopt;
  return 1.0 - (n * delta + std::log(2.0)) / std::log(static_cast<double>(m - 1));
}

/// All M-ary lower bounds on alpha_max.
///
/// `alphas` switches the per-hypothesis norms from the universal 0.5 to
/// sigma(alpha_i). `delta_override` replaces the observed max pairwise KL by a
/// caller-supplied uniform bound, which must dominate every entry.
inline MaryBoundReport mary_bounds(const Matrix& kl, int n,
                                   const std::optional<std::vector<double>>& alphas = std::nullopt,
                                   std::optional<double> delta_override = std::nullopt) {
  detail::check_n(n);
  check_kl_matrix(kl);
  const auto m = static_cast<int>(kl.size());
  if (alphas && alphas->size() != kl.size())
    throw domain_error("alphas must have one entry per hypothesis");

  MaryBoundReport r;
  r.m = m;
  r.n = n;
  r.kl_matrix = kl;
  r.a_posteriori = alphas.has_value();
  r.sigmas.assign(m, 0.5);
  if (alphas) {
    for (int i = 0; i < m; ++i) {
      const double a = (*alphas)[i];
      if (!(a >= 0.0 && a <= 1.0)) throw domain_error("alphas must lie in [0, 1]");
      r.sigmas[i] = subgauss::solve_norm(a).sigma;
    }
  }

  const double base = 1.0 - 1.0 / m;
  double total_sqrt = 0.0;
  r.per_reference.resize(m);
  for (int j = 0; j < m; ++j) {
    double sum = 0.0;
    for (int i = 0; i < m; ++i) {
      sum += gap_bound(r.sigmas[i], kl[j][i], n);
      total_sqrt += detail::root(0.5 * n, kl[j][i]);
      if (i != j) r.delta = std::max(r.delta, kl[j][i]);
    }
    r.per_reference[j] = base - sum / m;
  }
  r.per_reference_max = *std::max_element(r.per_reference.begin(), r.per_reference.end());
  r.mean_sqrt = base - total_sqrt / (static_cast<double>(m) * m);

  if (delta_override) {
    detail::check_kl(*delta_override, "delta");
    if (*delta_override < r.delta)
      throw domain_error("delta must bound every pairwise KL divergence");
    r.delta = *delta_override;
  }
  r.uniform_delta = uniform_delta_bound(m, n, r.delta);
  r.fano = fano_bound(m, n, r.delta);
  return r;
}

enum class Winner { subgauss, fano, tie };

inline const char* to_string(Winner w) {
  switch (w) {
    case Winner::subgauss: return "subgauss";
    case Winner::fano: return "fano";
    case Winner::tie: return "tie";
  }
  return "?";
}

struct DominanceCell {
  int m = 0;
  int n = 0;
  double subgauss = 0.0;
  std::optional<double> fano;
  Winner winner = Winner::tie;
};

/// Compares the uniform-delta sub-Gaussian bound with Fano on an (M, n) grid.
/// Rows are ordered M-major. Where Fano does not apply (M = 2) the
/// sub-Gaussian bound wins by default.
inline std::vector<DominanceCell> dominance_map(const std::vector<int>& m_values,
                                                const std::vector<int>& n_values,
                                                double delta) {
  detail::check_kl(delta, "delta");
  std::vector<DominanceCell> out;
  out.reserve(m_values.size() * n_values.size());
  for (int m : m_values) {
    if (m < 2) throw domain_error("M must be at least 2");
    for (int n : n_values) {
      detail::check_n(n);
      DominanceCell c;
      c.m = m;
      c.n = n;
      c.subgauss = uniform_delta_bound(m, n, delta);
      c.fano = fano_bound(m, n, delta);
      if (!c.fano || c.subgauss > *c.fano) c.winner = Winner::subgauss;
      else if (*c.fano > c.subgauss) c.winner = Winner::fano;
      else c.winner = Winner::tie;
      out.push_back(c);
    }
  }
  return out;
}

}  // namespace bounds
}  // namespace hyptest

#endif  // HYPTEST_BOUNDS_HPP
