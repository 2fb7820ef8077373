#ifndef HYPTEST_SUBGAUSS_HPP
#define HYPTEST_SUBGAUSS_HPP

// Sub-Gaussian norm of a {0,1}-valued indicator with mean alpha.
//
// The centered log-MGF of Phi ~ Bernoulli(alpha) is
//
//   f(s) = ln(alpha e^{s(1-alpha)} + (1-alpha) e^{-s alpha})
//
// and the norm is the smallest sigma with f(s) <= sigma^2 s^2 / 2 for all s.
// For 0 < alpha < 1/2 the minimal sigma touches f at a single point s* > 0
// where f = sigma^2 s^2 / 2 and f' = sigma^2 s. Eliminating sigma gives the
// scalar tangency residual
//
//   r(s) = f(s) - (s/2) f'(s),
//
// which is negative just right of 0 (third cumulant > 0), tends to +inf, and
// has one sign change. Its root s* gives sigma^2 = f'(s*) / s*.

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "hyptest/errors.hpp"

namespace hyptest {

struct SubGaussFit {
  double alpha = 0.0;
  double sigma = 0.0;
  double s_star = 0.0;    // tangency point, 0 when alpha in {0, 0.5, 1}
  double residual = 0.0;  // |f(s*) - sigma^2 s*^2 / 2|
  int iterations = 0;
};

namespace subgauss {

inline constexpr double kDefaultTolerance = 1e-10;
inline constexpr double kBracketCap = 1e6;
inline constexpr double kTinyAlpha = 1e-12;

namespace detail {

inline void check_open_unit(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw domain_error("alpha must lie in the open interval (0, 1)");
}

// f for s >= 0. Near 0 the factorisation
//   f = ln cosh(s/2) + d s + ln(1 - 2 d tanh(s/2)),   d = 1/2 - a
// avoids the cancellation between s(1-a) and the log term.
inline double log_mgf_nonneg(double a, double s) {
  if (s <= 1.0) {
    const double d = 0.5 - a;
    const double sh = std::sinh(0.25 * s);
    return std::log1p(2.0 * sh * sh) + d * s + std::log1p(-2.0 * d * std::tanh(0.5 * s));
  }
  const double x = (1.0 - a) * std::expm1(-s);
  if (x > -0.5) return s * (1.0 - a) + std::log1p(x);
  return s * (1.0 - a) + std::log(a + (1.0 - a) * std::exp(-s));
}

// f' for s >= 0, with t = tanh(s/2) near 0 and e^{-s} further out.
inline double log_mgf_derivative_nonneg(double a, double s) {
  if (s <= 1.0) {
    const double d = 0.5 - a;
    const double t = std::tanh(0.5 * s);
    return 0.5 * t + d * t * (t - 2.0 * d) / (1.0 - 2.0 * d * t);
  }
  const double e = std::exp(-s);
  return a * (1.0 - a) * (1.0 - e) / (a + (1.0 - a) * e);
}

}  // namespace detail

/// Centered log-MGF f(s) of a Bernoulli(alpha) indicator. Overflow-safe.
inline double log_mgf_centered(double alpha, double s) {
  detail::check_open_unit(alpha);
  if (!std::isfinite(s)) throw domain_error("s must be finite");
  // f(s; a) = f(-s; 1 - a)
  return s >= 0.0 ? detail::log_mgf_nonneg(alpha, s) : detail::log_mgf_nonneg(1.0 - alpha, -s);
}

/// df/ds = -alpha + alpha e^s / (1 - alpha + alpha e^s). Overflow-safe.
inline double log_mgf_derivative(double alpha, double s) {
  detail::check_open_unit(alpha);
  if (!std::isfinite(s)) throw domain_error("s must be finite");
  return s >= 0.0 ? detail::log_mgf_derivative_nonneg(alpha, s)
                  : -detail::log_mgf_derivative_nonneg(1.0 - alpha, -s);
}

/// Tangency residual r(s) = f(s) - (s/2) f'(s).
inline double tangency_residual(double alpha, double s) {
  return log_mgf_centered(alpha, s) - 0.5 * s * log_mgf_derivative(alpha, s);
}

/// sigma_Phi(alpha), the sub-Gaussian norm of an indicator with mean alpha.
///
/// alpha in {0, 1} (and anything within 1e-12 of them) yields sigma = 0;
/// alpha = 0.5 yields exactly 0.5; alpha > 0.5 is solved as 1 - alpha.
/// Otherwise the tangency point is bracketed by doubling from s = 1 and
/// refined by bisection until |r| <= tol and the bracket cannot shrink further.
inline SubGaussFit solve_norm(double alpha, double tol = kDefaultTolerance) {
  if (!(tol > 0.0)) throw domain_error("tolerance must be positive");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw domain_error("alpha must lie in [0, 1]");

  SubGaussFit fit;
  fit.alpha = alpha;
  if (alpha < kTinyAlpha || alpha > 1.0 - kTinyAlpha) return fit;
  if (alpha == 0.5) {
    fit.sigma = 0.5;
    return fit;
  }
  if (alpha > 0.5) {
    fit = solve_norm(1.0 - alpha, tol);
    fit.alpha = alpha;
    return fit;
  }

  double lo = 0.0;
  double hi = 1.0;
  while (tangency_residual(alpha, hi) <= 0.0) {
    lo = hi;
    hi *= 2.0;
    ++fit.iterations;
    if (hi > kBracketCap)
      throw solver_failure("solve_norm: tangency point not bracketed below s = 1e6 for alpha = " +
                           std::to_string(alpha));
  }

  double mid = 0.5 * (lo + hi);
  for (int i = 0; i < 2000; ++i) {
    mid = 0.5 * (lo + hi);
    ++fit.iterations;
    if (mid <= lo || mid >= hi) break;
    const double r = tangency_residual(alpha, mid);
    if (r == 0.0) break;
    if (r < 0.0) lo = mid;
    else hi = mid;
  }
  const double s = mid;
  if (!(s > 0.0)) throw solver_failure("solve_norm: bisection collapsed onto s = 0");
  const double variance = log_mgf_derivative(alpha, s) / s;
  fit.s_star = s;
  fit.sigma = std::sqrt(variance);
  fit.residual = std::abs(log_mgf_centered(alpha, s) - 0.5 * variance * s * s);
  if (fit.residual > tol)
    throw solver_failure("solve_norm: residual above tolerance for alpha = " +
                         std::to_string(alpha));
  return fit;
}

/// Element-wise solve_norm over alphas in (0, 1), results in input order.
inline std::vector<SubGaussFit> norm_table(const std::vector<double>& alphas,
                                           double tol = kDefaultTolerance) {
  std::vector<SubGaussFit> out;
  out.reserve(alphas.size());
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    const double a = alphas[i];
    if (!(a > 0.0 && a < 1.0))
      throw domain_error("norm_table: alpha at index " + std::to_string(i) +
                         " must lie in (0, 1)");
    try {
      out.push_back(solve_norm(a, tol));
    } catch (const solver_failure& e) {
      throw solver_failure("norm_table: index " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace subgauss
}  // namespace hyptest

#endif  // HYPTEST_SUBGAUSS_HPP
