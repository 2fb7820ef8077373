// Test-only reference computations. Nothing here calls into the solver or
// enumeration code it is used to check.

#ifndef HYPTEST_TESTS_ORACLES_HPP
#define HYPTEST_TESTS_ORACLES_HPP

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace oracle {

// Centered log-MGF of Bernoulli(a) via the e^s form.
inline double log_mgf(double a, double s) { return -s * a + std::log1p(a * std::expm1(s)); }

// max over s in (0, s_max] on a uniform grid of sqrt(2 f(s) / s^2).
inline double grid_norm(double a, double s_max = 200.0, double step = 1e-4) {
  double best = 0.0;
  const auto count = static_cast<long>(std::llround(s_max / step));
  for (long i = 1; i <= count; ++i) {
    const double s = static_cast<double>(i) * step;
    const double v = 2.0 * log_mgf(a, s) / (s * s);
    if (v > best) best = v;
  }
  return std::sqrt(best);
}

// Optimal variance proxy of a Bernoulli: (1 - 2a) / (2 ln((1 - a) / a)).
inline double closed_form_norm(double a) {
  if (a <= 0.0 || a >= 1.0) return 0.0;
  if (a == 0.5) return 0.5;
  return std::sqrt((1.0 - 2.0 * a) / (2.0 * std::log((1.0 - a) / a)));
}

inline double binomial_pmf(int n, int k, double p) {
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c * std::pow(p, k) * std::pow(1.0 - p, n - k);
}

// P(Bin(n, p) >= k)
inline double binomial_upper(int n, int k, double p) {
  double total = 0.0;
  for (int j = k; j <= n; ++j) total += binomial_pmf(n, j, p);
  return total;
}

inline double normal_upper_tail(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

// Visits every raw sequence in {0..k-1}^n.
inline void for_each_sequence(std::size_t n, std::size_t k,
                              const std::function<void(const std::vector<std::size_t>&)>& fn) {
  std::vector<std::size_t> seq(n, 0);
  while (true) {
    fn(seq);
    std::size_t i = 0;
    while (i < n && ++seq[i] == k) seq[i++] = 0;
    if (i == n) return;
  }
}

inline double sequence_prob(const std::vector<std::size_t>& seq, const std::vector<double>& probs) {
  double p = 1.0;
  for (std::size_t v : seq) p *= probs[v];
  return p;
}

// Composite Simpson rule on [lo, hi] with an even number of panels.
inline double simpson(const std::function<double(double)>& f, double lo, double hi, int panels) {
  const double h = (hi - lo) / panels;
  double total = f(lo) + f(hi);
  for (int i = 1; i < panels; ++i) total += f(lo + i * h) * (i % 2 ? 4.0 : 2.0);
  return total * h / 3.0;
}

}  // namespace oracle

#endif  // HYPTEST_TESTS_ORACLES_HPP
