#ifndef HYPTEST_TESTING_HPP
#define HYPTEST_TESTING_HPP

// Likelihood-based test functions and their error rates.
//
// Binary: Phi = 1 (reject H0) iff the average log-likelihood ratio
// (1/n) sum ln p1(x_i)/p0(x_i) is strictly greater than c. A statistic equal
// to c accepts H0.
//
// M-ary: choose argmax_i sum_k ln p_i(x_k); ties go to the lowest index and
// are counted.
//
// Categorical data is reduced to its count vector before any likelihood is
// evaluated, so exact enumeration and Monte Carlo share one code path and
// agree bit-for-bit on every realised sample.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "hyptest/bounds.hpp"
#include "hyptest/distributions.hpp"
#include "hyptest/errors.hpp"
#include "hyptest/random.hpp"
#include "hyptest/subgauss.hpp"

namespace hyptest {

struct BinaryTestConfig {
  double c = 0.0;  // threshold, nats per sample
  int n = 1;

  void validate() const {
    if (!(c >= 0.0) || std::isnan(c)) throw domain_error("threshold c must be nonnegative");
    if (n < 1) throw domain_error("sample size n must be at least 1");
  }
  /// Threshold on the raw likelihood ratio, e^{c n}.
  double c_prime() const { return std::exp(c * n); }
};

enum class Mode { exact, monte_carlo };

inline const char* to_string(Mode m) { return m == Mode::exact ? "exact" : "monte-carlo"; }

struct ErrorRates {
  double alpha = 0.0;
  double beta = 0.0;
  Mode mode = Mode::exact;
  std::int64_t trials = 0;
  double half_width_alpha = 0.0;  // 95% interval, 0 for exact
  double half_width_beta = 0.0;
};

/// Multinomial sufficient statistic of a categorical sample.
struct EmpiricalCounts {
  std::vector<std::size_t> counts;

  std::size_t total() const { return std::accumulate(counts.begin(), counts.end(), std::size_t{0}); }

  static EmpiricalCounts from_sample(const Sample& x, std::size_t alphabet) {
    EmpiricalCounts out{std::vector<std::size_t>(alphabet, 0)};
    for (std::size_t v : x.categories()) {
      if (v >= alphabet) throw support_error("observation outside the alphabet");
      ++out.counts[v];
    }
    return out;
  }
};

struct ConfusionMatrix {
  Matrix entries;                       // (i, j) = P_i(decide j)
  std::vector<std::int64_t> tie_count;  // per row: tied trials, or tied states for exact
  std::vector<double> tie_mass;         // per row: probability of a tie
  Mode mode = Mode::exact;
  std::int64_t trials = 0;
  std::vector<double> alphas;           // 1 - entries(i, i)
  double alpha_max = 0.0;
  std::vector<double> half_widths;      // per alpha_i, 0 for exact
  double half_width_max = 0.0;          // half width of the row attaining alpha_max
};

struct Decision {
  std::size_t index = 0;
  bool tie = false;
};

namespace testing {

inline constexpr double kMaxExactStates = 2e6;
inline constexpr std::int64_t kChunkSize = 4096;

/// 95% normal-approximation half-width, floored at 1.96 / trials.
inline double half_width(double p, std::int64_t trials) {
  const auto t = static_cast<double>(trials);
  return std::max(1.96 * std::sqrt(p * (1.0 - p) / t), 1.96 / t);
}

namespace detail {

inline void check_pair(const Distribution& p0, const Distribution& p1) {
  if (p0.is_discrete() != p1.is_discrete())
    throw unsupported_error("hypotheses belong to different families");
  if (p0.alphabet_size() != p1.alphabet_size())
    throw unsupported_error("hypotheses have different alphabet sizes");
}

inline void check_family(const std::vector<Distribution>& hyps) {
  if (hyps.size() < 2) throw domain_error("need at least two hypotheses");
  for (const auto& h : hyps) check_pair(hyps.front(), h);
}

inline std::vector<double> log_probs(const Distribution& d) {
  std::vector<double> out(d.alphabet_size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = log_density(d, k);
  return out;
}

// sum_k c_k l_k with 0 * (-inf) = 0.
inline double count_loglik(const std::vector<std::size_t>& counts, const std::vector<double>& logp) {
  double total = 0.0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] == 0) continue;
    if (logp[k] == -kInf) return -kInf;
    total += static_cast<double>(counts[k]) * logp[k];
  }
  return total;
}

// Average log-likelihood ratio from per-hypothesis log-likelihood totals.
inline double ratio_from_logliks(double ll0, double ll1, std::size_t n) {
  if (ll0 == -kInf && ll1 == -kInf)
    throw support_error("sample has zero likelihood under both hypotheses");
  if (ll0 == -kInf) return kInf;
  if (ll1 == -kInf) return -kInf;
  return (ll1 - ll0) / static_cast<double>(n);
}

// Per-observation accumulation for continuous samples.
inline double real_statistic(const Sample::Reals& xs, const Distribution& p0, const Distribution& p1) {
  double total = 0.0;
  for (double x : xs) total += log_density(p1, x) - log_density(p0, x);
  return total / static_cast<double>(xs.size());
}

inline Decision argmax(const std::vector<double>& ll) {
  Decision d;
  double best = ll[0];
  for (std::size_t i = 1; i < ll.size(); ++i) {
    if (ll[i] > best) {
      best = ll[i];
      d.index = i;
      d.tie = false;
    } else if (ll[i] == best) {
      d.tie = true;
    }
  }
  if (best == -kInf) throw support_error("sample has zero likelihood under every hypothesis");
  return d;
}

// Number of count vectors of length k summing to n, C(n + k - 1, k - 1).
inline double composition_count(std::size_t n, std::size_t k) {
  double out = 1.0;
  for (std::size_t i = 1; i < k; ++i)
    out = out * static_cast<double>(n + i) / static_cast<double>(i);
  return out;
}

// Visits every count vector of length k summing to n, lexicographically.
template <typename Fn>
void for_each_composition(std::size_t n, std::size_t k, Fn&& fn) {
  std::vector<std::size_t> c(k, 0);
  auto fill = [&](auto&& self, std::size_t pos, std::size_t left) -> void {
    if (pos + 1 == k) {
      c[pos] = left;
      fn(static_cast<const std::vector<std::size_t>&>(c));
      return;
    }
    for (std::size_t v = 0; v <= left; ++v) {
      c[pos] = v;
      self(self, pos + 1, left - v);
    }
  };
  fill(fill, 0, n);
}

inline double log_multinomial_coef(const std::vector<std::size_t>& counts, std::size_t n) {
  double out = std::lgamma(static_cast<double>(n) + 1.0);
  for (std::size_t v : counts) out -= std::lgamma(static_cast<double>(v) + 1.0);
  return out;
}

inline void check_exact_size(const Distribution& d, int n) {
  if (!d.is_discrete()) throw unsupported_error("exact enumeration needs finite alphabets");
  const double states = composition_count(static_cast<std::size_t>(n), d.alphabet_size());
  if (states > kMaxExactStates)
    throw size_error("exact enumeration needs " + std::to_string(states) +
                     " states, above the cap of 2e6");
}

// Runs fn(chunk_index, chunk_begin, chunk_end) for every chunk of `trials`
// on `jobs` workers. Chunks are independent, so callers that write per-chunk
// outputs get results invariant to the worker count.
template <typename Fn>
void run_chunks(std::int64_t trials, int jobs, Fn&& fn) {
  const std::int64_t chunks = (trials + kChunkSize - 1) / kChunkSize;
  const auto worker_count = static_cast<std::int64_t>(std::max(1, jobs));
  std::atomic<std::int64_t> next{0};
  auto work = [&] {
    for (std::int64_t ch = next++; ch < chunks; ch = next++)
      fn(ch, ch * kChunkSize, std::min(trials, (ch + 1) * kChunkSize));
  };
  if (worker_count == 1 || chunks == 1) {
    work();
    return;
  }
  std::vector<std::thread> pool;
  for (std::int64_t w = 0; w < std::min(worker_count, chunks); ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
}

}  // namespace detail

/// Average log-likelihood ratio (1/n) sum ln p1(x_i) / p0(x_i). May be +-inf.
inline double lrt_statistic(const Sample& x, const Distribution& p0, const Distribution& p1) {
  detail::check_pair(p0, p1);
  if (x.is_discrete() != p0.is_discrete())
    throw domain_error("sample type does not match the hypotheses");
  if (!x.is_discrete()) return detail::real_statistic(x.reals(), p0, p1);
  const auto counts = EmpiricalCounts::from_sample(x, p0.alphabet_size());
  return detail::ratio_from_logliks(detail::count_loglik(counts.counts, detail::log_probs(p0)),
                                    detail::count_loglik(counts.counts, detail::log_probs(p1)),
                                    x.size());
}

/// Binary test function: 1 iff the statistic is strictly above cfg.c.
inline int phi(const Sample& x, const Distribution& p0, const Distribution& p1,
               const BinaryTestConfig& cfg) {
  cfg.validate();
  return lrt_statistic(x, p0, p1) > cfg.c ? 1 : 0;
}

/// Exact (alpha, beta) by summing multinomial probabilities over all count
/// vectors of size cfg.n.
inline ErrorRates exact_binary(const Distribution& p0, const Distribution& p1,
                               const BinaryTestConfig& cfg) {
  cfg.validate();
  detail::check_pair(p0, p1);
  detail::check_exact_size(p0, cfg.n);
  const auto l0 = detail::log_probs(p0);
  const auto l1 = detail::log_probs(p1);
  const auto n = static_cast<std::size_t>(cfg.n);

  double alpha = 0.0;
  double accept_h1 = 0.0;
  detail::for_each_composition(n, l0.size(), [&](const std::vector<std::size_t>& counts) {
    const double ll0 = detail::count_loglik(counts, l0);
    const double ll1 = detail::count_loglik(counts, l1);
    if (ll0 == -kInf && ll1 == -kInf) return;  // unreachable under either law
    const double coef = detail::log_multinomial_coef(counts, n);
    const bool reject = detail::ratio_from_logliks(ll0, ll1, n) > cfg.c;
    if (reject && ll0 != -kInf) alpha += std::exp(coef + ll0);
    if (!reject && ll1 != -kInf) accept_h1 += std::exp(coef + ll1);
  });

  ErrorRates out;
  out.alpha = std::clamp(alpha, 0.0, 1.0);
  out.beta = std::clamp(accept_h1, 0.0, 1.0);
  out.mode = Mode::exact;
  return out;
}

/// Monte Carlo (alpha, beta). H0 trials use stream 0, H1 trials stream 1;
/// trial chunks of 4096 are seeded by (seed, stream, chunk), so the result
/// depends only on (p0, p1, cfg, trials, seed), never on `jobs`.
inline ErrorRates simulate_binary(const Distribution& p0, const Distribution& p1,
                                  const BinaryTestConfig& cfg, std::int64_t trials,
                                  std::uint64_t seed, int jobs = 1) {
  cfg.validate();
  detail::check_pair(p0, p1);
  if (trials < 1) throw domain_error("trials must be at least 1");

  const auto n = static_cast<std::size_t>(cfg.n);
  const std::int64_t chunks = (trials + kChunkSize - 1) / kChunkSize;
  const Sampler s0(p0);
  const Sampler s1(p1);
  const auto l0 = p0.is_discrete() ? detail::log_probs(p0) : std::vector<double>{};
  const auto l1 = p1.is_discrete() ? detail::log_probs(p1) : std::vector<double>{};

  auto rejects = [&](const Sampler& sampler, rng::Engine& engine,
                     std::vector<std::size_t>& counts, Sample::Reals& reals) {
    double stat;
    if (p0.is_discrete()) {
      std::fill(counts.begin(), counts.end(), 0);
      for (std::size_t i = 0; i < n; ++i) ++counts[sampler.draw_category(engine)];
      stat = detail::ratio_from_logliks(detail::count_loglik(counts, l0),
                                        detail::count_loglik(counts, l1), n);
    } else {
      for (auto& v : reals) v = sampler.draw_real(engine);
      stat = detail::real_statistic(reals, p0, p1);
    }
    return stat > cfg.c;
  };

  std::vector<std::int64_t> false_reject(chunks, 0);
  std::vector<std::int64_t> false_accept(chunks, 0);
  detail::run_chunks(trials, jobs, [&](std::int64_t ch, std::int64_t begin, std::int64_t end) {
    std::vector<std::size_t> counts(p0.alphabet_size());
    Sample::Reals reals(p0.is_discrete() ? 0 : n);
    auto e0 = rng::make_engine(seed, 0, static_cast<std::uint64_t>(ch));
    auto e1 = rng::make_engine(seed, 1, static_cast<std::uint64_t>(ch));
    for (std::int64_t t = begin; t < end; ++t) {
      if (rejects(s0, e0, counts, reals)) ++false_reject[ch];
      if (!rejects(s1, e1, counts, reals)) ++false_accept[ch];
    }
  });

  ErrorRates out;
  out.mode = Mode::monte_carlo;
  out.trials = trials;
  const auto t = static_cast<double>(trials);
  out.alpha = static_cast<double>(std::accumulate(false_reject.begin(), false_reject.end(), std::int64_t{0})) / t;
  out.beta = static_cast<double>(std::accumulate(false_accept.begin(), false_accept.end(), std::int64_t{0})) / t;
  out.half_width_alpha = half_width(out.alpha, trials);
  out.half_width_beta = half_width(out.beta, trials);
  return out;
}

/// Maximum-likelihood decision among M hypotheses; ties go to the lowest index.
inline Decision classify_mary(const Sample& x, const std::vector<Distribution>& hypotheses) {
  detail::check_family(hypotheses);
  if (x.is_discrete() != hypotheses.front().is_discrete())
    throw domain_error("sample type does not match the hypotheses");
  std::vector<double> ll(hypotheses.size());
  if (x.is_discrete()) {
    const auto counts = EmpiricalCounts::from_sample(x, hypotheses.front().alphabet_size());
    for (std::size_t i = 0; i < ll.size(); ++i)
      ll[i] = detail::count_loglik(counts.counts, detail::log_probs(hypotheses[i]));
  } else {
    for (std::size_t i = 0; i < ll.size(); ++i) {
      double total = 0.0;
      for (double v : x.reals()) total += log_density(hypotheses[i], v);
      ll[i] = total;
    }
  }
  return detail::argmax(ll);
}

namespace detail {

inline void finish_alphas(ConfusionMatrix& cm) {
  const std::size_t m = cm.entries.size();
  cm.alphas.resize(m);
  cm.half_widths.assign(m, 0.0);
  std::size_t worst = 0;
  for (std::size_t i = 0; i < m; ++i) {
    cm.alphas[i] = std::clamp(1.0 - cm.entries[i][i], 0.0, 1.0);
    if (cm.mode == Mode::monte_carlo) cm.half_widths[i] = half_width(cm.alphas[i], cm.trials);
    if (cm.alphas[i] > cm.alphas[worst]) worst = i;
  }
  cm.alpha_max = cm.alphas[worst];
  cm.half_width_max = cm.half_widths[worst];
}

}  // namespace detail

/// Exact confusion matrix by enumerating count vectors of size n.
inline ConfusionMatrix confusion_matrix_exact(const std::vector<Distribution>& hypotheses, int n) {
  detail::check_family(hypotheses);
  if (n < 1) throw domain_error("sample size n must be at least 1");
  detail::check_exact_size(hypotheses.front(), n);
  const std::size_t m = hypotheses.size();
  std::vector<std::vector<double>> logp;
  for (const auto& h : hypotheses) logp.push_back(detail::log_probs(h));

  ConfusionMatrix cm;
  cm.mode = Mode::exact;
  cm.entries.assign(m, std::vector<double>(m, 0.0));
  cm.tie_count.assign(m, 0);
  cm.tie_mass.assign(m, 0.0);
  std::vector<double> ll(m);
  const auto nn = static_cast<std::size_t>(n);
  detail::for_each_composition(nn, logp.front().size(), [&](const std::vector<std::size_t>& counts) {
    bool reachable = false;
    for (std::size_t i = 0; i < m; ++i) {
      ll[i] = detail::count_loglik(counts, logp[i]);
      reachable = reachable || ll[i] != -kInf;
    }
    if (!reachable) return;
    const Decision d = detail::argmax(ll);
    const double coef = detail::log_multinomial_coef(counts, nn);
    for (std::size_t i = 0; i < m; ++i) {
      if (ll[i] == -kInf) continue;
      const double p = std::exp(coef + ll[i]);
      cm.entries[i][d.index] += p;
      if (d.tie) {
        ++cm.tie_count[i];
        cm.tie_mass[i] += p;
      }
    }
  });
  detail::finish_alphas(cm);
  return cm;
}

/// Monte Carlo confusion matrix. Row i draws from stream i with chunk seeding
/// as in simulate_binary; rows sum to 1 exactly.
inline ConfusionMatrix confusion_matrix_mc(const std::vector<Distribution>& hypotheses, int n,
                                           std::int64_t trials, std::uint64_t seed, int jobs = 1) {
  detail::check_family(hypotheses);
  if (n < 1) throw domain_error("sample size n must be at least 1");
  if (trials < 1) throw domain_error("trials must be at least 1");
  const std::size_t m = hypotheses.size();
  const auto nn = static_cast<std::size_t>(n);
  const bool discrete = hypotheses.front().is_discrete();
  std::vector<Sampler> samplers;
  std::vector<std::vector<double>> logp;
  for (const auto& h : hypotheses) {
    samplers.emplace_back(h);
    logp.push_back(discrete ? detail::log_probs(h) : std::vector<double>{});
  }

  const std::int64_t chunks = (trials + kChunkSize - 1) / kChunkSize;
  // tallies[ch][i * m + j]: decisions j under hypothesis i; ties[ch][i]
  std::vector<std::vector<std::int64_t>> tallies(chunks, std::vector<std::int64_t>(m * m, 0));
  std::vector<std::vector<std::int64_t>> ties(chunks, std::vector<std::int64_t>(m, 0));
  detail::run_chunks(trials, jobs, [&](std::int64_t ch, std::int64_t begin, std::int64_t end) {
    std::vector<std::size_t> counts(hypotheses.front().alphabet_size());
    Sample::Reals reals(discrete ? 0 : nn);
    std::vector<double> ll(m);
    for (std::size_t i = 0; i < m; ++i) {
      auto engine = rng::make_engine(seed, i, static_cast<std::uint64_t>(ch));
      for (std::int64_t t = begin; t < end; ++t) {
        if (discrete) {
          std::fill(counts.begin(), counts.end(), 0);
          for (std::size_t k = 0; k < nn; ++k) ++counts[samplers[i].draw_category(engine)];
          for (std::size_t h = 0; h < m; ++h) ll[h] = detail::count_loglik(counts, logp[h]);
        } else {
          for (auto& v : reals) v = samplers[i].draw_real(engine);
          for (std::size_t h = 0; h < m; ++h) {
            double total = 0.0;
            for (double v : reals) total += log_density(hypotheses[h], v);
            ll[h] = total;
          }
        }
        const Decision d = detail::argmax(ll);
        ++tallies[ch][i * m + d.index];
        if (d.tie) ++ties[ch][i];
      }
    }
  });

  ConfusionMatrix cm;
  cm.mode = Mode::monte_carlo;
  cm.trials = trials;
  cm.entries.assign(m, std::vector<double>(m, 0.0));
  cm.tie_count.assign(m, 0);
  cm.tie_mass.assign(m, 0.0);
  const auto t = static_cast<double>(trials);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      std::int64_t total = 0;
      for (const auto& tal : tallies) total += tal[i * m + j];
      cm.entries[i][j] = static_cast<double>(total) / t;
    }
    for (const auto& tc : ties) cm.tie_count[i] += tc[i];
    cm.tie_mass[i] = static_cast<double>(cm.tie_count[i]) / t;
  }
  detail::finish_alphas(cm);
  return cm;
}

// ---------------------------------------------------------------------------
// Bound verification

struct BinaryValidity {
  double error_sum = 0.0;  // alpha + beta
  double mean_gap = 0.0;   // |E0 Phi - E1 Phi| = |alpha - (1 - beta)|
  double gap_limit = 0.0;  // sigma(alpha) sqrt(2 n kl_10)
  double slack = 0.0;      // tolerance applied to every comparison
  bool subgauss_holds = false;
  bool pinsker_holds = false;
  bool gap_holds = false;
  bool subgauss_dominates_pinsker = false;
  std::optional<bool> symmetric_holds;  // alpha + beta >= 1 - sigma(beta) sqrt(2 n kl_01)

  bool all() const {
    return subgauss_holds && pinsker_holds && gap_holds && subgauss_dominates_pinsker &&
           symmetric_holds.value_or(true);
  }
};

inline constexpr double kExactSlack = 1e-12;

/// Checks measured error rates against the binary bounds. Monte Carlo rates
/// get a slack of 3 * (half_width_alpha + half_width_beta).
inline BinaryValidity verify_bounds(const ErrorRates& rates, const BinaryBoundReport& report) {
  if (std::abs(rates.alpha - report.alpha) > 1e-12)
    throw domain_error("bound report was computed for a different alpha");
  BinaryValidity v;
  v.slack = rates.mode == Mode::exact
                ? kExactSlack
                : 3.0 * (rates.half_width_alpha + rates.half_width_beta);
  v.error_sum = rates.alpha + rates.beta;
  v.mean_gap = std::abs(rates.alpha - (1.0 - rates.beta));
  v.gap_limit = 1.0 - report.subgauss;
  v.subgauss_holds = v.error_sum >= report.subgauss - v.slack;
  v.pinsker_holds = v.error_sum >= report.pinsker - v.slack;
  v.gap_holds = v.mean_gap <= v.gap_limit + v.slack;
  v.subgauss_dominates_pinsker = report.subgauss >= report.pinsker;
  if (report.kl_01) {
    const double sigma_beta = subgauss::solve_norm(rates.beta).sigma;
    const double rhs = 1.0 - bounds::gap_bound(sigma_beta, *report.kl_01, report.n);
    v.symmetric_holds = v.error_sum >= rhs - v.slack;
  }
  return v;
}

struct MaryValidity {
  double alpha_max = 0.0;
  double slack = 0.0;
  bool rows_sum_to_one = false;
  bool per_reference_holds = false;               // relaxed sigma = 0.5, every j
  bool per_reference_a_posteriori_holds = false;  // sigma(alpha_i) from the matrix
  bool mean_sqrt_holds = false;
  bool uniform_delta_holds = false;
  std::optional<bool> fano_holds;
  MaryBoundReport a_posteriori;

  bool all() const {
    return rows_sum_to_one && per_reference_holds && per_reference_a_posteriori_holds &&
           mean_sqrt_holds && uniform_delta_holds && fano_holds.value_or(true);
  }
};

/// Checks a confusion matrix against every M-ary bound. Monte Carlo matrices
/// get a slack of 3 * half_width_max on alpha_max.
inline MaryValidity verify_bounds(const ConfusionMatrix& cm, const MaryBoundReport& report) {
  const std::size_t m = cm.entries.size();
  if (m != static_cast<std::size_t>(report.m)) throw domain_error("confusion matrix and report differ in M");
  MaryValidity v;
  v.alpha_max = cm.alpha_max;
  v.slack = cm.mode == Mode::exact ? kExactSlack : 3.0 * cm.half_width_max;
  v.rows_sum_to_one = true;
  for (const auto& row : cm.entries) {
    const double s = std::accumulate(row.begin(), row.end(), 0.0);
    const double tol = cm.mode == Mode::exact ? 1e-9 : 1e-12;
    v.rows_sum_to_one = v.rows_sum_to_one && std::abs(s - 1.0) <= tol;
  }
  const double lhs = cm.alpha_max + v.slack;
  v.per_reference_holds = lhs >= report.per_reference_max;
  v.a_posteriori = bounds::mary_bounds(report.kl_matrix, report.n, cm.alphas, report.delta);
  v.per_reference_a_posteriori_holds = lhs >= v.a_posteriori.per_reference_max;
  v.mean_sqrt_holds = lhs >= report.mean_sqrt;
  v.uniform_delta_holds = lhs >= report.uniform_delta;
  if (report.fano) v.fano_holds = lhs >= *report.fano;
  return v;
}

}  // namespace testing
}  // namespace hyptest

#endif  // HYPTEST_TESTING_HPP
