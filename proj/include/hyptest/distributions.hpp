#ifndef HYPTEST_DISTRIBUTIONS_HPP
#define HYPTEST_DISTRIBUTIONS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hyptest/errors.hpp"
#include "hyptest/random.hpp"

namespace hyptest {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Finite law on {0, ..., K-1}.
struct Categorical {
  std::vector<double> probs;
};

/// Univariate normal law.
struct Gaussian {
  double mean = 0.0;
  double std = 1.0;
};

/// A validated hypothesis distribution. Immutable once constructed.
///
/// Bernoulli(p) is stored as the two-point categorical {1 - p, p}; the flag
/// is kept only so that the spec can be written back in its original form.
class Distribution {
 public:
  static Distribution categorical(std::vector<double> probs) {
    if (probs.empty()) throw domain_error("categorical: empty probability vector");
    double total = 0.0;
    for (double p : probs) {
      if (!std::isfinite(p) || p < 0.0)
        throw domain_error("categorical: probabilities must be finite and nonnegative");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-12)
      throw domain_error("categorical: probabilities sum to " + std::to_string(total) +
                         ", expected 1");
    return Distribution(Categorical{std::move(probs)}, false);
  }

  static Distribution bernoulli(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw domain_error("bernoulli: p must lie in [0, 1]");
    return Distribution(Categorical{{1.0 - p, p}}, true);
  }

  static Distribution gaussian(double mean, double std) {
    if (!std::isfinite(mean)) throw domain_error("gaussian: mean must be finite");
    if (!(std > 0.0) || !std::isfinite(std))
      throw domain_error("gaussian: std must be positive and finite");
    return Distribution(Gaussian{mean, std}, false);
  }

  bool is_discrete() const { return std::holds_alternative<Categorical>(law_); }
  bool is_bernoulli() const { return bernoulli_; }

  const Categorical& as_categorical() const {
    if (!is_discrete()) throw unsupported_error("distribution is not categorical");
    return std::get<Categorical>(law_);
  }
  const Gaussian& as_gaussian() const {
    if (is_discrete()) throw unsupported_error("distribution is not gaussian");
    return std::get<Gaussian>(law_);
  }

  /// Alphabet size K for discrete laws, 0 for continuous ones.
  std::size_t alphabet_size() const {
    return is_discrete() ? as_categorical().probs.size() : 0;
  }

 private:
  Distribution(std::variant<Categorical, Gaussian> law, bool bernoulli)
      : law_(std::move(law)), bernoulli_(bernoulli) {}

  std::variant<Categorical, Gaussian> law_;
  bool bernoulli_ = false;
};

/// n i.i.d. observations: category indices for discrete laws, reals otherwise.
class Sample {
 public:
  using Categories = std::vector<std::size_t>;
  using Reals = std::vector<double>;

  explicit Sample(Categories values) : values_(std::move(values)) { check(); }
  explicit Sample(Reals values) : values_(std::move(values)) { check(); }

  std::size_t size() const {
    return std::visit([](const auto& v) { return v.size(); }, values_);
  }
  bool is_discrete() const { return std::holds_alternative<Categories>(values_); }
  const Categories& categories() const { return std::get<Categories>(values_); }
  const Reals& reals() const { return std::get<Reals>(values_); }

  friend bool operator==(const Sample&, const Sample&) = default;

 private:
  void check() const {
    if (size() == 0) throw domain_error("sample must contain at least one observation");
  }

  std::variant<Categories, Reals> values_;
};

/// ln p(k) for a category index. Zero-mass and out-of-alphabet categories give -inf.
inline double log_density(const Distribution& d, std::size_t k) {
  const auto& probs = d.as_categorical().probs;
  if (k >= probs.size() || probs[k] == 0.0) return -kInf;
  return std::log(probs[k]);
}

/// ln p(x) for a real observation (Lebesgue density).
inline double log_density(const Distribution& d, double x) {
  const auto& g = d.as_gaussian();
  const double z = (x - g.mean) / g.std;
  return -0.5 * z * z - std::log(g.std) - 0.5 * std::log(2.0 * std::numbers::pi);
}

/// Draws from a fixed law using an externally owned engine.
///
/// Categorical: inverse CDF on one uniform, first index with u < cdf[k].
/// Gaussian: mean + std * standard_normal.
class Sampler {
 public:
  explicit Sampler(const Distribution& d) : dist_(d) {
    if (d.is_discrete()) {
      const auto& probs = d.as_categorical().probs;
      cdf_.resize(probs.size());
      std::partial_sum(probs.begin(), probs.end(), cdf_.begin());
      // Rounding may leave cdf.back() slightly below 1; the last positive-mass
      // category absorbs the remainder.
      for (std::size_t k = probs.size(); k-- > 0;) {
        if (probs[k] > 0.0) {
          last_positive_ = k;
          break;
        }
      }
    }
  }

  std::size_t draw_category(rng::Engine& engine) const {
    const double u = rng::uniform01(engine);
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    const auto k = static_cast<std::size_t>(it - cdf_.begin());
    return k > last_positive_ ? last_positive_ : k;
  }

  double draw_real(rng::Engine& engine) const {
    const auto& g = dist_.as_gaussian();
    return g.mean + g.std * rng::standard_normal(engine);
  }

  Sample draw(rng::Engine& engine, std::size_t n) const {
    if (dist_.is_discrete()) {
      Sample::Categories values(n);
      for (auto& v : values) v = draw_category(engine);
      return Sample(std::move(values));
    }
    Sample::Reals values(n);
    for (auto& v : values) v = draw_real(engine);
    return Sample(std::move(values));
  }

  const Distribution& distribution() const { return dist_; }

 private:
  Distribution dist_;
  std::vector<double> cdf_;
  std::size_t last_positive_ = 0;
};

/// n i.i.d. draws, deterministic in (d, seed, n).
inline Sample sample(const Distribution& d, std::uint64_t seed, std::size_t n) {
  if (n < 1) throw domain_error("sample: n must be at least 1");
  auto engine = rng::make_engine(seed);
  return Sampler(d).draw(engine, n);
}

/// D_KL(p || q) in nats; +inf when p is not absolutely continuous w.r.t. q.
inline double kl(const Distribution& p, const Distribution& q) {
  if (p.is_discrete() != q.is_discrete())
    throw unsupported_error("kl: distributions belong to different families");
  if (p.is_discrete()) {
    const auto& pp = p.as_categorical().probs;
    const auto& qq = q.as_categorical().probs;
    if (pp.size() != qq.size()) throw unsupported_error("kl: alphabet sizes differ");
    double total = 0.0;
    for (std::size_t i = 0; i < pp.size(); ++i) {
      if (pp[i] == 0.0) continue;
      if (qq[i] == 0.0) return kInf;
      total += pp[i] * std::log(pp[i] / qq[i]);
    }
    return std::max(total, 0.0);
  }
  const auto& a = p.as_gaussian();
  const auto& b = q.as_gaussian();
  const double dm = a.mean - b.mean;
  return std::log(b.std / a.std) + (a.std * a.std + dm * dm) / (2.0 * b.std * b.std) - 0.5;
}

}  // namespace hyptest

#endif  // HYPTEST_DISTRIBUTIONS_HPP
