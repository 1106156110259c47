#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "tailbounds/discrete_distribution.hpp"

namespace tailbounds {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// u(g) = sqrt(1 + g^2/4) - g/2, the variance root of the skewness relation.
// For g >= 0 the conjugate form 2/(hypot(2,g) + g) avoids cancellation.
inline double u_of_skewness(double g) {
  if (std::isnan(g)) throw std::domain_error("u_of_skewness: NaN");
  if (g == kInf) return 0.0;
  if (g == -kInf) return kInf;
  if (g >= 0.0) return 2.0 / (std::hypot(2.0, g) + g);
  return (std::hypot(2.0, g) - g) / 2.0;
}

// v(c) = (c + 1 + sqrt((c+1)^2 - 4))/2, the larger variance root of the
// kurtosis relation. Satisfies v + 1/v = c + 1.
inline double v_of_kurtosis(double c) {
  if (std::isnan(c) || c < 1.0) throw std::domain_error("v_of_kurtosis: requires c >= 1");
  if (c == kInf) return kInf;
  double t = c + 1.0;
  if (t > 1e150) return t;  // sqrt term equals t to double precision
  return (t + std::sqrt((t - 2.0) * (t + 2.0))) / 2.0;
}

// The two-point law on {-sigma^2, 1} with mean zero and variance sigma^2.
struct BernoulliParams {
  double sigma2;
  double p;  // weight at 1
  double q;  // weight at -sigma^2
  double gamma;
  double kappa;
};

inline double skewness_of_bernoulli(double sigma2) {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2))
    throw std::domain_error("skewness_of_bernoulli: sigma2 must be positive and finite");
  double s = std::sqrt(sigma2);
  return 1.0 / s - s;
}

inline double kurtosis_of_bernoulli(double sigma2) {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2))
    throw std::domain_error("kurtosis_of_bernoulli: sigma2 must be positive and finite");
  return 1.0 / sigma2 - 1.0 + sigma2;
}

inline BernoulliParams bernoulli_from_variance(double sigma2) {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2))
    throw std::domain_error("bernoulli_from_variance: sigma2 must be positive and finite");
  BernoulliParams b;
  b.sigma2 = sigma2;
  b.p = sigma2 / (1.0 + sigma2);
  b.q = 1.0 / (1.0 + sigma2);
  b.gamma = skewness_of_bernoulli(sigma2);
  b.kappa = kurtosis_of_bernoulli(sigma2);
  return b;
}

// Per-summand constraint lists; absent entries use infinity sentinels
// (+inf for variance and kurtosis caps, -inf for skewness floors).
struct MomentConstraints {
  int n = 0;
  std::vector<double> sigma2;   // caps, >= 0 or +inf
  std::vector<double> skew_lo;  // floors, -inf if absent
  std::vector<double> kurt_hi;  // caps, >= 1 or +inf

  static MomentConstraints uniform(int n, double s2, double g, double c) {
    MomentConstraints mc;
    mc.n = n;
    mc.sigma2.assign(static_cast<std::size_t>(n), s2);
    mc.skew_lo.assign(static_cast<std::size_t>(n), g);
    mc.kurt_hi.assign(static_cast<std::size_t>(n), c);
    mc.validate();
    return mc;
  }

  void validate() const {
    if (n < 1) throw std::domain_error("MomentConstraints: n must be >= 1");
    auto sz = static_cast<std::size_t>(n);
    if (sigma2.size() != sz || skew_lo.size() != sz || kurt_hi.size() != sz)
      throw std::domain_error("MomentConstraints: list lengths must equal n");
    for (int k = 0; k < n; ++k) {
      if (std::isnan(sigma2[k]) || sigma2[k] < 0.0)
        throw std::domain_error("MomentConstraints: sigma2 entries must be >= 0");
      if (std::isnan(skew_lo[k]))
        throw std::domain_error("MomentConstraints: NaN skewness floor");
      if (std::isnan(kurt_hi[k]) || kurt_hi[k] < 1.0)
        throw std::domain_error("MomentConstraints: kurtosis caps must be >= 1");
    }
  }
};

struct AggregationResult {
  std::vector<double> alpha2;
  double sigma2_eff = 0.0;
  BernoulliParams bernoulli{};
  double gamma_eff = 0.0;
  double kappa_eff = 0.0;
};

// alpha_k^2 = min{sigma_k^2, u^2(gamma_k), v(kappa_k)}, the tightest
// admissible per-summand variance; sigma2_eff is their mean.
inline AggregationResult aggregate(const MomentConstraints& mc) {
  mc.validate();
  AggregationResult r;
  r.alpha2.resize(static_cast<std::size_t>(mc.n));
  for (int k = 0; k < mc.n; ++k) {
    double a2;
    if (mc.sigma2[k] == 0.0) {
      a2 = 0.0;  // degenerate summand contributes nothing
    } else {
      double us = u_of_skewness(mc.skew_lo[k]);
      double u2 = (us == kInf) ? kInf : us * us;
      a2 = std::min({mc.sigma2[k], u2, v_of_kurtosis(mc.kurt_hi[k])});
    }
    if (a2 == kInf)
      throw std::domain_error("aggregate: unbounded summand (no finite constraint)");
    r.alpha2[k] = a2;
  }
  r.sigma2_eff = stable_sum(r.alpha2) / mc.n;
  if (!(r.sigma2_eff > 0.0))
    throw std::domain_error("aggregate: degenerate (all summands have zero variance)");
  r.bernoulli = bernoulli_from_variance(r.sigma2_eff);
  r.gamma_eff = r.bernoulli.gamma;
  r.kappa_eff = r.bernoulli.kappa;
  return r;
}

// (1/sqrt(n)) * sum(g_k u(g_k)) / sqrt(sum u^2(g_k)); identical to the
// skewness of the Bernoulli law with variance mean(u^2(g_k)).
inline double effective_skewness(std::span<const double> gammas) {
  if (gammas.empty()) throw std::domain_error("effective_skewness: empty list");
  std::vector<double> num(gammas.size()), den(gammas.size());
  for (std::size_t k = 0; k < gammas.size(); ++k) {
    if (!std::isfinite(gammas[k]))
      throw std::domain_error("effective_skewness: entries must be finite");
    double u = u_of_skewness(gammas[k]);
    num[k] = gammas[k] * u;
    den[k] = u * u;
  }
  double n = static_cast<double>(gammas.size());
  return stable_sum(num) / (std::sqrt(n) * std::sqrt(stable_sum(den)));
}

inline double effective_kurtosis(std::span<const double> kappas) {
  if (kappas.empty()) throw std::domain_error("effective_kurtosis: empty list");
  std::vector<double> vs(kappas.size());
  for (std::size_t k = 0; k < kappas.size(); ++k) {
    if (!std::isfinite(kappas[k]))
      throw std::domain_error("effective_kurtosis: entries must be finite");
    vs[k] = v_of_kurtosis(kappas[k]);
  }
  double s2 = stable_sum(vs) / static_cast<double>(kappas.size());
  return kurtosis_of_bernoulli(s2);
}

namespace detail {
inline void require_lemma_preconditions(const DiscreteDistribution& d) {
  if (d.max() > 1.0 + 1e-12)
    throw std::domain_error("lemma predicate: support must lie in (-inf, 1]");
  if (std::abs(d.mean()) > 1e-12)
    throw std::domain_error("lemma predicate: mean must be 0");
  if (!(d.variance() > 0.0))
    throw std::domain_error("lemma predicate: variance must be positive");
}
}  // namespace detail

// s^2 <= u^2(g) for any mean-zero law bounded by 1; equality at the
// extremal Bernoulli law. Small relative slack absorbs moment rounding.
inline bool lemma_variance_cap_skew(const DiscreteDistribution& d) {
  detail::require_lemma_preconditions(d);
  double s2 = d.variance();
  double u = u_of_skewness(d.skewness());
  return s2 <= u * u * (1.0 + 1e-12);
}

inline bool lemma_variance_cap_kurt(const DiscreteDistribution& d) {
  detail::require_lemma_preconditions(d);
  double s2 = d.variance();
  double c = std::max(d.kurtosis(), 1.0);  // rounding can land a hair below 1
  return s2 <= v_of_kurtosis(c) * (1.0 + 1e-12);
}

}  // namespace tailbounds
