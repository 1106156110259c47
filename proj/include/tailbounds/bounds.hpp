#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tailbounds/binomial.hpp"
#include "tailbounds/moments.hpp"
#include "tailbounds/transform.hpp"

namespace tailbounds {

struct BoundQuery {
  double x = 0.0;  // threshold for P{M_n >= x}
  double t = 0.0;  // per-summand scale x/n
  int n = 0;
};

struct BoundFlags {
  bool vacuous = false;
  bool typo_fallback = false;
  bool oracle_mismatch = false;
  bool zero_tail = false;
};

struct BoundReport {
  BoundQuery query;
  AggregationResult aggregation;
  double hoeffding = 1.0;
  double chernoff_check = 1.0;
  double g2 = 1.0;
  double g2_oracle_check = 1.0;
  double poisson_closed = 1.0;
  double poisson_g2 = 1.0;
  double tail_reference = 1.0;
  double tightness = 1.0;
  BoundFlags flags;
};

// H(t,p)^n with negated exponents relative to the printed form, computed in
// log space: ln H = -(p+qt) ln(1+qt/p) - (q-qt) ln(1-t).
inline double hoeffding_closed(double sigma2, int n, double t) {
  if (n < 1) throw std::domain_error("hoeffding_closed: n must be >= 1");
  if (std::isnan(t) || t <= 0.0) throw std::domain_error("hoeffding_closed: t must be in (0, 1)");
  BernoulliParams b = bernoulli_from_variance(sigma2);
  if (t >= 1.0) return t == 1.0 ? std::exp(n * std::log(b.p)) : 0.0;
  double ln_h = -(b.p + b.q * t) * std::log1p(b.q * t / b.p) - (b.q - b.q * t) * std::log1p(-t);
  return std::min(std::exp(n * ln_h), 1.0);
}

inline BoundReport bound_report(const MomentConstraints& constraints, double x) {
  if (!std::isfinite(x)) throw std::domain_error("bound_report: x must be finite");
  BoundReport r;
  r.aggregation = aggregate(constraints);
  r.query = {x, x / constraints.n, constraints.n};
  if (x <= 0.0) {
    r.flags.vacuous = true;
    BinomialModel m = build_model(constraints.n, r.aggregation.sigma2_eff);
    r.tail_reference = (x >= m.atoms.front()) ? survival_interp(m, x) : 1.0;
    r.g2_oracle_check = 1.0;
    r.tightness = 1.0 / r.tail_reference;
    return r;
  }
  BinomialModel m = build_model(constraints.n, r.aggregation.sigma2_eff);
  DiscreteDistribution law = to_distribution(m);
  // Poisson majorants use lambda = n sigma^2, not the model's pn.
  double lambda = constraints.n * r.aggregation.sigma2_eff;

  r.hoeffding = hoeffding_closed(r.aggregation.sigma2_eff, m.n, r.query.t);
  r.chernoff_check = chernoff_inf(law, x);
  r.g2 = g2_closed_form(m, x);
  r.g2_oracle_check = g2_oracle(law, x);
  if (!(std::abs(r.g2 - r.g2_oracle_check) <=
        1e-9 * std::max(r.g2, r.g2_oracle_check))) {
    r.flags.oracle_mismatch = true;
    r.flags.typo_fallback = true;
    r.g2 = std::max(r.g2, r.g2_oracle_check);  // never understate
  }
  r.poisson_closed = poisson_closed_bound(lambda, x);
  r.poisson_g2 = poisson_g2(lambda, x);

  double xc = std::clamp(x, m.atoms.front(), m.atoms.back());
  r.tail_reference = (x <= m.atoms.back()) ? survival_interp(m, xc) : survival_at(m, x);
  if (r.tail_reference > 0.0) {
    r.tightness = r.g2 / r.tail_reference;
  } else {
    r.flags.zero_tail = true;
    r.tightness = kInf;
  }
  if (r.hoeffding >= 1.0 && r.g2 >= 1.0) r.flags.vacuous = true;
  return r;
}

inline double tightness_factor(const BoundReport& r) { return r.tightness; }

}  // namespace tailbounds
