#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "tailbounds/moments.hpp"
#include "tailbounds/transform.hpp"

namespace tailbounds {

// Law of T_n, the sum of n extremal Bernoulli copies, together with the
// piecewise-rational description of its G_2 transform on [0, n].
struct BinomialModel {
  int n = 0;
  BernoulliParams params{};
  double lambda = 0.0;                // p * n
  std::vector<double> atoms;          // d_s = (s - lambda)/q, s = 0..n
  std::vector<double> log_pmf;        // ln P{T_n = d_s}
  std::vector<double> log_survival;   // ln G(d_s)
  std::vector<double> survival;       // G(d_s)
  std::vector<double> nu;             // s p_{n,s} / G(d_s)
  std::vector<double> breakpoints;    // r_0 = 0 < ... < r_n = n
};

inline BinomialModel build_model(int n, double sigma2) {
  if (n < 1) throw std::domain_error("build_model: n must be >= 1");
  BinomialModel m;
  m.n = n;
  m.params = bernoulli_from_variance(sigma2);
  if (m.params.p < 1e-15) throw std::domain_error("build_model: degenerate model (p < 1e-15)");
  const double p = m.params.p, q = m.params.q;
  m.lambda = p * n;
  auto sz = static_cast<std::size_t>(n) + 1;
  m.atoms.resize(sz);
  m.log_pmf.resize(sz);
  m.log_survival.resize(sz);
  m.survival.resize(sz);
  m.nu.resize(sz);
  m.breakpoints.resize(sz);
  // The log pipeline runs in long double: for n ~ 10^6 the absolute noise of
  // double lgamma (~eps * lgamma(n+1)) gets amplified by the breakpoint
  // denominator cancellation past the breakpoint spacing.
  const long double lp = std::log(static_cast<long double>(p));
  const long double lq = std::log(static_cast<long double>(q));
  const long double lgn = std::lgamma(static_cast<long double>(n) + 1.0L);
  std::vector<long double> lpmf(sz), lsurv(sz);
  for (int s = 0; s <= n; ++s) {
    m.atoms[s] = (s - m.lambda) / q;
    lpmf[s] = lgn - std::lgamma(s + 1.0L) - std::lgamma(n - s + 1.0L) + (n - s) * lq + s * lp;
    m.log_pmf[s] = static_cast<double>(lpmf[s]);
  }
  // Cumulative log-sum-exp from the top keeps deep tails finite.
  lsurv[n] = lpmf[n];
  for (int s = n - 1; s >= 0; --s) {
    long double a = lpmf[s], b = lsurv[s + 1];
    long double hi = std::max(a, b);
    lsurv[s] = hi + std::log1p(std::exp(std::min(a, b) - hi));
  }
  if (std::abs(lsurv[0]) < 1e-12L) lsurv[0] = 0.0L;  // G(d_0) = 1 exactly
  for (int s = 0; s <= n; ++s) {
    m.log_survival[s] = static_cast<double>(lsurv[s]);
    m.survival[s] = std::min(std::exp(m.log_survival[s]), 1.0);
    m.nu[s] = static_cast<double>(s * std::exp(lpmf[s] - lsurv[s]));
  }
  // Interior breakpoints: the formula at index s gives the right endpoint
  // of piece s, i.e. r_{s+1} = (lambda - p nu_s)/(q nu_s + lambda - s).
  // Rewritten via the adjacent survival ratio T_s = G(d_{s+1})/G(d_s): with
  // delta = s T_s the ratio equals p(n-s+delta) / (p(n-s) - q delta), which
  // avoids the catastrophic 1 - pmf/survival cancellation in the deep tail.
  // Deep in the upper tail the denominator cancellation outgrows even the
  // long double lgamma accuracy, but there the pmf ratio series for
  // R = G(d_{s+1})/p_{n,s} converges in a few dozen terms, giving T_s to
  // full precision. Near the mode (ratio >= 1/2) there is no cancellation
  // and the log route is fine.
  const long double pq = static_cast<long double>(p) / q;
  m.breakpoints[0] = 0.0;
  for (int s = 0; s + 1 < n; ++s) {
    long double ns = static_cast<long double>(n - s);
    long double T;
    if (ns / (s + 1.0L) * pq < 0.5L) {
      long double R = 0.0L, term = 1.0L;
      for (int k = s; k < n; ++k) {
        term *= static_cast<long double>(n - k) / (k + 1) * pq;
        R += term;
        if (term < R * 1e-24L) break;
      }
      T = R / (1.0L + R);
    } else {
      T = std::exp(lsurv[s + 1] - lsurv[s]);
    }
    long double delta = s * T;
    m.breakpoints[s + 1] = static_cast<double>(p * (ns + delta) / (p * ns - q * delta));
  }
  m.breakpoints[n] = static_cast<double>(n);
  for (int s = 0; s < n; ++s)
    if (!(m.breakpoints[s] < m.breakpoints[s + 1]))
      throw std::runtime_error("build_model: breakpoints not strictly increasing");
  return m;
}

inline DiscreteDistribution to_distribution(const BinomialModel& m) {
  std::vector<double> w(m.log_pmf.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::exp(m.log_pmf[i]);
  // Absorb rounding so the weights sum to 1 exactly enough.
  double total = stable_sum(w);
  std::size_t mode = static_cast<std::size_t>(
      std::max_element(w.begin(), w.end()) - w.begin());
  w[mode] += 1.0 - total;
  return DiscreteDistribution(m.atoms, std::move(w));
}

// Right-continuous step evaluation of P{T_n >= x}.
inline double survival_at(const BinomialModel& m, double x) {
  if (x <= m.atoms.front()) return 1.0;
  if (x > m.atoms.back()) return 0.0;
  auto it = std::lower_bound(m.atoms.begin(), m.atoms.end(), x);
  return m.survival[static_cast<std::size_t>(it - m.atoms.begin())];
}

// Log-linear interpolation of the survival function between atoms.
inline double survival_interp(const BinomialModel& m, double x) {
  if (x < m.atoms.front() || x > m.atoms.back())
    throw std::domain_error("survival_interp: x outside the support range");
  auto it = std::upper_bound(m.atoms.begin(), m.atoms.end(), x);
  auto s = static_cast<std::size_t>(it - m.atoms.begin());
  if (s == m.atoms.size()) return m.survival.back();
  if (s == 0) return 1.0;
  --s;
  double frac = (x - m.atoms[s]) / (m.atoms[s + 1] - m.atoms[s]);
  return std::exp(m.log_survival[s] + frac * (m.log_survival[s + 1] - m.log_survival[s]));
}

// Piecewise-rational closed form of G_2 on [0, n]; x <= 0 is clamped to 1
// and x beyond the top atom falls back to the numeric oracle.
inline double g2_closed_form(const BinomialModel& m, double x) {
  if (x <= 0.0) return 1.0;
  if (x > static_cast<double>(m.n)) return g2_oracle(to_distribution(m), x);
  const double p = m.params.p, q = m.params.q, lam = m.lambda;
  auto it = std::upper_bound(m.breakpoints.begin(), m.breakpoints.end(), x);
  int s = static_cast<int>(it - m.breakpoints.begin()) - 1;
  s = std::clamp(s, 0, m.n - 1);
  double v = m.nu[s];
  double base = lam + v * (s - lam - p);
  double num = base - q * v * v;
  double den = q * x * x - 2.0 * q * v * x + base;
  return std::min(num / den * m.survival[s], 1.0);
}

}  // namespace tailbounds
