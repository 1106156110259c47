#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "tailbounds/discrete_distribution.hpp"

namespace tailbounds {

namespace detail {

// E(X - h)_+^beta for a finite law.
inline double plus_moment(const DiscreteDistribution& d, double h, double beta) {
  double acc = 0.0;
  const auto& a = d.atoms();
  const auto& w = d.weights();
  for (std::size_t i = a.size(); i-- > 0;) {
    if (a[i] <= h) break;
    acc += w[i] * std::pow(a[i] - h, beta);
  }
  return acc;
}

inline double golden_min(double lo, double hi, const auto& f) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - (hi - lo) * invphi;
  double d = lo + (hi - lo) * invphi;
  double fc = f(c), fd = f(d);
  while (hi - lo > 1e-12 * (std::abs(lo) + std::abs(hi) + 1.0)) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - (hi - lo) * invphi;
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + (hi - lo) * invphi;
      fd = f(d);
    }
  }
  return f((lo + hi) / 2.0);
}

}  // namespace detail

// G_beta(x) = inf_{h < x} (x-h)^{-beta} E(X-h)_+^beta, found by a coarse
// grid plus golden-section refinement. Returns 1 for x <= mean (vacuous).
inline double g_beta(const DiscreteDistribution& dist, double x, double beta) {
  if (!(beta > 0.0)) throw std::domain_error("g_beta: beta must be positive");
  if (!(x > dist.mean())) return 1.0;
  auto objective = [&](double h) {
    return detail::plus_moment(dist, h, beta) / std::pow(x - h, beta);
  };
  double lo = dist.min() - 3.0 * std::max(dist.stddev(), 1e-6);
  // Extend left until the objective increases monotonically toward -inf.
  {
    double step = std::max(dist.stddev(), 1e-3);
    int rising = 0;
    double prev = objective(lo);
    while (rising < 3) {
      double next = objective(lo - step);
      if (next >= prev)
        ++rising;
      else
        rising = 0;
      lo -= step;
      prev = next;
      step *= 2.0;
      if (lo < dist.min() - 1e8) break;
    }
  }
  const int kGrid = 512;
  double best = 1.0;
  int best_i = -1;
  for (int i = 0; i < kGrid; ++i) {
    double h = lo + (x - lo) * i / kGrid;
    double val = objective(h);
    if (val < best) {
      best = val;
      best_i = i;
    }
  }
  if (best_i >= 0) {
    double a = lo + (x - lo) * std::max(best_i - 1, 0) / kGrid;
    double b = lo + (x - lo) * std::min(best_i + 1, kGrid) / kGrid;
    b = std::min(b, std::nextafter(x, lo));
    best = std::min(best, detail::golden_min(a, b, objective));
  }
  return std::min(best, 1.0);
}

// Exact G_2: on each atom interval E(X-h)_+^2 = A - 2Bh + Ch^2 with fixed
// suffix sums, and the ratio against (x-h)^2 has the single stationary
// point h* = (Bx - A)/(Cx - B). Evaluates all stationary points and piece
// endpoints; the h -> -inf limit contributes total mass 1.
inline double g2_oracle(const DiscreteDistribution& dist, double x) {
  if (!(x > dist.mean())) return 1.0;
  const auto& atoms = dist.atoms();
  const auto& w = dist.weights();
  const std::size_t m = atoms.size();
  // Suffix sums over atoms with index >= j, in long double.
  std::vector<long double> A(m + 1, 0.0L), B(m + 1, 0.0L), C(m + 1, 0.0L);
  for (std::size_t j = m; j-- > 0;) {
    long double wa = w[j];
    A[j] = A[j + 1] + wa * atoms[j] * atoms[j];
    B[j] = B[j + 1] + wa * atoms[j];
    C[j] = C[j + 1] + wa;
  }
  long double best = 1.0L;
  auto eval = [&](long double h, std::size_t j) {
    long double num = A[j] - 2.0L * B[j] * h + C[j] * h * h;
    long double den = (static_cast<long double>(x) - h);
    return num / (den * den);
  };
  for (std::size_t j = 0; j <= m; ++j) {
    if (C[j] <= 0.0L) {
      // No mass above h: the infimum on this piece is 0 (only reachable
      // when x exceeds the top atom).
      if (j > 0 && atoms[j - 1] < x) best = 0.0L;
      continue;
    }
    long double lo = (j > 0) ? atoms[j - 1] : -kInf;
    long double hi = (j < m) ? std::min<long double>(atoms[j], x) : x;
    if (lo >= x) break;
    long double den = C[j] * static_cast<long double>(x) - B[j];
    if (den > 0.0L) {
      long double hs = (B[j] * static_cast<long double>(x) - A[j]) / den;
      if (hs >= lo && hs <= hi && hs < x) best = std::min(best, eval(hs, j));
    }
    if (lo > -kInf && lo < x) best = std::min(best, eval(lo, j));
    if (hi < x) best = std::min(best, eval(hi, j));
  }
  return static_cast<double>(std::min(best, 1.0L));
}

// inf_{h>0} exp(-hx) E exp(hX) via bisection on the derivative of the
// convex log objective. Returns 1 for x <= mean; for x at or above the top
// atom returns the limiting point mass.
inline double chernoff_inf(const DiscreteDistribution& dist, double x) {
  if (!(x > dist.mean())) return 1.0;
  const auto& atoms = dist.atoms();
  const auto& w = dist.weights();
  if (x >= dist.max() - 1e-12 * (1.0 + std::abs(dist.max()))) return w.back();
  // log E e^{hX} with max-shift, and the tilted mean.
  auto log_mgf = [&](double h) {
    double shift = h * (h >= 0.0 ? atoms.back() : atoms.front());
    double s = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i) s += w[i] * std::exp(h * atoms[i] - shift);
    return shift + std::log(s);
  };
  auto tilted_mean = [&](double h) {
    double shift = h * (h >= 0.0 ? atoms.back() : atoms.front());
    double s = 0.0, sm = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      double e = w[i] * std::exp(h * atoms[i] - shift);
      s += e;
      sm += e * atoms[i];
    }
    return sm / s;
  };
  double lo = 0.0, hi = 1.0;
  while (tilted_mean(hi) < x) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e8) break;  // x essentially at the top atom
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + hi); ++it) {
    double mid = (lo + hi) / 2.0;
    if (tilted_mean(mid) < x)
      lo = mid;
    else
      hi = mid;
  }
  double h = (lo + hi) / 2.0;
  return std::min(std::exp(log_mgf(h) - h * x), 1.0);
}

// Centered Poisson(lambda) truncated at the smallest K with
// P{eta > K} <= tail_eps, renormalized. Atoms are k - lambda. When `cover`
// is finite the support is additionally extended until the pmf has decayed
// twelve decades past that point, so transform/Chernoff evaluations near
// `cover` are not distorted by the cut.
inline DiscreteDistribution truncated_poisson(double lambda, double tail_eps,
                                              double cover = -kInf) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw std::domain_error("truncated_poisson: lambda must be positive and finite");
  if (!(tail_eps > 0.0) || tail_eps > 1e-6)
    throw std::domain_error("truncated_poisson: tail_eps must be in (0, 1e-6]");
  std::vector<double> atoms, weights;
  long double pk = std::exp(-static_cast<long double>(lambda));
  long double cum = 0.0L, ref = -1.0L;
  for (int k = 0;; ++k) {
    atoms.push_back(static_cast<double>(k) - lambda);
    weights.push_back(static_cast<double>(pk));
    cum += pk;
    if (ref < 0.0L && atoms.back() >= cover) ref = pk;
    bool mass_done = k >= 1 && 1.0L - cum <= tail_eps;
    bool cover_done = !(cover > -kInf) || (ref >= 0.0L && pk <= ref * 1e-12L);
    if (mass_done && cover_done) break;
    pk *= lambda / (k + 1);
    // A pmf below double resolution cannot carry the extension further.
    if (static_cast<double>(pk) == 0.0) break;
    if (k > 10000000) throw std::runtime_error("truncated_poisson: truncation failed");
  }
  for (auto& wk : weights) wk = static_cast<double>(wk / static_cast<double>(cum));
  // Absorb the remaining renormalization residual into the mode.
  std::vector<double> wcopy = weights;
  double total = stable_sum(wcopy);
  std::size_t mode = static_cast<std::size_t>(
      std::max_element(weights.begin(), weights.end()) - weights.begin());
  weights[mode] += 1.0 - total;
  return DiscreteDistribution(std::move(atoms), std::move(weights));
}

// Hoeffding's Poisson-form closed bound exp{x - (x+lambda) ln((x+lambda)/lambda)}.
inline double poisson_closed_bound(double lambda, double x) {
  if (!(lambda > 0.0)) throw std::domain_error("poisson_closed_bound: lambda must be positive");
  if (x < 0.0) throw std::domain_error("poisson_closed_bound: x must be nonnegative");
  if (x == 0.0) return 1.0;
  return std::exp(x - (x + lambda) * std::log1p(x / lambda));
}

// Numeric G_2 of the centered Poisson law (the closed form is not used).
// The truncation must cover x: cutting the support short of the query point
// would collapse the transform to 0 even though the Poisson law is unbounded.
inline double poisson_g2(double lambda, double x) {
  if (x <= 0.0) return 1.0;
  return g2_oracle(truncated_poisson(lambda, 1e-12, x), x);
}

}  // namespace tailbounds
