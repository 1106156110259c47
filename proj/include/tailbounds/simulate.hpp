#pragma once

#include <cmath>
#include <cstdint>
#include <future>
#include <stdexcept>
#include <thread>
#include <vector>

#include "tailbounds/bounds.hpp"
#include "tailbounds/discrete_distribution.hpp"

namespace tailbounds {

// Extremal two-point law on {-sigma^2, 1}.
inline DiscreteDistribution two_point(double sigma2) {
  BernoulliParams b = bernoulli_from_variance(sigma2);
  return DiscreteDistribution({-sigma2, 1.0}, {b.q, b.p});
}

// Symmetric three-point law on {-a, 0, a}: variance 2wa^2, skewness 0,
// kurtosis 1/(2w).
inline DiscreteDistribution three_point(double a, double w) {
  if (!(a > 0.0) || a > 1.0) throw std::domain_error("three_point: a must be in (0, 1]");
  if (!(w > 0.0) || w > 0.5) throw std::domain_error("three_point: w must be in (0, 0.5]");
  if (w == 0.5) return DiscreteDistribution({-a, a}, {0.5, 0.5});
  return DiscreteDistribution({-a, 0.0, a}, {w, 1.0 - 2.0 * w, w});
}

struct SimSpec {
  int n = 1;
  DiscreteDistribution step_law = two_point(1.0);
  bool adapted = false;  // two-regime variance switching instead of step_law
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  bool maximal = false;  // threshold the running maximum
};

struct EmpiricalTail {
  double x = 0.0;
  double estimate = 0.0;
  double stderr_est = 0.0;
  std::uint64_t samples = 0;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// xoshiro256** with splitmix-expanded seeding.
struct Rng {
  std::uint64_t s[4];
  explicit Rng(std::uint64_t seed) {
    for (auto& v : s) v = seed = splitmix64(seed);
  }
  static std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }
  std::uint64_t next() {
    std::uint64_t result = rotl(s[1] * 5, 7) * 9;
    std::uint64_t t = s[1] << 17;
    s[2] ^= s[0];
    s[3] ^= s[1];
    s[1] ^= s[2];
    s[0] ^= s[3];
    s[2] ^= t;
    s[3] = rotl(s[3], 45);
    return result;
  }
  double uniform() { return (next() >> 11) * 0x1.0p-53; }
};

struct Sampler {
  std::vector<double> cdf;
  std::vector<double> atoms;
  explicit Sampler(const DiscreteDistribution& d) : atoms(d.atoms()) {
    double acc = 0.0;
    for (double w : d.weights()) cdf.push_back(acc += w);
    cdf.back() = 1.0;
  }
  double draw(Rng& rng) const {
    double u = rng.uniform();
    std::size_t i = 0;
    while (i + 1 < cdf.size() && u >= cdf[i]) ++i;
    return atoms[i];
  }
};

}  // namespace detail

// N seeded paths of n steps; counts paths whose terminal sum (or running
// maximum) reaches x. Blocks use independent substreams keyed on the seed
// and block index, merged in fixed order, so the result is deterministic
// regardless of thread count.
inline EmpiricalTail simulate_tail(const SimSpec& spec, double x) {
  if (spec.samples == 0) throw std::domain_error("simulate_tail: samples must be positive");
  if (spec.n < 1) throw std::domain_error("simulate_tail: n must be >= 1");
  if (!spec.adapted) {
    if (spec.step_law.max() > 1.0 + 1e-12 || std::abs(spec.step_law.mean()) > 1e-12)
      throw std::domain_error("simulate_tail: step law must have support <= 1 and mean 0");
  }
  const detail::Sampler iid(spec.step_law);
  const detail::Sampler calm(two_point(0.25));   // used while the sum is >= 0
  const detail::Sampler rough(two_point(0.5));   // used while the sum is < 0

  const std::uint64_t block_size = 1 << 16;
  const std::uint64_t blocks = (spec.samples + block_size - 1) / block_size;
  auto run_block = [&](std::uint64_t b) -> std::uint64_t {
    detail::Rng rng(detail::splitmix64(spec.seed ^ (b * 0x9e3779b97f4a7c15ULL + 1)));
    std::uint64_t lo = b * block_size;
    std::uint64_t hi = std::min(lo + block_size, spec.samples);
    std::uint64_t hits = 0;
    for (std::uint64_t i = lo; i < hi; ++i) {
      double sum = 0.0, peak = 0.0;
      for (int k = 0; k < spec.n; ++k) {
        double step;
        if (spec.adapted)
          step = (sum >= 0.0 ? calm : rough).draw(rng);
        else
          step = iid.draw(rng);
        sum += step;
        if (sum > peak) peak = sum;
      }
      double stat = spec.maximal ? peak : sum;
      if (stat >= x) ++hits;
    }
    return hits;
  };

  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::future<std::uint64_t>> futures;
  std::uint64_t hits = 0;
  for (std::uint64_t b = 0; b < blocks; ++b) {
    if (workers <= 1) {
      hits += run_block(b);
    } else {
      futures.push_back(std::async(std::launch::async, run_block, b));
      if (futures.size() == workers || b + 1 == blocks) {
        for (auto& f : futures) hits += f.get();
        futures.clear();
      }
    }
  }
  EmpiricalTail t;
  t.x = x;
  t.samples = spec.samples;
  t.estimate = static_cast<double>(hits) / static_cast<double>(spec.samples);
  t.stderr_est = std::sqrt(t.estimate * (1.0 - t.estimate) / static_cast<double>(spec.samples));
  return t;
}

// Constraints satisfied by the adapted two-regime example: conditional
// variances never exceed 0.5 at any step.
inline MomentConstraints adapted_example_constraints(int n) {
  if (n < 2) throw std::domain_error("adapted_example_constraints: n must be >= 2");
  return MomentConstraints::uniform(n, 0.5, -kInf, kInf);
}

struct BoundMargin {
  const char* name;
  double bound;
  double margin;  // bound - estimate
  bool pass;
};

struct VerifyRecord {
  bool pass = true;
  double x = 0.0;
  double estimate = 0.0;
  double stderr_est = 0.0;
  std::vector<BoundMargin> margins;
};

// PASS iff the empirical tail stays below every bound field within
// stderr_mult standard errors.
inline VerifyRecord verify_bound(const BoundReport& report, const EmpiricalTail& tail,
                                 double stderr_mult = 4.0) {
  if (report.query.x != tail.x) throw std::domain_error("verify_bound: mismatched thresholds");
  VerifyRecord v;
  v.x = tail.x;
  v.estimate = tail.estimate;
  v.stderr_est = tail.stderr_est;
  double slack = stderr_mult * tail.stderr_est;
  auto check = [&](const char* name, double bound) {
    bool ok = tail.estimate <= bound + slack;
    v.margins.push_back({name, bound, bound - tail.estimate, ok});
    v.pass = v.pass && ok;
  };
  check("g2", report.g2);
  check("g2_oracle", report.g2_oracle_check);
  check("hoeffding", report.hoeffding);
  check("chernoff", report.chernoff_check);
  check("poisson_closed", report.poisson_closed);
  check("poisson_g2", report.poisson_g2);
  return v;
}

}  // namespace tailbounds
