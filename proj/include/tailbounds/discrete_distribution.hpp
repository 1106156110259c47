#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace tailbounds {

// Neumaier compensated sum.
inline double stable_sum(std::span<const double> xs) {
  double s = 0.0, c = 0.0;
  for (double x : xs) {
    double t = s + x;
    if (std::abs(s) >= std::abs(x))
      c += (s - t) + x;
    else
      c += (x - t) + s;
    s = t;
  }
  return s + c;
}

// Finite law given by a strictly increasing atom list and weights summing to 1.
class DiscreteDistribution {
 public:
  DiscreteDistribution(std::vector<double> atoms, std::vector<double> weights)
      : atoms_(std::move(atoms)), weights_(std::move(weights)) {
    if (atoms_.empty() || atoms_.size() != weights_.size())
      throw std::invalid_argument("DiscreteDistribution: atom/weight size mismatch or empty");
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      if (!std::isfinite(atoms_[i]))
        throw std::invalid_argument("DiscreteDistribution: non-finite atom");
      if (i > 0 && !(atoms_[i] > atoms_[i - 1]))
        throw std::invalid_argument("DiscreteDistribution: atoms not strictly increasing");
      if (!(weights_[i] >= 0.0))
        throw std::invalid_argument("DiscreteDistribution: negative weight");
    }
    double total = stable_sum(weights_);
    if (std::abs(total - 1.0) > 1e-12)
      throw std::invalid_argument("DiscreteDistribution: weights do not sum to 1");
  }

  const std::vector<double>& atoms() const { return atoms_; }
  const std::vector<double>& weights() const { return weights_; }
  std::size_t size() const { return atoms_.size(); }
  double min() const { return atoms_.front(); }
  double max() const { return atoms_.back(); }

  double mean() const { return moment(1, 0.0); }
  double variance() const { return central_moment(2); }
  double stddev() const { return std::sqrt(variance()); }

  double central_moment(int k) const { return moment(k, mean()); }

  double skewness() const {
    double s2 = variance();
    return central_moment(3) / (s2 * std::sqrt(s2));
  }

  double kurtosis() const {
    double s2 = variance();
    return central_moment(4) / (s2 * s2);
  }

  // P{X >= x}
  double tail(double x) const {
    double t = 0.0, c = 0.0;
    for (std::size_t i = atoms_.size(); i-- > 0;) {
      if (atoms_[i] < x) break;
      double y = weights_[i];
      double u = t + y;
      c += (t - u) + y;
      t = u;
    }
    return std::min(t + c, 1.0);
  }

 private:
  double moment(int k, double center) const {
    std::vector<double> terms(atoms_.size());
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      double d = atoms_[i] - center;
      double p = 1.0;
      for (int j = 0; j < k; ++j) p *= d;
      terms[i] = weights_[i] * p;
    }
    return stable_sum(terms);
  }

  std::vector<double> atoms_;
  std::vector<double> weights_;
};

}  // namespace tailbounds
