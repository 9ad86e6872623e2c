#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace gm {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  [[nodiscard]] double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Welford accumulator with Chan's pairwise merge.
struct RunningMoments {
  std::size_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void push(double x) {
    ++count;
    const double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
  }

  void merge(const RunningMoments& other);

  /// Unbiased sample variance; 0 for fewer than two samples.
  [[nodiscard]] double variance() const {
    return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0;
  }
  [[nodiscard]] double standard_error() const {
    return count > 0 ? std::sqrt(variance() / static_cast<double>(count)) : 0.0;
  }
};

// 1 / (1 + e^{-x}) without overflow.
inline double logistic(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// log(1 + e^{x}) without overflow.
inline double softplus(double x) {
  if (x > 0.0) {
    return x + std::log1p(std::exp(-x));
  }
  return std::log1p(std::exp(x));
}

// log(logistic(x)).
inline double log_logistic(double x) { return -softplus(-x); }

/// log(n!) from a cached log-gamma table (falls back to lgamma past the table).
double log_factorial(long n);

double log_binomial_coefficient(long n, long k);

/// log of the Binomial(n, p) mass at k; -inf outside the support.
double log_binomial_pmf(long n, long k, double p);

/// Binomial(n, p) weights with a fixed summation order: largest mass first,
/// walking outward from the mode. Zero-mass entries are dropped from the order.
class BinomialLaw {
 public:
  BinomialLaw(long n, double p);

  [[nodiscard]] long trials() const { return n_; }
  [[nodiscard]] double probability() const { return p_; }
  [[nodiscard]] double weight(long k) const { return weights_[static_cast<std::size_t>(k)]; }
  [[nodiscard]] double log_weight(long k) const { return log_weights_[static_cast<std::size_t>(k)]; }
  [[nodiscard]] std::span<const double> weights() const { return weights_; }
  [[nodiscard]] std::span<const long> order() const { return order_; }

  /// Sum over k of weight(k) * f(k), accumulated in mass-descending order.
  template <class F>
  [[nodiscard]] double expect(F&& f) const {
    CompensatedSum sum;
    for (long k : order_) {
      sum.add(weights_[static_cast<std::size_t>(k)] * f(k));
    }
    return sum.value();
  }

 private:
  long n_;
  double p_;
  std::vector<double> log_weights_;
  std::vector<double> weights_;
  std::vector<long> order_;
};

}  // namespace gm
