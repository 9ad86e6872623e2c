#include "gm/numerics.hpp"

#include <limits>
#include <stdexcept>

namespace gm {

namespace {

constexpr long kLogFactorialTableSize = 1L << 17;

const std::vector<double>& log_factorial_table() {
  static const std::vector<double> table = [] {
    std::vector<double> t(static_cast<std::size_t>(kLogFactorialTableSize));
    for (long i = 0; i < kLogFactorialTableSize; ++i) {
      t[static_cast<std::size_t>(i)] = std::lgamma(static_cast<double>(i) + 1.0);
    }
    return t;
  }();
  return table;
}

}  // namespace

void RunningMoments::merge(const RunningMoments& other) {
  if (other.count == 0) {
    return;
  }
  if (count == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(count);
  const double nb = static_cast<double>(other.count);
  const double n = na + nb;
  const double delta = other.mean - mean;
  mean += delta * (nb / n);
  m2 += other.m2 + delta * delta * (na * nb / n);
  count += other.count;
}

double log_factorial(long n) {
  if (n < 0) {
    throw std::domain_error("log_factorial: negative argument");
  }
  if (n < kLogFactorialTableSize) {
    return log_factorial_table()[static_cast<std::size_t>(n)];
  }
  return std::lgamma(static_cast<double>(n) + 1.0);
}

double log_binomial_coefficient(long n, long k) {
  if (k < 0 || k > n) {
    return -std::numeric_limits<double>::infinity();
  }
  return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

double log_binomial_pmf(long n, long k, double p) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  if (n < 0) {
    throw std::domain_error("log_binomial_pmf: negative trial count");
  }
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::domain_error("log_binomial_pmf: probability outside [0, 1]");
  }
  if (k < 0 || k > n) {
    return kNegInf;
  }
  if (p == 0.0) {
    return k == 0 ? 0.0 : kNegInf;
  }
  if (p == 1.0) {
    return k == n ? 0.0 : kNegInf;
  }
  return log_binomial_coefficient(n, k) + static_cast<double>(k) * std::log(p) +
         static_cast<double>(n - k) * std::log1p(-p);
}

namespace {

std::size_t support_size(long n) {
  if (n < 0) {
    throw std::domain_error("BinomialLaw: negative trial count");
  }
  return static_cast<std::size_t>(n) + 1;
}

}  // namespace

BinomialLaw::BinomialLaw(long n, double p)
    : n_(n), p_(p), log_weights_(support_size(n)), weights_(log_weights_.size()) {
  long mode = 0;
  for (long k = 0; k <= n; ++k) {
    const auto i = static_cast<std::size_t>(k);
    log_weights_[i] = log_binomial_pmf(n, k, p);
    weights_[i] = std::exp(log_weights_[i]);
    if (log_weights_[i] > log_weights_[static_cast<std::size_t>(mode)]) {
      mode = k;
    }
  }
  // Rounding in the large log-factorials leaves the total off 1 by up to
  // ~1e-13 for n in the thousands; renormalize in log space.
  CompensatedSum total;
  for (double w : weights_) {
    total.add(w);
  }
  const double log_total = std::log(total.value());
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    log_weights_[i] -= log_total;
    weights_[i] = std::exp(log_weights_[i]);
  }

  // The pmf is unimodal, so merging the two tails outward from the mode
  // yields a non-increasing sequence of weights.
  order_.reserve(static_cast<std::size_t>(n + 1));
  order_.push_back(mode);
  long left = mode - 1;
  long right = mode + 1;
  while (left >= 0 || right <= n) {
    if (right > n || (left >= 0 && weights_[static_cast<std::size_t>(left)] >=
                                       weights_[static_cast<std::size_t>(right)])) {
      order_.push_back(left--);
    } else {
      order_.push_back(right++);
    }
  }
  while (!order_.empty() && weights_[static_cast<std::size_t>(order_.back())] == 0.0) {
    order_.pop_back();
  }
}

}  // namespace gm
