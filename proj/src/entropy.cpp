#include "gm/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace gm {

namespace {

void require_open_unit(double x, const char* what) {
  if (!(x > 0.0 && x < 1.0)) {
    throw std::domain_error(std::string(what) + ": argument must lie in (0, 1), got " +
                            std::to_string(x));
  }
}

// Series for h(z) - h(q) in powers of (2q - 1)^2, used near q = 1/2.
double entropy_gap_series(double t, double theta) {
  const double s = 2.0 * theta - 1.0;
  const double s2 = s * s;
  const double one_minus_s2 = 4.0 * theta * (1.0 - theta);
  const double t2 = t * t;

  double t_pow = t2;       // t^{2k}
  double s_partial = 1.0;  // sum_{j<k} s^{2j}
  double s_pow = 1.0;      // s^{2(k-1)}
  double sum = 0.0;
  for (int k = 1; k <= 200; ++k) {
    const double kk = static_cast<double>(k);
    const double term = t_pow * one_minus_s2 * s_partial / (kk * (2.0 * kk - 1.0));
    sum += term;
    if (term <= 1e-19 * sum) {
      break;
    }
    t_pow *= t2;
    s_pow *= s2;
    s_partial += s_pow;
  }
  return 0.5 * sum;
}

}  // namespace

UnitInterval::UnitInterval(double value) : value_(value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw std::domain_error("UnitInterval: value outside [0, 1]: " + std::to_string(value));
  }
}

double binary_entropy(UnitInterval x) {
  const double v = x.value();
  if (v == 0.0 || v == 1.0) {
    return 0.0;
  }
  // Work with the smaller of v and 1 - v; 1 - v is exact for v >= 1/2.
  const double small = v <= 0.5 ? v : 1.0 - v;
  return -small * std::log(small) - (1.0 - small) * std::log1p(-small);
}

double binary_entropy(double x) { return binary_entropy(UnitInterval(x)); }

double logit(double x) {
  if (x <= 0.5) {
    return std::log(x) - std::log1p(-x);
  }
  const double y = 1.0 - x;
  return std::log1p(-y) - std::log(y);
}

double binary_entropy_derivative(int order, double x) {
  if (order < 1 || order > 4) {
    throw std::invalid_argument("binary_entropy_derivative: order must be 1..4, got " +
                                std::to_string(order));
  }
  require_open_unit(x, "binary_entropy_derivative");
  const double y = 1.0 - x;
  const double xy = x * y;
  switch (order) {
    case 1:
      return -logit(x);
    case 2:
      return -1.0 / xy;
    case 3:
      return -(2.0 * x - 1.0) / (xy * xy);
    default:
      return -2.0 * (1.0 - 3.0 * x + 3.0 * x * x) / (xy * xy * xy);
  }
}

double entropy_gap(double q, double theta) {
  UnitInterval{q};
  UnitInterval{theta};
  const double t = 2.0 * q - 1.0;
  if (std::abs(t) <= 0.25) {
    return entropy_gap_series(t, theta);
  }
  // Both arguments reflect through 1/2 without changing the gap, so take
  // a = min(q, 1 - q) and theta <= 1/2; then z = a + delta with delta >= 0 and
  // h(a + delta) - h(a) is expanded so no O(1) terms cancel.
  const double at = std::abs(t);
  const double a = 0.5 * (1.0 - at);
  const double th = std::min(theta, 1.0 - theta);
  if (a == 0.0) {
    return binary_entropy(th);
  }
  const double delta = th * at;
  const double z = a + delta;
  const double one_minus_z = (1.0 - a) - delta;
  return delta * std::log(one_minus_z / z) - a * std::log1p(delta / a) -
         (1.0 - a) * std::log1p(-delta / (1.0 - a));
}

double entropic_potential(double q, double x) {
  if (!(q >= 0.5 && q < 1.0)) {
    throw std::domain_error("entropic_potential: q must lie in [1/2, 1)");
  }
  require_open_unit(x, "entropic_potential");
  return -binary_entropy_derivative(3, q) * binary_entropy(x) +
         binary_entropy_derivative(1, q) * binary_entropy_derivative(2, x);
}

double ratio_slope_kernel(double z) {
  require_open_unit(z, "ratio_slope_kernel");
  return 2.0 * z - 1.0 - 2.0 * (1.0 - 3.0 * z + 3.0 * z * z) * logit(z);
}

double ratio_slope_kernel_derivative(double z) {
  require_open_unit(z, "ratio_slope_kernel_derivative");
  const double u = 2.0 * z - 1.0;
  return -6.0 * u * logit(z) - 2.0 * (u * u) / (z * (1.0 - z));
}

double entropy_derivative_ratio(double z) {
  require_open_unit(z, "entropy_derivative_ratio");
  if (z == 0.5) {
    throw std::domain_error("entropy_derivative_ratio: removable singularity at z = 1/2");
  }
  const double zz = z * (1.0 - z);
  return zz * zz / (2.0 * z - 1.0) * logit(z);
}

double entropy_derivative_ratio_slope(double z) {
  require_open_unit(z, "entropy_derivative_ratio_slope");
  if (z == 0.5) {
    throw std::domain_error("entropy_derivative_ratio_slope: undefined at z = 1/2");
  }
  const double u = 2.0 * z - 1.0;
  return z * (1.0 - z) / (u * u) * ratio_slope_kernel(z);
}

}  // namespace gm
