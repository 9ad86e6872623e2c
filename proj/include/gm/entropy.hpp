#pragma once

// Binary entropy and the derivative identities behind the single-step
// information bound. All logarithms are natural.

namespace gm {

/// A real number checked to lie in [0, 1] at construction.
class UnitInterval {
 public:
  explicit UnitInterval(double value);
  [[nodiscard]] double value() const { return value_; }

 private:
  double value_;
};

/// h(x) = -x log x - (1-x) log(1-x), with h(0) = h(1) = 0.
double binary_entropy(UnitInterval x);
double binary_entropy(double x);

/// log(x / (1 - x)), evaluated without forming 1 - x when x > 1/2.
double logit(double x);

/// d^order h / dx^order for order in {1, 2, 3, 4} and x in (0, 1).
/// Throws std::invalid_argument for other orders and std::domain_error at
/// the endpoints.
double binary_entropy_derivative(int order, double x);

/// h(z) - h(q) with z = q theta + (1-q)(1-theta).
///
/// Accurate to relative precision even when q is within 1e-9 of 1/2, where
/// the naive difference of two values near log 2 is pure rounding noise.
/// Accepts any q in [0, 1]; theta in [0, 1].
double entropy_gap(double q, double theta);

/// f(x) = -h'''(q) h(x) + h'(q) h''(x) for the fixed parameter q in [1/2, 1).
/// f(z) >= f(q) for every z in [1/2, q] is the single-step inequality.
double entropic_potential(double q, double x);

/// g(z) = 2z - 1 - 2(1 - 3z + 3z^2) log(z / (1 - z)); g(1/2) = 0, g <= 0 above.
double ratio_slope_kernel(double z);

/// g'(z) = -6(2z - 1) log(z / (1 - z)) - 2(1 - 4z + 4z^2) / (z(1 - z)).
double ratio_slope_kernel_derivative(double z);

/// h'(z) / h'''(z). Removable singularity at z = 1/2; rejected there.
double entropy_derivative_ratio(double z);

/// d/dz [h'(z) / h'''(z)] = z(1 - z) g(z) / (2z - 1)^2, for z != 1/2.
double entropy_derivative_ratio_slope(double z);

}  // namespace gm
