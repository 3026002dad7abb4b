#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace afrit {

/// Discrete-time SISO rational transfer function in the backward shift
/// q = z^-1:
///
///     y(k) * (d0 + d1 q + d2 q^2 + ...) = u(k) * (n0 + n1 q + n2 q^2 + ...)
///
/// Realized in transposed direct form II with an internal delay line, so a
/// filter is a stateful value. Coefficients are normalized so that d0 == 1.
class RationalFilter {
 public:
  /// Throws ConfigError when the denominator is empty, d0 == 0, or any
  /// coefficient is not finite. An empty numerator is the zero filter.
  RationalFilter(std::vector<double> num, std::vector<double> den);

  static RationalFilter identity();
  static RationalFilter zero();
  static RationalFilter gain(double k);

  /// Advances one sample and returns y(k).
  double step(double u);

  /// Filters `u` starting from a zero state. The filter itself is untouched.
  std::vector<double> filter(std::span<const double> u) const;

  /// Filters `u` continuing from (and advancing) the current state.
  std::vector<double> apply(std::span<const double> u);

  void reset();

  /// Overwrites the delay line. Throws ConfigError on a size mismatch.
  void set_state(std::span<const double> state);

  const std::vector<double>& numerator() const noexcept { return num_; }
  const std::vector<double>& denominator() const noexcept { return den_; }
  const std::vector<double>& state() const noexcept { return state_; }

  /// max(deg num, deg den) in q.
  std::size_t order() const noexcept { return state_.size(); }

  /// True when n0 == 0, i.e. y(k) does not depend on u(k).
  bool strictly_proper() const noexcept;

  /// DC gain N(1)/D(1); infinite for a pole at z = 1.
  double dc_gain() const;

  /// Roots in the z-plane of the denominator and numerator.
  std::vector<std::complex<double>> poles() const;
  std::vector<std::complex<double>> zeros() const;

  /// All poles strictly inside the unit circle.
  bool is_stable() const;

 private:
  std::vector<double> num_;
  std::vector<double> den_;
  std::vector<double> state_;
};

/// 1 - f, combined over f's denominator.
RationalFilter one_minus(const RationalFilter& f);

/// The cascade "first, then second" (product of transfer functions).
RationalFilter series(const RationalFilter& first, const RationalFilter& second);

/// f + g over the common denominator.
RationalFilter parallel(const RationalFilter& f, const RationalFilter& g);

/// Polynomial product in q.
std::vector<double> poly_mul(std::span<const double> a, std::span<const double> b);

/// Roots in z of sum c_i q^i, i.e. of c0 z^m + c1 z^(m-1) + ... + cm, after
/// trailing zero coefficients are dropped.
std::vector<std::complex<double>> q_polynomial_roots(std::span<const double> coeffs);

/// Stable discrete reference model G_m(z) the closed loop should match.
class ReferenceModel {
 public:
  /// Throws ConfigError unless every pole lies strictly inside the unit
  /// circle.
  explicit ReferenceModel(RationalFilter filter);

  /// 0.0095 / (z - 0.99), the literal coefficients used by default.
  static ReferenceModel nominal();

  /// Zero-order-hold discretization of 1 / (tau s + 1):
  /// (1 - a) / (z - a) with a = exp(-ts / tau). Unit DC gain.
  static ReferenceModel first_order_zoh(double tau, double ts);

  const RationalFilter& filter() const noexcept { return filter_; }

 private:
  RationalFilter filter_;
};

}  // namespace afrit
