#pragma once

#include <span>
#include <vector>

#include "afrit/linalg.hpp"
#include "afrit/lti.hpp"

namespace afrit {

/// PID gains [K_P, K_I (1/s), K_D (s)].
struct ControllerParams {
  Vec3 theta = Vec3::Zero();

  ControllerParams() = default;
  explicit ControllerParams(const Vec3& t) : theta(t) {}
  ControllerParams(double kp, double ki, double kd) : theta(kp, ki, kd) {}

  double kp() const { return theta(0); }
  double ki() const { return theta(1); }
  double kd() const { return theta(2); }

  bool finite() const { return theta.allFinite(); }
  bool in_positive_orthant() const { return (theta.array() > 0.0).all(); }
};

/// The PID basis beta(z) = [1, Ts / (1 - z^-1), (1 - z^-1) / Ts]^T as three
/// stateful filters sharing one input stream.
class PidBasis {
 public:
  /// Throws ConfigError unless ts > 0.
  explicit PidBasis(double ts);

  /// beta(z) x(k); advances all three filters.
  Vec3 step(double x);
  void reset();

  double ts() const noexcept { return ts_; }

 private:
  double ts_;
  RationalFilter proportional_;
  RationalFilter integral_;
  RationalFilter derivative_;
};

/// u(k) = theta^T beta(z) e(k). Advances the basis.
double control_step(const ControllerParams& params, PidBasis& basis, double e);

/// beta(z) x(k) for every sample, from a zero basis state.
std::vector<Vec3> regress_basis(double ts, std::span<const double> x);

/// C(theta, z) = theta^T beta(z) as a single rational filter:
///   [(Kp Ts + Ki Ts^2 + Kd) - (Kp Ts + 2 Kd) q + Kd q^2] / [Ts (1 - q)].
RationalFilter pid_filter(const ControllerParams& params, double ts);

}  // namespace afrit
