#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "afrit/controller.hpp"
#include "afrit/linalg.hpp"
#include "afrit/lti.hpp"

namespace afrit {

/// One row of the convexified tuning problem: the fit residual for gains
/// theta is phi^T theta - d.
struct RegressorSample {
  Vec3 phi = Vec3::Zero();
  double d = 0.0;
};

/// phi^T theta - d, the auxiliary error of the linear-in-theta tuning cost.
double auxiliary_error(const RegressorSample& s, const Vec3& theta);

/// Streams (y(k), u(k)) into regressor samples:
///   phi(k) = beta(z) {1 - G_m(z)} y(k),   d(k) = G_m(z) u(k).
class RegressorGenerator {
 public:
  RegressorGenerator(const ReferenceModel& gm, double ts);

  /// Advances every internal filter by exactly one sample.
  RegressorSample step(double y, double u);
  void reset();

 private:
  RationalFilter gm_complement_;
  PidBasis basis_;
  RationalFilter gm_on_u_;
};

enum class ForgettingMode { NoForget, Exponential, Directional, Resetting };

std::string_view to_string(ForgettingMode mode);
/// Accepts "noforget", "ef", "df", "er" (and the long names). Throws
/// ConfigError otherwise.
ForgettingMode parse_forgetting_mode(std::string_view name);

struct EstimatorConfig {
  ForgettingMode mode = ForgettingMode::Directional;
  double mu = 0.99;
  double epsilon = 1e-3;
  Mat3 p0 = 100.0 * Mat3::Identity();
  Mat3 r0 = 0.01 * Mat3::Identity();
  Mat3 r_inf = 0.01 * Mat3::Identity();
  Vec3 theta0 = Vec3(0.1, 0.1, 0.01);
};

/// Value-semantic estimator state; every update returns a new state.
///
/// For DF and ER, P is kept equal to R^-1. For NoForget and EF, P follows
/// the covariance recursion and R is a shadow information matrix kept for
/// windup diagnostics.
struct EstimatorState {
  ForgettingMode mode = ForgettingMode::Directional;
  double mu = 1.0;
  double epsilon = 0.0;
  Vec3 theta_hat = Vec3::Zero();
  Mat3 P = Mat3::Identity();
  Mat3 R = Mat3::Identity();
  Mat3 r_inf = Mat3::Zero();
  bool deadzone_active = false;
  std::size_t steps = 0;
};

/// Validates `cfg` and builds the initial state. Throws ConfigError when
/// mu is outside (0, 1], epsilon < 0, the initial matrices are not SPD, or
/// (ER) R(0) - R_inf is not positive semidefinite. DF and ER take P(0) as
/// R(0)^-1; NoForget forces mu = 1.
EstimatorState make_estimator(const EstimatorConfig& cfg);

/// Covariance RLS for NoForget and EF:
///   P(k) = [P - P phi phi^T P / (mu + phi^T P phi)] / mu
///   theta(k) = theta(k-1) + P(k) phi [d - phi^T theta(k-1)]
/// and the shadow information recursion of ef_information.
EstimatorState rls_update(const EstimatorState& state, const RegressorSample& s);

/// Directional forgetting: only the information along phi is discounted.
///   R(k) = [I - M] R(k-1) + phi phi^T,
///   M = (1 - mu) R phi phi^T / (phi^T R phi)           if |phi| > eps
/// P is carried as the exact inverse of R by two Sherman-Morrison steps. A
/// regressor inside the deadzone (|phi| <= eps) leaves the state untouched.
EstimatorState df_update(const EstimatorState& state, const RegressorSample& s);

/// Exponential resetting:
///   R(k) = mu R(k-1) + (1 - mu) R_inf + phi phi^T,  P(k) = R(k)^-1.
EstimatorState er_update(const EstimatorState& state, const RegressorSample& s);

/// R(k) = mu R(k-1) + phi phi^T. Touches only R.
EstimatorState ef_information(const EstimatorState& state, const RegressorSample& s);

/// Dispatches on state.mode.
EstimatorState update(const EstimatorState& state, const RegressorSample& s);

struct EigenRange {
  double min = 0.0;
  double max = 0.0;
};

/// Extreme eigenvalues of the covariance P.
EigenRange eigen_trace(const EstimatorState& state);

/// Extreme eigenvalues of the information matrix R.
EigenRange information_eigen_range(const EstimatorState& state);

}  // namespace afrit
