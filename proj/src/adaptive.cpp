#include "afrit/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Cholesky>

#include "afrit/errors.hpp"

namespace afrit {

double auxiliary_error(const RegressorSample& s, const Vec3& theta) {
  return s.phi.dot(theta) - s.d;
}

RegressorGenerator::RegressorGenerator(const ReferenceModel& gm, double ts)
    : gm_complement_(one_minus(gm.filter())), basis_(ts), gm_on_u_(gm.filter()) {
  gm_complement_.reset();
  gm_on_u_.reset();
}

RegressorSample RegressorGenerator::step(double y, double u) {
  RegressorSample s;
  s.phi = basis_.step(gm_complement_.step(y));
  s.d = gm_on_u_.step(u);
  return s;
}

void RegressorGenerator::reset() {
  gm_complement_.reset();
  basis_.reset();
  gm_on_u_.reset();
}

std::string_view to_string(ForgettingMode mode) {
  switch (mode) {
    case ForgettingMode::NoForget: return "noforget";
    case ForgettingMode::Exponential: return "ef";
    case ForgettingMode::Directional: return "df";
    case ForgettingMode::Resetting: return "er";
  }
  return "?";
}

ForgettingMode parse_forgetting_mode(std::string_view name) {
  if (name == "noforget" || name == "none" || name == "rls") return ForgettingMode::NoForget;
  if (name == "ef" || name == "exponential") return ForgettingMode::Exponential;
  if (name == "df" || name == "directional") return ForgettingMode::Directional;
  if (name == "er" || name == "resetting") return ForgettingMode::Resetting;
  throw ConfigError("unknown forgetting mode '" + std::string(name) + "'");
}

namespace {

bool is_positive_semidefinite(const Mat3& m) {
  if (!m.allFinite()) return false;
  const auto ev = symmetric_eigenvalues(m);
  return ev[0] >= -1e-12 * std::max(1.0, std::abs(ev[2]));
}

Mat3 spd_inverse(const Mat3& m, const char* what) {
  Eigen::LLT<Mat3> llt(symmetrize(m));
  if (llt.info() != Eigen::Success) throw NumericalBreakdown(what);
  return symmetrize(llt.solve(Mat3::Identity()));
}

void require_spd(const Mat3& m, const char* what) {
  if (!is_positive_definite(m)) throw NumericalBreakdown(what);
}

Vec3 innovation_step(const Vec3& theta, const Mat3& p, const RegressorSample& s) {
  return theta + p * s.phi * (s.d - s.phi.dot(theta));
}

}  // namespace

EstimatorState make_estimator(const EstimatorConfig& cfg) {
  if (!(cfg.mu > 0.0 && cfg.mu <= 1.0)) throw ConfigError("forgetting factor mu must lie in (0, 1]");
  if (!(cfg.epsilon >= 0.0) || !std::isfinite(cfg.epsilon))
    throw ConfigError("deadzone epsilon must be finite and >= 0");
  if (!cfg.theta0.allFinite()) throw ConfigError("initial gains must be finite");

  EstimatorState st;
  st.mode = cfg.mode;
  st.mu = cfg.mode == ForgettingMode::NoForget ? 1.0 : cfg.mu;
  st.epsilon = cfg.epsilon;
  st.theta_hat = cfg.theta0;
  st.r_inf = symmetrize(cfg.r_inf);

  switch (cfg.mode) {
    case ForgettingMode::NoForget:
    case ForgettingMode::Exponential:
      if (!is_positive_definite(cfg.p0)) throw ConfigError("P(0) must be symmetric positive definite");
      if (!is_positive_semidefinite(cfg.r0)) throw ConfigError("R(0) must be positive semidefinite");
      st.P = symmetrize(cfg.p0);
      st.R = symmetrize(cfg.r0);
      break;
    case ForgettingMode::Resetting:
      if (!is_positive_definite(cfg.r_inf)) throw ConfigError("R_inf must be symmetric positive definite");
      if (!is_positive_semidefinite(cfg.r0 - cfg.r_inf)) throw ConfigError("ER requires R(0) >= R_inf");
      [[fallthrough]];
    case ForgettingMode::Directional:
      if (!is_positive_definite(cfg.r0)) throw ConfigError("R(0) must be symmetric positive definite");
      st.R = symmetrize(cfg.r0);
      st.P = spd_inverse(st.R, "R(0) is not invertible");
      break;
  }
  return st;
}

EstimatorState ef_information(const EstimatorState& state, const RegressorSample& s) {
  EstimatorState next = state;
  next.R = symmetrize(state.mu * state.R + s.phi * s.phi.transpose());
  return next;
}

EstimatorState rls_update(const EstimatorState& state, const RegressorSample& s) {
  const double mu = state.mode == ForgettingMode::NoForget ? 1.0 : state.mu;
  const Vec3 p_phi = state.P * s.phi;
  const double denom = mu + s.phi.dot(p_phi);
  if (!(denom > 0.0) || !std::isfinite(denom))
    throw NumericalBreakdown("RLS gain denominator mu + phi'P phi is not positive");

  EstimatorState next = ef_information(state, s);
  next.mu = mu;
  next.P = symmetrize((state.P - p_phi * p_phi.transpose() / denom) / mu);
  require_spd(next.P, "covariance lost positive definiteness");
  next.theta_hat = innovation_step(state.theta_hat, next.P, s);
  next.deadzone_active = false;
  ++next.steps;
  return next;
}

EstimatorState df_update(const EstimatorState& state, const RegressorSample& s) {
  if (s.phi.norm() <= state.epsilon) {
    EstimatorState next = state;
    next.deadzone_active = true;
    ++next.steps;
    return next;
  }
  const double mu = state.mu;
  const Vec3 r_phi = state.R * s.phi;
  const double info = s.phi.dot(r_phi);
  if (!(info >= 1e-300)) throw NumericalBreakdown("directional forgetting: phi'R phi underflow");

  EstimatorState next = state;
  const Mat3 phi_phi = s.phi * s.phi.transpose();
  // [I - M] R with M = (1 - mu) R phi phi' / (phi'R phi).
  next.R = symmetrize(state.R - (1.0 - mu) * r_phi * r_phi.transpose() / info + phi_phi);

  // Inverse of [I - M] R, then the rank-one downdate for + phi phi'.
  const Mat3 p_bar = state.P + ((1.0 - mu) / mu) * phi_phi / info;
  const Vec3 pb_phi = p_bar * s.phi;
  next.P = symmetrize(p_bar - pb_phi * pb_phi.transpose() / (1.0 + s.phi.dot(pb_phi)));
  require_spd(next.P, "directional forgetting: covariance lost positive definiteness");
  require_spd(next.R, "directional forgetting: information matrix lost positive definiteness");

  next.theta_hat = innovation_step(state.theta_hat, next.P, s);
  next.deadzone_active = false;
  ++next.steps;
  return next;
}

EstimatorState er_update(const EstimatorState& state, const RegressorSample& s) {
  EstimatorState next = state;
  next.R = symmetrize(state.mu * state.R + (1.0 - state.mu) * state.r_inf +
                      s.phi * s.phi.transpose());
  next.P = spd_inverse(next.R, "exponential resetting: information matrix is singular");
  next.theta_hat = innovation_step(state.theta_hat, next.P, s);
  next.deadzone_active = false;
  ++next.steps;
  return next;
}

EstimatorState update(const EstimatorState& state, const RegressorSample& s) {
  if (!s.phi.allFinite() || !std::isfinite(s.d))
    throw NumericalBreakdown("non-finite regressor sample");
  switch (state.mode) {
    case ForgettingMode::NoForget:
    case ForgettingMode::Exponential: return rls_update(state, s);
    case ForgettingMode::Directional: return df_update(state, s);
    case ForgettingMode::Resetting: return er_update(state, s);
  }
  return state;
}

EigenRange eigen_trace(const EstimatorState& state) {
  const auto ev = symmetric_eigenvalues(state.P);
  return {ev[0], ev[2]};
}

EigenRange information_eigen_range(const EstimatorState& state) {
  const auto ev = symmetric_eigenvalues(state.R);
  return {ev[0], ev[2]};
}

}  // namespace afrit
