#include "afrit/controller.hpp"

#include <cmath>

#include "afrit/errors.hpp"

namespace afrit {

namespace {

double checked_ts(double ts) {
  if (!(ts > 0.0) || !std::isfinite(ts)) throw ConfigError("PidBasis: sampling time must be positive");
  return ts;
}

}  // namespace

PidBasis::PidBasis(double ts)
    : ts_(checked_ts(ts)),
      proportional_(RationalFilter::identity()),
      integral_({ts, 0.0}, {1.0, -1.0}),
      derivative_({1.0 / ts, -1.0 / ts}, {1.0}) {}

Vec3 PidBasis::step(double x) {
  return {proportional_.step(x), integral_.step(x), derivative_.step(x)};
}

void PidBasis::reset() {
  proportional_.reset();
  integral_.reset();
  derivative_.reset();
}

double control_step(const ControllerParams& params, PidBasis& basis, double e) {
  return params.theta.dot(basis.step(e));
}

std::vector<Vec3> regress_basis(double ts, std::span<const double> x) {
  PidBasis basis(ts);
  std::vector<Vec3> out;
  out.reserve(x.size());
  for (double v : x) out.push_back(basis.step(v));
  return out;
}

RationalFilter pid_filter(const ControllerParams& params, double ts) {
  checked_ts(ts);
  const double kp = params.kp(), ki = params.ki(), kd = params.kd();
  return RationalFilter({kp * ts + ki * ts * ts + kd, -(kp * ts + 2.0 * kd), kd}, {ts, -ts});
}

}  // namespace afrit
