#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <utility>
#include <variant>
#include <vector>

#include "afrit/lti.hpp"

namespace afrit {

/// LTI plant y = gain * G(z) u.
struct LtiPlantParams {
  RationalFilter filter = RationalFilter::identity();
  double gain = 1.0;
};

/// Rate-independent Bouc-Wen hysteresis feeding a first-order lag:
///
///   dh   = du * (A - (beta sgn(du h) + gamma) |h|^n) * (1 + asymmetry sgn(du))
///   x    = gain * (alpha * stiffness * u + (1 - alpha) * stiffness * h) + offset
///   y+   = a y + (1 - a) x,    a = exp(-Ts / time_constant)
///
/// The direction-dependent rate factor makes ascending branches steeper
/// than descending ones, so the loop is not odd-symmetric when
/// asymmetry != 0.
struct BoucWenParams {
  double stiffness = 1.0;
  double alpha = 0.5;
  double a = 1.0;
  double beta = 0.6;
  double gamma = 0.2;
  double n = 1.0;
  double asymmetry = 0.4;
  double gain = 10.0;
  double offset = 0.0;
  double time_constant = 0.4;  // s
};

/// Parameter overrides applied once the simulated time reaches `time`.
struct ParameterSwitch {
  double time = 0.0;
  std::optional<double> gain;
  std::optional<double> time_constant;  // Bouc-Wen lag only
  std::optional<RationalFilter> filter;  // LTI only
};

struct PlantConfig {
  std::variant<LtiPlantParams, BoucWenParams> model = LtiPlantParams{};
  std::vector<ParameterSwitch> schedule;
  double noise_std = 0.0;
  std::optional<std::pair<double, double>> saturation;
  double ts = 0.01;
};

/// Simulated plant with seeded measurement noise.
///
/// Timing: `step(u(k), t_k)` applies u(k) over one sampling period and
/// returns the measurement y(k+1). A strictly proper LTI filter G is
/// realized as z*G, so the loop sees exactly G; a filter with direct
/// feedthrough (e.g. identity) acquires one sample of delay.
class PlantModel {
 public:
  /// Throws ConfigError on non-increasing switch times, negative noise,
  /// an empty saturation interval, ts <= 0, or n < 1.
  PlantModel(PlantConfig cfg, std::uint64_t seed);

  /// Measured y(0).
  double initial_output();

  /// Applies switches with time <= t, saturates u, advances one period and
  /// returns the noisy measurement. `t` must be nondecreasing.
  double step(double u, double t);

  /// Input actually applied on the last step (after saturation).
  double last_applied_input() const noexcept { return applied_; }

  /// Noise-free output y(k).
  double true_output() const noexcept { return y_; }

  /// Bouc-Wen hysteretic state h (0 for LTI plants).
  double hysteresis_state() const noexcept { return h_; }

 private:
  double noise();
  void apply_switches(double t);
  double advance_bouc_wen(const BoucWenParams& p, double u);

  PlantConfig cfg_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::optional<RationalFilter> realized_;
  std::size_t next_switch_ = 0;
  double last_t_ = -1e300;
  double applied_ = 0.0;
  double u_prev_ = 0.0;
  double h_ = 0.0;
  double y_ = 0.0;
};

}  // namespace afrit
