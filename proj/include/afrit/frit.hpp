#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "afrit/adaptive.hpp"
#include "afrit/controller.hpp"
#include "afrit/lti.hpp"

namespace afrit {

/// One closed-loop experiment: reference r, plant input u0 and output y0,
/// sampled every ts seconds.
struct ClosedLoopDataset {
  std::vector<double> r;
  std::vector<double> u0;
  std::vector<double> y0;
  double ts = 0.01;

  std::size_t size() const noexcept { return y0.size(); }

  /// Throws ConfigError unless the three series have equal length >= 2,
  /// every sample is finite and ts > 0.
  void validate() const;
};

/// Samples dropped from the front of every cost sum to suppress
/// zero-initial-state artifacts: max(10, 3 * order).
std::size_t transient_samples(std::size_t order);

struct FictitiousReference {
  std::vector<double> values;
  /// C(theta) has numerator roots outside the unit circle, so C^-1 is an
  /// unstable filter. The values are still returned.
  bool unstable_inverse = false;
};

/// r~(theta, k) = C^-1(theta) u0(k) + y0(k), with C^-1 the exact rational
/// inverse of the PID filter. Throws InverseNotProper when the leading
/// numerator coefficient Kp Ts + Ki Ts^2 + Kd vanishes (within 1e-9).
FictitiousReference fictitious_reference(const ControllerParams& theta,
                                         const ClosedLoopDataset& data);

/// sum_k [y0(k) - G_m r~(theta, k)]^2 past the transient.
double frit_cost(const ControllerParams& theta, const ClosedLoopDataset& data,
                 const ReferenceModel& gm);

/// Regressor samples (phi(k), d(k)) for the whole dataset.
std::vector<RegressorSample> build_regressors(const ClosedLoopDataset& data,
                                              const ReferenceModel& gm);

/// argmin_theta sum (phi^T theta - d)^2 over `samples`, by normal equations
/// on the diagonally equilibrated system. Throws RankDeficient when the
/// equilibrated normal matrix is singular or its condition number is >= 1e12.
ControllerParams batch_solve(std::span<const RegressorSample> samples);

/// batch_solve over the dataset's regressors, transient excluded.
ControllerParams batch_tune(const ClosedLoopDataset& data, const ReferenceModel& gm);

struct PolishOptions {
  int iterations = 50;
  double initial_step = 0.1;  // relative to |theta_i| (absolute floor 1e-3)
  double shrink = 0.5;
};

/// Derivative-free coordinate search on frit_cost starting at `start`.
/// Never returns a point with higher cost than `start`.
ControllerParams polish(const ControllerParams& start, const ClosedLoopDataset& data,
                        const ReferenceModel& gm, const PolishOptions& opts = {});

/// CSV with header `k,r,u,y`; the sampling time lives in a JSON sidecar
/// `{ "ts": <seconds> }` next to the CSV (same stem, .json extension).
ClosedLoopDataset read_dataset_csv(const std::filesystem::path& csv);
ClosedLoopDataset read_dataset_csv(const std::filesystem::path& csv, double ts);
void write_dataset_csv(const std::filesystem::path& csv, const ClosedLoopDataset& data);
std::filesystem::path dataset_sidecar_path(const std::filesystem::path& csv);

}  // namespace afrit
