#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "afrit/adaptive.hpp"
#include "afrit/frit.hpp"
#include "afrit/plant.hpp"

namespace afrit {

enum class ReferenceKind { Constant, Square, Sine, Staircase };

/// Reference trajectory r(t).
///   constant:  offset
///   square:    offset + amplitude for the first half of each period,
///              offset - amplitude for the second half
///   sine:      offset + amplitude sin(2 pi frequency t)
///   staircase: levels[i] on [i step_duration, (i+1) step_duration), the
///              last level held afterwards
struct ReferenceSignal {
  ReferenceKind kind = ReferenceKind::Staircase;
  double amplitude = 1.0;
  double offset = 0.0;
  double frequency = 0.3;  // Hz
  double period = 20.0;    // s
  std::vector<double> levels{20.0, 35.0, 50.0, 65.0};
  double step_duration = 20.0;  // s

  double at(double t) const;
};

struct ReferenceModelSpec {
  enum class Kind { Nominal, ExactZoh, Custom };
  Kind kind = Kind::Nominal;
  double tau = 1.0;  // s, exact-zoh only
  std::vector<double> num;
  std::vector<double> den;

  ReferenceModel build(double ts) const;
};

/// Tuning strategy of one run. FixedGain keeps theta(0) for the whole run.
enum class Method { FixedGain, NoForget, Exponential, Directional, Resetting };

std::string to_string(Method m);
Method parse_method(const std::string& name);

/// Offline FRIT prior experiment: a fixed-gain closed-loop run whose data
/// are batch-tuned into theta(0) for the main run.
struct PriorExperiment {
  ReferenceSignal reference{ReferenceKind::Constant, 0.0, 50.0};
  double duration = 30.0;
  Vec3 theta = Vec3(0.1, 0.1, 0.01);
  std::uint64_t seed = 0;
  bool polish = false;
};

struct ScenarioConfig {
  std::string name = "scenario";
  double duration = 80.0;
  double ts = 0.01;
  ReferenceSignal reference;
  ReferenceModelSpec reference_model;
  Method method = Method::Directional;
  EstimatorConfig estimator;
  std::optional<PriorExperiment> prior;
  PlantConfig plant;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::pair<double, double> evaluation_window{0.0, 80.0};

  std::size_t steps() const;

  /// Throws ConfigError on duration <= 0, ts <= 0, a window outside
  /// [0, duration], no seeds, or invalid estimator settings.
  void validate() const;
};

/// Parses the scenario schema (see docs/scenario_schema.md). Unknown keys
/// are rejected. Throws ConfigError.
ScenarioConfig parse_scenario(const nlohmann::json& j);
ScenarioConfig load_scenario(const std::filesystem::path& path);

struct TraceRecord {
  std::size_t k = 0;
  double t = 0.0;
  double r = 0.0;
  double y = 0.0;
  double u = 0.0;  // applied plant input
  double e = 0.0;
  double ehat = 0.0;  // phi^T theta_used - d
  Vec3 theta = Vec3::Zero();
  double p_min = 0.0;
  double p_max = 0.0;
  bool deadzone = false;
  double model_output = 0.0;  // G_m r, not part of the CSV
};

struct TraceSummary {
  std::string scenario;
  Method method = Method::Directional;
  double mu = 1.0;
  std::uint64_t seed = 0;
  /// mean / max |r - y| over the evaluation window.
  double mae = 0.0;
  double max_ae = 0.0;
  /// mean / max |G_m r - y| over the evaluation window.
  double model_mae = 0.0;
  double model_max_ae = 0.0;
  std::pair<double, double> window{0.0, 0.0};
  Vec3 theta_initial = Vec3::Zero();
  Vec3 theta_final = Vec3::Zero();
  /// Times theta left the positive orthant.
  std::size_t orthant_exits = 0;
};

struct RunTrace {
  std::vector<TraceRecord> records;
  TraceSummary summary;

  ClosedLoopDataset dataset(double ts) const;
};

/// theta(0) of the scenario: the configured value, or the batch-FRIT result
/// of the prior experiment when one is configured.
Vec3 resolve_initial_gains(const ScenarioConfig& cfg);

/// One closed-loop trial. Deterministic in (cfg, seed). Throws
/// NumericalBreakdown with the failing step index.
RunTrace run_scenario(const ScenarioConfig& cfg, std::uint64_t seed);

/// Same as run_scenario but with theta(0) already resolved.
RunTrace run_scenario(const ScenarioConfig& cfg, std::uint64_t seed, const Vec3& theta0);

/// All trials of cfg.seeds, executed concurrently, returned in seed order.
std::vector<RunTrace> run_trials(const ScenarioConfig& cfg);

/// MAE / maxAE recomputed from records in [window.first, window.second].
std::pair<double, double> window_errors(const std::vector<TraceRecord>& records,
                                        std::pair<double, double> window, bool model_following);

struct Distribution {
  double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
};

/// Five-number summary with linearly interpolated quartiles.
Distribution describe(std::vector<double> values);

struct MethodSummary {
  std::string label;
  Method method = Method::Directional;
  double mu = 1.0;
  std::size_t trials = 0;
  Distribution mae, max_ae, model_mae;
};

MethodSummary summarize(const std::string& label, const std::vector<RunTrace>& traces);

/// Runs every configuration over its seeds and tabulates the per-method
/// error distributions.
std::vector<MethodSummary> compare_methods(const std::vector<ScenarioConfig>& cfgs);

/// The five-way comparison (fixed-gain FRIT, NoForget, EF, DF, ER) built
/// from one base scenario; `mu` applies to the forgetting variants.
std::vector<ScenarioConfig> method_variants(const ScenarioConfig& base, double mu_ef,
                                            double mu_df, double mu_er);

/// DF runs of `base` for each forgetting factor.
std::vector<MethodSummary> sweep_mu(const ScenarioConfig& base, const std::vector<double>& mus);

void write_trace_csv(std::ostream& out, const RunTrace& trace);
nlohmann::json summary_to_json(const TraceSummary& s);
nlohmann::json table_to_json(const std::vector<MethodSummary>& table);
void write_table_csv(std::ostream& out, const std::vector<MethodSummary>& table);

}  // namespace afrit
