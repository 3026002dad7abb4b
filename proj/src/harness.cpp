#include "afrit/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <numbers>
#include <ostream>

#include "afrit/errors.hpp"
#include "text_io.hpp"

namespace afrit {

double ReferenceSignal::at(double t) const {
  switch (kind) {
    case ReferenceKind::Constant: return offset;
    case ReferenceKind::Square: {
      const double phase = std::fmod(t, period);
      return phase < 0.5 * period ? offset + amplitude : offset - amplitude;
    }
    case ReferenceKind::Sine:
      return offset + amplitude * std::sin(2.0 * std::numbers::pi * frequency * t);
    case ReferenceKind::Staircase: {
      if (levels.empty()) return offset;
      const auto i = static_cast<std::size_t>(std::max(0.0, std::floor(t / step_duration)));
      return levels[std::min(i, levels.size() - 1)];
    }
  }
  return offset;
}

ReferenceModel ReferenceModelSpec::build(double ts) const {
  switch (kind) {
    case Kind::Nominal: return ReferenceModel::nominal();
    case Kind::ExactZoh: return ReferenceModel::first_order_zoh(tau, ts);
    case Kind::Custom: return ReferenceModel(RationalFilter(num, den));
  }
  return ReferenceModel::nominal();
}

std::string to_string(Method m) {
  switch (m) {
    case Method::FixedGain: return "fixed";
    case Method::NoForget: return "noforget";
    case Method::Exponential: return "ef";
    case Method::Directional: return "df";
    case Method::Resetting: return "er";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  if (name == "fixed" || name == "frit") return Method::FixedGain;
  switch (parse_forgetting_mode(name)) {
    case ForgettingMode::NoForget: return Method::NoForget;
    case ForgettingMode::Exponential: return Method::Exponential;
    case ForgettingMode::Directional: return Method::Directional;
    case ForgettingMode::Resetting: return Method::Resetting;
  }
  return Method::Directional;
}

namespace {

ForgettingMode mode_of(Method m) {
  switch (m) {
    case Method::FixedGain:
    case Method::NoForget: return ForgettingMode::NoForget;
    case Method::Exponential: return ForgettingMode::Exponential;
    case Method::Directional: return ForgettingMode::Directional;
    case Method::Resetting: return ForgettingMode::Resetting;
  }
  return ForgettingMode::NoForget;
}

}  // namespace

std::size_t ScenarioConfig::steps() const {
  return static_cast<std::size_t>(std::llround(duration / ts));
}

void ScenarioConfig::validate() const {
  if (!(duration > 0.0) || !std::isfinite(duration)) throw ConfigError("duration must be > 0");
  if (!(ts > 0.0) || !std::isfinite(ts)) throw ConfigError("ts must be > 0");
  if (steps() == 0) throw ConfigError("duration shorter than one sample");
  const auto [w0, w1] = evaluation_window;
  if (!(w0 >= 0.0 && w1 <= duration && w0 <= w1))
    throw ConfigError("evaluation_window must lie inside [0, duration]");
  if (seeds.empty()) throw ConfigError("at least one trial seed is required");
  if (reference.kind == ReferenceKind::Square && !(reference.period > 0.0))
    throw ConfigError("square reference needs period > 0");
  if (reference.kind == ReferenceKind::Staircase && !(reference.step_duration > 0.0))
    throw ConfigError("staircase reference needs step_duration > 0");
  if (prior && !(prior->duration > 0.0)) throw ConfigError("prior experiment duration must be > 0");
  EstimatorConfig ec = estimator;
  ec.mode = mode_of(method);
  make_estimator(ec);
  reference_model.build(ts);
  // The plant constructor carries its own checks.
  PlantConfig pc = plant;
  pc.ts = ts;
  PlantModel probe(std::move(pc), 0);
}

ClosedLoopDataset RunTrace::dataset(double ts) const {
  ClosedLoopDataset d;
  d.ts = ts;
  for (const auto& rec : records) {
    d.r.push_back(rec.r);
    d.u0.push_back(rec.u);
    d.y0.push_back(rec.y);
  }
  return d;
}

Vec3 resolve_initial_gains(const ScenarioConfig& cfg) {
  if (!cfg.prior) return cfg.estimator.theta0;
  const auto& pe = *cfg.prior;
  ScenarioConfig pre = cfg;
  pre.prior.reset();
  pre.name = cfg.name + "/prior";
  pre.duration = pe.duration;
  pre.reference = pe.reference;
  pre.method = Method::FixedGain;
  pre.plant.schedule.clear();
  pre.evaluation_window = {0.0, pe.duration};
  pre.seeds = {pe.seed};
  const RunTrace prior = run_scenario(pre, pe.seed, pe.theta);
  const ClosedLoopDataset data = prior.dataset(cfg.ts);
  const ReferenceModel gm = cfg.reference_model.build(cfg.ts);
  ControllerParams theta = batch_tune(data, gm);
  if (pe.polish) theta = polish(theta, data, gm);
  return theta.theta;
}

RunTrace run_scenario(const ScenarioConfig& cfg, std::uint64_t seed) {
  return run_scenario(cfg, seed, resolve_initial_gains(cfg));
}

RunTrace run_scenario(const ScenarioConfig& cfg, std::uint64_t seed, const Vec3& theta0) {
  cfg.validate();
  const ReferenceModel gm = cfg.reference_model.build(cfg.ts);
  PlantConfig pc = cfg.plant;
  pc.ts = cfg.ts;
  PlantModel plant(pc, seed);
  PidBasis basis(cfg.ts);
  RegressorGenerator regressors(gm, cfg.ts);
  RationalFilter model = gm.filter();

  EstimatorConfig ec = cfg.estimator;
  ec.mode = mode_of(cfg.method);
  ec.theta0 = theta0;
  EstimatorState est = make_estimator(ec);
  const bool adapt = cfg.method != Method::FixedGain;

  RunTrace trace;
  const std::size_t n = cfg.steps();
  trace.records.reserve(n);
  auto& sum = trace.summary;
  sum.scenario = cfg.name;
  sum.method = cfg.method;
  sum.mu = est.mu;
  sum.seed = seed;
  sum.window = cfg.evaluation_window;
  sum.theta_initial = theta0;

  bool positive = ControllerParams(theta0).in_positive_orthant();
  double y = plant.initial_output();
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * cfg.ts;
    const double r = cfg.reference.at(t);
    const double e = r - y;
    const ControllerParams used(est.theta_hat);
    const double u_cmd = control_step(used, basis, e);
    if (!std::isfinite(u_cmd)) throw NumericalBreakdown("control input is not finite", k);
    const double y_next = plant.step(u_cmd, t);
    const double u = plant.last_applied_input();
    const RegressorSample s = regressors.step(y, u);
    if (adapt) {
      try {
        est = update(est, s);
      } catch (const NumericalBreakdown& ex) {
        throw NumericalBreakdown(ex.what(), k);
      }
    }
    const EigenRange eig = eigen_trace(est);

    TraceRecord rec;
    rec.k = k;
    rec.t = t;
    rec.r = r;
    rec.y = y;
    rec.u = u;
    rec.e = e;
    rec.ehat = auxiliary_error(s, used.theta);
    rec.theta = est.theta_hat;
    rec.p_min = eig.min;
    rec.p_max = eig.max;
    rec.deadzone = adapt && est.deadzone_active;
    rec.model_output = model.step(r);
    trace.records.push_back(rec);

    const bool now_positive = ControllerParams(est.theta_hat).in_positive_orthant();
    if (positive && !now_positive) ++sum.orthant_exits;
    positive = now_positive;

    if (!std::isfinite(y_next)) throw NumericalBreakdown("plant output diverged", k);
    y = y_next;
  }

  sum.theta_final = est.theta_hat;
  std::tie(sum.mae, sum.max_ae) = window_errors(trace.records, cfg.evaluation_window, false);
  std::tie(sum.model_mae, sum.model_max_ae) = window_errors(trace.records, cfg.evaluation_window, true);
  return trace;
}

std::vector<RunTrace> run_trials(const ScenarioConfig& cfg) {
  cfg.validate();
  const Vec3 theta0 = resolve_initial_gains(cfg);
  std::vector<std::future<RunTrace>> jobs;
  jobs.reserve(cfg.seeds.size());
  for (auto seed : cfg.seeds)
    jobs.push_back(std::async(std::launch::async,
                              [&cfg, seed, theta0] { return run_scenario(cfg, seed, theta0); }));
  std::vector<RunTrace> out;
  out.reserve(jobs.size());
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

std::pair<double, double> window_errors(const std::vector<TraceRecord>& records,
                                        std::pair<double, double> window, bool model_following) {
  double total = 0.0, worst = 0.0;
  std::size_t count = 0;
  // Half-sample slack so a window edge on a sample instant is inclusive.
  const double slack = records.size() > 1 ? 0.5 * (records[1].t - records[0].t) : 0.0;
  for (const auto& rec : records) {
    if (rec.t < window.first - slack || rec.t > window.second + slack) continue;
    const double err = std::abs((model_following ? rec.model_output : rec.r) - rec.y);
    total += err;
    worst = std::max(worst, err);
    ++count;
  }
  return {count ? total / static_cast<double>(count) : 0.0, worst};
}

Distribution describe(std::vector<double> v) {
  Distribution d;
  if (v.empty()) return d;
  std::sort(v.begin(), v.end());
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
  };
  d.min = v.front();
  d.q1 = quantile(0.25);
  d.median = quantile(0.5);
  d.q3 = quantile(0.75);
  d.max = v.back();
  return d;
}

MethodSummary summarize(const std::string& label, const std::vector<RunTrace>& traces) {
  MethodSummary m;
  m.label = label;
  m.trials = traces.size();
  std::vector<double> mae, max_ae, model_mae;
  for (const auto& t : traces) {
    m.method = t.summary.method;
    m.mu = t.summary.mu;
    mae.push_back(t.summary.mae);
    max_ae.push_back(t.summary.max_ae);
    model_mae.push_back(t.summary.model_mae);
  }
  m.mae = describe(std::move(mae));
  m.max_ae = describe(std::move(max_ae));
  m.model_mae = describe(std::move(model_mae));
  return m;
}

std::vector<MethodSummary> compare_methods(const std::vector<ScenarioConfig>& cfgs) {
  std::vector<MethodSummary> table;
  for (const auto& cfg : cfgs) table.push_back(summarize(cfg.name, run_trials(cfg)));
  return table;
}

std::vector<ScenarioConfig> method_variants(const ScenarioConfig& base, double mu_ef, double mu_df,
                                            double mu_er) {
  std::vector<ScenarioConfig> out;
  auto variant = [&](Method m, double mu) {
    ScenarioConfig c = base;
    c.method = m;
    c.estimator.mu = mu;
    c.name = base.name + "/" + to_string(m);
    out.push_back(std::move(c));
  };
  variant(Method::FixedGain, 1.0);
  variant(Method::NoForget, 1.0);
  variant(Method::Exponential, mu_ef);
  variant(Method::Directional, mu_df);
  variant(Method::Resetting, mu_er);
  return out;
}

std::vector<MethodSummary> sweep_mu(const ScenarioConfig& base, const std::vector<double>& mus) {
  std::vector<MethodSummary> table;
  for (double mu : mus) {
    ScenarioConfig c = base;
    c.method = Method::Directional;
    c.estimator.mu = mu;
    c.name = base.name + "/df/mu=" + detail::format_double(mu);
    table.push_back(summarize(c.name, run_trials(c)));
  }
  return table;
}

void write_trace_csv(std::ostream& out, const RunTrace& trace) {
  using detail::format_double;
  out << "k,t,r,y,u,e,ehat,kp,ki,kd,pmin,pmax,deadzone\n";
  for (const auto& r : trace.records) {
    out << r.k << ',' << format_double(r.t) << ',' << format_double(r.r) << ','
        << format_double(r.y) << ',' << format_double(r.u) << ',' << format_double(r.e) << ','
        << format_double(r.ehat) << ',' << format_double(r.theta(0)) << ','
        << format_double(r.theta(1)) << ',' << format_double(r.theta(2)) << ','
        << format_double(r.p_min) << ',' << format_double(r.p_max) << ',' << (r.deadzone ? 1 : 0)
        << '\n';
  }
}

namespace {

nlohmann::json vec_json(const Vec3& v) { return nlohmann::json::array({v(0), v(1), v(2)}); }

nlohmann::json dist_json(const Distribution& d) {
  return {{"min", d.min}, {"q1", d.q1}, {"median", d.median}, {"q3", d.q3}, {"max", d.max}};
}

}  // namespace

nlohmann::json summary_to_json(const TraceSummary& s) {
  return {{"scenario", s.scenario},
          {"method", to_string(s.method)},
          {"mu", s.mu},
          {"seed", s.seed},
          {"mae", s.mae},
          {"max_ae", s.max_ae},
          {"model_mae", s.model_mae},
          {"model_max_ae", s.model_max_ae},
          {"window", {s.window.first, s.window.second}},
          {"theta_initial", vec_json(s.theta_initial)},
          {"theta_final", vec_json(s.theta_final)},
          {"orthant_exits", s.orthant_exits}};
}

nlohmann::json table_to_json(const std::vector<MethodSummary>& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& m : table)
    rows.push_back({{"label", m.label},
                    {"method", to_string(m.method)},
                    {"mu", m.mu},
                    {"trials", m.trials},
                    {"mae", dist_json(m.mae)},
                    {"max_ae", dist_json(m.max_ae)},
                    {"model_mae", dist_json(m.model_mae)}});
  return rows;
}

void write_table_csv(std::ostream& out, const std::vector<MethodSummary>& table) {
  using detail::format_double;
  out << "label,method,mu,trials,mae_min,mae_q1,mae_median,mae_q3,mae_max,"
         "maxae_min,maxae_q1,maxae_median,maxae_q3,maxae_max\n";
  for (const auto& m : table) {
    out << m.label << ',' << to_string(m.method) << ',' << format_double(m.mu) << ',' << m.trials;
    for (const auto* d : {&m.mae, &m.max_ae})
      out << ',' << format_double(d->min) << ',' << format_double(d->q1) << ','
          << format_double(d->median) << ',' << format_double(d->q3) << ','
          << format_double(d->max);
    out << '\n';
  }
}

}  // namespace afrit
