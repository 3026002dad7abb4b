// Scenario file parsing. The schema is documented in docs/scenario_schema.md.

#include <fstream>
#include <initializer_list>
#include <set>
#include <string>

#include "afrit/errors.hpp"
#include "afrit/harness.hpp"

namespace afrit {

namespace {

using nlohmann::json;

void allow_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw ConfigError(where + ": unknown key '" + k + "'");
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigError(where + ": expected a number");
  return j.get<double>();
}

double number_or(const json& j, const char* key, double fallback, const std::string& where) {
  return j.contains(key) ? number(j[key], where + "." + key) : fallback;
}

std::vector<double> numbers(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected an array of numbers");
  std::vector<double> out;
  for (const auto& x : j) out.push_back(number(x, where));
  return out;
}

Vec3 vec3(const json& j, const std::string& where) {
  const auto v = numbers(j, where);
  if (v.size() != 3) throw ConfigError(where + ": expected 3 numbers");
  return {v[0], v[1], v[2]};
}

/// A scalar s means s*I; otherwise a 3-array (diagonal) or 3x3 nested array.
Mat3 mat3(const json& j, const std::string& where) {
  if (j.is_number()) return j.get<double>() * Mat3::Identity();
  if (!j.is_array() || j.size() != 3) throw ConfigError(where + ": expected scalar, diagonal or 3x3");
  if (j[0].is_number()) return vec3(j, where).asDiagonal();
  Mat3 m;
  for (int i = 0; i < 3; ++i) {
    const Vec3 row = vec3(j[i], where);
    m.row(i) = row.transpose();
  }
  return m;
}

ReferenceSignal parse_reference(const json& j, const std::string& where) {
  allow_keys(j, where, {"kind", "amplitude", "offset", "frequency", "period", "levels", "step_duration"});
  ReferenceSignal r;
  const std::string kind = j.value("kind", std::string("staircase"));
  if (kind == "constant") r.kind = ReferenceKind::Constant;
  else if (kind == "square") r.kind = ReferenceKind::Square;
  else if (kind == "sine") r.kind = ReferenceKind::Sine;
  else if (kind == "staircase") r.kind = ReferenceKind::Staircase;
  else throw ConfigError(where + ": unknown reference kind '" + kind + "'");
  r.amplitude = number_or(j, "amplitude", r.amplitude, where);
  r.offset = number_or(j, "offset", r.offset, where);
  r.frequency = number_or(j, "frequency", r.frequency, where);
  r.period = number_or(j, "period", r.period, where);
  r.step_duration = number_or(j, "step_duration", r.step_duration, where);
  if (j.contains("levels")) r.levels = numbers(j["levels"], where + ".levels");
  return r;
}

ReferenceModelSpec parse_reference_model(const json& j) {
  const std::string where = "reference_model";
  allow_keys(j, where, {"kind", "tau", "num", "den"});
  ReferenceModelSpec s;
  const std::string kind = j.value("kind", std::string("nominal"));
  if (kind == "nominal") s.kind = ReferenceModelSpec::Kind::Nominal;
  else if (kind == "exact-zoh") s.kind = ReferenceModelSpec::Kind::ExactZoh;
  else if (kind == "custom") s.kind = ReferenceModelSpec::Kind::Custom;
  else throw ConfigError(where + ": unknown kind '" + kind + "'");
  s.tau = number_or(j, "tau", s.tau, where);
  if (j.contains("num")) s.num = numbers(j["num"], where + ".num");
  if (j.contains("den")) s.den = numbers(j["den"], where + ".den");
  if (s.kind == ReferenceModelSpec::Kind::Custom && (s.num.empty() || s.den.empty()))
    throw ConfigError(where + ": custom model needs num and den");
  return s;
}

void parse_estimator(const json& j, ScenarioConfig& cfg) {
  const std::string where = "estimator";
  allow_keys(j, where, {"method", "mu", "epsilon", "p0", "r0", "r_inf", "theta0"});
  if (j.contains("method")) {
    if (!j["method"].is_string()) throw ConfigError(where + ".method: expected a string");
    cfg.method = parse_method(j["method"].get<std::string>());
  }
  auto& e = cfg.estimator;
  e.mu = number_or(j, "mu", e.mu, where);
  e.epsilon = number_or(j, "epsilon", e.epsilon, where);
  if (j.contains("p0")) e.p0 = mat3(j["p0"], where + ".p0");
  if (j.contains("r0")) e.r0 = mat3(j["r0"], where + ".r0");
  if (j.contains("r_inf")) e.r_inf = mat3(j["r_inf"], where + ".r_inf");
  if (j.contains("theta0")) e.theta0 = vec3(j["theta0"], where + ".theta0");
}

PriorExperiment parse_prior(const json& j) {
  const std::string where = "initial_gains";
  allow_keys(j, where, {"source", "reference", "duration", "theta", "seed", "polish"});
  if (j.value("source", std::string("frit")) != "frit")
    throw ConfigError(where + ".source: only \"frit\" is supported");
  PriorExperiment p;
  if (j.contains("reference")) p.reference = parse_reference(j["reference"], where + ".reference");
  p.duration = number_or(j, "duration", p.duration, where);
  if (j.contains("theta")) p.theta = vec3(j["theta"], where + ".theta");
  if (j.contains("seed")) p.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("polish")) p.polish = j["polish"].get<bool>();
  return p;
}

PlantConfig parse_plant(const json& j) {
  const std::string where = "plant";
  allow_keys(j, where,
             {"kind", "num", "den", "gain", "stiffness", "alpha", "a", "beta", "gamma", "n",
              "asymmetry", "offset", "time_constant", "noise_std", "saturation", "schedule"});
  PlantConfig pc;
  const std::string kind = j.value("kind", std::string("lti"));
  if (kind == "lti") {
    LtiPlantParams p;
    if (j.contains("num") || j.contains("den")) {
      if (!j.contains("num") || !j.contains("den")) throw ConfigError(where + ": lti needs num and den");
      p.filter = RationalFilter(numbers(j["num"], where + ".num"), numbers(j["den"], where + ".den"));
    }
    p.gain = number_or(j, "gain", p.gain, where);
    pc.model = p;
  } else if (kind == "bouc-wen") {
    BoucWenParams p;
    p.stiffness = number_or(j, "stiffness", p.stiffness, where);
    p.alpha = number_or(j, "alpha", p.alpha, where);
    p.a = number_or(j, "a", p.a, where);
    p.beta = number_or(j, "beta", p.beta, where);
    p.gamma = number_or(j, "gamma", p.gamma, where);
    p.n = number_or(j, "n", p.n, where);
    p.asymmetry = number_or(j, "asymmetry", p.asymmetry, where);
    p.gain = number_or(j, "gain", p.gain, where);
    p.offset = number_or(j, "offset", p.offset, where);
    p.time_constant = number_or(j, "time_constant", p.time_constant, where);
    pc.model = p;
  } else {
    throw ConfigError(where + ": unknown kind '" + kind + "'");
  }
  pc.noise_std = number_or(j, "noise_std", 0.0, where);
  if (j.contains("saturation")) {
    const auto s = numbers(j["saturation"], where + ".saturation");
    if (s.size() != 2) throw ConfigError(where + ".saturation: expected [u_min, u_max]");
    pc.saturation = std::make_pair(s[0], s[1]);
  }
  if (j.contains("schedule")) {
    if (!j["schedule"].is_array()) throw ConfigError(where + ".schedule: expected an array");
    for (const auto& sj : j["schedule"]) {
      const std::string w = where + ".schedule[]";
      allow_keys(sj, w, {"time", "gain", "time_constant", "num", "den"});
      ParameterSwitch sw;
      if (!sj.contains("time")) throw ConfigError(w + ": time is required");
      sw.time = number(sj["time"], w + ".time");
      if (sj.contains("gain")) sw.gain = number(sj["gain"], w + ".gain");
      if (sj.contains("time_constant")) sw.time_constant = number(sj["time_constant"], w + ".time_constant");
      if (sj.contains("num") != sj.contains("den")) throw ConfigError(w + ": num and den go together");
      if (sj.contains("num"))
        sw.filter = RationalFilter(numbers(sj["num"], w + ".num"), numbers(sj["den"], w + ".den"));
      pc.schedule.push_back(std::move(sw));
    }
  }
  return pc;
}

}  // namespace

ScenarioConfig parse_scenario(const nlohmann::json& j) {
  allow_keys(j, "scenario",
             {"name", "duration", "ts", "reference", "reference_model", "estimator",
              "initial_gains", "plant", "trials", "seeds", "evaluation_window", "description"});
  ScenarioConfig cfg;
  try {
    if (j.contains("name")) cfg.name = j["name"].get<std::string>();
    cfg.duration = number_or(j, "duration", cfg.duration, "scenario");
    cfg.ts = number_or(j, "ts", cfg.ts, "scenario");
    if (j.contains("reference")) cfg.reference = parse_reference(j["reference"], "reference");
    if (j.contains("reference_model")) cfg.reference_model = parse_reference_model(j["reference_model"]);
    if (j.contains("estimator")) parse_estimator(j["estimator"], cfg);
    if (j.contains("initial_gains")) cfg.prior = parse_prior(j["initial_gains"]);
    if (j.contains("plant")) cfg.plant = parse_plant(j["plant"]);
    cfg.plant.ts = cfg.ts;

    if (j.contains("seeds")) {
      cfg.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
      if (j.contains("trials") && j["trials"].get<std::size_t>() != cfg.seeds.size())
        throw ConfigError("scenario: trials disagrees with the seed list length");
    } else {
      const std::size_t trials = j.value("trials", std::size_t{10});
      cfg.seeds.clear();
      for (std::size_t i = 1; i <= trials; ++i) cfg.seeds.push_back(i);
    }
    if (j.contains("evaluation_window")) {
      const auto w = numbers(j["evaluation_window"], "evaluation_window");
      if (w.size() != 2) throw ConfigError("evaluation_window: expected [t_start, t_end]");
      cfg.evaluation_window = {w[0], w[1]};
    } else {
      cfg.evaluation_window = {0.0, cfg.duration};
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("scenario " + path.string() + ": " + e.what());
  }
  ScenarioConfig cfg = parse_scenario(j);
  if (!j.contains("name")) cfg.name = path.stem().string();
  return cfg;
}

}  // namespace afrit
