#include "afrit/plant.hpp"

#include <algorithm>
#include <cmath>

#include "afrit/errors.hpp"

namespace afrit {

namespace {

RationalFilter realize(const RationalFilter& g) {
  if (!g.strictly_proper()) return g;
  std::vector<double> num(g.numerator().begin() + 1, g.numerator().end());
  return RationalFilter(std::move(num), g.denominator());
}

double sgn(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace

PlantModel::PlantModel(PlantConfig cfg, std::uint64_t seed) : cfg_(std::move(cfg)), rng_(seed) {
  if (!(cfg_.ts > 0.0)) throw ConfigError("plant: ts must be positive");
  if (!(cfg_.noise_std >= 0.0)) throw ConfigError("plant: noise_std must be >= 0");
  if (cfg_.saturation && !(cfg_.saturation->first < cfg_.saturation->second))
    throw ConfigError("plant: saturation requires u_min < u_max");
  for (std::size_t i = 1; i < cfg_.schedule.size(); ++i)
    if (!(cfg_.schedule[i].time > cfg_.schedule[i - 1].time))
      throw ConfigError("plant: switch times must be strictly increasing");
  if (const auto* bw = std::get_if<BoucWenParams>(&cfg_.model)) {
    if (!(bw->n >= 1.0)) throw ConfigError("plant: Bouc-Wen exponent n must be >= 1");
    if (!(bw->time_constant > 0.0)) throw ConfigError("plant: time constant must be positive");
    y_ = bw->offset;
  } else {
    realized_ = realize(std::get<LtiPlantParams>(cfg_.model).filter);
  }
}

double PlantModel::noise() {
  if (cfg_.noise_std == 0.0) return 0.0;
  return cfg_.noise_std * normal_(rng_);
}

double PlantModel::initial_output() { return y_ + noise(); }

void PlantModel::apply_switches(double t) {
  while (next_switch_ < cfg_.schedule.size() && cfg_.schedule[next_switch_].time <= t) {
    const auto& sw = cfg_.schedule[next_switch_++];
    if (auto* bw = std::get_if<BoucWenParams>(&cfg_.model)) {
      if (sw.gain) bw->gain = *sw.gain;
      if (sw.time_constant) bw->time_constant = *sw.time_constant;
    } else {
      auto& lti = std::get<LtiPlantParams>(cfg_.model);
      if (sw.gain) lti.gain = *sw.gain;
      if (sw.filter) {
        // Same-order replacements keep the delay line; others restart from rest.
        RationalFilter next = realize(*sw.filter);
        if (next.order() == realized_->order()) next.set_state(realized_->state());
        realized_ = std::move(next);
        lti.filter = *sw.filter;
      }
    }
  }
}

double PlantModel::advance_bouc_wen(const BoucWenParams& p, double u) {
  const double du = u - u_prev_;
  u_prev_ = u;
  if (du != 0.0) {
    const int substeps = static_cast<int>(std::min(1e5, std::ceil(std::abs(du) / 0.01)));
    const double dd = du / substeps;
    const double rate = 1.0 + p.asymmetry * sgn(dd);
    for (int i = 0; i < substeps; ++i) {
      const double mag = std::pow(std::abs(h_), p.n);
      h_ += dd * (p.a - (p.beta * sgn(dd * h_) + p.gamma) * mag) * rate;
    }
  }
  const double x = p.gain * p.stiffness * (p.alpha * u + (1.0 - p.alpha) * h_) + p.offset;
  const double a = std::exp(-cfg_.ts / p.time_constant);
  y_ = a * y_ + (1.0 - a) * x;
  return y_;
}

double PlantModel::step(double u, double t) {
  if (t < last_t_) throw ConfigError("plant: time must be nondecreasing");
  last_t_ = t;
  apply_switches(t);
  if (cfg_.saturation) u = std::clamp(u, cfg_.saturation->first, cfg_.saturation->second);
  applied_ = u;
  if (const auto* bw = std::get_if<BoucWenParams>(&cfg_.model)) {
    advance_bouc_wen(*bw, u);
  } else {
    const auto& lti = std::get<LtiPlantParams>(cfg_.model);
    y_ = lti.gain * realized_->step(u);
  }
  return y_ + noise();
}

}  // namespace afrit
