#include <doctest.h>

#include <cmath>
#include <random>

#include "afrit/errors.hpp"
#include "afrit/plant.hpp"
#include "support.hpp"

using namespace afrit;

namespace {

PlantConfig lti(RationalFilter f, double gain = 1.0) {
  PlantConfig c;
  c.model = LtiPlantParams{std::move(f), gain};
  return c;
}

PlantConfig bouc_wen(BoucWenParams p = {}) {
  PlantConfig c;
  c.model = p;
  return c;
}

}  // namespace

TEST_CASE("strictly proper plant is seen by the loop without extra delay") {
  const RationalFilter g({0.0, 0.0095}, {1.0, -0.99});
  PlantModel plant(lti(g), 1);
  std::mt19937_64 rng(51);
  const auto u = testing::random_sequence(rng, 200);
  const auto ref = g.filter(u);  // y(k) = G u, y(0) = 0
  CHECK(plant.initial_output() == 0.0);
  for (std::size_t k = 0; k + 1 < u.size(); ++k) {
    const double y_next = plant.step(u[k], k * 0.01);
    CHECK(y_next == doctest::Approx(ref[k + 1]).epsilon(1e-12));
  }
}

TEST_CASE("identity plant returns the previous input") {
  PlantModel plant(lti(RationalFilter::identity()), 1);
  for (double u : {1.0, -2.0, 0.5}) CHECK(plant.step(u, 0.0) == u);
}

TEST_CASE("saturation clamps the applied input") {
  auto cfg = lti(RationalFilter::identity());
  cfg.saturation = std::make_pair(0.0, 20.0);
  PlantModel plant(cfg, 1);
  CHECK(plant.step(25.0, 0.0) == 20.0);
  CHECK(plant.last_applied_input() == 20.0);
  CHECK(plant.step(-3.0, 0.01) == 0.0);
  CHECK(plant.step(7.0, 0.02) == 7.0);
}

TEST_CASE("gain-doubling switch takes effect at the configured time") {
  auto cfg = lti(RationalFilter::identity(), 1.0);
  cfg.schedule.push_back({0.5, 2.0, std::nullopt, std::nullopt});
  PlantModel plant(cfg, 1);
  for (int k = 0; k < 100; ++k) {
    const double t = k * 0.01;
    const double y = plant.step(1.0, t);
    CHECK(y == doctest::Approx(t + 1e-12 >= 0.5 ? 2.0 : 1.0));
  }
}

TEST_CASE("filter switch replaces the plant dynamics") {
  auto cfg = lti(RationalFilter::identity(), 1.0);
  cfg.schedule.push_back({0.1, std::nullopt, std::nullopt, RationalFilter::gain(3.0)});
  PlantModel plant(cfg, 1);
  CHECK(plant.step(1.0, 0.0) == 1.0);
  CHECK(plant.step(1.0, 0.1) == 3.0);
}

TEST_CASE("noise is deterministic in the seed") {
  auto cfg = bouc_wen();
  cfg.noise_std = 0.1;
  PlantModel a(cfg, 7), b(cfg, 7), c(cfg, 8);
  bool differs = false;
  for (int k = 0; k < 200; ++k) {
    const double u = std::sin(0.05 * k) * 5.0 + 5.0;
    const double ya = a.step(u, k * 0.01);
    CHECK(ya == b.step(u, k * 0.01));
    if (ya != c.step(u, k * 0.01)) differs = true;
  }
  CHECK(differs);
  CHECK(a.true_output() == b.true_output());
}

TEST_CASE("measurement noise has the configured spread") {
  auto cfg = lti(RationalFilter::zero());
  cfg.noise_std = 0.06;
  PlantModel plant(cfg, 3);
  double s = 0.0, s2 = 0.0;
  const int n = 20000;
  for (int k = 0; k < n; ++k) {
    const double y = plant.step(0.0, k * 0.01);
    s += y;
    s2 += y * y;
  }
  const double mean = s / n, sd = std::sqrt(s2 / n - mean * mean);
  CHECK(std::abs(mean) < 0.003);
  CHECK(sd == doctest::Approx(0.06).epsilon(0.03));
}

TEST_CASE("Bouc-Wen loop encloses area and is asymmetric") {
  BoucWenParams p;
  p.time_constant = 1e-3;  // nearly static, so the loop is the hysteresis itself
  PlantModel plant(bouc_wen(p), 1);
  const int n = 2000;
  // Two cycles of a triangle wave in [-5, 5]; keep the second.
  std::vector<double> us, ys;
  for (int k = 0; k < 2 * n; ++k) {
    const double phase = static_cast<double>(k % n) / n;
    const double u = phase < 0.5 ? -5.0 + 20.0 * phase : 15.0 - 20.0 * phase;
    const double y = plant.step(u, k * 0.01);
    if (k >= n) {
      us.push_back(u);
      ys.push_back(y);
    }
  }
  double area = 0.0;
  for (std::size_t i = 1; i < us.size(); ++i) area += 0.5 * (ys[i] + ys[i - 1]) * (us[i] - us[i - 1]);
  CHECK(std::abs(area) > 1.0);

  // Asymmetry: the output at u = +5 and at u = -5 are not mirror images.
  double y_top = 0.0, y_bottom = 0.0;
  for (std::size_t i = 0; i < us.size(); ++i) {
    if (std::abs(us[i] - 5.0) < 1e-9) y_top = ys[i];
    if (std::abs(us[i] + 5.0) < 1e-9) y_bottom = ys[i];
  }
  CHECK(std::abs(y_top + y_bottom) > 0.1);

  p.asymmetry = 0.0;
  PlantModel sym(bouc_wen(p), 1);
  double top = 0.0, bottom = 0.0;
  for (int k = 0; k < 2 * n; ++k) {
    const double phase = static_cast<double>(k % n) / n;
    const double u = phase < 0.5 ? -5.0 + 20.0 * phase : 15.0 - 20.0 * phase;
    const double y = sym.step(u, k * 0.01);
    if (k >= n && k % n == n / 2) top = y;
    if (k >= n && k % n == 0) bottom = y;
  }
  CHECK(std::abs(top + bottom) < 0.05 * std::abs(top - bottom));
}

TEST_CASE("Bouc-Wen hysteretic state stays bounded under large input jumps") {
  PlantModel plant(bouc_wen(), 1);
  for (int k = 0; k < 500; ++k) {
    const double y = plant.step(k % 2 ? 100.0 : -100.0, k * 0.01);
    REQUIRE(std::isfinite(y));
  }
  CHECK(std::abs(plant.hysteresis_state()) < 10.0);
}

TEST_CASE("plant configuration is validated") {
  auto c = lti(RationalFilter::identity());
  c.ts = 0.0;
  CHECK_THROWS_AS(PlantModel(c, 1), ConfigError);
  c = lti(RationalFilter::identity());
  c.noise_std = -1.0;
  CHECK_THROWS_AS(PlantModel(c, 1), ConfigError);
  c.noise_std = 0.0;
  c.saturation = std::make_pair(1.0, 1.0);
  CHECK_THROWS_AS(PlantModel(c, 1), ConfigError);
  c.saturation.reset();
  c.schedule = {{1.0, 2.0, {}, {}}, {1.0, 3.0, {}, {}}};
  CHECK_THROWS_AS(PlantModel(c, 1), ConfigError);
  BoucWenParams p;
  p.n = 0.5;
  CHECK_THROWS_AS(PlantModel(bouc_wen(p), 1), ConfigError);
  PlantModel ok(lti(RationalFilter::identity()), 1);
  ok.step(0.0, 1.0);
  CHECK_THROWS_AS(ok.step(0.0, 0.5), ConfigError);
}
