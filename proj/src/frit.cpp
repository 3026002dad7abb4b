#include "afrit/frit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <string>

#include <Eigen/Cholesky>
#include <json.hpp>

#include "afrit/errors.hpp"
#include "text_io.hpp"

namespace afrit {

void ClosedLoopDataset::validate() const {
  if (r.size() != u0.size() || u0.size() != y0.size())
    throw ConfigError("dataset: r, u and y must have equal length");
  if (y0.size() < 2) throw ConfigError("dataset: at least two samples are required");
  if (!(ts > 0.0) || !std::isfinite(ts)) throw ConfigError("dataset: ts must be positive");
  auto finite = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
  };
  if (!finite(r) || !finite(u0) || !finite(y0)) throw ConfigError("dataset: non-finite sample");
}

std::size_t transient_samples(std::size_t order) { return std::max<std::size_t>(10, 3 * order); }

namespace {

constexpr std::size_t kPidOrder = 2;

std::size_t cost_transient(const ReferenceModel& gm) {
  return transient_samples(std::max(kPidOrder, gm.filter().order()));
}

}  // namespace

FictitiousReference fictitious_reference(const ControllerParams& theta,
                                         const ClosedLoopDataset& data) {
  data.validate();
  const RationalFilter c = pid_filter(theta, data.ts);
  const auto& n = c.numerator();
  const double scale = std::max({1.0, std::abs(n[0]), std::abs(n[1]), std::abs(n[2])});
  if (std::abs(n[0]) <= 1e-9 * scale)
    throw InverseNotProper("controller inverse is not proper: Kp*Ts + Ki*Ts^2 + Kd is zero");

  FictitiousReference out;
  for (const auto& z : c.zeros())
    if (std::abs(z) >= 1.0) out.unstable_inverse = true;

  RationalFilter inverse(c.denominator(), c.numerator());
  out.values = inverse.filter(data.u0);
  for (std::size_t k = 0; k < out.values.size(); ++k) out.values[k] += data.y0[k];
  return out;
}

double frit_cost(const ControllerParams& theta, const ClosedLoopDataset& data,
                 const ReferenceModel& gm) {
  const auto rt = fictitious_reference(theta, data);
  const auto model = gm.filter().filter(rt.values);
  double cost = 0.0;
  for (std::size_t k = cost_transient(gm); k < data.size(); ++k) {
    const double e = data.y0[k] - model[k];
    cost += e * e;
  }
  return cost;
}

std::vector<RegressorSample> build_regressors(const ClosedLoopDataset& data,
                                              const ReferenceModel& gm) {
  data.validate();
  RegressorGenerator gen(gm, data.ts);
  std::vector<RegressorSample> out;
  out.reserve(data.size());
  for (std::size_t k = 0; k < data.size(); ++k) out.push_back(gen.step(data.y0[k], data.u0[k]));
  return out;
}

ControllerParams batch_solve(std::span<const RegressorSample> samples) {
  Mat3 a = Mat3::Zero();
  Vec3 b = Vec3::Zero();
  for (const auto& s : samples) {
    a.noalias() += s.phi * s.phi.transpose();
    b.noalias() += s.phi * s.d;
  }
  if (!a.allFinite() || !b.allFinite()) throw RankDeficient("normal equations are not finite");
  const Vec3 diag = a.diagonal();
  if ((diag.array() <= 0.0).any()) throw RankDeficient("a regressor component is identically zero");

  const Vec3 scale = diag.cwiseSqrt().cwiseInverse();
  const Mat3 as = scale.asDiagonal() * a * scale.asDiagonal();
  const auto ev = symmetric_eigenvalues(as);
  if (!(ev[0] > 0.0) || ev[2] / ev[0] >= 1e12)
    throw RankDeficient("normal matrix is singular or ill-conditioned (non-informative data)");

  Eigen::LLT<Mat3> llt(symmetrize(as));
  if (llt.info() != Eigen::Success) throw RankDeficient("normal matrix is not positive definite");
  const Vec3 x = llt.solve(scale.cwiseProduct(b));
  return ControllerParams(Vec3(scale.cwiseProduct(x)));
}

ControllerParams batch_tune(const ClosedLoopDataset& data, const ReferenceModel& gm) {
  const auto samples = build_regressors(data, gm);
  const std::size_t skip = cost_transient(gm);
  if (samples.size() <= skip) throw RankDeficient("dataset shorter than the transient window");
  return batch_solve(std::span(samples).subspan(skip));
}

ControllerParams polish(const ControllerParams& start, const ClosedLoopDataset& data,
                        const ReferenceModel& gm, const PolishOptions& opts) {
  auto cost_of = [&](const Vec3& t) {
    try {
      const double c = frit_cost(ControllerParams(t), data, gm);
      return std::isfinite(c) ? c : std::numeric_limits<double>::infinity();
    } catch (const InverseNotProper&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  Vec3 best = start.theta;
  double best_cost = cost_of(best);
  Vec3 step;
  for (int i = 0; i < 3; ++i) step(i) = opts.initial_step * std::max(std::abs(best(i)), 1e-2);

  for (int it = 0; it < opts.iterations; ++it) {
    bool improved = false;
    for (int i = 0; i < 3; ++i) {
      for (double dir : {1.0, -1.0}) {
        Vec3 trial = best;
        trial(i) += dir * step(i);
        const double c = cost_of(trial);
        if (c < best_cost) {
          best = trial;
          best_cost = c;
          improved = true;
          break;
        }
      }
    }
    if (!improved) step *= opts.shrink;
  }
  return ControllerParams(best);
}

std::filesystem::path dataset_sidecar_path(const std::filesystem::path& csv) {
  auto p = csv;
  p.replace_extension(".json");
  return p;
}

ClosedLoopDataset read_dataset_csv(const std::filesystem::path& csv) {
  const auto sidecar = dataset_sidecar_path(csv);
  std::ifstream in(sidecar);
  if (!in) throw ConfigError("missing dataset sidecar " + sidecar.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("bad sidecar " + sidecar.string() + ": " + e.what());
  }
  if (!j.contains("ts") || !j["ts"].is_number()) throw ConfigError("sidecar lacks numeric \"ts\"");
  return read_dataset_csv(csv, j["ts"].get<double>());
}

ClosedLoopDataset read_dataset_csv(const std::filesystem::path& csv, double ts) {
  std::ifstream in(csv);
  if (!in) throw ConfigError("cannot open dataset " + csv.string());
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty dataset " + csv.string());
  const auto header = detail::split_csv(line);
  int col_r = -1, col_u = -1, col_y = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "r") col_r = static_cast<int>(i);
    if (header[i] == "u") col_u = static_cast<int>(i);
    if (header[i] == "y") col_y = static_cast<int>(i);
  }
  if (col_r < 0 || col_u < 0 || col_y < 0) throw ConfigError("dataset header must contain r,u,y");

  ClosedLoopDataset data;
  data.ts = ts;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto f = detail::split_csv(line);
    const auto need = static_cast<std::size_t>(std::max({col_r, col_u, col_y}));
    if (f.size() <= need) throw ConfigError("dataset line " + std::to_string(lineno) + " is short");
    data.r.push_back(detail::parse_double(f[col_r]));
    data.u0.push_back(detail::parse_double(f[col_u]));
    data.y0.push_back(detail::parse_double(f[col_y]));
  }
  data.validate();
  return data;
}

void write_dataset_csv(const std::filesystem::path& csv, const ClosedLoopDataset& data) {
  data.validate();
  std::ofstream out(csv);
  if (!out) throw ConfigError("cannot write " + csv.string());
  out << "k,r,u,y\n";
  for (std::size_t k = 0; k < data.size(); ++k)
    out << k << ',' << detail::format_double(data.r[k]) << ',' << detail::format_double(data.u0[k])
        << ',' << detail::format_double(data.y0[k]) << '\n';
  std::ofstream side(dataset_sidecar_path(csv));
  side << nlohmann::json{{"ts", data.ts}}.dump() << '\n';
}

}  // namespace afrit
