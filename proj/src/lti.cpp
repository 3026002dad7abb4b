#include "afrit/lti.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "afrit/errors.hpp"

namespace afrit {

namespace {

std::vector<double> padded(const std::vector<double>& c, std::size_t n) {
  std::vector<double> out(c);
  out.resize(n, 0.0);
  return out;
}

}  // namespace

RationalFilter::RationalFilter(std::vector<double> num, std::vector<double> den)
    : num_(std::move(num)), den_(std::move(den)) {
  if (den_.empty()) throw ConfigError("RationalFilter: empty denominator");
  if (den_[0] == 0.0) throw ConfigError("RationalFilter: leading denominator coefficient is zero");
  for (double c : num_)
    if (!std::isfinite(c)) throw ConfigError("RationalFilter: non-finite numerator coefficient");
  for (double c : den_)
    if (!std::isfinite(c)) throw ConfigError("RationalFilter: non-finite denominator coefficient");
  if (num_.empty()) num_.push_back(0.0);

  const double d0 = den_[0];
  if (d0 != 1.0) {
    for (double& c : num_) c /= d0;
    for (double& c : den_) c /= d0;
  }
  const std::size_t n = std::max(num_.size(), den_.size());
  num_.resize(n, 0.0);
  den_.resize(n, 0.0);
  state_.assign(n - 1, 0.0);
}

RationalFilter RationalFilter::identity() { return RationalFilter({1.0}, {1.0}); }
RationalFilter RationalFilter::zero() { return RationalFilter({0.0}, {1.0}); }
RationalFilter RationalFilter::gain(double k) { return RationalFilter({k}, {1.0}); }

double RationalFilter::step(double u) {
  const std::size_t n = state_.size();
  if (n == 0) return num_[0] * u;
  const double y = num_[0] * u + state_[0];
  for (std::size_t i = 0; i + 1 < n; ++i)
    state_[i] = state_[i + 1] + num_[i + 1] * u - den_[i + 1] * y;
  state_[n - 1] = num_[n] * u - den_[n] * y;
  return y;
}

std::vector<double> RationalFilter::filter(std::span<const double> u) const {
  RationalFilter f(*this);
  f.reset();
  return f.apply(u);
}

std::vector<double> RationalFilter::apply(std::span<const double> u) {
  std::vector<double> y;
  y.reserve(u.size());
  for (double x : u) y.push_back(step(x));
  return y;
}

void RationalFilter::reset() { std::fill(state_.begin(), state_.end(), 0.0); }

void RationalFilter::set_state(std::span<const double> state) {
  if (state.size() != state_.size()) throw ConfigError("RationalFilter: state size mismatch");
  std::copy(state.begin(), state.end(), state_.begin());
}

bool RationalFilter::strictly_proper() const noexcept { return num_[0] == 0.0; }

double RationalFilter::dc_gain() const {
  double n = 0.0, d = 0.0;
  for (double c : num_) n += c;
  for (double c : den_) d += c;
  return n / d;
}

std::vector<std::complex<double>> RationalFilter::poles() const {
  return q_polynomial_roots(den_);
}

std::vector<std::complex<double>> RationalFilter::zeros() const {
  return q_polynomial_roots(num_);
}

bool RationalFilter::is_stable() const {
  const auto p = poles();
  return std::all_of(p.begin(), p.end(),
                     [](const std::complex<double>& p) { return std::abs(p) < 1.0; });
}

std::vector<double> poly_mul(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) return {};
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

std::vector<std::complex<double>> q_polynomial_roots(std::span<const double> coeffs) {
  // sum c_i q^i with q = 1/z, times z^m: c0 z^m + c1 z^(m-1) + ... + cm.
  // Leading zeros in c lower the z-degree (roots at infinity are dropped).
  std::size_t first = 0;
  while (first < coeffs.size() && coeffs[first] == 0.0) ++first;
  if (first + 1 >= coeffs.size()) return {};
  const std::size_t degree = coeffs.size() - 1 - first;
  const double lead = coeffs[first];
  if (degree == 1) return {std::complex<double>(-coeffs[first + 1] / lead, 0.0)};

  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(degree, degree);
  for (std::size_t j = 0; j < degree; ++j)
    companion(0, j) = -coeffs[first + 1 + j] / lead;
  for (std::size_t i = 1; i < degree; ++i) companion(i, i - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
  std::vector<std::complex<double>> roots;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i)
    roots.push_back(solver.eigenvalues()(i));
  return roots;
}

RationalFilter one_minus(const RationalFilter& f) {
  // 1 - N/D = (D - N) / D
  const auto& den = f.denominator();
  const auto& num = f.numerator();
  std::vector<double> out(den.size());
  for (std::size_t i = 0; i < den.size(); ++i) out[i] = den[i] - num[i];
  return RationalFilter(std::move(out), den);
}

RationalFilter series(const RationalFilter& first, const RationalFilter& second) {
  return RationalFilter(poly_mul(first.numerator(), second.numerator()),
                        poly_mul(first.denominator(), second.denominator()));
}

RationalFilter parallel(const RationalFilter& f, const RationalFilter& g) {
  auto a = poly_mul(f.numerator(), g.denominator());
  auto b = poly_mul(g.numerator(), f.denominator());
  const std::size_t n = std::max(a.size(), b.size());
  a = padded(a, n);
  b = padded(b, n);
  for (std::size_t i = 0; i < n; ++i) a[i] += b[i];
  return RationalFilter(std::move(a), poly_mul(f.denominator(), g.denominator()));
}

ReferenceModel::ReferenceModel(RationalFilter filter) : filter_(std::move(filter)) {
  if (!filter_.is_stable())
    throw ConfigError("ReferenceModel: poles must lie strictly inside the unit circle");
  filter_.reset();
}

ReferenceModel ReferenceModel::nominal() {
  return ReferenceModel(RationalFilter({0.0, 0.0095}, {1.0, -0.99}));
}

ReferenceModel ReferenceModel::first_order_zoh(double tau, double ts) {
  if (!(tau > 0.0) || !(ts > 0.0))
    throw ConfigError("first_order_zoh: tau and ts must be positive");
  const double a = std::exp(-ts / tau);
  return ReferenceModel(RationalFilter({0.0, 1.0 - a}, {1.0, -a}));
}

}  // namespace afrit
