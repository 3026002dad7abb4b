#pragma once

// Test-only generators and independent oracles. Nothing here calls into the
// code paths it is used to check.

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "afrit/linalg.hpp"

namespace afrit::testing {

inline std::vector<double> random_sequence(std::mt19937_64& rng, std::size_t n, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  std::vector<double> v(n);
  for (auto& x : v) x = nd(rng);
  return v;
}

inline Vec3 random_vec(std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  return {nd(rng), nd(rng), nd(rng)};
}

inline Mat3 random_spd(std::mt19937_64& rng, double shift = 0.1) {
  Mat3 a;
  std::normal_distribution<double> nd(0.0, 1.0);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a(i, j) = nd(rng);
  return a * a.transpose() + shift * Mat3::Identity();
}

/// Direct evaluation of sum_i den_i y(k-i) = sum_i num_i u(k-i) from rest.
inline std::vector<double> difference_equation(const std::vector<double>& num,
                                               const std::vector<double>& den,
                                               const std::vector<double>& u) {
  std::vector<double> y(u.size(), 0.0);
  for (std::size_t k = 0; k < u.size(); ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < num.size() && i <= k; ++i) acc += num[i] * u[k - i];
    for (std::size_t i = 1; i < den.size() && i <= k; ++i) acc -= den[i] * y[k - i];
    y[k] = acc / den[0];
  }
  return y;
}

/// Eigenvalues of a symmetric 3x3 matrix as the roots of its characteristic
/// polynomial: the stationary points of the cubic split the real line into
/// three monotone pieces, each bisected to full precision.
inline std::array<double, 3> charpoly_eigenvalues(const Mat3& m) {
  using ld = long double;
  const ld a = m(0, 0), b = m(1, 1), c = m(2, 2), d = m(0, 1), e = m(1, 2), f = m(0, 2);
  const ld tr = a + b + c;
  const ld c2 = a * b + b * c + a * c - d * d - e * e - f * f;
  const ld det = a * (b * c - e * e) - d * (d * c - e * f) + f * (d * e - b * f);
  // q(x) = x^3 - tr x^2 + c2 x - det, monic with three real roots.
  auto q = [&](ld x) { return ((x - tr) * x + c2) * x - det; };
  ld radius = 0;
  for (int i = 0; i < 3; ++i) {
    ld row = 0;
    for (int j = 0; j < 3; ++j) row += std::fabs(static_cast<ld>(m(i, j)));
    radius = std::max(radius, row);
  }
  const ld lo = -radius - 1, hi = radius + 1;
  // q'(x) = 3x^2 - 2 tr x + c2
  const ld disc = std::max<ld>(0, tr * tr - 3 * c2);
  const ld s1 = (tr - std::sqrt(disc)) / 3, s2 = (tr + std::sqrt(disc)) / 3;
  auto bisect = [&](ld l, ld h) {
    const bool rising = q(h) >= q(l);
    for (int it = 0; it < 200; ++it) {
      const ld mid = 0.5L * (l + h);
      if ((q(mid) < 0) == rising) l = mid; else h = mid;
    }
    return static_cast<double>(0.5L * (l + h));
  };
  std::array<double, 3> r{bisect(lo, s1), bisect(s1, s2), bisect(s2, hi)};
  std::sort(r.begin(), r.end());
  return r;
}

inline double rel_err(const Vec3& a, const Vec3& b) { return (a - b).norm() / std::max(1e-300, b.norm()); }

}  // namespace afrit::testing
