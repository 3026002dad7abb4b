#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace afrit {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid construction arguments or scenario configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Loss of positive definiteness, vanishing denominators and similar
/// failures inside the recursive estimators. Carries the loop step when the
/// harness knows it.
class NumericalBreakdown : public Error {
 public:
  explicit NumericalBreakdown(const std::string& what,
                              std::optional<std::size_t> step = std::nullopt)
      : Error(step ? what + " (step " + std::to_string(*step) + ")" : what),
        step_(step) {}

  std::optional<std::size_t> step() const noexcept { return step_; }

 private:
  std::optional<std::size_t> step_;
};

/// The controller has no proper inverse (zero leading numerator coefficient).
class InverseNotProper : public Error {
 public:
  using Error::Error;
};

/// The batch normal matrix is singular or too ill-conditioned to solve.
class RankDeficient : public Error {
 public:
  using Error::Error;
};

}  // namespace afrit
