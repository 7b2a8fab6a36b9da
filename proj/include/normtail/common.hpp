#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace normtail {

// Invalid user input: bad config values, dimension mismatches, violated
// hypotheses of a check.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A run produced a non-finite iterate. Carries the iteration at which the
// overflow was first detected.
struct NumericalError : std::runtime_error {
  NumericalError(const std::string& what, long iteration_)
      : std::runtime_error(what), iteration(iteration_) {}
  long iteration;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(std::span<const double> v) { return std::sqrt(dot(v, v)); }

inline double norm1(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

inline bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace normtail
