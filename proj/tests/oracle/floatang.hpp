#pragma once

// Floating-point reference model for angle arithmetic, used only by tests.
// Everything here goes through doubles and <cmath>, deliberately sharing no
// code with the exact library: a twist angle (n, p/q) evaluates to
// n*pi + atan(-p/q), with the vertical slope contributing +pi/2.  Test inputs
// keep |p|, |q| small, so genuinely distinct values differ by far more than
// the 1e-9 comparison slack.

#include <cmath>
#include <cstdint>

namespace oracle {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTol = 1e-9;

inline double frac_value(std::int64_t p, std::int64_t q) {
  if (q == 0) return kPi / 2;
  return std::atan(-static_cast<double>(p) / static_cast<double>(q));
}

inline double angle_value(std::int64_t n, std::int64_t p, std::int64_t q) {
  return static_cast<double>(n) * kPi + frac_value(p, q);
}

// -1 / 0 / +1 with ties at the comparison slack.
inline int compare(double x, double y) {
  if (x < y - kTol) return -1;
  if (x > y + kTol) return 1;
  return 0;
}

}  // namespace oracle
