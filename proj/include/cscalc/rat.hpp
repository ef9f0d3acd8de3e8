#pragma once

// Small exact rational type on int64 with overflow-checked arithmetic.
// Everything in the calculus that looks numeric (slopes, tangents of angles)
// is a rational, and all comparisons must be exact, so no floating point
// appears anywhere in the library proper.

#include <cstdint>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

namespace cscalc {

namespace detail {

inline std::int64_t checked(__int128 v, const char* what) {
  if (v > static_cast<__int128>(INT64_MAX) ||
      v < static_cast<__int128>(INT64_MIN)) {
    throw std::overflow_error(std::string("rational overflow in ") + what);
  }
  return static_cast<std::int64_t>(v);
}

inline std::int64_t mul_checked(std::int64_t a, std::int64_t b,
                                const char* what) {
  return checked(static_cast<__int128>(a) * b, what);
}

inline std::int64_t add_checked(std::int64_t a, std::int64_t b,
                                const char* what) {
  return checked(static_cast<__int128>(a) + b, what);
}

}  // namespace detail

// Always stored reduced with positive denominator.
struct Rat {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rat() = default;
  Rat(std::int64_t n) : num(n), den(1) {}  // NOLINT: implicit by design
  Rat(std::int64_t n, std::int64_t d) : num(n), den(d) { reduce(); }

  void reduce() {
    if (den == 0) throw std::domain_error("rational with zero denominator");
    if (den < 0) {
      num = detail::checked(-static_cast<__int128>(num), "negate");
      den = detail::checked(-static_cast<__int128>(den), "negate");
    }
    std::int64_t g = std::gcd(num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }

  friend Rat operator+(const Rat& a, const Rat& b) {
    return Rat(detail::add_checked(detail::mul_checked(a.num, b.den, "add"),
                                   detail::mul_checked(b.num, a.den, "add"),
                                   "add"),
               detail::mul_checked(a.den, b.den, "add"));
  }
  friend Rat operator-(const Rat& a, const Rat& b) { return a + (-b); }
  friend Rat operator-(const Rat& a) {
    Rat r;
    r.num = detail::checked(-static_cast<__int128>(a.num), "negate");
    r.den = a.den;
    return r;
  }
  friend Rat operator*(const Rat& a, const Rat& b) {
    return Rat(detail::mul_checked(a.num, b.num, "mul"),
               detail::mul_checked(a.den, b.den, "mul"));
  }
  friend Rat operator/(const Rat& a, const Rat& b) {
    if (b.num == 0) throw std::domain_error("rational division by zero");
    return Rat(detail::mul_checked(a.num, b.den, "div"),
               detail::mul_checked(a.den, b.num, "div"));
  }

  friend bool operator==(const Rat& a, const Rat& b) {
    return a.num == b.num && a.den == b.den;
  }
  friend bool operator!=(const Rat& a, const Rat& b) { return !(a == b); }
  friend bool operator<(const Rat& a, const Rat& b) {
    return static_cast<__int128>(a.num) * b.den <
           static_cast<__int128>(b.num) * a.den;
  }
  friend bool operator>(const Rat& a, const Rat& b) { return b < a; }
  friend bool operator<=(const Rat& a, const Rat& b) { return !(b < a); }
  friend bool operator>=(const Rat& a, const Rat& b) { return !(a < b); }

  std::string str() const {
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
  }
  friend std::ostream& operator<<(std::ostream& os, const Rat& r) {
    return os << r.str();
  }
};

}  // namespace cscalc
