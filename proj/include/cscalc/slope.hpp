#pragma once

// Exact slope and twist-angle arithmetic.
//
// A boundary torus carries a pair of preferred directions (longitude,
// meridian); a family of parallel essential curves on it is recorded as a
// reduced integer pair.  The characteristic foliation printed on the boundary
// of a model neighbourhood rotates as the radius grows, so "how far the model
// has been wound" is an angle measured in half-turns plus a fractional part;
// the fractional part is pinned down by the slope whose foliation it
// produces, keeping every comparison exact.  All angle comparisons, spans and
// complements below are rational-only: tangents are tracked instead of
// radians.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

#include "cscalc/rat.hpp"

namespace cscalc {

// ---------------------------------------------------------------------------
// Slope: reduced (p, q) with q >= 0; (1, 0) is the vertical slope (infinity).
// p counts the longitudinal direction, q the meridional one; the numeric
// value of a finite slope is p/q.
// ---------------------------------------------------------------------------
struct Slope {
  std::int64_t p = 0;
  std::int64_t q = 1;

  Slope() = default;
  Slope(std::int64_t pp, std::int64_t qq) : p(pp), q(qq) { normalize(); }

  static Slope infinity() { return Slope(1, 0); }
  static Slope zero() { return Slope(0, 1); }
  static Slope of(const Rat& r) { return Slope(r.num, r.den); }

  bool is_infinite() const { return q == 0; }
  Rat value() const {
    if (is_infinite()) throw std::domain_error("infinite slope has no value");
    return Rat(p, q);
  }

  void normalize() {
    if (p == 0 && q == 0) throw std::domain_error("slope (0,0) is undefined");
    std::int64_t g = std::gcd(p, q);
    if (g > 1) {
      p /= g;
      q /= g;
    }
    if (q < 0 || (q == 0 && p < 0)) {
      p = -p;
      q = -q;
    }
  }

  friend bool operator==(const Slope& a, const Slope& b) {
    return a.p == b.p && a.q == b.q;
  }
  friend bool operator!=(const Slope& a, const Slope& b) { return !(a == b); }

  std::string str() const {
    return std::to_string(p) + "/" + std::to_string(q);
  }
  friend std::ostream& operator<<(std::ostream& os, const Slope& s) {
    return os << s.str();
  }
};

// Negation of the value: -(p/q), with the vertical slope fixed.
inline Slope negate_slope(const Slope& s) {
  if (s.is_infinite()) return s;
  return Slope(-s.p, s.q);
}

// ---------------------------------------------------------------------------
// Fractional-part order of slopes.
//
// The fractional part of a twist angle lies in (-pi/2, pi/2] and equals
// arctan(-slope), with the vertical slope mapped to +pi/2 (the maximum).
// Hence for finite slopes the fractional parts sort by *descending* slope
// value, and the vertical slope sorts above every finite one.
// ---------------------------------------------------------------------------
inline bool frac_angle_less(const Slope& s1, const Slope& s2) {
  if (s1 == s2) return false;
  if (s1.is_infinite()) return false;
  if (s2.is_infinite()) return true;
  return static_cast<__int128>(s1.p) * s2.q > static_cast<__int128>(s2.p) * s1.q;
}

// ---------------------------------------------------------------------------
// TwistAngle: n half-turns plus the fractional part encoded by a slope.
// Value = n*pi + arctan(-slope).  Examples of the encoding:
//   0        <-> (0, 0/1)      pi/4  <-> (0, -1/1)     pi/2 <-> (0, 1/0)
//   3*pi/4   <-> (1, 1/1)      pi    <-> (1, 0/1)      5pi/4 <-> (1, -1/1)
// ---------------------------------------------------------------------------
struct TwistAngle {
  std::int64_t half_turns = 0;  // n
  Slope slope;                  // fixes the fractional part

  TwistAngle() = default;
  TwistAngle(std::int64_t n, Slope s) : half_turns(n), slope(s) {}

  friend bool operator==(const TwistAngle& a, const TwistAngle& b) {
    return a.half_turns == b.half_turns && a.slope == b.slope;
  }
  friend bool operator!=(const TwistAngle& a, const TwistAngle& b) {
    return !(a == b);
  }

  std::string str() const {
    return "(" + std::to_string(half_turns) + "; " + slope.str() + ")";
  }
};

// Total order: whole half-turns first, then the fractional part.
inline int compare_angles(const TwistAngle& a, const TwistAngle& b) {
  if (a.half_turns != b.half_turns) return a.half_turns < b.half_turns ? -1 : 1;
  if (a.slope == b.slope) return 0;
  return frac_angle_less(a.slope, b.slope) ? -1 : 1;
}

// The slope whose boundary foliation this angle produces.  Tangents are
// pi-periodic, so whole half-turns drop out.
inline Slope slope_of_angle(const TwistAngle& a) { return a.slope; }

inline TwistAngle add_half_turn(const TwistAngle& a, std::int64_t k = 1) {
  return TwistAngle(a.half_turns + k, a.slope);
}

// Inverse of slope_of_angle with the half-turn count supplied by the caller.
inline TwistAngle angle_for_slope(const Slope& s, std::int64_t n) {
  if (n < 0) throw std::domain_error("angle_for_slope needs n >= 0");
  return TwistAngle(n, s);
}

// The unique angle in (0, pi] whose foliation has the given slope: negative
// and vertical slopes land in (0, pi/2], nonnegative finite ones in
// (pi/2, pi].  This is the canonical radial extent of a freshly carved model
// neighbourhood with the given boundary dividing slope.
inline TwistAngle twist_end_for_slope(const Slope& s) {
  if (s.is_infinite() || s.p < 0) return TwistAngle(0, s);
  return TwistAngle(1, s);
}

// Complement with respect to k half-turns: the angle b with a + b = k*pi.
// arctan(-s) flips sign, so the slope negates; the vertical fractional part
// pi/2 complements to pi/2 at the cost of one half-turn.
inline TwistAngle complement_angle(const TwistAngle& a, std::int64_t k) {
  if (a.slope.is_infinite())
    return TwistAngle(k - a.half_turns - 1, a.slope);
  return TwistAngle(k - a.half_turns, negate_slope(a.slope));
}

// ---------------------------------------------------------------------------
// BasisChange: an integer matrix [[a, b], [c, d]] of determinant +-1 acting
// on curve classes by (p, q) |-> (a*p + b*q, c*p + d*q).
// ---------------------------------------------------------------------------
struct BasisChange {
  std::int64_t a = 1, b = 0, c = 0, d = 1;

  BasisChange() = default;
  BasisChange(std::int64_t aa, std::int64_t bb, std::int64_t cc,
              std::int64_t dd)
      : a(aa), b(bb), c(cc), d(dd) {
    if (det() != 1 && det() != -1)
      throw std::invalid_argument("basis change must have determinant +-1");
  }

  static BasisChange identity() { return BasisChange(); }

  std::int64_t det() const {
    return detail::checked(
        static_cast<__int128>(a) * d - static_cast<__int128>(b) * c, "det");
  }

  BasisChange inverse() const {
    std::int64_t s = det();  // +-1
    return BasisChange(s * d, -s * b, -s * c, s * a);
  }

  // compose(g2, g1): apply g1 first, then g2 (matrix product g2 * g1).
  static BasisChange compose(const BasisChange& g2, const BasisChange& g1) {
    return BasisChange(
        detail::add_checked(detail::mul_checked(g2.a, g1.a, "compose"),
                            detail::mul_checked(g2.b, g1.c, "compose"),
                            "compose"),
        detail::add_checked(detail::mul_checked(g2.a, g1.b, "compose"),
                            detail::mul_checked(g2.b, g1.d, "compose"),
                            "compose"),
        detail::add_checked(detail::mul_checked(g2.c, g1.a, "compose"),
                            detail::mul_checked(g2.d, g1.c, "compose"),
                            "compose"),
        detail::add_checked(detail::mul_checked(g2.c, g1.b, "compose"),
                            detail::mul_checked(g2.d, g1.d, "compose"),
                            "compose"));
  }

  friend bool operator==(const BasisChange& x, const BasisChange& y) {
    return x.a == y.a && x.b == y.b && x.c == y.c && x.d == y.d;
  }
  friend bool operator!=(const BasisChange& x, const BasisChange& y) {
    return !(x == y);
  }

  std::string str() const {
    return "[" + std::to_string(a) + " " + std::to_string(b) + "; " +
           std::to_string(c) + " " + std::to_string(d) + "]";
  }
};

inline Slope change_basis(const Slope& s, const BasisChange& g) {
  return Slope(
      detail::add_checked(detail::mul_checked(g.a, s.p, "change_basis"),
                          detail::mul_checked(g.b, s.q, "change_basis"),
                          "change_basis"),
      detail::add_checked(detail::mul_checked(g.c, s.p, "change_basis"),
                          detail::mul_checked(g.d, s.q, "change_basis"),
                          "change_basis"));
}

// Canonical Bezout complement of a reduced pair (p, q): the (c, d) with
// c*p + d*q = 1 that minimizes |c| (ties: c >= 0), then |d| (ties: d >= 0).
inline std::pair<std::int64_t, std::int64_t> bezout_complement(
    std::int64_t p, std::int64_t q) {
  if (std::gcd(p, q) != 1)
    throw std::domain_error("bezout_complement needs a reduced pair");
  if (q == 0) return {p, 0};  // c*p = 1 forces c = p = +-1; then d = 0.
  // Extended Euclid for c0*p + d0*q = 1.
  std::int64_t r0 = p, r1 = q, c0 = 1, c1 = 0;
  while (r1 != 0) {
    std::int64_t k = r0 / r1;
    std::int64_t r2 = r0 - k * r1;
    std::int64_t c2 = c0 - k * c1;
    r0 = r1; r1 = r2;
    c0 = c1; c1 = c2;
  }
  if (r0 < 0) c0 = -c0;  // gcd came out as -1
  // General solution: c = c0 + t*q.  Reduce |c| below |q|/2, preferring the
  // nonnegative representative on ties.
  std::int64_t qa = q < 0 ? -q : q;
  std::int64_t c = ((c0 % qa) + qa) % qa;   // c in [0, qa)
  if (2 * c > qa) c -= qa;                  // |c| minimal; ties keep c >= 0
  // Recover d from c*p + d*q = 1.
  __int128 dn = (static_cast<__int128>(1) - static_cast<__int128>(c) * p);
  std::int64_t d = detail::checked(dn / q, "bezout");
  return {c, d};
}

// ---------------------------------------------------------------------------
// FracAngle: an angle in [0, pi) stored by its exact tangent, with pi/2 kept
// as a separate flag.  Zones: tangent 0 -> angle 0; tangent > 0 -> (0, pi/2);
// right angle; tangent < 0 -> (pi/2, pi).
// ---------------------------------------------------------------------------
struct FracAngle {
  bool right = false;
  Rat t;  // tangent; meaningful only when !right

  static FracAngle zero() { return FracAngle{}; }
  static FracAngle right_angle() { return FracAngle{true, Rat(0)}; }
  static FracAngle of_tangent(const Rat& tt) { return FracAngle{false, tt}; }

  bool is_zero() const { return !right && t == Rat(0); }

  // 0: zero, 1: (0, pi/2), 2: pi/2, 3: (pi/2, pi).
  int rank() const {
    if (right) return 2;
    if (t == Rat(0)) return 0;
    return t > Rat(0) ? 1 : 3;
  }

  friend bool operator==(const FracAngle& x, const FracAngle& y) {
    return x.right == y.right && (x.right || x.t == y.t);
  }
  friend bool operator!=(const FracAngle& x, const FracAngle& y) {
    return !(x == y);
  }
};

// Within zones (0,pi/2) and (pi/2,pi) the tangent increases with the angle,
// so ordering is: rank first, tangent second.
inline int compare_frac_angles(const FracAngle& x, const FracAngle& y) {
  if (x.rank() != y.rank()) return x.rank() < y.rank() ? -1 : 1;
  if (x.right || x.t == y.t) return 0;
  return x.t < y.t ? -1 : 1;
}

// Sum of two angles in [0, pi): returns {carry, fractional part}, where the
// true sum is carry*pi + frac.  Uses tan(u+v) = (t1+t2)/(1-t1*t2); the zone
// bookkeeping decides the carry and catches the right-angle cases where the
// denominator vanishes.
inline std::pair<int, FracAngle> add_frac_angles(const FracAngle& x,
                                                 const FracAngle& y) {
  if (x.is_zero()) return {0, y};
  if (y.is_zero()) return {0, x};
  if (x.right && y.right) return {1, FracAngle::zero()};
  if (x.right || y.right) {
    const Rat& t = x.right ? y.t : x.t;
    // pi/2 + v:  tangent flips to -1/t; lands past pi exactly when v > pi/2.
    int carry = t < Rat(0) ? 1 : 0;
    return {carry, FracAngle::of_tangent(Rat(-t.den, t.num))};
  }
  const Rat& t1 = x.t;
  const Rat& t2 = y.t;
  Rat prod = t1 * t2;
  if (t1 > Rat(0) && t2 > Rat(0)) {
    if (prod == Rat(1)) return {0, FracAngle::right_angle()};
    return {0, FracAngle::of_tangent((t1 + t2) / (Rat(1) - prod))};
  }
  if (t1 < Rat(0) && t2 < Rat(0)) {
    if (prod == Rat(1)) return {1, FracAngle::right_angle()};
    return {1, FracAngle::of_tangent((t1 + t2) / (Rat(1) - prod))};
  }
  // Mixed zones: sum lies in (pi/2, 3pi/2); it reaches pi exactly when the
  // tangents cancel, and passes it when t1 + t2 > 0.
  Rat s = t1 + t2;
  if (s == Rat(0)) return {1, FracAngle::zero()};
  int carry = s > Rat(0) ? 1 : 0;
  return {carry, FracAngle::of_tangent(s / (Rat(1) - prod))};
}

// ---------------------------------------------------------------------------
// AngleSpan: a nonnegative rotation amount, m half-turns plus a fractional
// part in [0, pi).
// ---------------------------------------------------------------------------
struct AngleSpan {
  std::int64_t half_turns = 0;
  FracAngle frac;

  static AngleSpan zero() { return AngleSpan{}; }

  std::int64_t floor_half_turns() const { return half_turns; }

  friend AngleSpan operator+(const AngleSpan& x, const AngleSpan& y) {
    auto [carry, f] = add_frac_angles(x.frac, y.frac);
    return AngleSpan{x.half_turns + y.half_turns + carry, f};
  }

  friend bool operator==(const AngleSpan& x, const AngleSpan& y) {
    return x.half_turns == y.half_turns && x.frac == y.frac;
  }
  friend bool operator!=(const AngleSpan& x, const AngleSpan& y) {
    return !(x == y);
  }
};

inline int compare_spans(const AngleSpan& x, const AngleSpan& y) {
  if (x.half_turns != y.half_turns) return x.half_turns < y.half_turns ? -1 : 1;
  return compare_frac_angles(x.frac, y.frac);
}

// Difference hi - lo of two twist angles with lo <= hi.  Writing each angle
// as n*pi + arctan(x) with x = -slope, the fractional difference has tangent
// (x_hi - x_lo) / (1 + x_hi*x_lo); it needs a borrow from the half-turn count
// exactly when the fractional part of hi sits below that of lo.
inline AngleSpan span_between(const TwistAngle& lo, const TwistAngle& hi) {
  if (compare_angles(lo, hi) > 0)
    throw std::domain_error("span_between needs lo <= hi");
  const bool lo_inf = lo.slope.is_infinite();
  const bool hi_inf = hi.slope.is_infinite();
  std::int64_t borrow = 0;
  FracAngle frac = FracAngle::zero();
  if (lo_inf && hi_inf) {
    // both fractional parts are pi/2
  } else if (hi_inf) {
    // pi/2 - arctan(y), y finite: tangent 1/y (right angle when y = 0).
    Rat y = Rat(-lo.slope.p, lo.slope.q);
    frac = (y == Rat(0)) ? FracAngle::right_angle()
                         : FracAngle::of_tangent(Rat(y.den, y.num));
  } else if (lo_inf) {
    // arctan(y) - pi/2 borrows a half-turn: tangent -1/y.
    Rat y = Rat(-hi.slope.p, hi.slope.q);
    borrow = 1;
    frac = (y == Rat(0)) ? FracAngle::right_angle()
                         : FracAngle::of_tangent(Rat(-y.den, y.num));
  } else {
    Rat x(-hi.slope.p, hi.slope.q);
    Rat y(-lo.slope.p, lo.slope.q);
    borrow = (x < y) ? 1 : 0;
    if (x != y) {
      Rat num = x - y;
      Rat den = Rat(1) + x * y;
      frac = (den == Rat(0)) ? FracAngle::right_angle()
                             : FracAngle::of_tangent(num / den);
    }
  }
  return AngleSpan{hi.half_turns - lo.half_turns - borrow, frac};
}

}  // namespace cscalc
