#include "cscalc/slope.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <random>
#include <vector>

#include "oracle/floatang.hpp"

using namespace cscalc;

namespace {

double value_of(const TwistAngle& t) {
  return oracle::angle_value(t.half_turns, t.slope.p, t.slope.q);
}

double value_of(const FracAngle& f) {
  if (f.right) return oracle::kPi / 2;
  double a = std::atan(static_cast<double>(f.t.num) /
                       static_cast<double>(f.t.den));
  return a < 0 ? a + oracle::kPi : a;  // fold into [0, pi)
}

double value_of(const AngleSpan& s) {
  return static_cast<double>(s.half_turns) * oracle::kPi + value_of(s.frac);
}

// All determinant +-1 integer matrices with entries in [-3, 3].
std::vector<BasisChange> small_unimodular() {
  std::vector<BasisChange> out;
  for (int a = -3; a <= 3; ++a)
    for (int b = -3; b <= 3; ++b)
      for (int c = -3; c <= 3; ++c)
        for (int d = -3; d <= 3; ++d)
          if (a * d - b * c == 1 || a * d - b * c == -1)
            out.push_back(BasisChange(a, b, c, d));
  return out;
}

Slope random_slope(std::mt19937& rng) {
  std::uniform_int_distribution<int> pd(-9, 9), qd(0, 9);
  for (;;) {
    int p = pd(rng), q = qd(rng);
    if (p != 0 || q != 0) return Slope(p, q);
  }
}

TwistAngle random_angle(std::mt19937& rng) {
  std::uniform_int_distribution<int> nd(0, 4);
  return TwistAngle(nd(rng), random_slope(rng));
}

}  // namespace

TEST_CASE("slope normalization") {
  CHECK(Slope(2, 4) == Slope(1, 2));
  CHECK(Slope(-2, -4) == Slope(1, 2));
  CHECK(Slope(2, -4) == Slope(-1, 2));
  CHECK(Slope(-3, 0) == Slope::infinity());
  CHECK(Slope(0, -7) == Slope::zero());
  CHECK(Slope::infinity().is_infinite());
  CHECK_FALSE(Slope(5, 3).is_infinite());
  CHECK(Slope(5, 3).value() == Rat(5, 3));
  CHECK_THROWS_AS(Slope(0, 0), std::domain_error);

  SECTION("idempotent on random input") {
    std::mt19937 rng(20260816);
    for (int i = 0; i < 500; ++i) {
      Slope s = random_slope(rng);
      CHECK(Slope(s.p, s.q) == s);
    }
  }
}

TEST_CASE("slope law at the four model radii") {
  // Radii r^2 = pi/4, pi/2, 3pi/4, pi carry boundary foliations of slope
  // -tan(r^2) = -1, infinity, 1, 0 respectively.
  CHECK(slope_of_angle(TwistAngle(0, Slope(-1, 1))) == Slope(-1, 1));
  CHECK(slope_of_angle(TwistAngle(0, Slope::infinity())) == Slope::infinity());
  CHECK(slope_of_angle(TwistAngle(1, Slope(1, 1))) == Slope(1, 1));
  CHECK(slope_of_angle(TwistAngle(1, Slope::zero())) == Slope::zero());

  // The encodings really sit at those angles (float cross-check).
  CHECK(value_of(TwistAngle(0, Slope(-1, 1))) ==
        Catch::Approx(oracle::kPi / 4));
  CHECK(value_of(TwistAngle(0, Slope::infinity())) ==
        Catch::Approx(oracle::kPi / 2));
  CHECK(value_of(TwistAngle(1, Slope(1, 1))) ==
        Catch::Approx(3 * oracle::kPi / 4));
  CHECK(value_of(TwistAngle(1, Slope::zero())) == Catch::Approx(oracle::kPi));
}

TEST_CASE("slope_of_angle is pi-periodic") {
  std::mt19937 rng(7);
  for (int i = 0; i < 200; ++i) {
    TwistAngle t = random_angle(rng);
    CHECK(slope_of_angle(add_half_turn(t, 1)) == slope_of_angle(t));
  }
}

TEST_CASE("add_half_turn") {
  CHECK(add_half_turn(TwistAngle(0, Slope(-1, 1)), 1) ==
        TwistAngle(1, Slope(-1, 1)));
  CHECK(add_half_turn(TwistAngle(0, Slope::zero()), 2) ==
        TwistAngle(2, Slope::zero()));
  std::mt19937 rng(11);
  for (int i = 0; i < 100; ++i) {
    TwistAngle t = random_angle(rng);
    CHECK(add_half_turn(add_half_turn(t, 1), 1) == add_half_turn(t, 2));
    CHECK(compare_angles(t, add_half_turn(t, 1)) < 0);
  }
}

TEST_CASE("change_basis examples") {
  CHECK(change_basis(Slope::zero(), BasisChange::identity()) == Slope::zero());
  CHECK(change_basis(Slope(-1, 1), BasisChange(0, 1, 1, 0)) == Slope(-1, 1));
  CHECK(change_basis(Slope::infinity(), BasisChange(1, 0, 1, 1)) ==
        Slope(1, 1));
}

TEST_CASE("change_basis is a group action") {
  auto mats = small_unimodular();
  REQUIRE(mats.size() > 100);
  std::mt19937 rng(13);
  std::uniform_int_distribution<size_t> pick(0, mats.size() - 1);
  for (int i = 0; i < 400; ++i) {
    BasisChange g = mats[pick(rng)], h = mats[pick(rng)];
    Slope s = random_slope(rng);
    CHECK(change_basis(s, BasisChange::compose(g, h)) ==
          change_basis(change_basis(s, h), g));
    CHECK(change_basis(change_basis(s, g), g.inverse()) == s);
    CHECK(BasisChange::compose(g, g.inverse()) == BasisChange::identity());
  }
  Slope fixed = random_slope(rng);
  CHECK(change_basis(fixed, BasisChange::identity()) == fixed);
  CHECK_THROWS_AS(BasisChange(1, 1, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(BasisChange(2, 0, 0, 2), std::invalid_argument);
}

TEST_CASE("angle_for_slope round-trips over the Farey grid") {
  std::vector<Slope> grid;
  grid.push_back(Slope::infinity());
  for (int p = -5; p <= 5; ++p)
    for (int q = 1; q <= 5; ++q)
      if (std::gcd(p, q) == 1) grid.push_back(Slope(p, q));
  for (const Slope& s : grid)
    for (std::int64_t n = 0; n <= 2; ++n) {
      TwistAngle t = angle_for_slope(s, n);
      CHECK(slope_of_angle(t) == s);
      CHECK(t.half_turns == n);
    }
  CHECK_THROWS_AS(angle_for_slope(Slope::zero(), -1), std::domain_error);
}

TEST_CASE("compare_angles examples") {
  CHECK(compare_angles(TwistAngle(0, Slope(-1, 1)), TwistAngle(1, Slope(-1, 1))) < 0);
  CHECK(compare_angles(TwistAngle(0, Slope(-1, 1)), TwistAngle(0, Slope::zero())) > 0);

  // The six reference encodings sort as 0 < pi/4 < pi/2 < 3pi/4 < pi < 5pi/4.
  std::vector<TwistAngle> chain = {
      TwistAngle(0, Slope::zero()),     TwistAngle(0, Slope(-1, 1)),
      TwistAngle(0, Slope::infinity()), TwistAngle(1, Slope(1, 1)),
      TwistAngle(1, Slope::zero()),     TwistAngle(1, Slope(-1, 1))};
  for (size_t i = 0; i < chain.size(); ++i)
    for (size_t j = 0; j < chain.size(); ++j) {
      int want = i < j ? -1 : (i > j ? 1 : 0);
      CHECK(compare_angles(chain[i], chain[j]) == want);
    }
}

TEST_CASE("compare_angles agrees with the floating-point oracle") {
  std::mt19937 rng(20260816);
  for (int i = 0; i < 1000; ++i) {
    TwistAngle t1 = random_angle(rng), t2 = random_angle(rng);
    int got = compare_angles(t1, t2);
    int want = oracle::compare(value_of(t1), value_of(t2));
    CHECK(got == want);
    CHECK(compare_angles(t1, t1) == 0);
    CHECK(compare_angles(t2, t1) == -got);
  }
  SECTION("transitivity on a random grid") {
    std::vector<TwistAngle> pts;
    for (int i = 0; i < 60; ++i) pts.push_back(random_angle(rng));
    for (const auto& a : pts)
      for (const auto& b : pts)
        for (const auto& c : pts)
          if (compare_angles(a, b) <= 0 && compare_angles(b, c) <= 0)
            CHECK(compare_angles(a, c) <= 0);
  }
}

TEST_CASE("twist_end_for_slope picks the representative in (0, pi]") {
  CHECK(twist_end_for_slope(Slope::zero()) == TwistAngle(1, Slope::zero()));
  CHECK(twist_end_for_slope(Slope(-1, 1)) == TwistAngle(0, Slope(-1, 1)));
  CHECK(twist_end_for_slope(Slope::infinity()) ==
        TwistAngle(0, Slope::infinity()));
  CHECK(twist_end_for_slope(Slope(1, 1)) == TwistAngle(1, Slope(1, 1)));

  std::mt19937 rng(17);
  for (int i = 0; i < 300; ++i) {
    Slope s = random_slope(rng);
    TwistAngle t = twist_end_for_slope(s);
    CHECK(slope_of_angle(t) == s);
    double v = value_of(t);
    CHECK(v > oracle::kTol);
    CHECK(v <= oracle::kPi + oracle::kTol);
  }
}

TEST_CASE("complement_angle completes to k half-turns") {
  CHECK(complement_angle(TwistAngle(0, Slope(-1, 1)), 1) ==
        TwistAngle(1, Slope(1, 1)));
  CHECK(complement_angle(TwistAngle(0, Slope::infinity()), 1) ==
        TwistAngle(0, Slope::infinity()));
  CHECK(complement_angle(TwistAngle(1, Slope::zero()), 2) ==
        TwistAngle(1, Slope::zero()));
  std::mt19937 rng(19);
  std::uniform_int_distribution<int> kd(0, 6);
  for (int i = 0; i < 300; ++i) {
    TwistAngle t = random_angle(rng);
    int k = kd(rng);
    TwistAngle c = complement_angle(t, k);
    CHECK(value_of(t) + value_of(c) ==
          Catch::Approx(k * oracle::kPi).margin(1e-9));
    CHECK(complement_angle(c, k) == t);
  }
}

TEST_CASE("fractional angle addition") {
  // atan(1/2) + atan(2) = pi/2.
  auto r1 = add_frac_angles(FracAngle::of_tangent(Rat(1, 2)),
                            FracAngle::of_tangent(Rat(2)));
  CHECK(r1.first == 0);
  CHECK(r1.second == FracAngle::right_angle());
  // The supplementary pair sums past pi.
  auto r2 = add_frac_angles(FracAngle::of_tangent(Rat(-1, 2)),
                            FracAngle::of_tangent(Rat(-2)));
  CHECK(r2.first == 1);
  CHECK(r2.second == FracAngle::right_angle());
  auto r3 = add_frac_angles(FracAngle::of_tangent(Rat(3, 4)),
                            FracAngle::of_tangent(Rat(-3, 4)));
  CHECK(r3.first == 1);
  CHECK(r3.second.is_zero());
  auto r4 = add_frac_angles(FracAngle::right_angle(), FracAngle::right_angle());
  CHECK(r4.first == 1);
  CHECK(r4.second.is_zero());

  SECTION("random agreement with the floating-point oracle") {
    std::mt19937 rng(23);
    std::uniform_int_distribution<int> td(-9, 9), qd(1, 9), rd(0, 19);
    auto rand_frac = [&]() -> FracAngle {
      if (rd(rng) == 0) return FracAngle::right_angle();
      return FracAngle::of_tangent(Rat(td(rng), qd(rng)));
    };
    for (int i = 0; i < 1000; ++i) {
      FracAngle a = rand_frac(), b = rand_frac();
      auto [carry, f] = add_frac_angles(a, b);
      CHECK(carry * oracle::kPi + value_of(f) ==
            Catch::Approx(value_of(a) + value_of(b)).margin(1e-9));
    }
  }
}

TEST_CASE("span_between and span arithmetic") {
  // pi/4 up to 3pi/4 spans a right angle.
  AngleSpan s1 = span_between(TwistAngle(0, Slope(-1, 1)),
                              TwistAngle(1, Slope(1, 1)));
  CHECK(s1.half_turns == 0);
  CHECK(s1.frac == FracAngle::right_angle());
  CHECK(s1.floor_half_turns() == 0);
  // 0 up to pi spans one half-turn exactly.
  AngleSpan s2 = span_between(TwistAngle(0, Slope::zero()),
                              TwistAngle(1, Slope::zero()));
  CHECK(s2.half_turns == 1);
  CHECK(s2.frac.is_zero());
  // pi/4 up to 5pi/4 likewise.
  AngleSpan s3 = span_between(TwistAngle(0, Slope(-1, 1)),
                              TwistAngle(1, Slope(-1, 1)));
  CHECK(s3 == (AngleSpan{1, FracAngle::zero()}));
  CHECK_THROWS_AS(span_between(TwistAngle(1, Slope::zero()),
                               TwistAngle(0, Slope::zero())),
                  std::domain_error);

  SECTION("random agreement with the floating-point oracle") {
    std::mt19937 rng(29);
    for (int i = 0; i < 1000; ++i) {
      TwistAngle a = random_angle(rng), b = random_angle(rng);
      if (compare_angles(a, b) > 0) std::swap(a, b);
      AngleSpan sp = span_between(a, b);
      double want = value_of(b) - value_of(a);
      CHECK(value_of(sp) == Catch::Approx(want).margin(1e-9));
      CHECK(sp.floor_half_turns() ==
            static_cast<std::int64_t>(std::floor(want / oracle::kPi + 1e-9)));
    }
  }

  SECTION("span addition and comparison track the oracle") {
    std::mt19937 rng(31);
    auto rand_span = [&]() {
      TwistAngle a = random_angle(rng), b = random_angle(rng);
      if (compare_angles(a, b) > 0) std::swap(a, b);
      return span_between(a, b);
    };
    for (int i = 0; i < 500; ++i) {
      AngleSpan x = rand_span(), y = rand_span();
      CHECK(value_of(x + y) ==
            Catch::Approx(value_of(x) + value_of(y)).margin(1e-9));
      CHECK(compare_spans(x, y) == oracle::compare(value_of(x), value_of(y)));
    }
  }
}

TEST_CASE("bezout_complement") {
  CHECK(bezout_complement(1, 0) == std::pair<std::int64_t, std::int64_t>(1, 0));
  CHECK(bezout_complement(0, 1) == std::pair<std::int64_t, std::int64_t>(0, 1));
  CHECK(bezout_complement(2, 3) ==
        std::pair<std::int64_t, std::int64_t>(-1, 1));
  CHECK(bezout_complement(1, 2) == std::pair<std::int64_t, std::int64_t>(1, 0));
  CHECK_THROWS_AS(bezout_complement(2, 4), std::domain_error);

  std::mt19937 rng(37);
  std::uniform_int_distribution<int> vd(-30, 30);
  for (int i = 0; i < 1000; ++i) {
    int p = vd(rng), q = vd(rng);
    if (std::gcd(p, q) != 1) continue;
    auto [c, d] = bezout_complement(p, q);
    CHECK(c * p + d * q == 1);
    if (q != 0) CHECK(2 * std::abs(c) <= std::abs(q));
  }
}
