#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cscalc/lutz.hpp"
#include "oracle/angle_scan.hpp"

using namespace cscalc;

namespace {

Presentation layer_fixture(TwistAngle lo, TwistAngle hi,
                           std::optional<Slope> meridian = std::nullopt,
                           TorusDividingSet dividing = TorusDividingSet(
                               1, Slope(-1, 1)),
                           bool separating = false) {
  Presentation p;
  PieceId id = p.next_piece++;
  p.pieces.emplace(id, Piece(ThickenedTorusData{lo, hi}));
  p.outer.insert(BoundaryRef{id, kLoPort});
  p.outer.insert(BoundaryRef{id, kHiPort});
  validate_presentation(p);
  p = register_convex_torus(std::move(p), "T", id, TwistAngle(0, Slope(-1, 1)),
                            std::move(dividing), separating, meridian);
  recompute_overtwisted(p);
  return p;
}

void check_oracle(const Presentation& p) {
  CHECK(max_torsion_halves(p) == oracle::torsion_halves(p));
  CHECK(evaluate_overtwisted(p) == oracle::overtwisted(p));
  CHECK(p.counters.overtwisted == oracle::overtwisted(p));
}

const Piece& sole_solid(const Presentation& p) {
  const Piece* found = nullptr;
  for (const auto& [id, piece] : p.pieces)
    if (piece.is_solid()) {
      REQUIRE(found == nullptr);
      found = &piece;
    }
  REQUIRE(found != nullptr);
  return *found;
}

}  // namespace

TEST_CASE("a simple twist materializes the curve and adds a half turn") {
  Presentation p = standard_sphere();
  p = approximate_transverse(p, 1, "K", TwistAngle(0, Slope(-1, 1)));
  Presentation start = p;
  CHECK(invariant_report(p).piece_census.size() == 1);

  p = simple_lutz_knot(p, "K");
  validate_presentation(p);
  check_oracle(p);

  InvariantReport r = invariant_report(p);
  CHECK(r.piece_census.at("Opaque") == 1);
  CHECK(r.piece_census.at("SolidTorus") == 1);
  CHECK(r.interface_count == 1);
  CHECK(sole_solid(p).solid().twist_end == TwistAngle(1, Slope(-1, 1)));
  REQUIRE(p.knots.count("K") == 1);
  CHECK(p.knots.at("K").curve == "core");
  CHECK(p.pieces.at(p.knots.at("K").host).is_solid());
  CHECK(p.counters.simple_lutz_count == 1);
  CHECK(p.counters.torsion_half_units == 1);
  CHECK(p.counters.overtwisted);
  CHECK(max_torsion_halves(p) == 1);
  REQUIRE(p.events.size() == 1);
  CHECK(p.events[0].kind == "lutz_knot");
  CHECK(p.events[0].index == 0);
  CHECK(p.events[0].lutz_half_turns == 1);

  SECTION("a second twist stays in the same solid torus") {
    Presentation p2 = simple_lutz_knot(p, "K");
    validate_presentation(p2);
    check_oracle(p2);
    CHECK(sole_solid(p2).solid().twist_end == TwistAngle(2, Slope(-1, 1)));
    CHECK(invariant_report(p2).piece_census.at("SolidTorus") == 1);
    CHECK(p2.counters.simple_lutz_count == 2);
    CHECK(p2.counters.torsion_half_units == 2);
    CHECK(max_torsion_halves(p2) == 2);

    // the full twist is exactly two simple twists
    Presentation full = full_lutz_knot(start, "K");
    CHECK(same_state(full, p2));
    CHECK(canonical_equal(full, p2));
    CHECK(full.events.size() == 2);

    SECTION("twists reverse last-in-first-out") {
      CHECK_THROWS_AS(reverse_event(p2, 0), EventNotReversibleHere);
      Presentation u1 = reverse_event(p2, 1);
      CHECK(same_state(u1, p));
      Presentation u0 = reverse_event(u1, 0);
      CHECK(same_state(u0, start));
      CHECK(u0.counters.simple_lutz_count == 0);
      CHECK(u0.counters.torsion_half_units == 0);
      CHECK_FALSE(u0.counters.overtwisted);
      check_oracle(u0);
    }
  }

  SECTION("unknown curve names are rejected") {
    CHECK_THROWS_AS(simple_lutz_knot(p, "nope"), KnotNotFound);
  }
}

TEST_CASE("twisting a pre-Lagrangian torus inserts a half-turn layer") {
  Presentation p = layer_fixture(TwistAngle(0, Slope::zero()),
                                 TwistAngle(1, Slope::zero()));
  Presentation start = p;
  CHECK(torsion_lower_bound(p) == 1);  // the bare half-turn window
  CHECK_FALSE(p.counters.overtwisted);

  p = lutz_torus(p, "T", 1);
  validate_presentation(p);
  check_oracle(p);

  InvariantReport r = invariant_report(p);
  CHECK(r.piece_census.at("ThickenedTorus") == 3);
  CHECK(r.interface_count == 2);
  CHECK(p.counters.torsion_half_units == 1);
  CHECK_FALSE(p.counters.overtwisted);  // no cap anywhere
  CHECK(torsion_lower_bound(p) == 2);   // window grew by a half turn
  REQUIRE(p.tori.count("T") == 1);
  // the torus rides the inserted layer, same angle, same slope
  const ConvexTorusRef& t = p.tori.at("T");
  CHECK(t.angle == TwistAngle(0, Slope(-1, 1)));
  CHECK(p.pieces.at(t.host).is_layer());
  CHECK(p.pieces.at(t.host).layer().twist_lo == t.angle);
  CHECK(p.pieces.at(t.host).layer().twist_hi == TwistAngle(1, Slope(-1, 1)));
  REQUIRE(p.events.size() == 1);
  CHECK(p.events[0].kind == "lutz_torus");
  CHECK(p.events[0].lutz_half_turns == 1);
  CHECK(p.events[0].index == 0);

  SECTION("the insertion reverses cleanly") {
    Presentation back = reverse_event(p, 0);
    CHECK(same_state(back, start));
    check_oracle(back);
  }

  SECTION("a second twist on the riding torus stacks") {
    Presentation p2 = lutz_torus(p, "T", 1);
    validate_presentation(p2);
    check_oracle(p2);
    CHECK(torsion_lower_bound(p2) == 3);
    CHECK(p2.counters.torsion_half_units == 2);
  }
}

TEST_CASE("a double twist in one call matches the scanner") {
  Presentation p = layer_fixture(TwistAngle(0, Slope::zero()),
                                 TwistAngle(1, Slope::zero()));
  p = lutz_torus(p, "T", 2);
  validate_presentation(p);
  check_oracle(p);
  CHECK(torsion_lower_bound(p) == 3);
  CHECK(p.counters.torsion_half_units == 2);
  REQUIRE(p.events.size() == 1);
  CHECK(p.events[0].lutz_half_turns == 2);
}

TEST_CASE("torus twisting rejects bad inputs") {
  Presentation p = standard_sphere();
  p = register_convex_torus(p, "T", 1, TwistAngle(0, Slope(-1, 1)),
                            TorusDividingSet(1, Slope(-1, 1)), false);
  CHECK_THROWS_AS(lutz_torus(p, "T", 1), NotPreLagrangian);
  CHECK_THROWS_AS(lutz_torus(p, "nope", 1), std::invalid_argument);
  Presentation q = layer_fixture(TwistAngle(0, Slope::zero()),
                                 TwistAngle(1, Slope::zero()));
  CHECK_THROWS_AS(lutz_torus(q, "T", 0), std::invalid_argument);
}

TEST_CASE("torus twisting inside a solid host shrinks the core side") {
  Presentation p = standard_sphere();
  p = approximate_transverse(p, 1, "K", TwistAngle(0, Slope(-1, 1)));
  p = simple_lutz_knot(p, "K");  // solid with end (1; -1/1)
  PieceId solid_id = p.knots.at("K").host;
  p = register_convex_torus(p, "T2", solid_id, TwistAngle(0, Slope(-1, 1)),
                            TorusDividingSet(1, Slope(-1, 1)), false);

  Presentation p2 = lutz_torus(p, "T2", 1);
  validate_presentation(p2);
  check_oracle(p2);
  // solid core [0, pi/4], inserted layer [pi/4, 5pi/4], outer run to the
  // opaque piece: capped chain of nine quarter turns
  CHECK(sole_solid(p2).solid().twist_end == TwistAngle(0, Slope(-1, 1)));
  CHECK(invariant_report(p2).piece_census.at("ThickenedTorus") == 2);
  CHECK(max_torsion_halves(p2) == 2);
  CHECK(p2.counters.torsion_half_units == 2);
  CHECK(p2.counters.overtwisted);

  // a tracked torus below the curve's protected neighbourhood blocks the move
  Presentation q = register_convex_torus(p, "low", solid_id,
                                         TwistAngle(0, Slope(-1, 2)),
                                         TorusDividingSet(1, Slope(-1, 2)),
                                         false);
  CHECK_THROWS_AS(lutz_torus(q, "low", 1), std::invalid_argument);
}

TEST_CASE("relative Euler adjustment walks to the target two at a time") {
  SECTION("one unbalanced leaf needs one event") {
    TorusDividingSet ds(1, Slope(-1, 1));
    ds.strips[0].push_back(leaf_for_strip(0));
    REQUIRE(std::abs(relative_euler(ds)) == 2);
    Presentation p = layer_fixture(TwistAngle(0, Slope::zero()),
                                   TwistAngle(1, Slope::zero()),
                                   std::nullopt, ds);
    Presentation q = adjust_relative_euler(p, "T", 0);
    validate_presentation(q);
    check_oracle(q);
    CHECK(relative_euler(q.tori.at("T").dividing) == 0);
    CHECK(q.events.size() == 1);
    CHECK(q.events[0].kind == "lutz_knot");
    CHECK(q.counters.simple_lutz_count == 1);
    CHECK(q.counters.torsion_half_units == 1);
    // the balancing bypass layer leaves contractible dividing curves
    CHECK(giroux_overtwisted(q.tori.at("T").dividing));
    CHECK(q.counters.overtwisted);
    // essential data untouched
    CHECK(q.tori.at("T").dividing.essential_pairs == 1);
    CHECK(q.tori.at("T").dividing.essential_slope == Slope(-1, 1));
  }
  SECTION("two leaves need two events") {
    TorusDividingSet ds(1, Slope(-1, 1));
    ds.strips[0].push_back(leaf_for_strip(0));
    ds.strips[0].push_back(leaf_for_strip(0));
    REQUIRE(std::abs(relative_euler(ds)) == 4);
    Presentation p = layer_fixture(TwistAngle(0, Slope::zero()),
                                   TwistAngle(1, Slope::zero()),
                                   std::nullopt, ds);
    Presentation q = adjust_relative_euler(p, "T", 0);
    CHECK(relative_euler(q.tori.at("T").dividing) == 0);
    CHECK(q.events.size() == 2);
    check_oracle(q);
  }
  SECTION("already at the target: no events") {
    Presentation p = layer_fixture(TwistAngle(0, Slope::zero()),
                                   TwistAngle(1, Slope::zero()));
    Presentation q = adjust_relative_euler(p, "T", 0);
    CHECK(q.events.empty());
    CHECK(same_state(q, p));
  }
  SECTION("parity obstruction") {
    Presentation p = layer_fixture(TwistAngle(0, Slope::zero()),
                                   TwistAngle(1, Slope::zero()));
    CHECK_THROWS_AS(adjust_relative_euler(p, "T", 1), TargetParityMismatch);
  }
  SECTION("separating tori cannot absorb the twist curves") {
    Presentation p = layer_fixture(TwistAngle(0, Slope::zero()),
                                   TwistAngle(1, Slope::zero()),
                                   std::nullopt, TorusDividingSet(1, Slope(-1, 1)),
                                   /*separating=*/true);
    CHECK_THROWS_AS(adjust_relative_euler(p, "T", 0), std::invalid_argument);
  }
}

TEST_CASE("a torus twist decomposes into four round surgeries") {
  Presentation p = layer_fixture(TwistAngle(0, Slope::zero()),
                                 TwistAngle(1, Slope::zero()));
  Presentation direct = lutz_torus(p, "T", 1);

  MacroResult mac = lutz_as_round_surgeries(p, "T");
  validate_presentation(mac.presentation);
  check_oracle(mac.presentation);

  REQUIRE(mac.event_indices.size() == 4);
  CHECK(mac.event_indices == std::vector<std::size_t>{0, 1, 2, 3});
  CHECK(mac.presentation.events[0].kind == "round2");
  CHECK(mac.presentation.events[1].kind == "round1");
  CHECK(mac.presentation.events[2].kind == "round2");
  CHECK(mac.presentation.events[3].kind == "round1");

  // all four cap cores were re-bridged: no solid pieces survive
  InvariantReport r = invariant_report(mac.presentation);
  CHECK(r.piece_census.count("SolidTorus") == 0);
  CHECK(r.piece_census.at("ThickenedTorus") == 9);
  CHECK(r.interface_count == 8);
  CHECK(mac.presentation.tori.empty());
  CHECK(mac.presentation.knots.empty());

  // the composite is the twist: same canonical form, same ledger counters
  CHECK(canonical_equal(mac.presentation, direct));
  CHECK(mac.presentation.counters.torsion_half_units ==
        direct.counters.torsion_half_units);
  CHECK(mac.presentation.counters.simple_lutz_count ==
        direct.counters.simple_lutz_count);
  CHECK(mac.presentation.counters.overtwisted ==
        direct.counters.overtwisted);
  CHECK(torsion_lower_bound(mac.presentation) == torsion_lower_bound(direct));

  SECTION("the four events reverse last-in-first-out to the start") {
    Presentation u = mac.presentation;
    u = reverse_event(u, 3);
    u = reverse_event(u, 2);
    u = reverse_event(u, 1);
    u = reverse_event(u, 0);
    CHECK(same_state(u, p));
    check_oracle(u);
  }
}

TEST_CASE("the decomposition covers a grid of host windows") {
  std::vector<TwistAngle> los = {
      TwistAngle(0, Slope::zero()), TwistAngle(0, Slope(-1, 3)),
      TwistAngle(0, Slope(-1, 2)), TwistAngle(0, Slope(-2, 3))};
  std::vector<TwistAngle> his = {
      TwistAngle(0, Slope(-2, 1)), TwistAngle(0, Slope(-3, 1)),
      TwistAngle(0, Slope(-3, 2)), TwistAngle(1, Slope::zero()),
      TwistAngle(1, Slope(1, 2)),  TwistAngle(1, Slope(1, 1))};
  for (const TwistAngle& lo : los)
    for (const TwistAngle& hi : his) {
      INFO("window [" << lo.str() << ", " << hi.str() << "]");
      Presentation p = layer_fixture(lo, hi);
      Presentation direct = lutz_torus(p, "T", 1);
      MacroResult mac = lutz_as_round_surgeries(p, "T");
      CHECK(canonical_equal(mac.presentation, direct));
      CHECK(torsion_lower_bound(mac.presentation) ==
            torsion_lower_bound(direct));
      check_oracle(mac.presentation);
      check_oracle(direct);
    }
  // a few windows with less round boundary slopes
  std::vector<std::pair<TwistAngle, TwistAngle>> odd = {
      {TwistAngle(0, Slope(-3, 7)), TwistAngle(1, Slope(3, 4))},
      {TwistAngle(0, Slope(-2, 5)), TwistAngle(0, Slope(-7, 2))},
      {TwistAngle(0, Slope(-1, 4)), TwistAngle(1, Slope(5, 3))}};
  for (const auto& [lo, hi] : odd) {
    INFO("window [" << lo.str() << ", " << hi.str() << "]");
    Presentation p = layer_fixture(lo, hi);
    Presentation direct = lutz_torus(p, "T", 1);
    MacroResult mac = lutz_as_round_surgeries(p, "T");
    CHECK(canonical_equal(mac.presentation, direct));
    check_oracle(mac.presentation);
  }
}

TEST_CASE("the decomposition needs the standard position") {
  // torus at the window's lower edge: not strictly inside
  Presentation p;
  PieceId id = p.next_piece++;
  p.pieces.emplace(id, Piece(ThickenedTorusData{TwistAngle(0, Slope(-1, 1)),
                                                TwistAngle(1, Slope::zero())}));
  p.outer.insert(BoundaryRef{id, kLoPort});
  p.outer.insert(BoundaryRef{id, kHiPort});
  p = register_convex_torus(p, "T", id, TwistAngle(0, Slope(-1, 1)),
                            TorusDividingSet(1, Slope(-1, 1)), false);
  CHECK_THROWS_AS(lutz_as_round_surgeries(p, "T"), std::invalid_argument);
}

TEST_CASE("torsion grows monotonically under a random twist script") {
  Presentation p = standard_sphere();
  p = approximate_transverse(p, 1, "K", TwistAngle(0, Slope(-1, 1)));
  p = simple_lutz_knot(p, "K");
  p = register_convex_torus(p, "T", p.knots.at("K").host,
                            TwistAngle(0, Slope(-1, 1)),
                            TorusDividingSet(1, Slope(-1, 1)), false);

  std::mt19937 rng(0xC5CA1C);
  std::int64_t last_scan = max_torsion_halves(p);
  std::int64_t last_counter = p.counters.torsion_half_units;
  bool was_overtwisted = p.counters.overtwisted;
  for (int step = 0; step < 12; ++step) {
    switch (rng() % 3) {
      case 0: p = simple_lutz_knot(p, "K"); break;
      case 1: p = lutz_torus(p, "T", 1); break;
      default: p = full_lutz_knot(p, "K"); break;
    }
    validate_presentation(p);
    check_oracle(p);
    std::int64_t scan = max_torsion_halves(p);
    std::int64_t counter = p.counters.torsion_half_units;
    CHECK(scan >= last_scan);
    CHECK(counter > last_counter);
    if (was_overtwisted) CHECK(p.counters.overtwisted);
    last_scan = scan;
    last_counter = counter;
    was_overtwisted = p.counters.overtwisted;
  }
  CHECK(last_counter >= 12);
  CHECK(last_scan >= 12);
}
