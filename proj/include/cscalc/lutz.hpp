#pragma once

// Lutz-type modifications and the torsion bookkeeping built on them.
//
//  * simple_lutz_knot: a half twist on the model neighbourhood of a tracked
//    transverse curve - the solid torus keeps its boundary slope but sweeps
//    one extra half turn.  Curves still inside an opaque piece first get
//    their neighbourhood materialized as a solid-torus piece.
//  * full_lutz_knot: two half twists.
//  * lutz_torus: inserts whole half-turn layers along a tracked torus carried
//    by a rotational piece (its pre-Lagrangian position).
//  * adjust_relative_euler: twists auxiliary curves parallel to a tracked
//    non-separating torus, nudging the relative Euler number of its dividing
//    set by +-2 per half twist until a target is met.
//  * lutz_as_round_surgeries: realizes one lutz_torus unit as four round
//    surgeries and checks the outcome against the direct insertion.
//
// Counters: simple_lutz_count and torsion_half_units accumulate per event
// and are never re-derived from geometry; the overtwisted flag is live,
// recomputed from the chain census after every event.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cscalc/surgery.hpp"

namespace cscalc {

// ---------------------------------------------------------------------------
// Knot twists.
// ---------------------------------------------------------------------------
inline Presentation simple_lutz_knot(Presentation p, const std::string& name) {
  auto it = p.knots.find(name);
  if (it == p.knots.end()) throw KnotNotFound(name);
  TransverseKnotRef k = it->second;

  EventBuilder eb(p, "lutz_knot", 0, "knot " + name);
  eb.ev().lutz_half_turns = 1;

  PieceId solidId = k.host;
  if (p.pieces.at(k.host).is_opaque()) {
    // Materialize the neighbourhood as its own solid-torus piece first.
    for (const auto& [nm, ok] : p.knots)
      if (nm != name && ok.host == k.host && ok.curve == k.curve)
        throw std::invalid_argument("tracked knot '" + nm +
                                    "' rides the twisted curve");
    Slope sf = change_basis(slope_of_angle(k.nbhd_angle), k.framing);
    OpaqueData od = p.pieces.at(k.host).opaque();
    od.boundaries.push_back(OpaqueBoundary{TorusDividingSet(1, sf), true});
    od.origin += " - nbhd(" + name + ")";
    int port = static_cast<int>(od.boundaries.size()) - 1;
    eb.replace_piece(k.host, Piece(std::move(od)));
    solidId = eb.add_piece(Piece(SolidTorusData{k.nbhd_angle, k.framing}));
    eb.add_interface(Interface{BoundaryRef{k.host, port},
                               BoundaryRef{solidId, 0}, k.framing, 1, sf,
                               k.framing.det() == 1});
    TransverseKnotRef moved = k;
    moved.host = solidId;
    moved.curve = "core";
    eb.set_knot(name, moved);
  }

  // The half twist: same boundary slope, one additional half turn of radial
  // rotation inside the neighbourhood.
  SolidTorusData sd = p.pieces.at(solidId).solid();
  sd.twist_end = add_half_turn(sd.twist_end, 1);
  eb.replace_piece(solidId, Piece(sd));

  p.counters.simple_lutz_count += 1;
  p.counters.torsion_half_units += 1;
  eb.finish();
  validate_presentation(p);
  return p;
}

inline Presentation full_lutz_knot(Presentation p, const std::string& name) {
  return simple_lutz_knot(simple_lutz_knot(std::move(p), name), name);
}

// ---------------------------------------------------------------------------
// Torsion insertion along a tracked torus.
// ---------------------------------------------------------------------------
inline Presentation lutz_torus(Presentation p, const std::string& name,
                               std::int64_t amount) {
  if (amount < 1)
    throw std::invalid_argument("torsion insertion needs a positive amount");
  auto it = p.tori.find(name);
  if (it == p.tori.end())
    throw std::invalid_argument("no tracked torus named '" + name + "'");
  ConvexTorusRef t = it->second;
  const Piece& host = p.pieces.at(t.host);
  if (host.is_opaque())
    throw NotPreLagrangian(
        "torus '" + name +
        "' is not carried by a rotational piece, so no pre-Lagrangian "
        "position is available");

  EventBuilder eb(p, "lutz_torus", 0, "torus " + name);
  eb.ev().lutz_half_turns = amount;

  TwistAngle a = t.angle;
  TwistAngle top = add_half_turn(a, amount);
  Slope f = slope_of_angle(a);
  std::int64_t pairs = t.dividing.essential_pairs;
  const bool host_is_layer = host.is_layer();
  PieceId hiId, layerId;

  if (host_is_layer) {
    ThickenedTorusData w = host.layer();
    hiId = eb.add_piece(Piece(ThickenedTorusData{a, w.twist_hi}));
    detail::rewire_port(eb, p, BoundaryRef{t.host, kHiPort},
                        BoundaryRef{hiId, kHiPort});
    eb.replace_piece(t.host, Piece(ThickenedTorusData{w.twist_lo, a}));
  } else {
    SolidTorusData sd = host.solid();
    hiId = eb.add_piece(Piece(ThickenedTorusData{a, sd.twist_end}));
    detail::rewire_port(eb, p, BoundaryRef{t.host, 0},
                        BoundaryRef{hiId, kHiPort});
    for (const auto& [nm, ok] : p.knots)
      if (ok.host == t.host && compare_angles(a, ok.nbhd_angle) < 0)
        throw std::invalid_argument(
            "tracked knot '" + nm +
            "' has a neighbourhood crossing the insertion torus");
    sd.twist_end = a;
    eb.replace_piece(t.host, Piece(sd));
  }
  layerId = eb.add_piece(Piece(ThickenedTorusData{a, top}));
  int host_top_port = host_is_layer ? kHiPort : 0;
  eb.add_interface(Interface{BoundaryRef{t.host, host_top_port},
                             BoundaryRef{layerId, kLoPort}, BasisChange(),
                             pairs, f, true});
  eb.add_interface(Interface{BoundaryRef{layerId, kHiPort},
                             BoundaryRef{hiId, kLoPort}, BasisChange(), pairs,
                             f, true});

  // Rehome refs split apart by the insertion.
  std::vector<std::pair<std::string, ConvexTorusRef>> moved;
  for (const auto& [nm, ot] : p.tori)
    if (nm != name && ot.host == t.host && compare_angles(a, ot.angle) < 0)
      moved.emplace_back(nm, ot);
  for (auto& [nm, ot] : moved) {
    ot.host = hiId;
    eb.set_torus(nm, ot);
  }
  ConvexTorusRef self = t;
  self.host = layerId;
  eb.set_torus(name, self);

  p.counters.torsion_half_units += amount;
  eb.finish();
  validate_presentation(p);
  return p;
}

// Largest number of whole half-turn layers any single radial chain of the
// presentation can embed: a lower bound for the manifold's torsion.
inline std::int64_t torsion_lower_bound(const Presentation& p) {
  return max_torsion_halves(p);
}

// ---------------------------------------------------------------------------
// Relative Euler number adjustment.
// ---------------------------------------------------------------------------
inline Presentation adjust_relative_euler(Presentation p,
                                          const std::string& name,
                                          std::int64_t target = 0) {
  auto it = p.tori.find(name);
  if (it == p.tori.end())
    throw std::invalid_argument("no tracked torus named '" + name + "'");
  if (it->second.separating)
    throw std::invalid_argument(
        "adjustment twists curves crossing the torus, which needs '" + name +
        "' to be non-separating");
  std::int64_t rel = relative_euler(it->second.dividing);
  if (((target - rel) % 2 + 2) % 2 != 0)
    throw TargetParityMismatch(
        "half twists move the relative Euler number by 2; cannot reach " +
        std::to_string(target) + " from " + std::to_string(rel));

  // Which strip absorbs a disc that lowers the number by 2.
  std::int64_t down_strip = [&] {
    TorusDividingSet probe = it->second.dividing;
    probe.strips[0].push_back(leaf_for_strip(0));
    return relative_euler(probe) < rel ? 0 : 1;
  }();

  while (rel != target) {
    EventBuilder eb(p, "lutz_knot", 0, "adjust torus " + name);
    eb.ev().lutz_half_turns = 1;
    ConvexTorusRef cur = p.tori.at(name);
    std::size_t strip = static_cast<std::size_t>(
        rel > target ? down_strip : 1 - down_strip);
    cur.dividing.strips[strip].push_back(leaf_for_strip(strip));
    eb.set_torus(name, cur);
    p.counters.simple_lutz_count += 1;
    p.counters.torsion_half_units += 1;
    eb.finish();
    rel = relative_euler(p.tori.at(name).dividing);
  }
  validate_presentation(p);
  return p;
}

// ---------------------------------------------------------------------------
// One torsion unit as four round surgeries.
// ---------------------------------------------------------------------------
struct MacroResult {
  Presentation presentation;
  std::vector<std::size_t> event_indices;  // the four recorded events
};

namespace detail {

// Register a ref directly into the most recent event's delta, so replaying
// or unwinding that event also creates or removes the ref.
inline void note_knot(Presentation& p, const std::string& name,
                      const TransverseKnotRef& k) {
  if (p.knots.count(name) || p.events.empty())
    throw std::invalid_argument("cannot note knot '" + name + "'");
  p.knots[name] = k;
  p.events.back().knots.push_back(
      Delta<std::string, TransverseKnotRef>{name, std::nullopt, k});
}

inline void note_torus(Presentation& p, const std::string& name,
                       const ConvexTorusRef& t) {
  if (p.tori.count(name) || p.events.empty())
    throw std::invalid_argument("cannot note torus '" + name + "'");
  p.tori[name] = t;
  p.events.back().tori.push_back(
      Delta<std::string, ConvexTorusRef>{name, std::nullopt, t});
}

// The two cap pieces created by an index-2 surgery along a slope -1 torus
// with meridian (1,0): ends 3pi/4 (orientation-true side) and pi/4.
inline std::pair<PieceId, PieceId> find_standard_caps(
    const SurgeryEvent& ev) {
  const TwistAngle big(1, Slope(1, 1));
  const TwistAngle small(0, Slope(-1, 1));
  PieceId n1 = -1, n2 = -1;
  for (const auto& d : ev.pieces) {
    if (d.before.has_value() || !d.after.has_value()) continue;
    if (!d.after->is_solid()) continue;
    if (d.after->solid().twist_end == big) n1 = d.key;
    if (d.after->solid().twist_end == small) n2 = d.key;
  }
  if (n1 < 0 || n2 < 0)
    throw MacroPostconditionFailed(
        "the split models are not the expected quarter and three-quarter "
        "caps");
  return {n1, n2};
}

inline PieceId sole_created_piece(const SurgeryEvent& ev) {
  PieceId found = -1;
  for (const auto& d : ev.pieces) {
    if (d.before.has_value() || !d.after.has_value()) continue;
    if (found >= 0)
      throw MacroPostconditionFailed(
          "the bridge surgery created more than one piece");
    found = d.key;
  }
  if (found < 0)
    throw MacroPostconditionFailed("the bridge surgery created no piece");
  return found;
}

inline AngleSpan quarter_turn_span() {
  return span_between(TwistAngle(0, Slope::zero()),
                      TwistAngle(0, Slope::infinity()));
}

inline AngleSpan half_turn_span() {
  return span_between(TwistAngle(0, Slope::zero()),
                      TwistAngle(1, Slope::zero()));
}

}  // namespace detail

inline MacroResult lutz_as_round_surgeries(Presentation p,
                                           const std::string& name) {
  auto it = p.tori.find(name);
  if (it == p.tori.end())
    throw std::invalid_argument("no tracked torus named '" + name + "'");
  ConvexTorusRef t = it->second;
  const TwistAngle std_pos(0, Slope(-1, 1));
  if (!(t.angle == std_pos))
    throw std::invalid_argument(
        "the surgery realization needs the torus at the standard slope -1 "
        "position");
  auto hit = p.pieces.find(t.host);
  if (hit == p.pieces.end() || !hit->second.is_layer())
    throw std::invalid_argument(
        "the surgery realization needs a layer host");
  {
    const ThickenedTorusData& w = hit->second.layer();
    if (!(compare_angles(w.twist_lo, std_pos) < 0 &&
          compare_angles(std_pos, w.twist_hi) < 0))
      throw std::invalid_argument(
          "the surgery realization needs the torus strictly inside its host "
          "window");
  }
  const std::string g1n = "macro-" + name + "-g1";
  const std::string g2n = "macro-" + name + "-g2";
  const std::string h1n = "macro-" + name + "-h1";
  const std::string h2n = "macro-" + name + "-h2";
  const std::string ttn = "macro-" + name + "-tt";

  Presentation original = p;
  std::vector<std::size_t> idx;

  // (1) Cut along the torus with meridian (1,0) and cap both sides.
  p = round_surgery_2(std::move(p), name, Slope(1, 0));
  idx.push_back(p.events.size() - 1);
  auto [n1, n2] = detail::find_standard_caps(p.events.back());

  // (2) Bridge the two cap cores; the orientation-true cap keeps a quarter
  // turn of leftover width, the mirrored cap is consumed exactly.
  detail::note_knot(p, g1n,
                    TransverseKnotRef{n1, "core", std_pos, BasisChange()});
  detail::note_knot(p, g2n,
                    TransverseKnotRef{n2, "core", std_pos, BasisChange()});
  p = round_surgery_1(std::move(p), g1n, g2n, BasisChange(), 1);
  idx.push_back(p.events.size() - 1);
  PieceId collar = detail::sole_created_piece(p.events.back());
  if (!(piece_width(p.pieces.at(n1)) == detail::quarter_turn_span()))
    throw MacroPostconditionFailed(
        "the first leftover does not span a quarter turn");

  // (3) Cut along the zero-width collar the bridge left behind.
  TwistAngle wlo = p.pieces.at(collar).layer().twist_lo;
  ConvexTorusRef tt;
  tt.host = collar;
  tt.angle = wlo;
  tt.dividing = TorusDividingSet(1, slope_of_angle(wlo));
  tt.separating = false;
  tt.surgery_meridian = Slope(1, 0);
  detail::note_torus(p, ttn, tt);
  p = round_surgery_2(std::move(p), ttn);
  idx.push_back(p.events.size() - 1);
  auto [m1, m2] = detail::find_standard_caps(p.events.back());

  // (4) Bridge the two new cap cores; fold the macro's net effect into the
  // closing event's counter stamp.
  detail::note_knot(p, h1n,
                    TransverseKnotRef{m1, "core", std_pos, BasisChange()});
  detail::note_knot(p, h2n,
                    TransverseKnotRef{m2, "core", std_pos, BasisChange()});
  p = round_surgery_1(std::move(p), h1n, h2n, BasisChange(), 1);
  idx.push_back(p.events.size() - 1);
  p.counters.torsion_half_units += 1;
  recompute_overtwisted(p);
  p.events.back().counters_after = p.counters;

  // Postconditions: the two leftovers jointly sweep one half turn, and the
  // composite state is the direct torsion insertion.
  AngleSpan swept =
      piece_width(p.pieces.at(n1)) + piece_width(p.pieces.at(m1));
  if (!(swept == detail::half_turn_span()))
    throw MacroPostconditionFailed(
        "the two leftovers do not jointly sweep a half turn");
  Presentation direct = lutz_torus(original, name, 1);
  if (!canonical_equal(p, direct))
    throw MacroPostconditionFailed(
        "the four surgeries did not reproduce a direct torsion insertion");

  validate_presentation(p);
  return MacroResult{std::move(p), std::move(idx)};
}

}  // namespace cscalc
