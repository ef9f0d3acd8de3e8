#pragma once

// Round surgeries on a presentation.
//
// Index 1 removes the tubular neighbourhoods of two disjoint tracked
// transverse curves and joins the exposed torus boundaries with an
// S^1 x D^1 x S^1 bridge, matched through a caller-supplied relative framing.
//
// Index 2 cuts along a tracked convex torus (after normalizing its dividing
// set, which requires relative Euler number zero) and caps the two exposed
// boundaries with model solid tori.  The caps are solved exactly: writing
// the dividing slope f = x*m + y*l over the surgery meridian m and its
// canonical Bezout longitude l (det[m l] = -1), the two models print
// boundary slope y/x and -y/x in cap coordinates, glued back by
//   B1 = [l m]          (orientation-preserving side)
//   B2 = [l -m]         (mirrored side)
// so that both carry their model slope to f on the host.
//
// Every operation records an exact state delta; reverse_event undoes one
// recorded event (refusing when later events touched the same state) and
// logs the reversal with the complementary surgery index.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "cscalc/presentation.hpp"

namespace cscalc {

namespace detail {

// Move whatever is attached at `from` (an interface side or an outer mark)
// over to `to`.  Used when a piece is rebuilt and a port changes its number.
inline void rewire_port(EventBuilder& eb, Presentation& p,
                        const BoundaryRef& from, const BoundaryRef& to) {
  for (const auto& [iid, iface] : p.interfaces) {
    if (iface.a == from) {
      Interface next = iface;
      next.a = to;
      eb.replace_interface(iid, next);
      return;
    }
    if (iface.b == from) {
      Interface next = iface;
      next.b = to;
      eb.replace_interface(iid, next);
      return;
    }
  }
  if (p.outer.count(from)) {
    eb.set_outer(from, false);
    eb.set_outer(to, true);
    return;
  }
  throw std::logic_error("rewire_port: nothing attached at " + from.str());
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Round surgery of index 1.
// ---------------------------------------------------------------------------
inline Presentation round_surgery_1(Presentation p, const std::string& k1_name,
                                    const std::string& k2_name,
                                    const BasisChange& relative_framing =
                                        BasisChange(),
                                    std::int64_t pairs = 1) {
  auto i1 = p.knots.find(k1_name);
  if (i1 == p.knots.end()) throw KnotNotFound(k1_name);
  auto i2 = p.knots.find(k2_name);
  if (i2 == p.knots.end()) throw KnotNotFound(k2_name);
  if (k1_name == k2_name)
    throw KnotsNotDisjoint("a curve cannot be bridged to itself");
  if (pairs < 1)
    throw std::invalid_argument("bridge needs at least one dividing pair");

  TransverseKnotRef k1 = i1->second;
  TransverseKnotRef k2 = i2->second;
  if (k1.host == k2.host) {
    if (p.pieces.at(k1.host).is_solid())
      throw KnotsNotDisjoint("both curves are the core of one solid torus");
    if (k1.curve == k2.curve)
      throw KnotsNotDisjoint("both labels name the curve '" + k1.curve + "'");
  }

  Slope s1f = change_basis(slope_of_angle(k1.nbhd_angle), k1.framing);
  Slope s2f = change_basis(slope_of_angle(k2.nbhd_angle), k2.framing);
  if (change_basis(s1f, relative_framing) != s2f)
    throw FramingMismatch(
        "relative framing sends the first neighbourhood slope " + s1f.str() +
        " to " + change_basis(s1f, relative_framing).str() +
        ", but the second neighbourhood has slope " + s2f.str());

  EventBuilder eb(p, "round1", 1, "knots " + k1_name + " & " + k2_name);
  eb.ev().sphere_model = "S1 x D1 x S1";

  // Remove a curve's neighbourhood, returning the exposed boundary.
  auto carve = [&](const TransverseKnotRef& k, const std::string& name,
                   const std::string& other) -> BoundaryRef {
    const Piece& host = p.pieces.at(k.host);
    if (host.is_solid()) {
      for (const auto& [nm, t] : p.tori)
        if (t.host == k.host && compare_angles(t.angle, k.nbhd_angle) < 0)
          throw std::invalid_argument(
              "tracked torus '" + nm + "' sits inside the removed "
              "neighbourhood of " + name);
      for (const auto& [nm, ok] : p.knots)
        if (nm != name && nm != other && ok.host == k.host)
          throw std::invalid_argument(
              "tracked knot '" + nm + "' lives in the carved solid torus");
      SolidTorusData sd = host.solid();
      detail::rewire_port(eb, p, BoundaryRef{k.host, 0},
                          BoundaryRef{k.host, kHiPort});
      eb.replace_piece(
          k.host, Piece(ThickenedTorusData{k.nbhd_angle, sd.twist_end}));
      return BoundaryRef{k.host, kLoPort};
    }
    // opaque host: expose a new boundary in the curve's framed coordinates
    for (const auto& [nm, ok] : p.knots)
      if (nm != name && nm != other && ok.host == k.host &&
          ok.curve == k.curve)
        throw std::invalid_argument("tracked knot '" + nm +
                                    "' rides the carved curve");
    Slope sf = change_basis(slope_of_angle(k.nbhd_angle), k.framing);
    OpaqueData od = host.opaque();
    od.boundaries.push_back(OpaqueBoundary{TorusDividingSet(pairs, sf), true});
    od.origin += " - nbhd(" + name + ")";
    int port = static_cast<int>(od.boundaries.size()) - 1;
    eb.replace_piece(k.host, Piece(std::move(od)));
    return BoundaryRef{k.host, port};
  };

  BoundaryRef ex1 = carve(k1, k1_name, k2_name);
  BoundaryRef ex2 = carve(k2, k2_name, k1_name);

  // The bridge lives in the first curve's framed coordinates: a vertically
  // invariant collar printed with the first neighbourhood slope.
  TwistAngle w = twist_end_for_slope(s1f);
  PieceId bridge = eb.add_piece(Piece(ThickenedTorusData{w, w}));

  BasisChange g1 = p.pieces.at(ex1.piece).is_opaque()
                       ? BasisChange()
                       : k1.framing.inverse();
  BasisChange g2 = p.pieces.at(ex2.piece).is_opaque()
                       ? relative_framing
                       : BasisChange::compose(k2.framing.inverse(),
                                              relative_framing);
  Slope sa1 = boundary_slope(p.pieces.at(ex1.piece), ex1.port);
  Slope sa2 = boundary_slope(p.pieces.at(ex2.piece), ex2.port);
  eb.add_interface(Interface{ex1, BoundaryRef{bridge, kLoPort}, g1, pairs,
                             sa1, g1.det() == 1});
  eb.add_interface(Interface{ex2, BoundaryRef{bridge, kHiPort}, g2, pairs,
                             sa2, g2.det() == 1});

  eb.set_knot(k1_name, std::nullopt);
  eb.set_knot(k2_name, std::nullopt);
  eb.finish();
  validate_presentation(p);
  return p;
}

// ---------------------------------------------------------------------------
// Round surgery of index 2.
// ---------------------------------------------------------------------------
inline Presentation round_surgery_2(Presentation p, const std::string& name,
                                    std::optional<Slope> meridian =
                                        std::nullopt) {
  auto it = p.tori.find(name);
  if (it == p.tori.end())
    throw std::invalid_argument("no tracked torus named '" + name + "'");
  ConvexTorusRef t = it->second;

  std::optional<Slope> m_eff = meridian ? meridian : t.surgery_meridian;
  if (!m_eff)
    throw NoMeridian("torus '" + name + "' carries no surgery meridian");
  Slope m = *m_eff;

  const Piece& host_piece = p.pieces.at(t.host);
  if (host_piece.is_solid())
    throw std::invalid_argument(
        "round surgery 2 needs a layer or opaque host");

  // Clean the dividing set first; unbalanced sets cannot bound the caps.
  NormalizeResult norm = normalize(t.dividing);
  Slope f = t.dividing.essential_slope;
  std::int64_t pairs = t.dividing.essential_pairs;

  // Solve f = x*m + y*l over the meridian and its Bezout longitude.
  auto [bc, bd] = bezout_complement(m.p, m.q);
  std::int64_t lp = bd, lq = -bc;  // det[m l] = -1
  std::int64_t x =
      detail::mul_checked(lp, f.q, "cap solve") -
      detail::mul_checked(f.p, lq, "cap solve");
  std::int64_t y =
      detail::mul_checked(f.p, m.q, "cap solve") -
      detail::mul_checked(m.p, f.q, "cap solve");
  Slope s1(y, x);
  Slope s2 = negate_slope(s1);
  TwistAngle end1 = twist_end_for_slope(s1);
  TwistAngle end2 = twist_end_for_slope(s2);
  BasisChange B1(lp, m.p, lq, m.q);    // determinant +1
  BasisChange B2(lp, -m.p, lq, -m.q);  // determinant -1

  EventBuilder eb(p, "round2", 2, "torus " + name);
  eb.ev().sphere_model = (s1 == Slope::zero())
                             ? "two copies of S1xD(sqrt(pi))"
                             : "two copies of S1xD(sqrt(pi/2))";
  eb.ev().normalize_trace = norm.trace;

  // Record the meridian resolution inside the event, then consume the torus.
  if (t.surgery_meridian != m_eff) {
    ConvexTorusRef noted = t;
    noted.surgery_meridian = m_eff;
    eb.set_torus(name, noted);
  }
  eb.set_torus(name, std::nullopt);

  if (host_piece.is_layer()) {
    ThickenedTorusData w = host_piece.layer();
    TwistAngle a = t.angle;
    // Split the window at the torus: the host keeps [lo, a], a new piece
    // takes [a, hi] together with whatever was attached above.
    PieceId hiId = eb.add_piece(Piece(ThickenedTorusData{a, w.twist_hi}));
    detail::rewire_port(eb, p, BoundaryRef{t.host, kHiPort},
                        BoundaryRef{hiId, kHiPort});
    eb.replace_piece(t.host, Piece(ThickenedTorusData{w.twist_lo, a}));
    PieceId n2 = eb.add_piece(Piece(SolidTorusData{end2, B2}));
    PieceId n1 = eb.add_piece(Piece(SolidTorusData{end1, B1}));
    eb.add_interface(Interface{BoundaryRef{t.host, kHiPort},
                               BoundaryRef{n2, 0}, B2, pairs, f, false});
    eb.add_interface(Interface{BoundaryRef{hiId, kLoPort},
                               BoundaryRef{n1, 0}, B1, pairs, f, true});
    // Rehome tracked tori that sat above the cut.
    std::vector<std::pair<std::string, ConvexTorusRef>> moved;
    for (const auto& [nm, ot] : p.tori)
      if (ot.host == t.host && compare_angles(a, ot.angle) < 0)
        moved.emplace_back(nm, ot);
    for (auto& [nm, ot] : moved) {
      ot.host = hiId;
      eb.set_torus(nm, ot);
    }
  } else {
    // Opaque host: cut along the caller-vouched embedded torus, exposing two
    // oppositely oriented copies in the torus's own coordinates.
    OpaqueData od = host_piece.opaque();
    int base = static_cast<int>(od.boundaries.size());
    od.boundaries.push_back(OpaqueBoundary{norm.result, true});
    od.boundaries.push_back(OpaqueBoundary{norm.result, false});
    od.origin += " cut along " + name;
    eb.replace_piece(t.host, Piece(std::move(od)));
    PieceId n1 = eb.add_piece(Piece(SolidTorusData{end1, B1}));
    PieceId n2 = eb.add_piece(Piece(SolidTorusData{end2, B2}));
    eb.add_interface(Interface{BoundaryRef{t.host, base}, BoundaryRef{n1, 0},
                               B1, pairs, f, true});
    eb.add_interface(Interface{BoundaryRef{t.host, base + 1},
                               BoundaryRef{n2, 0}, B2, pairs, f, false});
  }

  eb.finish();
  validate_presentation(p);
  return p;
}

// ---------------------------------------------------------------------------
// Reversal.
// ---------------------------------------------------------------------------
inline Presentation reverse_event(Presentation p, std::size_t event_index) {
  if (event_index >= p.events.size())
    throw std::invalid_argument("event index out of range");
  SurgeryEvent ev = p.events[event_index];

  // Undo the recorded delta; this refuses (leaving the state untouched) when
  // a later event moved any of the same keys.
  apply_event_deltas(p, ev, /*forward=*/false);

  SurgeryEvent rev;
  rev.kind = "reversal";
  rev.index = ev.index == 0 ? 0 : 3 - ev.index;
  rev.site = "event #" + std::to_string(event_index) + " (" + ev.kind + ")";
  rev.reversed_event = static_cast<std::int64_t>(event_index);
  rev.lutz_half_turns = -ev.lutz_half_turns;
  rev.counters_before = p.counters;

  p.counters.simple_lutz_count -=
      ev.counters_after.simple_lutz_count - ev.counters_before.simple_lutz_count;
  p.counters.torsion_half_units -=
      ev.counters_after.torsion_half_units -
      ev.counters_before.torsion_half_units;
  recompute_overtwisted(p);
  rev.counters_after = p.counters;

  for (const auto& d : ev.pieces)
    rev.pieces.push_back({d.key, d.after, d.before});
  for (const auto& d : ev.interfaces)
    rev.interfaces.push_back({d.key, d.after, d.before});
  for (const auto& d : ev.tori)
    rev.tori.push_back({d.key, d.after, d.before});
  for (const auto& d : ev.knots)
    rev.knots.push_back({d.key, d.after, d.before});
  for (const auto& d : ev.outer)
    rev.outer.push_back({d.key, d.after, d.before});

  p.events.push_back(std::move(rev));
  validate_presentation(p);
  return p;
}

}  // namespace cscalc
