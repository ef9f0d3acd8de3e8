#pragma once

// Assembly ledger for contact 3-manifolds built from model pieces.
//
// A Presentation records pieces (rotational models and opaque remainders),
// the interfaces gluing their torus boundaries, tracked curves and tori, an
// ordered event log, and a few derived counters.  Pieces come in three kinds:
//
//  * SolidTorus: a model neighbourhood whose contact data sweeps radial
//    angles [0, twist_end]; the boundary foliation slope is
//    slope_of_angle(twist_end).
//  * ThickenedTorus: a radial layer sweeping [twist_lo, twist_hi].  A layer
//    with twist_lo == twist_hi is a vertically invariant collar: it is a real
//    piece of manifold but contributes no radial turning.
//  * Opaque: anything the calculus does not model from the inside; it only
//    exposes torus boundaries, each carrying a dividing set.
//
// Every gluing is boundary-to-boundary with matching dividing data, so the
// contact planes continue their monotone radial rotation across each
// interface; radial widths of glued pieces therefore add, and all the
// quantities derived here (torsion layers, overtwisted discs, canonical
// chain form) reduce to exact angle-span sums along chains of rotational
// pieces.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "cscalc/bypass.hpp"
#include "cscalc/dividing.hpp"
#include "cscalc/errors.hpp"
#include "cscalc/slope.hpp"

namespace cscalc {

using PieceId = std::int64_t;
using InterfaceId = std::int64_t;

// One torus boundary of one piece.  Ports: SolidTorus has the single port 0;
// ThickenedTorus has port 0 at twist_lo and port 1 at twist_hi; Opaque pieces
// number their boundary list.
struct BoundaryRef {
  PieceId piece = 0;
  int port = 0;

  friend bool operator==(const BoundaryRef& x, const BoundaryRef& y) {
    return x.piece == y.piece && x.port == y.port;
  }
  friend bool operator!=(const BoundaryRef& x, const BoundaryRef& y) {
    return !(x == y);
  }
  friend bool operator<(const BoundaryRef& x, const BoundaryRef& y) {
    return x.piece != y.piece ? x.piece < y.piece : x.port < y.port;
  }
  std::string str() const {
    return "p" + std::to_string(piece) + "#" + std::to_string(port);
  }
};

inline constexpr int kLoPort = 0;
inline constexpr int kHiPort = 1;

struct SolidTorusData {
  TwistAngle twist_end;  // radial extent measured from the core
  BasisChange basis;     // model classes -> the frame of the glued boundary

  friend bool operator==(const SolidTorusData& x, const SolidTorusData& y) {
    return x.twist_end == y.twist_end && x.basis == y.basis;
  }
};

struct ThickenedTorusData {
  TwistAngle twist_lo;
  TwistAngle twist_hi;  // twist_lo <= twist_hi; equality marks a collar

  friend bool operator==(const ThickenedTorusData& x,
                         const ThickenedTorusData& y) {
    return x.twist_lo == y.twist_lo && x.twist_hi == y.twist_hi;
  }
};

struct OpaqueBoundary {
  TorusDividingSet dividing;
  bool outward = true;  // orientation of the boundary as seen from the piece

  friend bool operator==(const OpaqueBoundary& x, const OpaqueBoundary& y) {
    return x.dividing == y.dividing && x.outward == y.outward;
  }
};

struct OpaqueData {
  std::string origin;  // human-readable provenance label
  std::vector<OpaqueBoundary> boundaries;

  friend bool operator==(const OpaqueData& x, const OpaqueData& y) {
    return x.origin == y.origin && x.boundaries == y.boundaries;
  }
};

struct Piece {
  std::variant<SolidTorusData, ThickenedTorusData, OpaqueData> data;

  Piece() : data(OpaqueData{}) {}
  explicit Piece(SolidTorusData d) : data(std::move(d)) {}
  explicit Piece(ThickenedTorusData d) : data(std::move(d)) {}
  explicit Piece(OpaqueData d) : data(std::move(d)) {}

  bool is_solid() const { return std::holds_alternative<SolidTorusData>(data); }
  bool is_layer() const {
    return std::holds_alternative<ThickenedTorusData>(data);
  }
  bool is_opaque() const { return std::holds_alternative<OpaqueData>(data); }
  bool is_rotational() const { return !is_opaque(); }

  const SolidTorusData& solid() const {
    return std::get<SolidTorusData>(data);
  }
  const ThickenedTorusData& layer() const {
    return std::get<ThickenedTorusData>(data);
  }
  const OpaqueData& opaque() const { return std::get<OpaqueData>(data); }
  SolidTorusData& solid() { return std::get<SolidTorusData>(data); }
  ThickenedTorusData& layer() { return std::get<ThickenedTorusData>(data); }
  OpaqueData& opaque() { return std::get<OpaqueData>(data); }

  int port_count() const {
    if (is_solid()) return 1;
    if (is_layer()) return 2;
    return static_cast<int>(opaque().boundaries.size());
  }

  std::string kind_name() const {
    if (is_solid()) return "SolidTorus";
    if (is_layer()) return "ThickenedTorus";
    return "Opaque";
  }

  friend bool operator==(const Piece& x, const Piece& y) {
    return x.data == y.data;
  }
  friend bool operator!=(const Piece& x, const Piece& y) { return !(x == y); }
};

// Foliation slope printed on a given boundary port, in the owning piece's own
// frame.
inline Slope boundary_slope(const Piece& piece, int port) {
  if (piece.is_solid()) {
    if (port != 0) throw std::invalid_argument("solid torus has only port 0");
    return slope_of_angle(piece.solid().twist_end);
  }
  if (piece.is_layer()) {
    if (port != kLoPort && port != kHiPort)
      throw std::invalid_argument("layer ports are 0 (lo) and 1 (hi)");
    return slope_of_angle(port == kLoPort ? piece.layer().twist_lo
                                          : piece.layer().twist_hi);
  }
  const auto& bs = piece.opaque().boundaries;
  if (port < 0 || port >= static_cast<int>(bs.size()))
    throw std::invalid_argument("opaque boundary port out of range");
  return bs[static_cast<std::size_t>(port)].dividing.essential_slope;
}

// A gluing of two boundary torii.  `gluing` rewrites side-b curve classes
// into side-a coordinates; `slope_a` is the common dividing/foliation slope
// expressed on side a; `dividing_pairs` the matched essential count.  The
// orientation flag records whether the identification preserves the boundary
// orientation (determinant +1).
struct Interface {
  BoundaryRef a;
  BoundaryRef b;
  BasisChange gluing;
  std::int64_t dividing_pairs = 1;
  Slope slope_a;
  bool orientation_compatible = true;

  friend bool operator==(const Interface& x, const Interface& y) {
    return x.a == y.a && x.b == y.b && x.gluing == y.gluing &&
           x.dividing_pairs == y.dividing_pairs && x.slope_a == y.slope_a &&
           x.orientation_compatible == y.orientation_compatible;
  }
  friend bool operator!=(const Interface& x, const Interface& y) {
    return !(x == y);
  }
};

// A tracked transverse curve.  On a SolidTorus host the curve is the core
// (label "core"); on an Opaque host the label names a curve the caller
// vouches for.  `nbhd_angle` is the radial extent of its standard tubular
// neighbourhood in the knot's own model frame; `framing` maps that model
// frame to the caller's preferred bookkeeping frame.
struct TransverseKnotRef {
  PieceId host = 0;
  std::string curve;
  TwistAngle nbhd_angle{0, Slope(-1, 100)};
  BasisChange framing;

  friend bool operator==(const TransverseKnotRef& x,
                         const TransverseKnotRef& y) {
    return x.host == y.host && x.curve == y.curve &&
           x.nbhd_angle == y.nbhd_angle && x.framing == y.framing;
  }
  friend bool operator!=(const TransverseKnotRef& x,
                         const TransverseKnotRef& y) {
    return !(x == y);
  }
};

// A tracked convex torus.  On a rotational host it sits at `angle` inside
// the host's window and its data is recorded in host coordinates; on an
// Opaque host it is an embedded-torus record vouched for by the caller.
struct ConvexTorusRef {
  PieceId host = 0;
  TwistAngle angle{0, Slope(-1, 1)};
  TorusDividingSet dividing;
  bool separating = false;
  std::optional<Slope> surgery_meridian;

  friend bool operator==(const ConvexTorusRef& x, const ConvexTorusRef& y) {
    return x.host == y.host && x.angle == y.angle &&
           x.dividing == y.dividing && x.separating == y.separating &&
           x.surgery_meridian == y.surgery_meridian;
  }
  friend bool operator!=(const ConvexTorusRef& x, const ConvexTorusRef& y) {
    return !(x == y);
  }
};

struct Counters {
  std::int64_t simple_lutz_count = 0;
  std::int64_t torsion_half_units = 0;
  bool overtwisted = false;

  friend bool operator==(const Counters& x, const Counters& y) {
    return x.simple_lutz_count == y.simple_lutz_count &&
           x.torsion_half_units == y.torsion_half_units &&
           x.overtwisted == y.overtwisted;
  }
  friend bool operator!=(const Counters& x, const Counters& y) {
    return !(x == y);
  }
};

// One keyed state change: `before` is the value prior to the event (absent if
// the key did not exist), `after` the value it left behind (absent if the
// event erased it).  Events are exact state deltas, which makes replay and
// reversal mechanical.
template <class K, class V>
struct Delta {
  K key{};
  std::optional<V> before;
  std::optional<V> after;
};

struct SurgeryEvent {
  std::string kind;  // "round1" | "round2" | "lutz_knot" | "lutz_torus" |
                     // "reversal"
  int index = 0;     // surgery index; reversal events carry the
                     // complementary index of what they undo
  std::string site;
  std::string sphere_model;  // index-2 events: which split model supplied the
                             // complement piece
  Trace normalize_trace;     // index-2 events: dividing-set cleanup steps
  std::int64_t lutz_half_turns = 0;
  std::int64_t reversed_event = -1;  // reversal events: target event index

  std::vector<Delta<PieceId, Piece>> pieces;
  std::vector<Delta<InterfaceId, Interface>> interfaces;
  std::vector<Delta<std::string, ConvexTorusRef>> tori;
  std::vector<Delta<std::string, TransverseKnotRef>> knots;
  std::vector<Delta<BoundaryRef, bool>> outer;  // outer-mark membership

  Counters counters_before;
  Counters counters_after;
};

struct Presentation {
  std::map<PieceId, Piece> pieces;
  std::map<InterfaceId, Interface> interfaces;
  std::set<BoundaryRef> outer;  // boundaries left open to the world
  std::map<std::string, ConvexTorusRef> tori;
  std::map<std::string, TransverseKnotRef> knots;
  std::vector<SurgeryEvent> events;
  Counters counters;
  PieceId next_piece = 1;
  InterfaceId next_interface = 1;
};

// States are compared without their histories: two presentations are "the
// same" when pieces, gluings, outer marks, tracked refs and counters all
// agree.  The event logs legitimately differ (a reversed pair leaves two
// extra entries).
inline bool same_state(const Presentation& p, const Presentation& q) {
  return p.pieces == q.pieces && p.interfaces == q.interfaces &&
         p.outer == q.outer && p.tori == q.tori && p.knots == q.knots &&
         p.counters == q.counters;
}

// ---------------------------------------------------------------------------
// Exact angle advancement: the angle reached after rotating by `sp` starting
// at `a`.  The fractional tangent follows the addition law; the half-turn
// carry is pinned by requiring span_between(a, result) == sp, which only one
// candidate satisfies.
// ---------------------------------------------------------------------------
inline TwistAngle advance_angle(const TwistAngle& a, const AngleSpan& sp) {
  Slope s2;
  if (sp.frac.is_zero()) {
    s2 = a.slope;
  } else if (a.slope.is_infinite()) {
    // fractional part pi/2 plus f: tangent 1/tan(f), vertical when f is zero
    s2 = sp.frac.right ? Slope::zero()
                       : Slope(sp.frac.t.den, sp.frac.t.num);
  } else if (sp.frac.right) {
    // arctan(x) + pi/2: slope -1/s
    s2 = (a.slope == Slope::zero()) ? Slope::infinity()
                                    : Slope(-a.slope.q, a.slope.p);
  } else {
    Rat x(-a.slope.p, a.slope.q);
    const Rat& t = sp.frac.t;
    Rat den = Rat(1) - x * t;
    if (den == Rat(0)) {
      s2 = Slope::infinity();
    } else {
      Rat tot = (x + t) / den;
      s2 = Slope(-tot.num, tot.den);
    }
  }
  for (std::int64_t dn = -1; dn <= 2; ++dn) {
    TwistAngle cand(a.half_turns + sp.half_turns + dn, s2);
    if (compare_angles(a, cand) <= 0 && span_between(a, cand) == sp)
      return cand;
  }
  throw std::logic_error("advance_angle: no half-turn candidate matched");
}

// Radial width of a rotational piece (solid tori measured from the core).
inline AngleSpan piece_width(const Piece& piece) {
  static const TwistAngle kZero{0, Slope::zero()};
  if (piece.is_solid()) return span_between(kZero, piece.solid().twist_end);
  if (piece.is_layer())
    return span_between(piece.layer().twist_lo, piece.layer().twist_hi);
  return AngleSpan::zero();
}

// ---------------------------------------------------------------------------
// Radial chains: maximal runs of rotational pieces glued boundary-to-
// boundary.  A chain end is an outer boundary, an attachment to an opaque
// piece, a solid-torus core, or (for a chain closed into a loop) a cycle
// marker.
// ---------------------------------------------------------------------------
struct ChainEnd {
  enum class Kind { Outer, Core, OpaquePort, Cycle };
  Kind kind = Kind::Outer;
  BoundaryRef at;  // Outer: the rotational port; OpaquePort: the opaque side
  Slope slope = Slope::zero();    // boundary slope (Outer/OpaquePort)
  std::int64_t pairs = 1;         // matched dividing pairs (OpaquePort)
};

struct RadialChain {
  std::vector<PieceId> pieces;
  AngleSpan span = AngleSpan::zero();
  bool has_cap = false;  // contains at least one solid torus
  ChainEnd end0, end1;
};

namespace detail {

struct ChainLinks {
  std::map<BoundaryRef, BoundaryRef> rot;  // rotational port <-> counterpart
  std::map<BoundaryRef, std::pair<BoundaryRef, const Interface*>> opaque;
};

inline ChainLinks chain_links(const Presentation& p) {
  ChainLinks l;
  auto rotational = [&](const BoundaryRef& r) {
    auto it = p.pieces.find(r.piece);
    return it != p.pieces.end() && it->second.is_rotational();
  };
  for (const auto& [iid, iface] : p.interfaces) {
    (void)iid;
    bool ra = rotational(iface.a), rb = rotational(iface.b);
    if (ra && rb) {
      l.rot[iface.a] = iface.b;
      l.rot[iface.b] = iface.a;
    } else if (ra && !rb) {
      l.opaque[iface.a] = {iface.b, &iface};
    } else if (!ra && rb) {
      l.opaque[iface.b] = {iface.a, &iface};
    }
  }
  return l;
}

inline ChainEnd classify_end(const Presentation& p, const ChainLinks& l,
                             const BoundaryRef& port) {
  ChainEnd e;
  auto oit = l.opaque.find(port);
  if (oit != l.opaque.end()) {
    e.kind = ChainEnd::Kind::OpaquePort;
    e.at = oit->second.first;
    e.slope = oit->second.second->slope_a;
    e.pairs = oit->second.second->dividing_pairs;
    return e;
  }
  e.kind = ChainEnd::Kind::Outer;
  e.at = port;
  e.slope = boundary_slope(p.pieces.at(port.piece), port.port);
  return e;
}

}  // namespace detail

inline std::vector<RadialChain> radial_chains(const Presentation& p) {
  detail::ChainLinks links = detail::chain_links(p);
  std::set<PieceId> seen;
  std::vector<RadialChain> out;

  // Walk from (piece, entry): entry -1 means the walk starts at a core or at
  // an arbitrary cycle piece; otherwise it names the port we came in through.
  auto walk = [&](PieceId start, int entry_port, ChainEnd first) {
    RadialChain chain;
    chain.end0 = first;
    PieceId cur = start;
    int entry = entry_port;
    while (true) {
      const Piece& pc = p.pieces.at(cur);
      seen.insert(cur);
      chain.pieces.push_back(cur);
      chain.span = chain.span + piece_width(pc);
      if (pc.is_solid()) chain.has_cap = true;
      int exit;
      if (pc.is_solid()) {
        if (entry == 0) {  // came in through the boundary: ends at the core
          chain.end1 = ChainEnd{ChainEnd::Kind::Core, {}, Slope::zero(), 1};
          return chain;
        }
        exit = 0;  // started at the core, leave through the boundary
      } else {
        exit = (entry == kLoPort) ? kHiPort : kLoPort;
      }
      BoundaryRef out_port{cur, exit};
      auto it = links.rot.find(out_port);
      if (it == links.rot.end()) {
        chain.end1 = detail::classify_end(p, links, out_port);
        return chain;
      }
      BoundaryRef nxt = it->second;
      if (seen.count(nxt.piece) &&
          std::find(chain.pieces.begin(), chain.pieces.end(), nxt.piece) !=
              chain.pieces.end()) {
        chain.end1 = ChainEnd{ChainEnd::Kind::Cycle, {}, Slope::zero(), 1};
        return chain;
      }
      cur = nxt.piece;
      entry = nxt.port;
    }
  };

  // Deterministic starts: visit pieces in id order; for an unseen component
  // find an end to start from (core of a solid, or an unlinked port),
  // falling back to a cycle start.
  for (const auto& [id, piece] : p.pieces) {
    if (!piece.is_rotational() || seen.count(id)) continue;

    // collect the component
    std::vector<PieceId> comp{id};
    std::set<PieceId> comp_set{id};
    for (std::size_t i = 0; i < comp.size(); ++i) {
      const Piece& pc = p.pieces.at(comp[i]);
      for (int port = 0; port < (pc.is_solid() ? 1 : 2); ++port) {
        auto it = links.rot.find(BoundaryRef{comp[i], port});
        if (it != links.rot.end() && !comp_set.count(it->second.piece)) {
          comp_set.insert(it->second.piece);
          comp.push_back(it->second.piece);
        }
      }
    }

    // prefer a solid-torus core start, then a free port, else a cycle
    PieceId start = -1;
    int entry = -1;
    ChainEnd first{ChainEnd::Kind::Cycle, {}, Slope::zero(), 1};
    for (PieceId cid : comp) {
      if (p.pieces.at(cid).is_solid()) {
        start = cid;
        entry = -1;
        first = ChainEnd{ChainEnd::Kind::Core, {}, Slope::zero(), 1};
        break;
      }
    }
    if (start < 0) {
      for (PieceId cid : comp) {
        for (int port = 0; port < 2 && start < 0; ++port) {
          BoundaryRef r{cid, port};
          if (!links.rot.count(r)) {
            start = cid;
            entry = port;
            first = detail::classify_end(p, links, r);
          }
        }
        if (start >= 0) break;
      }
    }
    if (start < 0) {
      start = comp.front();
      entry = kLoPort;  // arbitrary but deterministic cycle entry
    }
    out.push_back(walk(start, entry, first));
  }
  return out;
}

// Count of whole half-turn layers a chain can embed.  A pure layer chain may
// use its closed width; a chain ending in a solid-torus cap must stay clear
// of the core, so the bound is strict there.
inline std::int64_t chain_torsion_halves(const RadialChain& c) {
  std::int64_t k = c.span.half_turns;
  if (c.has_cap && c.span.frac.is_zero()) k -= 1;
  return k < 0 ? 0 : k;
}

inline std::int64_t max_torsion_halves(const Presentation& p) {
  std::int64_t best = 0;
  for (const RadialChain& c : radial_chains(p))
    best = std::max(best, chain_torsion_halves(c));
  return best;
}

// A chain that contains a solid-torus cap and sweeps a full half-turn
// surrounds a disc whose boundary foliation is meridional: an overtwisted
// disc.  Tracked dividing sets with contractible curves witness the same.
inline bool evaluate_overtwisted(const Presentation& p) {
  for (const RadialChain& c : radial_chains(p))
    if (c.has_cap && c.span.half_turns >= 1) return true;
  for (const auto& [name, t] : p.tori) {
    (void)name;
    if (giroux_overtwisted(t.dividing)) return true;
  }
  return false;
}

inline void recompute_overtwisted(Presentation& p) {
  p.counters.overtwisted = evaluate_overtwisted(p);
}

// ---------------------------------------------------------------------------
// Validation: ledger consistency after every operation.
// ---------------------------------------------------------------------------
inline void validate_presentation(const Presentation& p) {
  static const TwistAngle kZero{0, Slope::zero()};
  for (const auto& [id, piece] : p.pieces) {
    if (piece.is_solid()) {
      if (compare_angles(piece.solid().twist_end, kZero) <= 0)
        throw std::invalid_argument("solid torus needs positive radial extent");
    } else if (piece.is_layer()) {
      if (compare_angles(piece.layer().twist_lo, piece.layer().twist_hi) > 0)
        throw std::invalid_argument("layer window must not be reversed");
    } else {
      if (piece.opaque().origin.empty())
        throw std::invalid_argument("opaque piece needs an origin label");
      for (const OpaqueBoundary& b : piece.opaque().boundaries)
        validate(b.dividing);
    }
    (void)id;
  }

  // every port belongs to exactly one interface or is marked outer
  std::map<BoundaryRef, int> usage;
  for (const auto& [iid, iface] : p.interfaces) {
    (void)iid;
    for (const BoundaryRef& side : {iface.a, iface.b}) {
      auto it = p.pieces.find(side.piece);
      if (it == p.pieces.end())
        throw std::invalid_argument("interface references a missing piece");
      if (side.port < 0 || side.port >= it->second.port_count())
        throw std::invalid_argument("interface references a missing port");
      usage[side] += 1;
    }
    if (iface.a == iface.b)
      throw std::invalid_argument("interface glues a boundary to itself");
    if (iface.dividing_pairs < 1)
      throw std::invalid_argument("interface needs at least one dividing pair");
    // dividing data agreement under the gluing
    Slope sa = boundary_slope(p.pieces.at(iface.a.piece), iface.a.port);
    Slope sb = boundary_slope(p.pieces.at(iface.b.piece), iface.b.port);
    if (sa != iface.slope_a)
      throw std::invalid_argument("interface slope_a disagrees with side a");
    if (change_basis(sb, iface.gluing) != iface.slope_a)
      throw std::invalid_argument(
          "interface sides disagree under the gluing map");
    if (iface.orientation_compatible != (iface.gluing.det() == 1))
      throw std::invalid_argument(
          "interface orientation flag disagrees with the gluing determinant");
    for (const BoundaryRef& side : {iface.a, iface.b}) {
      const Piece& pc = p.pieces.at(side.piece);
      if (pc.is_opaque()) {
        const OpaqueBoundary& ob =
            pc.opaque().boundaries[static_cast<std::size_t>(side.port)];
        if (ob.dividing.essential_pairs != iface.dividing_pairs)
          throw std::invalid_argument(
              "opaque boundary pair count disagrees with the interface");
      }
    }
  }
  for (const BoundaryRef& r : p.outer) {
    auto it = p.pieces.find(r.piece);
    if (it == p.pieces.end() || r.port < 0 ||
        r.port >= it->second.port_count())
      throw std::invalid_argument("outer mark references a missing boundary");
    usage[r] += 1;
  }
  for (const auto& [id, piece] : p.pieces) {
    for (int port = 0; port < piece.port_count(); ++port) {
      auto it = usage.find(BoundaryRef{id, port});
      int n = it == usage.end() ? 0 : it->second;
      if (n != 1)
        throw std::invalid_argument(
            "every boundary needs exactly one interface or outer mark, got " +
            std::to_string(n) + " for " + BoundaryRef{id, port}.str());
    }
  }

  static const TwistAngle kCore{0, Slope::zero()};
  for (const auto& [name, t] : p.tori) {
    auto it = p.pieces.find(t.host);
    if (it == p.pieces.end())
      throw std::invalid_argument("tracked torus '" + name +
                                  "' lost its host piece");
    validate(t.dividing);
    if (it->second.is_rotational()) {
      TwistAngle lo = it->second.is_layer() ? it->second.layer().twist_lo
                                            : kCore;
      TwistAngle hi = it->second.is_layer() ? it->second.layer().twist_hi
                                            : it->second.solid().twist_end;
      if (it->second.is_solid() && compare_angles(kCore, t.angle) >= 0)
        throw std::invalid_argument("tracked torus '" + name +
                                    "' sits at the core of its host");
      if (compare_angles(lo, t.angle) > 0 || compare_angles(t.angle, hi) > 0)
        throw std::invalid_argument("tracked torus '" + name +
                                    "' sits outside its host window");
      if (t.dividing.essential_slope != slope_of_angle(t.angle))
        throw std::invalid_argument(
            "tracked torus '" + name +
            "' dividing slope disagrees with its angle");
    }
  }
  for (const auto& [name, k] : p.knots) {
    auto it = p.pieces.find(k.host);
    if (it == p.pieces.end())
      throw std::invalid_argument("tracked knot '" + name +
                                  "' lost its host piece");
    if (it->second.is_solid()) {
      if (k.curve != "core")
        throw std::invalid_argument(
            "knots on solid-torus hosts must be the core");
      if (compare_angles(k.nbhd_angle, it->second.solid().twist_end) > 0)
        throw std::invalid_argument(
            "knot neighbourhood exceeds its host solid torus");
    }
    if (it->second.is_layer())
      throw std::invalid_argument(
          "knots cannot be hosted by a layer piece");
    if (compare_angles(k.nbhd_angle, kCore) <= 0)
      throw std::invalid_argument("knot neighbourhood needs positive extent");
  }
  if (p.counters.torsion_half_units < 0 || p.counters.simple_lutz_count < 0)
    throw std::invalid_argument("counters must stay non-negative");
}

// ---------------------------------------------------------------------------
// Event recording: a builder that applies keyed writes to the presentation
// while accumulating the exact delta, then stamps the event.
// ---------------------------------------------------------------------------
class EventBuilder {
 public:
  EventBuilder(Presentation& p, std::string kind, int index, std::string site)
      : p_(p) {
    ev_.kind = std::move(kind);
    ev_.index = index;
    ev_.site = std::move(site);
    ev_.counters_before = p.counters;
  }

  PieceId add_piece(Piece piece) {
    PieceId id = p_.next_piece++;
    write_piece(id, std::move(piece));
    return id;
  }
  void replace_piece(PieceId id, Piece piece) {
    write_piece(id, std::move(piece));
  }
  void remove_piece(PieceId id) { erase_piece(id); }

  InterfaceId add_interface(Interface iface) {
    InterfaceId id = p_.next_interface++;
    write_iface(id, std::move(iface));
    return id;
  }
  void replace_interface(InterfaceId id, Interface iface) {
    write_iface(id, std::move(iface));
  }
  void remove_interface(InterfaceId id) { erase_iface(id); }

  void set_outer(BoundaryRef r, bool present) {
    bool cur = p_.outer.count(r) > 0;
    if (cur == present) return;
    record(outer_, r, cur ? std::optional<bool>(true) : std::nullopt,
           present ? std::optional<bool>(true) : std::nullopt);
    if (present)
      p_.outer.insert(r);
    else
      p_.outer.erase(r);
  }

  void set_torus(const std::string& name, std::optional<ConvexTorusRef> v) {
    auto it = p_.tori.find(name);
    std::optional<ConvexTorusRef> before =
        it == p_.tori.end() ? std::nullopt
                            : std::optional<ConvexTorusRef>(it->second);
    record(tori_, name, before, v);
    if (v)
      p_.tori[name] = *v;
    else if (it != p_.tori.end())
      p_.tori.erase(it);
  }

  void set_knot(const std::string& name, std::optional<TransverseKnotRef> v) {
    auto it = p_.knots.find(name);
    std::optional<TransverseKnotRef> before =
        it == p_.knots.end() ? std::nullopt
                             : std::optional<TransverseKnotRef>(it->second);
    record(knots_, name, before, v);
    if (v)
      p_.knots[name] = *v;
    else if (it != p_.knots.end())
      p_.knots.erase(it);
  }

  SurgeryEvent& ev() { return ev_; }

  // Recompute the overtwisted flag, stamp counters, append the event.
  SurgeryEvent& finish() {
    recompute_overtwisted(p_);
    ev_.counters_after = p_.counters;
    flush(pieces_, ev_.pieces);
    flush(ifaces_, ev_.interfaces);
    flush(tori_, ev_.tori);
    flush(knots_, ev_.knots);
    flush(outer_, ev_.outer);
    p_.events.push_back(std::move(ev_));
    return p_.events.back();
  }

 private:
  template <class K, class V>
  using DeltaMap = std::map<K, std::pair<std::optional<V>, std::optional<V>>>;

  template <class K, class V>
  void record(DeltaMap<K, V>& m, const K& key, std::optional<V> before,
              std::optional<V> after) {
    auto it = m.find(key);
    if (it == m.end())
      m.emplace(key, std::make_pair(std::move(before), std::move(after)));
    else
      it->second.second = std::move(after);  // keep the first `before`
  }

  template <class K, class V>
  void flush(DeltaMap<K, V>& m, std::vector<Delta<K, V>>& out) {
    for (auto& [key, pair] : m) {
      if (pair.first == pair.second) continue;  // no net change
      out.push_back(Delta<K, V>{key, std::move(pair.first),
                                std::move(pair.second)});
    }
    m.clear();
  }

  void write_piece(PieceId id, Piece piece) {
    auto it = p_.pieces.find(id);
    std::optional<Piece> before =
        it == p_.pieces.end() ? std::nullopt
                              : std::optional<Piece>(it->second);
    record(pieces_, id, std::move(before), std::optional<Piece>(piece));
    p_.pieces[id] = std::move(piece);
  }
  void erase_piece(PieceId id) {
    auto it = p_.pieces.find(id);
    if (it == p_.pieces.end())
      throw std::logic_error("removing a piece that is not present");
    record(pieces_, id, std::optional<Piece>(it->second),
           std::optional<Piece>());
    p_.pieces.erase(it);
  }
  void write_iface(InterfaceId id, Interface iface) {
    auto it = p_.interfaces.find(id);
    std::optional<Interface> before =
        it == p_.interfaces.end() ? std::nullopt
                                  : std::optional<Interface>(it->second);
    record(ifaces_, id, std::move(before), std::optional<Interface>(iface));
    p_.interfaces[id] = std::move(iface);
  }
  void erase_iface(InterfaceId id) {
    auto it = p_.interfaces.find(id);
    if (it == p_.interfaces.end())
      throw std::logic_error("removing an interface that is not present");
    record(ifaces_, id, std::optional<Interface>(it->second),
           std::optional<Interface>());
    p_.interfaces.erase(it);
  }

  Presentation& p_;
  SurgeryEvent ev_;
  DeltaMap<PieceId, Piece> pieces_;
  DeltaMap<InterfaceId, Interface> ifaces_;
  DeltaMap<std::string, ConvexTorusRef> tori_;
  DeltaMap<std::string, TransverseKnotRef> knots_;
  DeltaMap<BoundaryRef, bool> outer_;
};

namespace detail {

// Check that the container still holds the side of the delta about to be
// consumed (`before` when replaying forward, `after` when undoing).
template <class Map, class K, class V>
void check_delta(const Map& m, const Delta<K, V>& d, bool forward,
                 const char* what) {
  const std::optional<V>& expect = forward ? d.before : d.after;
  auto it = m.find(d.key);
  bool present = it != m.end();
  if (expect.has_value() != present || (present && !(it->second == *expect)))
    throw EventNotReversibleHere(
        std::string("a later event touched the same ") + what);
}

template <class Map, class K, class V>
void write_delta(Map& m, const Delta<K, V>& d, bool forward) {
  const std::optional<V>& next = forward ? d.after : d.before;
  if (next.has_value())
    m[d.key] = *next;
  else
    m.erase(d.key);
}

}  // namespace detail

// Replay (forward) or undo (backward) an event's exact delta.  All keys are
// verified against the side of the delta being consumed before anything is
// written, so a mismatch (EventNotReversibleHere) leaves the presentation
// untouched.
inline void apply_event_deltas(Presentation& p, const SurgeryEvent& ev,
                               bool forward) {
  std::map<BoundaryRef, bool> outer_map;
  for (const BoundaryRef& r : p.outer) outer_map[r] = true;

  for (const auto& d : ev.pieces)
    detail::check_delta(p.pieces, d, forward, "piece");
  for (const auto& d : ev.interfaces)
    detail::check_delta(p.interfaces, d, forward, "interface");
  for (const auto& d : ev.tori)
    detail::check_delta(p.tori, d, forward, "tracked torus");
  for (const auto& d : ev.knots)
    detail::check_delta(p.knots, d, forward, "tracked knot");
  for (const auto& d : ev.outer)
    detail::check_delta(outer_map, d, forward, "outer mark");

  for (const auto& d : ev.pieces) detail::write_delta(p.pieces, d, forward);
  for (const auto& d : ev.interfaces)
    detail::write_delta(p.interfaces, d, forward);
  for (const auto& d : ev.tori) detail::write_delta(p.tori, d, forward);
  for (const auto& d : ev.knots) detail::write_delta(p.knots, d, forward);
  for (const auto& d : ev.outer) {
    detail::write_delta(outer_map, d, forward);
    if (outer_map.count(d.key))
      p.outer.insert(d.key);
    else
      p.outer.erase(d.key);
  }
}

// Rebuild the state change of a recorded event on another presentation whose
// state matches the event's preconditions (e.g. a snapshot taken before the
// original run).  Counters are restored from the event's stamp.
inline void replay_event(Presentation& p, const SurgeryEvent& ev) {
  apply_event_deltas(p, ev, /*forward=*/true);
  p.counters = ev.counters_after;
}

// ---------------------------------------------------------------------------
// Construction and registration.
// ---------------------------------------------------------------------------

// The tight three-sphere: one opaque piece, no boundary, zeroed counters.
inline Presentation standard_sphere() {
  Presentation p;
  p.pieces.emplace(p.next_piece++, Piece(OpaqueData{"tight-S3", {}}));
  return p;
}

// Registers a transverse curve with a standard tubular neighbourhood.  On a
// SolidTorus host the label must be "core"; on an Opaque host the caller
// vouches for the named curve.  Registration is bookkeeping, not an event.
inline Presentation approximate_transverse(
    Presentation p, PieceId host, const std::string& label,
    TwistAngle nbhd_angle = TwistAngle{0, Slope(-1, 100)},
    BasisChange framing = BasisChange()) {
  auto it = p.pieces.find(host);
  if (it == p.pieces.end())
    throw std::invalid_argument("approximate_transverse: no such piece");
  if (p.knots.count(label))
    throw std::invalid_argument("knot label already registered: " + label);
  if (it->second.is_layer())
    throw std::invalid_argument(
        "approximate_transverse needs a solid or opaque host");
  if (it->second.is_solid()) {
    if (label != "core")
      throw std::invalid_argument(
          "only the core of a solid torus can be registered");
    if (compare_angles(nbhd_angle, it->second.solid().twist_end) > 0)
      throw std::invalid_argument(
          "neighbourhood extent exceeds the host solid torus");
  }
  TransverseKnotRef k;
  k.host = host;
  k.curve = it->second.is_solid() ? "core" : label;
  k.nbhd_angle = nbhd_angle;
  k.framing = framing;
  p.knots[label] = k;
  return p;
}

// Registers a convex torus.  On a rotational host `angle` places it inside
// the window and the dividing data is given in host coordinates; on an
// Opaque host the record is caller-vouched.
inline Presentation register_convex_torus(
    Presentation p, const std::string& name, PieceId host, TwistAngle angle,
    TorusDividingSet dividing, bool separating,
    std::optional<Slope> surgery_meridian = std::nullopt) {
  auto it = p.pieces.find(host);
  if (it == p.pieces.end())
    throw std::invalid_argument("register_convex_torus: no such piece");
  if (p.tori.count(name))
    throw std::invalid_argument("torus name already registered: " + name);
  if (it->second.is_rotational()) {
    static const TwistAngle kCore{0, Slope::zero()};
    TwistAngle lo = it->second.is_layer() ? it->second.layer().twist_lo
                                          : kCore;
    TwistAngle hi = it->second.is_layer() ? it->second.layer().twist_hi
                                          : it->second.solid().twist_end;
    if (it->second.is_solid() && compare_angles(kCore, angle) >= 0)
      throw std::invalid_argument("torus angle reaches the host core");
    if (compare_angles(lo, angle) > 0 || compare_angles(angle, hi) > 0)
      throw std::invalid_argument("torus angle outside the host window");
    if (dividing.essential_slope != slope_of_angle(angle))
      throw std::invalid_argument(
          "torus dividing slope must match its angle");
  }
  validate(dividing);
  ConvexTorusRef t;
  t.host = host;
  t.angle = angle;
  t.dividing = std::move(dividing);
  t.separating = separating;
  t.surgery_meridian = surgery_meridian;
  p.tori[name] = std::move(t);
  return p;
}

// ---------------------------------------------------------------------------
// Canonical state text: the history-free normal form used for equivalence
// checks.  Rotational runs are flattened to (end, total span, end); interior
// junction positions, piece ids and window offsets all drop out — a
// rotational layer is determined by its boundary slopes and total turning.
// Opaque pieces keep their full boundary data.  Where identical opaque
// pieces are interchangeable the tiebreak falls back to creation order.
// ---------------------------------------------------------------------------
namespace detail {

inline std::string span_text(const AngleSpan& sp) {
  std::string out = std::to_string(sp.half_turns);
  if (sp.frac.right)
    out += "+R";
  else if (!(sp.frac.t == Rat(0)))
    out += "+t" + std::to_string(sp.frac.t.num) + "/" +
           std::to_string(sp.frac.t.den);
  return out;
}

inline std::string end_text(const ChainEnd& e,
                            const std::map<PieceId, int>& opaque_index) {
  switch (e.kind) {
    case ChainEnd::Kind::Core:
      return "core";
    case ChainEnd::Kind::Cycle:
      return "cycle";
    case ChainEnd::Kind::Outer:
      return "outer(s=" + e.slope.str() + ")";
    case ChainEnd::Kind::OpaquePort:
      return "op" + std::to_string(opaque_index.at(e.at.piece)) + "#" +
             std::to_string(e.at.port) + "(s=" + e.slope.str() +
             ",n=" + std::to_string(e.pairs) + ")";
  }
  return "?";
}

inline std::string opaque_base_text(const Piece& piece) {
  std::string out = "origin=" + piece.opaque().origin;
  for (const OpaqueBoundary& b : piece.opaque().boundaries) {
    out += ";b(" + canonical_text(b.dividing) +
           ",out=" + (b.outward ? "1" : "0") + ")";
  }
  return out;
}

}  // namespace detail

inline std::string canonical_state_text(const Presentation& p) {
  // stable opaque numbering: sort by content, fall back to id
  std::vector<std::pair<std::string, PieceId>> opaques;
  for (const auto& [id, piece] : p.pieces)
    if (piece.is_opaque())
      opaques.emplace_back(detail::opaque_base_text(piece), id);
  std::sort(opaques.begin(), opaques.end());
  std::map<PieceId, int> opaque_index;
  for (std::size_t i = 0; i < opaques.size(); ++i)
    opaque_index[opaques[i].second] = static_cast<int>(i);

  // chains in a canonical orientation
  std::vector<std::string> chain_texts;
  std::map<BoundaryRef, std::string> attachment;  // opaque port -> chain text
  std::vector<RadialChain> chains = radial_chains(p);
  for (const RadialChain& c : chains) {
    std::string t0 = detail::end_text(c.end0, opaque_index);
    std::string t1 = detail::end_text(c.end1, opaque_index);
    if (t1 < t0) std::swap(t0, t1);
    std::string text =
        "[" + t0 + " =" + detail::span_text(c.span) + "= " + t1 + "]";
    chain_texts.push_back(text);
    if (c.end0.kind == ChainEnd::Kind::OpaquePort)
      attachment[c.end0.at] = text;
    if (c.end1.kind == ChainEnd::Kind::OpaquePort)
      attachment[c.end1.at] = text;
  }
  std::sort(chain_texts.begin(), chain_texts.end());

  // opaque blocks with attachments resolved
  std::vector<std::string> opaque_texts;
  for (const auto& [base, id] : opaques) {
    std::string out = "op" + std::to_string(opaque_index[id]) + "{" + base;
    const Piece& piece = p.pieces.at(id);
    for (int port = 0; port < piece.port_count(); ++port) {
      BoundaryRef r{id, port};
      out += ";att" + std::to_string(port) + "=";
      if (p.outer.count(r)) {
        out += "outer";
      } else if (attachment.count(r)) {
        out += "chain" + attachment[r];
      } else {
        // opaque-to-opaque gluing
        bool found = false;
        for (const auto& [iid, iface] : p.interfaces) {
          (void)iid;
          BoundaryRef other;
          if (iface.a == r)
            other = iface.b;
          else if (iface.b == r)
            other = iface.a;
          else
            continue;
          if (p.pieces.at(other.piece).is_opaque()) {
            out += "op" + std::to_string(opaque_index.at(other.piece)) + "#" +
                   std::to_string(other.port) + ":g=" + iface.gluing.str();
            found = true;
          }
          break;
        }
        if (!found) out += "none";
      }
    }
    out += "}";
    opaque_texts.push_back(out);
  }
  std::sort(opaque_texts.begin(), opaque_texts.end());

  std::string out = "chains{";
  for (const std::string& t : chain_texts) out += t;
  out += "};opaques{";
  for (const std::string& t : opaque_texts) out += t;
  out += "}";
  return out;
}

inline bool canonical_equal(const Presentation& p, const Presentation& q) {
  return canonical_state_text(p) == canonical_state_text(q);
}

// ---------------------------------------------------------------------------
// Invariant report: a census of the ledger.
// ---------------------------------------------------------------------------
struct InvariantReport {
  std::map<std::string, std::size_t> piece_census;  // kind -> count
  std::size_t interface_count = 0;
  Counters counters;
  std::int64_t torsion_scan = 0;  // chain-scanner lower bound
  std::map<std::string, std::int64_t> torus_relative_euler;
  std::vector<std::string> event_summary;

  std::string text() const {
    std::ostringstream os;
    os << "pieces:";
    for (const auto& [kind, n] : piece_census) os << " " << kind << "=" << n;
    os << "\ninterfaces: " << interface_count;
    os << "\novertwisted: " << (counters.overtwisted ? "true" : "false");
    os << "\ntorsion_half_units: " << counters.torsion_half_units
       << " (scan " << torsion_scan << ")";
    os << "\nsimple_lutz_count: " << counters.simple_lutz_count;
    for (const auto& [name, rel] : torus_relative_euler)
      os << "\ntorus " << name << ": relative_euler=" << rel;
    for (const std::string& e : event_summary) os << "\nevent: " << e;
    os << "\n";
    return os.str();
  }
};

inline InvariantReport invariant_report(const Presentation& p) {
  InvariantReport r;
  for (const auto& [id, piece] : p.pieces) {
    (void)id;
    r.piece_census[piece.kind_name()] += 1;
  }
  r.interface_count = p.interfaces.size();
  r.counters = p.counters;
  r.torsion_scan = max_torsion_halves(p);
  for (const auto& [name, t] : p.tori)
    r.torus_relative_euler[name] = relative_euler(t.dividing);
  for (const SurgeryEvent& ev : p.events) {
    std::string s = ev.kind;
    if (ev.index != 0) s += "/" + std::to_string(ev.index);
    if (!ev.site.empty()) s += " @ " + ev.site;
    r.event_summary.push_back(s);
  }
  return r;
}

}  // namespace cscalc
