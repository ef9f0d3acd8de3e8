#pragma once

// Bypass-attachment rewriting on torus dividing sets, the four derived
// rewrite macros, and the normalization procedure that removes contractible
// curves from a balanced dividing set.
//
// A bypass is attached along an arc that crosses the dividing set in three
// points.  Only the combinatorial pattern of the three crossed curves
// matters; the recognized patterns and their outcomes are:
//
//   wiggle   (e, e, e)  same essential curve thrice: creates a cancelling
//            pair of contractibles straddling that curve (the other side of
//            the attachment is isotopically trivial and is not modelled).
//   cancel   (k, e, k)  two adjacent leaf roots through their common
//            essential curve: both leaves vanish, three curves become one.
//   nested   (k, k, e|k) a node, its parent, and the curve enclosing the
//            parent: the pair vanishes; the inner node's children take the
//            parent's place and the parent's other children are rehomed
//            across the enclosing curve.
//   triple   (e, e, e') three consecutive essential curves (needs at least
//            two pairs): they merge into one curve of the same slope; the
//            strips two apart merge and their forests concatenate.
//   wrap     (e, e', e) on a one-pair torus: the essential slope moves one
//            step in the Farey sense (0 goes to 1; other slopes by change
//            of basis), curve count unchanged.
//
// The attachment side (front/back) is carried in arcs and traces for
// reference, but never changes the combinatorial outcome: whenever a bypass
// exists at all, the productive side is the one modelled.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "cscalc/dividing.hpp"
#include "cscalc/errors.hpp"
#include "cscalc/slope.hpp"

namespace cscalc {

enum class BypassSide { Front, Back };

struct CurveRef {
  enum class Kind { Essential, Contractible };
  Kind kind = Kind::Essential;
  std::size_t curve = 0;  // essential curve index
  std::size_t strip = 0;  // contractible: host strip
  NodePath path;          // contractible: node path within the strip

  static CurveRef essential(std::size_t c) {
    CurveRef r;
    r.kind = Kind::Essential;
    r.curve = c;
    return r;
  }
  static CurveRef contractible(std::size_t strip, NodePath path) {
    CurveRef r;
    r.kind = Kind::Contractible;
    r.strip = strip;
    r.path = std::move(path);
    return r;
  }
  bool is_essential() const { return kind == Kind::Essential; }
};

struct BypassArc {
  std::array<CurveRef, 3> crossings;
  BypassSide side = BypassSide::Front;
};

// One recorded macro application: name, canonical integer arguments, and the
// attachment arc it expanded to (side included).  Traces replay by name and
// arguments alone.
struct MacroApplication {
  std::string name;
  std::vector<std::int64_t> args;
  BypassArc arc;
};
using Trace = std::vector<MacroApplication>;

namespace detail {

[[noreturn]] inline void bad_arc(const std::string& why) {
  throw InvalidArc("bypass arc does not match the diagram: " + why);
}

inline const DividingNode* try_node(const TorusDividingSet& ds,
                                    std::size_t strip, const NodePath& path) {
  if (strip >= ds.strips.size() || path.empty()) return nullptr;
  if (path[0] >= ds.strips[strip].size()) return nullptr;
  const DividingNode* n = &ds.strips[strip][path[0]];
  for (std::size_t i = 1; i < path.size(); ++i) {
    if (path[i] >= n->children.size()) return nullptr;
    n = &n->children[path[i]];
  }
  return n;
}

inline bool is_child_path(const NodePath& parent, const NodePath& child) {
  if (child.size() != parent.size() + 1) return false;
  for (std::size_t i = 0; i < parent.size(); ++i)
    if (parent[i] != child[i]) return false;
  return true;
}

// Sibling list that contains the node at `path` (the strip's root list for
// roots, otherwise the parent's children).
inline DividingForest& sibling_list(TorusDividingSet& ds, std::size_t strip,
                                    const NodePath& path) {
  if (path.size() == 1) return ds.strips[strip];
  NodePath parent(path.begin(), path.end() - 1);
  return ds.node_at(strip, parent).children;
}

inline TorusDividingSet wiggle_create(const TorusDividingSet& ds,
                                      std::size_t c) {
  const std::size_t n = ds.curve_count();
  if (c >= n) bad_arc("essential curve index out of range");
  TorusDividingSet out = ds;
  std::size_t below = (c + n - 1) % n;
  out.strips[below].push_back(leaf_for_strip(below));
  out.strips[c].push_back(leaf_for_strip(c));
  return out;
}

inline TorusDividingSet pair_cancel(const TorusDividingSet& ds,
                                    const CurveRef& a, std::size_t c,
                                    const CurveRef& b) {
  const std::size_t n = ds.curve_count();
  if (c >= n) bad_arc("essential curve index out of range");
  std::size_t below = (c + n - 1) % n;
  if (a.strip != below || b.strip != c)
    bad_arc("cancel arc must cross roots on both sides of its curve");
  if (a.path.size() != 1 || b.path.size() != 1)
    bad_arc("cancel arc must cross root curves");
  const DividingNode* na = try_node(ds, a.strip, a.path);
  const DividingNode* nb = try_node(ds, b.strip, b.path);
  if (!na || !nb) bad_arc("referenced contractible does not exist");
  if (!na->children.empty() || !nb->children.empty())
    bad_arc("cancel arc needs independent (leaf) contractibles");
  TorusDividingSet out = ds;
  out.strips[a.strip].erase(out.strips[a.strip].begin() +
                            static_cast<std::ptrdiff_t>(a.path[0]));
  out.strips[b.strip].erase(out.strips[b.strip].begin() +
                            static_cast<std::ptrdiff_t>(b.path[0]));
  return out;
}

inline TorusDividingSet nested_cancel(const TorusDividingSet& ds,
                                      const CurveRef& inner,
                                      const CurveRef& outer,
                                      const CurveRef& enclosing) {
  const std::size_t n = ds.curve_count();
  if (inner.strip != outer.strip) bad_arc("nested pair must share a strip");
  const std::size_t s = outer.strip;
  if (!is_child_path(outer.path, inner.path))
    bad_arc("nested arc must cross a node and its direct parent");
  const DividingNode* pouter = try_node(ds, s, outer.path);
  if (!pouter) bad_arc("referenced contractible does not exist");
  const std::size_t child_idx = inner.path.back();
  DividingNode inner_node = pouter->children[child_idx];
  std::vector<DividingNode> others;
  for (std::size_t i = 0; i < pouter->children.size(); ++i)
    if (i != child_idx) others.push_back(pouter->children[i]);

  TorusDividingSet out = ds;
  if (enclosing.is_essential()) {
    if (outer.path.size() != 1)
      bad_arc("an essential enclosing curve needs a root-level pair");
    std::size_t e = enclosing.curve;
    if (e >= n || (e != s && e != (s + 1) % n))
      bad_arc("enclosing curve must bound the host strip");
    std::size_t across = (e == s) ? (s + n - 1) % n : (s + 1) % n;
    DividingForest& roots = out.strips[s];
    roots.erase(roots.begin() + static_cast<std::ptrdiff_t>(outer.path[0]));
    roots.insert(roots.begin() + static_cast<std::ptrdiff_t>(outer.path[0]),
                 inner_node.children.begin(), inner_node.children.end());
    for (const DividingNode& m : others) out.strips[across].push_back(m);
  } else {
    if (enclosing.strip != s || !is_child_path(enclosing.path, outer.path))
      bad_arc("enclosing contractible must be the pair's direct parent");
    DividingNode& parent = out.node_at(s, enclosing.path);
    const std::size_t outer_idx = outer.path.back();
    parent.children.erase(parent.children.begin() +
                          static_cast<std::ptrdiff_t>(outer_idx));
    parent.children.insert(
        parent.children.begin() + static_cast<std::ptrdiff_t>(outer_idx),
        inner_node.children.begin(), inner_node.children.end());
    DividingForest& up = sibling_list(out, s, enclosing.path);
    for (const DividingNode& m : others) up.push_back(m);
  }
  return out;
}

inline TorusDividingSet triple_merge(const TorusDividingSet& ds,
                                     std::size_t a, std::size_t b,
                                     std::size_t c) {
  const std::size_t n = ds.curve_count();
  if (n < 4) bad_arc("merging consecutive curves needs at least two pairs");
  if (b != (a + 1) % n || c != (a + 2) % n)
    bad_arc("essential arc must cross three consecutive curves");
  TorusDividingSet out(ds.essential_pairs - 1, ds.essential_slope);
  DividingForest m1 = ds.strips[(a + n - 1) % n];
  const DividingForest& f1b = ds.strips[(a + 1) % n];
  m1.insert(m1.end(), f1b.begin(), f1b.end());
  DividingForest m2 = ds.strips[a];
  const DividingForest& f2b = ds.strips[(a + 2) % n];
  m2.insert(m2.end(), f2b.begin(), f2b.end());
  std::vector<DividingForest> seq;
  seq.push_back(std::move(m1));
  seq.push_back(std::move(m2));
  for (std::size_t i = 3; i + 1 < n; ++i)
    seq.push_back(ds.strips[(a + i) % n]);
  // Rotate so the new strip 0 keeps positive sign.
  std::size_t shift = ((a + n - 1) % n) % 2;  // parity of the first entry
  for (std::size_t i = 0; i < seq.size(); ++i)
    out.strips[i] = seq[(i + shift) % seq.size()];
  return out;
}

inline TorusDividingSet farey_wrap(const TorusDividingSet& ds) {
  TorusDividingSet out = ds;
  const Slope s = ds.essential_slope;
  auto [cc, dd] = bezout_complement(s.p, s.q);
  BasisChange h(s.q, -s.p, cc, dd);  // carries s to slope 0
  out.essential_slope = change_basis(Slope(1, 1), h.inverse());
  return out;
}

}  // namespace detail

inline TorusDividingSet bypass_attach(const TorusDividingSet& ds,
                                      const BypassArc& arc) {
  const CurveRef& x = arc.crossings[0];
  const CurveRef& y = arc.crossings[1];
  const CurveRef& z = arc.crossings[2];
  TorusDividingSet out = ds;
  if (x.is_essential() && y.is_essential() && z.is_essential()) {
    if (x.curve == y.curve && y.curve == z.curve)
      out = detail::wiggle_create(ds, x.curve);
    else if (ds.curve_count() == 2 && x.curve == z.curve &&
             x.curve != y.curve && x.curve < 2 && y.curve < 2)
      out = detail::farey_wrap(ds);
    else
      out = detail::triple_merge(ds, x.curve, y.curve, z.curve);
  } else if (!x.is_essential() && y.is_essential() && !z.is_essential()) {
    out = detail::pair_cancel(ds, x, y.curve, z);
  } else if (!x.is_essential() && !y.is_essential()) {
    out = detail::nested_cancel(ds, x, y, z);
  } else {
    detail::bad_arc("unrecognized crossing pattern");
  }
  validate(out);
  return out;
}

// ---------------------------------------------------------------------------
// Macros.  Each expands to one bypass attachment (the insertion macro records
// the arc whose front attachment would undo it) and appends a replayable
// entry to the trace when one is supplied.
// ---------------------------------------------------------------------------

// Create a cancelling pair of contractibles straddling essential curve c.
inline TorusDividingSet op_I_create(const TorusDividingSet& ds, std::size_t c,
                                    Trace* trace = nullptr) {
  if (c >= ds.curve_count())
    throw ConfigurationAbsent("no such essential curve");
  BypassArc arc{{CurveRef::essential(c), CurveRef::essential(c),
                 CurveRef::essential(c)},
                BypassSide::Front};
  TorusDividingSet out = bypass_attach(ds, arc);
  if (trace)
    trace->push_back({"op_I_create", {static_cast<std::int64_t>(c)}, arc});
  return out;
}

// Cancel the leaf roots at index `below` in strip c-1 and `above` in strip c.
inline TorusDividingSet op_II_cancel(const TorusDividingSet& ds, std::size_t c,
                                     std::size_t below, std::size_t above,
                                     Trace* trace = nullptr) {
  const std::size_t n = ds.curve_count();
  if (c >= n) throw ConfigurationAbsent("no such essential curve");
  std::size_t sb = (c + n - 1) % n;
  if (below >= ds.strips[sb].size() || above >= ds.strips[c].size() ||
      !ds.strips[sb][below].children.empty() ||
      !ds.strips[c][above].children.empty())
    throw ConfigurationAbsent("no cancelling pair at the given position");
  BypassArc arc{{CurveRef::contractible(sb, {below}), CurveRef::essential(c),
                 CurveRef::contractible(c, {above})},
                BypassSide::Front};
  TorusDividingSet out = bypass_attach(ds, arc);
  if (trace)
    trace->push_back({"op_II_cancel",
                      {static_cast<std::int64_t>(c),
                       static_cast<std::int64_t>(below),
                       static_cast<std::int64_t>(above)},
                      arc});
  return out;
}

// Insert a nested pair at the end of the given strip's forest.  The recorded
// arc is the nested-cancel arc that undoes the insertion, read from the back.
inline TorusDividingSet op_III(const TorusDividingSet& ds, std::size_t strip,
                               Trace* trace = nullptr) {
  if (strip >= ds.strips.size())
    throw ConfigurationAbsent("no such strip");
  TorusDividingSet out = ds;
  out.strips[strip].push_back(nested_pair_for_strip(strip));
  std::size_t idx = out.strips[strip].size() - 1;
  BypassArc arc{{CurveRef::contractible(strip, {idx, 0}),
                 CurveRef::contractible(strip, {idx}),
                 CurveRef::essential((strip + 1) % ds.curve_count())},
                BypassSide::Back};
  validate(out);
  if (trace)
    trace->push_back({"op_III", {static_cast<std::int64_t>(strip)}, arc});
  return out;
}

// Cancel the nested pair formed by the node at `outer` (in `strip`) and its
// child at `child`.  When the outer node is a root, `across` names the
// essential curve the arc exits through (it must bound the host strip) and
// the outer node's remaining children are rehomed to the strip on the other
// side; for deeper pairs the enclosing curve is the outer node's parent and
// `across` is ignored.
inline TorusDividingSet op_IV_cancel_nested(const TorusDividingSet& ds,
                                            std::size_t strip,
                                            const NodePath& outer,
                                            std::size_t child,
                                            std::size_t across,
                                            Trace* trace = nullptr) {
  const DividingNode* po = detail::try_node(ds, strip, outer);
  if (!po || child >= po->children.size())
    throw ConfigurationAbsent("no nested pair at the given position");
  NodePath inner = outer;
  inner.push_back(child);
  CurveRef third = outer.size() == 1
                       ? CurveRef::essential(across)
                       : CurveRef::contractible(
                             strip, NodePath(outer.begin(), outer.end() - 1));
  BypassArc arc{{CurveRef::contractible(strip, inner),
                 CurveRef::contractible(strip, outer), third},
                BypassSide::Front};
  TorusDividingSet out = bypass_attach(ds, arc);
  if (trace) {
    std::vector<std::int64_t> args = {static_cast<std::int64_t>(strip),
                                      static_cast<std::int64_t>(child),
                                      static_cast<std::int64_t>(across)};
    for (std::size_t p : outer) args.push_back(static_cast<std::int64_t>(p));
    trace->push_back({"op_IV_cancel_nested", args, arc});
  }
  return out;
}

// Move the leaf root at (strip, idx) to the adjacent strip of the same sign
// (two steps away), by creating a cancelling pair there and cancelling the
// mover against the half of it next door.  One hop = one create + one cancel.
inline TorusDividingSet transport_root(const TorusDividingSet& ds,
                                       std::size_t strip, std::size_t idx,
                                       bool downward,
                                       Trace* trace = nullptr) {
  const std::size_t n = ds.curve_count();
  if (strip >= n || idx >= ds.strips[strip].size() ||
      !ds.strips[strip][idx].children.empty())
    throw ConfigurationAbsent("no leaf root at the given position");
  TorusDividingSet out = ds;
  if (downward) {
    std::size_t c_create = (strip + n - 1) % n;  // pair lands in j-2 and j-1
    out = op_I_create(out, c_create, trace);
    std::size_t mate = out.strips[c_create].size() - 1;  // strip j-1
    out = op_II_cancel(out, strip, mate, idx, trace);
  } else {
    std::size_t c_create = (strip + 2) % n;  // pair lands in j+1 and j+2
    out = op_I_create(out, c_create, trace);
    std::size_t mate = out.strips[(strip + 1) % n].size() - 1;
    out = op_II_cancel(out, (strip + 1) % n, idx, mate, trace);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Normalization: reduce a balanced dividing set to essential curves only.
// Phase A removes nested pairs innermost-first; phase B transports the
// remaining leaf roots into the adjacent strips 0 and 1; phase C cancels
// them pairwise across curve 1.  Deterministic: strips ascending, roots in
// order, depth-first.
// ---------------------------------------------------------------------------
struct NormalizeResult {
  TorusDividingSet result;
  Trace trace;
  std::int64_t transport_hops = 0;
};

inline NormalizeResult normalize(const TorusDividingSet& ds0) {
  if (relative_euler(ds0) != 0)
    throw EulerObstruction(
        "normalize needs a balanced dividing set (relative Euler number 0), "
        "got " +
        std::to_string(relative_euler(ds0)));
  NormalizeResult r{ds0, {}, 0};
  TorusDividingSet& ds = r.result;
  const std::size_t n = ds.curve_count();

  // Phase A: cancel nested pairs, deepest-first along leftmost paths.
  for (;;) {
    std::size_t s = n, ri = 0;
    for (std::size_t i = 0; i < n && s == n; ++i)
      for (std::size_t j = 0; j < ds.strips[i].size(); ++j)
        if (!ds.strips[i][j].children.empty()) {
          s = i;
          ri = j;
          break;
        }
    if (s == n) break;
    NodePath outer{ri};
    const DividingNode* node = &ds.strips[s][ri];
    while (!node->children[0].children.empty()) {
      outer.push_back(0);
      node = &node->children[0];
    }
    ds = op_IV_cancel_nested(ds, s, outer, 0, (s + 1) % n, &r.trace);
  }

  // Phase B: gather roots bounding positive disks into strip 1 and roots
  // bounding negative disks into strip 0, by the shorter way around (ties
  // go downward).
  for (std::size_t s = 2; s < n; ++s) {
    while (!ds.strips[s].empty()) {
      std::size_t cur = s;
      const std::size_t target = s % 2;
      std::size_t idx = 0;
      while (cur != target) {
        std::size_t down = ((cur - target + n) % n) / 2;
        std::size_t up = ((target - cur + n) % n) / 2;
        bool go_down = down <= up;
        ds = transport_root(ds, cur, idx, go_down, &r.trace);
        ++r.transport_hops;
        cur = go_down ? (cur + n - 2) % n : (cur + 2) % n;
        idx = ds.strips[cur].size() - 1;
      }
    }
  }

  // Phase C: equal stacks of opposite leaves cancel across curve 1.
  if (ds.strips[0].size() != ds.strips[1].size())
    throw std::logic_error("normalize phases desynchronized the leaf stacks");
  while (!ds.strips[1].empty()) ds = op_II_cancel(ds, 1, 0, 0, &r.trace);
  return r;
}

// Re-apply a recorded trace to a starting dividing set.
inline TorusDividingSet replay(const TorusDividingSet& ds0,
                               const Trace& trace) {
  TorusDividingSet ds = ds0;
  for (const MacroApplication& m : trace) {
    const auto& a = m.args;
    if (m.name == "op_I_create") {
      ds = op_I_create(ds, static_cast<std::size_t>(a.at(0)));
    } else if (m.name == "op_II_cancel") {
      ds = op_II_cancel(ds, static_cast<std::size_t>(a.at(0)),
                        static_cast<std::size_t>(a.at(1)),
                        static_cast<std::size_t>(a.at(2)));
    } else if (m.name == "op_III") {
      ds = op_III(ds, static_cast<std::size_t>(a.at(0)));
    } else if (m.name == "op_IV_cancel_nested") {
      NodePath outer;
      for (std::size_t i = 3; i < a.size(); ++i)
        outer.push_back(static_cast<std::size_t>(a[i]));
      ds = op_IV_cancel_nested(ds, static_cast<std::size_t>(a.at(0)), outer,
                               static_cast<std::size_t>(a.at(1)),
                               static_cast<std::size_t>(a.at(2)));
    } else {
      throw std::invalid_argument("unknown macro in trace: " + m.name);
    }
  }
  return ds;
}

}  // namespace cscalc
