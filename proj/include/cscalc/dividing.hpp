#pragma once

// Combinatorial dividing sets on a convex torus.
//
// A dividing set is an even number (2 * essential_pairs) of parallel
// essential curves of a common slope, plus disjoint contractible curves.
// The essential curves cut the torus into 2k annular strips of alternating
// sign; contractible curves nest inside strips, and every curve separates
// regions of opposite sign, so the sign of each disk is forced by its
// nesting depth and host strip.  Only signs, nesting and strip placement
// matter to the rewrite rules, so contractibles are carried as an ordered
// signed forest per strip and never as embedded coordinates.
//
// Indexing conventions used throughout: curves and strips are numbered
// 0..2k-1 cyclically, strip i lies between curve i and curve i+1 (mod 2k),
// and strip 0 is positive.

#include <cstdint>
#include <string>
#include <vector>

#include "cscalc/errors.hpp"
#include "cscalc/slope.hpp"

namespace cscalc {

// Sign of strip i under the alternating convention.
inline int strip_sign(std::size_t strip) { return strip % 2 == 0 ? +1 : -1; }

struct DividingNode {
  int sign = +1;  // sign of the disk region this curve bounds
  std::vector<DividingNode> children;

  friend bool operator==(const DividingNode& a, const DividingNode& b) {
    return a.sign == b.sign && a.children == b.children;
  }
};

using DividingForest = std::vector<DividingNode>;

// Path to a node inside one strip: root index, then child indices.
using NodePath = std::vector<std::size_t>;

struct RegionEuler {
  std::int64_t chi_plus = 0;
  std::int64_t chi_minus = 0;

  friend bool operator==(const RegionEuler& a, const RegionEuler& b) {
    return a.chi_plus == b.chi_plus && a.chi_minus == b.chi_minus;
  }
};

struct TorusDividingSet {
  std::int64_t essential_pairs = 1;
  Slope essential_slope = Slope::zero();
  std::vector<DividingForest> strips;  // size 2 * essential_pairs

  TorusDividingSet() : strips(2) {}
  TorusDividingSet(std::int64_t pairs, Slope slope)
      : essential_pairs(pairs),
        essential_slope(slope),
        strips(static_cast<std::size_t>(2 * pairs)) {
    if (pairs < 1)
      throw std::invalid_argument("dividing set needs at least one pair");
  }

  std::size_t curve_count() const { return strips.size(); }

  friend bool operator==(const TorusDividingSet& a, const TorusDividingSet& b) {
    return a.essential_pairs == b.essential_pairs &&
           a.essential_slope == b.essential_slope && a.strips == b.strips;
  }
  friend bool operator!=(const TorusDividingSet& a, const TorusDividingSet& b) {
    return !(a == b);
  }

  const DividingNode& node_at(std::size_t strip, const NodePath& path) const {
    if (strip >= strips.size() || path.empty() ||
        path[0] >= strips[strip].size())
      throw std::invalid_argument("node path out of range");
    const DividingNode* n = &strips[strip][path[0]];
    for (std::size_t i = 1; i < path.size(); ++i) {
      if (path[i] >= n->children.size())
        throw std::invalid_argument("node path out of range");
      n = &n->children[path[i]];
    }
    return *n;
  }
  DividingNode& node_at(std::size_t strip, const NodePath& path) {
    return const_cast<DividingNode&>(
        static_cast<const TorusDividingSet&>(*this).node_at(strip, path));
  }
};

namespace detail {

inline void validate_node(const DividingNode& n, int enclosing_sign) {
  if (n.sign != +1 && n.sign != -1)
    throw std::invalid_argument("dividing node sign must be +-1");
  if (n.sign != -enclosing_sign)
    throw std::invalid_argument(
        "dividing curve must bound a disk of sign opposite to its "
        "enclosing region");
  for (const DividingNode& c : n.children) validate_node(c, n.sign);
}

template <typename F>
void walk_nodes(const DividingNode& n, F&& f) {
  f(n);
  for (const DividingNode& c : n.children) walk_nodes(c, f);
}

inline std::int64_t count_nodes(const DividingNode& n) {
  std::int64_t total = 1;
  for (const DividingNode& c : n.children) total += count_nodes(c);
  return total;
}

}  // namespace detail

inline void validate(const TorusDividingSet& ds) {
  if (ds.essential_pairs < 1)
    throw std::invalid_argument("dividing set needs at least one pair");
  if (ds.strips.size() != static_cast<std::size_t>(2 * ds.essential_pairs))
    throw std::invalid_argument("strip count must equal curve count");
  for (std::size_t i = 0; i < ds.strips.size(); ++i)
    for (const DividingNode& root : ds.strips[i])
      detail::validate_node(root, strip_sign(i));
}

inline std::int64_t contractible_count(const TorusDividingSet& ds) {
  std::int64_t total = 0;
  for (const DividingForest& f : ds.strips)
    for (const DividingNode& r : f) total += detail::count_nodes(r);
  return total;
}

// Euler characteristics of the positive and negative complementary regions.
// Each node's region (its disk minus its children's disks) is a disk with
// holes, chi = 1 - #children; each strip minus its root disks is an annulus
// with holes, chi = -#roots.
inline RegionEuler region_euler(const TorusDividingSet& ds) {
  RegionEuler e;
  auto bump = [&e](int sign, std::int64_t amount) {
    (sign > 0 ? e.chi_plus : e.chi_minus) += amount;
  };
  for (std::size_t i = 0; i < ds.strips.size(); ++i) {
    bump(strip_sign(i), -static_cast<std::int64_t>(ds.strips[i].size()));
    for (const DividingNode& root : ds.strips[i])
      detail::walk_nodes(root, [&](const DividingNode& n) {
        bump(n.sign, 1 - static_cast<std::int64_t>(n.children.size()));
      });
  }
  return e;
}

inline std::int64_t relative_euler(const TorusDividingSet& ds) {
  RegionEuler e = region_euler(ds);
  return e.chi_plus - e.chi_minus;
}

// A contractible dividing curve on a torus makes the germ of contact
// structure around it overtwisted (the sphere exception cannot arise here).
inline bool giroux_overtwisted(const TorusDividingSet& ds) {
  for (const DividingForest& f : ds.strips)
    if (!f.empty()) return true;
  return false;
}

// Canonical text form: DS(pairs=k, slope=p/q, forest=[[...],[...],...]) with
// one bracket group per strip and nodes written as +/-(children).
namespace detail {

inline void node_text(const DividingNode& n, std::string& out) {
  out += n.sign > 0 ? '+' : '-';
  if (!n.children.empty()) {
    out += '(';
    for (std::size_t i = 0; i < n.children.size(); ++i) {
      if (i) out += ',';
      node_text(n.children[i], out);
    }
    out += ')';
  }
}

}  // namespace detail

inline std::string canonical_text(const TorusDividingSet& ds) {
  std::string out = "DS(pairs=" + std::to_string(ds.essential_pairs) +
                    ", slope=" + ds.essential_slope.str() + ", forest=[";
  for (std::size_t i = 0; i < ds.strips.size(); ++i) {
    if (i) out += ',';
    out += '[';
    for (std::size_t j = 0; j < ds.strips[i].size(); ++j) {
      if (j) out += ',';
      detail::node_text(ds.strips[i][j], out);
    }
    out += ']';
  }
  out += "])";
  return out;
}

// Convenience builders used heavily by tests and the adjustment routines: a
// leaf bounding a disk of the sign forced by the host strip, and a nested
// root-plus-child pair.
inline DividingNode leaf_for_strip(std::size_t strip) {
  return DividingNode{-strip_sign(strip), {}};
}

inline DividingNode nested_pair_for_strip(std::size_t strip) {
  DividingNode root = leaf_for_strip(strip);
  root.children.push_back(DividingNode{strip_sign(strip), {}});
  return root;
}

}  // namespace cscalc
