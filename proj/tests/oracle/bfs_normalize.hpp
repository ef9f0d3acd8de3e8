#pragma once

// Exhaustive breadth-first search over the cancelling fragment of the macro
// rewrite system.  Starting from a dividing set, it explores every sequence
// of pair cancellations, nested-pair cancellations, and single transport
// hops, and reports whether a state free of contractible curves is reachable
// and in how few moves.  This is the reference the normalization routine is
// judged against: the strategy under test must succeed exactly when the
// search finds the essential-only state reachable, and must land on the same
// state.
//
// Curve-increasing macros (pair insertion, nested-pair insertion) are not
// explored on their own: inserting curves only ever helps as the first half
// of a transport hop, and hops are included as single composite moves, so
// the omission cannot turn a reachable goal unreachable.

#include <cstdint>
#include <deque>
#include <map>
#include <string>
#include <vector>

#include "cscalc/bypass.hpp"
#include "cscalc/dividing.hpp"

namespace oracle {

struct SearchOutcome {
  bool reachable = false;
  std::size_t shortest = 0;  // fewest moves to an essential-only state
  std::size_t explored = 0;  // distinct states visited
};

namespace detail {

inline void collect_paths(const cscalc::DividingForest& forest,
                          cscalc::NodePath& prefix,
                          std::vector<cscalc::NodePath>& out) {
  for (std::size_t i = 0; i < forest.size(); ++i) {
    prefix.push_back(i);
    out.push_back(prefix);
    collect_paths(forest[i].children, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace detail

// Every state one cancelling move away from `ds`.
inline std::vector<cscalc::TorusDividingSet> rewrite_successors(
    const cscalc::TorusDividingSet& ds) {
  using cscalc::TorusDividingSet;
  std::vector<TorusDividingSet> out;
  const std::size_t n = ds.curve_count();

  // Pair cancellations: leaf roots on both sides of any essential curve.
  for (std::size_t c = 0; c < n; ++c) {
    const std::size_t sb = (c + n - 1) % n;
    for (std::size_t below = 0; below < ds.strips[sb].size(); ++below) {
      if (!ds.strips[sb][below].children.empty()) continue;
      for (std::size_t above = 0; above < ds.strips[c].size(); ++above) {
        if (!ds.strips[c][above].children.empty()) continue;
        out.push_back(cscalc::op_II_cancel(ds, c, below, above));
      }
    }
  }

  // Nested-pair cancellations: every (node, child) pair; for roots both
  // bounding curves are legal exits, for deeper nodes the exit is forced.
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<cscalc::NodePath> paths;
    cscalc::NodePath prefix;
    detail::collect_paths(ds.strips[s], prefix, paths);
    for (const cscalc::NodePath& outer : paths) {
      const cscalc::DividingNode* node = &ds.strips[s][outer[0]];
      for (std::size_t i = 1; i < outer.size(); ++i)
        node = &node->children[outer[i]];
      for (std::size_t child = 0; child < node->children.size(); ++child) {
        if (outer.size() == 1) {
          out.push_back(cscalc::op_IV_cancel_nested(ds, s, outer, child, s));
          out.push_back(
              cscalc::op_IV_cancel_nested(ds, s, outer, child, (s + 1) % n));
        } else {
          out.push_back(cscalc::op_IV_cancel_nested(ds, s, outer, child, 0));
        }
      }
    }
  }

  // Transport hops: every leaf root, both ways around.
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t idx = 0; idx < ds.strips[s].size(); ++idx) {
      if (!ds.strips[s][idx].children.empty()) continue;
      out.push_back(cscalc::transport_root(ds, s, idx, true));
      out.push_back(cscalc::transport_root(ds, s, idx, false));
    }

  return out;
}

// Breadth-first reachability of a contractible-free state.
inline SearchOutcome search_essential_only(
    const cscalc::TorusDividingSet& start, std::size_t state_cap = 200000) {
  SearchOutcome res;
  std::map<std::string, std::size_t> dist;
  std::deque<cscalc::TorusDividingSet> queue;
  dist[canonical_text(start)] = 0;
  queue.push_back(start);
  while (!queue.empty()) {
    cscalc::TorusDividingSet cur = std::move(queue.front());
    queue.pop_front();
    const std::size_t d = dist.at(canonical_text(cur));
    if (contractible_count(cur) == 0) {
      res.reachable = true;
      res.shortest = d;
      res.explored = dist.size();
      return res;
    }
    for (cscalc::TorusDividingSet& next : rewrite_successors(cur)) {
      std::string key = canonical_text(next);
      if (dist.count(key)) continue;
      if (dist.size() >= state_cap)
        throw std::runtime_error("rewrite search exceeded the state cap");
      dist.emplace(std::move(key), d + 1);
      queue.push_back(std::move(next));
    }
  }
  res.explored = dist.size();
  return res;
}

}  // namespace oracle
