#pragma once

// Deterministic diagram emitters for torus dividing sets.
//
// Both formats draw the flattened fundamental square of the torus.  Essential
// dividing curves are straight lines of the dividing slope, evenly offset;
// each strip's contractible forest is drawn as nested rings packed along the
// strip's centerline.  The output depends only on the input dividing set, so
// diagrams can be frozen as golden files.
//
// The ascii grid is 41x41: 41 is prime, so for every reduced slope p/q with
// |p|, |q| <= 40 the lattice line {(t*q, c + t*p) mod 41} visits each column
// (or row) exactly once, and distinct reduced slopes of height up to 40 stay
// visually distinct.  Slopes beyond the grid resolution are refused in ascii
// mode only.
//
// The svg output is a 410x410 viewBox (ten units per ascii cell), draws the
// essential curves as wrapped line segments and the contractible rings as
// circles, and is valid standalone SVG 1.1.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "cscalc/dividing.hpp"
#include "cscalc/errors.hpp"
#include "cscalc/slope.hpp"

namespace cscalc {

enum class RenderFormat { Ascii, Svg };

namespace render_detail {

constexpr int kGrid = 41;  // prime; see header comment

inline int mod_grid(std::int64_t v) {
  int m = static_cast<int>(v % kGrid);
  return m < 0 ? m + kGrid : m;
}

// Modular inverse in Z/41 by exhaustion (the modulus is tiny and prime).
inline int inverse_mod_grid(int v) {
  v = mod_grid(v);
  for (int i = 1; i < kGrid; ++i)
    if (mod_grid(static_cast<std::int64_t>(v) * i) == 1) return i;
  throw std::logic_error("no inverse modulo the render grid");
}

// Chebyshev half-width of the ring drawn for a node: a leaf is a 3x3 ring,
// a parent wraps its children with one cell of clearance.
inline int ring_radius(const DividingNode& n) {
  if (n.children.empty()) return 1;
  int width = 0;
  int tallest = 0;
  for (const DividingNode& c : n.children) {
    int r = ring_radius(c);
    width += 2 * r + 1 + 1;  // ring plus a one-cell gap
    if (r > tallest) tallest = r;
  }
  width -= 1;  // no gap after the last child
  int half = (width + 2 + 1) / 2;
  int vertical = tallest + 2;
  return half > vertical ? half : vertical;
}

// A placed ring: center cell and half-width.
struct PlacedRing {
  int cx = 0;
  int cy = 0;
  int r = 1;
};

inline void place_node(const DividingNode& n, int cx, int cy,
                       std::vector<PlacedRing>& out) {
  int r = ring_radius(n);
  out.push_back(PlacedRing{cx, cy, r});
  int width = 0;
  for (const DividingNode& c : n.children) width += 2 * ring_radius(c) + 2;
  width -= 1;
  int x = cx - (width - 1) / 2;
  for (const DividingNode& c : n.children) {
    int cr = ring_radius(c);
    place_node(c, x + cr, cy, out);
    x += 2 * cr + 2;
  }
}

// Lay out one strip's forest along its centerline, anchored at the left.
inline std::vector<PlacedRing> place_forest(const DividingForest& forest) {
  std::vector<PlacedRing> out;
  int x = 2;
  for (const DividingNode& n : forest) {
    int r = ring_radius(n);
    place_node(n, x + r, 0, out);  // cy filled in by the caller
    x += 2 * r + 2;
  }
  return out;
}

}  // namespace render_detail

// ---------------------------------------------------------------------------
// Ascii rendering: '*' essential curve cells, 'o' contractible rings, '.'
// background.  Rows are printed top to bottom with the torus y-coordinate
// increasing upward, so the printed bottom row is y = 0.
// ---------------------------------------------------------------------------
inline std::string render_ascii(const TorusDividingSet& ds) {
  using namespace render_detail;
  validate(ds);
  const Slope s = ds.essential_slope;
  if (s.p > 40 || s.p < -40 || s.q > 40)
    throw UnsupportedSlope("slope " + s.str() +
                           " exceeds the 41x41 ascii grid resolution");

  std::vector<std::string> grid(kGrid, std::string(kGrid, '.'));
  const int curves = static_cast<int>(2 * ds.essential_pairs);
  const bool vertical = s.is_infinite();
  const int pq_inv = vertical ? 0 : inverse_mod_grid(static_cast<int>(s.q));

  // curve j passes through offset c_j; strips sit between consecutive curves
  std::vector<int> offset(static_cast<std::size_t>(curves) + 1, 0);
  for (int j = 0; j <= curves; ++j)
    offset[static_cast<std::size_t>(j)] = j * kGrid / curves;

  auto line_at = [&](int c, int t) {
    // cell of curve-with-offset-c at lattice parameter t
    if (vertical) return std::pair<int, int>(mod_grid(c), mod_grid(t));
    int x = t;
    int y = mod_grid(c + static_cast<std::int64_t>(s.p) * pq_inv * x);
    return std::pair<int, int>(x, y);
  };

  for (int j = 0; j < curves; ++j)
    for (int t = 0; t < kGrid; ++t) {
      auto [x, y] = line_at(offset[static_cast<std::size_t>(j)], t);
      grid[static_cast<std::size_t>(y)][static_cast<std::size_t>(x)] = '*';
    }

  // contractible forests: rings along the centerline of their strip
  for (std::size_t strip = 0; strip < ds.strips.size(); ++strip) {
    if (ds.strips[strip].empty()) continue;
    int c_mid = (offset[strip] + offset[strip + 1]) / 2;
    for (const PlacedRing& ring :
         place_forest(ds.strips[strip])) {
      // anchor the ring on the strip: walk the strip line to the ring's
      // lattice parameter, then offset perpendicular-ish by ring.cy (zero)
      auto [ax, ay] = line_at(c_mid, ring.cx);
      for (int dy = -ring.r; dy <= ring.r; ++dy)
        for (int dx = -ring.r; dx <= ring.r; ++dx) {
          if (dx != -ring.r && dx != ring.r && dy != -ring.r && dy != ring.r)
            continue;  // ring boundary only
          int gx = mod_grid(ax + dx);
          int gy = mod_grid(ay + dy);
          grid[static_cast<std::size_t>(gy)][static_cast<std::size_t>(gx)] =
              'o';
        }
    }
  }

  std::string out;
  out.reserve(static_cast<std::size_t>(kGrid) * (kGrid + 1));
  for (int y = kGrid - 1; y >= 0; --y) {
    out += grid[static_cast<std::size_t>(y)];
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// SVG rendering: the same picture in a 410x410 viewBox.
// ---------------------------------------------------------------------------
inline std::string render_svg(const TorusDividingSet& ds) {
  using namespace render_detail;
  validate(ds);
  const Slope s = ds.essential_slope;
  if (s.p > 40 || s.p < -40 || s.q > 40)
    throw UnsupportedSlope("slope " + s.str() +
                           " does not fit the 41x41 drawing grid");
  const double size = 410.0;
  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out +=
      "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" "
      "viewBox=\"0 0 410 410\">\n";
  out +=
      "  <rect x=\"0\" y=\"0\" width=\"410\" height=\"410\" fill=\"white\" "
      "stroke=\"black\"/>\n";

  auto fmt = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };
  auto emit_segment = [&](double x0, double y0, double x1, double y1) {
    // torus y grows upward; svg y grows downward
    out += "  <line x1=\"" + fmt(x0 * size) + "\" y1=\"" +
           fmt(size - y0 * size) + "\" x2=\"" + fmt(x1 * size) + "\" y2=\"" +
           fmt(size - y1 * size) + "\" stroke=\"black\"/>\n";
  };

  const int curves = static_cast<int>(2 * ds.essential_pairs);
  for (int j = 0; j < curves; ++j) {
    double c = static_cast<double>(j) / curves;
    if (s.is_infinite()) {
      emit_segment(c, 0.0, c, 1.0);
      continue;
    }
    if (s.p == 0) {
      emit_segment(0.0, c, 1.0, c);
      continue;
    }
    // y = c + (p/q) x (mod 1): split [0,1] in x at the wrap points
    double slope_v = static_cast<double>(s.p) / static_cast<double>(s.q);
    double x = 0.0;
    double y = c;
    while (x < 1.0 - 1e-12) {
      // next wrap: y reaches the ceiling (slope>0) or the floor (slope<0)
      double target = slope_v > 0 ? 1.0 : 0.0;
      double xw = x + (target - y) / slope_v;
      double xe = xw < 1.0 ? xw : 1.0;
      double ye = y + slope_v * (xe - x);
      emit_segment(x, y, xe, ye);
      x = xe;
      y = slope_v > 0 ? 0.0 : 1.0;  // re-enter from the opposite edge
      if (xe >= 1.0) break;
    }
  }

  const double cell = size / kGrid;
  std::vector<double> offset(static_cast<std::size_t>(curves) + 1, 0.0);
  for (int j = 0; j <= curves; ++j)
    offset[static_cast<std::size_t>(j)] =
        static_cast<double>(j) / curves;
  for (std::size_t strip = 0; strip < ds.strips.size(); ++strip) {
    if (ds.strips[strip].empty()) continue;
    double c_mid = (offset[strip] + offset[strip + 1]) / 2.0;
    for (const PlacedRing& ring : place_forest(ds.strips[strip])) {
      double ax = (ring.cx + 0.5) / kGrid;
      double ay;
      if (s.is_infinite()) {
        ay = ax;
        ax = c_mid;
      } else {
        double slope_v =
            static_cast<double>(s.p) / static_cast<double>(s.q);
        ay = c_mid + slope_v * ax;
        ay -= std::floor(ay);
      }
      out += "  <circle cx=\"" + fmt(ax * size) + "\" cy=\"" +
             fmt(size - ay * size) + "\" r=\"" + fmt(ring.r * cell) +
             "\" fill=\"none\" stroke=\"black\"/>\n";
    }
  }
  out += "</svg>\n";
  return out;
}

inline std::string render_dividing_set(const TorusDividingSet& ds,
                                       RenderFormat format) {
  return format == RenderFormat::Ascii ? render_ascii(ds) : render_svg(ds);
}

}  // namespace cscalc
