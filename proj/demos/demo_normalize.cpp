// Walks a cluttered torus dividing set through its normalization, rendering
// the picture after every rewrite step.  The essential curves are the two
// horizontal slope-0 lines; 'o' rings are contractible circles that the
// rewrite system removes pair by pair.

#include <iostream>
#include <string>

#include "cscalc/bypass.hpp"
#include "cscalc/render.hpp"

using namespace cscalc;

namespace {

std::string step_text(const MacroApplication& m) {
  std::string out = m.name + "(";
  for (std::size_t i = 0; i < m.args.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(m.args[i]);
  }
  return out + ")";
}

void frame(int k, const std::string& what, const TorusDividingSet& ds) {
  std::cout << "--- frame " << k << ": " << what << " ---\n"
            << render_ascii(ds);
}

}  // namespace

int main() {
  TorusDividingSet ds(1, Slope::zero());
  // Two nested circle pairs in the positive strip, one in the negative strip:
  // six contractible curves in all, with balanced complementary regions.
  DividingNode plus_leaf{+1, {}};
  DividingNode minus_leaf{-1, {}};
  ds.strips[0] = {DividingNode{-1, {plus_leaf}}, DividingNode{-1, {plus_leaf}}};
  ds.strips[1] = {DividingNode{+1, {minus_leaf}}};
  validate(ds);

  std::cout << "initial state: " << canonical_text(ds) << "\n"
            << "contractible curves: " << contractible_count(ds) << "\n\n";
  frame(0, "before normalization", ds);

  NormalizeResult nr = normalize(ds);
  for (std::size_t k = 0; k < nr.trace.size(); ++k) {
    Trace prefix(nr.trace.begin(),
                 nr.trace.begin() + static_cast<std::ptrdiff_t>(k) + 1);
    TorusDividingSet after = replay(ds, prefix);
    std::cout << "\nstep " << k + 1 << ": " << step_text(nr.trace[k]) << "\n";
    frame(static_cast<int>(k) + 1, "after " + step_text(nr.trace[k]), after);
  }

  std::cout << "\nnormalized: " << canonical_text(nr.result) << "\n"
            << "essential-only: " << (giroux_overtwisted(nr.result) ? "no"
                                                                    : "yes")
            << "\nrewrite steps: " << nr.trace.size()
            << ", transport hops: " << nr.transport_hops << "\n";
  return 0;
}
