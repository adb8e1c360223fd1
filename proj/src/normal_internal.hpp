#pragma once

#include <array>
#include <limits>
#include <string>
#include <vector>

#include "curvekit/bigint.hpp"
#include "curvekit/chart.hpp"
#include "curvekit/curve.hpp"

// Low-level helpers shared by the unit-multiplicity walker (tracer.cpp) and
// the compressed engine (overlay.cpp, twist.cpp).  Everything here works in
// the corner-coordinate picture: strands cross a triangle as chords cutting
// off one corner, and positions along an edge are indexed from its 'a'
// endpoint.

namespace curvekit {
namespace internal {

inline long long as_ll(const Int& v, const char* what) {
  CK_CHECK(v >= 0 && v <= Int(std::numeric_limits<long long>::max() / 4),
           std::string("unit walker overflow: ") + what);
  return v.convert_to<long long>();
}

// Side of t carrying edge e; charts fed to the walkers may not repeat an
// edge inside one triangle.
inline int side_with_edge(const Chart& c, TriId t, EdgeId e) {
  int found = -1;
  for (int k = 0; k < 3; ++k) {
    if (c.triangles[t].e[k] == e) {
      CK_CHECK(found < 0, "triangle repeats an edge");
      found = k;
    }
  }
  CK_CHECK(found >= 0, "segment triangle does not contain its edge");
  return found;
}

inline bool side_forward(const Chart& c, TriId t, int k) {
  EdgeId e = c.triangles[t].e[k];
  for (const auto& s : c.sides_of(e))
    if (s.tri == t && s.side == k) return s.forward;
  CK_CHECK(false, "side not registered on its edge");
  return true;
}

// Triangle on the left of the edge oriented a -> b (the side traversing it
// forwards; triangles are positively oriented).
inline TriId left_tri(const Chart& c, EdgeId e) {
  const auto& two = c.sides_of(e);
  return two[0].forward ? two[0].tri : two[1].tri;
}

// ---------------------------------------------------------------------------
// Unit walk of one weight system: from corner counts to explicit words.

struct UnitWord {
  std::vector<EdgeId> edges;   // edge of each strand point, in order
  std::vector<long long> pos;  // index of that point along its edge, from a
  std::vector<TriId> tri;      // triangle of the chord leaving point i
};

inline std::vector<UnitWord> walk_units(const Chart& c, const Weights& w) {
  const int E = c.num_edges(), T = c.num_triangles();
  std::vector<long long> cnt(E);
  long long total = 0;
  for (int e = 0; e < E; ++e) {
    cnt[e] = as_ll(w[e], "edge weight");
    total += cnt[e];
  }
  std::vector<std::array<long long, 3>> cc(T);
  for (TriId t = 0; t < T; ++t)
    for (int k = 0; k < 3; ++k)
      cc[t][k] = as_ll(corner_count(c, w, t, k), "corner count");

  std::vector<long long> base(E, 0);
  for (int e = 1; e < E; ++e) base[e] = base[e - 1] + cnt[e - 1];
  auto pid = [&](EdgeId e, long long g) { return base[e] + g; };

  std::vector<char> visited(total, 0);
  std::vector<UnitWord> out;
  for (EdgeId e0 = 0; e0 < E; ++e0) {
    for (long long g0 = 0; g0 < cnt[e0]; ++g0) {
      if (visited[pid(e0, g0)]) continue;
      UnitWord word;
      EdgeId e = e0;
      long long g = g0;
      TriId t = c.sides_of(e0)[0].tri;
      do {
        visited[pid(e, g)] = 1;
        word.edges.push_back(e);
        word.pos.push_back(g);
        word.tri.push_back(t);
        // chords in t pair boundary points around its corners
        int k = side_with_edge(c, t, e);
        long long p = side_forward(c, t, k) ? g : cnt[e] - 1 - g;
        int k2;
        long long p2;
        if (p < cc[t][k]) {  // chord cuts off corner k
          k2 = (k + 2) % 3;
          p2 = cnt[c.triangles[t].e[k2]] - 1 - p;
        } else {  // chord cuts off corner k+1
          k2 = (k + 1) % 3;
          p2 = cnt[e] - 1 - p;
        }
        EdgeId e2 = c.triangles[t].e[k2];
        long long g2 = side_forward(c, t, k2) ? p2 : cnt[e2] - 1 - p2;
        CK_CHECK(g2 >= 0 && g2 < cnt[e2], "walk left the edge");
        SideRef nb = c.neighbor(t, k2);
        e = e2;
        g = g2;
        t = nb.tri;
      } while (!(e == e0 && g == g0 && t == c.sides_of(e0)[0].tri));
      out.push_back(std::move(word));
    }
  }
  return out;
}

}  // namespace internal
}  // namespace curvekit
