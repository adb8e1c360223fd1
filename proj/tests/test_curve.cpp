#include <doctest.h>

#include "curvekit/curve.hpp"

using namespace curvekit;

namespace {
Weights from_pairs(const Chart& c,
                   std::initializer_list<std::pair<const char*, int>> ps) {
  Weights w(c.num_edges());
  for (const auto& [name, k] : ps) w[c.find_edge(name)] = k;
  return w;
}
}  // namespace

TEST_CASE("edge link curve has the expected weights") {
  Chart c = charts::bipyramid();
  Weights g0 = edge_link_curve(c, c.find_edge("E0"));
  Weights expect = from_pairs(
      c, {{"E1", 1}, {"E4", 1}, {"N0", 1}, {"N1", 1}, {"S0", 1}, {"S1", 1}});
  CHECK(g0 == expect);
  CHECK(admissible(c, g0));
  CHECK(is_tight(c, g0));
  CHECK(g0.total() == 6);
}

TEST_CASE("rotation permutes edge links") {
  Chart c = charts::bipyramid();
  ChartMap rho = charts::bipyramid_rotation(c, 2);
  Weights g0 = edge_link_curve(c, c.find_edge("E0"));
  Weights g1 = apply_map(rho, g0);
  CHECK(g1 == edge_link_curve(c, c.find_edge("E2")));
  Weights g2 = apply_map(rho, g1);
  CHECK(g2 == edge_link_curve(c, c.find_edge("E4")));
}

TEST_CASE("pole tightening reroutes a long chord") {
  Chart c = charts::bipyramid();
  // The curve around p0, p1 with its north journey pushed the long way
  // around the pole: crosses N2, N3, N4 instead of N0, N1.
  Weights longw = from_pairs(
      c, {{"E1", 1}, {"E4", 1}, {"N2", 1}, {"N3", 1}, {"N4", 1}, {"S0", 1}, {"S1", 1}});
  CHECK(admissible(c, longw));
  CHECK(!is_tight(c, longw));
  Weights w = longw;
  CHECK(pole_tighten(c, w));
  CHECK(w == edge_link_curve(c, c.find_edge("E0")));
}

TEST_CASE("pole tightening deletes vertex-linking circles") {
  Chart c = charts::bipyramid();
  Weights w = from_pairs(c, {{"N0", 1}, {"N1", 1}, {"N2", 1}, {"N3", 1}, {"N4", 1}});
  CHECK(admissible(c, w));
  CHECK(pole_tighten(c, w));
  CHECK(w.is_zero());
}

TEST_CASE("puncture links are admissible and tight") {
  Chart c = charts::bipyramid();
  for (VertexId v = 0; v < 5; ++v) {
    Weights w = puncture_link(c, v);
    CHECK(admissible(c, w));
    CHECK(is_tight(c, w));
    CHECK(w.total() == 4);
  }
}

TEST_CASE("tightening is rotation equivariant") {
  Chart c = charts::bipyramid();
  ChartMap rho = charts::bipyramid_rotation(c, 1);
  Weights longw = from_pairs(
      c, {{"E1", 1}, {"E4", 1}, {"N2", 1}, {"N3", 1}, {"N4", 1}, {"S0", 1}, {"S1", 1}});
  Weights a = longw;
  pole_tighten(c, a);
  a = apply_map(rho, a);
  Weights b = apply_map(rho, longw);
  pole_tighten(c, b);
  CHECK(a == b);
}
