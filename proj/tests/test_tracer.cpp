#include <doctest.h>

#include <vector>

#include "curvekit/curve.hpp"
#include "curvekit/tracer.hpp"

using namespace curvekit;

namespace {

struct Fix {
  Chart c = charts::bipyramid();
  Weights g0, g1, g2, g3, g4;
  Fix() {
    g0 = edge_link_curve(c, c.find_edge("E0"));
    ChartMap rho = charts::bipyramid_rotation(c, 2);
    g1 = apply_map(rho, g0);
    g2 = apply_map(rho, g1);
    g3 = apply_map(rho, g2);
    g4 = apply_map(rho, g3);
  }
};

long long region_sum(const std::vector<RegionInfo>& rs) {
  long long acc = 0;
  for (const auto& r : rs) acc += r.chi - static_cast<long long>(r.punctures.size());
  return acc;
}

}  // namespace

TEST_CASE("tracing splits a weight system into its components") {
  Fix f;
  TraceResult r = trace_components(f.c, f.g0);
  REQUIRE(r.components.size() == 1);
  CHECK(r.components[0].word.size() == 6);
  CHECK(r.components[0].weights == f.g0);
  CHECK(!r.components[0].peripheral);
  CHECK(is_single_essential_curve(f.c, f.g0));

  Weights both = f.g0 + f.g1;
  TraceResult r2 = trace_components(f.c, both);
  REQUIRE(r2.components.size() == 2);
  CHECK(r2.components[0].weights + r2.components[1].weights == both);
  bool saw0 = false, saw1 = false;
  for (const auto& comp : r2.components) {
    if (comp.weights == f.g0) saw0 = true;
    if (comp.weights == f.g1) saw1 = true;
  }
  CHECK(saw0);
  CHECK(saw1);

  TraceResult r3 = trace_components(f.c, f.g0.scaled(2));
  REQUIRE(r3.components.size() == 2);
  CHECK(r3.components[0].weights == f.g0);
  CHECK(r3.components[1].weights == f.g0);
  CHECK(!is_single_essential_curve(f.c, f.g0.scaled(2)));
}

TEST_CASE("tracing flags peripheral and vanishing systems") {
  Fix f;
  Weights link = puncture_link(f.c, f.c.find_vertex("p3"));
  TraceResult r = trace_components(f.c, link);
  REQUIRE(r.components.size() == 1);
  CHECK(r.components[0].peripheral);
  CHECK(r.components[0].around == f.c.find_vertex("p3"));
  CHECK(!is_single_essential_curve(f.c, link));

  // a circle around an unmarked pole tightens away entirely
  Weights pole_circle(f.c.num_edges());
  for (const char* n : {"N0", "N1", "N2", "N3", "N4"})
    pole_circle[f.c.find_edge(n)] = 1;
  CHECK(trace_components(f.c, pole_circle).components.empty());

  CHECK(trace_components(f.c, Weights(f.c.num_edges())).components.empty());
}

TEST_CASE("the bare chart assembles into a single sphere region") {
  Fix f;
  Weights zero(f.c.num_edges());
  UnitOverlay ov(f.c, zero, zero);
  std::vector<RegionInfo> rs = ov.regions();
  REQUIRE(rs.size() == 1);
  CHECK(rs[0].chi == 2);
  CHECK(rs[0].corners == 0);
  CHECK(rs[0].punctures.size() == 5);
  CHECK(rs[0].unmarked.size() == 2);
}

TEST_CASE("frozen intersection numbers of the seed curves") {
  Fix f;
  CHECK(unit_intersection(f.c, f.g0, f.g0) == 0);
  CHECK(unit_intersection(f.c, f.g0, f.g1) == 0);
  CHECK(unit_intersection(f.c, f.g0, f.g2) == 2);
  CHECK(unit_intersection(f.c, f.g0, f.g3) == 2);
  CHECK(unit_intersection(f.c, f.g0, f.g4) == 0);
  CHECK(unit_intersection(f.c, f.g2, f.g0) == 2);

  for (const char* p : {"p0", "p1", "p2", "p3", "p4"}) {
    Weights link = puncture_link(f.c, f.c.find_vertex(p));
    CHECK(unit_intersection(f.c, f.g0, link) == 0);
  }

  Weights e1 = edge_link_curve(f.c, f.c.find_edge("E1"));
  CHECK(unit_intersection(f.c, f.g0, e1) == 2);
}

TEST_CASE("intersection is symmetric and rotation-equivariant") {
  Fix f;
  ChartMap rho = charts::bipyramid_rotation(f.c, 2);
  const Weights* cs[3] = {&f.g0, &f.g2, &f.g3};
  for (const Weights* a : cs)
    for (const Weights* b : cs) {
      Int ab = unit_intersection(f.c, *a, *b);
      CHECK(ab == unit_intersection(f.c, *b, *a));
      CHECK(ab ==
            unit_intersection(f.c, apply_map(rho, *a), apply_map(rho, *b)));
    }
}

TEST_CASE("region census satisfies the Euler-sum identity") {
  // closing up all complementary regions and subtracting punctures must
  // reproduce chi of the five-punctured sphere plus one per crossing
  Fix f;
  auto check_pair = [&](const Weights& a, const Weights& b) {
    UnitOverlay ov(f.c, a, b);
    ov.reduce();
    CHECK(region_sum(ov.regions()) == ov.crossings() - 3);
  };
  check_pair(f.g0, f.g1);
  check_pair(f.g0, f.g2);
  check_pair(f.g0, f.g0);
  Weights zero(f.c.num_edges());
  check_pair(zero, zero);
  check_pair(f.g2, unit_twist(f.c, f.g2, f.g0, 2));
  check_pair(f.g0, unit_twist(f.c, f.g2, f.g0, -1));
}

TEST_CASE("low intersection never fills the five-punctured sphere") {
  // with two crossings the complement has four pieces and five punctures, so
  // some piece holds two of them
  Fix f;
  CHECK(!unit_fills(f.c, f.g0, f.g2));
  CHECK(!unit_fills(f.c, f.g0, f.g1));
  CHECK(!unit_fills(f.c, f.g0, f.g3));
}

TEST_CASE("twisting by the annulus formula: frozen counts") {
  Fix f;
  // i(D^e(a), a) = |e| i(c,a)^2 exactly, for every e: the twist inequality
  // collapses to equality when the third curve equals the target
  for (long long e : {-3LL, -2LL, -1LL, 1LL, 2LL, 3LL, 6LL}) {
    Weights t = unit_twist(f.c, f.g2, f.g0, e);
    CHECK(unit_intersection(f.c, t, f.g0) == 4 * (e < 0 ? -e : e));
    CHECK(unit_intersection(f.c, t, f.g2) == 2);
    CHECK(is_single_essential_curve(f.c, t));
  }
}

TEST_CASE("twists compose and invert") {
  Fix f;
  Weights t1 = unit_twist(f.c, f.g2, f.g0, 1);
  Weights t2 = unit_twist(f.c, f.g2, t1, 1);
  CHECK(t2 == unit_twist(f.c, f.g2, f.g0, 2));
  CHECK(unit_twist(f.c, f.g2, t2, -2) == f.g0);
  CHECK(unit_twist(f.c, f.g2, t1, -1) == f.g0);

  // opposite powers land far apart: i(D^1 a, D^-1 a) = 2 * i(c,a)^2
  Weights m1 = unit_twist(f.c, f.g2, f.g0, -1);
  CHECK(unit_intersection(f.c, t1, m1) == 8);
  CHECK(t1 != m1);

  // twisting about a disjoint core is the identity
  CHECK(unit_twist(f.c, f.g2, f.g1, 7) == f.g1);
  CHECK(unit_twist(f.c, f.g2, f.g2, 3) == f.g2);
}

TEST_CASE("twist counts obey the intersection inequality on mixed triples") {
  Fix f;
  // |i(D_c^e(b), g) - |e| i(c,b) i(c,g)| <= i(b,g)
  const Weights* bs[2] = {&f.g0, &f.g1};
  const Weights* gs[2] = {&f.g3, &f.g4};
  for (const Weights* b : bs)
    for (const Weights* g : gs)
      for (long long e : {-2LL, 1LL, 3LL}) {
        Weights tb = unit_twist(f.c, f.g2, *b, e);
        Int lhs = unit_intersection(f.c, tb, *g);
        Int mid = Int(e < 0 ? -e : e) * unit_intersection(f.c, f.g2, *b) *
                  unit_intersection(f.c, f.g2, *g);
        Int diff = lhs > mid ? lhs - mid : mid - lhs;
        CHECK(diff <= unit_intersection(f.c, *b, *g));
      }
}

TEST_CASE("twist images of multicurves keep their component count") {
  Fix f;
  Weights both = f.g0 + f.g1;
  Weights t = unit_twist(f.c, f.g2, both, 1);
  TraceResult r = trace_components(f.c, t);
  CHECK(r.components.size() == 2);
  // the component missing g2 is carried along unchanged
  bool kept = false;
  for (const auto& comp : r.components)
    if (comp.weights == f.g1) kept = true;
  CHECK(kept);
}
