#include <doctest.h>

#include <vector>

#include "curvekit/curve.hpp"
#include "curvekit/overlay.hpp"
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

}  // namespace

TEST_CASE("counted intersections match the unit tracer on the seed family") {
  Fix f;
  std::vector<Weights> seeds{f.g0, f.g1, f.g2, f.g3, f.g4};
  for (const auto& a : seeds)
    for (const auto& b : seeds) {
      Int fast = intersection_number(f.c, a, b);
      CHECK(fast == unit_intersection(f.c, a, b));
      CHECK(fast == intersection_number(f.c, b, a));
    }
  CHECK(intersection_number(f.c, f.g0, f.g2) == 2);
  CHECK(overlaps(f.c, f.g0, f.g2));
  CHECK(!overlaps(f.c, f.g0, f.g1));
}

TEST_CASE("counted intersections match the unit tracer on twisted curves") {
  Fix f;
  std::vector<Weights> pool{f.g0, f.g1, f.g3, f.g4};
  for (const Weights& base : {f.g0, f.g1, f.g4})
    for (long long e : {-3, -2, 2, 5})
      pool.push_back(unit_twist(f.c, f.g2, base, e));
  for (const Weights& base : {f.g2, f.g3})
    for (long long e : {-2, 1, 4})
      pool.push_back(unit_twist(f.c, f.g0, base, e));
  for (size_t i = 0; i < pool.size(); ++i)
    for (size_t j = i; j < pool.size(); ++j) {
      Int fast = intersection_number(f.c, pool[i], pool[j]);
      CHECK(fast == unit_intersection(f.c, pool[i], pool[j]));
      CHECK(fast == intersection_number(f.c, pool[j], pool[i]));
    }
}

TEST_CASE("parallel copies never cross and scale linearly against others") {
  Fix f;
  CHECK(intersection_number(f.c, f.g0, f.g0) == 0);
  CHECK(intersection_number(f.c, f.g0, f.g0.scaled(3)) == 0);
  CHECK(intersection_number(f.c, f.g0.scaled(5), f.g0.scaled(7)) == 0);

  Int huge = 1;
  for (int i = 0; i < 40; ++i) huge *= 10;
  CHECK(intersection_number(f.c, f.g0, f.g2.scaled(huge)) == 2 * huge);
  CHECK(intersection_number(f.c, f.g2.scaled(huge), f.g0) == 2 * huge);
  CHECK(intersection_number(f.c, f.g0.scaled(huge), f.g1.scaled(huge)) == 0);

  Weights both = f.g0 + f.g1;  // disjoint pair as one system
  CHECK(intersection_number(f.c, both, f.g2) ==
        unit_intersection(f.c, both, f.g2));
}

TEST_CASE("counted intersections reject inadmissible weight vectors") {
  Fix f;
  Weights bad(f.c.num_edges());
  bad[0] = 1;  // odd corner sums
  CHECK_THROWS(intersection_number(f.c, bad, f.g0));
}
