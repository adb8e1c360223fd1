#include <doctest.h>

#include <algorithm>
#include <tuple>
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

using Sig = std::tuple<long long, int, int, long long, long long>;

std::vector<Sig> census_sigs(const RegionCensus& rc) {
  std::vector<Sig> out;
  for (const RegionClass& r : rc.regions) {
    REQUIRE(r.multiplicity <= 100000);
    long long mult = r.multiplicity.convert_to<long long>();
    for (long long k = 0; k < mult; ++k)
      out.push_back({r.chi.convert_to<long long>(), r.punctures, r.poles,
                     r.faces.convert_to<long long>(),
                     r.corners.convert_to<long long>()});
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Sig> unit_sigs(const Chart& c, const Weights& a,
                           const Weights& b) {
  UnitOverlay ov(c, a, b);
  ov.reduce();
  std::vector<Sig> out;
  for (const RegionInfo& r : ov.regions())
    out.push_back({r.chi, static_cast<int>(r.punctures.size()),
                   static_cast<int>(r.unmarked.size()), r.faces,
                   static_cast<long long>(r.corners)});
  std::sort(out.begin(), out.end());
  return out;
}

// Coarse shape of a census: sorted (chi, punctures, poles) with multiplicity.
std::vector<std::tuple<long long, int, int>> census_shape(
    const RegionCensus& rc) {
  std::vector<std::tuple<long long, int, int>> out;
  for (const Sig& s : census_sigs(rc))
    out.push_back({std::get<0>(s), std::get<1>(s), std::get<2>(s)});
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Weights> parity_pool(const Fix& f) {
  std::vector<Weights> pool{f.g0, f.g1, f.g2, f.g3, f.g4};
  for (long long e : {-2, 1, 2})
    pool.push_back(unit_twist(f.c, f.g2, f.g0, e));
  pool.push_back(unit_twist(f.c, f.g0, f.g2, 3));
  pool.push_back(f.g0 + f.g1);          // disjoint bicurve
  pool.push_back(f.g0 + f.g2.scaled(2));  // crossing classes as one system
  return pool;
}

}  // namespace

TEST_CASE("region census matches the unit overlay across a small pool") {
  Fix f;
  std::vector<Weights> pool = parity_pool(f);
  for (size_t i = 0; i < pool.size(); ++i)
    for (size_t j = i; j < pool.size(); ++j) {
      RegionCensus rc = overlay_census(f.c, pool[i], pool[j]);
      UnitOverlay ov(f.c, pool[i], pool[j]);
      ov.reduce();
      CHECK(rc.crossings == ov.crossings());
      CHECK(rc.fills == ov.fills());
      CHECK(census_sigs(rc) == unit_sigs(f.c, pool[i], pool[j]));
    }
}

TEST_CASE("witnesses exist exactly for non-filling pairs and avoid both") {
  Fix f;
  std::vector<Weights> pool = parity_pool(f);
  bool saw_filling = false, saw_witness = false;
  for (size_t i = 0; i < pool.size(); ++i)
    for (size_t j = i; j < pool.size(); ++j) {
      auto w = disjoint_witness(f.c, pool[i], pool[j]);
      CHECK(w.has_value() == !unit_fills(f.c, pool[i], pool[j]));
      if (!w.has_value()) {
        saw_filling = true;
        continue;
      }
      saw_witness = true;
      CHECK(is_single_essential_curve(f.c, *w));
      CHECK(unit_intersection(f.c, *w, pool[i]) == 0);
      CHECK(unit_intersection(f.c, *w, pool[j]) == 0);
    }
  CHECK(saw_filling);
  CHECK(saw_witness);
}

TEST_CASE("complement of two disjoint seed links has the known shape") {
  Fix f;
  RegionCensus rc = overlay_census(f.c, f.g0, f.g1);
  CHECK(rc.crossings == 0);
  CHECK(!rc.fills);
  std::vector<std::tuple<long long, int, int>> want{
      {0, 1, 2}, {1, 2, 0}, {1, 2, 0}};
  CHECK(census_shape(rc) == want);
}

TEST_CASE("complement of two crossing seed links has the known shape") {
  Fix f;
  RegionCensus rc = overlay_census(f.c, f.g0, f.g2);
  CHECK(rc.crossings == 2);
  CHECK(!rc.fills);
  std::vector<std::tuple<long long, int, int>> want{
      {1, 1, 0}, {1, 1, 0}, {1, 1, 0}, {1, 2, 2}};
  CHECK(census_shape(rc) == want);
}

TEST_CASE("a curve against itself yields itself as the witness") {
  Fix f;
  CHECK(!pair_fills(f.c, f.g0, f.g0));
  auto w = disjoint_witness(f.c, f.g0, f.g0);
  REQUIRE(w.has_value());
  CHECK(*w == f.g0);
}

TEST_CASE("an empty probe walks the field's parallel families") {
  Fix f;
  Weights zero(f.c.num_edges());
  auto w = disjoint_witness(f.c, zero, f.g2);
  REQUIRE(w.has_value());
  CHECK(*w == f.g2);
  CHECK_THROWS(disjoint_witness(f.c, zero, zero));

  RegionCensus rc = overlay_census(f.c, zero, zero);
  CHECK(rc.crossings == 0);
  CHECK(!rc.fills);
  std::vector<std::tuple<long long, int, int>> want{{2, 5, 2}};
  CHECK(census_shape(rc) == want);
}

TEST_CASE("the census survives astronomically scaled fields") {
  Fix f;
  Int huge = 1;
  for (int i = 0; i < 40; ++i) huge *= 10;

  RegionCensus rc = overlay_census(f.c, f.g0, f.g2.scaled(huge));
  CHECK(rc.crossings == 2 * huge);
  CHECK(!rc.fills);
  auto w = disjoint_witness(f.c, f.g0, f.g2.scaled(huge));
  REQUIRE(w.has_value());
  CHECK(is_single_essential_curve(f.c, *w));
  CHECK(unit_intersection(f.c, *w, f.g0) == 0);
  CHECK(intersection_number(f.c, *w, f.g2) == 0);

  // Parallel copies of the probe: the between-copy annuli come back as one
  // family of full multiplicity.
  RegionCensus rp = overlay_census(f.c, f.g0, f.g0.scaled(huge));
  CHECK(rp.crossings == 0);
  Int annuli{0};
  for (const RegionClass& r : rp.regions)
    if (r.chi == 0 && r.punctures == 0 && r.poles == 0)
      annuli += r.multiplicity;
  CHECK(annuli == huge);
  auto wp = disjoint_witness(f.c, f.g0, f.g0.scaled(huge));
  REQUIRE(wp.has_value());
  CHECK(*wp == f.g0);
}
