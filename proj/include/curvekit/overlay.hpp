#pragma once

#include <optional>
#include <vector>

#include "curvekit/chart.hpp"
#include "curvekit/curve.hpp"

namespace curvekit {

// Exact minimal-position intersection number of two admissible weight
// systems.  One side is enumerated strand by strand; the other is kept as
// counts only, so the cost is polynomial in the chart size, the enumerated
// side's total weight, and the bit length of the other side's weights.
//
// Strands are put in canonical joint position by the first-divergence order:
// at a shared edge, a counted strand sits below or above an enumerated one
// according to which corner their forward itineraries first part at, and
// strands that never part (parallel copies) sit on the enumerated strand's
// left.  In that order same-itinerary bigons are impossible, and any other
// bigon would have to enclose an unmarked pole — which tight systems cannot
// do around a pole of odd degree — so the position is minimal and crossings
// can be counted per triangle straight from the strand ranks.
Int intersection_number(const Chart& c, const Weights& a, const Weights& b);

bool overlaps(const Chart& c, const Weights& a, const Weights& b);

// One isotopy class of complementary regions of the union of two systems in
// minimal position.  `chi` is the Euler characteristic of the region with its
// punctures and poles filled back in (so a disk scores 1 whether or not it
// contains a vertex), `faces` and `corners` count the arrangement pieces and
// crossing quadrants along the region's closure, and `multiplicity` counts
// parallel copies of the class.
struct RegionClass {
  Int chi;
  int punctures = 0;
  int poles = 0;
  Int multiplicity;
  Int faces;
  Int corners;
};

// Complement census of a pair in minimal position.  `fills` records whether
// every region closes up to a disk containing at most one puncture.
struct RegionCensus {
  std::vector<RegionClass> regions;
  Int crossings;
  bool fills = false;
};

// Complete complement census.  Cost is polynomial in the chart size, the
// smaller system's total weight, and the bit length of the larger one:
// regions in the sheared part of the picture are bundled into parallel
// classes and never enumerated one by one.
RegionCensus overlay_census(const Chart& c, const Weights& a,
                            const Weights& b);

// True iff the union of the two systems cuts the surface into disks with at
// most one puncture each.
bool pair_fills(const Chart& c, const Weights& a, const Weights& b);

// An essential simple closed curve disjoint from both systems, when the pair
// does not fill; nullopt when it fills.  The witness is found among the
// boundary push-offs and annulus cores of the non-disk regions, folded to
// admissible normal form; its disjointness from the smaller input is
// verified internally, and from the larger one too when that check is
// affordable.
std::optional<Weights> disjoint_witness(const Chart& c, const Weights& a,
                                        const Weights& b);

}  // namespace curvekit
