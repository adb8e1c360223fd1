#pragma once

#include <memory>
#include <vector>

#include "curvekit/chart.hpp"
#include "curvekit/curve.hpp"

namespace curvekit {

// Unit-multiplicity arc walker.  Everything here materializes one strand per
// unit of weight, so costs grow linearly (quadratically for crossings) with
// total weight.  It is the slow, independent reference implementation: the
// compressed pipeline is checked against these functions on small inputs and
// trusted beyond them.

// One component of a traced weight system.
struct TraceComponent {
  std::vector<EdgeId> word;  // cyclic sequence of edge crossings
  Weights weights;           // this component's own crossing counts
  bool peripheral = false;   // isotopic to a small loop around one puncture
  VertexId around = -1;      // that puncture, if peripheral
};

struct TraceResult {
  std::vector<TraceComponent> components;
};

// Tightens a copy of w (dropping anything that dies under isotopy across
// unmarked vertices) and walks the remaining strands.  Requires admissible
// weights whose total fits comfortably in machine integers.
TraceResult trace_components(const Chart& c, const Weights& w);

// True when w is a single essential (non-peripheral) simple closed curve.
bool is_single_essential_curve(const Chart& c, const Weights& w);

// A complementary region of the union of the two traced systems, described
// after cutting along the curves: chi of the cut-off piece, the number of
// corners its boundary makes at curve-curve crossings, and which chart
// vertices it swallowed.
struct RegionInfo {
  long long chi = 0;
  int corners = 0;
  std::vector<VertexId> punctures;
  std::vector<VertexId> unmarked;
  long long faces = 0;
};

// Joint picture of two weight systems on one chart with an explicit ordering
// of strands along every edge.  reduce() isotopes away every empty two-corner
// region, after which the crossing count is the geometric intersection
// number.
class UnitOverlay {
 public:
  UnitOverlay(const Chart& c, const Weights& a, const Weights& b);
  ~UnitOverlay();
  UnitOverlay(UnitOverlay&&) noexcept;
  UnitOverlay& operator=(UnitOverlay&&) noexcept;

  void reduce();
  long long crossings() const;
  std::vector<RegionInfo> regions() const;

  // After reduce(): every region is a disc holding at most one puncture.
  bool fills() const;

  struct Impl;

 private:
  std::unique_ptr<Impl> impl_;
};

// Geometric intersection number by explicit reduction.
Int unit_intersection(const Chart& c, const Weights& a, const Weights& b);

// Whether the union of the two curves cuts the surface into discs with at
// most one puncture each.
bool unit_fills(const Chart& c, const Weights& a, const Weights& b);

// e-fold Dehn twist of target about core, performed by splicing the core's
// full word into the target at every crossing and renormalizing, |e| times.
// The sign of e selects the handedness; +1 is the library-wide positive
// direction.
Weights unit_twist(const Chart& c, const Weights& core, const Weights& target,
                   long long e);

}  // namespace curvekit
