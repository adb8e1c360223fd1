#pragma once

#include <string>
#include <vector>

#include "curvekit/bigint.hpp"
#include "curvekit/chart.hpp"

namespace curvekit {

// Normal coordinates of a multicurve relative to a chart: one weight per
// edge.  An admissible vector (triangle inequalities + even corner sums)
// determines a unique embedded multicurve up to normal isotopy; the genuine
// isotopy class on the punctured surface is the tight form, obtained by
// pole_tighten (resolving routing around unmarked vertices) — tight vectors
// are canonical on charts whose unmarked vertices have odd degree.
struct Weights {
  std::vector<Int> w;

  Weights() = default;
  explicit Weights(int num_edges) : w(num_edges, 0) {}

  Int& operator[](EdgeId e) { return w[e]; }
  const Int& operator[](EdgeId e) const { return w[e]; }
  bool operator==(const Weights& o) const { return w == o.w; }
  bool operator!=(const Weights& o) const { return w != o.w; }
  bool operator<(const Weights& o) const { return w < o.w; }

  bool is_zero() const;
  Int total() const;
  Weights& operator+=(const Weights& o);
  friend Weights operator+(Weights a, const Weights& b) { return a += b; }
  Weights scaled(const Int& k) const;
};

bool admissible(const Chart& c, const Weights& w, std::string* why = nullptr);

// Strand count in the corner of triangle t at its corner k.
Int corner_count(const Chart& c, const Weights& w, TriId t, int k);

// Corner counts around vertex v in fan order.
std::vector<Int> corner_counts_at(const Chart& c, const Weights& w, VertexId v);

// Re-routes strands around every unmarked vertex onto their shorter side and
// deletes vertex-linking circles, repeating until stable.  Ties (even-degree
// vertices) keep their current side.  Returns true if anything changed.
bool pole_tighten(const Chart& c, Weights& w);

bool is_tight(const Chart& c, const Weights& w);

// Repairs a non-negative even-parity vector that overshoots a triangle
// inequality by folding hairpins: an edge carrying more strands than its two
// partner sides combined has strands entering and leaving a triangle through
// the same side, and each such hairpin retracts across the edge (weight -2).
// Returns true if anything changed; the result is admissible.
bool fold_excess(const Chart& c, Weights& w);

// Push-forward along a simplicial automorphism.
Weights apply_map(const ChartMap& m, const Weights& w);

// Boundary of a regular neighborhood of an edge joining two punctures.
Weights edge_link_curve(const Chart& c, EdgeId e);

// Small circle around a single puncture (its vertex link).
Weights puncture_link(const Chart& c, VertexId v);

}  // namespace curvekit
