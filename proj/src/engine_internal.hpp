#pragma once

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "curvekit/bigint.hpp"
#include "curvekit/chart.hpp"
#include "curvekit/curve.hpp"
#include "normal_internal.hpp"

// Compressed joint-position engine.  A small "probe" system is enumerated
// into unit strands; a large "field" system stays as per-edge counts.  The
// central computation is the rank of a probe strand among the field strands
// at each of its edge crossings, under the first-divergence order:
//
//   follow the probe's word keeping the interval of field strands whose
//   forward itinerary still agrees with it; at each triangle the corner
//   split decides part of the interval to a definite side of the probe;
//   parallels that never decide are placed on the probe's left.
//
// The interval evolves by +-1 affine maps and clips, so once two consecutive
// trips around the probe show the same clip pattern the evolution is affine
// in the trip index and can be jumped in closed form — the walk costs
// O(word length * bit length) instead of O(field weight).

namespace curvekit {
namespace internal {

// Per-edge strand counts and per-triangle corner counts of the field system.
struct Field {
  std::vector<Int> m;                     // strands crossing each edge
  std::vector<std::array<Int, 3>> cc;     // corner counts per triangle

  Field(const Chart& c, const Weights& w)
      : m(w.w), cc(c.num_triangles()) {
    for (TriId t = 0; t < c.num_triangles(); ++t)
      for (int k = 0; k < 3; ++k) cc[t][k] = corner_count(c, w, t, k);
  }
};

// One step of a probe word, with the triangle-local data the walk needs.
struct ProbeStep {
  EdgeId e;        // edge crossed
  TriId t;         // triangle entered
  int k;           // side of t carrying e
  bool fwd;        // that side traverses e from its a endpoint
  bool turn_low;   // chord cuts off corner k (exits side k+2), else corner k+1
  int k_out;       // exit side
  EdgeId e_out;    // exit edge (= next step's e)
  bool fwd_out;    // orientation of the exit side
};

std::vector<ProbeStep> probe_steps(const Chart& c, const UnitWord& u);

// Rank of the probe among the field strands at step `start` of its word:
// the number of field strands strictly below it in edge order (indexed from
// the edge's 'a' endpoint).  Ranks of the probe at consecutive steps pin its
// chord inside each triangle, and crossings with the field follow from the
// nested corner structure.
Int rank_at(const Chart& c, const Field& f, const std::vector<ProbeStep>& ps,
            int start);

// Ranks at every step of the probe word.
std::vector<Int> ranks(const Chart& c, const Field& f,
                       const std::vector<ProbeStep>& ps);

// Field chords crossed by the probe's chord in the triangle of step i, given
// the probe's ranks at steps i and i+1.
Int chord_crossings(const Field& f, const std::vector<ProbeStep>& ps, int i,
                    const Int& rank_in, const Int& rank_out);

// Corner chords of the field containing a boundary point of the probe's
// chord: the point sits on the given side at local rank rho (strands between
// it and the side's start vertex).
std::array<Int, 3> corner_depths(const Field& f, TriId t, int side,
                                 const Int& rho);

// Largest n >= 0 with value + n*slope <= limit (resp. >= limit), given it
// holds at n = 0; nullopt when it holds for every n.
std::optional<Int> last_n_le(const Int& value, const Int& slope,
                             const Int& limit);
std::optional<Int> last_n_ge(const Int& value, const Int& slope,
                             const Int& limit);

// Meet of optional upper bounds.
void tighten_bound(std::optional<Int>& bound, const std::optional<Int>& nb);

// Canonical joint position of an enumerated probe system against a counted
// field system.
struct PairFrame {
  const Chart* chart;
  Weights probe, field;            // tightened copies
  Field f;
  std::vector<UnitWord> units;     // unit strands of the probe
  std::vector<std::vector<ProbeStep>> steps;
  std::vector<std::vector<Int>> rank;  // rank[u][i], one per step, cyclic
  Int crossings;

  PairFrame(const Chart& c, Weights probe_in, Weights field_in);
};

}  // namespace internal
}  // namespace curvekit
