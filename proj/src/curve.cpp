#include "curvekit/curve.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace curvekit {

bool Weights::is_zero() const {
  for (const Int& x : w)
    if (x != 0) return false;
  return true;
}

Int Weights::total() const {
  Int s = 0;
  for (const Int& x : w) s += x;
  return s;
}

Weights& Weights::operator+=(const Weights& o) {
  CK_CHECK(w.size() == o.w.size(), "weight size mismatch");
  for (size_t i = 0; i < w.size(); ++i) w[i] += o.w[i];
  return *this;
}

Weights Weights::scaled(const Int& k) const {
  Weights r = *this;
  for (Int& x : r.w) x *= k;
  return r;
}

bool admissible(const Chart& c, const Weights& w, std::string* why) {
  auto fail = [&](const std::string& m) {
    if (why) *why = m;
    return false;
  };
  if (static_cast<int>(w.w.size()) != c.num_edges())
    return fail("weight vector has wrong length");
  for (const Int& x : w.w)
    if (x < 0) return fail("negative weight");
  for (TriId t = 0; t < c.num_triangles(); ++t) {
    const auto& e = c.triangles[t].e;
    Int a = w[e[0]], b = w[e[1]], d = w[e[2]];
    if ((a + b + d) % 2 != 0)
      return fail("odd side sum in triangle " + c.triangles[t].name);
    if (a > b + d || b > a + d || d > a + b)
      return fail("triangle inequality fails in " + c.triangles[t].name);
  }
  return true;
}

Int corner_count(const Chart& c, const Weights& w, TriId t, int k) {
  const auto& e = c.triangles[t].e;
  // Sides adjacent to corner k are e[(k+2)%3] and e[k]; opposite is e[(k+1)%3].
  Int n = (w[e[(k + 2) % 3]] + w[e[k]] - w[e[(k + 1) % 3]]) / 2;
  CK_CHECK(n >= 0, "negative corner count");
  return n;
}

std::vector<Int> corner_counts_at(const Chart& c, const Weights& w,
                                  VertexId v) {
  std::vector<Int> out;
  for (const CornerRef& cr : c.fan(v))
    out.push_back(corner_count(c, w, cr.tri, cr.corner));
  return out;
}

namespace {

// One tightening pass around unmarked vertex v.  Corner j of the fan lies
// between spoke[j-1] and spoke[j]; a journey occupying corners a..b crosses
// spokes a-1 .. b.  Journeys are recovered from corner counts level by level
// (nesting), then each is independently put on the side of v crossing fewer
// spokes.  Vertex-linking circles (levels below min corner count) bound disks
// and are dropped.
bool tighten_at(const Chart& c, Weights& w, VertexId v) {
  const int d = c.degree(v);
  const std::vector<EdgeId>& r = c.spokes(v);
  std::vector<Int> cc = corner_counts_at(c, w, v);

  Int mu = cc[0];
  for (const Int& x : cc) mu = std::min(mu, x);

  bool any_spoke = false;
  for (int j = 0; j < d; ++j) any_spoke = any_spoke || w[r[j]] != 0;
  if (!any_spoke) return false;

  // Through-strands on spoke j avoid the v-corners on both sides.
  std::vector<Int> spoke_new(d);
  for (int j = 0; j < d; ++j)
    spoke_new[j] = w[r[j]] - std::max(cc[j], cc[(j + 1) % d]);

  // Chord families: between consecutive distinct corner-count levels the run
  // decomposition of {j : c_j >= level} is constant.
  std::vector<Int> levels(cc);
  levels.push_back(mu);
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  bool changed = mu > 0; // circles removed
  for (size_t li = 0; li + 1 < levels.size(); ++li) {
    const Int lo = std::max(levels[li], mu), hi = levels[li + 1];
    Int mult = hi - lo;
    if (mult <= 0) continue;
    std::vector<bool> active(d);
    for (int j = 0; j < d; ++j) active[j] = cc[j] >= hi;
    // maximal cyclic runs of active corners
    int start = -1;
    for (int j = 0; j < d; ++j)
      if (!active[j]) start = j;
    CK_CHECK(start >= 0, "full run above the circle level");
    int j = start;
    do {
      int jn = (j + 1) % d;
      if (active[jn]) {
        int a = jn, m = 0;
        while (active[(a + m) % d]) ++m;
        // journey corners a..a+m-1, spokes a-1..a+m-1 (m+1 of them)
        int s = m + 1;
        if (2 * s <= d) {
          for (int k = -1; k < m; ++k) spoke_new[((a + k) % d + d) % d] += mult;
        } else {
          for (int k = m; k < d - 1; ++k) spoke_new[(a + k) % d] += mult;
          changed = true;
        }
        j = (a + m) % d;
      } else {
        j = jn;
      }
    } while (j != start);
  }

  if (!changed) return false;
  bool moved = false;
  for (int j = 0; j < d; ++j) {
    if (w[r[j]] != spoke_new[j]) moved = true;
    w[r[j]] = spoke_new[j];
  }
  return moved || mu > 0;
}

}  // namespace

bool pole_tighten(const Chart& c, Weights& w) {
  std::string why;
  CK_CHECK(admissible(c, w, &why), why);
  bool changed = false;
  bool pass_changed = true;
  while (pass_changed) {
    pass_changed = false;
    for (VertexId v = 0; v < c.num_vertices(); ++v) {
      if (c.vertices[v].is_puncture) continue;
      if (tighten_at(c, w, v)) pass_changed = changed = true;
    }
  }
  CK_CHECK(admissible(c, w, &why), why);
  CK_CHECK(is_tight(c, w), "tightening did not reach a tight form");
  return changed;
}

bool fold_excess(const Chart& c, Weights& w) {
  CK_CHECK(static_cast<int>(w.w.size()) == c.num_edges(),
           "weight vector has wrong length");
  for (const Int& x : w.w) CK_CHECK(x >= 0, "negative weight");
  bool changed = false;
  bool again = true;
  while (again) {
    again = false;
    for (TriId t = 0; t < c.num_triangles(); ++t) {
      const auto& e = c.triangles[t].e;
      for (int k = 0; k < 3; ++k) {
        Int excess = w[e[k]] - w[e[(k + 1) % 3]] - w[e[(k + 2) % 3]];
        if (excess > 0) {
          CK_CHECK(excess % 2 == 0, "odd overshoot cannot fold");
          w[e[k]] -= excess;
          again = changed = true;
        }
      }
    }
  }
  std::string why;
  CK_CHECK(admissible(c, w, &why), why);
  return changed;
}

bool is_tight(const Chart& c, const Weights& w) {
  for (VertexId v = 0; v < c.num_vertices(); ++v) {
    if (c.vertices[v].is_puncture) continue;
    const int d = c.degree(v);
    std::vector<Int> cc = corner_counts_at(c, w, v);
    Int mu = cc[0];
    for (const Int& x : cc) mu = std::min(mu, x);
    if (mu > 0) return false;
    // No journey may cross more spokes than its complement; for odd degree
    // that means runs of positive corners are shorter than (d-1)/2, and a
    // run of m corners crosses m+1 spokes.
    int run = 0;
    for (int j = 0; j < 2 * d; ++j) {
      if (cc[j % d] > 0) {
        ++run;
        if (2 * (run + 1) > d) return false;
      } else {
        run = 0;
      }
    }
  }
  return true;
}

Weights apply_map(const ChartMap& m, const Weights& w) {
  Weights r(static_cast<int>(w.w.size()));
  for (size_t e = 0; e < w.w.size(); ++e) r.w[m.edge_map[e]] = w.w[e];
  return r;
}

Weights edge_link_curve(const Chart& c, EdgeId e) {
  VertexId a = c.edges[e].a, b = c.edges[e].b;
  CK_CHECK(c.vertices[a].is_puncture && c.vertices[b].is_puncture,
           "edge link requires puncture endpoints");
  Weights r(c.num_edges());
  for (EdgeId f = 0; f < c.num_edges(); ++f) {
    if (f == e) continue;
    Int k = 0;
    if (c.edges[f].a == a || c.edges[f].a == b) ++k;
    if (c.edges[f].b == a || c.edges[f].b == b) ++k;
    r[f] = k;
  }
  std::string why;
  CK_CHECK(admissible(c, r, &why), why);
  pole_tighten(c, r);
  return r;
}

Weights puncture_link(const Chart& c, VertexId v) {
  CK_CHECK(c.vertices[v].is_puncture, "vertex link of an unmarked vertex");
  Weights r(c.num_edges());
  for (EdgeId f = 0; f < c.num_edges(); ++f) {
    Int k = 0;
    if (c.edges[f].a == v) ++k;
    if (c.edges[f].b == v) ++k;
    r[f] = k;
  }
  std::string why;
  CK_CHECK(admissible(c, r, &why), why);
  return r;
}

}  // namespace curvekit
