#include "curvekit/chart.hpp"

#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "curvekit/bigint.hpp"

namespace curvekit {

void check_failure(const char* cond, const char* file, int line,
                   const std::string& msg) {
  std::ostringstream os;
  os << "invariant violated: " << cond << " at " << file << ":" << line;
  if (!msg.empty()) os << " (" << msg << ")";
  throw std::runtime_error(os.str());
}

int Chart::num_punctures() const {
  int k = 0;
  for (const auto& v : vertices) k += v.is_puncture ? 1 : 0;
  return k;
}

void Chart::finalize() {
  const int V = num_vertices(), E = num_edges(), T = num_triangles();
  CK_CHECK(2 * E == 3 * T, "side count mismatch");

  sides_.assign(E, {});
  std::vector<int> filled(E, 0);
  for (TriId t = 0; t < T; ++t) {
    const Triangle& tri = triangles[t];
    for (int s = 0; s < 3; ++s) {
      EdgeId e = tri.e[s];
      CK_CHECK(e >= 0 && e < E, "bad edge id");
      VertexId from = tri.v[s], to = tri.v[(s + 1) % 3];
      const Edge& ed = edges[e];
      bool forward;
      if (from == ed.a && to == ed.b) {
        forward = true;
      } else if (from == ed.b && to == ed.a) {
        forward = false;
      } else {
        CK_CHECK(false, "side endpoints disagree with edge " + ed.name);
        forward = true;
      }
      CK_CHECK(filled[e] < 2, "edge glued more than twice: " + ed.name);
      sides_[e][filled[e]++] = SideRef{t, s, forward};
    }
  }
  for (EdgeId e = 0; e < E; ++e) {
    CK_CHECK(filled[e] == 2, "edge glued once: " + edges[e].name);
    CK_CHECK(sides_[e][0].forward != sides_[e][1].forward,
             "orientation not coherent across " + edges[e].name);
  }

  // Build vertex fans by walking corners.  From corner k of t (at vertex v),
  // the next corner counterclockwise is reached across the incoming side
  // e[(k+2)%3].
  fans_.assign(V, {});
  spokes_.assign(V, {});
  std::set<std::pair<TriId, int>> seen;
  for (TriId t0 = 0; t0 < T; ++t0) {
    for (int k0 = 0; k0 < 3; ++k0) {
      if (seen.count({t0, k0})) continue;
      VertexId v = triangles[t0].v[k0];
      CK_CHECK(fans_[v].empty(), "vertex link is not a single cycle: " +
                                     vertices[v].name);
      TriId t = t0;
      int k = k0;
      do {
        CK_CHECK(!seen.count({t, k}), "fan walk revisits a corner");
        seen.insert({t, k});
        fans_[v].push_back(CornerRef{t, k});
        EdgeId in = triangles[t].e[(k + 2) % 3];
        spokes_[v].push_back(in);
        SideRef nb = neighbor(t, (k + 2) % 3);
        // Across that side, v sits at the far end of the shared edge from
        // the neighbor's side start.
        int s = nb.side;
        TriId tn = nb.tri;
        VertexId sv = triangles[tn].v[s], ev = triangles[tn].v[(s + 1) % 3];
        if (sv == v) {
          k = s;
        } else {
          CK_CHECK(ev == v, "fan walk lost the vertex");
          k = (s + 1) % 3;
        }
        t = tn;
      } while (!(t == t0 && k == k0));
    }
  }
  for (VertexId v = 0; v < V; ++v)
    CK_CHECK(!fans_[v].empty(), "isolated vertex: " + vertices[v].name);
}

SideRef Chart::neighbor(TriId t, int s) const {
  EdgeId e = triangles[t].e[s];
  const auto& two = sides_[e];
  if (two[0].tri == t && two[0].side == s) return two[1];
  CK_CHECK(two[1].tri == t && two[1].side == s, "side not found on its edge");
  return two[0];
}

int Chart::slot_of(TriId t, int s) const {
  EdgeId e = triangles[t].e[s];
  const auto& two = sides_[e];
  if (two[0].tri == t && two[0].side == s) return 0;
  CK_CHECK(two[1].tri == t && two[1].side == s, "side not found on its edge");
  return 1;
}

EdgeId Chart::find_edge(const std::string& n) const {
  for (EdgeId e = 0; e < num_edges(); ++e)
    if (edges[e].name == n) return e;
  throw std::runtime_error("no edge named " + n);
}

VertexId Chart::find_vertex(const std::string& n) const {
  for (VertexId v = 0; v < num_vertices(); ++v)
    if (vertices[v].name == n) return v;
  throw std::runtime_error("no vertex named " + n);
}

ChartMap ChartMap::compose(const ChartMap& inner) const {
  ChartMap r;
  r.vertex_map.resize(inner.vertex_map.size());
  r.edge_map.resize(inner.edge_map.size());
  r.tri_map.resize(inner.tri_map.size());
  r.tri_rot.resize(inner.tri_rot.size());
  for (size_t i = 0; i < inner.vertex_map.size(); ++i)
    r.vertex_map[i] = vertex_map[inner.vertex_map[i]];
  for (size_t i = 0; i < inner.edge_map.size(); ++i)
    r.edge_map[i] = edge_map[inner.edge_map[i]];
  for (size_t i = 0; i < inner.tri_map.size(); ++i) {
    r.tri_map[i] = tri_map[inner.tri_map[i]];
    r.tri_rot[i] = (tri_rot[inner.tri_map[i]] + inner.tri_rot[i]) % 3;
  }
  return r;
}

ChartMap ChartMap::inverse() const {
  ChartMap r;
  r.vertex_map.resize(vertex_map.size());
  r.edge_map.resize(edge_map.size());
  r.tri_map.resize(tri_map.size());
  r.tri_rot.resize(tri_rot.size());
  for (size_t i = 0; i < vertex_map.size(); ++i) r.vertex_map[vertex_map[i]] = static_cast<int>(i);
  for (size_t i = 0; i < edge_map.size(); ++i) r.edge_map[edge_map[i]] = static_cast<int>(i);
  for (size_t i = 0; i < tri_map.size(); ++i) {
    r.tri_map[tri_map[i]] = static_cast<int>(i);
    r.tri_rot[tri_map[i]] = (3 - tri_rot[i]) % 3;
  }
  return r;
}

bool ChartMap::is_identity() const {
  for (size_t i = 0; i < vertex_map.size(); ++i)
    if (vertex_map[i] != static_cast<int>(i)) return false;
  for (size_t i = 0; i < edge_map.size(); ++i)
    if (edge_map[i] != static_cast<int>(i)) return false;
  for (size_t i = 0; i < tri_map.size(); ++i)
    if (tri_map[i] != static_cast<int>(i) || tri_rot[i] != 0) return false;
  return true;
}

void validate_map(const Chart& c, const ChartMap& m) {
  CK_CHECK(static_cast<int>(m.vertex_map.size()) == c.num_vertices(), "");
  CK_CHECK(static_cast<int>(m.edge_map.size()) == c.num_edges(), "");
  CK_CHECK(static_cast<int>(m.tri_map.size()) == c.num_triangles(), "");
  for (VertexId v = 0; v < c.num_vertices(); ++v)
    CK_CHECK(c.vertices[v].is_puncture ==
                 c.vertices[m.vertex_map[v]].is_puncture,
             "map does not preserve puncture marking");
  for (TriId t = 0; t < c.num_triangles(); ++t) {
    TriId ti = m.tri_map[t];
    int r = m.tri_rot[t];
    for (int k = 0; k < 3; ++k) {
      CK_CHECK(m.vertex_map[c.triangles[t].v[k]] ==
                   c.triangles[ti].v[(k + r) % 3],
               "vertex image mismatch");
      CK_CHECK(m.edge_map[c.triangles[t].e[k]] ==
                   c.triangles[ti].e[(k + r) % 3],
               "edge image mismatch");
    }
  }
}

namespace charts {

Chart bipyramid() {
  Chart c;
  c.name = "bipyramid";
  c.vertices.resize(7);
  for (int i = 0; i < 5; ++i)
    c.vertices[i] = Vertex{true, "p" + std::to_string(i)};
  c.vertices[5] = Vertex{false, "n"};
  c.vertices[6] = Vertex{false, "s"};

  c.edges.resize(15);
  for (int i = 0; i < 5; ++i) {
    c.edges[i] = Edge{i, (i + 1) % 5, "E" + std::to_string(i)};
    c.edges[5 + i] = Edge{5, i, "N" + std::to_string(i)};
    c.edges[10 + i] = Edge{6, i, "S" + std::to_string(i)};
  }

  c.triangles.resize(10);
  for (int i = 0; i < 5; ++i) {
    int j = (i + 1) % 5;
    c.triangles[i] =
        Triangle{{5, i, j}, {5 + i, i, 5 + j}, "TN" + std::to_string(i)};
    c.triangles[5 + i] =
        Triangle{{6, j, i}, {10 + j, i, 10 + i}, "TS" + std::to_string(i)};
  }
  c.finalize();
  return c;
}

ChartMap bipyramid_rotation(const Chart& c, int k) {
  k = ((k % 5) + 5) % 5;
  ChartMap m;
  m.vertex_map.resize(7);
  m.edge_map.resize(15);
  m.tri_map.resize(10);
  m.tri_rot.assign(10, 0);
  for (int i = 0; i < 5; ++i) {
    m.vertex_map[i] = (i + k) % 5;
    m.edge_map[i] = (i + k) % 5;
    m.edge_map[5 + i] = 5 + (i + k) % 5;
    m.edge_map[10 + i] = 10 + (i + k) % 5;
    m.tri_map[i] = (i + k) % 5;
    m.tri_map[5 + i] = 5 + (i + k) % 5;
  }
  m.vertex_map[5] = 5;
  m.vertex_map[6] = 6;
  validate_map(c, m);
  return m;
}

}  // namespace charts

}  // namespace curvekit
