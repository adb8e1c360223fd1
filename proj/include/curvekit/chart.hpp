#pragma once

#include <array>
#include <string>
#include <vector>

namespace curvekit {

// A chart is an oriented triangulation of a closed surface whose vertices are
// either punctures (marked, curves may not cross them or sweep over them) or
// unmarked auxiliary points (curves may be isotoped across them).  All curve
// machinery in this library works relative to a chart: a curve is a vector of
// edge weights, and moves are expressed through the chart's corner structure.

using VertexId = int;
using EdgeId = int;
using TriId = int;

struct Vertex {
  bool is_puncture = false;
  std::string name;
};

// Reference orientation a -> b.  Positions along the edge are indexed from
// the 'a' endpoint.
struct Edge {
  VertexId a = -1, b = -1;
  std::string name;
};

// Corners are numbered like vertices: corner k sits at v[k], between the
// incoming side e[(k+2)%3] and the outgoing side e[k]; the opposite side is
// e[(k+1)%3].  Side k runs v[k] -> v[(k+1)%3] in the triangle's positive
// (outward CCW) orientation.
struct Triangle {
  std::array<VertexId, 3> v{-1, -1, -1};
  std::array<EdgeId, 3> e{-1, -1, -1};
  std::string name;
};

// One of the two triangle sides glued to an edge.
struct SideRef {
  TriId tri = -1;
  int side = -1;      // 0..2
  bool forward = true; // side traverses the edge a -> b
};

// A corner of a triangle, used when walking fans around a vertex.
struct CornerRef {
  TriId tri = -1;
  int corner = -1; // 0..2
};

class Chart {
 public:
  std::vector<Vertex> vertices;
  std::vector<Edge> edges;
  std::vector<Triangle> triangles;
  std::string name;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_edges() const { return static_cast<int>(edges.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }
  int euler_characteristic() const {
    return num_vertices() - num_edges() + num_triangles();
  }
  int num_punctures() const;

  // Fills in the derived tables below and verifies that the data describes a
  // closed oriented surface: every edge is glued to exactly two sides with
  // opposite traversal directions, and the fan around every vertex closes
  // into a single cycle.  Throws std::runtime_error on malformed input.
  void finalize();

  const std::array<SideRef, 2>& sides_of(EdgeId e) const { return sides_[e]; }

  // Fan around a vertex, cyclic and counterclockwise.  fan[i] is a corner at
  // v; walking from fan[i] to fan[i+1] crosses the incoming side of fan[i],
  // which is spokes()[v][i].  So spoke[i] separates fan[i] from fan[i+1],
  // corner i sits between spoke[i-1] and spoke[i], and spokes() lists the
  // edges incident to v once each in rotation order.
  const std::vector<CornerRef>& fan(VertexId v) const { return fans_[v]; }
  const std::vector<EdgeId>& spokes(VertexId v) const { return spokes_[v]; }
  int degree(VertexId v) const { return static_cast<int>(fans_[v].size()); }

  // Neighbor triangle across side s of t, together with the matching side.
  SideRef neighbor(TriId t, int s) const;

  // Locates (t, s) among the two slots of its edge: 0 or 1.
  int slot_of(TriId t, int s) const;

  EdgeId find_edge(const std::string& name) const;
  VertexId find_vertex(const std::string& name) const;

 private:
  std::vector<std::array<SideRef, 2>> sides_;
  std::vector<std::vector<CornerRef>> fans_;
  std::vector<std::vector<EdgeId>> spokes_;
};

// A simplicial automorphism (orientation preserving).  tri_rot[t] is the
// corner of image(t) receiving corner 0 of t.
struct ChartMap {
  std::vector<VertexId> vertex_map;
  std::vector<EdgeId> edge_map;
  std::vector<TriId> tri_map;
  std::vector<int> tri_rot;

  ChartMap compose(const ChartMap& inner) const; // this ∘ inner
  ChartMap inverse() const;
  bool is_identity() const;
};

// Validates that m is a simplicial automorphism of c preserving triangle
// orientations and puncture marking; throws if not.
void validate_map(const Chart& c, const ChartMap& m);

namespace charts {

// Pentagonal bipyramid model of the 5-punctured sphere: punctures p0..p4 on
// the equator, unmarked poles n and s.  Edges: E_i = p_i p_{i+1} (ids 0..4),
// N_i = n p_i (ids 5..9), S_i = s p_i (ids 10..14).  Triangles: ids 0..4 are
// (n, p_i, p_{i+1}), ids 5..9 are (s, p_{i+1}, p_i).
Chart bipyramid();

// The order-5 rotation p_i -> p_{i+k} of the bipyramid.
ChartMap bipyramid_rotation(const Chart& c, int k);

}  // namespace charts

}  // namespace curvekit
