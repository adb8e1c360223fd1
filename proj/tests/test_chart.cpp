#include <doctest.h>

#include "curvekit/chart.hpp"

using namespace curvekit;

TEST_CASE("bipyramid is a closed spherical chart") {
  Chart c = charts::bipyramid();
  CHECK(c.num_vertices() == 7);
  CHECK(c.num_edges() == 15);
  CHECK(c.num_triangles() == 10);
  CHECK(c.euler_characteristic() == 2);
  CHECK(c.num_punctures() == 5);
  for (int i = 0; i < 5; ++i) CHECK(c.degree(i) == 4);
  CHECK(c.degree(c.find_vertex("n")) == 5);
  CHECK(c.degree(c.find_vertex("s")) == 5);
}

TEST_CASE("pole fans consist of spoke edges") {
  Chart c = charts::bipyramid();
  VertexId n = c.find_vertex("n");
  for (EdgeId e : c.spokes(n)) {
    CHECK(c.edges[e].a == n);
    CHECK(c.edges[e].name[0] == 'N');
  }
  CHECK(c.spokes(n).size() == 5);
}

TEST_CASE("rotation is an order-5 automorphism") {
  Chart c = charts::bipyramid();
  ChartMap rho = charts::bipyramid_rotation(c, 2);
  validate_map(c, rho);
  ChartMap acc = rho;
  for (int k = 1; k < 5; ++k) {
    CHECK(!acc.is_identity());
    acc = acc.compose(rho);
  }
  CHECK(acc.is_identity());
  CHECK(rho.compose(rho.inverse()).is_identity());
  CHECK(rho.edge_map[c.find_edge("E0")] == c.find_edge("E2"));
  CHECK(rho.edge_map[c.find_edge("N1")] == c.find_edge("N3"));
}
