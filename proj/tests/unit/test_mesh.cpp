#include <doctest.h>

#include "holod/mesh.hpp"

using namespace holod;

TEST_SUITE("mesh") {

TEST_CASE("element and vertex counts") {
  TensorMesh mesh(2, 4);
  CHECK(mesh.n_elements() == 16);
  CHECK(mesh.n_vertices() == 25);
  CHECK(mesh.mesh_size() == 0.25);

  TensorMesh line(1, 2);
  CHECK(line.n_elements() == 2);
  CHECK(line.element_lower_corner(0)[0] == 0.0);
  CHECK(line.element_lower_corner(1)[0] == 0.5);
}

TEST_CASE("element boxes are dyadic") {
  // On the 16x16 grid the element with index (7,7) is [0.4375, 0.5]^2.
  TensorMesh mesh(2, 16);
  const int e = mesh.element_at({7, 7});
  const auto corner = mesh.element_lower_corner(e);
  CHECK(corner[0] == 0.4375);
  CHECK(corner[1] == 0.4375);
  CHECK(mesh.mesh_size() == 0.0625);
}

TEST_CASE("rejects invalid sizes") {
  CHECK_THROWS_AS(TensorMesh(2, 3), ConfigError);
  CHECK_THROWS_AS(TensorMesh(2, 0), ConfigError);
  CHECK_THROWS_AS(TensorMesh(2, -4), ConfigError);
  CHECK_THROWS_AS(TensorMesh(3, 4), ConfigError);
  CHECK_THROWS_AS(TensorMesh(0, 4), ConfigError);
}

TEST_CASE("index round-trips and numbering") {
  TensorMesh mesh(2, 8);
  for (int e = 0; e < mesh.n_elements(); ++e) {
    CHECK(mesh.element_at(mesh.element_index(e)) == e);
  }
  for (int v = 0; v < mesh.n_vertices(); ++v) {
    CHECK(mesh.vertex_at(mesh.vertex_index(v)) == v);
  }
  // axis 0 fastest
  CHECK(mesh.element_index(1)[0] == 1);
  CHECK(mesh.element_index(1)[1] == 0);
  CHECK(mesh.element_index(8)[0] == 0);
  CHECK(mesh.element_index(8)[1] == 1);
}

TEST_CASE("patch sizes") {
  TensorMesh mesh(2, 8);
  const int interior = mesh.element_at({4, 4});
  CHECK(patch(mesh, interior, 1).size() == 9);
  CHECK(patch(mesh, mesh.element_at({0, 0}), 1).size() == 4);
  CHECK(patch(mesh, mesh.element_at({0, 4}), 1).size() == 6);
  // saturating ell covers the whole mesh regardless of the anchor
  for (int e : {0, 12, 63}) {
    CHECK(patch(mesh, e, 8).size() == mesh.n_elements());
    CHECK(patch(mesh, e, 100).size() == mesh.n_elements());
  }
}

TEST_CASE("patch monotonicity and symmetry") {
  TensorMesh mesh(2, 8);
  for (int e = 0; e < mesh.n_elements(); ++e) {
    for (int ell = 1; ell <= 3; ++ell) {
      const ElementSet inner = patch(mesh, e, ell);
      const ElementSet outer = patch(mesh, e, ell + 1);
      for (int k : inner) CHECK(outer.contains(k));
      for (int k : inner) CHECK(patch(mesh, k, ell).contains(e));
    }
  }
}

TEST_CASE("patch of 1D mesh") {
  TensorMesh mesh(1, 8);
  CHECK(patch(mesh, 4, 1).size() == 3);
  CHECK(patch(mesh, 0, 2).size() == 3);
  CHECK(patch(mesh, 7, 1).size() == 2);
}

TEST_CASE("nesting children") {
  const NestingMap map = nesting(TensorMesh(2, 2), TensorMesh(2, 4));
  for (int e = 0; e < 4; ++e) {
    CHECK(map.children(e).size() == 4);
  }

  const NestingMap identity = nesting(TensorMesh(2, 4), TensorMesh(2, 4));
  for (int e = 0; e < 16; ++e) {
    const auto kids = identity.children(e);
    REQUIRE(kids.size() == 1);
    CHECK(kids[0] == e);
  }

  // (512/4)^2 children per coarse element
  const NestingMap deep = nesting(TensorMesh(2, 4), TensorMesh(2, 512));
  CHECK(deep.children(5).size() == 128 * 128);
}

TEST_CASE("children partition the fine mesh") {
  const TensorMesh coarse(2, 2);
  const TensorMesh fine(2, 8);
  const NestingMap map = nesting(coarse, fine);
  std::vector<int> seen(static_cast<size_t>(fine.n_elements()), 0);
  for (int e = 0; e < coarse.n_elements(); ++e) {
    for (int child : map.children(e)) {
      seen[static_cast<size_t>(child)] += 1;
      CHECK(map.parent(child) == e);
    }
  }
  for (int count : seen) CHECK(count == 1);
}

TEST_CASE("nesting rejects non-nested pairs") {
  CHECK_THROWS_AS(nesting(TensorMesh(2, 4), TensorMesh(2, 2)),
                  NonNestedMeshes);
  CHECK_THROWS_AS(nesting(TensorMesh(1, 4), TensorMesh(2, 8)),
                  NonNestedMeshes);
}

TEST_CASE("element volumes sum to one exactly") {
  for (int dim : {1, 2}) {
    for (int n : {1, 2, 4, 16, 64}) {
      TensorMesh mesh(dim, n);
      double total = 0.0;
      const double volume =
          dim == 1 ? mesh.mesh_size() : mesh.mesh_size() * mesh.mesh_size();
      for (int e = 0; e < mesh.n_elements(); ++e) total += volume;
      CHECK(total == 1.0);  // dyadic volumes, exact in binary
    }
  }
}

TEST_CASE("element set validation") {
  CHECK_THROWS_AS(ElementSet({1, 1, 2}, 4), ConfigError);
  CHECK_THROWS_AS(ElementSet({0, 4}, 4), ConfigError);
  const ElementSet set({3, 1, 2}, 4);
  CHECK(set.indices() == std::vector<int>{1, 2, 3});
}

}  // TEST_SUITE
