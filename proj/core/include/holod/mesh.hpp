#pragma once

#include <array>
#include <utility>
#include <vector>

#include "holod/errors.hpp"

namespace holod {

/// Per-axis multi-index. Axis 0 varies fastest; axis 1 is 0 in 1D.
using MultiIndex = std::array<int, 2>;

/// Uniform tensor-product mesh of [0,1]^d, d in {1,2}, with n = 2^m cells
/// per axis. Elements and vertices are numbered lexicographically (axis 0
/// fastest). Immutable; safe for concurrent reads.
class TensorMesh {
 public:
  TensorMesh(int dimension, int cells_per_axis);

  int dimension() const { return dim_; }
  int cells_per_axis() const { return n_; }
  int vertices_per_axis() const { return n_ + 1; }
  double mesh_size() const { return 1.0 / n_; }

  int n_elements() const;
  int n_vertices() const;

  MultiIndex element_index(int element) const;
  int element_at(const MultiIndex& idx) const;
  MultiIndex vertex_index(int vertex) const;
  int vertex_at(const MultiIndex& idx) const;

  /// Lower corner of the axis-aligned element box; the side is mesh_size().
  std::array<double, 2> element_lower_corner(int element) const;
  /// Coordinates of a vertex (second entry 0 in 1D).
  std::array<double, 2> vertex_coords(int vertex) const;
  /// The 2^d vertices of an element, lexicographic.
  std::vector<int> element_vertices(int element) const;
  bool is_boundary_vertex(int vertex) const;

  bool operator==(const TensorMesh& other) const = default;

 private:
  int dim_;
  int n_;
};

/// Sorted, duplicate-free element indices of one mesh.
class ElementSet {
 public:
  ElementSet() = default;
  /// Takes arbitrary order, sorts, and rejects duplicates/out-of-range.
  ElementSet(std::vector<int> indices, int n_elements);

  const std::vector<int>& indices() const { return indices_; }
  int size() const { return static_cast<int>(indices_.size()); }
  bool contains(int element) const;
  int operator[](int i) const { return indices_[static_cast<size_t>(i)]; }

  auto begin() const { return indices_.begin(); }
  auto end() const { return indices_.end(); }

 private:
  std::vector<int> indices_;
};

/// Element patch N^ell(K): all elements whose closure meets the closure of
/// N^{ell-1}(K). On a uniform tensor mesh this is the (2*ell+1)^d block of
/// multi-indices around K, clipped to the grid.
ElementSet patch(const TensorMesh& mesh, int element, int ell);

/// Per-axis index bounds [lo, hi] of the patch block.
std::pair<MultiIndex, MultiIndex> patch_box(const TensorMesh& mesh,
                                            int element, int ell);

/// Parent/child maps between two nested meshes (fine cells_per_axis a
/// multiple of the coarse one, same dimension).
class NestingMap {
 public:
  NestingMap(TensorMesh coarse, TensorMesh fine);

  const TensorMesh& coarse() const { return coarse_; }
  const TensorMesh& fine() const { return fine_; }
  /// fine cells per coarse cell, per axis
  int ratio() const { return ratio_; }

  std::vector<int> children(int coarse_element) const;
  int parent(int fine_element) const;

 private:
  TensorMesh coarse_;
  TensorMesh fine_;
  int ratio_;
};

inline NestingMap nesting(const TensorMesh& coarse, const TensorMesh& fine) {
  return NestingMap(coarse, fine);
}

}  // namespace holod
