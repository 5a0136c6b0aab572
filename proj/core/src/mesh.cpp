#include "holod/mesh.hpp"

#include <algorithm>
#include <string>

namespace holod {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

TensorMesh::TensorMesh(int dimension, int cells_per_axis)
    : dim_(dimension), n_(cells_per_axis) {
  if (dim_ != 1 && dim_ != 2) {
    throw ConfigError("TensorMesh: dimension must be 1 or 2, got " +
                      std::to_string(dim_));
  }
  if (!is_power_of_two(n_)) {
    throw ConfigError(
        "TensorMesh: cells_per_axis must be a positive power of two, got " +
        std::to_string(n_));
  }
}

int TensorMesh::n_elements() const {
  int count = n_;
  for (int a = 1; a < dim_; ++a) count *= n_;
  return count;
}

int TensorMesh::n_vertices() const {
  int count = n_ + 1;
  for (int a = 1; a < dim_; ++a) count *= n_ + 1;
  return count;
}

MultiIndex TensorMesh::element_index(int element) const {
  MultiIndex idx{0, 0};
  idx[0] = element % n_;
  if (dim_ == 2) idx[1] = element / n_;
  return idx;
}

int TensorMesh::element_at(const MultiIndex& idx) const {
  return idx[0] + (dim_ == 2 ? n_ * idx[1] : 0);
}

MultiIndex TensorMesh::vertex_index(int vertex) const {
  const int nv = n_ + 1;
  MultiIndex idx{0, 0};
  idx[0] = vertex % nv;
  if (dim_ == 2) idx[1] = vertex / nv;
  return idx;
}

int TensorMesh::vertex_at(const MultiIndex& idx) const {
  return idx[0] + (dim_ == 2 ? (n_ + 1) * idx[1] : 0);
}

std::array<double, 2> TensorMesh::element_lower_corner(int element) const {
  const MultiIndex idx = element_index(element);
  return {idx[0] * mesh_size(), idx[1] * mesh_size()};
}

std::array<double, 2> TensorMesh::vertex_coords(int vertex) const {
  const MultiIndex idx = vertex_index(vertex);
  return {idx[0] * mesh_size(), idx[1] * mesh_size()};
}

std::vector<int> TensorMesh::element_vertices(int element) const {
  const MultiIndex idx = element_index(element);
  std::vector<int> verts;
  if (dim_ == 1) {
    verts = {idx[0], idx[0] + 1};
  } else {
    verts.reserve(4);
    for (int b = 0; b <= 1; ++b) {
      for (int a = 0; a <= 1; ++a) {
        verts.push_back(vertex_at({idx[0] + a, idx[1] + b}));
      }
    }
  }
  return verts;
}

bool TensorMesh::is_boundary_vertex(int vertex) const {
  const MultiIndex idx = vertex_index(vertex);
  for (int a = 0; a < dim_; ++a) {
    if (idx[a] == 0 || idx[a] == n_) return true;
  }
  return false;
}

ElementSet::ElementSet(std::vector<int> indices, int n_elements)
    : indices_(std::move(indices)) {
  std::sort(indices_.begin(), indices_.end());
  if (std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end()) {
    throw ConfigError("ElementSet: duplicate element index");
  }
  if (!indices_.empty() &&
      (indices_.front() < 0 || indices_.back() >= n_elements)) {
    throw ConfigError("ElementSet: element index out of range");
  }
}

bool ElementSet::contains(int element) const {
  return std::binary_search(indices_.begin(), indices_.end(), element);
}

std::pair<MultiIndex, MultiIndex> patch_box(const TensorMesh& mesh,
                                            int element, int ell) {
  if (ell < 1) throw ConfigError("patch: ell must be >= 1");
  const MultiIndex idx = mesh.element_index(element);
  MultiIndex lo{0, 0};
  MultiIndex hi{0, 0};
  for (int a = 0; a < mesh.dimension(); ++a) {
    lo[a] = std::max(0, idx[a] - ell);
    hi[a] = std::min(mesh.cells_per_axis() - 1, idx[a] + ell);
  }
  return {lo, hi};
}

ElementSet patch(const TensorMesh& mesh, int element, int ell) {
  const auto [lo, hi] = patch_box(mesh, element, ell);
  std::vector<int> elems;
  if (mesh.dimension() == 1) {
    for (int i = lo[0]; i <= hi[0]; ++i) elems.push_back(i);
  } else {
    for (int j = lo[1]; j <= hi[1]; ++j) {
      for (int i = lo[0]; i <= hi[0]; ++i) {
        elems.push_back(mesh.element_at({i, j}));
      }
    }
  }
  return ElementSet(std::move(elems), mesh.n_elements());
}

NestingMap::NestingMap(TensorMesh coarse, TensorMesh fine)
    : coarse_(coarse), fine_(fine) {
  if (coarse_.dimension() != fine_.dimension()) {
    throw NonNestedMeshes("NestingMap: dimensions differ");
  }
  if (fine_.cells_per_axis() % coarse_.cells_per_axis() != 0) {
    throw NonNestedMeshes(
        "NestingMap: fine cells_per_axis not a multiple of coarse");
  }
  ratio_ = fine_.cells_per_axis() / coarse_.cells_per_axis();
}

std::vector<int> NestingMap::children(int coarse_element) const {
  const MultiIndex cidx = coarse_.element_index(coarse_element);
  std::vector<int> out;
  if (coarse_.dimension() == 1) {
    out.reserve(static_cast<size_t>(ratio_));
    for (int i = 0; i < ratio_; ++i) {
      out.push_back(cidx[0] * ratio_ + i);
    }
  } else {
    out.reserve(static_cast<size_t>(ratio_) * ratio_);
    for (int j = 0; j < ratio_; ++j) {
      for (int i = 0; i < ratio_; ++i) {
        out.push_back(
            fine_.element_at({cidx[0] * ratio_ + i, cidx[1] * ratio_ + j}));
      }
    }
  }
  return out;
}

int NestingMap::parent(int fine_element) const {
  const MultiIndex fidx = fine_.element_index(fine_element);
  return coarse_.element_at({fidx[0] / ratio_, fidx[1] / ratio_});
}

}  // namespace holod
