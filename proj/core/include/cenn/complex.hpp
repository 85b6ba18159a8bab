#pragma once

#include "cenn/common.hpp"

#include <string>
#include <vector>

namespace cenn {

struct Cell {
  std::string id;
  std::size_t dim = 0;
};

/// Finite regular CW complex given by cells and face pairs (σ face of τ).
class CWComplex {
 public:
  /// Throws Error(invalid_complex) for unknown cells, duplicate ids, face pairs that do not
  /// drop dimension, or (for complexes of dimension ≤ 1) edges without exactly two vertices.
  CWComplex(std::vector<Cell> cells, std::vector<std::pair<std::string, std::string>> faces);

  /// Path graph v0 - e01 - v1 - … with n vertices.
  static CWComplex path_graph(std::size_t n);
  /// Cycle graph on n vertices (n ≥ 3); n = 3 is the triangle K3.
  static CWComplex cycle_graph(std::size_t n);
  /// Simple graph from an edge list over vertices v0..v{n-1}.
  static CWComplex graph(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges);
  /// A single 2-cell glued along the cycle graph on n vertices.
  static CWComplex polygon(std::size_t n);

  std::size_t size() const noexcept { return cells_.size(); }
  const std::vector<Cell>& cells() const noexcept { return cells_; }
  const Cell& cell(std::size_t i) const { return cells_.at(i); }
  std::size_t find(std::string_view id) const;
  const std::vector<std::pair<std::string, std::string>>& faces() const noexcept { return faces_; }

  /// σ ≤ τ in the reflexive-transitive closure of the face relation.
  bool leq(std::size_t s, std::size_t t) const { return order_[s][t]; }
  /// Covering pairs (transitive reduction), as (lower, upper) cell indices.
  const std::vector<std::pair<std::size_t, std::size_t>>& covers() const noexcept { return covers_; }
  bool covers_pair(std::size_t lower, std::size_t upper) const { return cover_[lower][upper]; }
  /// Undirected Hasse-diagram neighbours.
  const std::vector<std::size_t>& neighbours(std::size_t i) const { return adjacency_[i]; }

 private:
  std::vector<Cell> cells_;
  std::vector<std::pair<std::string, std::string>> faces_;
  std::vector<std::vector<bool>> order_;
  std::vector<std::vector<bool>> cover_;
  std::vector<std::pair<std::size_t, std::size_t>> covers_;
  std::vector<std::vector<std::size_t>> adjacency_;
};

/// Cells within Hasse distance k of the root, ordered by (dim, cell id).
struct RootedPatch {
  const CWComplex* complex = nullptr;
  std::size_t root = 0;                // cell index in the complex
  std::vector<std::size_t> vertices;   // cell indices, canonical order
  std::size_t root_position = 0;       // position of the root inside vertices

  std::size_t size() const { return vertices.size(); }
  std::size_t dim(std::size_t i) const { return complex->cell(vertices[i]).dim; }
  /// Induced order relation between patch vertices i ≤ j.
  bool leq(std::size_t i, std::size_t j) const { return complex->leq(vertices[i], vertices[j]); }
  /// Induced covering relation between patch vertices.
  bool covers(std::size_t i, std::size_t j) const { return complex->covers_pair(vertices[i], vertices[j]); }
};

RootedPatch extract_patch(const CWComplex& k, std::size_t root, std::size_t radius);

/// Bijection as target positions: phi[i] = position in p2 of the image of p1's vertex i.
using PatchMap = std::vector<std::size_t>;

/// Root-, dimension- and incidence-preserving bijections p1 → p2 in lexicographic order.
/// Incidence is the induced face order, preserved in both directions.
std::vector<PatchMap> enumerate_rooted_isomorphisms(const RootedPatch& p1, const RootedPatch& p2);

}  // namespace cenn
