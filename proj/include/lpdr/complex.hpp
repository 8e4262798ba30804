#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lpdr/simplex.hpp"

namespace lpdr {

using Index = std::size_t;

/// Finite metric simplicial complex with embedded vertex coordinates.
///
/// Immutable once built. Simplices are kept per dimension in lexicographic
/// order; the coface relation (codimension one) is stored in CSR form and is
/// the exact inverse of the face relation. Every vertex of the vertex table
/// belongs to the complex, even when no higher simplex uses it.
class MetricComplex {
 public:
  MetricComplex() = default;

  /// `ids` must be strictly increasing; column j of `coords` belongs to ids[j].
  /// `simplices` may list any simplices; the face closure is computed here.
  MetricComplex(std::vector<VertexId> ids, Eigen::MatrixXd coords, std::vector<Simplex> simplices);

  /// Top dimension, -1 for the empty complex.
  int dim() const noexcept { return int(simplices_.size()) - 1; }
  int ambient_dim() const noexcept { return int(coords_.rows()); }
  std::size_t num_vertices() const noexcept { return vertex_ids_.size(); }
  std::size_t count(int k) const noexcept;
  std::size_t total_count() const noexcept;

  std::span<const Simplex> simplices(int k) const noexcept;
  std::span<const VertexId> vertex_ids() const noexcept { return vertex_ids_; }
  const Eigen::MatrixXd& coordinates() const noexcept { return coords_; }

  bool has_vertex(VertexId v) const noexcept;
  /// Column of `v` in `coordinates()`; throws MissingVertex.
  Index vertex_index(VertexId v) const;
  Eigen::VectorXd coordinate(VertexId v) const { return coords_.col(Eigen::Index(vertex_index(v))); }

  std::optional<Index> index_of(const Simplex& s) const noexcept;
  bool contains(const Simplex& s) const noexcept { return index_of(s).has_value(); }
  /// Throws MissingSimplex.
  Index require_index(const Simplex& s) const;

  /// Indices (into dimension k+1) of the codimension-one cofaces of simplex i of dimension k.
  std::span<const Index> coface_indices(int k, Index i) const noexcept;
  std::vector<Simplex> cofaces(const Simplex& s) const;

  /// Maximal simplices, ordered by (dimension, key).
  std::span<const Simplex> facets() const noexcept { return facets_; }
  bool is_facet(const Simplex& s) const;
  /// Maximal simplices containing `s` (s must be in the complex).
  std::vector<Simplex> facets_containing(const Simplex& s) const;

  /// Number of edges incident to `v`.
  std::size_t vertex_degree(VertexId v) const;
  long euler_characteristic() const noexcept;

  /// Unsigned k-volume of a simplex from its embedded coordinates (Gram determinant).
  double volume(const Simplex& s) const;
  /// Columns v_1 - v_0, ..., v_k - v_0 of the simplex in ascending vertex order.
  Eigen::MatrixXd edge_matrix(const Simplex& s) const;

  friend bool operator==(const MetricComplex& a, const MetricComplex& b);

 private:
  std::vector<VertexId> vertex_ids_;
  Eigen::MatrixXd coords_;
  std::vector<std::vector<Simplex>> simplices_;
  std::vector<std::vector<std::size_t>> coface_offsets_;
  std::vector<std::vector<Index>> coface_targets_;
  std::vector<Simplex> facets_;
};

/// Builds a face-closed complex. Errors: DegenerateSimplex (repeated id in a tuple),
/// MissingVertex (unknown id), BadDimension (coordinate lengths differ).
MetricComplex build_complex(const std::map<VertexId, Eigen::VectorXd>& vertices,
                            const std::vector<std::vector<VertexId>>& top_simplices);

/// Subcomplex spanned by the closure of `simplices`, keeping only the vertices it uses.
MetricComplex closure(const MetricComplex& K, std::span<const Simplex> simplices);

/// Simplices of dimension <= m. BadDimension unless 0 <= m <= dim K.
MetricComplex skeleton(const MetricComplex& K, int m);

/// Closed star of a vertex. MissingVertex if absent.
MetricComplex star(const MetricComplex& K, VertexId v);

/// True when every simplex of `S` is a simplex of `K` with matching coordinates.
bool is_subcomplex(const MetricComplex& S, const MetricComplex& K, double tol = 1e-12);

struct Subdivision {
  MetricComplex refined;
  /// barycenter[k][i] is the vertex of `refined` placed at the barycenter of simplex i of dimension k.
  std::vector<std::vector<VertexId>> barycenter;
};

/// First barycentric subdivision. New vertex ids enumerate the simplices of K
/// in (dimension, key) order, so vertex j of K (by position) becomes id j.
Subdivision barycentric_subdivision(const MetricComplex& K);
inline MetricComplex barycentric_subdivide(const MetricComplex& K) {
  return barycentric_subdivision(K).refined;
}

struct GeometryViolation {
  Simplex simplex;
  std::string reason;
};

struct GeometryReport {
  std::size_t max_vertex_degree = 0;
  double min_edge_length = 0.0;
  double max_edge_length = 0.0;
  bool connected = true;
  bool passes = true;
  std::vector<GeometryViolation> violations;
};

/// Flags edges outside [1/L, L], vertices with more than N edges, and disconnection.
/// Edge lengths are compared with a relative slack of 1e-12.
GeometryReport validate_bounded_geometry(const MetricComplex& K, double L, std::size_t N);

/// Truncated ray: n = 1 gives a path of M unit edges on the x-axis,
/// n = 2 a strip of 2M unit right triangles over [0, M] x [0, 1].
MetricComplex ray_complex(int n, std::size_t M);

}  // namespace lpdr
