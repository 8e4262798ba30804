#include "lpdr/complex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace lpdr {

namespace {

// Union-find over vertex positions.
class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

MetricComplex::MetricComplex(std::vector<VertexId> ids, Eigen::MatrixXd coords,
                             std::vector<Simplex> simplices)
    : vertex_ids_(std::move(ids)), coords_(std::move(coords)) {
  if (Eigen::Index(vertex_ids_.size()) != coords_.cols()) {
    throw Error(ErrorCode::kBadDimension, "coordinate matrix does not match the vertex table");
  }
  if (std::adjacent_find(vertex_ids_.begin(), vertex_ids_.end(), std::greater_equal<>()) !=
      vertex_ids_.end()) {
    throw Error(ErrorCode::kDegenerateSimplex, "vertex ids must be distinct");
  }

  int top = vertex_ids_.empty() ? -1 : 0;
  for (const auto& s : simplices) top = std::max(top, s.dim());
  simplices_.assign(std::size_t(top + 1), {});
  if (top < 0) return;

  for (VertexId v : vertex_ids_) simplices_[0].push_back(Simplex{v});
  for (const auto& s : simplices) {
    for (VertexId v : s) {
      if (!has_vertex(v)) {
        throw Error(ErrorCode::kMissingVertex, "vertex " + std::to_string(v) + " of " + s.to_string());
      }
    }
    const int n = s.size();
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
      std::array<VertexId, kMaxSimplexVertices> buf{};
      int m = 0;
      for (int i = 0; i < n; ++i) {
        if (mask & (1u << i)) buf[m++] = s[i];
      }
      if (m == 1) continue;
      simplices_[std::size_t(m - 1)].push_back(Simplex(std::span<const VertexId>(buf.data(), std::size_t(m))));
    }
  }
  for (auto& level : simplices_) {
    std::sort(level.begin(), level.end());
    level.erase(std::unique(level.begin(), level.end()), level.end());
  }

  coface_offsets_.resize(simplices_.size());
  coface_targets_.resize(simplices_.size());
  for (int k = 0; k + 1 <= top; ++k) {
    const auto& lower = simplices_[std::size_t(k)];
    const auto& upper = simplices_[std::size_t(k + 1)];
    auto& offsets = coface_offsets_[std::size_t(k)];
    auto& targets = coface_targets_[std::size_t(k)];
    offsets.assign(lower.size() + 1, 0);
    std::vector<Index> face_of(upper.size() * std::size_t(k + 2));
    for (Index j = 0; j < upper.size(); ++j) {
      for (int i = 0; i < k + 2; ++i) {
        const Simplex f = upper[j].face(i);
        const Index fi = Index(std::lower_bound(lower.begin(), lower.end(), f) - lower.begin());
        face_of[j * std::size_t(k + 2) + std::size_t(i)] = fi;
        ++offsets[fi + 1];
      }
    }
    std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
    targets.resize(offsets.back());
    std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
    for (Index j = 0; j < upper.size(); ++j) {
      for (int i = 0; i < k + 2; ++i) targets[cursor[face_of[j * std::size_t(k + 2) + std::size_t(i)]]++] = j;
    }
  }
  coface_offsets_[std::size_t(top)].assign(simplices_[std::size_t(top)].size() + 1, 0);

  for (int k = 0; k <= top; ++k) {
    for (Index i = 0; i < simplices_[std::size_t(k)].size(); ++i) {
      if (coface_indices(k, i).empty()) facets_.push_back(simplices_[std::size_t(k)][i]);
    }
  }
}

std::size_t MetricComplex::count(int k) const noexcept {
  return (k < 0 || k > dim()) ? 0 : simplices_[std::size_t(k)].size();
}

std::size_t MetricComplex::total_count() const noexcept {
  std::size_t total = 0;
  for (const auto& level : simplices_) total += level.size();
  return total;
}

std::span<const Simplex> MetricComplex::simplices(int k) const noexcept {
  if (k < 0 || k > dim()) return {};
  return simplices_[std::size_t(k)];
}

bool MetricComplex::has_vertex(VertexId v) const noexcept {
  return std::binary_search(vertex_ids_.begin(), vertex_ids_.end(), v);
}

Index MetricComplex::vertex_index(VertexId v) const {
  auto it = std::lower_bound(vertex_ids_.begin(), vertex_ids_.end(), v);
  if (it == vertex_ids_.end() || *it != v) {
    throw Error(ErrorCode::kMissingVertex, "vertex " + std::to_string(v));
  }
  return Index(it - vertex_ids_.begin());
}

std::optional<Index> MetricComplex::index_of(const Simplex& s) const noexcept {
  if (s.empty() || s.dim() > dim()) return std::nullopt;
  const auto& level = simplices_[std::size_t(s.dim())];
  auto it = std::lower_bound(level.begin(), level.end(), s);
  if (it == level.end() || !(*it == s)) return std::nullopt;
  return Index(it - level.begin());
}

Index MetricComplex::require_index(const Simplex& s) const {
  auto idx = index_of(s);
  if (!idx) throw Error(ErrorCode::kMissingSimplex, s.to_string());
  return *idx;
}

std::span<const Index> MetricComplex::coface_indices(int k, Index i) const noexcept {
  if (k < 0 || k >= dim()) return {};
  const auto& offsets = coface_offsets_[std::size_t(k)];
  const auto& targets = coface_targets_[std::size_t(k)];
  return {targets.data() + offsets[i], offsets[i + 1] - offsets[i]};
}

std::vector<Simplex> MetricComplex::cofaces(const Simplex& s) const {
  const Index i = require_index(s);
  std::vector<Simplex> out;
  for (Index j : coface_indices(s.dim(), i)) out.push_back(simplices_[std::size_t(s.dim() + 1)][j]);
  return out;
}

bool MetricComplex::is_facet(const Simplex& s) const {
  return coface_indices(s.dim(), require_index(s)).empty();
}

std::vector<Simplex> MetricComplex::facets_containing(const Simplex& s) const {
  std::vector<Simplex> out;
  std::vector<Index> frontier{require_index(s)};
  for (int k = s.dim(); !frontier.empty(); ++k) {
    std::vector<Index> next;
    for (Index i : frontier) {
      auto up = coface_indices(k, i);
      if (up.empty()) {
        out.push_back(simplices_[std::size_t(k)][i]);
      } else {
        next.insert(next.end(), up.begin(), up.end());
      }
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    frontier = std::move(next);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t MetricComplex::vertex_degree(VertexId v) const {
  return coface_indices(0, vertex_index(v)).size();
}

long MetricComplex::euler_characteristic() const noexcept {
  long chi = 0;
  for (int k = 0; k <= dim(); ++k) chi += (k % 2 == 0 ? 1 : -1) * long(count(k));
  return chi;
}

Eigen::MatrixXd MetricComplex::edge_matrix(const Simplex& s) const {
  Eigen::MatrixXd E(ambient_dim(), std::max(0, s.dim()));
  const auto base = coords_.col(Eigen::Index(vertex_index(s[0])));
  for (int j = 1; j < s.size(); ++j) E.col(j - 1) = coords_.col(Eigen::Index(vertex_index(s[j]))) - base;
  return E;
}

double MetricComplex::volume(const Simplex& s) const {
  if (s.dim() <= 0) return 1.0;
  const Eigen::MatrixXd E = edge_matrix(s);
  const double gram = (E.transpose() * E).determinant();
  double fact = 1.0;
  for (int j = 2; j <= s.dim(); ++j) fact *= j;
  return std::sqrt(std::max(gram, 0.0)) / fact;
}

bool operator==(const MetricComplex& a, const MetricComplex& b) {
  return a.vertex_ids_ == b.vertex_ids_ && a.coords_.rows() == b.coords_.rows() &&
         a.coords_.cols() == b.coords_.cols() && a.coords_ == b.coords_ && a.simplices_ == b.simplices_;
}

MetricComplex build_complex(const std::map<VertexId, Eigen::VectorXd>& vertices,
                            const std::vector<std::vector<VertexId>>& top_simplices) {
  std::vector<VertexId> ids;
  Eigen::Index d = vertices.empty() ? 0 : vertices.begin()->second.size();
  Eigen::MatrixXd coords(d, Eigen::Index(vertices.size()));
  Eigen::Index col = 0;
  for (const auto& [id, x] : vertices) {
    if (x.size() != d) throw Error(ErrorCode::kBadDimension, "coordinate vectors differ in length");
    ids.push_back(id);
    coords.col(col++) = x;
  }
  std::vector<Simplex> simplices;
  simplices.reserve(top_simplices.size());
  for (const auto& tuple : top_simplices) {
    if (tuple.empty()) continue;
    simplices.emplace_back(std::span<const VertexId>(tuple));
  }
  return MetricComplex(std::move(ids), std::move(coords), std::move(simplices));
}

MetricComplex closure(const MetricComplex& K, std::span<const Simplex> simplices) {
  std::vector<VertexId> used;
  for (const auto& s : simplices) {
    K.require_index(s);
    used.insert(used.end(), s.begin(), s.end());
  }
  std::sort(used.begin(), used.end());
  used.erase(std::unique(used.begin(), used.end()), used.end());
  Eigen::MatrixXd coords(K.ambient_dim(), Eigen::Index(used.size()));
  for (std::size_t j = 0; j < used.size(); ++j) {
    coords.col(Eigen::Index(j)) = K.coordinates().col(Eigen::Index(K.vertex_index(used[j])));
  }
  return MetricComplex(std::move(used), std::move(coords), std::vector<Simplex>(simplices.begin(), simplices.end()));
}

MetricComplex skeleton(const MetricComplex& K, int m) {
  if (m < 0 || m > K.dim()) {
    throw Error(ErrorCode::kBadDimension, "skeleton dimension " + std::to_string(m) + " out of range");
  }
  auto level = K.simplices(m);
  std::vector<Simplex> tops(level.begin(), level.end());
  std::vector<VertexId> ids(K.vertex_ids().begin(), K.vertex_ids().end());
  return MetricComplex(std::move(ids), K.coordinates(), std::move(tops));
}

MetricComplex star(const MetricComplex& K, VertexId v) {
  const Simplex vertex{v};
  if (!K.has_vertex(v)) throw Error(ErrorCode::kMissingVertex, "vertex " + std::to_string(v));
  auto tops = K.facets_containing(vertex);
  return closure(K, tops);
}

bool is_subcomplex(const MetricComplex& S, const MetricComplex& K, double tol) {
  if (S.dim() < 0) return true;
  if (S.ambient_dim() != K.ambient_dim()) return false;
  for (VertexId v : S.vertex_ids()) {
    if (!K.has_vertex(v)) return false;
    if ((S.coordinate(v) - K.coordinate(v)).norm() > tol) return false;
  }
  for (int k = 1; k <= S.dim(); ++k) {
    for (const auto& s : S.simplices(k)) {
      if (!K.contains(s)) return false;
    }
  }
  return true;
}

Subdivision barycentric_subdivision(const MetricComplex& K) {
  Subdivision out;
  out.barycenter.resize(std::size_t(std::max(K.dim() + 1, 0)));
  std::vector<VertexId> ids;
  ids.reserve(K.total_count());
  Eigen::MatrixXd coords(K.ambient_dim(), Eigen::Index(K.total_count()));
  VertexId next = 0;
  for (int k = 0; k <= K.dim(); ++k) {
    auto& ids_k = out.barycenter[std::size_t(k)];
    ids_k.reserve(K.count(k));
    for (const auto& s : K.simplices(k)) {
      Eigen::VectorXd c = Eigen::VectorXd::Zero(K.ambient_dim());
      for (VertexId v : s) c += K.coordinates().col(Eigen::Index(K.vertex_index(v)));
      coords.col(next) = c / double(s.size());
      ids_k.push_back(next);
      ids.push_back(next);
      ++next;
    }
  }

  std::vector<Simplex> flags;
  for (const auto& facet : K.facets()) {
    std::array<VertexId, kMaxSimplexVertices> perm{};
    std::copy(facet.begin(), facet.end(), perm.begin());
    do {
      std::array<VertexId, kMaxSimplexVertices> chain{};
      for (int len = 1; len <= facet.size(); ++len) {
        const Simplex prefix(std::span<const VertexId>(perm.data(), std::size_t(len)));
        chain[std::size_t(len - 1)] = out.barycenter[std::size_t(len - 1)][K.require_index(prefix)];
      }
      flags.emplace_back(std::span<const VertexId>(chain.data(), std::size_t(facet.size())));
    } while (std::next_permutation(perm.begin(), perm.begin() + facet.size()));
  }
  out.refined = MetricComplex(std::move(ids), std::move(coords), std::move(flags));
  return out;
}

GeometryReport validate_bounded_geometry(const MetricComplex& K, double L, std::size_t N) {
  GeometryReport report;
  const double slack = 1e-12;
  const double lo = (1.0 / L) * (1.0 - slack);
  const double hi = L * (1.0 + slack);
  report.min_edge_length = std::numeric_limits<double>::infinity();
  report.max_edge_length = 0.0;

  DisjointSets components(K.num_vertices());
  for (const auto& e : K.simplices(1)) {
    const Index a = K.vertex_index(e[0]);
    const Index b = K.vertex_index(e[1]);
    const double len = (K.coordinates().col(Eigen::Index(a)) - K.coordinates().col(Eigen::Index(b))).norm();
    report.min_edge_length = std::min(report.min_edge_length, len);
    report.max_edge_length = std::max(report.max_edge_length, len);
    if (len < lo || len > hi) {
      report.violations.push_back({e, "edge length " + std::to_string(len) + " outside [1/L, L]"});
    }
    components.unite(a, b);
  }
  if (K.count(1) == 0) report.min_edge_length = 0.0;

  for (Index i = 0; i < K.num_vertices(); ++i) {
    const std::size_t deg = K.coface_indices(0, i).size();
    report.max_vertex_degree = std::max(report.max_vertex_degree, deg);
    if (deg > N) {
      report.violations.push_back({Simplex{K.vertex_ids()[i]},
                                   "vertex degree " + std::to_string(deg) + " exceeds N"});
    }
  }

  if (K.num_vertices() > 0) {
    const std::size_t root = components.find(0);
    for (Index i = 1; i < K.num_vertices(); ++i) {
      if (components.find(i) != root) {
        report.connected = false;
        report.violations.push_back({Simplex{K.vertex_ids()[i]}, "complex is disconnected"});
        break;
      }
    }
  }
  report.passes = report.violations.empty();
  return report;
}

MetricComplex ray_complex(int n, std::size_t M) {
  if (n != 1 && n != 2) throw Error(ErrorCode::kBadDimension, "ray_complex supports n = 1 or 2");
  if (M < 1) throw Error(ErrorCode::kBadDimension, "ray_complex needs M >= 1");
  std::vector<VertexId> ids;
  std::vector<Simplex> tops;
  Eigen::MatrixXd coords;
  if (n == 1) {
    coords.resize(1, Eigen::Index(M + 1));
    for (std::size_t i = 0; i <= M; ++i) {
      ids.push_back(VertexId(i));
      coords(0, Eigen::Index(i)) = double(i);
    }
    tops.reserve(M);
    for (std::size_t i = 0; i < M; ++i) tops.push_back(Simplex{VertexId(i), VertexId(i + 1)});
  } else {
    // Vertex (i, j) has id 2i + j.
    coords.resize(2, Eigen::Index(2 * (M + 1)));
    for (std::size_t i = 0; i <= M; ++i) {
      for (int j = 0; j < 2; ++j) {
        const VertexId id = VertexId(2 * i + std::size_t(j));
        ids.push_back(id);
        coords(0, id) = double(i);
        coords(1, id) = double(j);
      }
    }
    tops.reserve(2 * M);
    for (std::size_t i = 0; i < M; ++i) {
      const VertexId a0 = VertexId(2 * i), a1 = a0 + 1, b0 = a0 + 2, b1 = a0 + 3;
      tops.push_back(Simplex{a0, b0, b1});
      tops.push_back(Simplex{a0, a1, b1});
    }
  }
  return MetricComplex(std::move(ids), std::move(coords), std::move(tops));
}

}  // namespace lpdr
