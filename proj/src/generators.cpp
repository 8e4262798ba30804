#include "lpdr/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace lpdr {

namespace {

void add_all_faces(const Simplex& s, std::set<Simplex>& out) {
  const int n = s.size();
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    std::array<VertexId, kMaxSimplexVertices> buf{};
    int m = 0;
    for (int i = 0; i < n; ++i) {
      if (mask & (1u << i)) buf[m++] = s[i];
    }
    out.insert(Simplex(std::span<const VertexId>(buf.data(), std::size_t(m))));
  }
}

std::size_t new_faces(const Simplex& s, const std::set<Simplex>& have) {
  std::set<Simplex> faces;
  add_all_faces(s, faces);
  std::size_t fresh = 0;
  for (const auto& f : faces) fresh += have.count(f) == 0;
  return fresh;
}

std::vector<VertexId> iota_ids(std::size_t n) {
  std::vector<VertexId> ids(n);
  std::iota(ids.begin(), ids.end(), 0);
  return ids;
}

}  // namespace

MetricComplex regular_simplex(int k) {
  if (k < 0 || k >= kMaxSimplexVertices) throw Error(ErrorCode::kBadDimension, "regular_simplex dimension");
  Eigen::MatrixXd coords = Eigen::MatrixXd::Identity(k + 1, k + 1) / std::sqrt(2.0);
  auto ids = iota_ids(std::size_t(k + 1));
  std::vector<Simplex> tops{Simplex(std::span<const VertexId>(ids))};
  return MetricComplex(ids, std::move(coords), std::move(tops));
}

MetricComplex simplex_boundary(int k) {
  if (k < 1) throw Error(ErrorCode::kBadDimension, "simplex_boundary needs k >= 1");
  const MetricComplex full = regular_simplex(k);
  return skeleton(full, k - 1);
}

MetricComplex cone(const MetricComplex& K) {
  const int d = K.ambient_dim();
  const Eigen::Index V = Eigen::Index(K.num_vertices());
  Eigen::MatrixXd coords = Eigen::MatrixXd::Zero(d + 1, V + 1);
  coords.topLeftCorner(d, V) = K.coordinates();
  if (V > 0) coords.col(V).head(d) = K.coordinates().rowwise().mean();
  coords(d, V) = 1.0;
  std::vector<VertexId> ids(K.vertex_ids().begin(), K.vertex_ids().end());
  const VertexId apex = ids.empty() ? 0 : ids.back() + 1;
  ids.push_back(apex);
  std::vector<Simplex> tops{Simplex{apex}};
  for (const auto& f : K.facets()) tops.push_back(f.join(Simplex{apex}));
  return MetricComplex(std::move(ids), std::move(coords), std::move(tops));
}

MetricComplex hexagonal_fan() {
  Eigen::MatrixXd coords = Eigen::MatrixXd::Zero(2, 7);
  const double pi = std::acos(-1.0);
  for (int j = 0; j < 6; ++j) {
    coords(0, j + 1) = std::cos(pi * j / 3.0);
    coords(1, j + 1) = std::sin(pi * j / 3.0);
  }
  std::vector<Simplex> tops;
  for (VertexId j = 1; j <= 6; ++j) tops.push_back(Simplex{0, j, VertexId(j % 6 + 1)});
  return MetricComplex(iota_ids(7), std::move(coords), std::move(tops));
}

MetricComplex triangular_lattice(int m) {
  if (m < 1) throw Error(ErrorCode::kBadDimension, "triangular_lattice needs m >= 1");
  const int w = m + 1;
  Eigen::MatrixXd coords(2, w * w);
  for (int j = 0; j < w; ++j) {
    for (int i = 0; i < w; ++i) {
      coords(0, j * w + i) = i + 0.5 * j;
      coords(1, j * w + i) = 0.5 * std::sqrt(3.0) * j;
    }
  }
  std::vector<Simplex> tops;
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      const VertexId a = j * w + i, b = a + 1, c = a + w, e = c + 1;
      tops.push_back(Simplex{a, b, c});
      tops.push_back(Simplex{b, e, c});
    }
  }
  return MetricComplex(iota_ids(std::size_t(w * w)), std::move(coords), std::move(tops));
}

MetricComplex cube_boundary(int n, int cuts) {
  if (n == 1) {
    Eigen::MatrixXd coords(1, 2);
    coords << 0.0, 1.0;
    return MetricComplex(iota_ids(2), std::move(coords), {});
  }
  if (n != 2) throw Error(ErrorCode::kBadDimension, "cube_boundary supports n = 1 or 2");
  if (cuts < 1) throw Error(ErrorCode::kBadDimension, "cube_boundary needs cuts >= 1");
  const int V = 4 * cuts;
  Eigen::MatrixXd coords(2, V);
  const Eigen::Vector2d corners[5] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 0}};
  for (int side = 0; side < 4; ++side) {
    for (int c = 0; c < cuts; ++c) {
      const double t = double(c) / cuts;
      coords.col(side * cuts + c) = (1 - t) * corners[side] + t * corners[side + 1];
    }
  }
  std::vector<Simplex> tops;
  for (VertexId j = 0; j < V; ++j) tops.push_back(Simplex{j, VertexId((j + 1) % V)});
  return MetricComplex(iota_ids(std::size_t(V)), std::move(coords), std::move(tops));
}

MetricComplex random_complex(std::mt19937_64& rng, int dim, std::size_t max_simplices, double jitter) {
  if (dim < 1 || dim > 3) throw Error(ErrorCode::kBadDimension, "random_complex supports dim 1..3");
  const double per_cell = dim == 1 ? 2.0 : dim == 2 ? 6.0 : 24.0;
  const int g = 1 + int(std::ceil(std::pow(double(max_simplices) / per_cell, 1.0 / dim)));
  const int w = g + 1;
  int V = 1;
  for (int a = 0; a < dim; ++a) V *= w;

  std::uniform_real_distribution<double> shake(-jitter, jitter);
  Eigen::MatrixXd coords(dim, V);
  for (int id = 0; id < V; ++id) {
    int rest = id;
    for (int a = 0; a < dim; ++a) {
      coords(a, id) = double(rest % w) + shake(rng);
      rest /= w;
    }
  }

  // Kuhn triangulation of every grid cell.
  std::vector<Simplex> cells;
  std::vector<int> stride(static_cast<std::size_t>(dim));
  for (int a = 0, s = 1; a < dim; ++a, s *= w) stride[std::size_t(a)] = s;
  std::vector<int> corner(static_cast<std::size_t>(dim), 0);
  for (int cell = 0;; ++cell) {
    int rest = cell, base = 0;
    for (int a = 0; a < dim; ++a) {
      corner[std::size_t(a)] = rest % g;
      rest /= g;
      base += corner[std::size_t(a)] * stride[std::size_t(a)];
    }
    if (rest > 0) break;
    std::vector<int> perm(static_cast<std::size_t>(dim));
    std::iota(perm.begin(), perm.end(), 0);
    do {
      std::array<VertexId, kMaxSimplexVertices> ids{};
      int v = base;
      ids[0] = v;
      for (int a = 0; a < dim; ++a) {
        v += stride[std::size_t(perm[std::size_t(a)])];
        ids[std::size_t(a + 1)] = v;
      }
      cells.emplace_back(std::span<const VertexId>(ids.data(), std::size_t(dim + 1)));
    } while (std::next_permutation(perm.begin(), perm.end()));
  }

  // Grow a connected patch from a random seed cell.
  std::set<Simplex> have;
  std::vector<bool> taken(cells.size(), false);
  std::vector<Simplex> chosen;
  std::uniform_int_distribution<std::size_t> pick(0, cells.size() - 1);
  const std::size_t seed_cell = pick(rng);
  if (new_faces(cells[seed_cell], have) <= max_simplices) {
    add_all_faces(cells[seed_cell], have);
    taken[seed_cell] = true;
    chosen.push_back(cells[seed_cell]);
  }
  while (!chosen.empty()) {
    std::vector<std::size_t> candidates;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (taken[c]) continue;
      for (int i = 0; i <= dim; ++i) {
        if (have.count(cells[c].face(i))) {
          candidates.push_back(c);
          break;
        }
      }
    }
    std::shuffle(candidates.begin(), candidates.end(), rng);
    bool grew = false;
    for (std::size_t c : candidates) {
      if (have.size() + new_faces(cells[c], have) <= max_simplices) {
        add_all_faces(cells[c], have);
        taken[c] = true;
        chosen.push_back(cells[c]);
        grew = true;
        break;
      }
    }
    if (!grew) break;
  }

  std::vector<VertexId> used;
  for (const auto& s : chosen) used.insert(used.end(), s.begin(), s.end());
  std::sort(used.begin(), used.end());
  used.erase(std::unique(used.begin(), used.end()), used.end());
  Eigen::MatrixXd sub(dim, Eigen::Index(used.size()));
  for (std::size_t j = 0; j < used.size(); ++j) sub.col(Eigen::Index(j)) = coords.col(used[j]);
  return MetricComplex(std::move(used), std::move(sub), std::move(chosen));
}

std::size_t subdivision_degree_bound(int n, std::size_t N) {
  std::size_t bound = std::size_t(1) << (n + 1);
  std::size_t binom = 1;
  for (int j = 1; j <= n; ++j) {
    binom = binom * (N - std::size_t(j) + 1) / std::size_t(j);
    bound += binom;
  }
  return bound;
}

}  // namespace lpdr
