#include "lpdr/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lpdr/error.hpp"

namespace lpdr {

GaussRule gauss_legendre(int q) {
  if (q < 1) throw Error(ErrorCode::kBadDimension, "Gauss rule needs at least one node");
  GaussRule rule;
  rule.nodes.resize(std::size_t(q));
  rule.weights.resize(std::size_t(q));
  const double pi = std::acos(-1.0);
  for (int i = 0; i < (q + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (q + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= q; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = q * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // x is the i-th largest root; store both mirrored nodes on [0, 1].
    rule.nodes[std::size_t(i)] = 0.5 * (1.0 - x);
    rule.nodes[std::size_t(q - 1 - i)] = 0.5 * (1.0 + x);
    rule.weights[std::size_t(i)] = 0.5 * w;
    rule.weights[std::size_t(q - 1 - i)] = 0.5 * w;
  }
  return rule;
}

SimplexRule simplex_rule(int m, int degree) {
  SimplexRule rule;
  if (m == 0) {
    rule.points.resize(0, 1);
    rule.weights = Eigen::VectorXd::Ones(1);
    return rule;
  }
  const int q = std::max(1, (std::max(degree, 0) + m + 1) / 2);
  const GaussRule g = gauss_legendre(q);
  std::size_t total = 1;
  for (int a = 0; a < m; ++a) total *= std::size_t(q);
  rule.points.resize(m, Eigen::Index(total));
  rule.weights.resize(Eigen::Index(total));
  std::vector<int> idx(static_cast<std::size_t>(m), 0);
  double factorial = 1.0;
  for (int j = 2; j <= m; ++j) factorial *= j;
  for (std::size_t n = 0; n < total; ++n) {
    std::size_t rest = n;
    for (int a = 0; a < m; ++a) {
      idx[std::size_t(a)] = int(rest % std::size_t(q));
      rest /= std::size_t(q);
    }
    double remaining = 1.0;
    double w = factorial;
    for (int a = 0; a < m; ++a) {
      const double u = g.nodes[std::size_t(idx[std::size_t(a)])];
      rule.points(a, Eigen::Index(n)) = remaining * u;
      w *= g.weights[std::size_t(idx[std::size_t(a)])] * remaining;
      remaining *= 1.0 - u;
    }
    rule.weights(Eigen::Index(n)) = w;
  }
  return rule;
}

std::vector<Eigen::MatrixXd> edgewise_subdivision(int m, int r) {
  // Cells of the Kuhn triangulation of the ordered simplex {r >= x_1 >= ... >= x_m >= 0},
  // pulled back to the reference simplex through s_j = (x_j - x_{j+1}) / r.
  std::vector<Eigen::MatrixXd> cells;
  if (m == 0) {
    cells.emplace_back(0, 1);
    return cells;
  }
  std::size_t corners = 1;
  for (int a = 0; a < m; ++a) corners *= std::size_t(r);
  std::vector<int> perm(static_cast<std::size_t>(m));
  std::vector<int> c(static_cast<std::size_t>(m));
  Eigen::MatrixXi path(m, m + 1);
  for (std::size_t n = 0; n < corners; ++n) {
    std::size_t rest = n;
    for (int a = 0; a < m; ++a) {
      c[std::size_t(a)] = int(rest % std::size_t(r));
      rest /= std::size_t(r);
    }
    std::iota(perm.begin(), perm.end(), 0);
    do {
      for (int a = 0; a < m; ++a) path(a, 0) = c[std::size_t(a)];
      for (int l = 1; l <= m; ++l) {
        path.col(l) = path.col(l - 1);
        path(perm[std::size_t(l - 1)], l) += 1;
      }
      bool inside = true;
      for (int l = 0; l <= m && inside; ++l) {
        if (path(0, l) > r || path(m - 1, l) < 0) inside = false;
        for (int a = 0; a + 1 < m && inside; ++a) {
          if (path(a, l) < path(a + 1, l)) inside = false;
        }
      }
      if (!inside) continue;
      Eigen::MatrixXd cell(m, m + 1);
      for (int l = 0; l <= m; ++l) {
        for (int a = 0; a < m; ++a) {
          const int next = a + 1 < m ? path(a + 1, l) : 0;
          cell(a, l) = double(path(a, l) - next) / r;
        }
      }
      cells.push_back(std::move(cell));
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return cells;
}

SimplexRule refined_simplex_rule(int m, int degree, int r) {
  const SimplexRule base = simplex_rule(m, degree);
  if (r <= 1 || m == 0) return base;
  const auto cells = edgewise_subdivision(m, r);
  const Eigen::Index per = base.weights.size();
  SimplexRule rule;
  rule.points.resize(m, per * Eigen::Index(cells.size()));
  rule.weights.resize(per * Eigen::Index(cells.size()));
  const double share = 1.0 / double(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const Eigen::MatrixXd& V = cells[c];
    const Eigen::MatrixXd E = V.rightCols(m).colwise() - V.col(0);
    for (Eigen::Index i = 0; i < per; ++i) {
      rule.points.col(Eigen::Index(c) * per + i) = V.col(0) + E * base.points.col(i);
      rule.weights(Eigen::Index(c) * per + i) = share * base.weights(i);
    }
  }
  return rule;
}

Eigen::MatrixXd barycentric_lattice(int m, int r) {
  std::vector<std::vector<int>> points;
  // Enumerate compositions of r into m + 1 parts via the independent coordinates a_1..a_m.
  std::vector<int> idx(static_cast<std::size_t>(m), 0);
  while (true) {
    int sum = std::accumulate(idx.begin(), idx.end(), 0);
    if (sum <= r) points.push_back(idx);
    int pos = 0;
    while (pos < m) {
      if (++idx[std::size_t(pos)] <= r) break;
      idx[std::size_t(pos)] = 0;
      ++pos;
    }
    if (pos == m) break;
  }
  Eigen::MatrixXd out(m, Eigen::Index(points.size()));
  for (std::size_t n = 0; n < points.size(); ++n) {
    for (int j = 0; j < m; ++j) out(j, Eigen::Index(n)) = double(points[n][std::size_t(j)]) / r;
  }
  return out;
}

}  // namespace lpdr
