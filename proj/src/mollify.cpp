#include "lpdr/mollify.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <sstream>

#include "lpdr/complex_io.hpp"
#include "lpdr/error.hpp"
#include "lpdr/quadrature.hpp"

namespace lpdr {

namespace {

double squared_norm(const double* x, int n) {
  double s = 0.0;
  for (int a = 0; a < n; ++a) s += x[a] * x[a];
  return s;
}

// Position of `sub` among the components of a form of the given degree.
std::size_t subset_index(const std::vector<std::vector<int>>& subsets, const std::vector<int>& sub) {
  return std::size_t(std::find(subsets.begin(), subsets.end(), sub) - subsets.begin());
}

// Per unmasked node: y = h^-1(x) and Dh^-1(x), reused for every kernel node.
struct NodeChart {
  double y[2];
  double dinv[2][2];
};

NodeChart node_chart(const double* x, int n) {
  NodeChart c{};
  const double r2 = squared_norm(x, n);
  const double s = 1.0 / std::sqrt(1.0 - r2);
  for (int a = 0; a < n; ++a) {
    c.y[a] = x[a] * s;
    for (int b = 0; b < n; ++b) c.dinv[a][b] = ((a == b ? 1.0 : 0.0) + x[a] * x[b] / (1.0 - r2)) * s;
  }
  return c;
}

// s = h(y + shift) and J = Dh(y + shift) Dh^-1(x).
void push_forward(const NodeChart& c, const double* shift, int n, double* s, double J[2][2]) {
  double z[2];
  for (int a = 0; a < n; ++a) z[a] = c.y[a] + shift[a];
  const double q = 1.0 / std::sqrt(1.0 + squared_norm(z, n));
  double dh[2][2];
  for (int a = 0; a < n; ++a) {
    s[a] = z[a] * q;
    for (int b = 0; b < n; ++b) dh[a][b] = ((a == b ? 1.0 : 0.0) - z[a] * z[b] * q * q) * q;
  }
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      J[a][b] = 0.0;
      for (int m = 0; m < n; ++m) J[a][b] += dh[a][m] * c.dinv[m][b];
    }
  }
}

// Pullback of interpolated components `a` through the Jacobian J, written to out.
void pull_back(int n, int k, const double* a, const double J[2][2], double* out) {
  if (k == 0) {
    out[0] = a[0];
  } else if (k == n) {
    out[0] = a[0] * (n == 1 ? J[0][0] : J[0][0] * J[1][1] - J[0][1] * J[1][0]);
  } else {
    for (int j = 0; j < n; ++j) out[j] = a[0] * J[0][j] + a[1] * J[1][j];
  }
}

void check_epsilon(double eps) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw Error(ErrorCode::kBadEpsilon, "mollifier epsilon must lie in [0, 1]");
}

}  // namespace

GridForm::GridForm(int n, int k, double h) : n_(n), k_(k), h_(h) {
  if (n != 1 && n != 2) throw Error(ErrorCode::kBadDimension, "grid forms live in dimension 1 or 2");
  if (k < 0 || k > n) throw Error(ErrorCode::kBadDimension, "form degree out of range");
  const double steps = std::round(2.0 / h);
  if (!(h > 0.0) || !std::isfinite(h) || steps < 2 || std::abs(steps * h - 2.0) > 1e-9) {
    throw Error(ErrorCode::kBadDimension, "grid spacing must divide 2");
  }
  const auto S = Eigen::Index(steps);
  N_ = S + 1;
  // Mirrored so that the grid is exactly symmetric about the origin.
  coords_.assign(std::size_t(N_), 0.0);
  for (Eigen::Index i = 0; 2 * i < S; ++i) {
    coords_[std::size_t(i)] = -1.0 + 2.0 * double(i) / double(S);
    coords_[std::size_t(S - i)] = -coords_[std::size_t(i)];
  }
  count_ = n == 1 ? N_ : N_ * N_;
  mask_.assign(std::size_t(count_), false);
  for (Eigen::Index node = 0; node < count_; ++node) mask_[std::size_t(node)] = point(node).squaredNorm() >= 1.0;
  axes_ = axis_subsets(n, k);
  values_.assign(axes_.size(), Eigen::VectorXd::Zero(count_));
}

GridForm GridForm::sample(int n, int k, double h, const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f) {
  GridForm w(n, k, h);
  for (Eigen::Index node = 0; node < w.count_; ++node) {
    if (w.masked(node)) continue;
    const Eigen::VectorXd v = f(w.point(node));
    if (std::size_t(v.size()) != w.values_.size()) throw Error(ErrorCode::kBadDimension, "wrong number of components");
    for (std::size_t c = 0; c < w.values_.size(); ++c) w.values_[c](node) = v(Eigen::Index(c));
  }
  return w;
}

std::vector<std::vector<int>> GridForm::axis_subsets(int n, int k) {
  std::vector<std::vector<int>> out;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (std::popcount(mask) != k) continue;
    std::vector<int> s;
    for (int a = 0; a < n; ++a) {
      if (mask & (1u << a)) s.push_back(a);
    }
    out.push_back(s);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Eigen::VectorXd GridForm::point(Eigen::Index node) const {
  Eigen::VectorXd x(n_);
  if (n_ == 1) {
    x(0) = coords_[std::size_t(node)];
  } else {
    x(0) = coords_[std::size_t(node / N_)];
    x(1) = coords_[std::size_t(node % N_)];
  }
  return x;
}

void GridForm::interpolate(const double* p, double* out) const {
  const std::size_t C = values_.size();
  Eigen::Index base[2] = {0, 0};
  double t[2] = {0.0, 0.0};
  for (int a = 0; a < n_; ++a) {
    const double u = (p[a] + 1.0) / h_;
    Eigen::Index i = std::clamp(Eigen::Index(std::floor(u)), Eigen::Index(0), N_ - 2);
    base[a] = i;
    t[a] = std::clamp((p[a] - coords_[std::size_t(i)]) / h_, 0.0, 1.0);
  }
  double num[2] = {0.0, 0.0};
  double den = 0.0;
  for (int corner = 0; corner < (1 << n_); ++corner) {
    double wgt = 1.0;
    Eigen::Index node = 0;
    for (int a = 0; a < n_; ++a) {
      const int bit = (corner >> (n_ - 1 - a)) & 1;
      wgt *= bit ? t[a] : 1.0 - t[a];
      node = node * N_ + base[a] + bit;
    }
    if (mask_[std::size_t(node)] || wgt == 0.0) continue;
    den += wgt;
    for (std::size_t c = 0; c < C; ++c) num[c] += wgt * values_[c](node);
  }
  if (den > 0.0) {
    for (std::size_t c = 0; c < C; ++c) out[c] = num[c] / den;
    return;
  }
  // Sliver cells at the sphere: fall back to the nearest unmasked node.
  double best = INFINITY;
  Eigen::Index best_node = -1;
  const Eigen::Index R = 3;
  const Eigen::Index lo0 = std::max<Eigen::Index>(base[0] - R, 0), hi0 = std::min(base[0] + R + 1, N_ - 1);
  const Eigen::Index lo1 = n_ == 2 ? std::max<Eigen::Index>(base[1] - R, 0) : 0;
  const Eigen::Index hi1 = n_ == 2 ? std::min(base[1] + R + 1, N_ - 1) : 0;
  for (Eigen::Index i = lo0; i <= hi0; ++i) {
    for (Eigen::Index j = lo1; j <= hi1; ++j) {
      const Eigen::Index node = n_ == 2 ? i * N_ + j : i;
      if (mask_[std::size_t(node)]) continue;
      double d = std::pow(coords_[std::size_t(i)] - p[0], 2);
      if (n_ == 2) d += std::pow(coords_[std::size_t(j)] - p[1], 2);
      if (d < best) {
        best = d;
        best_node = node;
      }
    }
  }
  for (std::size_t c = 0; c < C; ++c) out[c] = best_node < 0 ? 0.0 : values_[c](best_node);
}

void GridForm::check_compatible(const GridForm& o) const {
  if (o.n_ != n_ || o.k_ != k_ || o.N_ != N_) throw Error(ErrorCode::kBadDimension, "grid forms do not match");
}

GridForm& GridForm::operator+=(const GridForm& o) {
  check_compatible(o);
  for (std::size_t c = 0; c < values_.size(); ++c) values_[c] += o.values_[c];
  return *this;
}

GridForm& GridForm::operator-=(const GridForm& o) {
  check_compatible(o);
  for (std::size_t c = 0; c < values_.size(); ++c) values_[c] -= o.values_[c];
  return *this;
}

double GridForm::max_abs(const std::function<bool(const Eigen::VectorXd&)>& keep) const {
  double m = 0.0;
  for (Eigen::Index node = 0; node < count_; ++node) {
    if (masked(node) || (keep && !keep(point(node)))) continue;
    for (const auto& v : values_) m = std::max(m, std::abs(v(node)));
  }
  return m;
}

Eigen::VectorXd ball_map(const Eigen::VectorXd& y) { return y / std::sqrt(1.0 + y.squaredNorm()); }

Eigen::VectorXd ball_map_inverse(const Eigen::VectorXd& z) {
  if (z.norm() >= 1.0) throw Error(ErrorCode::kOutsideDomain, "h^-1 needs |z| < 1");
  return z / std::sqrt(1.0 - z.squaredNorm());
}

Eigen::VectorXd ball_diffeo(const Eigen::VectorXd& v, const Eigen::VectorXd& x) {
  if (v.size() != x.size()) throw Error(ErrorCode::kBadDimension, "v and x differ in dimension");
  const double r = x.norm();
  if (r > 1.0) throw Error(ErrorCode::kOutsideDomain, "point outside the closed unit ball");
  if (r == 1.0) return x;
  return ball_map(ball_map_inverse(x) + v);
}

Eigen::MatrixXd ball_diffeo_jacobian(const Eigen::VectorXd& v, const Eigen::VectorXd& x) {
  if (v.size() != x.size()) throw Error(ErrorCode::kBadDimension, "v and x differ in dimension");
  if (x.norm() >= 1.0) throw Error(ErrorCode::kOutsideDomain, "Jacobian needs |x| < 1");
  const Eigen::Index n = x.size();
  const Eigen::VectorXd y = ball_map_inverse(x), z = y + v;
  const double a = 1.0 - x.squaredNorm(), b = 1.0 + z.squaredNorm();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd dh = (I - z * z.transpose() / b) / std::sqrt(b);
  const Eigen::MatrixXd dinv = (I + x * x.transpose() / a) / std::sqrt(a);
  return dh * dinv;
}

KernelRule kernel_rule(int n, const MollifierConfig& cfg) {
  if (n != 1 && n != 2) throw Error(ErrorCode::kBadDimension, "kernel dimension must be 1 or 2");
  if (cfg.kernel_grid < 1) throw Error(ErrorCode::kBadDimension, "kernel grid needs at least one node");
  const int N = cfg.kernel_grid % 2 ? cfg.kernel_grid : cfg.kernel_grid + 1;
  std::vector<double> axis(std::size_t(N), 0.0);
  for (int j = 0; 2 * j + 1 < N; ++j) {
    axis[std::size_t(j)] = -1.0 + (2.0 * j + 1.0) / N;
    axis[std::size_t(N - 1 - j)] = -axis[std::size_t(j)];
  }
  const int total = n == 1 ? N : N * N;
  const int centre = total / 2;
  std::vector<Eigen::VectorXd> nodes;
  std::vector<double> f;
  double sum = 0.0;
  for (int idx = 0; idx < total; ++idx) {
    Eigen::VectorXd v(n);
    if (n == 1) {
      v(0) = axis[std::size_t(idx)];
    } else {
      v(0) = axis[std::size_t(idx / N)];
      v(1) = axis[std::size_t(idx % N)];
    }
    const double r2 = v.squaredNorm();
    const double value = r2 < 1.0 ? std::exp(-1.0 / (1.0 - r2)) : 0.0;
    nodes.push_back(v);
    f.push_back(value);
    sum += value;
  }
  // Dyadic weights add exactly, so the centre absorbs the rounding residual.
  const double unit = std::ldexp(1.0, 40);
  double quantized = 0.0;
  for (int idx = 0; idx < total; ++idx) {
    f[std::size_t(idx)] = std::round(f[std::size_t(idx)] / sum * unit) / unit;
    if (idx != centre) quantized += f[std::size_t(idx)];
  }
  f[std::size_t(centre)] = 1.0 - quantized;
  KernelRule rule;
  for (int idx = 0; idx < total; ++idx) {
    if (f[std::size_t(idx)] == 0.0) continue;
    rule.nodes.push_back(nodes[std::size_t(idx)]);
    rule.weights.push_back(f[std::size_t(idx)]);
  }
  return rule;
}

GridForm regularize(const GridForm& w, const MollifierConfig& cfg) {
  check_epsilon(cfg.epsilon);
  if (cfg.epsilon == 0.0) return w;
  const int n = w.n(), k = w.degree();
  const KernelRule rule = kernel_rule(n, cfg);
  std::vector<std::array<double, 2>> shifts;
  for (const auto& v : rule.nodes) shifts.push_back({cfg.epsilon * v(0), n == 2 ? cfg.epsilon * v(1) : 0.0});
  GridForm out = w.zeros_like(k);
  const std::size_t C = w.component_count();
  for (Eigen::Index node = 0; node < w.node_count(); ++node) {
    if (w.masked(node)) continue;
    const Eigen::VectorXd x = w.point(node);
    const NodeChart chart = node_chart(x.data(), n);
    double acc[2] = {0.0, 0.0};
    for (std::size_t q = 0; q < shifts.size(); ++q) {
      double s[2], J[2][2], a[2], pulled[2];
      push_forward(chart, shifts[q].data(), n, s, J);
      w.interpolate(s, a);
      pull_back(n, k, a, J, pulled);
      for (std::size_t c = 0; c < C; ++c) acc[c] += rule.weights[q] * pulled[c];
    }
    for (std::size_t c = 0; c < C; ++c) out.component(c)(node) = acc[c];
  }
  return out;
}

GridForm cone_S(const GridForm& w) {
  const int n = w.n(), k = w.degree();
  if (k == 0) throw Error(ErrorCode::kBadDegree, "the cone operator needs k >= 1");
  GridForm out = w.zeros_like(k - 1);
  const auto in_sets = GridForm::axis_subsets(n, k), out_sets = GridForm::axis_subsets(n, k - 1);
  // x -| dx_I = sum_r (-1)^r x_{I_r} dx_{I without I_r}
  struct Term {
    std::size_t from, to;
    int axis;
    double sign;
  };
  std::vector<Term> terms;
  for (std::size_t c = 0; c < in_sets.size(); ++c) {
    for (std::size_t r = 0; r < in_sets[c].size(); ++r) {
      std::vector<int> rest = in_sets[c];
      rest.erase(rest.begin() + Eigen::Index(r));
      terms.push_back({c, subset_index(out_sets, rest), in_sets[c][r], r % 2 ? -1.0 : 1.0});
    }
  }
  const GaussRule gl = gauss_legendre(3);
  const Eigen::Index N = w.nodes_per_axis();
  std::vector<double> breaks;
  for (Eigen::Index node = 0; node < w.node_count(); ++node) {
    if (w.masked(node)) continue;
    const Eigen::VectorXd x = w.point(node);
    // The interpolant is polynomial between crossings of grid lines.
    breaks.assign({0.0, 1.0});
    for (int a = 0; a < n; ++a) {
      if (x(a) == 0.0) continue;
      for (Eigen::Index i = 0; i < N; ++i) {
        const double t = w.coordinate(i) / x(a);
        if (t > 0.0 && t < 1.0) breaks.push_back(t);
      }
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    double acc[2] = {0.0, 0.0};
    for (std::size_t s = 0; s + 1 < breaks.size(); ++s) {
      const double t0 = breaks[s], len = breaks[s + 1] - t0;
      for (std::size_t g = 0; g < gl.nodes.size(); ++g) {
        const double t = t0 + len * gl.nodes[g];
        double p[2], a[2];
        for (int d = 0; d < n; ++d) p[d] = t * x(d);
        w.interpolate(p, a);
        const double scale = len * gl.weights[g] * std::pow(t, k - 1);
        for (const Term& term : terms) acc[term.to] += scale * term.sign * x(term.axis) * a[term.from];
      }
    }
    for (std::size_t c = 0; c < out_sets.size(); ++c) out.component(c)(node) = acc[c];
  }
  return out;
}

GridForm grid_d(const GridForm& w) {
  const int n = w.n(), k = w.degree();
  if (k >= n) throw Error(ErrorCode::kBadDegree, "d of a top-degree grid form");
  GridForm out = w.zeros_like(k + 1);
  const auto in_sets = GridForm::axis_subsets(n, k), out_sets = GridForm::axis_subsets(n, k + 1);
  const Eigen::Index N = w.nodes_per_axis();
  const double h = w.spacing();
  auto usable = [&](Eigen::Index node, int axis, Eigen::Index step) {
    const Eigen::Index i = n == 1 || axis == 0 ? (n == 1 ? node : node / N) : node % N;
    const Eigen::Index j = i + step;
    if (j < 0 || j >= N) return false;
    const Eigen::Index stride = n == 2 && axis == 0 ? N : 1;
    return !w.masked(node + step * stride);
  };
  auto partial = [&](const Eigen::VectorXd& f, Eigen::Index node, int axis) {
    const Eigen::Index st = n == 2 && axis == 0 ? N : 1;
    const double f0 = f(node);
    if (usable(node, axis, 1) && usable(node, axis, -1)) return (f(node + st) - f(node - st)) / (2 * h);
    if (usable(node, axis, 1) && usable(node, axis, 2)) return (-3 * f0 + 4 * f(node + st) - f(node + 2 * st)) / (2 * h);
    if (usable(node, axis, -1) && usable(node, axis, -2)) return (3 * f0 - 4 * f(node - st) + f(node - 2 * st)) / (2 * h);
    if (usable(node, axis, 1)) return (f(node + st) - f0) / h;
    if (usable(node, axis, -1)) return (f0 - f(node - st)) / h;
    return 0.0;
  };
  for (std::size_t c = 0; c < out_sets.size(); ++c) {
    const auto& J = out_sets[c];
    for (std::size_t r = 0; r < J.size(); ++r) {
      std::vector<int> rest = J;
      rest.erase(rest.begin() + Eigen::Index(r));
      const Eigen::VectorXd& f = w.component(subset_index(in_sets, rest));
      const double sign = r % 2 ? -1.0 : 1.0;
      for (Eigen::Index node = 0; node < w.node_count(); ++node) {
        if (!w.masked(node)) out.component(c)(node) += sign * partial(f, node, J[r]);
      }
    }
  }
  return out;
}

GridForm homotopy_A(const GridForm& w, const MollifierConfig& cfg) {
  const GridForm s = cone_S(w);
  return regularize(s, cfg) - s;
}

HomotopyReport verify_homotopy(const GridForm& w, const MollifierConfig& cfg, double tol) {
  check_epsilon(cfg.epsilon);
  const int n = w.n(), k = w.degree();
  GridForm lhs = w.zeros_like(k);
  if (k < n) lhs += homotopy_A(grid_d(w), cfg);
  if (k > 0) lhs += grid_d(homotopy_A(w, cfg));
  const GridForm diff = lhs - (regularize(w, cfg) - w);
  const double radius = 1.0 - (cfg.epsilon + 2 * w.spacing());
  HomotopyReport report;
  auto keep = [&](const Eigen::VectorXd& x) { return x.norm() < radius; };
  report.residual = diff.max_abs(keep);
  for (Eigen::Index node = 0; node < w.node_count(); ++node) {
    if (!w.masked(node) && keep(w.point(node))) ++report.nodes_checked;
  }
  report.passes = report.residual <= tol;
  return report;
}

SupportReport verify_support_control(const GridForm& w, const MollifierConfig& cfg, const Eigen::VectorXd& x0, double r,
                                     double tol) {
  check_epsilon(cfg.epsilon);
  if (x0.size() != w.n()) throw Error(ErrorCode::kBadDimension, "centre has the wrong dimension");
  const int n = w.n();
  SupportReport report;
  if (cfg.epsilon > 0.0) {
    const KernelRule rule = kernel_rule(n, cfg);
    for (Eigen::Index node = 0; node < w.node_count(); ++node) {
      if (w.masked(node)) continue;
      const Eigen::VectorXd x = w.point(node);
      const NodeChart chart = node_chart(x.data(), n);
      for (const auto& v : rule.nodes) {
        double shift[2] = {cfg.epsilon * v(0), n == 2 ? cfg.epsilon * v(1) : 0.0}, s[2], J[2][2];
        push_forward(chart, shift, n, s, J);
        double d2 = 0.0;
        for (int a = 0; a < n; ++a) d2 += (s[a] - x(a)) * (s[a] - x(a));
        report.delta = std::max(report.delta, std::sqrt(d2));
      }
    }
  }
  const double stencil = cfg.epsilon > 0.0 ? std::sqrt(double(n)) * w.spacing() : 0.0;
  report.effective_radius = r - report.delta - stencil;
  report.input_max = w.max_abs([&](const Eigen::VectorXd& x) { return (x - x0).norm() < r; });
  const GridForm Rw = regularize(w, cfg);
  auto inner = [&](const Eigen::VectorXd& x) { return (x - x0).norm() < report.effective_radius; };
  report.output_max = Rw.max_abs(inner);
  for (Eigen::Index node = 0; node < w.node_count(); ++node) {
    if (!w.masked(node) && inner(w.point(node))) ++report.nodes_checked;
  }
  report.passes = report.input_max == 0.0 && report.output_max <= tol;
  return report;
}

std::string write_grid_form(const GridForm& w) {
  std::ostringstream out;
  out << w.n() << ' ' << w.degree() << ' ' << format_real(w.spacing()) << '\n';
  for (std::size_t c = 0; c < w.component_count(); ++c) {
    const Eigen::VectorXd& v = w.component(c);
    for (Eigen::Index i = 0; i < v.size(); ++i) out << (i ? " " : "") << format_real(v(i));
    out << '\n';
  }
  return out.str();
}

GridForm parse_grid_form(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string tok;
  auto next = [&]() {
    if (!(in >> tok)) throw Error(ErrorCode::kParseError, "grid form ends early");
    return tok;
  };
  auto integer = [&]() {
    const std::string t = next();
    if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos) {
      throw Error(ErrorCode::kParseError, "expected an integer, got '" + t + "'");
    }
    return std::stoi(t);
  };
  const int n = integer(), k = integer();
  const double h = parse_real(next());
  GridForm w(n, k, h);
  for (std::size_t c = 0; c < w.component_count(); ++c) {
    for (Eigen::Index i = 0; i < w.node_count(); ++i) w.component(c)(i) = parse_real(next());
  }
  if (in >> tok) throw Error(ErrorCode::kParseError, "trailing data after grid form");
  return w;
}

}  // namespace lpdr
