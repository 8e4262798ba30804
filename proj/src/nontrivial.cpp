#include "lpdr/nontrivial.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "lpdr/complex_io.hpp"
#include "lpdr/quadrature.hpp"

namespace lpdr {

double bump_profile(std::span<const double> x) {
  double r2 = 0.0;
  for (double v : x) r2 += v * v;
  return r2 < 1.0 ? std::exp(1.0 / (r2 - 1.0)) : 0.0;
}

double bump_profile(const Eigen::VectorXd& x) { return bump_profile(std::span<const double>(x.data(), std::size_t(x.size()))); }

Eigen::VectorXd bump_gradient(const Eigen::VectorXd& x) {
  const double r2 = x.squaredNorm();
  if (r2 >= 1.0) return Eigen::VectorXd::Zero(x.size());
  const double s = r2 - 1.0;
  return std::exp(1.0 / s) * (-2.0 / (s * s)) * x;
}

namespace {

int binomial(int n, int k) {
  int b = 1;
  for (int j = 1; j <= k; ++j) b = b * (n - k + j) / j;
  return b;
}

/// Composite Gauss-Legendre on [a, b].
template <typename F>
double integrate_1d(F&& f, double a, double b, int panels = 16, int nodes = 16) {
  static const GaussRule g = gauss_legendre(16);
  const GaussRule& rule = nodes == 16 ? g : gauss_legendre(nodes);
  const double h = (b - a) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) sum += rule.weights[j] * f(a + h * (p + rule.nodes[j]));
  }
  return sum * h;
}

/// Integral over the disc of radius rho around c of g, in polar coordinates.
template <typename F>
double integrate_disc(F&& g, const Eigen::VectorXd& c, double rho, int angles = 64) {
  const double two_pi = 2.0 * std::numbers::pi;
  double sum = 0.0;
  for (int a = 0; a < angles; ++a) {
    const double theta = two_pi * a / angles;
    const Eigen::Vector2d dir(std::cos(theta), std::sin(theta));
    sum += integrate_1d([&](double r) { return g(Eigen::VectorXd(c + r * dir)) * r; }, 0.0, rho);
  }
  return sum * two_pi / angles;
}

/// Line integral of omega_i along the oriented segment a -> b.
double line_integral(const BumpFamily& fam, std::size_t i, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const Eigen::VectorXd dir = b - a;
  const double along = fam.k == 0 ? 0.0 : dir.sum();  // (dx + dy)(b - a)
  if (fam.k == 0) return fam.value(i, b) - fam.value(i, a);
  return along * integrate_1d([&](double s) { return fam.value(i, Eigen::VectorXd(a + s * dir)); }, 0.0, 1.0);
}

/// Integral of d omega_i over the oriented (k+1)-simplex with the given vertex coordinates.
double dform_integral(const BumpFamily& fam, std::size_t i, const std::vector<Eigen::VectorXd>& v) {
  if (fam.k == 0) {
    // Direct quadrature of the derivative over the part of the segment inside the support.
    const double b = fam.centers[i - 1](0), rho = fam.radius, x0 = v[0](0), x1 = v[1](0);
    const double lo = std::max(std::min(x0, x1), b - rho), hi = std::min(std::max(x0, x1), b + rho);
    if (lo >= hi) return 0.0;
    const double slope = integrate_1d(
        [&](double x) {
          const double u = (x - b) / rho, q = 1.0 - u * u;
          return q > 0.0 ? std::exp(-1.0 / q) * (-2.0 * u / (q * q)) : 0.0;
        },
        lo, hi);
    return (x1 > x0 ? 1.0 : -1.0) * fam.weight(i) / rho * slope;
  }
  // Through the boundary: int_tau d omega = sum of the oriented edge integrals.
  const double orient = (Eigen::Matrix2d() << v[1] - v[0], v[2] - v[0]).finished().determinant() > 0 ? 1.0 : -1.0;
  return orient * (line_integral(fam, i, v[0], v[1]) + line_integral(fam, i, v[1], v[2]) + line_integral(fam, i, v[2], v[0]));
}

/// Neumaier compensated summation.
struct Accumulator {
  double sum = 0.0, carry = 0.0;
  void add(double x) {
    const double t = sum + x;
    carry += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + carry; }
};

std::string format_number(double x) { return format_real(x); }

}  // namespace

double BumpFamily::weight(std::size_t i) const { return std::pow(1.0 / double(i), 1.0 / (pi[1] - eps)); }

double BumpFamily::value(std::size_t i, const Eigen::VectorXd& x) const {
  return weight(i) * bump_profile(Eigen::VectorXd((x - centers[i - 1]) / radius));
}

Eigen::VectorXd BumpFamily::dvalue(std::size_t i, const Eigen::VectorXd& x) const {
  const Eigen::VectorXd g = weight(i) / radius * bump_gradient(Eigen::VectorXd((x - centers[i - 1]) / radius));
  if (k == 0) return g;
  // d(f (dx + dy)) = (f_x - f_y) dx ^ dy.
  return Eigen::VectorXd::Constant(1, g(0) - g(1));
}

double BumpFamily::sup_value(std::size_t i) const {
  return std::sqrt(double(binomial(n, k))) * weight(i) * std::exp(-1.0);
}

BumpFamily build_family(int k, const PiSequence& pi, double eps, std::size_t M) {
  if (!pi.has_ascent_at(k)) {
    throw Error(ErrorCode::kNotACounterexample, "the construction needs p_k < p_{k+1}");
  }
  const double pk = pi[k], pk1 = pi[k + 1];
  if (!(eps > 0.0 && eps < pk1 - pk)) {
    throw Error(ErrorCode::kBadEpsilon, "eps must lie in (0, p_{k+1} - p_k)");
  }
  if (k != 0 && k != 1) throw Error(ErrorCode::kBadDimension, "bump families exist for k = 0 and k = 1");
  if (M < 1) throw Error(ErrorCode::kBadDimension, "need at least one bump");
  BumpFamily fam;
  fam.k = k;
  fam.n = k + 1;
  fam.pi = {pk, pk1};
  fam.eps = eps;
  fam.M = M;
  fam.host = std::make_shared<const MetricComplex>(ray_complex(fam.n, fam.n == 1 ? M : (M + 1) / 2));
  const auto tops = fam.host->simplices(fam.n);
  fam.carriers.assign(tops.begin(), tops.begin() + Eigen::Index(M));
  double dist = INFINITY;
  for (const auto& T : fam.carriers) {
    Eigen::VectorXd b = Eigen::VectorXd::Zero(fam.n);
    for (VertexId v : T) b += fam.host->coordinate(v);
    b /= T.size();
    fam.centers.push_back(b);
  }
  // All carriers are congruent, so the first one fixes the chart radius.
  const Simplex& T = fam.carriers.front();
  for (int i = 0; i < T.size(); ++i) {
    const Simplex F = T.face(i);
    const Eigen::VectorXd p = fam.host->coordinate(F[0]);
    if (fam.n == 1) {
      dist = std::min(dist, (fam.centers.front() - p).norm());
    } else {
      const Eigen::VectorXd e = (fam.host->coordinate(F[1]) - p).normalized();
      const Eigen::VectorXd r = fam.centers.front() - p;
      dist = std::min(dist, (r - r.dot(e) * e).norm());
    }
  }
  fam.radius = 0.9 * dist;
  return fam;
}

std::vector<std::size_t> checkpoints(std::size_t M) {
  std::vector<std::size_t> out;
  for (std::size_t m = 10; m < M; m *= 10) out.push_back(m);
  out.push_back(M);
  return out;
}

SeriesVerdict p_series(double a, std::size_t M) {
  SeriesVerdict v;
  v.exponent = a;
  v.converges = a > 1.0;
  v.constant = 1.0;
  const auto marks = checkpoints(M);
  Accumulator acc;
  std::size_t next = 0;
  for (std::size_t i = 1; i <= M; ++i) {
    acc.add(std::pow(double(i), -a));
    if (i == marks[next]) {
      v.partial_sums.emplace_back(i, acc.value());
      if (v.converges) v.tail_bounds.push_back(std::pow(double(i), 1.0 - a) / (a - 1.0));
      ++next;
    }
  }
  return v;
}

SeriesVerdict family_norm_series(const BumpFamily& fam, double p, SeriesKind which) {
  if (!(p >= 1.0)) throw Error(ErrorCode::kBadExponent, "series needs p >= 1");
  SeriesVerdict v = p_series(p / (fam.pi[1] - fam.eps), fam.M);
  const double rho = fam.radius;
  const double frame = std::sqrt(double(binomial(fam.n, fam.k)));
  const auto radial = [&](auto&& f) {
    // int_{B_1} f(|u|) du for n = 1 or 2.
    return fam.n == 1 ? 2.0 * integrate_1d(f, 0.0, 1.0)
                      : 2.0 * std::numbers::pi * integrate_1d([&](double r) { return f(r) * r; }, 0.0, 1.0);
  };
  const auto psi = [](double r) { return r < 1.0 ? std::exp(1.0 / (r * r - 1.0)) : 0.0; };
  const auto dpsi = [&](double r) { return r < 1.0 ? psi(r) * 2.0 * r / ((r * r - 1.0) * (r * r - 1.0)) : 0.0; };
  double c = 0.0;
  switch (which) {
    case SeriesKind::kSup:
      c = std::pow(frame * std::exp(-1.0), p);
      break;
    case SeriesKind::kForm:
      c = std::pow(frame, p) * std::pow(rho, fam.n) * radial([&](double r) { return std::pow(psi(r), p); });
      break;
    case SeriesKind::kDForm: {
      // |d omega| = |Psi'(r)| / rho in 1-D and |Psi'(r)| |cos t - sin t| / rho in 2-D.
      double angular = 1.0;
      if (fam.n == 2) {
        angular = std::pow(std::sqrt(2.0), p) * 2.0 * std::sqrt(std::numbers::pi) * std::tgamma((p + 1) / 2) /
                  std::tgamma(p / 2 + 1) / (2.0 * std::numbers::pi);
      }
      c = angular * std::pow(rho, fam.n - p) * radial([&](double r) { return std::pow(dpsi(r), p); });
      break;
    }
    case SeriesKind::kCochain: {
      const auto image = subdivision_image(fam, 1);
      for (double r : image.reference) c += std::pow(std::abs(r), p);
      break;
    }
  }
  v.constant = c;
  return v;
}

KernelReport derham_kernel_check(const BumpFamily& fam, double tol) {
  KernelReport report;
  const MetricComplex& K = *fam.host;
  const int k = fam.k;
  std::map<Simplex, std::size_t> bump_of;
  for (std::size_t i = 0; i < fam.carriers.size(); ++i) bump_of[fam.carriers[i]] = i + 1;
  const auto lower = K.simplices(k);
  const auto upper = K.simplices(k + 1);
  for (Index s = 0; s < lower.size(); ++s) {
    const Simplex& sigma = lower[s];
    double total = 0.0;
    for (Index t : K.coface_indices(k, s)) {
      auto it = bump_of.find(upper[t]);
      if (it == bump_of.end()) continue;
      if (k == 0) {
        total += fam.value(it->second, K.coordinate(sigma[0]));
      } else {
        total += line_integral(fam, it->second, K.coordinate(sigma[0]), K.coordinate(sigma[1]));
      }
    }
    report.max_form_integral = std::max(report.max_form_integral, std::abs(total));
    ++report.simplices_checked;
  }
  for (Index t = 0; t < upper.size(); ++t) {
    auto it = bump_of.find(upper[t]);
    double value = 0.0;
    if (it != bump_of.end()) {
      const std::size_t i = it->second;
      if (k == 0) {
        std::vector<Eigen::VectorXd> v = {K.coordinate(upper[t][0]), K.coordinate(upper[t][1])};
        value = dform_integral(fam, i, v);
      } else {
        // The support disc lies inside the carrier; orient by the ascending vertex order.
        std::vector<Eigen::VectorXd> v;
        for (VertexId id : upper[t]) v.push_back(K.coordinate(id));
        const double orient = (Eigen::Matrix2d() << v[1] - v[0], v[2] - v[0]).finished().determinant() > 0 ? 1.0 : -1.0;
        value = orient * integrate_disc([&](const Eigen::VectorXd& x) { return fam.dvalue(i, x)(0); }, fam.centers[i - 1],
                                        fam.radius);
      }
    }
    report.max_dform_integral = std::max(report.max_dform_integral, std::abs(value));
    ++report.simplices_checked;
  }
  report.passes = report.max_form_integral <= tol && report.max_dform_integral <= tol;
  return report;
}

SubdivisionImage subdivision_image(const BumpFamily& fam, std::size_t limit) {
  const std::size_t m = std::min(fam.M, std::max<std::size_t>(limit, 1));
  const MetricComplex base = ray_complex(fam.n, fam.n == 1 ? m : (m + 1) / 2);
  auto sub = barycentric_subdivision(base);
  SubdivisionImage out{std::make_shared<const MetricComplex>(std::move(sub.refined)), Cochain(base, 0), {}, 0.0, 0};
  const MetricComplex& Kp = *out.refined;
  out.image = Cochain(Kp, fam.k + 1);
  // Refined vertex id of the barycenter of each carrier.
  std::map<VertexId, std::size_t> bump_at;
  const auto tops = base.simplices(fam.n);
  for (std::size_t i = 0; i < m; ++i) {
    const Index idx = base.require_index(tops[i]);
    bump_at[sub.barycenter[std::size_t(fam.n)][idx]] = i + 1;
  }
  std::vector<std::vector<double>> induced(m);
  for (const auto& tau : Kp.simplices(fam.k + 1)) {
    // The carrier's barycenter is the largest id of a flag ending at it.
    auto it = bump_at.find(tau[tau.size() - 1]);
    if (it == bump_at.end()) continue;
    const std::size_t i = it->second;
    std::vector<Eigen::VectorXd> v;
    for (VertexId id : tau) v.push_back(Kp.coordinate(id));
    const double value = dform_integral(fam, i, v);
    if (value != 0.0) out.image.set(tau, value);
    // Orientation of tau relative to its parent carrier (ascending order in both).
    const Simplex& T = tops[i - 1];
    Eigen::MatrixXd E(fam.n, fam.n), P(fam.n, fam.n);
    for (int j = 0; j < fam.n; ++j) {
      E.col(j) = v[std::size_t(j + 1)] - v[0];
      P.col(j) = base.coordinate(T[j + 1]) - base.coordinate(T[0]);
    }
    const double sign = E.determinant() * P.determinant() > 0 ? 1.0 : -1.0;
    induced[i - 1].push_back(sign * value / fam.weight(i));
  }
  for (auto& row : induced) std::sort(row.begin(), row.end());
  out.reference = induced.front();
  for (const auto& row : induced) {
    if (row.size() != out.reference.size()) {
      out.max_pattern_error = INFINITY;
      continue;
    }
    for (std::size_t j = 0; j < row.size(); ++j) {
      out.max_pattern_error = std::max(out.max_pattern_error, std::abs(row[j] - out.reference[j]));
    }
  }
  out.bumps = m;
  return out;
}

namespace {

std::string describe(const SeriesVerdict& v) {
  std::ostringstream s;
  s << "a=" << format_number(v.exponent);
  for (std::size_t j = 0; j < v.partial_sums.size(); ++j) {
    s << " S_" << v.partial_sums[j].first << "=" << format_number(v.partial_sums[j].second);
  }
  return s.str();
}

/// Bounded increasing partial sums whose increments stay below the integral-test tail.
bool cauchy_certificate(const SeriesVerdict& v) {
  if (!v.converges) return false;
  const double limit_bound = 1.0 + 1.0 / (v.exponent - 1.0);
  const double last = v.partial_sums.back().second;
  for (std::size_t j = 0; j < v.partial_sums.size(); ++j) {
    const auto [m, s] = v.partial_sums[j];
    if (s > limit_bound) return false;
    if (last - s > v.tail_bounds[j] * (1 + 1e-12)) return false;
    const double lower = (std::pow(double(m) + 1, 1 - v.exponent) - 1) / (1 - v.exponent);
    if (s < lower * (1 - 1e-12)) return false;
  }
  return true;
}

/// Partial sums above the integral lower bracket, which is unbounded, and the expected growth rate.
bool divergence_certificate(const SeriesVerdict& v) {
  if (v.converges) return false;
  const double a = v.exponent;
  for (const auto& [m, s] : v.partial_sums) {
    const double x = double(m);
    const double lower = a == 1.0 ? std::log(x + 1) : (std::pow(x + 1, 1 - a) - 1) / (1 - a);
    if (s < lower * (1 - 1e-12)) return false;
    if (m >= 10000) {
      const double growth = a == 1.0 ? std::log(x) : std::pow(x, 1 - a) / (1 - a);
      const double ratio = s / growth;
      if (ratio < 0.9 || ratio > 1.1) return false;
    }
  }
  return true;
}

}  // namespace

NontrivialReport verify_nontriviality(const PiSequence& pi, double eps, const std::vector<std::size_t>& M_list, int k) {
  if (M_list.empty()) throw Error(ErrorCode::kBadDimension, "need at least one truncation length");
  const std::size_t M = *std::max_element(M_list.begin(), M_list.end());
  const BumpFamily fam = build_family(k, pi, eps, M);
  const double pk = fam.pi[0], pk1 = fam.pi[1];
  NontrivialReport r;

  const auto kern = derham_kernel_check(fam);
  r.kernel.passes = kern.passes;
  r.kernel.detail = "max|I w|=" + format_number(kern.max_form_integral) +
                    " max|I dw|=" + format_number(kern.max_dform_integral) +
                    " simplices=" + std::to_string(kern.simplices_checked);

  r.upper = family_norm_series(fam, pk1, SeriesKind::kSup);
  r.lower = family_norm_series(fam, pk, SeriesKind::kDForm);
  r.upper_cauchy.passes = cauchy_certificate(r.upper);
  r.upper_cauchy.detail = describe(r.upper);
  r.lower_divergence.passes = divergence_certificate(r.lower);
  r.lower_divergence.detail = describe(r.lower);

  const auto image = subdivision_image(fam);
  const double const_upper = family_norm_series(fam, pk1, SeriesKind::kCochain).constant;
  const double const_lower = family_norm_series(fam, pk, SeriesKind::kCochain).constant;
  // The explicit K' cochain must match constant * S_m for both exponents.
  const SeriesVerdict upper_m = p_series(pk1 / (pk1 - eps), image.bumps);
  const SeriesVerdict lower_m = p_series(pk / (pk1 - eps), image.bumps);
  const double direct_upper = std::pow(lp_norm(image.image, pk1), pk1);
  const double direct_lower = std::pow(lp_norm(image.image, pk), pk);
  const double mismatch = std::max(std::abs(direct_upper - const_upper * upper_m.partial_sums.back().second) / direct_upper,
                                   std::abs(direct_lower - const_lower * lower_m.partial_sums.back().second) / direct_lower);
  r.cochain_gap.passes = image.max_pattern_error <= 1e-10 && mismatch <= 1e-10 && const_upper > 0 &&
                         cauchy_certificate(r.upper) && divergence_certificate(r.lower);
  r.cochain_gap.detail = "bumps=" + std::to_string(image.bumps) + " pattern_error=" + format_number(image.max_pattern_error) +
                         " norm_mismatch=" + format_number(mismatch) + " C=" + format_number(image.reference.back());

  // Exponent roles swapped: p'_k = p_{k+1}, p'_{k+1} = p_k. Both series must converge.
  const SeriesVerdict s1 = p_series(pk1 / (pk - eps), M);
  const SeriesVerdict s2 = p_series(pk / (pk - eps), M);
  r.swapped_converges.passes = pk - eps > 0 && cauchy_certificate(s1) && cauchy_certificate(s2);
  r.swapped_converges.detail = describe(s1) + " | " + describe(s2);
  return r;
}

std::string nontrivial_csv(const NontrivialReport& report) {
  std::string out = "m,S_pk,S_pk1,tail\n";
  for (std::size_t j = 0; j < report.lower.partial_sums.size(); ++j) {
    out += std::to_string(report.lower.partial_sums[j].first) + "," + format_number(report.lower.partial_sums[j].second) +
           "," + format_number(report.upper.partial_sums[j].second) + "," + format_number(report.upper.tail_bounds[j]) + "\n";
  }
  return out;
}

}  // namespace lpdr
