#include "lpdr/derham.hpp"

#include <algorithm>
#include <cmath>

namespace lpdr {

namespace {

double factorial(int k) {
  double f = 1.0;
  for (int j = 2; j <= k; ++j) f *= j;
  return f;
}

/// Full-coordinate terms of W(chi_sigma) on a maximal simplex T containing sigma.
std::vector<Term> whitney_terms(const Simplex& sigma, const Simplex& T, double scale) {
  const int k = sigma.dim();
  std::vector<Term> terms;
  for (int i = 0; i <= k; ++i) {
    Term t;
    t.coeff = scale * factorial(k) * (i % 2 ? -1.0 : 1.0);
    t.exps[std::size_t(T.position(sigma[i]))] = 1;
    std::vector<VertexId> order;
    for (int j = 0; j <= k; ++j) {
      if (j != i) order.push_back(T.position(sigma[j]));
    }
    t.coeff *= permutation_sign(order);
    for (VertexId pos : order) t.diff |= DiffMask(1u << pos);
    terms.push_back(t);
  }
  return terms;
}

PolyForm whitney_scaled(const Cochain& c, Integral conv) {
  const MetricComplex& K = c.complex();
  const int k = c.degree();
  std::map<Simplex, std::vector<Term>> by_facet;
  const auto simplices = K.simplices(k);
  for (const auto& [i, value] : c.entries()) {
    const Simplex& sigma = simplices[i];
    double scale = value;
    if (conv == Integral::kVolumeDensity) scale /= factorial(k) * K.volume(sigma);
    for (const auto& T : K.facets_containing(sigma)) {
      auto terms = whitney_terms(sigma, T, scale);
      auto& list = by_facet[T];
      list.insert(list.end(), terms.begin(), terms.end());
    }
  }
  PolyForm out(K, k);
  for (const auto& [T, terms] : by_facet) out.set_piece(T, canonical(terms, T.dim()));
  return out;
}

}  // namespace

PolyForm whitney(const Cochain& c) { return whitney_scaled(c, Integral::kOriented); }

PolyForm whitney_normalized(const Cochain& c, Integral conv) { return whitney_scaled(c, conv); }

double whitney_split_constant(int k) { return std::sqrt(k + 1.0) / std::sqrt(std::pow(2.0, k)); }

Cochain derham_map(const PolyForm& w, Integral conv) {
  const MetricComplex& K = w.complex();
  const int k = w.degree();
  Cochain out(K, k);
  if (k > K.dim()) return out;
  for (const auto& sigma : K.simplices(k)) {
    const double v = integrate(w, sigma, conv);
    if (v != 0.0) out.set(sigma, v);
  }
  return out;
}

namespace {

Cochain random_sparse_cochain(const MetricComplex& K, int k, std::mt19937_64& rng) {
  Cochain c(K, k);
  const std::size_t count = K.count(k);
  if (count == 0) return c;
  std::uniform_int_distribution<std::size_t> pick(0, count - 1);
  std::uniform_int_distribution<int> how_many(1, int(std::min<std::size_t>(count, 5)));
  std::normal_distribution<double> value;
  const auto simplices = K.simplices(k);
  for (int n = how_many(rng); n > 0; --n) c.set(simplices[pick(rng)], value(rng));
  return c;
}

double max_abs_difference(const Cochain& a, const Cochain& b) {
  double err = 0.0;
  const Cochain diff = a - b;
  for (const auto& [i, v] : diff.entries()) err = std::max(err, std::abs(v));
  return err;
}

}  // namespace

SplitReport verify_split(const MetricComplex& K, int k, int samples, std::mt19937_64& rng, Integral conv) {
  SplitReport report;
  if (K.count(k) == 0 || k > K.dim()) return report;
  for (int s = 0; s < samples; ++s) {
    const Cochain c = random_sparse_cochain(K, k, rng);
    const PolyForm w = whitney_normalized(c, conv);
    const Cochain back = derham_map(w, conv);
    report.max_identity_error = std::max(report.max_identity_error, max_abs_difference(back, c));
    if (k < K.dim()) {
      report.max_stokes_error = std::max(report.max_stokes_error, verify_stokes(w).max_stokes_error);
    }
    const double wn = lp_norm_form(w, 2.0);
    if (wn > 0.0) report.max_derham_ratio = std::max(report.max_derham_ratio, lp_norm(back, 2.0) / wn);
    const double cn = lp_norm(c, 2.0);
    if (cn > 0.0) report.max_whitney_ratio = std::max(report.max_whitney_ratio, wn / cn);
    ++report.sample_count;
  }
  return report;
}

SplitReport verify_stokes(const PolyForm& w) {
  SplitReport report;
  report.sample_count = 1;
  if (w.degree() >= w.complex().dim()) return report;
  const Cochain lhs = derham_map(d(w));
  const Cochain rhs = coboundary(derham_map(w));
  report.max_stokes_error = max_abs_difference(lhs, rhs);
  return report;
}

}  // namespace lpdr
