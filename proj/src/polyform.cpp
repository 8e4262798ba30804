#include "lpdr/polyform.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

#include "lpdr/complex_io.hpp"
#include "lpdr/quadrature.hpp"

namespace lpdr {

namespace {

constexpr DiffMask bit(int j) { return DiffMask(1u << j); }

/// Sign of dt_j ^ dt_I after sorting.
int insert_sign(DiffMask I, int j) { return std::popcount(unsigned(I) & ((1u << j) - 1u)) % 2 ? -1 : 1; }

/// Sign of dt_I ^ dt_J after sorting.
int merge_sign(DiffMask I, DiffMask J) {
  int inversions = 0;
  for (int j = 0; j < kMaxSimplexVertices; ++j) {
    if (J & bit(j)) inversions += std::popcount(unsigned(I) >> (j + 1));
  }
  return inversions % 2 ? -1 : 1;
}

double factorial(int n) {
  static const std::vector<double> table = [] {
    std::vector<double> t(171, 1.0);
    for (std::size_t i = 1; i < t.size(); ++i) t[i] = t[i - 1] * double(i);
    return t;
  }();
  return table.at(std::size_t(n));
}

void accumulate(Polynomial& into, const Exponents& e, double c) {
  if (c == 0.0) return;
  auto [it, inserted] = into.emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) into.erase(it);
  }
}

void accumulate(LocalForm& into, DiffMask mask, const Polynomial& p, double scale) {
  if (p.empty() || scale == 0.0) return;
  Polynomial& slot = into[mask];
  for (const auto& [e, c] : p) accumulate(slot, e, scale * c);
  if (slot.empty()) into.erase(mask);
}

std::vector<int> mask_indices(DiffMask m) {
  std::vector<int> out;
  for (int j = 0; j < kMaxSimplexVertices; ++j) {
    if (m & bit(j)) out.push_back(j);
  }
  return out;
}

/// All masks over {1..m} with exactly k bits.
std::vector<DiffMask> masks_of_size(int m, int k) {
  std::vector<DiffMask> out;
  for (unsigned mask = 0; mask < (1u << (m + 1)); mask += 2) {
    if (std::popcount(mask) == k) out.push_back(DiffMask(mask));
  }
  return out;
}

Exponents zero_exponents() { return Exponents{}; }

/// Per-simplex data for pointwise norms: Gram matrix of the coframe dt_I.
struct PieceMetric {
  int m = 0;
  double volume = 1.0;
  std::vector<DiffMask> masks;
  Eigen::MatrixXd gram;
};

PieceMetric piece_metric(const MetricComplex& K, const Simplex& T, int k) {
  PieceMetric pm;
  pm.m = T.dim();
  pm.volume = K.volume(T);
  pm.masks = masks_of_size(pm.m, k);
  const Eigen::Index n = Eigen::Index(pm.masks.size());
  pm.gram.resize(n, n);
  if (k == 0) {
    pm.gram.setOnes();
    return pm;
  }
  const Eigen::MatrixXd E = K.edge_matrix(T);
  const Eigen::MatrixXd ginv = (E.transpose() * E).inverse();
  for (Eigen::Index a = 0; a < n; ++a) {
    const auto I = mask_indices(pm.masks[std::size_t(a)]);
    for (Eigen::Index b = 0; b < n; ++b) {
      const auto J = mask_indices(pm.masks[std::size_t(b)]);
      Eigen::MatrixXd sub(k, k);
      for (int r = 0; r < k; ++r) {
        for (int c = 0; c < k; ++c) sub(r, c) = ginv(I[std::size_t(r)] - 1, J[std::size_t(c)] - 1);
      }
      pm.gram(a, b) = sub.determinant();
    }
  }
  return pm;
}

double local_norm_at(const LocalForm& f, const PieceMetric& pm, std::span<const double> t) {
  Eigen::VectorXd coeff = Eigen::VectorXd::Zero(Eigen::Index(pm.masks.size()));
  for (std::size_t a = 0; a < pm.masks.size(); ++a) {
    auto it = f.find(pm.masks[a]);
    if (it != f.end()) coeff(Eigen::Index(a)) = poly::evaluate(it->second, t);
  }
  return std::sqrt(std::max(0.0, coeff.dot(pm.gram * coeff)));
}

/// Full coordinate vector (t_0, t_1, ..., t_m) from independent coordinates.
std::array<double, kMaxSimplexVertices> full_point(const Eigen::Ref<const Eigen::VectorXd>& s) {
  std::array<double, kMaxSimplexVertices> t{};
  double rest = 1.0;
  for (Eigen::Index j = 0; j < s.size(); ++j) {
    t[std::size_t(j + 1)] = s(j);
    rest -= s(j);
  }
  t[0] = rest;
  return t;
}

double piece_integral_of_power(const LocalForm& f, const PieceMetric& pm, double p, const SimplexRule& rule) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < rule.weights.size(); ++i) {
    const auto t = full_point(rule.points.col(i));
    sum += rule.weights(i) * std::pow(local_norm_at(f, pm, t), p);
  }
  return pm.volume * sum;
}

void require_same_space(const PolyForm& a, const PolyForm& b) {
  if (&a.complex() != &b.complex()) throw Error(ErrorCode::kBadDimension, "forms live on different complexes");
}

}  // namespace

Term term(double coeff, std::initializer_list<int> exps, std::initializer_list<int> diff) {
  Term t;
  t.coeff = coeff;
  if (exps.size() > std::size_t(kMaxSimplexVertices) || diff.size() > std::size_t(kMaxSimplexVertices)) {
    throw Error(ErrorCode::kBadDimension, "term has too many variables");
  }
  std::size_t j = 0;
  for (int e : exps) {
    if (e < 0 || e > 255) throw Error(ErrorCode::kBadDimension, "bad exponent in term");
    t.exps[j++] = std::uint8_t(e);
  }
  std::vector<VertexId> order(diff.begin(), diff.end());
  for (int i : diff) {
    if (i < 0 || i >= kMaxSimplexVertices) throw Error(ErrorCode::kBadDimension, "bad differential index");
    if (t.diff & bit(i)) {
      t.coeff = 0.0;
      return t;
    }
    t.diff |= bit(i);
  }
  t.coeff *= permutation_sign(order);
  return t;
}

namespace poly {

int degree(const Polynomial& p) noexcept {
  int best = -1;
  for (const auto& [e, c] : p) {
    int s = 0;
    for (auto x : e) s += x;
    best = std::max(best, s);
  }
  return best;
}

Polynomial add(const Polynomial& a, const Polynomial& b, double scale_b) {
  Polynomial out = a;
  for (const auto& [e, c] : b) accumulate(out, e, scale_b * c);
  return out;
}

Polynomial multiply(const Polynomial& a, const Polynomial& b) {
  Polynomial out;
  for (const auto& [ea, ca] : a) {
    for (const auto& [eb, cb] : b) {
      Exponents e{};
      for (std::size_t j = 0; j < e.size(); ++j) {
        const int s = ea[j] + eb[j];
        if (s > 255) throw Error(ErrorCode::kBadDimension, "polynomial degree overflow");
        e[j] = std::uint8_t(s);
      }
      accumulate(out, e, ca * cb);
    }
  }
  return out;
}

Polynomial derivative(const Polynomial& p, int j) {
  Polynomial out;
  for (const auto& [e, c] : p) {
    if (e[std::size_t(j)] == 0) continue;
    Exponents f = e;
    --f[std::size_t(j)];
    accumulate(out, f, c * e[std::size_t(j)]);
  }
  return out;
}

double evaluate(const Polynomial& p, std::span<const double> t) noexcept {
  double sum = 0.0;
  for (const auto& [e, c] : p) {
    double v = c;
    for (std::size_t j = 0; j < e.size(); ++j) {
      for (int r = 0; r < e[j]; ++r) v *= t[j];
    }
    sum += v;
  }
  return sum;
}

}  // namespace poly

LocalForm substitute(const LocalForm& f, int m, const Eigen::MatrixXd& A) {
  if (A.rows() != m + 1 || A.cols() < 1) throw Error(ErrorCode::kBadDimension, "substitution matrix shape");
  const int q = int(A.cols()) - 1;
  // t_i = A_i0 + sum_j (A_ij - A_i0) s_j in the target's independent coordinates.
  Eigen::MatrixXd L(m + 1, std::max(q, 0));
  std::vector<Polynomial> linear(std::size_t(m + 1));
  for (int i = 0; i <= m; ++i) {
    accumulate(linear[std::size_t(i)], zero_exponents(), A(i, 0));
    for (int j = 1; j <= q; ++j) {
      L(i, j - 1) = A(i, j) - A(i, 0);
      Exponents e{};
      e[std::size_t(j)] = 1;
      accumulate(linear[std::size_t(i)], e, L(i, j - 1));
    }
  }
  std::vector<std::vector<Polynomial>> powers(std::size_t(m + 1));
  auto power = [&](int i, int e) -> const Polynomial& {
    auto& list = powers[std::size_t(i)];
    if (list.empty()) list.push_back(Polynomial{{zero_exponents(), 1.0}});
    while (int(list.size()) <= e) list.push_back(poly::multiply(list.back(), linear[std::size_t(i)]));
    return list[std::size_t(e)];
  };

  LocalForm out;
  for (const auto& [mask, p] : f) {
    const auto I = mask_indices(mask);
    const int k = int(I.size());
    if (!I.empty() && I.back() > m) throw Error(ErrorCode::kBadDimension, "differential index beyond simplex");
    std::vector<std::pair<DiffMask, double>> minors;
    for (DiffMask J : masks_of_size(q, k)) {
      double det = 1.0;
      if (k > 0) {
        const auto Jl = mask_indices(J);
        Eigen::MatrixXd sub(k, k);
        for (int r = 0; r < k; ++r) {
          for (int c = 0; c < k; ++c) sub(r, c) = L(I[std::size_t(r)], Jl[std::size_t(c)] - 1);
        }
        det = sub.determinant();
      }
      if (det != 0.0) minors.emplace_back(J, det);
    }
    if (minors.empty()) continue;
    Polynomial image;
    for (const auto& [e, c] : p) {
      Polynomial mono{{zero_exponents(), c}};
      for (int i = 0; i <= m; ++i) {
        if (e[std::size_t(i)] == 0) continue;
        mono = poly::multiply(mono, power(i, e[std::size_t(i)]));
      }
      for (int i = m + 1; i < kMaxSimplexVertices; ++i) {
        if (e[std::size_t(i)] != 0) throw Error(ErrorCode::kBadDimension, "monomial variable beyond simplex");
      }
      image = poly::add(image, mono);
    }
    for (const auto& [J, det] : minors) accumulate(out, J, image, det);
  }
  return out;
}

LocalForm canonical(std::span<const Term> terms, int m) {
  LocalForm full;
  for (const auto& t : terms) {
    Polynomial p;
    accumulate(p, t.exps, t.coeff);
    accumulate(full, t.diff, p, 1.0);
  }
  return substitute(full, m, Eigen::MatrixXd::Identity(m + 1, m + 1));
}

LocalForm local_d(const LocalForm& f, int m) {
  LocalForm out;
  for (const auto& [I, p] : f) {
    for (int j = 1; j <= m; ++j) {
      if (I & bit(j)) continue;
      accumulate(out, DiffMask(I | bit(j)), poly::derivative(p, j), insert_sign(I, j));
    }
  }
  return out;
}

LocalForm local_wedge(const LocalForm& a, const LocalForm& b) {
  LocalForm out;
  for (const auto& [I, p] : a) {
    for (const auto& [J, q] : b) {
      if (I & J) continue;
      accumulate(out, DiffMask(I | J), poly::multiply(p, q), merge_sign(I, J));
    }
  }
  return out;
}

LocalForm local_add(const LocalForm& a, const LocalForm& b, double scale_b) {
  LocalForm out = a;
  for (const auto& [J, q] : b) accumulate(out, J, q, scale_b);
  return out;
}

LocalForm local_scale(const LocalForm& f, double a) {
  LocalForm out;
  for (const auto& [J, q] : f) accumulate(out, J, q, a);
  return out;
}

LocalForm local_multiply(const Polynomial& g, const LocalForm& f) {
  LocalForm out;
  for (const auto& [J, q] : f) accumulate(out, J, poly::multiply(g, q), 1.0);
  return out;
}

int local_degree(const LocalForm& f) noexcept {
  return f.empty() ? -1 : std::popcount(unsigned(f.begin()->first));
}

int polynomial_degree(const LocalForm& f) noexcept {
  int best = -1;
  for (const auto& [J, q] : f) best = std::max(best, poly::degree(q));
  return best;
}

bool approx_equal(const LocalForm& a, const LocalForm& b, double tol) {
  const LocalForm diff = local_add(a, b, -1.0);
  for (const auto& [J, q] : diff) {
    for (const auto& [e, c] : q) {
      if (std::abs(c) > tol) return false;
    }
  }
  return true;
}

double integrate_local(const LocalForm& f, int m, double volume, Integral conv) {
  const DiffMask top = DiffMask(((1u << (m + 1)) - 1u) & ~1u);
  auto it = f.find(top);
  if (it == f.end()) return 0.0;
  double sum = 0.0;
  for (const auto& [e, c] : it->second) {
    double num = 1.0;
    int total = m;
    for (int j = 1; j <= m; ++j) {
      num *= factorial(e[std::size_t(j)]);
      total += e[std::size_t(j)];
    }
    sum += c * num / factorial(total);
  }
  if (conv == Integral::kVolumeDensity) sum *= factorial(m) * volume;
  return sum;
}

PolyForm::PolyForm(const MetricComplex& K, int degree) : K_(&K), degree_(degree) {
  if (degree < 0) throw Error(ErrorCode::kBadDimension, "negative form degree");
}

const LocalForm* PolyForm::piece(const Simplex& T) const {
  auto it = pieces_.find(T);
  return it == pieces_.end() ? nullptr : &it->second;
}

void PolyForm::set_piece(const Simplex& T, LocalForm f) {
  if (!K_->is_facet(T)) throw Error(ErrorCode::kMissingSimplex, T.to_string() + " is not a maximal simplex");
  if (T.dim() < degree_) throw Error(ErrorCode::kBadDimension, "form degree exceeds simplex dimension");
  for (const auto& [J, q] : f) {
    if (std::popcount(unsigned(J)) != degree_ || (J & 1u) || J >= bit(T.dim() + 1)) {
      throw Error(ErrorCode::kBadDimension, "piece is not a canonical form of the right degree");
    }
  }
  if (f.empty()) {
    pieces_.erase(T);
  } else {
    pieces_[T] = std::move(f);
  }
}

void PolyForm::add_terms(const Simplex& T, std::span<const Term> terms) {
  for (const auto& t : terms) {
    if (std::popcount(unsigned(t.diff)) != degree_ && t.coeff != 0.0) {
      throw Error(ErrorCode::kBadDimension, "term degree differs from form degree");
    }
  }
  const LocalForm* old = piece(T);
  LocalForm f = canonical(terms, T.dim());
  set_piece(T, old ? local_add(*old, f) : f);
}

PolyForm& PolyForm::operator+=(const PolyForm& other) {
  require_same_space(*this, other);
  if (other.degree_ != degree_) throw Error(ErrorCode::kBadDimension, "adding forms of different degree");
  for (const auto& [T, f] : other.pieces_) {
    LocalForm sum = local_add(pieces_.count(T) ? pieces_[T] : LocalForm{}, f);
    if (sum.empty()) {
      pieces_.erase(T);
    } else {
      pieces_[T] = std::move(sum);
    }
  }
  return *this;
}

PolyForm& PolyForm::operator*=(double a) {
  if (a == 0.0) {
    pieces_.clear();
    return *this;
  }
  for (auto& [T, f] : pieces_) f = local_scale(f, a);
  return *this;
}

bool operator==(const PolyForm& a, const PolyForm& b) {
  return a.K_ == b.K_ && a.degree_ == b.degree_ && a.pieces_ == b.pieces_;
}

PolyForm global_form(const MetricComplex& K, int degree, std::span<const GlobalTerm> terms) {
  PolyForm out(K, degree);
  for (const auto& T : K.facets()) {
    if (T.dim() < degree) continue;
    std::vector<Term> local;
    for (const auto& g : terms) {
      if (int(g.differential.size()) != degree) {
        throw Error(ErrorCode::kBadDimension, "global term degree differs from form degree");
      }
      Term t;
      t.coeff = g.coeff;
      bool inside = true;
      for (VertexId v : g.monomial) {
        const int pos = T.position(v);
        if (pos < 0) {
          inside = false;
          break;
        }
        ++t.exps[std::size_t(pos)];
      }
      std::vector<VertexId> order;
      for (VertexId v : g.differential) {
        const int pos = T.position(v);
        if (pos < 0) {
          inside = false;
          break;
        }
        order.push_back(pos);
      }
      if (!inside) continue;
      const int sign = permutation_sign(order);
      if (sign == 0) continue;
      for (VertexId pos : order) t.diff |= bit(pos);
      t.coeff *= sign;
      local.push_back(t);
    }
    if (!local.empty()) out.set_piece(T, canonical(local, T.dim()));
  }
  return out;
}

PolyForm random_polyform(const MetricComplex& K, int degree, int num_terms, int max_poly, std::mt19937_64& rng) {
  std::vector<Simplex> hosts;
  for (const auto& T : K.facets()) {
    if (T.dim() >= degree) hosts.push_back(T);
  }
  std::vector<GlobalTerm> terms;
  if (hosts.empty()) return PolyForm(K, degree);
  std::uniform_int_distribution<std::size_t> pick_host(0, hosts.size() - 1);
  std::uniform_int_distribution<int> pick_deg(0, max_poly);
  std::normal_distribution<double> coeff;
  for (int n = 0; n < num_terms; ++n) {
    const Simplex& T = hosts[pick_host(rng)];
    std::uniform_int_distribution<int> pick_vertex(0, T.size() - 1);
    GlobalTerm g;
    g.coeff = coeff(rng);
    const int r = pick_deg(rng);
    for (int j = 0; j < r; ++j) g.monomial.push_back(T[pick_vertex(rng)]);
    std::vector<VertexId> ids(T.begin(), T.end());
    std::shuffle(ids.begin(), ids.end(), rng);
    g.differential.assign(ids.begin(), ids.begin() + degree);
    terms.push_back(std::move(g));
  }
  return global_form(K, degree, terms);
}

LocalForm trace(const PolyForm& w, const Simplex& tau) {
  const MetricComplex& K = w.complex();
  for (const auto& T : K.facets_containing(tau)) {
    const LocalForm* f = w.piece(T);
    if (!f) continue;
    if (T == tau) return *f;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(T.size(), tau.size());
    for (int j = 0; j < tau.size(); ++j) A(T.position(tau[j]), j) = 1.0;
    return substitute(*f, T.dim(), A);
  }
  return {};
}

PolyForm d(const PolyForm& w) {
  PolyForm out(w.complex(), w.degree() + 1);
  for (const auto& [T, f] : w.pieces()) {
    if (T.dim() <= w.degree()) continue;
    out.set_piece(T, local_d(f, T.dim()));
  }
  return out;
}

PolyForm wedge(const PolyForm& a, const PolyForm& b) {
  require_same_space(a, b);
  const int k = a.degree() + b.degree();
  if (k > a.complex().dim()) throw Error(ErrorCode::kBadDimension, "wedge degree exceeds the top dimension");
  PolyForm out(a.complex(), k);
  for (const auto& [T, f] : a.pieces()) {
    const LocalForm* g = b.piece(T);
    if (!g || T.dim() < k) continue;
    out.set_piece(T, local_wedge(f, *g));
  }
  return out;
}

double integrate(const PolyForm& w, const Simplex& tau, Integral conv) {
  if (tau.dim() != w.degree()) throw Error(ErrorCode::kBadDimension, "form degree differs from simplex dimension");
  const LocalForm f = trace(w, tau);
  if (f.empty()) return 0.0;
  const double vol = conv == Integral::kVolumeDensity ? w.complex().volume(tau) : 1.0;
  return integrate_local(f, tau.dim(), vol, conv);
}

double integrate(const PolyForm& w, std::span<const VertexId> ordered, Integral conv) {
  const Simplex tau(ordered);
  return permutation_sign(ordered) * integrate(w, tau, conv);
}

bool is_face_compatible(const PolyForm& w, double tol) {
  const MetricComplex& K = w.complex();
  std::map<Simplex, LocalForm> seen;
  for (const auto& T : K.facets()) {
    if (T.dim() < w.degree()) continue;
    const LocalForm* f = w.piece(T);
    const LocalForm zero;
    const int n = T.size();
    for (unsigned mask = 1; mask + 1 < (1u << n); ++mask) {
      if (std::popcount(mask) < w.degree() + 1) continue;
      std::vector<VertexId> ids;
      for (int i = 0; i < n; ++i) {
        if (mask & (1u << i)) ids.push_back(T[i]);
      }
      const Simplex F{std::span<const VertexId>(ids)};
      Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, F.size());
      for (int j = 0; j < F.size(); ++j) A(T.position(F[j]), j) = 1.0;
      const LocalForm tr = substitute(f ? *f : zero, T.dim(), A);
      auto [it, fresh] = seen.emplace(F, tr);
      if (!fresh && !approx_equal(it->second, tr, tol)) return false;
    }
  }
  return true;
}

PolyForm restrict(const PolyForm& w, const MetricComplex& S) {
  if (!is_subcomplex(S, w.complex())) throw Error(ErrorCode::kBadSubcomplex, "not a subcomplex of the carrier");
  PolyForm out(S, w.degree());
  for (const auto& F : S.facets()) {
    if (F.dim() < w.degree()) continue;
    out.set_piece(F, trace(w, F));
  }
  return out;
}

double pointwise_norm(const PolyForm& w, const Simplex& T, std::span<const double> t) {
  const LocalForm* f = w.piece(T);
  if (!f) return 0.0;
  const PieceMetric pm = piece_metric(w.complex(), T, w.degree());
  std::array<double, kMaxSimplexVertices> full{};
  double rest = 1.0;
  for (std::size_t j = 0; j < t.size(); ++j) {
    full[j + 1] = t[j];
    rest -= t[j];
  }
  full[0] = rest;
  return local_norm_at(*f, pm, full);
}

double lp_norm_form(const PolyForm& w, double p, const QuadratureOptions& opts) {
  if (!(p >= 1.0)) throw Error(ErrorCode::kBadExponent, "L_p norm needs p >= 1");
  const bool even = p == std::floor(p) && std::fmod(p, 2.0) == 0.0;
  double total = 0.0;
  for (const auto& [T, f] : w.pieces()) {
    const PieceMetric pm = piece_metric(w.complex(), T, w.degree());
    const int deg = std::max(0, polynomial_degree(f));
    if (even) {
      total += piece_integral_of_power(f, pm, p, simplex_rule(pm.m, int(p) * deg));
      continue;
    }
    const int rule_degree = int(std::ceil(p)) * deg + 12;
    double previous = piece_integral_of_power(f, pm, p, simplex_rule(pm.m, rule_degree));
    double current = previous;
    for (int r = 2; r <= opts.max_refinement && pm.m > 0; r *= 2) {
      current = piece_integral_of_power(f, pm, p, refined_simplex_rule(pm.m, rule_degree, r));
      const bool done = std::abs(current - previous) <= opts.tol * std::abs(current);
      previous = current;
      if (done) break;
    }
    total += current;
  }
  return std::pow(total, 1.0 / p);
}

double sup_norm(const PolyForm& w, const Simplex& T, int r) {
  const LocalForm* f = w.piece(T);
  if (!f) return 0.0;
  const PieceMetric pm = piece_metric(w.complex(), T, w.degree());
  const Eigen::MatrixXd lattice = barycentric_lattice(pm.m, std::max(r, 1));
  double best = 0.0;
  for (Eigen::Index i = 0; i < lattice.cols(); ++i) {
    best = std::max(best, local_norm_at(*f, pm, full_point(lattice.col(i))));
  }
  return best;
}

double carrier_measure(const MetricComplex& K) {
  double sum = 0.0;
  for (const auto& T : K.facets()) sum += K.volume(T);
  return sum;
}

namespace {

double sup_sum_norm(const PolyForm& w, double p, int r) {
  double sum = 0.0;
  for (const auto& [T, f] : w.pieces()) sum += std::pow(sup_norm(w, T, r), p);
  return std::pow(sum, 1.0 / p);
}

}  // namespace

double sl_pi_norm(const PolyForm& w, const PiSequence& pi, int r) {
  double out = w.is_zero() ? 0.0 : sup_sum_norm(w, pi[w.degree()], r);
  const PolyForm dw = d(w);
  if (!dw.is_zero()) out += sup_sum_norm(dw, pi[w.degree() + 1], r);
  return out;
}

double omega_pi_norm(const PolyForm& w, const PiSequence& pi, const QuadratureOptions& opts) {
  double out = w.is_zero() ? 0.0 : lp_norm_form(w, pi[w.degree()], opts);
  const PolyForm dw = d(w);
  if (!dw.is_zero()) out += lp_norm_form(dw, pi[w.degree() + 1], opts);
  return out;
}

FormNormReport form_norms(const PolyForm& w, const PiSequence& pi, int r) {
  FormNormReport report;
  report.lp = w.is_zero() ? 0.0 : lp_norm_form(w, pi[w.degree()]);
  for (const auto& [T, f] : w.pieces()) report.sup_per_simplex[T] = sup_norm(w, T, r);
  report.sl_pi = sl_pi_norm(w, pi, r);
  report.omega_pi = omega_pi_norm(w, pi);
  return report;
}

namespace {

bool on_square_boundary(const Eigen::VectorXd& x, double tol) {
  bool on_side = false;
  for (Eigen::Index a = 0; a < x.size(); ++a) {
    if (x(a) < -tol || x(a) > 1 + tol) return false;
    if (std::abs(x(a)) <= tol || std::abs(x(a) - 1) <= tol) on_side = true;
  }
  return on_side;
}

void require_cube_boundary(const MetricComplex& K, int n) {
  const double tol = 1e-12;
  auto fail = [](const std::string& why) { throw Error(ErrorCode::kBadCarrier, why); };
  if (K.ambient_dim() != n) fail("carrier is not embedded in R^n");
  if (n == 1) {
    if (K.dim() != 0 || K.num_vertices() != 2) fail("boundary of [0,1] is two points");
    const double a = K.coordinates()(0, 0), b = K.coordinates()(0, 1);
    if (std::min(a, b) != 0.0 || std::max(a, b) != 1.0) fail("boundary points must be 0 and 1");
    return;
  }
  if (K.dim() != 1) fail("boundary of the square must be a 1-complex");
  double length = 0.0;
  for (const auto& e : K.simplices(1)) {
    const Eigen::VectorXd a = K.coordinate(e[0]), b = K.coordinate(e[1]);
    if (!on_square_boundary(a, tol) || !on_square_boundary(b, tol)) fail("vertex off the square boundary");
    bool on_one_side = false;
    for (int axis = 0; axis < 2; ++axis) {
      for (double level : {0.0, 1.0}) {
        if (std::abs(a(axis) - level) <= tol && std::abs(b(axis) - level) <= tol) on_one_side = true;
      }
    }
    if (!on_one_side) fail("edge " + e.to_string() + " cuts across the square");
    length += (a - b).norm();
  }
  const auto report = validate_bounded_geometry(K, 1e300, 2);
  if (!report.connected) fail("carrier is disconnected");
  for (VertexId v : K.vertex_ids()) {
    if (K.vertex_degree(v) != 2) fail("carrier is not a closed curve");
  }
  if (std::abs(length - 4.0) > 1e-9) fail("carrier does not cover the square boundary once");
}

MetricComplex layer(const MetricComplex& K, int level) {
  const Eigen::Index V = Eigen::Index(K.num_vertices());
  Eigen::MatrixXd coords(K.ambient_dim() + 1, V);
  coords.topRows(K.ambient_dim()) = K.coordinates();
  coords.row(K.ambient_dim()).setConstant(level);
  std::vector<VertexId> ids;
  for (Eigen::Index j = 0; j < V; ++j) ids.push_back(VertexId(2 * j + level));
  std::vector<Simplex> tops;
  for (const auto& F : K.facets()) {
    std::vector<VertexId> mapped;
    for (VertexId v : F) mapped.push_back(VertexId(2 * K.vertex_index(v)) + level);
    tops.emplace_back(std::span<const VertexId>(mapped));
  }
  return MetricComplex(std::move(ids), std::move(coords), std::move(tops));
}

}  // namespace

PrismExtension prism_extend(const PolyForm& w, int n) {
  if (n != 1 && n != 2) throw Error(ErrorCode::kBadCarrier, "prism extension supports n = 1 or 2");
  const MetricComplex& K = w.complex();
  require_cube_boundary(K, n);

  const Eigen::Index V = Eigen::Index(K.num_vertices());
  Eigen::MatrixXd coords(n + 1, 2 * V);
  std::vector<VertexId> ids;
  for (Eigen::Index j = 0; j < V; ++j) {
    for (int level = 0; level < 2; ++level) {
      coords.col(2 * j + level).head(n) = K.coordinates().col(j);
      coords(n, 2 * j + level) = level;
      ids.push_back(VertexId(2 * j + level));
    }
  }
  // Staircase: [u_0^0 .. u_j^0, u_j^1 .. u_q^1] for each base simplex [u_0 .. u_q].
  std::vector<Simplex> tops;
  for (const auto& U : K.facets()) {
    for (int j = 0; j < U.size(); ++j) {
      std::vector<VertexId> stair;
      for (int i = 0; i < U.size(); ++i) {
        const VertexId base = VertexId(2 * K.vertex_index(U[i]));
        if (i <= j) stair.push_back(base);
        if (i >= j) stair.push_back(base + 1);
      }
      tops.emplace_back(std::span<const VertexId>(stair));
    }
  }

  PrismExtension ext{std::make_shared<const MetricComplex>(std::move(ids), std::move(coords), std::move(tops)),
                     std::make_shared<const MetricComplex>(layer(K, 0)),
                     std::make_shared<const MetricComplex>(layer(K, 1)), PolyForm(K, w.degree())};
  PolyForm out(*ext.prism, w.degree());
  for (const auto& W : ext.prism->facets()) {
    std::vector<VertexId> base_ids;
    for (VertexId v : W) base_ids.push_back(K.vertex_ids()[std::size_t(v / 2)]);
    base_ids.erase(std::unique(base_ids.begin(), base_ids.end()), base_ids.end());
    const Simplex U{std::span<const VertexId>(base_ids)};
    const LocalForm* f = w.piece(U);
    if (!f) continue;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(U.size(), W.size());
    Polynomial one_minus_t{{Exponents{}, 1.0}};
    for (int l = 0; l < W.size(); ++l) {
      A(U.position(K.vertex_ids()[std::size_t(W[l] / 2)]), l) = 1.0;
      if (l > 0 && W[l] % 2 == 1) {
        Exponents e{};
        e[std::size_t(l)] = 1;
        accumulate(one_minus_t, e, -1.0);
      }
    }
    out.set_piece(W, local_multiply(one_minus_t, substitute(*f, U.dim(), A)));
  }
  ext.form = std::move(out);
  return ext;
}

std::string write_polyform(const PolyForm& w) {
  std::string out = "degree " + std::to_string(w.degree()) + "\n";
  for (const auto& [T, f] : w.pieces()) {
    out += "simplex";
    for (VertexId v : T) out += " " + std::to_string(v);
    out += '\n';
    for (const auto& [J, p] : f) {
      for (const auto& [e, c] : p) {
        out += format_real(c);
        for (int j = 0; j <= T.dim(); ++j) out += " " + std::to_string(int(e[std::size_t(j)]));
        for (int j : mask_indices(J)) out += " " + std::to_string(j);
        out += '\n';
      }
    }
  }
  return out;
}

PolyForm parse_polyform(const MetricComplex& K, std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::optional<PolyForm> form;
  std::optional<Simplex> current;
  std::vector<Term> pending;
  auto flush = [&] {
    if (current && !pending.empty()) form->add_terms(*current, pending);
    pending.clear();
  };
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::vector<std::string> tokens;
    for (std::string t; ls >> t;) tokens.push_back(t);
    if (tokens.empty() || tokens[0][0] == '#') continue;
    if (tokens[0] == "degree") {
      if (form || tokens.size() != 2) throw Error(ErrorCode::kParseError, "bad degree header");
      form.emplace(K, int(parse_real(tokens[1])));
      continue;
    }
    if (!form) throw Error(ErrorCode::kParseError, "missing degree header");
    if (tokens[0] == "simplex") {
      flush();
      std::vector<VertexId> ids;
      for (std::size_t j = 1; j < tokens.size(); ++j) ids.push_back(VertexId(parse_real(tokens[j])));
      current = Simplex(std::span<const VertexId>(ids));
      if (!K.contains(*current)) throw Error(ErrorCode::kMissingSimplex, current->to_string());
      continue;
    }
    if (!current) throw Error(ErrorCode::kParseError, "term before simplex line");
    const int m = current->dim();
    if (int(tokens.size()) != 1 + (m + 1) + form->degree()) {
      throw Error(ErrorCode::kParseError, "term line '" + line + "' has wrong arity");
    }
    Term t;
    t.coeff = parse_real(tokens[0]);
    for (int j = 0; j <= m; ++j) {
      const double e = parse_real(tokens[std::size_t(1 + j)]);
      if (e < 0 || e > 255 || e != std::floor(e)) throw Error(ErrorCode::kParseError, "bad exponent");
      t.exps[std::size_t(j)] = std::uint8_t(e);
    }
    std::vector<VertexId> order;
    for (int j = 0; j < form->degree(); ++j) {
      const double idx = parse_real(tokens[std::size_t(2 + m + j)]);
      if (idx < 0 || idx > m || idx != std::floor(idx)) throw Error(ErrorCode::kParseError, "bad differential index");
      order.push_back(VertexId(idx));
    }
    const int sign = permutation_sign(order);
    if (sign == 0) continue;
    for (VertexId i : order) t.diff |= bit(i);
    t.coeff *= sign;
    pending.push_back(t);
  }
  if (!form) throw Error(ErrorCode::kParseError, "missing degree header");
  flush();
  return *form;
}

}  // namespace lpdr
