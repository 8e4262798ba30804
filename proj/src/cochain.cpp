#include "lpdr/cochain.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lpdr/complex_io.hpp"

namespace lpdr {

PiSequence::PiSequence(std::vector<double> exponents, int n) : p_(std::move(exponents)) {
  if (p_.empty()) throw Error(ErrorCode::kBadExponent, "empty exponent sequence");
  n_ = n < 0 ? std::max(1, int(p_.size()) - 1) : n;
  for (double p : p_) {
    if (!(p > 1.0) || !std::isfinite(p)) {
      throw Error(ErrorCode::kBadExponent, "exponent " + format_real(p) + " outside (1, inf)");
    }
  }
  if (n_ > 0 && !sobolev_admissible(p_, n_)) {
    throw Error(ErrorCode::kBadExponent, "consecutive exponents violate 1/p_{i+1} - 1/p_i <= 1/n");
  }
}

double PiSequence::operator[](int k) const {
  if (k < 0 || std::size_t(k) >= p_.size()) {
    throw Error(ErrorCode::kBadExponent, "no exponent p_" + std::to_string(k));
  }
  return p_[std::size_t(k)];
}

bool PiSequence::sobolev_admissible(std::span<const double> p, int n) {
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    if (1.0 / p[i + 1] - 1.0 / p[i] > 1.0 / n) return false;
  }
  return true;
}

bool PiSequence::is_non_increasing() const noexcept {
  for (std::size_t i = 0; i + 1 < p_.size(); ++i) {
    if (p_[i + 1] > p_[i]) return false;
  }
  return true;
}

bool PiSequence::has_ascent_at(int k) const noexcept {
  if (k < 0 || std::size_t(k) + 1 >= p_.size()) return false;
  return p_[std::size_t(k)] < p_[std::size_t(k) + 1];
}

Cochain::Cochain(const MetricComplex& K, int degree) : K_(&K), degree_(degree) {
  if (degree < 0) throw Error(ErrorCode::kBadDimension, "negative cochain degree");
}

Cochain Cochain::from_map(const MetricComplex& K, int degree, const std::map<Simplex, double>& values) {
  Cochain c(K, degree);
  for (const auto& [s, v] : values) c.set(s, v);
  return c;
}

Cochain Cochain::from_dense(const MetricComplex& K, int degree, const Eigen::VectorXd& values) {
  Cochain c(K, degree);
  if (std::size_t(values.size()) != K.count(degree)) {
    throw Error(ErrorCode::kBadDimension, "dense cochain has the wrong length");
  }
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values(i) != 0.0) c.entries_.emplace_back(Index(i), values(i));
  }
  return c;
}

double Cochain::at_index(Index i) const noexcept {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), i,
                             [](const Entry& e, Index j) { return e.first < j; });
  return (it != entries_.end() && it->first == i) ? it->second : 0.0;
}

double Cochain::operator()(const Simplex& s) const {
  if (s.dim() != degree_) throw Error(ErrorCode::kBadDimension, "simplex degree differs from cochain degree");
  return at_index(K_->require_index(s));
}

void Cochain::set(const Simplex& s, double value) {
  if (s.dim() != degree_) throw Error(ErrorCode::kBadDimension, "simplex degree differs from cochain degree");
  const Index i = K_->require_index(s);
  auto it = std::lower_bound(entries_.begin(), entries_.end(), i,
                             [](const Entry& e, Index j) { return e.first < j; });
  const bool present = it != entries_.end() && it->first == i;
  if (value == 0.0) {
    if (present) entries_.erase(it);
  } else if (present) {
    it->second = value;
  } else {
    entries_.insert(it, {i, value});
  }
}

Eigen::VectorXd Cochain::to_dense() const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(Eigen::Index(K_->count(degree_)));
  for (const auto& [i, v] : entries_) out(Eigen::Index(i)) = v;
  return out;
}

Cochain& Cochain::operator+=(const Cochain& other) {
  if (other.K_ != K_ || other.degree_ != degree_) {
    throw Error(ErrorCode::kBadDimension, "adding cochains of different spaces");
  }
  std::vector<Entry> merged;
  merged.reserve(entries_.size() + other.entries_.size());
  auto a = entries_.begin();
  auto b = other.entries_.begin();
  while (a != entries_.end() || b != other.entries_.end()) {
    if (b == other.entries_.end() || (a != entries_.end() && a->first < b->first)) {
      merged.push_back(*a++);
    } else if (a == entries_.end() || b->first < a->first) {
      merged.push_back(*b++);
    } else {
      const double v = a->second + b->second;
      if (v != 0.0) merged.emplace_back(a->first, v);
      ++a;
      ++b;
    }
  }
  entries_ = std::move(merged);
  return *this;
}

Cochain& Cochain::operator*=(double a) {
  if (a == 0.0) {
    entries_.clear();
    return *this;
  }
  for (auto& e : entries_) e.second *= a;
  return *this;
}

Cochain operator-(const Cochain& a, const Cochain& b) { return a + (-1.0) * b; }

bool operator==(const Cochain& a, const Cochain& b) noexcept {
  return a.K_ == b.K_ && a.degree_ == b.degree_ && a.entries_ == b.entries_;
}

Cochain indicator(const MetricComplex& K, const Simplex& sigma) {
  Cochain c(K, sigma.dim());
  c.set(sigma, 1.0);
  return c;
}

Cochain coboundary(const Cochain& c) {
  const MetricComplex& K = c.complex();
  const int k = c.degree();
  Cochain out(K, k + 1);
  if (k >= K.dim() || c.is_zero()) return out;
  std::vector<double> acc(K.count(k + 1), 0.0);
  for (const auto& [i, v] : c.entries()) {
    const Simplex& s = K.simplices(k)[i];
    for (Index j : K.coface_indices(k, i)) {
      const Simplex& tau = K.simplices(k + 1)[j];
      // s is tau with vertex at position q removed.
      int q = 0;
      while (q < s.size() && s[q] == tau[q]) ++q;
      acc[j] += (q % 2 == 0 ? v : -v);
    }
  }
  Eigen::VectorXd dense = Eigen::Map<Eigen::VectorXd>(acc.data(), Eigen::Index(acc.size()));
  return Cochain::from_dense(K, k + 1, dense);
}

double lp_norm(const Cochain& c, double p) {
  if (!(p >= 1.0)) throw Error(ErrorCode::kBadExponent, "l_p norm needs p >= 1");
  const double scale = sup_norm(c);
  if (scale == 0.0) return 0.0;
  double sum = 0.0;
  for (const auto& e : c.entries()) sum += std::pow(std::abs(e.second) / scale, p);
  return scale * std::pow(sum, 1.0 / p);
}

double sup_norm(const Cochain& c) noexcept {
  double m = 0.0;
  for (const auto& e : c.entries()) m = std::max(m, std::abs(e.second));
  return m;
}

double pi_norm(const Cochain& c, const PiSequence& pi) {
  const double base = lp_norm(c, pi[c.degree()]);
  if (c.degree() >= c.complex().dim()) return base;
  return base + lp_norm(coboundary(c), pi[c.degree() + 1]);
}

std::string write_cochain(const Cochain& c) {
  std::string out = "degree " + std::to_string(c.degree()) + "\n";
  for (const auto& [i, v] : c.entries()) {
    for (VertexId id : c.complex().simplices(c.degree())[i]) {
      out += std::to_string(id);
      out += ' ';
    }
    out += format_real(v);
    out += '\n';
  }
  return out;
}

Cochain parse_cochain(const MetricComplex& K, std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int degree = -1;
  std::map<Simplex, double> values;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::vector<std::string> tokens;
    for (std::string t; ls >> t;) tokens.push_back(t);
    if (tokens.empty() || tokens[0][0] == '#') continue;
    if (tokens[0] == "degree") {
      if (tokens.size() != 2 || degree >= 0) throw Error(ErrorCode::kParseError, "bad degree header");
      degree = int(parse_real(tokens[1]));
      if (degree < 0) throw Error(ErrorCode::kParseError, "negative degree");
      continue;
    }
    if (degree < 0) throw Error(ErrorCode::kParseError, "cochain entry before degree header");
    if (int(tokens.size()) != degree + 2) throw Error(ErrorCode::kParseError, "entry '" + line + "' has wrong arity");
    std::vector<VertexId> ids;
    for (int j = 0; j <= degree; ++j) {
      const double x = parse_real(tokens[std::size_t(j)]);
      if (x != std::floor(x)) throw Error(ErrorCode::kParseError, "non-integer vertex id");
      ids.push_back(VertexId(x));
    }
    const Simplex s{std::span<const VertexId>(ids)};
    if (!K.contains(s)) throw Error(ErrorCode::kMissingSimplex, s.to_string());
    // An odd permutation of the listed vertices flips the sign.
    values[s] += permutation_sign(ids) * parse_real(tokens.back());
  }
  if (degree < 0) throw Error(ErrorCode::kParseError, "missing degree header");
  return Cochain::from_map(K, degree, values);
}

}  // namespace lpdr
