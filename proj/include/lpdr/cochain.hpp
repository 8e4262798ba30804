#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lpdr/complex.hpp"

namespace lpdr {

/// Exponent sequence p_0, ..., p_m with every p_i in (1, inf).
class PiSequence {
 public:
  /// `n` is the intended top dimension (defaults to size - 1). Throws BadExponent
  /// if some p_i is outside (1, inf) or 1/p_{i+1} - 1/p_i > 1/n.
  explicit PiSequence(std::vector<double> exponents, int n = -1);
  PiSequence(std::initializer_list<double> exponents) : PiSequence(std::vector<double>(exponents)) {}

  int n() const noexcept { return n_; }
  std::size_t size() const noexcept { return p_.size(); }
  /// p_k; BadExponent when the sequence is too short.
  double operator[](int k) const;
  std::span<const double> exponents() const noexcept { return p_; }

  /// 1/p_{i+1} - 1/p_i <= 1/n for all consecutive pairs.
  static bool sobolev_admissible(std::span<const double> p, int n);
  bool is_non_increasing() const noexcept;
  /// p_k < p_{k+1}.
  bool has_ascent_at(int k) const noexcept;

 private:
  std::vector<double> p_;
  int n_ = 0;
};

/// Sparse real k-cochain on a complex. Entries are (simplex index, value) pairs in
/// index order with no stored zeros. The complex must outlive the cochain.
class Cochain {
 public:
  using Entry = std::pair<Index, double>;

  Cochain(const MetricComplex& K, int degree);
  static Cochain from_map(const MetricComplex& K, int degree, const std::map<Simplex, double>& values);
  static Cochain from_dense(const MetricComplex& K, int degree, const Eigen::VectorXd& values);

  const MetricComplex& complex() const noexcept { return *K_; }
  int degree() const noexcept { return degree_; }
  std::span<const Entry> entries() const noexcept { return entries_; }
  std::size_t nnz() const noexcept { return entries_.size(); }
  bool is_zero() const noexcept { return entries_.empty(); }

  /// Value at a k-simplex of the complex (0 if not stored). MissingSimplex otherwise.
  double operator()(const Simplex& s) const;
  double at_index(Index i) const noexcept;
  void set(const Simplex& s, double value);

  Eigen::VectorXd to_dense() const;

  Cochain& operator+=(const Cochain& other);
  Cochain& operator*=(double a);
  friend Cochain operator+(Cochain a, const Cochain& b) { return a += b; }
  friend Cochain operator-(const Cochain& a, const Cochain& b);
  friend Cochain operator*(double a, Cochain c) { return c *= a; }
  friend bool operator==(const Cochain& a, const Cochain& b) noexcept;

 private:
  const MetricComplex* K_;
  int degree_;
  std::vector<Entry> entries_;
};

/// chi_sigma. MissingSimplex if sigma is not in K.
Cochain indicator(const MetricComplex& K, const Simplex& sigma);

/// (dc)(tau) = sum_i (-1)^i c(tau without its i-th vertex). For k = dim K the
/// result is the zero cochain of degree k + 1.
Cochain coboundary(const Cochain& c);

/// Counting-measure l_p norm. BadExponent if p < 1.
double lp_norm(const Cochain& c, double p);
double sup_norm(const Cochain& c) noexcept;

/// ||c||_{p_k} + ||dc||_{p_{k+1}}, the second term dropped when k = dim K.
double pi_norm(const Cochain& c, const PiSequence& pi);

std::string write_cochain(const Cochain& c);
Cochain parse_cochain(const MetricComplex& K, std::string_view text);

}  // namespace lpdr
