#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "lpdr/cochain.hpp"
#include "lpdr/complex.hpp"

namespace lpdr {

// Polynomial forms on a simplex T = [v_0, ..., v_m] in barycentric coordinates
// t_0, ..., t_m. The canonical representative eliminates t_0 = 1 - (t_1 + ... + t_m)
// and dt_0 = -(dt_1 + ... + dt_m), so only t_1..t_m and dt_1..dt_m appear.

using Exponents = std::array<std::uint8_t, kMaxSimplexVertices>;
using Polynomial = std::map<Exponents, double>;
/// Bit j set means dt_j is a factor; factors are wedged in increasing j.
using DiffMask = std::uint8_t;
using LocalForm = std::map<DiffMask, Polynomial>;

/// How a top-degree form is turned into a number.
///  kOriented: the integral of the form over the oriented simplex (Stokes holds).
///  kVolumeDensity: the coefficient of dt_1^...^dt_m integrated against the volume
///  measure, so dt_1^...^dt_m itself integrates to vol(T). This reading reproduces the
///  regular-simplex constants sqrt(k+1)/(k! sqrt(2^k)) but is not a chain map.
enum class Integral { kOriented, kVolumeDensity };

/// One monomial term coeff * t^exps dt_{diff}, in full barycentric coordinates.
struct Term {
  double coeff = 0.0;
  Exponents exps{};
  DiffMask diff = 0;
};

/// term(c, {a_0, ..., a_m}, {i_1, ..., i_k}) = c t_0^{a_0}...t_m^{a_m} dt_{i_1}^...^dt_{i_k}.
/// The differential indices may come in any order; the sign of the sorting permutation is applied.
Term term(double coeff, std::initializer_list<int> exps, std::initializer_list<int> diff);

namespace poly {

int degree(const Polynomial& p) noexcept;
Polynomial add(const Polynomial& a, const Polynomial& b, double scale_b = 1.0);
Polynomial multiply(const Polynomial& a, const Polynomial& b);
/// d/dt_j, treating the variables as independent.
Polynomial derivative(const Polynomial& p, int j);
double evaluate(const Polynomial& p, std::span<const double> t) noexcept;

}  // namespace poly

/// Canonical form on an m-simplex from full-coordinate terms.
LocalForm canonical(std::span<const Term> terms, int m);
/// Canonical form on a q-simplex obtained by substituting t = A s, where the columns
/// of A ((m+1) x (q+1)) are the full t-coordinates of the target's vertices.
LocalForm substitute(const LocalForm& f, int m, const Eigen::MatrixXd& A);
LocalForm local_d(const LocalForm& f, int m);
LocalForm local_wedge(const LocalForm& a, const LocalForm& b);
LocalForm local_add(const LocalForm& a, const LocalForm& b, double scale_b = 1.0);
LocalForm local_scale(const LocalForm& f, double a);
LocalForm local_multiply(const Polynomial& g, const LocalForm& f);
int local_degree(const LocalForm& f) noexcept;
int polynomial_degree(const LocalForm& f) noexcept;
bool approx_equal(const LocalForm& a, const LocalForm& b, double tol);
/// Exact integral of a canonical top-degree form over its m-simplex.
double integrate_local(const LocalForm& f, int m, double volume, Integral conv = Integral::kOriented);

/// Piecewise polynomial k-form on a complex: one canonical local form per maximal
/// simplex (absent pieces are zero). The complex must outlive the form.
class PolyForm {
 public:
  PolyForm(const MetricComplex& K, int degree);

  const MetricComplex& complex() const noexcept { return *K_; }
  int degree() const noexcept { return degree_; }
  const std::map<Simplex, LocalForm>& pieces() const noexcept { return pieces_; }
  /// nullptr when the piece on T is zero.
  const LocalForm* piece(const Simplex& T) const;
  bool is_zero() const noexcept { return pieces_.empty(); }

  /// T must be a maximal simplex of the complex with dim T >= degree; the piece is canonical.
  void set_piece(const Simplex& T, LocalForm f);
  void add_terms(const Simplex& T, std::span<const Term> terms);
  void add_terms(const Simplex& T, std::initializer_list<Term> terms) {
    add_terms(T, std::span<const Term>(terms.begin(), terms.size()));
  }

  PolyForm& operator+=(const PolyForm& other);
  PolyForm& operator*=(double a);
  friend PolyForm operator+(PolyForm a, const PolyForm& b) { return a += b; }
  friend PolyForm operator*(double a, PolyForm f) { return f *= a; }
  friend bool operator==(const PolyForm& a, const PolyForm& b);

 private:
  const MetricComplex* K_;
  int degree_;
  std::map<Simplex, LocalForm> pieces_;
};

/// Product of hat functions times a wedge of their differentials:
/// coeff * lambda_{m_1} ... lambda_{m_r} dlambda_{d_1} ^ ... ^ dlambda_{d_k}.
/// Forms assembled from such terms are continuous across shared faces.
struct GlobalTerm {
  double coeff = 1.0;
  std::vector<VertexId> monomial;
  std::vector<VertexId> differential;
};
PolyForm global_form(const MetricComplex& K, int degree, std::span<const GlobalTerm> terms);

/// Random form built from `num_terms` global terms of polynomial degree <= max_poly on random simplices.
PolyForm random_polyform(const MetricComplex& K, int degree, int num_terms, int max_poly, std::mt19937_64& rng);

/// Restriction of each piece to a face (the tangential trace). tau must lie in a
/// maximal simplex of the complex; returns zero when no piece carries tau.
LocalForm trace(const PolyForm& w, const Simplex& tau);

/// Exterior derivative (pieces of dimension <= degree become zero).
PolyForm d(const PolyForm& w);
/// BadDimension if the degrees exceed the top dimension of the complex.
PolyForm wedge(const PolyForm& a, const PolyForm& b);

/// Integral over tau in ascending vertex order. BadDimension if deg w != dim tau.
double integrate(const PolyForm& w, const Simplex& tau, Integral conv = Integral::kOriented);
/// Integral over the simplex oriented by the given vertex order.
double integrate(const PolyForm& w, std::span<const VertexId> ordered, Integral conv = Integral::kOriented);

/// Traces agree on every shared face of dimension >= degree.
bool is_face_compatible(const PolyForm& w, double tol = 1e-12);

/// Tangential trace onto a subcomplex. BadSubcomplex unless S is a subcomplex of the carrier.
PolyForm restrict(const PolyForm& w, const MetricComplex& S);

// Norms. |w(x)| is the Euclidean norm in an orthonormal coframe of the embedded simplex.

struct QuadratureOptions {
  /// Relative change between successive refinements accepted as converged (non-even p).
  double tol = 1e-11;
  /// Edgewise subdivision levels tried for non-even p: 1, 2, 4, ... up to this.
  int max_refinement = 8;
};

/// Pointwise |w| on piece T at independent coordinates t_1..t_m.
double pointwise_norm(const PolyForm& w, const Simplex& T, std::span<const double> t);

/// (sum_T int_T |w|^p)^(1/p). Exact-degree quadrature for even integer p. Otherwise the rule
/// is refined edgewise; near zeros of w the relative accuracy is about 1e-7.
double lp_norm_form(const PolyForm& w, double p, const QuadratureOptions& opts = {});
/// Lattice maximum of |w| over T with resolution r (a lower bound of the true sup).
double sup_norm(const PolyForm& w, const Simplex& T, int r = 8);
/// Sum of volumes of the maximal simplices.
double carrier_measure(const MetricComplex& K);

/// {sum_T sup_T|w|^{p_k}}^{1/p_k} + {sum_T sup_T|dw|^{p_{k+1}}}^{1/p_{k+1}}.
double sl_pi_norm(const PolyForm& w, const PiSequence& pi, int r = 8);
/// ||w||_{p_k} + ||dw||_{p_{k+1}}.
double omega_pi_norm(const PolyForm& w, const PiSequence& pi, const QuadratureOptions& opts = {});

struct FormNormReport {
  double lp = 0.0;
  std::map<Simplex, double> sup_per_simplex;
  double sl_pi = 0.0;
  double omega_pi = 0.0;
};
FormNormReport form_norms(const PolyForm& w, const PiSequence& pi, int r = 8);

// Prism extension over the boundary of the unit cube.

struct PrismExtension {
  std::shared_ptr<const MetricComplex> prism;   // carrier x [0, 1]
  std::shared_ptr<const MetricComplex> bottom;  // carrier x {0}
  std::shared_ptr<const MetricComplex> top;     // carrier x {1}
  PolyForm form;                                // (1 - t) * w
};

/// w_ext(x, t) = (1 - t) w(x) on the staircase triangulation of carrier x [0, 1].
/// Vertex at position j of the carrier becomes ids 2j (t = 0) and 2j + 1 (t = 1).
/// BadCarrier unless the carrier triangulates the boundary of [0,1]^n, n in {1, 2}.
PrismExtension prism_extend(const PolyForm& w, int n);

std::string write_polyform(const PolyForm& w);
PolyForm parse_polyform(const MetricComplex& K, std::string_view text);

}  // namespace lpdr
