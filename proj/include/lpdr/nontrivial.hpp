#pragma once

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lpdr/cochain.hpp"
#include "lpdr/complex.hpp"

namespace lpdr {

/// Psi(x) = exp(1 / (|x|^2 - 1)) for |x| < 1, else 0.
double bump_profile(std::span<const double> x);
double bump_profile(const Eigen::VectorXd& x);
Eigen::VectorXd bump_gradient(const Eigen::VectorXd& x);

/// Weighted bumps w_i Psi((x - b_i) / rho) sum_{|I| = k} dx_I, one per (k+1)-simplex of
/// the truncated ray ray_complex(k + 1, .), with w_i = (1/i)^(1/(p_{k+1} - eps)).
/// Supported configurations: k = 0 (n = 1) and k = 1 (n = 2).
struct BumpFamily {
  int k = 0;
  int n = 1;
  std::vector<double> pi;  // p_k, p_{k+1}
  double eps = 0.0;
  std::size_t M = 0;
  std::shared_ptr<const MetricComplex> host;
  std::vector<Simplex> carriers;  // carriers[i - 1] holds bump i
  std::vector<Eigen::VectorXd> centers;
  double radius = 0.0;  // chart radius, 0.9 of the distance from each barycenter to its simplex boundary

  double weight(std::size_t i) const;
  /// Coefficient of omega_i at x (multiplies sum dx_I).
  double value(std::size_t i, const Eigen::VectorXd& x) const;
  /// d omega_i: for k = 0 the gradient; for k = 1 the dx^dy coefficient in the first entry.
  Eigen::VectorXd dvalue(std::size_t i, const Eigen::VectorXd& x) const;
  /// sqrt(binom(n, k)) w_i / e.
  double sup_value(std::size_t i) const;
};

/// Errors: NotACounterexample unless p_k < p_{k+1} (checked first); BadEpsilon unless
/// 0 < eps < p_{k+1} - p_k; BadDimension unless k is 0 or 1 and M >= 1.
BumpFamily build_family(int k, const PiSequence& pi, double eps, std::size_t M);

enum class SeriesKind { kForm, kDForm, kSup, kCochain };

struct SeriesVerdict {
  double exponent = 0.0;  // a = p / (p_{k+1} - eps)
  bool converges = false;
  std::vector<std::pair<std::size_t, double>> partial_sums;  // (m, sum_{i <= m} i^-a)
  std::vector<double> tail_bounds;  // m^(1 - a) / (a - 1) per checkpoint when a > 1
  double constant = 0.0;  // per-bump factor c^p, so the norm^p is constant * S_m
};

/// Checkpoints 10, 100, ..., up to M, plus M itself.
std::vector<std::size_t> checkpoints(std::size_t M);
/// Compensated partial sums of i^-a at the given checkpoints.
SeriesVerdict p_series(double a, std::size_t M);

SeriesVerdict family_norm_series(const BumpFamily& fam, double p, SeriesKind which);

struct KernelReport {
  double max_form_integral = 0.0;   // over k-simplices of K
  double max_dform_integral = 0.0;  // over (k+1)-simplices of K
  std::size_t simplices_checked = 0;
  bool passes = false;
};

/// I(omega) and I(d omega) on the host complex, by quadrature; passes when both are <= tol.
KernelReport derham_kernel_check(const BumpFamily& fam, double tol = 1e-10);

struct SubdivisionImage {
  std::shared_ptr<const MetricComplex> refined;
  Cochain image;  // I(d omega) on the (k+1)-simplices of K', ascending orientation
  /// Reference values of I(d omega_1) on the simplices of one star, taken in the orientation induced
  /// from the parent simplex; bump i carries w_i times these.
  std::vector<double> reference;
  double max_pattern_error = 0.0;  // max |value - w_i * reference| over the computed bumps
  std::size_t bumps = 0;
};

/// Computes the K' image for the first min(M, limit) bumps.
SubdivisionImage subdivision_image(const BumpFamily& fam, std::size_t limit = 2000);

struct Certificate {
  bool passes = false;
  std::string detail;
};

struct NontrivialReport {
  Certificate kernel;             // (a)
  Certificate upper_cauchy;       // (b) omega and d omega in the p_{k+1} norm
  Certificate lower_divergence;   // (c) d omega in the p_k norm
  Certificate cochain_gap;        // (d) K' image in l_{p_{k+1}} but not l_{p_k}
  Certificate swapped_converges;  // the same weights with the exponents swapped
  SeriesVerdict lower;            // p_k series
  SeriesVerdict upper;            // p_{k+1} series
  bool passes() const noexcept {
    return kernel.passes && upper_cauchy.passes && lower_divergence.passes && cochain_gap.passes &&
           swapped_converges.passes;
  }
};

/// Errors as build_family.
NontrivialReport verify_nontriviality(const PiSequence& pi, double eps, const std::vector<std::size_t>& M_list,
                                      int k = 0);

/// Rows "m,S_pk,S_pk1,tail" for the report's checkpoints.
std::string nontrivial_csv(const NontrivialReport& report);

}  // namespace lpdr
