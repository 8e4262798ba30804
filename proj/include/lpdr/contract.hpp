#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lpdr/complex.hpp"
#include "lpdr/error.hpp"

namespace lpdr {

/// Cochain complex 0 -> V_0 -> V_1 -> ... -> V_n -> 0 with D_i : V_i -> V_{i+1}.
/// When augmented, V_0 is the extra copy of the scalars in front of C^0.
template <typename Scalar>
struct MatrixComplex {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  std::vector<Eigen::Index> dims;
  std::vector<Matrix> D;  // D[i] is dims[i+1] x dims[i]
  bool augmented = false;

  int top() const noexcept { return int(dims.size()) - 1; }

  /// max |D_{i+1} D_i| over all i.
  Scalar max_dd() const {
    Scalar worst = 0;
    for (std::size_t i = 0; i + 1 < D.size(); ++i) {
      if (D[i].size() && D[i + 1].size()) worst = std::max(worst, Scalar((D[i + 1] * D[i]).cwiseAbs().maxCoeff()));
    }
    return worst;
  }
};

template <typename Scalar>
MatrixComplex<Scalar> augment(const MatrixComplex<Scalar>& M) {
  MatrixComplex<Scalar> out;
  out.augmented = true;
  out.dims.push_back(1);
  out.dims.insert(out.dims.end(), M.dims.begin(), M.dims.end());
  out.D.push_back(MatrixComplex<Scalar>::Matrix::Ones(M.dims.empty() ? 0 : M.dims[0], 1));
  out.D.insert(out.D.end(), M.D.begin(), M.D.end());
  return out;
}

/// Numerical rank with the singular-value threshold rel_tol * sigma_max.
template <typename Derived>
Eigen::Index numerical_rank(const Eigen::MatrixBase<Derived>& A, double rel_tol = 1e-10) {
  if (A.size() == 0) return 0;
  Eigen::JacobiSVD<typename Derived::PlainObject> svd(A);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0) return 0;
  Eigen::Index r = 0;
  while (r < s.size() && s(r) > rel_tol * s(0)) ++r;
  return r;
}

/// Moore-Penrose pseudo-inverse with the same threshold.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> pseudo_inverse(
    const Eigen::MatrixBase<Derived>& A, double rel_tol = 1e-10) {
  using Out = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (A.size() == 0) return Out::Zero(A.cols(), A.rows());
  Eigen::JacobiSVD<typename Derived::PlainObject> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  auto inv = s;
  for (Eigen::Index i = 0; i < s.size(); ++i) inv(i) = s(i) > rel_tol * s(0) && s(i) > 0 ? 1 / s(i) : 0;
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

/// dim ker D_i - rank D_{i-1} for each degree.
template <typename Scalar>
std::vector<Eigen::Index> cohomology_dims(const MatrixComplex<Scalar>& M, double rel_tol = 1e-10) {
  std::vector<Eigen::Index> rank(M.dims.size(), 0);
  for (std::size_t i = 0; i < M.D.size() && i < M.dims.size(); ++i) rank[i] = numerical_rank(M.D[i], rel_tol);
  std::vector<Eigen::Index> out;
  for (std::size_t i = 0; i < M.dims.size(); ++i) out.push_back(M.dims[i] - rank[i] - (i ? rank[i - 1] : 0));
  return out;
}

enum class ContractMode {
  kPositive,  // degrees >= 1 only; h^0 = 0 and the degree-0 identity is not required
  kFull       // every degree, including 0 (use on augmented complexes)
};

template <typename Scalar>
struct Contraction {
  using Matrix = typename MatrixComplex<Scalar>::Matrix;
  std::vector<Matrix> h;  // h[i] : V_i -> V_{i-1}; h[0] is 0 x dims[0]
  std::vector<int> failed_degrees;
  std::vector<Scalar> residuals;  // ||(D_{i-1} pinv D_{i-1} - 1) alpha^i||_2 per degree
  std::vector<Scalar> alpha_closure;  // max |D_{i-1} alpha^{i-1}| per step, from the top down
  bool ok() const noexcept { return failed_degrees.empty(); }
};

/// Descending induction: h^n = eta^n, alpha^{i-1} = 1 - h^i D_{i-1}, h^{i-1} = eta^{i-1} alpha^{i-1},
/// with eta = pinv(D). Degree i fails when alpha^i is not in the image of D_{i-1}.
template <typename Scalar>
Contraction<Scalar> contract(const MatrixComplex<Scalar>& M, ContractMode mode = ContractMode::kFull,
                             Scalar fail_tol = Scalar(1e-8), double rank_tol = 1e-10) {
  using Matrix = typename MatrixComplex<Scalar>::Matrix;
  const int n = M.top();
  Contraction<Scalar> out;
  out.h.resize(std::size_t(std::max(n + 1, 0)));
  out.residuals.assign(std::size_t(std::max(n + 1, 0)), Scalar(0));
  if (n < 0) return out;
  out.h[0] = Matrix::Zero(0, M.dims[0]);
  const int lowest = mode == ContractMode::kFull ? 0 : 1;
  Matrix alpha = Matrix::Identity(M.dims[std::size_t(n)], M.dims[std::size_t(n)]);
  for (int i = n; i >= lowest; --i) {
    const std::size_t si = std::size_t(i);
    if (i == 0) {
      // No D_{-1}: the identity at degree 0 needs alpha^0 = 0.
      out.residuals[0] = alpha.size() ? Scalar(alpha.operatorNorm()) : Scalar(0);
      if (out.residuals[0] > fail_tol) out.failed_degrees.push_back(0);
      break;
    }
    const Matrix& Dm = M.D[si - 1];
    const Matrix eta = pseudo_inverse(Dm, rank_tol);
    const Matrix miss = Dm * (eta * alpha) - alpha;
    out.residuals[si] = miss.size() ? Scalar(miss.operatorNorm()) : Scalar(0);
    if (out.residuals[si] > fail_tol) out.failed_degrees.push_back(i);
    out.h[si] = eta * alpha;
    const Matrix next = Matrix::Identity(M.dims[si - 1], M.dims[si - 1]) - out.h[si] * Dm;
    const Matrix closure = Dm * next;
    out.alpha_closure.push_back(closure.size() ? Scalar(closure.cwiseAbs().maxCoeff()) : Scalar(0));
    alpha = next;
  }
  std::sort(out.failed_degrees.begin(), out.failed_degrees.end());
  return out;
}

template <typename Scalar>
struct ContractionCheck {
  std::vector<Scalar> residual_per_degree;  // max |D_{i-1} h^i + h^{i+1} D_i - 1|
  Scalar max_residual = 0;
  bool passes = true;
};

/// Residual of the homotopy identity at each degree >= first_degree.
template <typename Scalar>
ContractionCheck<Scalar> verify_contraction(const MatrixComplex<Scalar>& M, const std::vector<typename MatrixComplex<Scalar>::Matrix>& h,
                                            Scalar tol, int first_degree = 0) {
  using Matrix = typename MatrixComplex<Scalar>::Matrix;
  ContractionCheck<Scalar> check;
  const int n = M.top();
  if (int(h.size()) != n + 1 && n >= 0) throw Error(ErrorCode::kBadDimension, "contraction has the wrong number of maps");
  for (int i = 0; i <= n; ++i) {
    const std::size_t si = std::size_t(i);
    Matrix sum = -Matrix::Identity(M.dims[si], M.dims[si]);
    if (i >= 1) sum += M.D[si - 1] * h[si];
    if (i < n) sum += h[si + 1] * M.D[si];
    const Scalar r = sum.size() ? Scalar(sum.cwiseAbs().maxCoeff()) : Scalar(0);
    check.residual_per_degree.push_back(r);
    if (i >= first_degree) {
      check.max_residual = std::max(check.max_residual, r);
      if (r > tol) check.passes = false;
    }
  }
  return check;
}

/// Matrices of the coboundary in canonical simplex order. SizeLimit above max_simplices.
MatrixComplex<double> assemble(const MetricComplex& K, std::size_t max_simplices = 2000);

/// Text dump: per degree `D i rows cols` followed by rows of entries.
std::string write_matrix_complex(const MatrixComplex<double>& M);

}  // namespace lpdr
