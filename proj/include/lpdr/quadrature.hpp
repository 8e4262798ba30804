#pragma once

#include <vector>

#include <Eigen/Dense>

namespace lpdr {

/// Gauss-Legendre rule with q nodes on [0, 1]; weights sum to 1.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussRule gauss_legendre(int q);

/// Positive-weight rule on the reference m-simplex {s_j >= 0, sum s_j <= 1}.
/// points is m x N in independent coordinates s_1..s_m; weights sum to 1, so
/// the integral over a simplex T is vol(T) * sum_i w_i f(s_i).
struct SimplexRule {
  Eigen::MatrixXd points;
  Eigen::VectorXd weights;
};

/// Collapsed (Duffy) tensor Gauss rule, exact for polynomials of total degree <= degree.
SimplexRule simplex_rule(int m, int degree);

/// The same rule applied on each of the r^m cells of the edgewise subdivision.
SimplexRule refined_simplex_rule(int m, int degree, int r);

/// Vertices (m x (m+1), independent coordinates) of the r^m congruent cells of the
/// edgewise (Kuhn) subdivision of the reference m-simplex.
std::vector<Eigen::MatrixXd> edgewise_subdivision(int m, int r);

/// Points of the barycentric lattice {a / r : a in N^{m+1}, |a| = r}, as m x N.
Eigen::MatrixXd barycentric_lattice(int m, int r);

}  // namespace lpdr
