#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace lpdr {

/// A k-form on the unit ball of R^n (n = 1 or 2) sampled on the regular grid over
/// [-1,1]^n with spacing h. Nodes with |x| >= 1 are masked and hold 0.
/// Node (i_0, ..., i_{n-1}) has flat index sum_a i_a N^(n-1-a), so the last axis runs fastest.
class GridForm {
 public:
  /// Zero form. BadDimension unless n is 1 or 2, 0 <= k <= n and 2/h is an integer.
  GridForm(int n, int k, double h);

  /// Samples f(x), which returns the components in the order of axis_subsets(n, k).
  static GridForm sample(int n, int k, double h, const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f);

  int n() const noexcept { return n_; }
  int degree() const noexcept { return k_; }
  double spacing() const noexcept { return h_; }
  Eigen::Index nodes_per_axis() const noexcept { return N_; }
  Eigen::Index node_count() const noexcept { return count_; }
  std::size_t component_count() const noexcept { return values_.size(); }

  /// Strictly increasing axis subsets of size k, lexicographic.
  static std::vector<std::vector<int>> axis_subsets(int n, int k);
  const std::vector<int>& axes(std::size_t component) const { return axes_[component]; }

  double coordinate(Eigen::Index i) const noexcept { return coords_[std::size_t(i)]; }
  Eigen::VectorXd point(Eigen::Index node) const;
  bool masked(Eigen::Index node) const noexcept { return mask_[std::size_t(node)]; }

  Eigen::VectorXd& component(std::size_t c) { return values_[c]; }
  const Eigen::VectorXd& component(std::size_t c) const { return values_[c]; }

  /// Mask-aware multilinear interpolation of every component at p. Corners inside
  /// the mask are dropped and the rest renormalized; a point whose cell has no
  /// unmasked corner takes the value of the nearest unmasked node.
  void interpolate(const double* p, double* out) const;

  GridForm zeros_like(int k) const { return GridForm(n_, k, h_); }

  GridForm& operator+=(const GridForm& o);
  GridForm& operator-=(const GridForm& o);
  friend GridForm operator+(GridForm a, const GridForm& b) { return a += b; }
  friend GridForm operator-(GridForm a, const GridForm& b) { return a -= b; }

  /// Max |component| over unmasked nodes with keep(x) true (all nodes when keep is empty).
  double max_abs(const std::function<bool(const Eigen::VectorXd&)>& keep = {}) const;

 private:
  void check_compatible(const GridForm& o) const;

  int n_;
  int k_;
  double h_;
  Eigen::Index N_;
  Eigen::Index count_;
  std::vector<double> coords_;
  std::vector<bool> mask_;
  std::vector<std::vector<int>> axes_;
  std::vector<Eigen::VectorXd> values_;
};

/// h(y) = y / sqrt(1 + |y|^2) and its inverse z / sqrt(1 - |z|^2).
Eigen::VectorXd ball_map(const Eigen::VectorXd& y);
Eigen::VectorXd ball_map_inverse(const Eigen::VectorXd& z);

/// s_v(x) = h(h^-1(x) + v) on the open ball and x on the sphere. OutsideDomain for |x| > 1.
Eigen::VectorXd ball_diffeo(const Eigen::VectorXd& v, const Eigen::VectorXd& x);
/// Jacobian of x -> s_v(x) for |x| < 1.
Eigen::MatrixXd ball_diffeo_jacobian(const Eigen::VectorXd& v, const Eigen::VectorXd& x);

struct MollifierConfig {
  double epsilon = 0.1;  // in [0, 1]
  int kernel_grid = 33;  // midpoint nodes per axis on [-1,1]^n; even values are raised by one
};

/// Discrete kernel exp(-1/(1-|v|^2)): weights are multiples of 2^-40 summing to exactly 1
/// and symmetric under v -> -v. Nodes with zero weight are dropped.
struct KernelRule {
  std::vector<Eigen::VectorXd> nodes;
  std::vector<double> weights;
};
KernelRule kernel_rule(int n, const MollifierConfig& cfg);

/// R w = sum_v tau(v) s_{eps v}^* w. BadEpsilon unless 0 <= eps <= 1.
GridForm regularize(const GridForm& w, const MollifierConfig& cfg);

/// Cone operator (S w)(x) = int_0^1 t^(k-1) (x -| w(tx)) dt, integrated exactly on the
/// interpolant piece by piece along the ray. BadDegree for k = 0.
GridForm cone_S(const GridForm& w);

/// Central differences, second-order one-sided next to the mask. BadDegree for k = n.
GridForm grid_d(const GridForm& w);

/// A = (R - 1) S.
GridForm homotopy_A(const GridForm& w, const MollifierConfig& cfg);

struct HomotopyReport {
  double residual = 0.0;  // max |dA w + A dw - (R w - w)| over the checked nodes
  Eigen::Index nodes_checked = 0;
  bool passes = false;
};

/// Checks dA + Ad = R - 1 at nodes farther than eps + 2h from the sphere. For 0-forms only
/// the A d term is present.
HomotopyReport verify_homotopy(const GridForm& w, const MollifierConfig& cfg, double tol);

struct SupportReport {
  double delta = 0.0;             // max |s_{eps v}(x) - x| over nodes and kernel support
  double effective_radius = 0.0;  // r - delta - sqrt(n) h
  double input_max = 0.0;         // max |w| on the disc of radius r, should be 0
  double output_max = 0.0;        // max |R w| on the shrunk disc
  Eigen::Index nodes_checked = 0;
  bool passes = false;
};

/// For w vanishing on {|x - x0| < r}: R w must vanish (<= tol) on the disc of radius
/// r - delta - sqrt(n) h, the last term covering the interpolation stencil.
SupportReport verify_support_control(const GridForm& w, const MollifierConfig& cfg, const Eigen::VectorXd& x0, double r,
                                     double tol = 1e-12);

/// Text dump: `n k h`, then one line of node values per component.
std::string write_grid_form(const GridForm& w);
GridForm parse_grid_form(std::string_view text);

}  // namespace lpdr
