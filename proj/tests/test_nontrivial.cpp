#include <catch_amalgamated.hpp>

#include <cmath>

#include "lpdr/nontrivial.hpp"

using namespace lpdr;
using Catch::Approx;

namespace {

// Smallest terms first in long double: an independent way to form the same sums.
long double reverse_sum(double a, std::size_t m) {
  long double s = 0;
  for (std::size_t i = m; i >= 1; --i) s += std::pow(static_cast<long double>(i), -static_cast<long double>(a));
  return s;
}

double sup_by_sampling(const BumpFamily& fam, std::size_t i) {
  double best = 0.0;
  const Eigen::VectorXd& c = fam.centers[i - 1];
  for (int s = -200; s <= 200; ++s) {
    Eigen::VectorXd x = c;
    x(0) += fam.radius * s / 200.0;
    best = std::max(best, std::abs(fam.value(i, x)));
  }
  return best * std::sqrt(fam.n == 2 ? 2.0 : 1.0);
}

}  // namespace

TEST_CASE("bump profile") {
  const double zero[] = {0.0};
  CHECK(bump_profile(zero) == Approx(std::exp(-1.0)).epsilon(1e-15));
  const double edge[] = {1.0}, outside[] = {0.6, 0.9};
  CHECK(bump_profile(edge) == 0.0);
  CHECK(bump_profile(outside) == 0.0);
  const double a[] = {0.3, -0.2}, b[] = {-0.3, 0.2};
  CHECK(bump_profile(a) == bump_profile(b));
  // Gradient against a central difference.
  Eigen::VectorXd x(2);
  x << 0.31, -0.17;
  const double h = 1e-6;
  for (int j = 0; j < 2; ++j) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(2);
    e(j) = h;
    CHECK(bump_gradient(x)(j) == Approx((bump_profile(Eigen::VectorXd(x + e)) - bump_profile(Eigen::VectorXd(x - e))) / (2 * h)).epsilon(1e-7));
  }
}

TEST_CASE("family construction and validation") {
  auto fam = build_family(0, PiSequence{2.0, 4.0}, 1.0, 10);
  CHECK(fam.weight(1) == 1.0);
  CHECK(fam.weight(8) == Approx(0.5).epsilon(1e-15));
  CHECK(fam.radius == Approx(0.45));
  for (std::size_t i = 1; i < 10; ++i) CHECK(fam.weight(i + 1) < fam.weight(i));
  for (std::size_t i = 1; i <= 10; ++i) {
    CHECK(fam.sup_value(i) == Approx(fam.weight(i) * std::exp(-1.0)));
    CHECK(sup_by_sampling(fam, i) == Approx(fam.sup_value(i)).epsilon(1e-12));
  }
  // Supports are balls of radius rho around barycenters one unit apart.
  for (std::size_t i = 1; i < fam.centers.size(); ++i) {
    CHECK((fam.centers[i] - fam.centers[i - 1]).norm() > 2 * fam.radius);
  }

  auto fam2 = build_family(1, PiSequence{2.0, 2.0, 4.0}, 1.0, 7);
  CHECK(fam2.n == 2);
  CHECK(fam2.carriers.size() == 7);
  CHECK(fam2.sup_value(1) == Approx(std::sqrt(2.0) * std::exp(-1.0)));
  CHECK(sup_by_sampling(fam2, 3) == Approx(fam2.sup_value(3)).epsilon(1e-12));

  CHECK_THROWS_AS(build_family(0, PiSequence{4.0, 2.0}, 1.0, 10), Error);
  try {
    build_family(0, PiSequence{4.0, 2.0}, 7.0, 10);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNotACounterexample);
  }
  try {
    build_family(0, PiSequence{2.0, 4.0}, 2.0, 10);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kBadEpsilon);
  }
  CHECK_THROWS_AS(build_family(0, PiSequence{2.0, 4.0}, 0.0, 10), Error);
}

TEST_CASE("p-series partial sums and tails") {
  auto conv = p_series(4.0 / 3.0, 100000);
  CHECK(conv.converges);
  REQUIRE(conv.partial_sums[2].first == 1000);
  CHECK(conv.tail_bounds[2] == Approx(0.3).epsilon(1e-12));
  auto div = p_series(2.0 / 3.0, 100000);
  CHECK_FALSE(div.converges);
  const double s1000 = div.partial_sums[2].second;
  CHECK(s1000 == Approx(double(reverse_sum(2.0 / 3.0, 1000))).epsilon(1e-14));
  // S_1000 = 27.557, within 10% of 3 m^(1/3) = 30.
  CHECK(s1000 == Approx(27.5574).margin(1e-4));
  CHECK(std::abs(s1000 / 30.0 - 1.0) < 0.1);
  for (const auto& [m, s] : div.partial_sums) {
    const double x = double(m), a = 2.0 / 3.0;
    CHECK(s >= (std::pow(x + 1, 1 - a) - 1) / (1 - a));
    CHECK(s <= 1 + (std::pow(x, 1 - a) - 1) / (1 - a));
    if (m >= 10000) CHECK(std::abs(s / (3 * std::cbrt(x)) - 1) <= 0.1);
  }
  for (const auto& [m, s] : conv.partial_sums) CHECK(s == Approx(double(reverse_sum(4.0 / 3.0, m))).epsilon(1e-13));
  CHECK_FALSE(p_series(1.0, 100).converges);
  CHECK(checkpoints(1000) == std::vector<std::size_t>{10, 100, 1000});
  CHECK(checkpoints(5) == std::vector<std::size_t>{5});
}

TEST_CASE("norm series constants") {
  auto fam = build_family(0, PiSequence{2.0, 4.0}, 1.0, 100);
  // ||omega_1||_2^2 by a fine trapezoid rule over its edge.
  double direct = 0.0;
  const int N = 200000;
  for (int j = 0; j <= N; ++j) {
    Eigen::VectorXd x = Eigen::VectorXd::Constant(1, double(j) / N);
    const double v = fam.value(1, x);
    direct += (j == 0 || j == N ? 0.5 : 1.0) * v * v / N;
  }
  const auto form = family_norm_series(fam, 2.0, SeriesKind::kForm);
  CHECK(form.constant == Approx(direct).epsilon(1e-9));
  CHECK_FALSE(form.converges);
  CHECK(family_norm_series(fam, 4.0, SeriesKind::kForm).converges);
  CHECK(family_norm_series(fam, 4.0, SeriesKind::kSup).constant == Approx(std::exp(-4.0)));
  // At p = p_{k+1} - eps the exponent is exactly 1.
  auto edge = family_norm_series(fam, 3.0, SeriesKind::kDForm);
  CHECK(edge.exponent == 1.0);
  CHECK_FALSE(edge.converges);
  const auto cochain = family_norm_series(fam, 2.0, SeriesKind::kCochain);
  CHECK(cochain.constant == Approx(2 * std::exp(-2.0)).epsilon(1e-12));
}

TEST_CASE("bumps lie in the kernel of the de Rham map") {
  auto fam = build_family(0, PiSequence{2.0, 4.0}, 1.0, 200);
  auto report = derham_kernel_check(fam);
  CHECK(report.passes);
  CHECK(report.max_form_integral == 0.0);
  CHECK(report.max_dform_integral <= 1e-12);
  CHECK(report.simplices_checked == 201 + 200);

  auto fam2 = build_family(1, PiSequence{2.0, 2.0, 4.0}, 1.0, 12);
  auto report2 = derham_kernel_check(fam2);
  CHECK(report2.passes);
  CHECK(report2.max_dform_integral <= 1e-12);
}

TEST_CASE("subdivision image") {
  auto fam = build_family(0, PiSequence{2.0, 4.0}, 1.0, 500);
  auto image = subdivision_image(fam, 100);
  CHECK(image.bumps == 100);
  REQUIRE(image.reference.size() == 2);
  // Half-edges carry -C w_i and +C w_i in the orientation induced from the parent edge.
  CHECK(image.reference[0] == Approx(-std::exp(-1.0)).epsilon(1e-12));
  CHECK(image.reference[1] == Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(image.max_pattern_error <= 1e-12);
  CHECK(image.image.nnz() == 200);
  CHECK(std::pow(lp_norm(image.image, 2.0), 2.0) ==
        Approx(2 * std::exp(-2.0) * double(reverse_sum(2.0 / 3.0, 100))).epsilon(1e-12));

  auto fam2 = build_family(1, PiSequence{2.0, 2.0, 4.0}, 1.0, 6);
  auto image2 = subdivision_image(fam2);
  CHECK(image2.reference.size() == 6);
  CHECK(image2.max_pattern_error <= 1e-10);
  double sum = 0.0;
  for (double r : image2.reference) sum += r;
  CHECK(sum == Approx(0.0).margin(1e-12));
}

TEST_CASE("non-triviality certificates") {
  auto report = verify_nontriviality(PiSequence{2.0, 4.0}, 1.0, {100, 10000});
  CHECK(report.kernel.passes);
  CHECK(report.upper_cauchy.passes);
  CHECK(report.lower_divergence.passes);
  CHECK(report.cochain_gap.passes);
  CHECK(report.swapped_converges.passes);
  CHECK(report.passes());
  const auto csv = nontrivial_csv(report);
  CHECK(csv.rfind("m,S_pk,S_pk1,tail\n10,", 0) == 0);

  CHECK_THROWS_AS(verify_nontriviality(PiSequence{4.0, 2.0}, 1.0, {100}), Error);
  CHECK_THROWS_AS(verify_nontriviality(PiSequence{2.0, 4.0}, 2.0, {100}), Error);

  auto two = verify_nontriviality(PiSequence{2.0, 2.0, 4.0}, 1.0, {20}, 1);
  CHECK(two.kernel.passes);
  CHECK(two.cochain_gap.passes);
}
