#include <catch_amalgamated.hpp>

#include <cmath>

#include "lpdr/derham.hpp"
#include "lpdr/generators.hpp"

using namespace lpdr;
using Catch::Approx;

TEST_CASE("Whitney forms of low degree") {
  auto E = regular_simplex(1);
  auto w = whitney(indicator(E, Simplex{0, 1}));
  // t_0 dt_1 - t_1 dt_0 = dt_1 once t_0 = 1 - t_1.
  PolyForm expected(E, 1);
  expected.add_terms(Simplex{0, 1}, {term(1.0, {0, 0}, {1})});
  CHECK(w == expected);
  CHECK(d(w).is_zero());

  auto hat = whitney(indicator(E, Simplex{1}));
  PolyForm t1(E, 0);
  t1.add_terms(Simplex{0, 1}, {term(1.0, {0, 1}, {})});
  CHECK(hat == t1);

  auto tri = regular_simplex(2);
  auto a = indicator(tri, Simplex{0, 1});
  auto b = indicator(tri, Simplex{1, 2});
  auto lhs = whitney(2.0 * a + b);
  auto rhs = 2.0 * whitney(a) + whitney(b);
  for (const auto& [T, f] : lhs.pieces()) CHECK(approx_equal(f, *rhs.piece(T), 1e-14));
  CHECK(is_face_compatible(whitney(a)));
}

TEST_CASE("Whitney constants on regular simplices") {
  for (int k = 0; k <= 4; ++k) {
    auto T = regular_simplex(k);
    const Simplex sigma = T.facets()[0];
    auto w = whitney(indicator(T, sigma));
    CHECK(integrate(w, sigma) == Approx(1.0).epsilon(1e-13));
    CHECK(integrate(w, sigma, Integral::kVolumeDensity) == Approx(whitney_split_constant(k)).epsilon(1e-12));
  }
  CHECK(whitney_split_constant(1) == Approx(1.0));
  CHECK(whitney_split_constant(2) == Approx(std::sqrt(3.0) / 2));
  // The normalizing factor 1/c_k: 1 for k = 0, 1 and 2/sqrt(3) for k = 2.
  auto tri = regular_simplex(2);
  auto wn = whitney_normalized(indicator(tri, Simplex{0, 1, 2}), Integral::kVolumeDensity);
  auto w = whitney(indicator(tri, Simplex{0, 1, 2}));
  CHECK(integrate(wn, Simplex{0, 1, 2}) == Approx(2.0 / std::sqrt(3.0) * integrate(w, Simplex{0, 1, 2})));
}

TEST_CASE("Whitney forms are supported on one simplex of their degree") {
  auto K = triangular_lattice(2);
  for (const auto& sigma : K.simplices(1)) {
    auto c = derham_map(whitney(indicator(K, sigma)));
    CHECK(c.nnz() == 1);
    CHECK(c(sigma) == Approx(1.0).epsilon(1e-13));
    auto edges = skeleton(K, 1);
    auto r = restrict(whitney(indicator(K, sigma)), edges);
    for (const auto& [T, f] : r.pieces()) CHECK(T == sigma);
  }
  CHECK(derham_map(PolyForm(K, 1)).is_zero());
}

TEST_CASE("split identity on random complexes") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 6; ++trial) {
    auto K = random_complex(rng, 1 + trial % 3, 200);
    for (int k = 0; k <= K.dim(); ++k) {
      for (Integral conv : {Integral::kOriented, Integral::kVolumeDensity}) {
        const auto report = verify_split(K, k, 10, rng, conv);
        CHECK(report.sample_count == 10);
        CHECK(report.max_identity_error <= 1e-10);
        if (conv == Integral::kOriented) CHECK(report.max_stokes_error <= 1e-10);
        CHECK(report.max_whitney_ratio > 0.0);
      }
    }
  }
  MetricComplex empty;
  CHECK(verify_split(empty, 0, 5, rng).sample_count == 0);
}

TEST_CASE("Stokes commutes the de Rham map with d") {
  std::mt19937_64 rng(43);
  auto T = regular_simplex(3);
  for (int trial = 0; trial < 20; ++trial) {
    const int k = trial % 3;
    CHECK(verify_stokes(random_polyform(T, k, 6, 3, rng)).max_stokes_error <= 1e-10);
  }
  auto K = triangular_lattice(3);
  for (VertexId v : K.vertex_ids()) {
    CHECK(verify_stokes(whitney(indicator(K, Simplex{v}))).max_stokes_error <= 1e-12);
  }
}

TEST_CASE("sl_pi norm of an edge Whitney form on one triangle") {
  auto tri = regular_simplex(2);
  auto w = whitney(indicator(tri, Simplex{0, 1}));
  const PiSequence pi{2.0, 2.0, 2.0};
  const auto report = form_norms(w, pi);
  const double sw = report.sup_per_simplex.at(Simplex{0, 1, 2});
  const double sdw = sup_norm(d(w), Simplex{0, 1, 2});
  CHECK(report.sl_pi == Approx(sw + sdw));
  // dW = 2 dt_0 ^ dt_1 and |dt_0 ^ dt_1| = 1 / (2 area), so |dW| = 1 / area.
  CHECK(sdw == Approx(1.0 / (std::sqrt(3.0) / 4)));
  CHECK(sw > 0.0);
}
