#include <catch_amalgamated.hpp>

#include "lpdr/cochain.hpp"
#include "lpdr/contract.hpp"
#include "lpdr/generators.hpp"

using namespace lpdr;

namespace {

// Exact rank of an integer matrix by fraction-free (Bareiss) elimination.
Eigen::Index exact_rank(const Eigen::MatrixXd& A) {
  const Eigen::Index R = A.rows(), C = A.cols();
  std::vector<std::vector<__int128>> m(static_cast<std::size_t>(R), std::vector<__int128>(static_cast<std::size_t>(C)));
  for (Eigen::Index r = 0; r < R; ++r) {
    for (Eigen::Index c = 0; c < C; ++c) m[std::size_t(r)][std::size_t(c)] = __int128(A(r, c));
  }
  __int128 prev = 1;
  Eigen::Index rank = 0;
  for (Eigen::Index c = 0; c < C && rank < R; ++c) {
    Eigen::Index piv = rank;
    while (piv < R && m[std::size_t(piv)][std::size_t(c)] == 0) ++piv;
    if (piv == R) continue;
    std::swap(m[std::size_t(piv)], m[std::size_t(rank)]);
    const auto& p = m[std::size_t(rank)];
    for (Eigen::Index r = rank + 1; r < R; ++r) {
      auto& row = m[std::size_t(r)];
      for (Eigen::Index j = c + 1; j < C; ++j) {
        row[std::size_t(j)] = (p[std::size_t(c)] * row[std::size_t(j)] - row[std::size_t(c)] * p[std::size_t(j)]) / prev;
      }
      row[std::size_t(c)] = 0;
    }
    prev = p[std::size_t(c)];
    ++rank;
  }
  return rank;
}

std::vector<Eigen::Index> exact_cohomology(const MatrixComplex<double>& M) {
  std::vector<Eigen::Index> out;
  for (std::size_t i = 0; i < M.dims.size(); ++i) {
    const Eigen::Index rank_out = i < M.D.size() ? exact_rank(M.D[i]) : 0;
    const Eigen::Index rank_in = i ? exact_rank(M.D[i - 1]) : 0;
    out.push_back(M.dims[i] - rank_out - rank_in);
  }
  return out;
}

}  // namespace

TEST_CASE("assemble follows the coboundary") {
  std::map<VertexId, Eigen::VectorXd> v;
  v[0] = Eigen::VectorXd::Constant(1, 0.0);
  v[1] = Eigen::VectorXd::Constant(1, 1.0);
  auto M = assemble(build_complex(v, {{0, 1}}));
  REQUIRE(M.D.size() == 1);
  CHECK(M.D[0] == (Eigen::MatrixXd(1, 2) << -1, 1).finished());

  auto tri = regular_simplex(2);
  auto T = assemble(tri);
  CHECK(T.dims == std::vector<Eigen::Index>{3, 3, 1});
  CHECK(T.max_dd() == 0.0);

  // Matrix action agrees with coboundary on a cochain.
  Cochain c(tri, 1);
  c.set(Simplex{0, 1}, 2.0);
  c.set(Simplex{1, 2}, -1.0);
  CHECK((T.D[1] * c.to_dense()).isApprox(coboundary(c).to_dense()));
  CHECK(write_matrix_complex(M) == "D 0 1 2\n-1 1\n");
  CHECK_THROWS_AS(assemble(triangular_lattice(20)), Error);
}

TEST_CASE("cohomology of spheres and simplices") {
  CHECK(cohomology_dims(assemble(simplex_boundary(2))) == std::vector<Eigen::Index>{1, 1});
  CHECK(cohomology_dims(assemble(simplex_boundary(3))) == std::vector<Eigen::Index>{1, 0, 1});
  for (int n = 1; n <= 4; ++n) {
    auto dims = cohomology_dims(assemble(regular_simplex(n)));
    CHECK(dims[0] == 1);
    for (int k = 1; k <= n; ++k) CHECK(dims[std::size_t(k)] == 0);
  }
}

TEST_CASE("cohomology matches the exact rank oracle") {
  std::mt19937_64 rng(53);
  int checked = 0;
  for (int trial = 0; trial < 30; ++trial) {
    auto K = random_complex(rng, 1 + trial % 3, 50);
    if (K.total_count() > 50) continue;
    auto M = assemble(K);
    CHECK(cohomology_dims(M) == exact_cohomology(M));
    ++checked;
  }
  for (const auto& K : {simplex_boundary(2), simplex_boundary(3), cone(simplex_boundary(2)), regular_simplex(3)}) {
    auto M = assemble(K);
    CHECK(cohomology_dims(M) == exact_cohomology(M));
  }
  CHECK(checked > 10);
}

TEST_CASE("contraction of acyclic complexes") {
  SECTION("identity two-term complex") {
    MatrixComplex<double> M;
    M.dims = {1, 1};
    M.D = {Eigen::MatrixXd::Identity(1, 1)};
    auto h = contract(M);
    CHECK(h.ok());
    CHECK(h.h[1](0, 0) == 1.0);
    CHECK(verify_contraction(M, h.h, 0.0).passes);
  }
  SECTION("augmented simplices and cones") {
    for (const auto& K : {regular_simplex(2), regular_simplex(3), cone(simplex_boundary(2)), cone(simplex_boundary(3))}) {
      auto M = augment(assemble(K));
      auto h = contract(M);
      CHECK(h.ok());
      const auto check = verify_contraction(M, h.h, 1e-10);
      CHECK(check.passes);
      for (double a : h.alpha_closure) CHECK(a <= 1e-8);
    }
    // The 7 cochain dimensions of a triangle plus one for the scalars.
    auto M = augment(assemble(regular_simplex(2)));
    CHECK(M.dims == std::vector<Eigen::Index>{1, 3, 3, 1});
  }
  SECTION("positive degrees without augmentation") {
    auto M = assemble(regular_simplex(3));
    auto h = contract(M, ContractMode::kPositive);
    CHECK(h.ok());
    CHECK(verify_contraction(M, h.h, 1e-10, 1).passes);
    CHECK_FALSE(verify_contraction(M, h.h, 1e-10, 0).passes);
  }
}

TEST_CASE("contraction fails exactly where cohomology lives") {
  auto circle = assemble(simplex_boundary(2));
  auto h = contract(circle);
  CHECK(h.failed_degrees == std::vector<int>{0, 1});
  CHECK(h.residuals[1] == Catch::Approx(1.0));
  auto ac = contract(augment(circle));
  CHECK(ac.failed_degrees == std::vector<int>{2});

  auto sphere = assemble(simplex_boundary(3));
  CHECK(contract(sphere).failed_degrees == std::vector<int>{0, 2});
  CHECK(contract(sphere, ContractMode::kPositive).failed_degrees == std::vector<int>{2});
}

TEST_CASE("verify_contraction edge cases") {
  auto M = assemble(regular_simplex(1));
  std::vector<Eigen::MatrixXd> zero = {Eigen::MatrixXd::Zero(0, 2), Eigen::MatrixXd::Zero(2, 1)};
  const auto check = verify_contraction(M, zero, 1e-8);
  CHECK_FALSE(check.passes);
  CHECK(check.max_residual == 1.0);
  MatrixComplex<double> empty;
  CHECK(verify_contraction(empty, {}, 1e-8).passes);
  CHECK(contract(empty).ok());
}

TEST_CASE("contraction in long double") {
  MatrixComplex<long double> M;
  const auto D = assemble(regular_simplex(2));
  for (auto d : D.dims) M.dims.push_back(d);
  for (const auto& m : D.D) M.D.push_back(m.cast<long double>());
  auto A = augment(M);
  auto h = contract(A);
  CHECK(h.ok());
  CHECK(verify_contraction(A, h.h, 1e-15L).passes);
}
