#include <catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "lpdr/complex.hpp"
#include "lpdr/complex_io.hpp"
#include "lpdr/generators.hpp"

using namespace lpdr;

namespace {

MetricComplex unit_triangle(std::vector<std::vector<VertexId>> tops) {
  std::map<VertexId, Eigen::VectorXd> v;
  v[0] = Eigen::Vector2d(0, 0);
  v[1] = Eigen::Vector2d(1, 0);
  v[2] = Eigen::Vector2d(0.5, std::sqrt(3.0) / 2);
  return build_complex(v, tops);
}

// Brute force: every k-subset of every simplex must be present.
bool face_closed(const MetricComplex& K) {
  for (int k = 1; k <= K.dim(); ++k) {
    for (const auto& s : K.simplices(k)) {
      for (int i = 0; i < s.size(); ++i) {
        if (!K.contains(s.face(i))) return false;
      }
    }
  }
  return true;
}

std::size_t factorial(int k) { return k <= 1 ? 1 : std::size_t(k) * factorial(k - 1); }

}  // namespace

TEST_CASE("build_complex closes faces") {
  auto ring = unit_triangle({{0, 1}, {1, 2}, {0, 2}});
  CHECK(ring.dim() == 1);
  CHECK(ring.count(0) == 3);
  CHECK(ring.count(1) == 3);
  CHECK(ring.count(2) == 0);

  auto tri = unit_triangle({{0, 1, 2}});
  CHECK(tri.count(1) == 3);
  CHECK(tri.count(0) == 3);
  CHECK(tri.count(2) == 1);
}

TEST_CASE("build_complex errors") {
  try {
    unit_triangle({{0, 0, 1}});
    FAIL("expected DegenerateSimplex");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDegenerateSimplex);
  }
  try {
    unit_triangle({{0, 1, 7}});
    FAIL("expected MissingVertex");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kMissingVertex);
  }
}

TEST_CASE("coface map inverts the face relation") {
  auto K = triangular_lattice(3);
  for (int k = 0; k < K.dim(); ++k) {
    std::size_t pairs = 0;
    for (Index i = 0; i < K.count(k); ++i) {
      for (Index j : K.coface_indices(k, i)) {
        CHECK(K.simplices(k)[i].is_face_of(K.simplices(k + 1)[j]));
        ++pairs;
      }
    }
    CHECK(pairs == K.count(k + 1) * std::size_t(k + 2));
  }
}

TEST_CASE("validate_bounded_geometry") {
  auto tri = unit_triangle({{0, 1, 2}});
  CHECK(validate_bounded_geometry(tri, 1.0, 6).passes);

  std::map<VertexId, Eigen::VectorXd> v;
  v[0] = Eigen::VectorXd::Constant(1, 0.0);
  v[1] = Eigen::VectorXd::Constant(1, 3.0);
  auto long_edge = build_complex(v, {{0, 1}});
  auto r = validate_bounded_geometry(long_edge, 2.0, 6);
  CHECK_FALSE(r.passes);
  CHECK(r.violations.size() == 1);

  // Seven spokes around a centre.
  std::map<VertexId, Eigen::VectorXd> s;
  s[0] = Eigen::Vector2d(0, 0);
  std::vector<std::vector<VertexId>> spokes;
  for (int j = 1; j <= 7; ++j) {
    s[j] = Eigen::Vector2d(std::cos(j), std::sin(j));
    spokes.push_back({0, j});
  }
  auto star7 = build_complex(s, spokes);
  auto rs = validate_bounded_geometry(star7, 1.0, 6);
  CHECK_FALSE(rs.passes);
  CHECK(rs.max_vertex_degree == 7);

  std::map<VertexId, Eigen::VectorXd> two;
  two[0] = Eigen::Vector2d(0, 0);
  two[1] = Eigen::Vector2d(1, 0);
  two[2] = Eigen::Vector2d(5, 0);
  two[3] = Eigen::Vector2d(6, 0);
  auto split = build_complex(two, {{0, 1}, {2, 3}});
  auto rd = validate_bounded_geometry(split, 1.0, 6);
  CHECK_FALSE(rd.connected);
  CHECK_FALSE(rd.passes);
}

TEST_CASE("skeleton") {
  auto tri = regular_simplex(2);
  auto sk = skeleton(tri, 1);
  CHECK(sk.dim() == 1);
  CHECK(sk.count(1) == 3);
  CHECK(skeleton(tri, 2) == tri);
  auto verts = skeleton(regular_simplex(3), 0);
  CHECK(verts.count(0) == 4);
  CHECK(verts.dim() == 0);
  CHECK_THROWS_AS(skeleton(tri, 3), Error);
  CHECK_THROWS_AS(skeleton(tri, -1), Error);
}

TEST_CASE("star") {
  auto fan = hexagonal_fan();
  CHECK(star(fan, 0) == fan);

  std::map<VertexId, Eigen::VectorXd> v;
  for (int j = 0; j < 4; ++j) v[j] = Eigen::VectorXd::Constant(1, double(j));
  auto iso = build_complex(v, {{0, 1}, {1, 2}});
  auto s3 = star(iso, 3);
  CHECK(s3.num_vertices() == 1);
  CHECK(s3.dim() == 0);

  auto s0 = star(iso, 0);
  CHECK(s0.num_vertices() == 2);
  CHECK(s0.count(1) == 1);
  CHECK(s0.contains(Simplex{0, 1}));

  CHECK_THROWS_AS(star(iso, 9), Error);
}

TEST_CASE("barycentric subdivision counts flags") {
  auto edge = regular_simplex(1);
  auto e2 = barycentric_subdivide(edge);
  CHECK(e2.count(0) == 3);
  CHECK(e2.count(1) == 2);

  for (int k = 1; k <= 3; ++k) {
    auto sd = barycentric_subdivide(regular_simplex(k));
    CHECK(sd.count(std::size_t(k)) == factorial(k + 1));
    CHECK(face_closed(sd));
    CHECK(sd.euler_characteristic() == 1);
  }
  CHECK(barycentric_subdivide(regular_simplex(2)).count(2) == 6);
}

TEST_CASE("subdivision keeps the carrier and Euler characteristic") {
  std::mt19937_64 rng(11);
  for (int dim = 1; dim <= 3; ++dim) {
    auto K = random_complex(rng, dim, 200);
    auto sub = barycentric_subdivision(K);
    const auto& R = sub.refined;
    CHECK(face_closed(R));
    CHECK(R.euler_characteristic() == K.euler_characteristic());
    CHECK(R.count(dim) == K.count(dim) * factorial(dim + 1));
    // Each new vertex is the barycenter of its simplex, hence inside its hull.
    for (int k = 0; k <= dim; ++k) {
      for (Index i = 0; i < K.count(k); ++i) {
        Eigen::VectorXd c = Eigen::VectorXd::Zero(dim);
        for (VertexId v : K.simplices(k)[i]) c += K.coordinate(v);
        c /= double(k + 1);
        CHECK((R.coordinate(sub.barycenter[std::size_t(k)][i]) - c).norm() < 1e-14);
      }
    }
  }
}

TEST_CASE("subdivision degree bound on generated complexes") {
  std::mt19937_64 rng(5);
  for (int dim = 1; dim <= 3; ++dim) {
    auto K = random_complex(rng, dim, 300);
    auto report = validate_bounded_geometry(K, 2.0, 1000);
    auto R = barycentric_subdivide(K);
    auto sub_report = validate_bounded_geometry(R, 1000.0, 1000);
    CHECK(sub_report.max_vertex_degree <= subdivision_degree_bound(dim, report.max_vertex_degree));
  }
  auto lattice = triangular_lattice(4);
  CHECK(validate_bounded_geometry(lattice, 1.0, 6).passes);
  auto refined = barycentric_subdivide(lattice);
  CHECK(validate_bounded_geometry(refined, 4.0, subdivision_degree_bound(2, 6)).passes);
}

TEST_CASE("random complexes are face closed") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    auto K = random_complex(rng, 1 + trial % 3, 1000);
    CHECK(K.total_count() <= 1000);
    CHECK(face_closed(K));
  }
}

TEST_CASE("ray_complex") {
  auto r1 = ray_complex(1, 5);
  CHECK(r1.count(0) == 6);
  CHECK(r1.count(1) == 5);
  auto r2 = ray_complex(2, 3);
  CHECK(r2.count(2) == 6);
  CHECK(validate_bounded_geometry(r2, std::sqrt(2.0), 8).passes);
  for (std::size_t M : {1u, 10u, 1000u, 1000000u}) {
    CHECK(validate_bounded_geometry(ray_complex(1, M), std::sqrt(2.0), 8).passes);
  }
}

TEST_CASE("volume and regular simplices") {
  for (int k = 1; k <= 4; ++k) {
    auto S = regular_simplex(k);
    for (const auto& e : S.simplices(1)) CHECK(std::abs(S.volume(e) - 1.0) < 1e-14);
  }
  auto tri = regular_simplex(2);
  CHECK(std::abs(tri.volume(Simplex{0, 1, 2}) - std::sqrt(3.0) / 4) < 1e-15);
}

TEST_CASE("complex text round trip") {
  auto K = triangular_lattice(2);
  const auto text = write_complex(K);
  auto back = parse_complex(text);
  CHECK(back == K);
  CHECK(write_complex(back) == text);

  std::mt19937_64 rng(1);
  auto R = random_complex(rng, 3, 150);
  CHECK(write_complex(parse_complex(write_complex(R))) == write_complex(R));

  const std::string canonical = "dim 1\nvertices\n0 0\n1 0.1\n2 1e-07\nsimplices\n0 1\n1 2\n";
  CHECK(write_complex(parse_complex(canonical)) == canonical);
}

TEST_CASE("complex parse errors") {
  CHECK_THROWS_AS(parse_complex("vertices\n0 0\n"), Error);
  CHECK_THROWS_AS(parse_complex("dim 1\nvertices\n0 x\n"), Error);
  CHECK_THROWS_AS(parse_complex("dim 2\nvertices\n0 0\n1 1\nsimplices\n0 1\n"), Error);
  CHECK_THROWS_AS(parse_complex("dim 1\nvertices\n0 0\n0 1\nsimplices\n0 1\n"), Error);
  try {
    parse_complex("dim 1\nvertices\n0 0\n1 1\nsimplices\n0 1 2 3\n");
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kMissingVertex);
  }
}

TEST_CASE("cone and boundaries") {
  auto circle = simplex_boundary(2);
  CHECK(circle.dim() == 1);
  CHECK(circle.euler_characteristic() == 0);
  auto sphere = simplex_boundary(3);
  CHECK(sphere.euler_characteristic() == 2);
  auto disc = cone(circle);
  CHECK(disc.dim() == 2);
  CHECK(disc.euler_characteristic() == 1);
  auto sq = cube_boundary(2, 3);
  CHECK(sq.count(1) == 12);
  CHECK(validate_bounded_geometry(sq, 3.0, 2).passes);
}
