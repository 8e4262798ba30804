// One line per criterion; exit status counts unexpected failures only.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "lpdr/cochain.hpp"
#include "lpdr/contract.hpp"
#include "lpdr/derham.hpp"
#include "lpdr/error.hpp"
#include "lpdr/generators.hpp"
#include "lpdr/mollify.hpp"
#include "lpdr/nontrivial.hpp"
#include "lpdr/polyform.hpp"

using namespace lpdr;

namespace {

constexpr double kWhitneyTol = 1e-12;
constexpr double kSplitTol = 1e-10;
constexpr double kStokesTol = 1e-10;
constexpr double kDdRoundoff = 1e-14;  // relative, for real coefficients
constexpr double kMollify1dTol = 1e-3;
constexpr double kMollify2dTol = 1e-2;
constexpr double kDecayRatio = 3.5;  // h^2 order gives 4 per halving
constexpr double kSupportTol = 1e-12;
constexpr double kTailBound = 0.3;
constexpr double kContractTol = 1e-8;
constexpr double kHolderTol = 1e-8;
constexpr double kPrismFactor = 2.0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string id;
  std::string name;
  double limit_s;
  bool known_failure;  // expected to fail; reported but not counted
  std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args) {
  char buf[1024];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Outcome whitney_constant() {
  double worst_w = 0, worst_vol = 0;
  for (int k = 1; k <= 3; ++k) {
    const auto K = regular_simplex(k);
    const Simplex sigma = K.simplices(k)[0];
    const double expect = std::sqrt(k + 1.0) / std::sqrt(std::pow(2.0, k));
    const double w = integrate(whitney(indicator(K, sigma)), sigma, Integral::kVolumeDensity);
    worst_w = std::max(worst_w, std::abs(w - expect));
    worst_w = std::max(worst_w, std::abs(whitney_split_constant(k) - expect));

    PolyForm vol(K, k);
    vol.add_terms(sigma, {Term{1.0, {}, DiffMask(((1 << (k + 1)) - 1) & ~1)}});
    double fact = 1;
    for (int i = 2; i <= k; ++i) fact *= i;
    worst_vol = std::max(worst_vol, std::abs(integrate(vol, sigma, Integral::kVolumeDensity) - expect / fact));
  }
  return {worst_w <= kWhitneyTol && worst_vol <= kWhitneyTol,
          fmt("max |int W - sqrt(k+1)/sqrt(2^k)| = %.2e, max |int dt - vol| = %.2e (tol %.0e)", worst_w, worst_vol,
              kWhitneyTol)};
}

Outcome split_identity() {
  std::mt19937_64 rng(11);
  double worst = 0;
  int cochains = 0;
  std::size_t largest = 0;
  for (int dim = 1; dim <= 3; ++dim) {
    const auto K = random_complex(rng, dim, 500);
    largest = std::max(largest, K.total_count());
    for (int k = 0; k <= dim; ++k) {
      for (Integral conv : {Integral::kOriented, Integral::kVolumeDensity}) {
        const auto r = verify_split(K, k, 100, rng, conv);
        worst = std::max(worst, r.max_identity_error);
        cochains += r.sample_count;
      }
    }
  }
  return {worst <= kSplitTol && largest <= 500,
          fmt("%d cochains, complexes <= %zu simplices, max |I W~ c - c| = %.2e (tol %.0e)", cochains, largest, worst,
              kSplitTol)};
}

double max_coeff(const PolyForm& w) {
  double m = 0;
  for (const auto& [T, f] : w.pieces()) {
    for (const auto& [mask, p] : f) {
      for (const auto& [e, c] : p) m = std::max(m, std::abs(c));
    }
  }
  return m;
}

// Coefficients rounded to multiples of 2^-20, so products with small exponents are exact.
PolyForm dyadic(const PolyForm& w) {
  PolyForm out(w.complex(), w.degree());
  for (const auto& [T, f] : w.pieces()) {
    LocalForm g = f;
    for (auto& [mask, p] : g) {
      for (auto& [e, c] : p) c = std::ldexp(std::round(std::ldexp(c, 20)), -20);
    }
    out.set_piece(T, std::move(g));
  }
  return out;
}

Outcome chain_identities() {
  std::mt19937_64 rng(23);
  double dd_matrix = 0, stokes = 0, dd_real = 0;
  int forms = 0, dd_nonzero = 0;
  for (int dim = 1; dim <= 3; ++dim) {
    const auto K = random_complex(rng, dim, 400);
    dd_matrix = std::max(dd_matrix, assemble(K).max_dd());
    for (int i = 0; i < 34 && forms < 100; ++i, ++forms) {
      const int k = i % dim;
      const auto w = random_polyform(K, k, 6, 3, rng);
      if (max_coeff(d(d(dyadic(w)))) != 0.0) ++dd_nonzero;
      dd_real = std::max(dd_real, max_coeff(d(d(w))) / std::max(1.0, max_coeff(w)));
      stokes = std::max(stokes, verify_stokes(w).max_stokes_error);
    }
  }
  return {dd_matrix == 0.0 && dd_nonzero == 0 && dd_real <= kDdRoundoff && stokes <= kStokesTol,
          fmt("max |dd| matrix = %g, dyadic forms with dd != 0: %d/%d, real-coefficient |dd| = %.1e (roundoff %.0e), "
              "max Stokes error = %.2e (tol %.0e)",
              dd_matrix, dd_nonzero, forms, dd_real, kDdRoundoff, stokes, kStokesTol)};
}

using Fn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

Fn scalar(std::function<double(const Eigen::VectorXd&)> f) {
  return [f](const Eigen::VectorXd& x) { return Eigen::VectorXd::Constant(1, f(x)); };
}

Outcome mollifier_homotopy() {
  const MollifierConfig cfg{0.1, 33};
  auto x2 = scalar([](const Eigen::VectorXd& x) { return x(0) * x(0); });
  auto x3 = scalar([](const Eigen::VectorXd& x) { return x(0) * x(0) * x(0); });
  bool ok = true;

  double r1 = 0;
  for (int k : {0, 1}) {
    for (const auto& f : {x2, x3}) r1 = std::max(r1, verify_homotopy(GridForm::sample(1, k, 1.0 / 256, f), cfg, kMollify1dTol).residual);
  }
  ok = ok && r1 <= kMollify1dTol;

  // 0-forms at the default kernel; 1-forms need a kernel finer than h to expose the h^2 term.
  double ratio0 = INFINITY, ratio1 = INFINITY;
  double prev0 = 0, prev1 = 0;
  for (double h : {1.0 / 64, 1.0 / 128, 1.0 / 256}) {
    const double e0 = verify_homotopy(GridForm::sample(1, 0, h, x3), cfg, 1).residual;
    const double e1 = verify_homotopy(GridForm::sample(1, 1, h, x2), MollifierConfig{0.1, 1025}, 1).residual;
    if (prev0 > 0) ratio0 = std::min(ratio0, prev0 / e0), ratio1 = std::min(ratio1, prev1 / e1);
    prev0 = e0, prev1 = e1;
  }
  ok = ok && ratio0 >= kDecayRatio && ratio1 >= kDecayRatio;

  const double h2 = 1.0 / 128;
  std::vector<GridForm> plane;
  plane.push_back(GridForm::sample(2, 0, h2, scalar([](const Eigen::VectorXd& x) { return x(0) * x(0) * x(1); })));
  plane.push_back(GridForm::sample(2, 1, h2, [](const Eigen::VectorXd& x) {
    Eigen::VectorXd v(2);
    v << x(0) * x(1), x(0) * x(0);
    return v;
  }));
  plane.push_back(GridForm::sample(2, 2, h2, scalar([](const Eigen::VectorXd& x) { return 1 + x(0) * x(1); })));
  double r2 = 0;
  for (const auto& w : plane) r2 = std::max(r2, verify_homotopy(w, cfg, kMollify2dTol).residual);
  ok = ok && r2 <= kMollify2dTol;

  double unit = 0, still = 0;
  for (int n : {1, 2}) {
    const auto one = GridForm::sample(n, 0, 1.0 / 64, scalar([](const Eigen::VectorXd&) { return 1.0; }));
    unit = std::max(unit, (regularize(one, cfg) - one).max_abs());
  }
  for (int k : {0, 1, 2}) {
    const auto w = GridForm::sample(2, k, 1.0 / 32, [k](const Eigen::VectorXd& x) {
      return Eigen::VectorXd::Constant(k == 1 ? 2 : 1, std::sin(3 * x(0)) + x(1));
    });
    still = std::max(still, (regularize(w, MollifierConfig{0.0, 33}) - w).max_abs());
  }
  ok = ok && unit == 0.0 && still == 0.0;

  return {ok, fmt("1D h=1/256 residual %.2e (tol %.0e); min halving ratio x^3 %.2f, x^2 dx %.2f (>= %.1f); "
                  "2D h=1/128 residual %.2e (tol %.0e); |R1 - 1| = %g; |R_0 w - w| = %g",
                  r1, kMollify1dTol, ratio0, ratio1, kDecayRatio, r2, kMollify2dTol, unit, still)};
}

Outcome support_control() {
  Eigen::VectorXd x0(2);
  x0 << 0.1, -0.15;
  const double r = 0.45;
  auto vanish = [x0, r](const Eigen::VectorXd& x) {
    const double s = (x - x0).norm() - r;
    return s > 0 ? s * s : 0.0;
  };
  const auto f = GridForm::sample(2, 0, 1.0 / 64, scalar(vanish));
  const auto w = GridForm::sample(2, 1, 1.0 / 64, [vanish](const Eigen::VectorXd& x) {
    Eigen::VectorXd v(2);
    v << vanish(x) * x(1), -vanish(x);
    return v;
  });
  bool ok = true;
  double prev = INFINITY, worst = 0;
  std::string deltas;
  for (double eps : {0.2, 0.1, 0.05, 0.025}) {
    double delta = 0;
    for (const GridForm* g : {&f, &w}) {
      const auto rep = verify_support_control(*g, MollifierConfig{eps, 33}, x0, r, kSupportTol);
      ok = ok && rep.passes && rep.nodes_checked > 0;
      worst = std::max(worst, rep.output_max);
      delta = rep.delta;
    }
    ok = ok && delta < prev;
    prev = delta;
    deltas += fmt("%s%.4f", deltas.empty() ? "" : ", ", delta);
  }
  return {ok, fmt("delta(eps = 0.2, 0.1, 0.05, 0.025) = %s; max |R w| on shrunk disc = %.2e (tol %.0e)",
                  deltas.c_str(), worst, kSupportTol)};
}

Outcome counterexample() {
  const auto rep = verify_nontriviality(PiSequence{2.0, 4.0}, 1.0, {1000000}, 0);
  bool ok = rep.passes();
  double s1000 = 0, tail1000 = INFINITY, worst_growth = 0;
  const auto& lower = rep.lower.partial_sums;
  for (std::size_t i = 0; i < lower.size(); ++i) {
    const auto [m, s] = lower[i];
    if (m < 1000) continue;
    if (m == 1000) s1000 = s;
    worst_growth = std::max(worst_growth, std::abs(s / (3 * std::cbrt(double(m))) - 1));
  }
  for (std::size_t i = 0; i < rep.upper.partial_sums.size(); ++i) {
    if (rep.upper.partial_sums[i].first == 1000) tail1000 = rep.upper.tail_bounds[i];
  }
  ok = ok && s1000 > 25 && worst_growth <= 0.1 && tail1000 <= kTailBound + 1e-12;

  bool swapped_rejected = false;
  try {
    build_family(0, PiSequence{4.0, 2.0}, 1.0, 10);
  } catch (const Error& e) {
    swapped_rejected = e.code() == ErrorCode::kNotACounterexample;
  }
  ok = ok && swapped_rejected;
  return {ok, fmt("(a) %s; (b) tail(1000) = %.3f; (c) S(1000) = %.4f, max |S/3m^(1/3) - 1| = %.3f; (d) %s; "
                  "swapped: %s, pi=(4,2) %s",
                  rep.kernel.detail.c_str(), tail1000, s1000, worst_growth,
                  rep.cochain_gap.passes ? "pass" : "FAIL", rep.swapped_converges.passes ? "all converge" : "FAIL",
                  swapped_rejected ? "rejected" : "accepted")};
}

// Exact rank of an integer matrix by fraction-free elimination.
Eigen::Index exact_rank(const Eigen::MatrixXd& A) {
  const std::size_t R = std::size_t(A.rows()), C = std::size_t(A.cols());
  std::vector<std::vector<__int128>> m(R, std::vector<__int128>(C));
  for (std::size_t r = 0; r < R; ++r) {
    for (std::size_t c = 0; c < C; ++c) m[r][c] = __int128(A(Eigen::Index(r), Eigen::Index(c)));
  }
  __int128 prev = 1;
  std::size_t rank = 0;
  for (std::size_t c = 0; c < C && rank < R; ++c) {
    std::size_t piv = rank;
    while (piv < R && m[piv][c] == 0) ++piv;
    if (piv == R) continue;
    std::swap(m[piv], m[rank]);
    for (std::size_t r = rank + 1; r < R; ++r) {
      for (std::size_t j = c + 1; j < C; ++j) m[r][j] = (m[rank][c] * m[r][j] - m[r][c] * m[rank][j]) / prev;
      m[r][c] = 0;
    }
    prev = m[rank][c];
    ++rank;
  }
  return Eigen::Index(rank);
}

std::vector<Eigen::Index> exact_cohomology(const MatrixComplex<double>& M) {
  std::vector<Eigen::Index> out;
  for (std::size_t i = 0; i < M.dims.size(); ++i) {
    const Eigen::Index out_rank = i < M.D.size() ? exact_rank(M.D[i]) : 0;
    out.push_back(M.dims[i] - out_rank - (i ? exact_rank(M.D[i - 1]) : 0));
  }
  return out;
}

Outcome contraction() {
  bool ok = true;
  double residual = 0, closure = 0;
  int oracle_checked = 0, oracle_mismatch = 0;
  auto oracle = [&](const MatrixComplex<double>& M, std::size_t simplices) {
    if (simplices > 50) return;
    ++oracle_checked;
    if (cohomology_dims(M) != exact_cohomology(M)) ++oracle_mismatch;
  };

  std::vector<MetricComplex> acyclic;
  for (int k = 1; k <= 3; ++k) acyclic.push_back(regular_simplex(k));
  acyclic.push_back(cone(simplex_boundary(2)));
  acyclic.push_back(cone(simplex_boundary(3)));
  acyclic.push_back(cone(triangular_lattice(2)));
  acyclic.push_back(hexagonal_fan());
  for (const auto& K : acyclic) {
    const auto M = augment(assemble(K));
    oracle(M, K.total_count());
    const auto c = contract(M, ContractMode::kFull);
    const auto check = verify_contraction(M, c.h, kContractTol);
    residual = std::max(residual, check.max_residual);
    for (double a : c.alpha_closure) closure = std::max(closure, a);
    ok = ok && c.ok() && check.passes;
  }
  ok = ok && closure <= kContractTol;

  std::string spheres;
  const std::vector<std::vector<Eigen::Index>> expected{{1, 1}, {1, 0, 1}};
  for (int k : {2, 3}) {
    const auto K = simplex_boundary(k);
    const auto M = assemble(K);
    oracle(M, K.total_count());
    const auto dims = cohomology_dims(M);
    std::vector<int> nonzero;
    for (std::size_t i = 0; i < dims.size(); ++i) {
      if (dims[i] != 0) nonzero.push_back(int(i));
    }
    const auto c = contract(M, ContractMode::kFull);
    ok = ok && dims == expected[std::size_t(k - 2)] && c.failed_degrees == nonzero;
    std::string failed;
    for (int i : c.failed_degrees) failed += (failed.empty() ? "" : ",") + std::to_string(i);
    spheres += fmt(" dDelta%d fails at {%s}", k, failed.c_str());
  }
  ok = ok && oracle_mismatch == 0;
  return {ok, fmt("acyclic max |dh + hd - 1| = %.2e, max |D alpha| = %.2e (tol %.0e);%s; rank oracle %d/%d agree",
                  residual, closure, kContractTol, spheres.c_str(), oracle_checked - oracle_mismatch, oracle_checked)};
}

Outcome holder() {
  std::mt19937_64 rng(31);
  const std::vector<double> exps{1.5, 2.0, 3.0, 4.0, 6.0};
  std::uniform_int_distribution<std::size_t> pick(0, exps.size() - 1);
  double worst = -INFINITY;
  int tested = 0;
  for (int dim = 1; dim <= 3; ++dim) {
    const auto K = random_complex(rng, dim, 50);
    const double mes = carrier_measure(K);
    for (int i = 0; i < 34 && tested < 100; ++i, ++tested) {
      double pk = exps[pick(rng)], pk1 = exps[pick(rng)];
      if (pk < pk1) std::swap(pk, pk1);
      const auto g = random_polyform(K, 0, 5, 3, rng);
      const double lhs = lp_norm_form(g, pk1);
      const double rhs = std::pow(mes, 1 / pk1 - 1 / pk) * lp_norm_form(g, pk);
      worst = std::max(worst, (lhs - rhs) / std::max(1.0, rhs));
    }
  }
  return {worst <= kHolderTol, fmt("%d densities, max (lhs - rhs) / max(1, rhs) = %.2e (tol %.0e)", tested, worst,
                                   kHolderTol)};
}

Outcome prism_bound() {
  std::mt19937_64 rng(41);
  double worst = 0;
  std::string at;
  auto probe = [&](const PolyForm& w, int n, const PiSequence& pi, const char* label) {
    const auto ext = prism_extend(w, n);
    const PiSequence lifted(std::vector<double>(pi.exponents().begin(), pi.exponents().end()), n);
    const double ratio = omega_pi_norm(ext.form, lifted) / omega_pi_norm(w, pi);
    if (ratio > worst) {
      worst = ratio;
      at = fmt("%s, n=%d, pi=(%g,%g)", label, n, pi[w.degree()], pi[w.degree() + 1]);
    }
  };
  int cases = 0;
  for (int n : {1, 2}) {
    const auto B = cube_boundary(n, 2);
    for (const auto& p : std::vector<std::vector<double>>{{2, 2, 2}, {3, 2, 2}, {4, 2, 2}, {2, 3, 3}}) {
      const PiSequence pi(p, n);
      PolyForm one(B, 0);
      for (const auto& T : B.facets()) one.add_terms(T, {term(1.0, {}, {})});
      probe(one, n, pi, "constant");
      ++cases;
      for (int i = 0; i < 5; ++i, ++cases) probe(random_polyform(B, 0, 4, 2, rng), n, pi, "random 0-form");
      if (n == 2) {
        for (int i = 0; i < 5; ++i, ++cases) probe(random_polyform(B, 1, 4, 2, rng), n, pi, "random 1-form");
      }
    }
  }
  return {worst <= kPrismFactor,
          fmt("%d cases, max ||ext||_pi / ||w||_pi = %.3f at %s (bound %.0f)", cases, worst, at.c_str(), kPrismFactor)};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"1", "whitney constant", 1, false, whitney_constant},
      {"2", "split identity", 10, false, split_identity},
      {"3", "chain identities", 10, false, chain_identities},
      {"4", "mollifier homotopy", 60, false, mollifier_homotopy},
      {"5", "support control", 30, false, support_control},
      {"6", "counterexample", 120, false, counterexample},
      {"7", "contraction", 10, false, contraction},
      {"8a", "hoelder embedding", 10, false, holder},
      {"8b", "prism extension bound", 10, true, prism_bound},
  };
  int unexpected = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool pass = out.pass && secs < c.limit_s;
    const char* tag = pass ? "PASS" : (c.known_failure ? "FAIL (known)" : "FAIL");
    std::printf("[%s] %s %s: %s; %.2fs (limit %.0fs)\n", tag, c.id.c_str(), c.name.c_str(), out.detail.c_str(), secs,
                c.limit_s);
    std::fflush(stdout);
    if (!pass && !c.known_failure) ++unexpected;
  }
  return unexpected == 0 ? 0 : 1;
}
