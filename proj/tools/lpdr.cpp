#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "lpdr/cochain.hpp"
#include "lpdr/complex_io.hpp"
#include "lpdr/contract.hpp"
#include "lpdr/derham.hpp"
#include "lpdr/generators.hpp"
#include "lpdr/mollify.hpp"
#include "lpdr/nontrivial.hpp"
#include "lpdr/polyform.hpp"

using namespace lpdr;

namespace {

// key: value lines; elapsed time goes to stderr so equal seeds give identical reports.
class Report {
 public:
  explicit Report(std::string command) { add("command", std::move(command)); }

  void add(const std::string& key, const std::string& value) { lines_.emplace_back(key, value); }
  void add(const std::string& key, double value) { add(key, format_real(value)); }
  void add(const std::string& key, bool value) { add(key, std::string(value ? "true" : "false")); }
  void add(const std::string& key, long value) { add(key, std::to_string(value)); }
  void input(const std::string& key, const std::string& value) { add("input." + key, value); }
  void input(const std::string& key, double value) { add("input." + key, value); }

  void print(std::ostream& out, bool pass) const {
    for (const auto& [k, v] : lines_) out << k << ": " << v << '\n';
    out << "pass: " << (pass ? "true" : "false") << '\n';
  }

 private:
  std::vector<std::pair<std::string, std::string>> lines_;
};

std::string join(const std::vector<Eigen::Index>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? " " : "") + std::to_string(v[i]);
  return out;
}

std::string join(const std::vector<int>& v) {
  if (v.empty()) return "none";
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? " " : "") + std::to_string(v[i]);
  return out;
}

std::string simplex_string(const Simplex& s) {
  std::string out = "[";
  for (int i = 0; i < s.size(); ++i) out += (i ? " " : "") + std::to_string(s[i]);
  return out + "]";
}

Integral convention(const std::string& name) {
  if (name == "oriented") return Integral::kOriented;
  if (name == "volume") return Integral::kVolumeDensity;
  throw CLI::ValidationError("--convention", "expected oriented or volume");
}

// Artifacts go to the output file when one is given, else to stdout with the report on stderr.
int emit(const Report& report, bool pass, const std::string& artifact, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << artifact;
    report.print(std::cerr, pass);
  } else {
    write_file(out_path, artifact);
    report.print(std::cout, pass);
  }
  return pass ? 0 : 1;
}

int finish(const Report& report, bool pass) {
  report.print(std::cout, pass);
  return pass ? 0 : 1;
}

struct Options {
  std::uint64_t seed = 1;
  std::string path, second, out, convention = "oriented";
  double L = 1.0, p = 2.0, eps = 0.1, tol = -1.0, pk = 2.0, pk1 = 4.0, trunc = 1e6;
  std::size_t N = 6, max_simplices = 500, size_limit = 2000;
  std::vector<double> pi;
  bool sup = false, normalized = false, augment = false;
  std::string mode = "full", dump, csv, form_path, cochain_path;
  int k = 1, samples = 100, dim = 3, n = 1, grid = 256, kernel = 33, terms = 4, poly = 3;
};

int cmd_validate(const Options& o) {
  const MetricComplex K = load_complex(o.path);
  const GeometryReport g = validate_bounded_geometry(K, o.L, o.N);
  Report r("validate");
  r.input("path", o.path);
  r.input("L", o.L);
  r.input("N", double(o.N));
  r.add("result.dim", long(K.dim()));
  std::vector<Eigen::Index> counts;
  for (int m = 0; m <= K.dim(); ++m) counts.push_back(Eigen::Index(K.count(m)));
  r.add("result.simplices", join(counts));
  r.add("result.max_vertex_degree", long(g.max_vertex_degree));
  r.add("result.min_edge_length", g.min_edge_length);
  r.add("result.max_edge_length", g.max_edge_length);
  r.add("result.connected", g.connected);
  for (const auto& v : g.violations) r.add("result.violation", simplex_string(v.simplex) + " " + v.reason);
  return finish(r, g.passes);
}

int cmd_subdivide(const Options& o) {
  const MetricComplex K = load_complex(o.path);
  const Subdivision sd = barycentric_subdivision(K);
  Report r("subdivide");
  r.input("path", o.path);
  r.add("result.vertices", long(sd.refined.count(0)));
  r.add("result.top_simplices", long(sd.refined.count(sd.refined.dim())));
  return emit(r, true, write_complex(sd.refined), o.out);
}

int cmd_norm(const Options& o) {
  const MetricComplex K = load_complex(o.path);
  Report r("norm");
  r.input("path", o.path);
  r.input("p", o.p);
  if (!o.cochain_path.empty()) {
    const Cochain c = parse_cochain(K, read_file(o.cochain_path));
    r.input("cochain", o.cochain_path);
    r.add("result.lp", lp_norm(c, o.p));
    if (o.sup) r.add("result.sup", sup_norm(c));
    if (!o.pi.empty()) r.add("result.pi", pi_norm(c, PiSequence(o.pi)));
  } else {
    const PolyForm w = parse_polyform(K, read_file(o.form_path));
    r.input("form", o.form_path);
    r.add("result.lp", lp_norm_form(w, o.p));
    if (!o.pi.empty()) {
      const PiSequence pi(o.pi);
      r.add("result.omega_pi", omega_pi_norm(w, pi));
      r.add("result.sl_pi", sl_pi_norm(w, pi));
    }
  }
  return finish(r, true);
}

int cmd_derham(const Options& o) {
  const MetricComplex K = load_complex(o.path);
  const PolyForm w = parse_polyform(K, read_file(o.form_path));
  const Cochain c = derham_map(w, convention(o.convention));
  Report r("derham");
  r.input("path", o.path);
  r.input("form", o.form_path);
  r.input("convention", o.convention);
  r.add("result.degree", long(c.degree()));
  r.add("result.nonzero", long(c.nnz()));
  return emit(r, true, write_cochain(c), o.out);
}

int cmd_whitney(const Options& o) {
  const MetricComplex K = load_complex(o.path);
  const Cochain c = parse_cochain(K, read_file(o.cochain_path));
  const PolyForm w = o.normalized ? whitney_normalized(c, convention(o.convention)) : whitney(c);
  Report r("whitney");
  r.input("path", o.path);
  r.input("cochain", o.cochain_path);
  r.input("normalized", std::string(o.normalized ? "true" : "false"));
  r.add("result.degree", long(w.degree()));
  r.add("result.pieces", long(w.pieces().size()));
  return emit(r, true, write_polyform(w), o.out);
}

int cmd_cohomology(const Options& o) {
  const MetricComplex K = load_complex(o.path);
  Report r("cohomology");
  r.input("path", o.path);
  r.add("result.dims", join(cohomology_dims(assemble(K, o.size_limit))));
  return finish(r, true);
}

int cmd_contract(const Options& o) {
  const MetricComplex K = load_complex(o.path);
  MatrixComplex<double> M = assemble(K, o.size_limit);
  if (o.augment) M = augment(M);
  const ContractMode mode = o.mode == "positive" ? ContractMode::kPositive : ContractMode::kFull;
  const auto h = contract(M, mode);
  const double tol = o.tol > 0 ? o.tol : 1e-8;
  const auto check = verify_contraction(M, h.h, tol, mode == ContractMode::kPositive ? 1 : 0);
  Report r("contract");
  r.input("path", o.path);
  r.input("augment", std::string(o.augment ? "true" : "false"));
  r.input("mode", o.mode);
  r.add("result.cohomology", join(cohomology_dims(M)));
  r.add("result.failed_degrees", join(h.failed_degrees));
  r.add("result.identity_residual", check.max_residual);
  double closure = 0.0;
  for (double a : h.alpha_closure) closure = std::max(closure, a);
  r.add("result.alpha_closure", closure);
  if (!o.dump.empty()) write_file(o.dump, write_matrix_complex(M));
  return finish(r, h.ok() && check.passes);
}

MetricComplex complex_for(const Options& o, std::mt19937_64& rng) {
  if (!o.path.empty()) return load_complex(o.path);
  return random_complex(rng, o.dim, o.max_simplices);
}

int verify_split_cmd(const Options& o) {
  std::mt19937_64 rng(o.seed);
  const MetricComplex K = complex_for(o, rng);
  const double tol = o.tol > 0 ? o.tol : 1e-10;
  const SplitReport s = verify_split(K, o.k, o.samples, rng, convention(o.convention));
  Report r("verify split");
  r.input("k", double(o.k));
  r.input("samples", double(o.samples));
  r.input("seed", double(o.seed));
  r.input("convention", o.convention);
  r.add("result.simplices", long(K.total_count()));
  r.add("result.identity_error", s.max_identity_error);
  r.add("result.stokes_error", s.max_stokes_error);
  r.add("result.max_derham_ratio", s.max_derham_ratio);
  r.add("result.max_whitney_ratio", s.max_whitney_ratio);
  return finish(r, s.max_identity_error <= tol);
}

int verify_stokes_cmd(const Options& o) {
  std::mt19937_64 rng(o.seed);
  const MetricComplex K = complex_for(o, rng);
  const double tol = o.tol > 0 ? o.tol : 1e-10;
  double stokes = 0.0, dd = 0.0;
  for (int s = 0; s < o.samples; ++s) {
    const int k = int(rng() % std::uint64_t(K.dim()));
    const PolyForm w = random_polyform(K, k, o.terms, o.poly, rng);
    stokes = std::max(stokes, verify_stokes(w).max_stokes_error);
    const PolyForm ddw = d(d(w));
    for (const auto& [T, f] : ddw.pieces()) {
      for (const auto& [J, p] : f) {
        for (const auto& [e, c] : p) dd = std::max(dd, std::abs(c));
      }
    }
  }
  const double boundary = assemble(K, 100000).max_dd();
  Report r("verify stokes");
  r.input("samples", double(o.samples));
  r.input("seed", double(o.seed));
  r.add("result.simplices", long(K.total_count()));
  r.add("result.stokes_error", stokes);
  r.add("result.dd_form", dd);
  r.add("result.dd_matrix", boundary);
  return finish(r, stokes <= tol && boundary == 0.0 && dd <= 1e-12);
}

int verify_mollify_cmd(const Options& o) {
  using Fn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
  auto scalar = [](std::function<double(const Eigen::VectorXd&)> f) -> Fn {
    return [f](const Eigen::VectorXd& x) { return Eigen::VectorXd::Constant(1, f(x)); };
  };
  const double h = 1.0 / o.grid, tol = o.tol > 0 ? o.tol : 1e-3;
  const MollifierConfig cfg{o.eps, o.kernel};
  std::vector<std::pair<std::string, GridForm>> forms;
  if (o.n == 1) {
    forms.emplace_back("x^2", GridForm::sample(1, 0, h, scalar([](const Eigen::VectorXd& x) { return x(0) * x(0); })));
    forms.emplace_back("x^3", GridForm::sample(1, 0, h, scalar([](const Eigen::VectorXd& x) { return x(0) * x(0) * x(0); })));
    forms.emplace_back("x^2 dx", GridForm::sample(1, 1, h, scalar([](const Eigen::VectorXd& x) { return x(0) * x(0); })));
  } else {
    forms.emplace_back("x^2 y", GridForm::sample(2, 0, h, scalar([](const Eigen::VectorXd& x) { return x(0) * x(0) * x(1); })));
    forms.emplace_back("xy dx + x^2 dy", GridForm::sample(2, 1, h, [](const Eigen::VectorXd& x) {
                         Eigen::VectorXd v(2);
                         v << x(0) * x(1), x(0) * x(0);
                         return v;
                       }));
    forms.emplace_back("(1 + xy) dx^dy",
                       GridForm::sample(2, 2, h, scalar([](const Eigen::VectorXd& x) { return 1 + x(0) * x(1); })));
  }
  Report r("verify mollify");
  r.input("n", double(o.n));
  r.input("grid", double(o.grid));
  r.input("eps", o.eps);
  r.input("kernel", double(o.kernel));
  r.input("tol", tol);
  bool pass = true;
  for (const auto& [name, w] : forms) {
    const auto rep = verify_homotopy(w, cfg, tol);
    r.add("result.residual[" + name + "]", rep.residual);
    pass = pass && rep.passes;
  }
  const GridForm one = GridForm::sample(o.n, 0, h, scalar([](const Eigen::VectorXd&) { return 1.0; }));
  const GridForm R1 = regularize(one, cfg) - one;
  const bool constants = R1.max_abs() == 0.0;
  const GridForm& w = forms.back().second;
  const GridForm same = regularize(w, MollifierConfig{0.0, o.kernel}) - w;
  const bool identity = same.max_abs() == 0.0;
  r.add("result.R1_exact", constants);
  r.add("result.eps0_exact", identity);
  return finish(r, pass && constants && identity);
}

int verify_contract_cmd(const Options& o) {
  std::vector<std::pair<std::string, MetricComplex>> cases;
  if (!o.path.empty()) {
    cases.emplace_back(o.path, load_complex(o.path));
  } else {
    for (int k = 1; k <= 3; ++k) cases.emplace_back("simplex" + std::to_string(k), regular_simplex(k));
    cases.emplace_back("cone(boundary2)", cone(simplex_boundary(2)));
    cases.emplace_back("cone(boundary3)", cone(simplex_boundary(3)));
    cases.emplace_back("boundary2", simplex_boundary(2));
    cases.emplace_back("boundary3", simplex_boundary(3));
  }
  const double tol = o.tol > 0 ? o.tol : 1e-8;
  Report r("verify contract");
  bool pass = true;
  for (const auto& [name, K] : cases) {
    const auto M = augment(assemble(K, o.size_limit));
    const auto h = contract(M);
    const auto dims = cohomology_dims(M);
    std::vector<int> expected;
    for (std::size_t i = 0; i < dims.size(); ++i) {
      if (dims[i] != 0) expected.push_back(int(i));
    }
    double closure = 0.0;
    for (double a : h.alpha_closure) closure = std::max(closure, a);
    bool ok = h.failed_degrees == expected && closure <= tol;
    if (h.ok()) {
      const auto check = verify_contraction(M, h.h, tol);
      r.add("result." + name + ".identity_residual", check.max_residual);
      ok = ok && check.passes;
    }
    r.add("result." + name + ".failed_degrees", join(h.failed_degrees));
    r.add("result." + name + ".alpha_closure", closure);
    pass = pass && ok;
  }
  return finish(r, pass);
}

int verify_nontrivial_cmd(const Options& o) {
  if (!(o.trunc >= 1.0) || o.trunc > 1e9 || o.trunc != std::floor(o.trunc)) {
    throw CLI::ValidationError("--trunc", "expected a whole number between 1 and 1e9");
  }
  const int k = o.k == 1 ? 1 : 0;
  const PiSequence pi = k == 0 ? PiSequence{o.pk, o.pk1} : PiSequence{o.pk, o.pk, o.pk1};
  const auto rep = verify_nontriviality(pi, o.eps, {std::size_t(o.trunc)}, k);
  Report r("verify nontrivial");
  r.input("k", double(k));
  r.input("pk", o.pk);
  r.input("pk1", o.pk1);
  r.input("eps", o.eps);
  r.input("trunc", o.trunc);
  r.add("result.kernel", rep.kernel.detail);
  r.add("result.upper_cauchy", rep.upper_cauchy.detail);
  r.add("result.lower_divergence", rep.lower_divergence.detail);
  r.add("result.cochain_gap", rep.cochain_gap.detail);
  r.add("result.swapped", rep.swapped_converges.detail);
  const std::string csv = nontrivial_csv(rep);
  if (o.csv.empty()) {
    r.print(std::cout, rep.passes());
    std::cout << '\n' << csv;
  } else {
    write_file(o.csv, csv);
    r.add("result.csv", o.csv);
    r.print(std::cout, rep.passes());
  }
  return rep.passes() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lp de Rham toolkit: complexes, Whitney and de Rham maps, mollifiers, contractions"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--seed", o.seed, "Random seed")->capture_default_str();

  auto* validate = app.add_subcommand("validate", "Check bounded geometry of a complex file");
  validate->add_option("path", o.path)->required();
  validate->add_option("--L", o.L, "Edge lengths must lie in [1/L, L]")->capture_default_str();
  validate->add_option("--N", o.N, "Maximum edges per vertex")->capture_default_str();

  auto* subdivide = app.add_subcommand("subdivide", "First barycentric subdivision");
  subdivide->add_option("path", o.path)->required();
  subdivide->add_option("-o,--out", o.out);

  auto* norm = app.add_subcommand("norm", "Norms of a cochain or a polynomial form");
  norm->add_option("path", o.path)->required();
  auto* nc = norm->add_option("--cochain", o.cochain_path);
  auto* nf = norm->add_option("--form", o.form_path);
  nc->excludes(nf);
  norm->add_option("--p", o.p)->capture_default_str();
  norm->add_option("--pi", o.pi, "Exponent sequence p_0 p_1 ...")->delimiter(',');
  norm->add_flag("--sup", o.sup);

  auto* derham = app.add_subcommand("derham", "Integrate a polynomial form over every simplex");
  derham->add_option("path", o.path)->required();
  derham->add_option("--form", o.form_path)->required();
  derham->add_option("--convention", o.convention)->capture_default_str();
  derham->add_option("-o,--out", o.out);

  auto* whitney_cmd = app.add_subcommand("whitney", "Whitney form of a cochain");
  whitney_cmd->add_option("path", o.path)->required();
  whitney_cmd->add_option("--cochain", o.cochain_path)->required();
  whitney_cmd->add_flag("--normalized", o.normalized);
  whitney_cmd->add_option("--convention", o.convention)->capture_default_str();
  whitney_cmd->add_option("-o,--out", o.out);

  auto* cohomology = app.add_subcommand("cohomology", "Dimensions of simplicial cohomology");
  cohomology->add_option("path", o.path)->required();
  cohomology->add_option("--max-simplices", o.size_limit)->capture_default_str();

  auto* contract_cmd = app.add_subcommand("contract", "Chain contraction of the cochain complex");
  contract_cmd->add_option("path", o.path)->required();
  contract_cmd->add_flag("--augment", o.augment);
  contract_cmd->add_option("--mode", o.mode)->check(CLI::IsMember({"full", "positive"}))->capture_default_str();
  contract_cmd->add_option("--tol", o.tol);
  contract_cmd->add_option("--dump", o.dump, "Write the matrices to this file");
  contract_cmd->add_option("--max-simplices", o.size_limit)->capture_default_str();

  auto* verify = app.add_subcommand("verify", "Run a verification suite");
  verify->require_subcommand(1);
  verify->fallthrough();
  auto* split = verify->add_subcommand("split", "I(W~ c) = c on random sparse cochains");
  split->add_option("--k", o.k)->capture_default_str();
  split->add_option("--samples", o.samples)->capture_default_str();
  split->add_option("--dim", o.dim)->capture_default_str();
  split->add_option("--max-simplices", o.max_simplices)->capture_default_str();
  split->add_option("--complex", o.path);
  split->add_option("--convention", o.convention)->capture_default_str();
  split->add_option("--tol", o.tol);
  auto* stokes = verify->add_subcommand("stokes", "Stokes and dd = 0 on random polynomial forms");
  stokes->add_option("--samples", o.samples)->capture_default_str();
  stokes->add_option("--dim", o.dim)->capture_default_str();
  stokes->add_option("--max-simplices", o.max_simplices)->capture_default_str();
  stokes->add_option("--complex", o.path);
  stokes->add_option("--terms", o.terms)->capture_default_str();
  stokes->add_option("--poly", o.poly)->capture_default_str();
  stokes->add_option("--tol", o.tol);
  auto* moll = verify->add_subcommand("mollify", "dA + Ad = R - 1 on polynomial grid forms");
  moll->add_option("--n", o.n)->check(CLI::IsMember({1, 2}))->capture_default_str();
  moll->add_option("--grid", o.grid, "Grid spacing is 1/grid")->check(CLI::PositiveNumber)->capture_default_str();
  moll->add_option("--eps", o.eps)->capture_default_str();
  moll->add_option("--kernel", o.kernel, "Kernel nodes per axis")->capture_default_str();
  moll->add_option("--tol", o.tol);
  auto* vcon = verify->add_subcommand("contract", "Contractions fail exactly where cohomology lives");
  vcon->add_option("--complex", o.path);
  vcon->add_option("--max-simplices", o.size_limit)->capture_default_str();
  vcon->add_option("--tol", o.tol);
  auto* nontriv = verify->add_subcommand("nontrivial", "Bump-family counterexample for non-monotone exponents");
  nontriv->add_option("--k", o.k)->check(CLI::IsMember({0, 1}))->default_val(0);
  nontriv->add_option("--pk", o.pk)->capture_default_str();
  nontriv->add_option("--pk1", o.pk1)->capture_default_str();
  nontriv->add_option("--eps", o.eps)->default_val(1.0);
  nontriv->add_option("--trunc", o.trunc)->capture_default_str();
  nontriv->add_option("--csv", o.csv, "Write the partial sums here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 2;
  }

  const auto start = std::chrono::steady_clock::now();
  int code = 2;
  try {
    if (*validate) code = cmd_validate(o);
    else if (*subdivide) code = cmd_subdivide(o);
    else if (*norm) {
      if (o.cochain_path.empty() && o.form_path.empty()) throw CLI::ValidationError("norm", "--cochain or --form is required");
      code = cmd_norm(o);
    } else if (*derham) code = cmd_derham(o);
    else if (*whitney_cmd) code = cmd_whitney(o);
    else if (*cohomology) code = cmd_cohomology(o);
    else if (*contract_cmd) code = cmd_contract(o);
    else if (*split) code = verify_split_cmd(o);
    else if (*stokes) code = verify_stokes_cmd(o);
    else if (*moll) code = verify_mollify_cmd(o);
    else if (*vcon) code = verify_contract_cmd(o);
    else if (*nontriv) code = verify_nontrivial_cmd(o);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::cerr << "elapsed: " << format_real(std::round(elapsed * 1000) / 1000) << '\n';
  return code;
}
