// Command-line front end: solve, count, canonical, gen, demo.

#include "buckle/canonical.hpp"
#include "buckle/counting.hpp"
#include "buckle/lanczos.hpp"
#include "buckle/matio.hpp"
#include "buckle/pencil.hpp"
#include "buckle/problems.hpp"
#include "buckle/report.hpp"
#include "buckle/transform.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace buckle;

namespace {

enum Exit : int {
  kOk = 0,
  kGeneral = 1,
  kUsage = 2,
  kSingularShift = 3,
  kCountMismatch = 4,
  kIterationLimit = 5,
  kInvalidBundle = 6,
};

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument:
    case ErrorKind::ShiftIsZero:
      return kUsage;
    case ErrorKind::SingularShift:
    case ErrorKind::AlphaOnSpectrum:
    case ErrorKind::SingularFactor:
      return kSingularShift;
    case ErrorKind::Dimension:
    case ErrorKind::RankDeficient:
    case ErrorKind::SingularProjectedBlock:
    case ErrorKind::PermutationFailure:
      return kInvalidBundle;
    default:
      return kGeneral;
  }
}

struct Inputs {
  std::string bundle;
  std::string k, kg, zn, zc;

  void add_to(CLI::App* app) {
    app->add_option("--bundle", bundle, "Directory holding K.mtx, KG.mtx and optional ZN.mtx, ZC.mtx");
    app->add_option("--K", k, "Stiffness matrix (Matrix Market, symmetric)");
    app->add_option("--KG", kg, "Geometric stiffness matrix (Matrix Market, symmetric)");
    app->add_option("--ZN", zn, "Basis of N(K) outside the common nullspace (array format)");
    app->add_option("--ZC", zc, "Basis of the common nullspace (array format)");
  }

  ProblemBundle load() const {
    if (!bundle.empty()) {
      if (!k.empty() || !kg.empty()) throw CLI::ValidationError("--bundle excludes --K/--KG");
      return read_bundle(bundle);
    }
    if (k.empty() || kg.empty()) throw CLI::ValidationError("need --bundle or both --K and --KG");
    ProblemBundle b;
    b.k = read_matrix_market(k);
    b.kg = read_matrix_market(kg);
    if (b.kg.size() != b.k.size()) throw Error(ErrorKind::Dimension, "K and KG differ in size");
    const Index n = b.k.size();
    b.zn = zn.empty() ? BasisColumns{Matrix(n, 0)} : read_basis(zn, n);
    b.zc = zc.empty() ? BasisColumns{Matrix(n, 0)} : read_basis(zc, n);
    return b;
  }
};

/// Loads and validates; validation failures end the run.
Pencil load_checked(const Inputs& in, bool quiet = false) {
  const ProblemBundle b = in.load();
  const ValidationReport v = validate_bundle(b);
  if (!quiet) {
    for (const auto& w : v.warnings) std::cerr << "warning: " << w << "\n";
  }
  if (!v.pass) {
    std::string msg = "bundle failed validation:";
    for (const auto& f : v.failures) msg += "\n  " + f;
    throw Error(ErrorKind::Dimension, msg);
  }
  return Pencil::from_bundle(b);
}

std::pair<double, double> parse_interval(const std::vector<double>& v) {
  if (v.size() != 2) throw CLI::ValidationError("--interval expects a,b");
  if (!(v[0] < v[1])) throw CLI::ValidationError("--interval needs a < b");
  return {v[0], v[1]};
}

std::string fmt(double x, int prec = 17) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", prec, x);
  return buf;
}

void print_count(const CountReport& c, std::ostream& os) {
  const char* factored = c.method == MatvecMethod::Augmented ? "A_alpha" : "S11_alpha";
  const Index n3 = c.method == MatvecMethod::Augmented ? c.common_null_dim : 0;
  for (const auto& [alpha, raw] : c.inertias_used) {
    const bool neg = alpha < 0.0;
    const Index corr = neg ? c.projected.nminus : c.projected.nplus;
    os << (neg ? "n(" + fmt(alpha, 6) + ",0)" : "n(0," + fmt(alpha, 6) + ")") << " = nu-(" << factored
       << ")";
    if (c.method == MatvecMethod::Augmented) os << " - dim(Zc)";
    os << " - nu" << (neg ? "-" : "+") << "(ZN^T KG ZN) = " << raw;
    if (c.method == MatvecMethod::Augmented) os << " - " << n3;
    os << " - " << corr << " = " << raw - n3 - corr << "\n";
  }
  os << "count(" << fmt(c.a, 6) << ", " << fmt(c.b, 6) << ") = " << c.count << "  [" << to_string(c.method)
     << "]\n";
}

// ---------------------------------------------------------------- solve

struct SolveArgs {
  Inputs in;
  double shift = 0.0;
  std::vector<double> interval;
  Index nev = 6;
  double tol = 1e-6;
  Index maxit = 300;
  std::string method = "augmented";
  std::uint64_t seed = 0;
  std::string report;
  std::string trace;
};

int cmd_solve(const SolveArgs& a) {
  if (a.shift == 0.0) throw Error(ErrorKind::ShiftIsZero, "--shift must be nonzero");
  if (a.nev < 1) throw CLI::ValidationError("--nev must be >= 1");
  const MatvecMethod method = parse_method(a.method);
  const Pencil p = load_checked(a.in);

  const ShiftInvertOperator op(p.k, p.kg, a.shift, p.zc, method);
  const Scaling sc = default_scaling(p.k, p.kg, p.zn, p.zc);
  const RegularizedInnerProduct m(p.k, p.kg, p.zn, p.zc, sc.hn, sc.hc);

  LanczosOptions lo;
  lo.tol = a.tol;
  lo.maxit = a.maxit;
  lo.nev = a.nev;
  lo.seed = a.seed;
  std::optional<CountReport> count;
  if (!a.interval.empty()) {
    const auto iv = parse_interval(a.interval);
    count = count_interval(p, iv.first, iv.second, method);
    lo.interval = iv;
    lo.expected = count->count;
  }

  const LanczosResult res = run(op, m, random_start(p.size(), a.seed), lo);

  SolveReport rep;
  rep.sigma = a.shift;
  rep.method = to_string(method);
  rep.iterations = res.iterations;
  rep.stop_reason = to_string(res.stop);
  rep.orthogonality = res.orthogonality;
  std::vector<double> lambdas;
  std::vector<Vector> vectors;
  for (const auto& pr : res.pairs) {
    rep.eigenpairs.push_back({pr.lambda, pr.mu, pr.eta, pr.cos_angle, pr.errbound});
    lambdas.push_back(pr.lambda);
    vectors.push_back(pr.x);
  }

  std::cout << "shift " << fmt(a.shift, 6) << ", method " << rep.method << ", " << res.iterations
            << " Lanczos steps, stop: " << rep.stop_reason << "\n";
  std::cout << "||V^T M V - I||_F = " << fmt(res.orthogonality, 3) << "\n";
  std::printf("%4s %24s %11s %11s %11s\n", "#", "lambda", "eta", "cos(Zc)", "errbound");
  for (size_t i = 0; i < rep.eigenpairs.size(); ++i) {
    const auto& e = rep.eigenpairs[i];
    std::printf("%4zu %24.17g %11.3e %11.3e %11.3e\n", i + 1, e.lambda, e.eta, e.cos_angle, e.errbound);
  }

  int code = kOk;
  if (count) {
    const Verdict v = validate(*count, lambdas, vectors);
    rep.count = count->to_record();
    rep.verdict = v.status_name();
    rep.verdict_delta = v.delta;
    print_count(*count, std::cout);
    std::cout << "verdict: " << v.label() << " (count " << v.expected << ", found " << v.found << ")\n";
    if (res.stop == StopReason::IterationLimit && !res.request_met) {
      code = kIterationLimit;
    } else if (v.status != VerdictStatus::Match) {
      code = kCountMismatch;
    }
  } else if (!res.request_met) {
    std::cerr << "requested " << a.nev << " pairs, obtained " << res.pairs.size() << " (" << rep.stop_reason
              << ")\n";
    // An invariant subspace ends the search without a shortfall in the method:
    // the pencil has no further eigenvalues reachable from this start.
    if (res.stop == StopReason::IterationLimit || res.pairs.empty()) code = kIterationLimit;
  }

  if (!a.report.empty()) write_report(rep, a.report);
  if (!a.trace.empty()) {
    std::vector<TraceRow> rows;
    for (const auto& t : res.trace) rows.push_back({t.step, t.vnorm, t.beta});
    write_trace(rows, a.trace);
  }
  return code;
}

// ---------------------------------------------------------------- count

struct CountArgs {
  Inputs in;
  std::vector<double> interval;
  double alpha = 0.0;
  std::string method = "augmented";
  std::string report;
};

int cmd_count(const CountArgs& a) {
  const Pencil p = load_checked(a.in);
  std::vector<MatvecMethod> methods;
  if (a.method == "both") {
    methods = {MatvecMethod::Augmented, MatvecMethod::Reduced};
  } else {
    methods = {parse_method(a.method)};
  }
  std::vector<CountReport> reports;
  for (MatvecMethod mm : methods) {
    if (!a.interval.empty()) {
      const auto iv = parse_interval(a.interval);
      reports.push_back(count_interval(p, iv.first, iv.second, mm));
    } else if (a.alpha != 0.0) {
      reports.push_back(count_half_interval(p, a.alpha, mm));
    } else {
      throw CLI::ValidationError("need --interval a,b or a nonzero --alpha");
    }
    print_count(reports.back(), std::cout);
  }
  std::cout << "nu(ZN^T KG ZN) = (+" << reports[0].projected.nplus << ", -" << reports[0].projected.nminus
            << ", 0), dim(Zc) = " << reports[0].common_null_dim << "\n";
  if (!a.report.empty()) {
    std::ofstream out(a.report);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + a.report);
    out << count_to_json(reports[0].to_record());
  }
  if (reports.size() == 2 && reports[0].count != reports[1].count) {
    std::cerr << "augmented and reduced counts disagree\n";
    return kCountMismatch;
  }
  return kOk;
}

// ---------------------------------------------------------------- canonical

struct CanonicalArgs {
  Inputs in;
  bool reverse = false;
  double tol = 1e-10;
  std::string report;
};

std::string join(const Vector& v) {
  std::string s;
  for (Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v(i), 12);
  return s;
}

int cmd_canonical(const CanonicalArgs& a) {
  const Pencil p = Pencil::from_bundle(a.in.load());
  const Matrix& amat = a.reverse ? p.kg : p.k;
  const Matrix& bmat = a.reverse ? p.k : p.kg;
  const CanonicalForm cf = reduce(amat, bmat, a.tol);
  const CanonicalResidual r = canonical_residual(cf, amat, bmat);
  const PencilDimensions d = dimensions_from_ranks(amat, bmat, a.tol);
  const bool sd = is_simultaneously_diagonalizable(cf);

  std::cout << "pencil: " << (a.reverse ? "KG - lambda# K" : "K - lambda KG") << "\n";
  std::cout << "n0=" << cf.n0 << " n1=" << cf.n1 << " n2=" << cf.n2 << " n3=" << cf.n3 << "\n";
  std::cout << "rank formulas: n0=" << d.n0 << " n1=" << d.n1 << " n2=" << d.n2 << " n3=" << d.n3
            << (d.n0 == cf.n0 && d.n1 == cf.n1 && d.n2 == cf.n2 && d.n3 == cf.n3 ? " (agree)" : " (DISAGREE)")
            << "\n";
  std::cout << "Lambda1: [" << join(cf.lambda1) << "]\n";
  std::cout << "Lambda2: [" << join(cf.lambda2) << "]\n";
  std::cout << "residual A: " << fmt(r.a, 3) << ", residual B: " << fmt(r.b, 3) << "\n";
  std::cout << (sd ? "simultaneously diagonalizable" : "not simultaneously diagonalizable") << "\n";
  if (a.reverse && sd) {
    const CanonicalSpectrum s = eigenpairs_from_canonical(cf);
    std::cout << "finite eigenvalues of K - lambda KG:";
    for (const auto& e : s.finite) std::cout << " " << fmt(e.lambda, 12);
    std::cout << "\ninfinite class: " << s.infinite_columns.size() << "\n";
  }
  if (!a.report.empty()) {
    nlohmann::json j = {{"schema", 1},
                        {"reversed", a.reverse},
                        {"n0", cf.n0},
                        {"n1", cf.n1},
                        {"n2", cf.n2},
                        {"n3", cf.n3},
                        {"lambda1", std::vector<double>(cf.lambda1.data(), cf.lambda1.data() + cf.lambda1.size())},
                        {"lambda2", std::vector<double>(cf.lambda2.data(), cf.lambda2.data() + cf.lambda2.size())},
                        {"residual_a", r.a},
                        {"residual_b", r.b},
                        {"simultaneously_diagonalizable", sd}};
    std::ofstream out(a.report);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + a.report);
    out << j.dump(2) << "\n";
  }
  return kOk;
}

// ---------------------------------------------------------------- gen

struct GenArgs {
  std::string kind;
  std::string out;
  Index n = 500;
  Index m = 1;
  Index n1 = 10, n2 = 2, n3 = 1;
  std::vector<double> lambda1, lambda2;
  std::uint64_t seed = 1;
};

int cmd_gen(const GenArgs& a) {
  GeneratedPencil g;
  if (a.kind == "example1") {
    g = gen_example1(a.n, a.m, a.seed);
  } else if (a.kind == "tiny") {
    g = gen_singular({{2.0}, {-1.0}, 1, 0, true});
  } else if (a.kind == "singular") {
    SingularSpec s;
    s.n3 = a.n3;
    s.seed = a.seed;
    s.lambda1_sharp = a.lambda1;
    s.lambda2_sharp = a.lambda2;
    std::mt19937_64 rng(a.seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> u(0.5, 2.0);
    if (s.lambda1_sharp.empty()) {
      for (Index i = 0; i < a.n1; ++i) s.lambda1_sharp.push_back((i % 2 ? -1.0 : 1.0) * u(rng));
    }
    if (s.lambda2_sharp.empty()) {
      for (Index i = 0; i < a.n2; ++i) s.lambda2_sharp.push_back((i % 2 ? -1.0 : 1.0) * u(rng));
    }
    g = gen_singular(s);
  } else {
    throw CLI::ValidationError("unknown generator '" + a.kind + "' (example1 | singular | tiny)");
  }
  fs::create_directories(a.out);
  write_bundle(g.bundle(), a.out);
  nlohmann::json truth = {{"schema", 1},
                          {"n", g.pencil.size()},
                          {"seed", g.seed},
                          {"lambda", g.truth_lambdas()},
                          {"infinite_count", g.infinite_count},
                          {"common_null_dim", g.common_null_dim}};
  std::ofstream t(fs::path(a.out) / "truth.json");
  if (!t) throw Error(ErrorKind::Io, "cannot write truth.json");
  t << truth.dump(2) << "\n";
  std::cout << "wrote " << a.kind << " pencil (n = " << g.pencil.size() << ", " << g.truth.size()
            << " finite eigenvalues) to " << a.out << "\n";
  return kOk;
}

// ---------------------------------------------------------------- demo

struct DemoArgs {
  DemoOptions opts;
  std::string inner = "M";
  Index restart = 0;
  std::string trace;
  std::string ritz;
};

int cmd_demo(DemoArgs a) {
  if (a.inner == "K" || a.inner == "k") {
    a.opts.inner = InnerKind::K;
  } else if (a.inner == "M" || a.inner == "m") {
    a.opts.inner = InnerKind::M;
  } else {
    throw CLI::ValidationError("--inner must be K or M");
  }
  if (a.restart > 0) a.opts.restart = a.restart;
  const DemoResult r = demo_norm_growth(a.opts);

  std::cout << "inner " << a.inner << ", " << r.trace.size() << " steps, max ||v_j||_2 = " << fmt(r.max_vnorm, 4)
            << "\n";
  if (r.restart_shift) std::cout << "implicit restart after step " << a.restart << ", shift " << fmt(*r.restart_shift, 6) << "\n";
  if (!r.events.empty()) std::cout << r.events.size() << " steps with p^T r < 0 (|p^T r| used)\n";
  Index conv = 0;
  double worst = 0.0;
  for (const auto& p : r.ritz) {
    if (p.converged) {
      ++conv;
      worst = std::max(worst, p.eta);
    }
  }
  std::cout << conv << " converged Ritz pairs, max eta " << fmt(worst, 3) << "\n";

  if (!a.trace.empty()) write_trace(r.trace, a.trace);
  if (!a.ritz.empty()) {
    std::ofstream out(a.ritz);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + a.ritz);
    out << "lambda,mu,eta,errbound,converged\n";
    for (const auto& p : r.ritz) {
      out << fmt(p.lambda) << "," << fmt(p.mu) << "," << fmt(p.eta) << "," << fmt(p.errbound) << ","
          << (p.converged ? 1 : 0) << "\n";
    }
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shift-invert Lanczos for singular buckling pencils K - lambda KG"};
  app.require_subcommand(1);

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "Eigenpairs near a shift, optionally validated on an interval");
  solve.in.add_to(s);
  s->add_option("--shift", solve.shift, "Shift sigma (nonzero)")->required();
  s->add_option("--interval", solve.interval, "Validate by counting on (a,b)")->delimiter(',')->expected(2);
  s->add_option("--nev", solve.nev, "Number of pairs nearest the shift")->capture_default_str();
  s->add_option("--tol", solve.tol, "Convergence tolerance")->capture_default_str();
  s->add_option("--maxit", solve.maxit, "Maximum Lanczos steps")->capture_default_str();
  s->add_option("--method", solve.method, "augmented | reduced")->capture_default_str();
  s->add_option("--seed", solve.seed, "Seed of the random start vector")->capture_default_str();
  s->add_option("--report", solve.report, "Write the JSON report here");
  s->add_option("--trace", solve.trace, "Write the step,vnorm,beta CSV here");

  CountArgs count;
  auto* c = app.add_subcommand("count", "Count eigenvalues in an interval by inertia");
  count.in.add_to(c);
  c->add_option("--interval", count.interval, "Interval a,b")->delimiter(',')->expected(2);
  c->add_option("--alpha", count.alpha, "Half interval (alpha,0) or (0,alpha)");
  c->add_option("--method", count.method, "augmented | reduced | both")->capture_default_str();
  c->add_option("--report", count.report, "Write the JSON count here");

  CanonicalArgs canon;
  auto* k = app.add_subcommand("canonical", "Canonical form of A - lambda B (B semidefinite)");
  canon.in.add_to(k);
  k->add_flag("--reverse", canon.reverse, "Use A = KG, B = K");
  k->add_option("--tol", canon.tol, "Rank threshold")->capture_default_str();
  k->add_option("--report", canon.report, "Write the JSON summary here");

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Write a synthetic pencil bundle and its truth");
  g->add_option("kind", gen.kind, "example1 | singular | tiny")->required();
  g->add_option("--out", gen.out, "Output directory")->required();
  g->add_option("--n", gen.n, "example1: dimension")->capture_default_str();
  g->add_option("--m", gen.m, "example1: nullity of K")->capture_default_str();
  g->add_option("--n1", gen.n1, "singular: finite block size (random values)")->capture_default_str();
  g->add_option("--n2", gen.n2, "singular: Z_N size (random values)")->capture_default_str();
  g->add_option("--n3", gen.n3, "singular: common nullspace dimension")->capture_default_str();
  g->add_option("--lambda1", gen.lambda1, "singular: Lambda1# values")->delimiter(',');
  g->add_option("--lambda2", gen.lambda2, "singular: Lambda2# values")->delimiter(',');
  g->add_option("--seed", gen.seed, "RNG seed")->capture_default_str();

  DemoArgs demo;
  auto* d = app.add_subcommand("demo", "Lanczos vector norm growth, K- vs M-inner product");
  d->add_option("--n", demo.opts.n, "Dimension")->capture_default_str();
  d->add_option("--m", demo.opts.m, "Nullity of K")->capture_default_str();
  d->add_option("--shift", demo.opts.sigma, "Shift")->capture_default_str();
  d->add_option("--steps", demo.opts.steps, "Lanczos steps")->capture_default_str();
  d->add_option("--inner", demo.inner, "K | M")->capture_default_str();
  d->add_option("--restart", demo.restart, "Implicit restart after this step (0: none)");
  d->add_option("--seed", demo.opts.seed, "RNG seed")->capture_default_str();
  d->add_option("--tol", demo.opts.tol, "Convergence tolerance")->capture_default_str();
  d->add_option("--trace", demo.trace, "Write the step,vnorm,beta CSV here");
  d->add_option("--ritz", demo.ritz, "Write final Ritz values and residuals here");

  try {
    app.parse(argc, argv);
    if (s->parsed()) return cmd_solve(solve);
    if (c->parsed()) return cmd_count(count);
    if (k->parsed()) return cmd_canonical(canon);
    if (g->parsed()) return cmd_gen(gen);
    if (d->parsed()) return cmd_demo(demo);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.kind()) << "]: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kGeneral;
  }
  return kUsage;
}
