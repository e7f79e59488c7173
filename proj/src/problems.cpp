#include "buckle/problems.hpp"

#include "buckle/dense_core.hpp"
#include "buckle/transform.hpp"

#include <Eigen/LU>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <random>

namespace buckle {

namespace {

Matrix gaussian(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix a(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) a(i, j) = g(rng);
  }
  return a;
}

Matrix orthogonal_from(const Matrix& a) {
  const Index n = a.rows();
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  const Matrix& r = qr.matrixQR();
  for (Index i = 0; i < n; ++i) {
    if (r(i, i) < 0.0) q.col(i) = -q.col(i);
  }
  return q;
}

Matrix symmetric_part(const Matrix& a) { return 0.5 * (a + a.transpose()); }

}  // namespace

std::vector<double> GeneratedPencil::truth_lambdas() const {
  std::vector<double> out;
  out.reserve(truth.size());
  for (const auto& t : truth) out.push_back(t.lambda);
  return out;
}

Matrix random_orthogonal(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return orthogonal_from(gaussian(n, n, rng));
}

GeneratedPencil gen_example1(Index n, Index m, std::uint64_t seed) {
  if (m < 1 || m >= n) throw Error(ErrorKind::InvalidArgument, "gen_example1: need 1 <= m < n");
  const Matrix q = random_orthogonal(n, seed);
  Vector lam(n), phi(n);
  for (Index k = 1; k <= n; ++k) {
    lam(k - 1) = k <= n - m ? static_cast<double>(k) : 0.0;
    phi(k - 1) = (k % 2 == 0) ? 1.0 : -1.0;
  }
  GeneratedPencil g;
  g.seed = seed;
  g.pencil.k = symmetric_part(q * lam.asDiagonal() * q.transpose());
  g.pencil.kg = symmetric_part(q * phi.asDiagonal() * q.transpose());
  g.pencil.zn = q.rightCols(m);
  g.pencil.zc = Matrix(n, 0);
  g.infinite_count = m;
  for (Index k = 1; k <= n - m; ++k) {
    g.truth.push_back({phi(k - 1) * static_cast<double>(k), q.col(k - 1)});
  }
  std::sort(g.truth.begin(), g.truth.end(),
            [](const TruthPair& a, const TruthPair& b) { return a.lambda < b.lambda; });
  return g;
}

GeneratedPencil gen_singular(const SingularSpec& spec) {
  const Index n1 = static_cast<Index>(spec.lambda1_sharp.size());
  const Index n2 = static_cast<Index>(spec.lambda2_sharp.size());
  const Index n3 = spec.n3;
  const Index n = n1 + n2 + n3;
  if (n3 < 0 || n == 0) throw Error(ErrorKind::InvalidArgument, "gen_singular: empty pencil");
  for (double v : spec.lambda2_sharp) {
    if (v == 0.0) throw Error(ErrorKind::InvalidArgument, "gen_singular: Lambda2# entries must be nonzero");
  }

  Matrix w = Matrix::Identity(n, n);
  if (!spec.identity_w) {
    std::mt19937_64 rng(spec.seed);
    const Matrix q1 = orthogonal_from(gaussian(n, n, rng));
    const Matrix q2 = orthogonal_from(gaussian(n, n, rng));
    Matrix r = gaussian(n, n, rng);
    r /= r.norm();  // Frobenius bound keeps ||0.1 R||_2 <= 0.1
    w = q1 * (Matrix::Identity(n, n) + 0.1 * r) * q2;
    if (n3 > 0) {
      const Matrix q3 = orthonormalize(w.rightCols(n3));
      auto head = w.leftCols(n1 + n2);
      head -= q3 * (q3.transpose() * head);
    }
  }
  const Matrix y = w.partialPivLu().inverse();
  const Matrix y1 = y.topRows(n1);
  const Matrix y2 = y.middleRows(n1, n2);
  Vector l1(n1), l2(n2);
  for (Index i = 0; i < n1; ++i) l1(i) = spec.lambda1_sharp[static_cast<size_t>(i)];
  for (Index i = 0; i < n2; ++i) l2(i) = spec.lambda2_sharp[static_cast<size_t>(i)];

  GeneratedPencil g;
  g.seed = spec.seed;
  g.pencil.k = symmetric_part(y1.transpose() * y1);
  g.pencil.kg = symmetric_part(y1.transpose() * l1.asDiagonal() * y1 +
                               y2.transpose() * l2.asDiagonal() * y2);
  g.pencil.zn = w.middleCols(n1, n2);
  g.pencil.zc = n3 > 0 ? orthonormalize(w.rightCols(n3)) : Matrix(n, 0);
  g.infinite_count = n2;
  g.common_null_dim = n3;
  for (Index i = 0; i < n1; ++i) {
    if (l1(i) != 0.0) g.truth.push_back({1.0 / l1(i), w.col(i)});
  }
  std::sort(g.truth.begin(), g.truth.end(),
            [](const TruthPair& a, const TruthPair& b) { return a.lambda < b.lambda; });
  return g;
}

DemoResult demo_norm_growth(const DemoOptions& opts) {
  if (opts.steps < 1) throw Error(ErrorKind::InvalidArgument, "demo: steps must be >= 1");
  if (opts.restart && (*opts.restart < 2 || *opts.restart >= opts.steps)) {
    throw Error(ErrorKind::InvalidArgument, "demo: restart step must lie in [2, steps)");
  }
  const GeneratedPencil g = gen_example1(opts.n, opts.m, opts.seed);
  const Pencil& p = g.pencil;
  const ShiftInvertOperator op(p.k, p.kg, opts.sigma, p.zc, MatvecMethod::Augmented);

  const bool k_inner = opts.inner == InnerKind::K;
  const RegularizedInnerProduct m =
      k_inner ? RegularizedInnerProduct::plain(p.k)
              : RegularizedInnerProduct(p.k, p.kg, p.zn, p.zc,
                                        Matrix::Identity(p.zn.cols(), p.zn.cols()), Matrix(0, 0));
  LanczosProcess proc([&op](const Vector& v) { return op.apply(v); },
                      [&m](const Vector& v) { return m.apply(v); }, p.size(),
                      k_inner ? NormPolicy::Tolerate : NormPolicy::Strict,
                      k_inner ? orthonormalize(p.zn) : Matrix());

  DemoResult res;
  if (proc.start(Vector::Ones(p.size()))) {
    for (Index s = 1; s <= opts.steps; ++s) {
      const bool ok = proc.step();
      const double vn = proc.basis().col(proc.steps() - 1).norm();
      res.trace.push_back({s, vn, proc.last_beta()});
      res.max_vnorm = std::max(res.max_vnorm, vn);
      res.checkpoints.push_back(proc.checkpoint());
      if (!ok) break;
      if (opts.restart && s == *opts.restart) {
        const SymEig e = sym_tridiag_eig(proc.alphas(), proc.offdiag());
        Index pick = 0;
        for (Index i = 1; i < e.values.size(); ++i) {
          if (std::abs(e.values(i)) < std::abs(e.values(pick))) pick = i;
        }
        res.restart_shift = e.values(pick);
        proc.restart(e.values(pick));
      }
    }
  }
  res.events = proc.norm_events();
  res.ritz = ritz_extract(proc, op, opts.tol, true);
  return res;
}

}  // namespace buckle
