#include "buckle/canonical.hpp"

#include "buckle/dense_core.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <initializer_list>

namespace buckle {

namespace {

Matrix symmetrized(const Matrix& a) { return 0.5 * (a + a.transpose()); }

Matrix hcat(Index rows, std::initializer_list<Matrix> parts) {
  Index cols = 0;
  for (const auto& p : parts) cols += p.cols();
  Matrix out(rows, cols);
  Index at = 0;
  for (const auto& p : parts) {
    out.middleCols(at, p.cols()) = p;
    at += p.cols();
  }
  return out;
}

double spectral_norm_sym(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  return sym_eig(a).values.cwiseAbs().maxCoeff();
}

}  // namespace

Matrix CanonicalForm::a_block() const {
  const Index n = size();
  Matrix c = Matrix::Zero(n, n);
  for (Index i = 0; i < n0; ++i) {
    c(2 * i, 2 * i + 1) = 1.0;
    c(2 * i + 1, 2 * i) = 1.0;
  }
  for (Index i = 0; i < n1; ++i) c(offset_n1() + i, offset_n1() + i) = lambda1(i);
  for (Index i = 0; i < n2; ++i) c(offset_n2() + i, offset_n2() + i) = lambda2(i);
  return c;
}

Matrix CanonicalForm::b_block() const {
  const Index n = size();
  Matrix c = Matrix::Zero(n, n);
  for (Index i = 0; i < n0; ++i) c(2 * i, 2 * i) = 1.0;
  for (Index i = 0; i < n1; ++i) c(offset_n1() + i, offset_n1() + i) = 1.0;
  return c;
}

FixHeibergerForm fix_heiberger_reduce(const Matrix& a_in, const Matrix& b_in, double rank_tol) {
  const Index n = a_in.rows();
  if (a_in.cols() != n || b_in.rows() != n || b_in.cols() != n) {
    throw Error(ErrorKind::Dimension, "fix_heiberger_reduce: A and B must be square and equal size");
  }
  const Matrix a = symmetrized(a_in);
  const Matrix b = symmetrized(b_in);

  // Range / nullspace of B.
  const SymEig eb = sym_eig(b);
  const double bnorm = norm1(b);
  if (n > 0 && eb.values(0) < -rank_tol * bnorm) {
    throw Error(ErrorKind::NotSemidefinite, "fix_heiberger_reduce: B has a negative eigenvalue");
  }
  const double dmax = n > 0 ? eb.values(n - 1) : 0.0;
  Index r = 0;
  for (Index i = 0; i < n; ++i) {
    if (dmax > 0.0 && eb.values(i) > rank_tol * dmax) ++r;
  }
  const Index m = n - r;
  // Eigenvalues are ascending: null directions first.
  const Matrix x0 = eb.vectors.leftCols(m);
  Matrix x1 = eb.vectors.rightCols(r);
  for (Index j = 0; j < r; ++j) x1.col(j) /= std::sqrt(eb.values(m + j));

  const double anorm = spectral_norm_sym(a);

  // A restricted to N(B): nonzero part gives Lambda2.
  const SymEig e00 = sym_eig(x0.transpose() * a * x0);
  std::vector<Index> nz, zz;
  for (Index i = 0; i < m; ++i) {
    (std::abs(e00.values(i)) > rank_tol * anorm ? nz : zz).push_back(i);
  }
  const Index n2 = static_cast<Index>(nz.size());
  Matrix n2cols(n, n2), nullz(n, static_cast<Index>(zz.size()));
  Vector lambda2(n2);
  for (Index i = 0; i < n2; ++i) {
    n2cols.col(i) = x0 * e00.vectors.col(nz[static_cast<size_t>(i)]);
    lambda2(i) = e00.values(nz[static_cast<size_t>(i)]);
  }
  for (Index i = 0; i < nullz.cols(); ++i) nullz.col(i) = x0 * e00.vectors.col(zz[static_cast<size_t>(i)]);

  // Coupling between range(B) and the residual null block reveals Sigma.
  Matrix rcols = x1;
  Matrix ncols = nullz;
  Vector sigma(0);
  Index n0 = 0;
  if (r > 0 && nullz.cols() > 0) {
    const Matrix g = x1.transpose() * a * nullz;
    Eigen::JacobiSVD<Matrix> js(g, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Vector s = js.singularValues();
    const double x1norm = 1.0 / std::sqrt(eb.values(m));
    for (Index i = 0; i < s.size(); ++i) {
      if (s(i) > rank_tol * anorm * x1norm) ++n0;
    }
    sigma = s.head(n0);
    rcols = x1 * js.matrixU();
    ncols = nullz * js.matrixV();
  }
  const Index n1 = r - n0;
  const Index n3 = m - n2 - n0;

  FixHeibergerForm f;
  f.n0 = n0;
  f.n1 = n1;
  f.n2 = n2;
  f.n3 = n3;
  f.sigma = sigma;
  f.lambda2 = lambda2;
  f.w0 = hcat(n, {rcols.leftCols(n0), rcols.rightCols(n1), n2cols, ncols.leftCols(n0),
                  ncols.rightCols(n3)});
  return f;
}

CanonicalForm reduce(const Matrix& a_in, const Matrix& b_in, double rank_tol) {
  const FixHeibergerForm f = fix_heiberger_reduce(a_in, b_in, rank_tol);
  const Matrix a = symmetrized(a_in);
  const Index n = a.rows();
  const Index n0 = f.n0, n1 = f.n1, n2 = f.n2, n3 = f.n3;
  const Index o0 = 0, o1 = n0, o2 = n0 + n1, o3 = n0 + n1 + n2, o4 = o3 + n0;

  Matrix w = f.w0;
  const Matrix a1 = w.transpose() * a * w;

  // Eliminate A00, A01, A02 against Sigma.
  Matrix w1 = Matrix::Identity(n, n);
  if (n0 > 0) {
    const Vector sinv = f.sigma.cwiseInverse();
    w1.block(o3, o0, n0, n0) = -0.5 * sinv.asDiagonal() * a1.block(o0, o0, n0, n0);
    w1.block(o3, o1, n0, n1) = -(sinv.asDiagonal() * a1.block(o0, o1, n0, n1));
    w1.block(o3, o2, n0, n2) = -(sinv.asDiagonal() * a1.block(o0, o2, n0, n2));
  }
  w = w * w1;
  const Matrix a2 = w1.transpose() * a1 * w1;

  // Eliminate A12 against Lambda2.
  Matrix w2 = Matrix::Identity(n, n);
  if (n2 > 0 && n1 > 0) {
    w2.block(o2, o1, n2, n1) =
        -(f.lambda2.cwiseInverse().asDiagonal() * a2.block(o1, o2, n1, n2).transpose());
  }
  w = w * w2;
  const Matrix a3 = w2.transpose() * a2 * w2;
  const Matrix c11 = symmetrized(a3.block(o1, o1, n1, n1));

  // P3: (n0 | n0 | n1 | n2 | n3) from (n0 | n1 | n2 | n0 | n3).
  Matrix wp = hcat(n, {w.middleCols(o0, n0), w.middleCols(o3, n0), w.middleCols(o1, n1),
                       w.middleCols(o2, n2), w.middleCols(o4, n3)});

  // W4: scale the null half of each pair by Sigma^-1, diagonalize C11.
  const SymEig ec = sym_eig(c11);
  for (Index i = 0; i < n0; ++i) wp.col(n0 + i) /= f.sigma(i);
  if (n1 > 0) wp.middleCols(2 * n0, n1) = wp.middleCols(2 * n0, n1) * ec.vectors;

  // P5: interleave the pairs.
  CanonicalForm cf;
  cf.w.resize(n, n);
  for (Index i = 0; i < n0; ++i) {
    cf.w.col(2 * i) = wp.col(i);
    cf.w.col(2 * i + 1) = wp.col(n0 + i);
  }
  cf.w.rightCols(n - 2 * n0) = wp.rightCols(n - 2 * n0);
  cf.n0 = n0;
  cf.n1 = n1;
  cf.n2 = n2;
  cf.n3 = n3;
  cf.lambda1 = n1 > 0 ? ec.values : Vector(0);
  cf.lambda2 = f.lambda2;
  cf.has_coupling = n0 > 0;
  return cf;
}

CanonicalForm enforce_constraint(const CanonicalForm& cf) {
  if (cf.n0 > 0) {
    throw Error(ErrorKind::Coupled, "enforce_constraint: pencil has coupled blocks (n0 > 0)");
  }
  CanonicalForm out = cf;
  if (cf.n3 == 0) return out;
  const Matrix q3 = orthonormalize(cf.w.rightCols(cf.n3));
  auto head = out.w.leftCols(cf.n1 + cf.n2);
  head -= q3 * (q3.transpose() * head);
  return out;
}

bool is_simultaneously_diagonalizable(const CanonicalForm& cf) { return cf.n0 == 0; }

CanonicalResidual canonical_residual(const CanonicalForm& cf, const Matrix& a, const Matrix& b) {
  auto rel = [](const Matrix& diff, const Matrix& ref) {
    const double s = ref.norm();
    return s == 0.0 ? diff.norm() : diff.norm() / s;
  };
  const Matrix wa = cf.w.transpose() * a * cf.w;
  const Matrix wb = cf.w.transpose() * b * cf.w;
  return {rel(wa - cf.a_block(), a), rel(wb - cf.b_block(), b)};
}

CanonicalSpectrum eigenpairs_from_canonical(const CanonicalForm& reversed, double zero_tol) {
  const CanonicalForm cf = enforce_constraint(reversed);
  CanonicalSpectrum out;
  const double scale = cf.n1 > 0 ? cf.lambda1.cwiseAbs().maxCoeff() : 0.0;
  for (Index i = 0; i < cf.n1; ++i) {
    const double inv = cf.lambda1(i);
    const Index col = cf.offset_n1() + i;
    if (std::abs(inv) <= zero_tol * scale || inv == 0.0) {
      out.infinite_columns.push_back(col);
    } else {
      out.finite.push_back({1.0 / inv, cf.w.col(col)});
    }
  }
  return out;
}

PencilDimensions dimensions_from_ranks(const Matrix& a_in, const Matrix& b_in, double rank_tol) {
  const Matrix a = symmetrized(a_in);
  const Matrix b = symmetrized(b_in);
  const Index n = a.rows();
  const Index rank_b = numerical_rank(b, rank_tol);
  const Matrix q = null_space(b, rank_tol);

  // rank of P_N(B) A P_N(B), thresholded against ||A||_2.
  Index n2 = 0;
  if (q.cols() > 0) {
    const Vector s = svd(q.transpose() * a * q).sigma;
    const double anorm = spectral_norm_sym(a);
    n2 = (s.array() > rank_tol * anorm).count();
  }

  // dim(N(A) cap N(B)) from the stacked, separately normalized pair.
  const double an = a.norm(), bn = b.norm();
  Matrix stacked(2 * n, n);
  stacked.topRows(n) = an > 0 ? Matrix(a / an) : a;
  stacked.bottomRows(n) = bn > 0 ? Matrix(b / bn) : b;
  const Index n3 = n - numerical_rank(stacked, rank_tol);

  PencilDimensions d;
  d.n3 = n3;
  d.n2 = n2;
  d.n0 = (n - rank_b) - n2 - n3;
  d.n1 = rank_b - d.n0;
  return d;
}

bool dense_simultaneously_diagonalizable(const Matrix& a, const Matrix& b, double rank_tol) {
  return dimensions_from_ranks(a, b, rank_tol).n0 == 0;
}

}  // namespace buckle
