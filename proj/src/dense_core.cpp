#include "buckle/dense_core.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace buckle {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse: return "parse error";
    case ErrorKind::Io: return "I/O error";
    case ErrorKind::Dimension: return "dimension mismatch";
    case ErrorKind::RankDeficient: return "rank deficient";
    case ErrorKind::InvalidArgument: return "invalid argument";
    case ErrorKind::NotSemidefinite: return "not positive semi-definite";
    case ErrorKind::SingularShift: return "singular shift";
    case ErrorKind::ShiftIsZero: return "shift is zero";
    case ErrorKind::PermutationFailure: return "permutation failure";
    case ErrorKind::SingularFactor: return "singular factor";
    case ErrorKind::SingularProjectedBlock: return "singular projected block";
    case ErrorKind::AlphaOnSpectrum: return "alpha on spectrum";
    case ErrorKind::NonpositiveNorm: return "nonpositive norm";
    case ErrorKind::Coupled: return "pencil not simultaneously diagonalizable";
  }
  return "unknown error";
}

double norm1(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().colwise().sum().maxCoeff();
}

namespace {

// Eigenvalues of [[a, b], [b, c]].
std::pair<double, double> eig2(double a, double b, double c) {
  const double mid = 0.5 * (a + c);
  const double rad = std::hypot(0.5 * (a - c), b);
  return {mid - rad, mid + rad};
}

void classify(double x, double thresh, Inertia& in) {
  if (std::abs(x) <= thresh) {
    ++in.nzero;
  } else if (x > 0) {
    ++in.nplus;
  } else {
    ++in.nminus;
  }
}

}  // namespace

LdltFactor::LdltFactor(const Matrix& a, const LdltOptions& opts) {
  const Index n = a.rows();
  if (a.cols() != n) {
    throw Error(ErrorKind::Dimension, "ldlt: matrix is not square");
  }
  const double alpha = opts.pivot_tol;
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "ldlt: pivot tolerance must lie in (0,1)");
  }

  Matrix s = 0.5 * (a + a.transpose());
  anorm_ = buckle::norm1(s);
  const double zero_thresh = opts.zero_tol * anorm_;

  lower_ = Matrix::Identity(n, n);
  diag_ = Vector::Zero(n);
  offdiag_ = Vector::Zero(n);
  block_.assign(static_cast<size_t>(n), 0);
  perm_.resize(static_cast<size_t>(n));
  std::iota(perm_.begin(), perm_.end(), Index{0});
  min_pivot_ = std::numeric_limits<double>::infinity();

  auto swap_index = [&](Index i, Index j, Index k) {
    if (i == j) return;
    s.row(i).swap(s.row(j));
    s.col(i).swap(s.col(j));
    if (k > 0) lower_.row(i).head(k).swap(lower_.row(j).head(k));
    std::swap(perm_[static_cast<size_t>(i)], perm_[static_cast<size_t>(j)]);
  };

  Index k = 0;
  while (k < n) {
    const Index rest = n - k - 1;
    const double absakk = std::abs(s(k, k));
    double colmax = 0.0;
    Index imax = k;
    if (rest > 0) {
      Index r = 0;
      colmax = s.col(k).tail(rest).cwiseAbs().maxCoeff(&r);
      imax = k + 1 + r;
    }

    if (std::max(absakk, colmax) <= zero_thresh) {
      // Numerically null column: record a zero pivot and move on.
      diag_(k) = s(k, k);
      block_[static_cast<size_t>(k)] = 1;
      classify(diag_(k), zero_thresh, inertia_);
      min_pivot_ = std::min(min_pivot_, std::abs(diag_(k)));
      ++k;
      continue;
    }

    Index pivot = k;
    int size = 1;
    if (absakk < alpha * colmax) {
      double rowmax = 0.0;
      for (Index j = k; j < n; ++j) {
        if (j != imax) rowmax = std::max(rowmax, std::abs(s(imax, j)));
      }
      if (absakk * rowmax >= alpha * colmax * colmax) {
        pivot = k;
      } else if (std::abs(s(imax, imax)) >= alpha * rowmax) {
        pivot = imax;
      } else {
        pivot = imax;
        size = 2;
      }
    }

    if (size == 1) {
      swap_index(k, pivot, k);
      const double d = s(k, k);
      diag_(k) = d;
      block_[static_cast<size_t>(k)] = 1;
      classify(d, zero_thresh, inertia_);
      min_pivot_ = std::min(min_pivot_, std::abs(d));
      if (rest > 0) {
        const Vector l = s.col(k).tail(rest) / d;
        lower_.col(k).tail(rest) = l;
        s.bottomRightCorner(rest, rest).noalias() -= d * l * l.transpose();
      }
      k += 1;
    } else {
      swap_index(k + 1, pivot, k);
      const double d11 = s(k, k);
      const double d21 = s(k + 1, k);
      const double d22 = s(k + 1, k + 1);
      diag_(k) = d11;
      diag_(k + 1) = d22;
      offdiag_(k) = d21;
      block_[static_cast<size_t>(k)] = 2;
      const auto [e1, e2] = eig2(d11, d21, d22);
      classify(e1, zero_thresh, inertia_);
      classify(e2, zero_thresh, inertia_);
      min_pivot_ = std::min({min_pivot_, std::abs(e1), std::abs(e2)});
      const Index tail = n - k - 2;
      if (tail > 0) {
        const double det = d11 * d22 - d21 * d21;
        Eigen::Matrix2d dinv;
        dinv << d22 / det, -d21 / det, -d21 / det, d11 / det;
        const Matrix b = s.block(k + 2, k, tail, 2);
        const Matrix l = b * dinv;
        lower_.block(k + 2, k, tail, 2) = l;
        s.bottomRightCorner(tail, tail).noalias() -= l * b.transpose();
      }
      k += 2;
    }
  }
  if (n == 0) min_pivot_ = 0.0;
}

Matrix LdltFactor::block_diagonal() const {
  const Index n = size();
  Matrix d = Matrix::Zero(n, n);
  for (Index k = 0; k < n; ++k) {
    d(k, k) = diag_(k);
    if (block_[static_cast<size_t>(k)] == 2) {
      d(k + 1, k) = offdiag_(k);
      d(k, k + 1) = offdiag_(k);
    }
  }
  return d;
}

Index LdltFactor::two_by_two_count() const {
  return std::count(block_.begin(), block_.end(), char{2});
}

Vector LdltFactor::solve(const Vector& b) const {
  const Index n = size();
  if (b.size() != n) {
    throw Error(ErrorKind::Dimension, "ldlt solve: right-hand side has wrong length");
  }
  if (singular()) {
    throw Error(ErrorKind::SingularFactor, "ldlt solve: factor has zero pivots");
  }
  Vector y(n);
  for (Index i = 0; i < n; ++i) y(i) = b(perm_[static_cast<size_t>(i)]);
  lower_.triangularView<Eigen::UnitLower>().solveInPlace(y);
  for (Index k = 0; k < n;) {
    if (block_[static_cast<size_t>(k)] == 2) {
      const double a = diag_(k), c = diag_(k + 1), o = offdiag_(k);
      const double det = a * c - o * o;
      const double y0 = y(k), y1 = y(k + 1);
      y(k) = (c * y0 - o * y1) / det;
      y(k + 1) = (a * y1 - o * y0) / det;
      k += 2;
    } else {
      y(k) /= diag_(k);
      k += 1;
    }
  }
  lower_.transpose().triangularView<Eigen::UnitUpper>().solveInPlace(y);
  Vector x(n);
  for (Index i = 0; i < n; ++i) x(perm_[static_cast<size_t>(i)]) = y(i);
  return x;
}

LdltFactor ldlt(const Matrix& a, const LdltOptions& opts) { return LdltFactor(a, opts); }

Vector solve(const LdltFactor& f, const Vector& b) { return f.solve(b); }

Inertia inertia_from_eigenvalues(const Vector& eigenvalues, double scale, double zero_tol) {
  Inertia in;
  for (Index i = 0; i < eigenvalues.size(); ++i) classify(eigenvalues(i), zero_tol * scale, in);
  return in;
}

SymEig sym_tridiag_eig(const Vector& alpha, const Vector& beta) {
  const Index n = alpha.size();
  if (n > 0 && beta.size() < n - 1) {
    throw Error(ErrorKind::Dimension, "sym_tridiag_eig: off-diagonal too short");
  }
  Vector d = alpha;
  Vector e = Vector::Zero(n);
  for (Index i = 0; i + 1 < n; ++i) e(i) = beta(i);
  Matrix z = Matrix::Identity(n, n);
  const double eps = std::numeric_limits<double>::epsilon();

  for (Index l = 0; l < n; ++l) {
    int iter = 0;
    Index m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(d(m)) + std::abs(d(m + 1));
        if (std::abs(e(m)) <= eps * dd) break;
      }
      if (m != l) {
        if (++iter > 100) {
          throw Error(ErrorKind::InvalidArgument, "sym_tridiag_eig: QL iteration did not converge");
        }
        double g = (d(l + 1) - d(l)) / (2.0 * e(l));
        double r = std::hypot(g, 1.0);
        g = d(m) - d(l) + e(l) / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        Index i = m - 1;
        bool underflow = false;
        for (; i >= l; --i) {
          const double f = s * e(i);
          const double b = c * e(i);
          r = std::hypot(f, g);
          e(i + 1) = r;
          if (r == 0.0) {
            d(i + 1) -= p;
            e(m) = 0.0;
            underflow = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = d(i + 1) - p;
          r = (d(i) - g) * s + 2.0 * c * b;
          p = s * r;
          d(i + 1) = g + p;
          g = c * r - b;
          for (Index k = 0; k < n; ++k) {
            const double t = z(k, i + 1);
            z(k, i + 1) = s * z(k, i) + c * t;
            z(k, i) = c * z(k, i) - s * t;
          }
        }
        if (underflow) continue;
        d(l) -= p;
        e(l) = g;
        e(m) = 0.0;
      }
    } while (m != l);
  }

  std::vector<Index> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return d(a) < d(b); });
  SymEig out{Vector(n), Matrix(n, n)};
  for (Index j = 0; j < n; ++j) {
    out.values(j) = d(order[static_cast<size_t>(j)]);
    out.vectors.col(j) = z.col(order[static_cast<size_t>(j)]);
  }
  return out;
}

SymEig sym_eig(const Matrix& a) {
  if (a.rows() == 0) return {Vector(0), Matrix(0, 0)};
  const Matrix sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  return {es.eigenvalues(), es.eigenvectors()};
}

Svd svd(const Matrix& a) {
  if (a.size() == 0) {
    const Index k = std::min(a.rows(), a.cols());
    return {Matrix::Zero(a.rows(), k), Vector::Zero(k), Matrix::Zero(a.cols(), k)};
  }
  Eigen::JacobiSVD<Matrix> js(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {js.matrixU(), js.singularValues(), js.matrixV()};
}

Matrix orthonormalize(const Matrix& a) {
  if (a.cols() == 0) return Matrix(a.rows(), 0);
  Eigen::HouseholderQR<Matrix> qr(a);
  return qr.householderQ() * Matrix::Identity(a.rows(), a.cols());
}

Index numerical_rank(const Matrix& a, double rel_tol) {
  if (a.size() == 0) return 0;
  const Vector s = svd(a).sigma;
  if (s.size() == 0 || s(0) == 0.0) return 0;
  return (s.array() > rel_tol * s(0)).count();
}

Matrix null_space(const Matrix& a, double rel_tol) {
  const Index n = a.cols();
  if (a.rows() == 0) return Matrix::Identity(n, n);
  Eigen::JacobiSVD<Matrix> js(a, Eigen::ComputeFullV);
  const Vector s = js.singularValues();
  const Index rank = s.size() == 0 || s(0) == 0.0 ? 0 : (s.array() > rel_tol * s(0)).count();
  return js.matrixV().rightCols(n - rank);
}

PseudoInverseOracle::PseudoInverseOracle(const Matrix& k, const Matrix& kg, double sigma,
                                         double zero_tol, double gap_tol)
    : k_(k) {
  const SymEig es = sym_eig(k - sigma * kg);
  const double top = es.values.size() ? es.values.cwiseAbs().maxCoeff() : 0.0;
  q_ = es.vectors;
  inv_ = Vector::Zero(es.values.size());
  double smallest_kept = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < es.values.size(); ++i) {
    const double t = es.values(i);
    if (std::abs(t) <= zero_tol * top) {
      ++truncated_;
    } else {
      inv_(i) = 1.0 / t;
      smallest_kept = std::min(smallest_kept, std::abs(t));
    }
  }
  if (smallest_kept < gap_tol * top) {
    throw Error(ErrorKind::SingularShift,
                "pinv oracle: no clear gap between zero and nonzero eigenvalues of K - sigma*KG");
  }
}

Vector PseudoInverseOracle::apply(const Vector& v) const {
  const Vector kv = k_ * v;
  return q_ * inv_.cwiseProduct(q_.transpose() * kv);
}

Vector pinv_apply_oracle(const Matrix& k, const Matrix& kg, double sigma, const Vector& v) {
  return PseudoInverseOracle(k, kg, sigma).apply(v);
}

}  // namespace buckle
