#include "buckle/transform.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>

namespace buckle {

const char* to_string(MatvecMethod m) {
  return m == MatvecMethod::Augmented ? "augmented" : "reduced";
}

MatvecMethod parse_method(const std::string& s) {
  if (s == "augmented" || s == "1") return MatvecMethod::Augmented;
  if (s == "reduced" || s == "2") return MatvecMethod::Reduced;
  throw Error(ErrorKind::InvalidArgument, "unknown matvec method '" + s + "'");
}

std::vector<Index> select_reduced_permutation(const Matrix& zc, double tol) {
  const Index n = zc.rows(), n3 = zc.cols();
  std::vector<Index> perm;
  perm.reserve(static_cast<size_t>(n));
  if (n3 == 0) {
    for (Index i = 0; i < n; ++i) perm.push_back(i);
    return perm;
  }
  const Matrix zt = zc.transpose();
  Eigen::ColPivHouseholderQR<Matrix> qr(zt);
  const auto& p = qr.colsPermutation().indices();
  std::vector<Index> chosen(p.data(), p.data() + n3);
  std::sort(chosen.begin(), chosen.end());

  Matrix y2(n3, n3);
  for (Index i = 0; i < n3; ++i) y2.row(i) = zc.row(chosen[static_cast<size_t>(i)]);
  if (numerical_rank(y2, tol) < n3 || y2.norm() <= tol * zc.norm()) {
    throw Error(ErrorKind::PermutationFailure,
                "reduced method: no nonsingular n3 x n3 row block in Z_C");
  }
  std::vector<char> taken(static_cast<size_t>(n), 0);
  for (Index c : chosen) taken[static_cast<size_t>(c)] = 1;
  for (Index i = 0; i < n; ++i) {
    if (!taken[static_cast<size_t>(i)]) perm.push_back(i);
  }
  perm.insert(perm.end(), chosen.begin(), chosen.end());
  return perm;
}

ShiftedFactor::ShiftedFactor(const Matrix& k, const Matrix& kg, double sigma,
                             const Matrix& zc_ortho, MatvecMethod method, const LdltOptions& opts)
    : method_(method), sigma_(sigma), n_(k.rows()), n3_(zc_ortho.cols()), qc_(zc_ortho) {
  if (sigma == 0.0) throw Error(ErrorKind::ShiftIsZero, "shift must be nonzero");
  if (kg.rows() != n_ || zc_ortho.rows() != n_) {
    throw Error(ErrorKind::Dimension, "shifted factor: inconsistent dimensions");
  }
  const Matrix shifted = k - sigma * kg;

  if (method == MatvecMethod::Augmented) {
    const double s = norm1(shifted);
    border_scale_ = s > 0.0 ? s : 1.0;
    Matrix aug = Matrix::Zero(n_ + n3_, n_ + n3_);
    aug.topLeftCorner(n_, n_) = shifted;
    aug.topRightCorner(n_, n3_) = border_scale_ * qc_;
    aug.bottomLeftCorner(n3_, n_) = border_scale_ * qc_.transpose();
    factor_ = LdltFactor(aug, opts);
    for (Index i = 0; i < n_; ++i) perm_.push_back(i);
  } else {
    perm_ = select_reduced_permutation(qc_);
    const Index m = n_ - n3_;
    Matrix s11(m, m);
    for (Index j = 0; j < m; ++j) {
      for (Index i = 0; i < m; ++i) s11(i, j) = shifted(perm_[static_cast<size_t>(i)], perm_[static_cast<size_t>(j)]);
    }
    factor_ = LdltFactor(s11, opts);
  }
}

Index ShiftedFactor::shifted_nu_minus() const {
  return method_ == MatvecMethod::Augmented ? nu_minus() - n3_ : nu_minus();
}

ApplyResult ShiftedFactor::solve_constrained(const Vector& rhs) const {
  if (rhs.size() != n_) throw Error(ErrorKind::Dimension, "solve_constrained: wrong length");
  ApplyResult out;
  if (method_ == MatvecMethod::Augmented) {
    Vector b = Vector::Zero(n_ + n3_);
    b.head(n_) = rhs;
    const Vector x = factor_.solve(b);
    out.u = x.head(n_);
    out.aux_norm = x.tail(n3_).norm() * border_scale_;
    return out;
  }
  const Index m = n_ - n3_;
  Vector c(m);
  for (Index i = 0; i < m; ++i) c(i) = rhs(perm_[static_cast<size_t>(i)]);
  const Vector w1 = factor_.solve(c);
  Vector up = Vector::Zero(n_);
  for (Index i = 0; i < m; ++i) up(perm_[static_cast<size_t>(i)]) = w1(i);
  if (n3_ > 0) {
    const Vector coef = qc_.transpose() * up;
    out.aux_norm = coef.norm();
    up -= qc_ * coef;
  }
  out.u = std::move(up);
  return out;
}

ShiftInvertOperator::ShiftInvertOperator(Matrix k, Matrix kg, double sigma, const Matrix& zc,
                                         MatvecMethod method, const LdltOptions& opts)
    : k_(std::move(k)),
      kg_(std::move(kg)),
      qc_(orthonormalize(zc)),
      factor_(k_, kg_, sigma, qc_, method, opts) {
  if (factor_.singular()) {
    throw Error(ErrorKind::SingularShift,
                "shift " + std::to_string(sigma) + " is numerically an eigenvalue of the pencil (" +
                    std::to_string(factor_.factor().inertia().nzero) + " zero pivots)");
  }
}

ApplyResult ShiftInvertOperator::apply_with_diagnostics(const Vector& v) const {
  return factor_.solve_constrained(k_ * v);
}

ShiftInvertOperator build_method1(const Matrix& k, const Matrix& kg, double sigma,
                                  const Matrix& zc, const LdltOptions& opts) {
  return ShiftInvertOperator(k, kg, sigma, zc, MatvecMethod::Augmented, opts);
}

ShiftInvertOperator build_method2(const Matrix& k, const Matrix& kg, double sigma,
                                  const Matrix& zc, const LdltOptions& opts) {
  return ShiftInvertOperator(k, kg, sigma, zc, MatvecMethod::Reduced, opts);
}

Vector apply(const ShiftInvertOperator& op, const Vector& v) { return op.apply(v); }

namespace {

void require_pd(const Matrix& h, const char* what) {
  if (h.rows() != h.cols()) throw Error(ErrorKind::Dimension, std::string(what) + " is not square");
  if (h.rows() == 0) return;
  Eigen::LLT<Matrix> llt(0.5 * (h + h.transpose()));
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::InvalidArgument, std::string(what) + " is not positive definite");
  }
}

}  // namespace

RegularizedInnerProduct::RegularizedInnerProduct(Matrix k, const Matrix& kg, const Matrix& zn,
                                                 Matrix zc, Matrix hn, Matrix hc)
    : k_(std::move(k)), un_(kg * zn), hn_(std::move(hn)), zc_(std::move(zc)), hc_(std::move(hc)) {
  if (hn_.rows() != un_.cols() || hc_.rows() != zc_.cols()) {
    throw Error(ErrorKind::Dimension, "inner product: H_N / H_C sizes do not match the bases");
  }
  require_pd(hn_, "H_N");
  require_pd(hc_, "H_C");
}

RegularizedInnerProduct RegularizedInnerProduct::plain(Matrix k) {
  const Index n = k.rows();
  Matrix empty(n, 0);
  return RegularizedInnerProduct(k, k, empty, empty, Matrix(0, 0), Matrix(0, 0));
}

Vector RegularizedInnerProduct::apply(const Vector& x) const {
  Vector y = k_ * x;
  if (un_.cols() > 0) y.noalias() += un_ * (hn_ * (un_.transpose() * x));
  if (zc_.cols() > 0) y.noalias() += zc_ * (hc_ * (zc_.transpose() * x));
  return y;
}

Matrix RegularizedInnerProduct::dense() const {
  Matrix m = k_;
  m += un_ * hn_ * un_.transpose();
  m += zc_ * hc_ * zc_.transpose();
  return m;
}

Vector m_apply(const RegularizedInnerProduct& m, const Vector& x) { return m.apply(x); }

Scaling default_scaling(const Matrix& k, const Matrix& kg, const Matrix& zn, const Matrix& zc) {
  double omega = norm1(k);
  if (omega == 0.0) omega = 1.0;
  const Matrix un = kg * zn;
  const double kgn = norm1(kg);
  Vector d(zn.cols());
  for (Index i = 0; i < zn.cols(); ++i) {
    const double c = un.col(i).norm();
    if (c <= 1e-14 * kgn * zn.col(i).norm() || c == 0.0) {
      throw Error(ErrorKind::InvalidArgument,
                  "default_scaling: KG*Z_N column " + std::to_string(i) +
                      " vanishes (the Z_N column lies in the common nullspace)");
    }
    d(i) = omega / (c * c);
  }
  return {Matrix(d.asDiagonal()), omega * Matrix::Identity(zc.cols(), zc.cols())};
}

double mu_to_lambda(double mu, double sigma) {
  if (mu == 1.0) throw Error(ErrorKind::InvalidArgument, "mu = 1 maps to an infinite eigenvalue");
  return sigma * mu / (mu - 1.0);
}

double lambda_to_mu(double lambda, double sigma) {
  if (lambda == sigma) throw Error(ErrorKind::InvalidArgument, "lambda equals the shift");
  return lambda / (lambda - sigma);
}

}  // namespace buckle
