#pragma once

#include "buckle/common.hpp"

#include <vector>

namespace buckle {

struct Inertia {
  Index nplus = 0;
  Index nminus = 0;
  Index nzero = 0;

  Index size() const { return nplus + nminus + nzero; }
  friend bool operator==(const Inertia&, const Inertia&) = default;
};

struct LdltOptions {
  /// Relative threshold for accepting a 1x1 pivot; plays the role of the
  /// Bunch-Kaufman growth constant.
  double pivot_tol = 0.1;
  /// Pivots (or 2x2 block eigenvalues) with |d| <= zero_tol * ||A||_1 are
  /// classified as zero.
  double zero_tol = 1e-12;
};

/// Symmetric indefinite factorization P A P^T = L D L^T with 1x1 and 2x2
/// pivots (Bunch-Kaufman partial pivoting). Immutable after construction.
class LdltFactor {
 public:
  LdltFactor() = default;
  explicit LdltFactor(const Matrix& a, const LdltOptions& opts = {});

  Index size() const { return lower_.rows(); }
  const Inertia& inertia() const { return inertia_; }
  bool singular() const { return inertia_.nzero > 0; }

  /// Smallest magnitude among the eigenvalues of the D blocks. A
  /// conditioning diagnostic only.
  double min_pivot_magnitude() const { return min_pivot_; }
  double norm1() const { return anorm_; }

  /// perm()[i] is the row of A moved to position i.
  const std::vector<Index>& perm() const { return perm_; }
  const Matrix& lower() const { return lower_; }
  /// Block diagonal D as a dense (tridiagonal) matrix.
  Matrix block_diagonal() const;
  /// Number of 2x2 pivots used.
  Index two_by_two_count() const;

  /// Solves A x = b. Throws ErrorKind::SingularFactor when nzero > 0.
  Vector solve(const Vector& b) const;

 private:
  Matrix lower_;
  Vector diag_;
  Vector offdiag_;            // offdiag_[k] couples k and k+1 in a 2x2 block
  std::vector<char> block_;   // 1 or 2 at the leading index of a block, 0 else
  std::vector<Index> perm_;
  Inertia inertia_;
  double anorm_ = 0.0;
  double min_pivot_ = 0.0;
};

LdltFactor ldlt(const Matrix& a, const LdltOptions& opts = {});
Vector solve(const LdltFactor& f, const Vector& b);

/// Inertia from eigenvalues, |x| <= zero_tol * ||A||_1 counted as zero.
Inertia inertia_from_eigenvalues(const Vector& eigenvalues, double scale,
                                 double zero_tol = 1e-12);

struct SymEig {
  Vector values;   // ascending
  Matrix vectors;  // orthonormal columns
};

/// Implicit-shift QL on a symmetric tridiagonal matrix with diagonal
/// `alpha` and off-diagonal `beta` (size alpha.size() - 1).
SymEig sym_tridiag_eig(const Vector& alpha, const Vector& beta);

/// Dense symmetric eigendecomposition.
SymEig sym_eig(const Matrix& a);

struct Svd {
  Matrix u;
  Vector sigma;  // nonincreasing
  Matrix v;
};

/// Thin SVD.
Svd svd(const Matrix& a);

/// Orthonormal basis for range(a) via Householder QR; a must have full
/// column rank.
Matrix orthonormalize(const Matrix& a);

/// Numerical rank: singular values above rel_tol * sigma_max.
Index numerical_rank(const Matrix& a, double rel_tol);

/// Orthonormal basis of the numerical nullspace of a (columns of V for
/// singular values <= rel_tol * sigma_max).
Matrix null_space(const Matrix& a, double rel_tol);

/// Dense pseudo-inverse oracle for u = (K - sigma K_G)^+ K v, built once
/// from a full eigendecomposition of K - sigma K_G with explicit
/// truncation of the zero cluster.
class PseudoInverseOracle {
 public:
  PseudoInverseOracle(const Matrix& k, const Matrix& kg, double sigma,
                      double zero_tol = 1e-10, double gap_tol = 1e-8);

  Vector apply(const Vector& v) const;
  Index truncated() const { return truncated_; }

 private:
  Matrix k_;
  Matrix q_;
  Vector inv_;
  Index truncated_ = 0;
};

Vector pinv_apply_oracle(const Matrix& k, const Matrix& kg, double sigma,
                         const Vector& v);

}  // namespace buckle
