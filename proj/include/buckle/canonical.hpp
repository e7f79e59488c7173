#pragma once

#include "buckle/common.hpp"

#include <vector>

namespace buckle {

// Canonical form of a symmetric semi-definite pencil A - lambda*B
// (A symmetric, B symmetric positive semi-definite). With W nonsingular,
//
//   W^T A W = blockdiag(S, Lambda1, Lambda2, 0)
//   W^T B W = blockdiag(Omega, I_n1, 0, 0)
//
// where S and Omega are n0 copies of [[0,1],[1,0]] and [[1,0],[0,0]].
// Column blocks of W are ordered (2*n0 | n1 | n2 | n3).

/// Intermediate form: W0^T B W0 = blockdiag(I_n0, I_n1, 0, 0, 0) and
/// W0^T A W0 has the coupled pattern with Sigma linking the leading n0
/// range columns to the n0 null columns. Column blocks are ordered
/// (n0 | n1 | n2 | n0 | n3).
struct FixHeibergerForm {
  Matrix w0;
  Index n0 = 0, n1 = 0, n2 = 0, n3 = 0;
  Vector sigma;    // n0 positive coupling values
  Vector lambda2;  // n2 nonzero values
};

struct CanonicalForm {
  Matrix w;
  Index n0 = 0, n1 = 0, n2 = 0, n3 = 0;
  Vector lambda1;
  Vector lambda2;
  bool has_coupling = false;

  Index size() const { return w.rows(); }
  Index offset_n1() const { return 2 * n0; }
  Index offset_n2() const { return 2 * n0 + n1; }
  Index offset_n3() const { return 2 * n0 + n1 + n2; }

  /// Expected W^T A W and W^T B W.
  Matrix a_block() const;
  Matrix b_block() const;
};

FixHeibergerForm fix_heiberger_reduce(const Matrix& a, const Matrix& b, double rank_tol = 1e-10);
CanonicalForm reduce(const Matrix& a, const Matrix& b, double rank_tol = 1e-10);

/// Makes the n1 and n2 column blocks orthogonal to the n3 block. Requires
/// n0 == 0 (throws ErrorKind::Coupled otherwise).
CanonicalForm enforce_constraint(const CanonicalForm& cf);

bool is_simultaneously_diagonalizable(const CanonicalForm& cf);

struct CanonicalResidual {
  double a = 0.0;  // ||W^T A W - A-block||_F / ||A||_F
  double b = 0.0;  // ||W^T B W - B-block||_F / ||B||_F
};

CanonicalResidual canonical_residual(const CanonicalForm& cf, const Matrix& a, const Matrix& b);

struct CanonicalEigenpair {
  double lambda = 0.0;
  Vector x;
};

struct CanonicalSpectrum {
  std::vector<CanonicalEigenpair> finite;  // nonzero finite eigenvalues of K - lambda*KG
  std::vector<Index> infinite_columns;     // columns of the n1 block with zero reversed value
};

/// Eigenpairs of K - lambda*KG read off the canonical form of the reversed
/// pencil KG - lambda#*K (A = KG, B = K). Vectors are orthogonal to the
/// common nullspace.
CanonicalSpectrum eigenpairs_from_canonical(const CanonicalForm& reversed, double zero_tol = 1e-10);

/// Independent test for simultaneous diagonalizability by congruence:
/// compares nullity of Q^T A Q (Q spanning N(B)) against dim(N(A) cap N(B)),
/// both from SVDs.
bool dense_simultaneously_diagonalizable(const Matrix& a, const Matrix& b, double rank_tol = 1e-10);

struct PencilDimensions {
  Index n0 = 0, n1 = 0, n2 = 0, n3 = 0;
  friend bool operator==(const PencilDimensions&, const PencilDimensions&) = default;
};

/// Block dimensions from the rank/nullity formulas, computed with SVDs only.
PencilDimensions dimensions_from_ranks(const Matrix& a, const Matrix& b, double rank_tol = 1e-10);

}  // namespace buckle
