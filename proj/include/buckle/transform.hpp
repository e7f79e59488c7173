#pragma once

#include "buckle/common.hpp"
#include "buckle/dense_core.hpp"

#include <memory>
#include <vector>

namespace buckle {

enum class MatvecMethod { Augmented, Reduced };

const char* to_string(MatvecMethod m);
MatvecMethod parse_method(const std::string& s);

struct ApplyResult {
  Vector u;
  /// Method 1: norm of the multiplier block of the augmented solution
  /// (zero in exact arithmetic). Method 2: norm of the projected-out part.
  double aux_norm = 0.0;
};

/// Shifted factorization of K - sigma*KG made nonsingular using the common
/// nullspace basis, either bordered (augmented) or by dropping n3 rows
/// and columns (reduced). Counting and the shift-invert operator both use
/// it.
class ShiftedFactor {
 public:
  ShiftedFactor(const Matrix& k, const Matrix& kg, double sigma, const Matrix& zc_ortho,
                MatvecMethod method, const LdltOptions& opts = {});

  MatvecMethod method() const { return method_; }
  double sigma() const { return sigma_; }
  const LdltFactor& factor() const { return factor_; }
  /// nu_minus of the factored matrix (A_sigma or S11).
  Index nu_minus() const { return factor_.inertia().nminus; }
  /// nu_minus(K - sigma*KG) recovered from the factored matrix.
  Index shifted_nu_minus() const;
  bool singular() const { return factor_.singular(); }

  /// Indices of K - sigma*KG kept in S11 followed by the n3 dropped ones.
  const std::vector<Index>& permutation() const { return perm_; }
  Index common_null_dim() const { return n3_; }

  /// Solves (K - sigma*KG) u = rhs, Z_C^T u = 0 for rhs in range(K - sigma*KG).
  ApplyResult solve_constrained(const Vector& rhs) const;

 private:
  MatvecMethod method_;
  double sigma_;
  Index n_ = 0;
  Index n3_ = 0;
  double border_scale_ = 1.0;
  Matrix qc_;
  std::vector<Index> perm_;
  LdltFactor factor_;
};

/// Row selection for the reduced method: column-pivoted QR on Z_C^T picks
/// the n3 rows forming a well-conditioned Y2. Returns the permutation with
/// those rows last (other rows in their original order). Throws
/// PermutationFailure if Y2 is numerically singular.
std::vector<Index> select_reduced_permutation(const Matrix& zc, double tol = 1e-10);

/// u = (K - sigma*KG)^+ K v.
class ShiftInvertOperator {
 public:
  ShiftInvertOperator(Matrix k, Matrix kg, double sigma, const Matrix& zc, MatvecMethod method,
                      const LdltOptions& opts = {});

  Index size() const { return k_.rows(); }
  double sigma() const { return factor_.sigma(); }
  MatvecMethod method() const { return factor_.method(); }
  Index inertia_neg() const { return factor_.nu_minus(); }
  double min_pivot() const { return factor_.factor().min_pivot_magnitude(); }
  const Matrix& zc_ortho() const { return qc_; }
  const Matrix& k() const { return k_; }
  const Matrix& kg() const { return kg_; }
  const ShiftedFactor& shifted() const { return factor_; }

  Vector apply(const Vector& v) const { return apply_with_diagnostics(v).u; }
  ApplyResult apply_with_diagnostics(const Vector& v) const;

 private:
  Matrix k_;
  Matrix kg_;
  Matrix qc_;
  ShiftedFactor factor_;
};

ShiftInvertOperator build_method1(const Matrix& k, const Matrix& kg, double sigma,
                                  const Matrix& zc, const LdltOptions& opts = {});
ShiftInvertOperator build_method2(const Matrix& k, const Matrix& kg, double sigma,
                                  const Matrix& zc, const LdltOptions& opts = {});
Vector apply(const ShiftInvertOperator& op, const Vector& v);

/// x -> K x + U_N H_N U_N^T x + Z_C H_C Z_C^T x with U_N = KG Z_N,
/// applied without forming the matrix.
class RegularizedInnerProduct {
 public:
  RegularizedInnerProduct(Matrix k, const Matrix& kg, const Matrix& zn, Matrix zc, Matrix hn,
                          Matrix hc);
  /// K alone (semi-inner product when K is singular).
  static RegularizedInnerProduct plain(Matrix k);

  Index size() const { return k_.rows(); }
  Vector apply(const Vector& x) const;
  /// Dense M, for tests and diagnostics.
  Matrix dense() const;

 private:
  Matrix k_;
  Matrix un_;
  Matrix hn_;
  Matrix zc_;
  Matrix hc_;
};

Vector m_apply(const RegularizedInnerProduct& m, const Vector& x);

struct Scaling {
  Matrix hn;
  Matrix hc;
};

/// H_N = ||K||_1 diag(1 / ||(KG Z_N)_i||^2), H_C = ||K||_1 I.
Scaling default_scaling(const Matrix& k, const Matrix& kg, const Matrix& zn, const Matrix& zc);

double mu_to_lambda(double mu, double sigma);
double lambda_to_mu(double lambda, double sigma);

}  // namespace buckle
