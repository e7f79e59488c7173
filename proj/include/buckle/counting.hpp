#pragma once

#include "buckle/common.hpp"
#include "buckle/dense_core.hpp"
#include "buckle/pencil.hpp"
#include "buckle/report.hpp"
#include "buckle/transform.hpp"

#include <string>
#include <utility>
#include <vector>

namespace buckle {

/// Number of finite nonzero eigenvalues of K - lambda*KG in (a, b), with
/// the inertias it was assembled from.
struct CountReport {
  double a = 0.0;
  double b = 0.0;
  Index count = 0;
  MatvecMethod method = MatvecMethod::Augmented;
  /// (alpha, nu_minus of the factored matrix: A_alpha or S11^alpha)
  std::vector<std::pair<double, Index>> inertias_used;
  Inertia projected;  // of ZN^T KG ZN
  Index common_null_dim = 0;

  CountRecord to_record() const;
};

/// Inertia of ZN^T KG ZN. Throws SingularProjectedBlock when it is
/// singular, which means the bases are inconsistent with the pencil.
Inertia small_inertia(const Matrix& zn, const Matrix& kg, const LdltOptions& opts = {});

/// nu_minus(K - alpha*KG) read off the bordered or reduced factorization.
/// `raw` receives nu_minus of the factored matrix itself.
Index shifted_nu_minus(const Pencil& p, double alpha, MatvecMethod method,
                       const LdltOptions& opts = {}, Index* raw = nullptr);

/// alpha < 0: eigenvalues in (alpha, 0). alpha > 0: eigenvalues in (0, alpha).
CountReport count_half_interval(const Pencil& p, double alpha, MatvecMethod method,
                                const LdltOptions& opts = {});

CountReport count_interval(const Pencil& p, double a, double b, MatvecMethod method,
                           const LdltOptions& opts = {});

enum class VerdictStatus { Match, Missing, Surplus };

struct Verdict {
  VerdictStatus status = VerdictStatus::Match;
  Index delta = 0;     // k in MISSING(k) / SURPLUS(k)
  Index found = 0;     // eigenvalues accounted for by the supplied pairs
  Index expected = 0;  // the count

  std::string status_name() const;  // MATCH | MISSING | SURPLUS
  std::string label() const;        // e.g. MISSING(2)
};

/// Compares converged eigenvalues in (a, b) against the count. Values within
/// cluster_rel * max(|a|, |b|) of each other form one cluster; a cluster
/// counts as many eigenvalues as its vectors have numerical rank (so a
/// repeated copy of one eigenvector is counted once). Without vectors each
/// cluster counts once.
Verdict validate(const CountReport& count, const std::vector<double>& lambdas,
                 const std::vector<Vector>& vectors = {}, double cluster_rel = 1e-8,
                 double rank_tol = 1e-6);

}  // namespace buckle
