#pragma once

#include "buckle/common.hpp"
#include "buckle/lanczos.hpp"
#include "buckle/matio.hpp"
#include "buckle/pencil.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace buckle {

struct TruthPair {
  double lambda = 0.0;
  Vector x;
};

struct GeneratedPencil {
  Pencil pencil;
  std::vector<TruthPair> truth;  // finite nonzero eigenpairs, ascending lambda
  Index infinite_count = 0;      // n2: columns of Z_N (infinite class of KG - lambda# K)
  Index common_null_dim = 0;     // n3
  std::uint64_t seed = 0;

  ProblemBundle bundle() const { return pencil.to_bundle(); }
  std::vector<double> truth_lambdas() const;
};

/// Random orthogonal matrix from the QR factorization of a seeded Gaussian
/// matrix, with the signs fixed so that R has a positive diagonal.
Matrix random_orthogonal(Index n, std::uint64_t seed);

/// K = Q Lambda Q^T, KG = Q Phi Q^T with Lambda_kk = k (k <= n - m, else 0)
/// and Phi_kk = (-1)^k. Regular pencil; Z_N = last m columns of Q.
GeneratedPencil gen_example1(Index n, Index m, std::uint64_t seed);

struct SingularSpec {
  std::vector<double> lambda1_sharp;  // n1 values; zeros give infinite eigenvalues
  std::vector<double> lambda2_sharp;  // n2 nonzero values
  Index n3 = 0;
  std::uint64_t seed = 0;
  bool identity_w = false;
};

/// K = W^-T diag(I, 0, 0) W^-1 and KG = W^-T diag(Lambda1#, Lambda2#, 0) W^-1
/// for W = Q1 (I + 0.1 R) Q2 (||R||_2 <= 1), with the first n1 + n2 columns
/// of W made orthogonal to the last n3. Truth: lambda = 1 / lambda1#.
GeneratedPencil gen_singular(const SingularSpec& spec);

enum class InnerKind { K, M };

struct DemoOptions {
  Index n = 500;
  Index m = 1;
  double sigma = -0.6;
  Index steps = 40;
  InnerKind inner = InnerKind::M;
  std::optional<Index> restart;  // restart after this many steps
  std::uint64_t seed = 1;
  double tol = 1e-6;
};

struct DemoResult {
  std::vector<TraceRow> trace;     // one row per Lanczos step
  std::vector<RitzPair> ritz;      // every nonzero-class Ritz pair at the end, with eta
  std::vector<NormEvent> events;   // negative or vanishing p^T r
  std::vector<Checkpoint> checkpoints;
  std::optional<double> restart_shift;
  double max_vnorm = 0.0;
};

/// Lanczos on the gen_example1 pencil with either the K semi-inner
/// product or the regularized M-inner product (H_N = I), started from
/// C * ones.
DemoResult demo_norm_growth(const DemoOptions& opts);

}  // namespace buckle
