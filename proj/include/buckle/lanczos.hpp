#pragma once

#include "buckle/common.hpp"
#include "buckle/transform.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace buckle {

using LinearMap = std::function<Vector(const Vector&)>;

/// What to do when p^T r comes out negative (M not positive definite).
enum class NormPolicy {
  Strict,    // throw ErrorKind::NonpositiveNorm
  Tolerate,  // record the event and continue with |p^T r|
};

enum class StopReason { Converged, IterationLimit, Breakdown, Exhausted };
const char* to_string(StopReason r);

struct Checkpoint {
  Index step = 0;
  double orthogonality = 0.0;  // ||V^T M V - I||_F
  double governing = 0.0;      // ||C V - V T - r e_j^T||_F
  double tnorm = 0.0;          // ||T_j||_2
};

struct NormEvent {
  Index step = 0;
  double ptr = 0.0;  // the offending p^T r
  bool flushed = false;
};

/// Lanczos three-term recurrence in the inner product <x, y> = x^T M y with
/// full reorthogonalization (two classical Gram-Schmidt passes against the
/// cached M v_i). Exposed step by step so that callers can interleave
/// restarts or their own stopping logic.
class LanczosProcess {
 public:
  /// `flush_basis` (orthonormal columns, may be empty) is used only under
  /// NormPolicy::Tolerate: when |p^T r| falls below machine precision the
  /// residual is projected off it.
  LanczosProcess(LinearMap c, LinearMap m, Index n, NormPolicy policy = NormPolicy::Strict,
                 Matrix flush_basis = Matrix());

  /// r <- C x0 with x0 scaled to unit M-norm. Returns false on immediate
  /// breakdown (C x0 numerically zero).
  bool start(const Vector& x0);

  /// One iteration: appends v_j, alpha_j, beta_j. Returns false when beta_j
  /// signals an invariant subspace.
  bool step();

  /// Single-shift implicit restart: one QR step of T_j - shift*I, drops the
  /// last vector. Requires steps() >= 2.
  void restart(double shift);

  Index size() const { return n_; }
  Index steps() const { return j_; }
  /// n x j matrix of Lanczos vectors v_1..v_j.
  Matrix basis() const { return v_.leftCols(j_); }
  Vector alphas() const { return alpha_.head(j_); }
  /// beta_1..beta_{j-1} (off-diagonal of T_j).
  Vector offdiag() const { return beta_.segment(1, j_ > 0 ? j_ - 1 : 0); }
  double beta0() const { return beta_(0); }
  /// beta_j of the latest step.
  double last_beta() const { return beta_(j_); }
  /// Unnormalized residual r = beta_j v_{j+1}.
  const Vector& residual() const { return r_; }
  Matrix tridiagonal() const;
  double tnorm() const;
  double breakdown_threshold() const;
  const std::vector<NormEvent>& norm_events() const { return events_; }

  /// Recomputes M V with fresh applications of M.
  double orthogonality() const;
  double governing_residual() const;
  Checkpoint checkpoint() const;

 private:
  void grow();
  double m_norm_sq(const Vector& r, Vector& p);

  LinearMap c_;
  LinearMap m_;
  Index n_;
  NormPolicy policy_;
  Matrix flush_;
  Index j_ = 0;
  Matrix v_;    // columns v_1..v_j
  Matrix mv_;   // cached M v_i
  Matrix cv_;   // cached C v_i
  Vector alpha_;
  Vector beta_;  // beta_(0) = beta_0, beta_(i) = beta_i
  Vector r_;
  Vector p_;
  std::vector<NormEvent> events_;
};

struct RitzPair {
  double mu = 0.0;
  double lambda = 0.0;
  Vector x;
  double eta = 0.0;
  double cos_angle = 0.0;
  double errbound = 0.0;
  bool converged = false;
};

struct TraceEntry {
  Index step = 0;
  double vnorm = 0.0;
  double beta = 0.0;
  Index nconv = 0;
};

struct LanczosOptions {
  double tol = 1e-6;
  Index maxit = 300;
  Index nev = 1;
  /// Interval mode: stop once `expected` converged eigenvalues lie in (a, b).
  std::optional<std::pair<double, double>> interval;
  Index expected = 0;
  std::uint64_t seed = 0;
  bool checkpoints = true;
};

struct LanczosResult {
  std::vector<RitzPair> pairs;  // converged, selected for the request
  Index iterations = 0;
  StopReason stop = StopReason::IterationLimit;
  double orthogonality = 0.0;
  std::vector<Checkpoint> checkpoints;
  std::vector<TraceEntry> trace;
  bool request_met = false;
};

/// Seeded standard Gaussian vector.
Vector random_start(Index n, std::uint64_t seed);

/// Shift-invert Lanczos on C = (K - sigma KG)^+ K in the M-inner product.
LanczosResult run(const ShiftInvertOperator& op, const RegularizedInnerProduct& m,
                  const Vector& x0, const LanczosOptions& opts);

double residual_eta(const Matrix& k, const Matrix& kg, double lambda, const Vector& x);
/// Same with the matrix 1-norms supplied by the caller.
double residual_eta(const Matrix& k, const Matrix& kg, double k1, double kg1, double lambda,
                    const Vector& x);

/// cos of the angle between x and span(qc); qc orthonormal.
double angle_to_nullspace(const Vector& x, const Matrix& qc);

/// Ritz pairs of the current T_j. Pairs with |mu| < tol form the zero class
/// and are dropped; converged pairs (or all pairs, with `all_metrics`) get
/// the Ritz vector, eta and the nullspace angle.
std::vector<RitzPair> ritz_extract(const LanczosProcess& state, const ShiftInvertOperator& op,
                                   double tol, bool all_metrics = false);

}  // namespace buckle
