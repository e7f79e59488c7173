#include "buckle/lanczos.hpp"

#include "buckle/dense_core.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace buckle {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

}  // namespace

const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::Converged: return "converged";
    case StopReason::IterationLimit: return "iteration_limit";
    case StopReason::Breakdown: return "breakdown";
    case StopReason::Exhausted: return "exhausted";
  }
  return "unknown";
}

LanczosProcess::LanczosProcess(LinearMap c, LinearMap m, Index n, NormPolicy policy,
                               Matrix flush_basis)
    : c_(std::move(c)),
      m_(std::move(m)),
      n_(n),
      policy_(policy),
      flush_(std::move(flush_basis)),
      alpha_(Vector::Zero(0)),
      beta_(Vector::Zero(1)),
      r_(Vector::Zero(n)) {
  if (flush_.size() == 0) flush_ = Matrix(n, 0);
}

void LanczosProcess::grow() {
  const Index cap = v_.cols();
  if (j_ < cap) return;
  const Index next = std::max<Index>(8, 2 * cap);
  v_.conservativeResize(n_, next);
  mv_.conservativeResize(n_, next);
  cv_.conservativeResize(n_, next);
  alpha_.conservativeResize(next);
  beta_.conservativeResize(next + 1);
}

double LanczosProcess::m_norm_sq(const Vector& r, Vector& p) {
  p = m_(r);
  double ptr = p.dot(r);
  if (ptr >= 0.0) return ptr;
  if (policy_ == NormPolicy::Strict) {
    throw Error(ErrorKind::NonpositiveNorm,
                "p^T r = " + std::to_string(ptr) + " < 0 at step " + std::to_string(j_) +
                    ": the inner product matrix is not positive definite");
  }
  events_.push_back({j_, ptr, false});
  return -ptr;
}

bool LanczosProcess::start(const Vector& x0) {
  if (x0.size() != n_) throw Error(ErrorKind::Dimension, "lanczos: start vector has wrong length");
  if (x0.norm() == 0.0) throw Error(ErrorKind::InvalidArgument, "lanczos: zero start vector");
  Vector x = x0;
  const double xm = x.dot(m_(x));
  x /= xm > 0.0 ? std::sqrt(xm) : x.norm();
  j_ = 0;
  events_.clear();
  r_ = c_(x);
  beta_.setZero(1);
  beta_(0) = std::sqrt(m_norm_sq(r_, p_));
  return beta_(0) > breakdown_threshold();
}

bool LanczosProcess::step() {
  if (beta_(j_) <= 0.0) throw Error(ErrorKind::InvalidArgument, "lanczos: step after breakdown");
  grow();
  const double bprev = beta_(j_);
  v_.col(j_) = r_ / bprev;
  mv_.col(j_) = p_ / bprev;
  cv_.col(j_) = c_(v_.col(j_));

  r_ = cv_.col(j_);
  if (j_ > 0) r_ -= bprev * v_.col(j_ - 1);
  p_ = m_(r_);
  double alpha = v_.col(j_).dot(p_);
  r_ -= alpha * v_.col(j_);

  // Two passes of classical Gram-Schmidt in the M-inner product.
  for (int pass = 0; pass < 2; ++pass) {
    const Vector h = mv_.leftCols(j_ + 1).transpose() * r_;
    r_ -= v_.leftCols(j_ + 1) * h;
    alpha += h(j_);
  }
  alpha_(j_) = alpha;

  double ptr = m_norm_sq(r_, p_);
  if (policy_ == NormPolicy::Tolerate && ptr < kEps * r_.squaredNorm() && flush_.cols() > 0) {
    r_ -= flush_ * (flush_.transpose() * r_);
    ptr = m_norm_sq(r_, p_);
    if (!events_.empty() && events_.back().step == j_) {
      events_.back().flushed = true;
    } else {
      events_.push_back({j_, ptr, true});
    }
  }
  ++j_;
  beta_(j_) = std::sqrt(ptr);
  return beta_(j_) > breakdown_threshold();
}

Matrix LanczosProcess::tridiagonal() const {
  Matrix t = Matrix::Zero(j_, j_);
  for (Index i = 0; i < j_; ++i) {
    t(i, i) = alpha_(i);
    if (i + 1 < j_) t(i, i + 1) = t(i + 1, i) = beta_(i + 1);
  }
  return t;
}

double LanczosProcess::tnorm() const {
  if (j_ == 0) return 0.0;
  return sym_tridiag_eig(alphas(), offdiag()).values.cwiseAbs().maxCoeff();
}

double LanczosProcess::breakdown_threshold() const {
  return std::sqrt(kEps) * std::max(1.0, tnorm());
}

double LanczosProcess::orthogonality() const {
  if (j_ == 0) return 0.0;
  Matrix mv(n_, j_);
  for (Index i = 0; i < j_; ++i) mv.col(i) = m_(v_.col(i));
  return (v_.leftCols(j_).transpose() * mv - Matrix::Identity(j_, j_)).norm();
}

double LanczosProcess::governing_residual() const {
  if (j_ == 0) return 0.0;
  Matrix e = cv_.leftCols(j_) - v_.leftCols(j_) * tridiagonal();
  e.col(j_ - 1) -= r_;
  return e.norm();
}

Checkpoint LanczosProcess::checkpoint() const {
  return {j_, orthogonality(), governing_residual(), tnorm()};
}

void LanczosProcess::restart(double shift) {
  if (j_ < 2) throw Error(ErrorKind::InvalidArgument, "restart needs at least two Lanczos steps");
  const Index k = j_;
  const Matrix t = tridiagonal();
  Eigen::HouseholderQR<Matrix> qr(t - shift * Matrix::Identity(k, k));
  const Matrix q = qr.householderQ() * Matrix::Identity(k, k);
  const Matrix tp = q.transpose() * t * q;

  const Matrix v = v_.leftCols(k) * q;
  const Matrix mv = mv_.leftCols(k) * q;
  const Matrix cv = cv_.leftCols(k) * q;
  // C V+ = V+ T+ + r e_k^T Q; keeping k-1 columns folds the last one into
  // the new residual.
  const Vector r = v.col(k - 1) * tp(k - 1, k - 2) + r_ * q(k - 1, k - 2);

  v_.leftCols(k - 1) = v.leftCols(k - 1);
  mv_.leftCols(k - 1) = mv.leftCols(k - 1);
  cv_.leftCols(k - 1) = cv.leftCols(k - 1);
  for (Index i = 0; i < k - 1; ++i) {
    alpha_(i) = tp(i, i);
    if (i + 1 < k - 1) beta_(i + 1) = tp(i + 1, i);
  }
  j_ = k - 1;
  r_ = r;
  beta_(j_) = std::sqrt(m_norm_sq(r_, p_));
}

Vector random_start(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Vector x(n);
  for (Index i = 0; i < n; ++i) x(i) = g(rng);
  return x;
}

double residual_eta(const Matrix& k, const Matrix& kg, double k1, double kg1, double lambda,
                    const Vector& x) {
  const double denom = (k1 + std::abs(lambda) * kg1) * x.norm();
  if (denom == 0.0) return 0.0;
  return (k * x - lambda * (kg * x)).norm() / denom;
}

double residual_eta(const Matrix& k, const Matrix& kg, double lambda, const Vector& x) {
  return residual_eta(k, kg, norm1(k), norm1(kg), lambda, x);
}

double angle_to_nullspace(const Vector& x, const Matrix& qc) {
  if (qc.cols() == 0) return 0.0;
  const double xn = x.norm();
  return xn == 0.0 ? 0.0 : (qc.transpose() * x).norm() / xn;
}

std::vector<RitzPair> ritz_extract(const LanczosProcess& state, const ShiftInvertOperator& op,
                                   double tol, bool all_metrics) {
  std::vector<RitzPair> out;
  const Index j = state.steps();
  if (j == 0) return out;
  const SymEig e = sym_tridiag_eig(state.alphas(), state.offdiag());
  const double sigma = op.sigma();
  const double bj = state.last_beta();
  const double k1 = norm1(op.k()), kg1 = norm1(op.kg());
  const Matrix v = state.basis();
  for (Index i = 0; i < j; ++i) {
    const double mu = e.values(i);
    if (std::abs(mu) < tol || mu == 1.0) continue;
    RitzPair rp;
    rp.mu = mu;
    rp.lambda = mu_to_lambda(mu, sigma);
    rp.errbound = std::abs(sigma) / ((mu - 1.0) * (mu - 1.0)) * bj * std::abs(e.vectors(j - 1, i));
    rp.converged = rp.errbound < tol;
    if (rp.converged || all_metrics) {
      rp.x = v * e.vectors.col(i);
      rp.eta = residual_eta(op.k(), op.kg(), k1, kg1, rp.lambda, rp.x);
      rp.cos_angle = angle_to_nullspace(rp.x, op.zc_ortho());
    }
    out.push_back(std::move(rp));
  }
  return out;
}

namespace {

bool in_open(double x, const std::pair<double, double>& iv) { return x > iv.first && x < iv.second; }

/// Converged pairs relevant to the request, nearest to the shift first.
std::vector<RitzPair> select(std::vector<RitzPair> pairs, const LanczosOptions& opts,
                             double sigma) {
  std::vector<RitzPair> conv;
  for (auto& p : pairs) {
    if (!p.converged) continue;
    if (opts.interval && !in_open(p.lambda, *opts.interval)) continue;
    conv.push_back(std::move(p));
  }
  std::stable_sort(conv.begin(), conv.end(), [sigma](const RitzPair& a, const RitzPair& b) {
    return std::abs(a.lambda - sigma) < std::abs(b.lambda - sigma);
  });
  if (!opts.interval && static_cast<Index>(conv.size()) > opts.nev) {
    conv.resize(static_cast<size_t>(opts.nev));
  }
  return conv;
}

}  // namespace

LanczosResult run(const ShiftInvertOperator& op, const RegularizedInnerProduct& m,
                  const Vector& x0, const LanczosOptions& opts) {
  if (opts.tol <= 0.0) throw Error(ErrorKind::InvalidArgument, "lanczos: tol must be positive");
  if (opts.maxit < 1) throw Error(ErrorKind::InvalidArgument, "lanczos: maxit must be >= 1");
  if (!opts.interval && opts.nev < 1) throw Error(ErrorKind::InvalidArgument, "lanczos: nev must be >= 1");
  if (m.size() != op.size()) throw Error(ErrorKind::Dimension, "lanczos: operator and M differ in size");

  LanczosProcess proc([&op](const Vector& v) { return op.apply(v); },
                      [&m](const Vector& v) { return m.apply(v); }, op.size());
  LanczosResult res;
  const Index n = op.size();
  const Index want = opts.interval ? opts.expected : opts.nev;

  if (!proc.start(x0)) {
    res.stop = StopReason::Breakdown;
    res.request_met = want == 0;
    return res;
  }
  std::vector<RitzPair> selected;
  while (true) {
    const bool ok = proc.step();
    const Index j = proc.steps();
    std::vector<RitzPair> pairs = ritz_extract(proc, op, opts.tol);
    const Index nconv = std::count_if(pairs.begin(), pairs.end(),
                                      [](const RitzPair& p) { return p.converged; });
    res.trace.push_back({j, proc.basis().col(j - 1).norm(), proc.last_beta(), nconv});
    if (opts.checkpoints) res.checkpoints.push_back(proc.checkpoint());
    selected = select(std::move(pairs), opts, op.sigma());

    const bool met = static_cast<Index>(selected.size()) >= want;
    if (met) {
      res.stop = StopReason::Converged;
    } else if (!ok) {
      res.stop = StopReason::Breakdown;
    } else if (j >= n) {
      res.stop = StopReason::Exhausted;
    } else if (j >= opts.maxit) {
      res.stop = StopReason::IterationLimit;
    } else {
      continue;
    }
    res.request_met = met;
    break;
  }
  res.iterations = proc.steps();
  res.orthogonality = proc.orthogonality();
  res.pairs = std::move(selected);
  return res;
}

}  // namespace buckle
