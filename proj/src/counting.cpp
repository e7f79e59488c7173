#include "buckle/counting.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace buckle {

CountRecord CountReport::to_record() const {
  CountRecord r;
  r.a = a;
  r.b = b;
  r.count = count;
  r.method = to_string(method);
  r.inertias = inertias_used;
  r.nu_minus_projected = projected.nminus;
  r.nu_plus_projected = projected.nplus;
  r.common_null_dim = common_null_dim;
  return r;
}

Inertia small_inertia(const Matrix& zn, const Matrix& kg, const LdltOptions& opts) {
  if (zn.cols() == 0) return {};
  const Matrix g = zn.transpose() * kg * zn;
  const LdltFactor f(0.5 * (g + g.transpose()), opts);
  if (f.singular()) {
    throw Error(ErrorKind::SingularProjectedBlock,
                "ZN^T KG ZN is singular: a ZN column lies in the common nullspace");
  }
  return f.inertia();
}

Index shifted_nu_minus(const Pencil& p, double alpha, MatvecMethod method, const LdltOptions& opts,
                       Index* raw) {
  if (alpha == 0.0) throw Error(ErrorKind::ShiftIsZero, "counting point alpha must be nonzero");
  const Matrix qc = p.zc.cols() > 0 ? orthonormalize(p.zc) : Matrix(p.size(), 0);
  const ShiftedFactor f(p.k, p.kg, alpha, qc, method, opts);
  if (f.singular()) {
    throw Error(ErrorKind::AlphaOnSpectrum,
                "alpha = " + std::to_string(alpha) + " is numerically an eigenvalue of the pencil");
  }
  if (raw) *raw = f.nu_minus();
  return f.shifted_nu_minus();
}

namespace {

struct Half {
  Index count;
  Index raw;
};

Half half(const Pencil& p, double alpha, MatvecMethod method, const LdltOptions& opts,
          const Inertia& proj) {
  Index raw = 0;
  const Index nu = shifted_nu_minus(p, alpha, method, opts, &raw);
  return {alpha < 0.0 ? nu - proj.nminus : nu - proj.nplus, raw};
}

}  // namespace

CountReport count_half_interval(const Pencil& p, double alpha, MatvecMethod method,
                                const LdltOptions& opts) {
  if (alpha == 0.0) throw Error(ErrorKind::ShiftIsZero, "counting point alpha must be nonzero");
  CountReport r;
  r.method = method;
  r.projected = small_inertia(p.zn, p.kg, opts);
  r.common_null_dim = p.zc.cols();
  const Half h = half(p, alpha, method, opts, r.projected);
  r.a = std::min(alpha, 0.0);
  r.b = std::max(alpha, 0.0);
  r.count = h.count;
  r.inertias_used.emplace_back(alpha, h.raw);
  return r;
}

CountReport count_interval(const Pencil& p, double a, double b, MatvecMethod method,
                           const LdltOptions& opts) {
  if (!(a < b)) throw Error(ErrorKind::InvalidArgument, "count_interval: need a < b");
  if (a == 0.0 || b == 0.0) {
    throw Error(ErrorKind::InvalidArgument, "count_interval: endpoints must be nonzero");
  }
  CountReport r;
  r.a = a;
  r.b = b;
  r.method = method;
  r.projected = small_inertia(p.zn, p.kg, opts);
  r.common_null_dim = p.zc.cols();
  const Half ha = half(p, a, method, opts, r.projected);
  const Half hb = half(p, b, method, opts, r.projected);
  r.inertias_used = {{a, ha.raw}, {b, hb.raw}};
  if (a < 0.0 && b > 0.0) {
    r.count = ha.count + hb.count;
  } else if (a > 0.0) {
    r.count = hb.count - ha.count;
  } else {
    r.count = ha.count - hb.count;
  }
  return r;
}

std::string Verdict::status_name() const {
  switch (status) {
    case VerdictStatus::Match: return "MATCH";
    case VerdictStatus::Missing: return "MISSING";
    case VerdictStatus::Surplus: return "SURPLUS";
  }
  return "UNKNOWN";
}

std::string Verdict::label() const {
  if (status == VerdictStatus::Match) return "MATCH";
  return status_name() + "(" + std::to_string(delta) + ")";
}

Verdict validate(const CountReport& count, const std::vector<double>& lambdas,
                 const std::vector<Vector>& vectors, double cluster_rel, double rank_tol) {
  if (!vectors.empty() && vectors.size() != lambdas.size()) {
    throw Error(ErrorKind::Dimension, "validate: lambdas and vectors differ in length");
  }
  std::vector<size_t> idx;
  for (size_t i = 0; i < lambdas.size(); ++i) {
    if (lambdas[i] > count.a && lambdas[i] < count.b) idx.push_back(i);
  }
  std::sort(idx.begin(), idx.end(), [&](size_t x, size_t y) { return lambdas[x] < lambdas[y]; });
  const double tau = cluster_rel * std::max(std::abs(count.a), std::abs(count.b));

  Index found = 0;
  size_t start = 0;
  while (start < idx.size()) {
    size_t end = start + 1;
    while (end < idx.size() && lambdas[idx[end]] - lambdas[idx[end - 1]] <= tau) ++end;
    if (vectors.empty()) {
      found += 1;
    } else {
      Matrix x(vectors[idx[start]].size(), static_cast<Index>(end - start));
      for (size_t c = start; c < end; ++c) {
        const Vector& v = vectors[idx[c]];
        x.col(static_cast<Index>(c - start)) = v / v.norm();
      }
      found += numerical_rank(x, rank_tol);
    }
    start = end;
  }

  Verdict v;
  v.found = found;
  v.expected = count.count;
  if (found == count.count) {
    v.status = VerdictStatus::Match;
  } else if (found < count.count) {
    v.status = VerdictStatus::Missing;
    v.delta = count.count - found;
  } else {
    v.status = VerdictStatus::Surplus;
    v.delta = found - count.count;
  }
  return v;
}

}  // namespace buckle
