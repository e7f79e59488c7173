#pragma once

#include "buckle/problems.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace fixtures {

using buckle::Index;

/// The tiny pencil K = diag(1,0,0), KG = diag(2,-1,0), Z_N = e2, Z_C = e3.
inline buckle::GeneratedPencil tiny() {
  return buckle::gen_singular({{2.0}, {-1.0}, 1, 0, true});
}

struct SingularCase {
  buckle::SingularSpec spec;
  double sigma = 1.0;
};

/// Member i of the seeded family of singular pencils used by the oracle
/// checks: n <= 200, n3 cycling through 1..3, planted eigenvalues with
/// random sign and magnitude in [0.5, 100], and a zero in Lambda1# (one
/// infinite eigenvalue) for odd i.
inline SingularCase singular_case(int i) {
  std::mt19937_64 rng(7000 + static_cast<std::uint64_t>(i));
  std::uniform_real_distribution<double> logmag(std::log(0.5), std::log(100.0));
  std::uniform_int_distribution<int> coin(0, 1);
  const Index n1 = 40 + 7 * i;
  const Index n2 = 2 + i % 4;
  SingularCase c;
  c.spec.n3 = 1 + i % 3;
  c.spec.seed = 1000 + static_cast<std::uint64_t>(i);
  std::vector<double> lambdas;
  while (static_cast<Index>(lambdas.size()) < n1) {
    const double l = (coin(rng) ? 1.0 : -1.0) * std::exp(logmag(rng));
    bool separated = true;
    for (double m : lambdas) separated = separated && std::abs(l - m) > 1e-3 * std::abs(l);
    if (separated) lambdas.push_back(l);
  }
  for (double l : lambdas) c.spec.lambda1_sharp.push_back(1.0 / l);
  if (i % 2 == 1) c.spec.lambda1_sharp.back() = 0.0;
  for (Index k = 0; k < n2; ++k) {
    c.spec.lambda2_sharp.push_back((k % 2 ? -1.0 : 1.0) * (0.5 + static_cast<double>(k)));
  }
  // Shift halfway between the two planted eigenvalues closest to 1.3.
  std::vector<double> finite;
  for (double s : c.spec.lambda1_sharp) {
    if (s != 0.0) finite.push_back(1.0 / s);
  }
  std::sort(finite.begin(), finite.end(),
            [](double a, double b) { return std::abs(a - 1.3) < std::abs(b - 1.3); });
  c.sigma = 0.5 * (finite[0] + finite[1]);
  if (c.sigma == 0.0) c.sigma = 0.5 * (finite[0] + finite[2]);
  return c;
}

/// Random interval with nonzero endpoints at least `gap` away from every
/// value in `spectrum`.
inline std::pair<double, double> random_interval(std::mt19937_64& rng,
                                                 const std::vector<double>& spectrum,
                                                 double gap = 1e-6) {
  std::uniform_real_distribution<double> u(-120.0, 120.0);
  auto ok = [&](double x) {
    if (std::abs(x) < gap) return false;
    for (double l : spectrum) {
      if (std::abs(x - l) < gap) return false;
    }
    return true;
  };
  while (true) {
    double a = u(rng), b = u(rng);
    if (a > b) std::swap(a, b);
    if (b - a > 1e-3 && ok(a) && ok(b)) return {a, b};
  }
}

inline Index brute_force_count(const std::vector<double>& spectrum, double a, double b) {
  return std::count_if(spectrum.begin(), spectrum.end(),
                       [&](double l) { return l > a && l < b; });
}

}  // namespace fixtures
