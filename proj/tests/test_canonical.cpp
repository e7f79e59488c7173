#include "buckle/canonical.hpp"
#include "buckle/dense_core.hpp"
#include "fixtures.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <algorithm>
#include <vector>

using namespace buckle;

namespace {

Matrix diag(std::initializer_list<double> d) {
  Vector v(static_cast<Index>(d.size()));
  Index i = 0;
  for (double x : d) v(i++) = x;
  return v.asDiagonal();
}

std::vector<double> sorted(const Vector& v) {
  std::vector<double> out(v.data(), v.data() + v.size());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v;
}

bool multiset_close(const std::vector<double>& a, const std::vector<double>& b, double tol) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i] - b[i]) > tol * std::max(1.0, std::abs(b[i]))) return false;
  }
  return true;
}

double tau_can(Index n) { return 1e-10 * static_cast<double>(n); }

void check_invariants(const CanonicalForm& cf, const Matrix& a, const Matrix& b) {
  const CanonicalResidual r = canonical_residual(cf, a, b);
  CHECK(r.a <= tau_can(a.rows()));
  CHECK(r.b <= tau_can(a.rows()));
  CHECK(cf.n0 * 2 + cf.n1 + cf.n2 + cf.n3 == a.rows());
  for (Index i = 0; i < cf.lambda2.size(); ++i) CHECK(cf.lambda2(i) != 0.0);
  const PencilDimensions d = dimensions_from_ranks(a, b);
  CHECK(d == PencilDimensions{cf.n0, cf.n1, cf.n2, cf.n3});
}

/// A = X^T blockdiag(S, L1, L2, 0) X, B = X^T blockdiag(Omega, I, 0, 0) X
/// for a random well-conditioned X.
std::pair<Matrix, Matrix> from_blocks(Index n0, const Vector& l1, const Vector& l2, Index n3,
                                      std::mt19937_64& rng) {
  const Index n1 = l1.size(), n2 = l2.size();
  const Index n = 2 * n0 + n1 + n2 + n3;
  Matrix a = Matrix::Zero(n, n), b = Matrix::Zero(n, n);
  for (Index k = 0; k < n0; ++k) {
    a(2 * k, 2 * k + 1) = a(2 * k + 1, 2 * k) = 1.0;
    b(2 * k, 2 * k) = 1.0;
  }
  for (Index k = 0; k < n1; ++k) {
    a(2 * n0 + k, 2 * n0 + k) = l1(k);
    b(2 * n0 + k, 2 * n0 + k) = 1.0;
  }
  for (Index k = 0; k < n2; ++k) a(2 * n0 + n1 + k, 2 * n0 + n1 + k) = l2(k);
  const Matrix x = random_orthogonal(n, rng()) *
                   (Matrix::Identity(n, n) + 0.2 * testutil::random_matrix(n, n, rng) / std::sqrt(double(n)));
  Matrix xa = x.transpose() * a * x, xb = x.transpose() * b * x;
  return {0.5 * (xa + xa.transpose()), 0.5 * (xb + xb.transpose())};
}

}  // namespace

TEST_SUITE("canonical") {
  TEST_CASE("fix_heiberger_reduce examples") {
    FixHeibergerForm f = fix_heiberger_reduce(diag({2, -1, 0}), diag({1, 0, 0}));
    CHECK(f.n0 == 0);
    CHECK(f.n1 == 1);
    CHECK(f.n2 == 1);
    CHECK(f.n3 == 1);
    REQUIRE(f.lambda2.size() == 1);
    CHECK(f.lambda2(0) == doctest::Approx(-1.0));

    Matrix s(2, 2);
    s << 0, 1, 1, 0;
    f = fix_heiberger_reduce(s, diag({1, 0}));
    CHECK(f.n0 == 1);
    CHECK(f.n1 + f.n2 + f.n3 == 0);
    REQUIRE(f.sigma.size() == 1);
    CHECK(f.sigma(0) == doctest::Approx(1.0));
  }

  TEST_CASE("fix_heiberger_reduce intermediate block pattern") {
    std::mt19937_64 rng(11);
    Vector l1(3), l2(2);
    l1 << 1, -2, 0.5;
    l2 << 3, -1;
    const auto [a, b] = from_blocks(2, l1, l2, 1, rng);
    const FixHeibergerForm f = fix_heiberger_reduce(a, b);
    CHECK(f.n0 == 2);
    const Matrix wb = f.w0.transpose() * b * f.w0;
    Matrix expect_b = Matrix::Zero(a.rows(), a.rows());
    expect_b.topLeftCorner(f.n0 + f.n1, f.n0 + f.n1).setIdentity();
    CHECK((wb - expect_b).norm() <= 1e-10 * b.norm());
    for (Index i = 0; i < f.sigma.size(); ++i) CHECK(f.sigma(i) > 0.0);
  }

  TEST_CASE("dimensions are congruence invariant (3x3)") {
    std::mt19937_64 rng(12);
    const Matrix a = diag({2, -1, 0}), b = diag({1, 0, 0});
    for (int t = 0; t < 10; ++t) {
      Matrix x = testutil::random_matrix(3, 3, rng) + 3.0 * Matrix::Identity(3, 3);
      const FixHeibergerForm f =
          fix_heiberger_reduce(x.transpose() * a * x, x.transpose() * b * x);
      CHECK(f.n0 == 0);
      CHECK(f.n1 == 1);
      CHECK(f.n2 == 1);
      CHECK(f.n3 == 1);
    }
  }

  TEST_CASE("not semidefinite B is rejected") {
    try {
      fix_heiberger_reduce(diag({1, 1}), diag({1, -1}));
      FAIL("no error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::NotSemidefinite);
    }
  }

  TEST_CASE("reduce examples") {
    CanonicalForm cf = reduce(diag({2, -1, 0}), diag({1, 0, 0}));
    CHECK(cf.w.cwiseAbs().isApprox(Matrix::Identity(3, 3)));
    CHECK(cf.lambda1(0) == doctest::Approx(2.0));
    CHECK(cf.lambda2(0) == doctest::Approx(-1.0));
    CHECK_FALSE(cf.has_coupling);
    check_invariants(cf, diag({2, -1, 0}), diag({1, 0, 0}));

    Matrix s(2, 2);
    s << 0, 1, 1, 0;
    cf = reduce(s, diag({1, 0}));
    CHECK(cf.n0 == 1);
    CHECK(cf.has_coupling);
    CHECK(cf.a_block().isApprox(s));
    CHECK(cf.b_block().isApprox(diag({1, 0})));
    check_invariants(cf, s, diag({1, 0}));
  }

  TEST_CASE("reduce recovers planted blocks, with and without coupling") {
    std::mt19937_64 rng(13);
    for (int t = 0; t < 12; ++t) {
      const Index n0 = t % 3, n1 = 2 + t % 4, n2 = t % 3, n3 = (t / 3) % 3;
      Vector l1(n1), l2(n2);
      for (Index i = 0; i < n1; ++i) l1(i) = (i % 2 ? -1.0 : 1.0) * (0.5 + static_cast<double>(i));
      for (Index i = 0; i < n2; ++i) l2(i) = (i % 2 ? 2.0 : -3.0) + 0.25 * static_cast<double>(i);
      const auto [a, b] = from_blocks(n0, l1, l2, n3, rng);
      const CanonicalForm cf = reduce(a, b);
      CHECK(cf.n0 == n0);
      CHECK(cf.n1 == n1);
      CHECK(cf.n2 == n2);
      CHECK(cf.n3 == n3);
      check_invariants(cf, a, b);
      CHECK(is_simultaneously_diagonalizable(cf) == (n0 == 0));
      CHECK(dense_simultaneously_diagonalizable(a, b) == (n0 == 0));
      // Lambda1 is a congruence invariant when n0 = 0 (generalized eigenvalues of the
      // B-range part); Lambda2 is only determined up to congruence, so compare inertia.
      if (n0 == 0) CHECK(multiset_close(sorted(cf.lambda1), sorted(l1), 1e-10));
      Index neg = 0, neg_cf = 0;
      for (Index i = 0; i < n2; ++i) neg += l2(i) < 0;
      for (Index i = 0; i < cf.lambda2.size(); ++i) neg_cf += cf.lambda2(i) < 0;
      CHECK(neg == neg_cf);
    }
  }

  TEST_CASE("reduce on generated buckling pencils (reversed)") {
    for (int i = 0; i < 4; ++i) {
      const auto c = fixtures::singular_case(i);
      const auto g = gen_singular(c.spec);
      const CanonicalForm cf = reduce(g.pencil.kg, g.pencil.k);
      check_invariants(cf, g.pencil.kg, g.pencil.k);
      CHECK(cf.n0 == 0);
      CHECK(cf.n1 == static_cast<Index>(c.spec.lambda1_sharp.size()));
      CHECK(cf.n2 == static_cast<Index>(c.spec.lambda2_sharp.size()));
      CHECK(cf.n3 == c.spec.n3);
      CHECK(multiset_close(sorted(cf.lambda1), sorted(c.spec.lambda1_sharp), 1e-10));
    }
  }

  TEST_CASE("enforce_constraint examples") {
    // Already orthogonal: unchanged.
    const CanonicalForm cf = reduce(diag({2, -1, 0}), diag({1, 0, 0}));
    const CanonicalForm same = enforce_constraint(cf);
    CHECK((same.w - cf.w).norm() <= 1e-15);

    // W1 = w + W3 c: projection returns w.
    CanonicalForm skew = cf;
    skew.w = Matrix::Identity(3, 3);
    skew.w(2, 0) = 0.7;
    const CanonicalForm fixed = enforce_constraint(skew);
    CHECK((fixed.w.col(0) - Vector::Unit(3, 0)).norm() <= 1e-15);

    Matrix s(2, 2);
    s << 0, 1, 1, 0;
    try {
      enforce_constraint(reduce(s, diag({1, 0})));
      FAIL("no error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Coupled);
    }
  }

  TEST_CASE("enforce_constraint on a 6x6 generated pencil") {
    const auto g = gen_singular({{0.5, -1.0, 2.0}, {1.5}, 2, 77, false});
    const Matrix& k = g.pencil.k;
    const Matrix& kg = g.pencil.kg;
    const CanonicalForm cf = reduce(kg, k);
    const CanonicalResidual before = canonical_residual(cf, kg, k);
    const CanonicalForm ec = enforce_constraint(cf);
    const CanonicalResidual after = canonical_residual(ec, kg, k);
    const Matrix w3 = ec.w.rightCols(ec.n3);
    const Matrix w12 = ec.w.middleCols(ec.offset_n1(), ec.n1 + ec.n2);
    CHECK((w3.transpose() * w12).norm() <= 1e-12 * w3.norm() * w12.norm());
    CHECK(after.a <= std::max(10.0 * before.a, 1e-12));
    CHECK(after.b <= std::max(10.0 * before.b, 1e-12));
  }

  TEST_CASE("is_simultaneously_diagonalizable examples") {
    CHECK(is_simultaneously_diagonalizable(reduce(diag({2, -1, 0}), diag({1, 0, 0}))));
    Matrix s(2, 2);
    s << 0, 1, 1, 0;
    CHECK_FALSE(is_simultaneously_diagonalizable(reduce(s, diag({1, 0}))));
    CHECK(is_simultaneously_diagonalizable(reduce(fixtures::tiny().pencil.kg, fixtures::tiny().pencil.k)));
  }

  TEST_CASE("eigenpairs_from_canonical examples") {
    const CanonicalForm rev = reduce(diag({2, -1, 0}), diag({1, 0, 0}));
    const CanonicalSpectrum sp = eigenpairs_from_canonical(rev);
    REQUIRE(sp.finite.size() == 1);
    CHECK(sp.finite[0].lambda == doctest::Approx(0.5));
    CHECK(std::abs(sp.finite[0].x(0)) == doctest::Approx(1.0));
    CHECK(sp.finite[0].x.tail(2).norm() <= 1e-15);
    CHECK(sp.infinite_columns.empty());

    // Zero in Lambda1#: reported as infinite.
    const CanonicalSpectrum inf = eigenpairs_from_canonical(reduce(diag({2, 0}), diag({1, 1})));
    CHECK(inf.finite.size() == 1);
    CHECK(inf.infinite_columns.size() == 1);
  }

  TEST_CASE("eigenpairs_from_canonical recovers a planted spectrum") {
    const auto g = gen_singular({{-0.5, 2.0, 1.0 / 3.0}, {1.0}, 1, 5, false});
    const CanonicalSpectrum sp = eigenpairs_from_canonical(reduce(g.pencil.kg, g.pencil.k));
    std::vector<double> got;
    for (const auto& p : sp.finite) {
      got.push_back(p.lambda);
      const Vector r = g.pencil.k * p.x - p.lambda * g.pencil.kg * p.x;
      CHECK(r.norm() <= 1e-10 * (g.pencil.k.norm() + std::abs(p.lambda) * g.pencil.kg.norm()) * p.x.norm());
      CHECK((g.pencil.zc.transpose() * p.x).norm() <= 1e-10 * p.x.norm());
    }
    CHECK(multiset_close(sorted(got), {-2.0, 0.5, 3.0}, 1e-10));
  }

  TEST_CASE("dimension formulas agree with rank computations on random pencils") {
    std::mt19937_64 rng(14);
    for (int t = 0; t < 20; ++t) {
      Vector l1 = testutil::random_matrix(1 + t % 5, 1, rng);
      Vector l2 = testutil::random_matrix(t % 3, 1, rng).array() + 3.0;
      const auto [a, b] = from_blocks(t % 2, l1, l2, t % 4, rng);
      const CanonicalForm cf = reduce(a, b);
      CHECK(dimensions_from_ranks(a, b) == PencilDimensions{cf.n0, cf.n1, cf.n2, cf.n3});
    }
  }
}
