#include "buckle/canonical.hpp"
#include "buckle/lanczos.hpp"
#include "buckle/transform.hpp"
#include "fixtures.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

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

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::Io;
}

struct Tiny {
  Matrix k = diag({1, 0, 0});
  Matrix kg = diag({2, -1, 0});
  Matrix zn = Vector::Unit(3, 1);
  Matrix zc = Vector::Unit(3, 2);
};

void check_contract(const ShiftInvertOperator& op, const Vector& v) {
  const Vector u = op.apply(v);
  const double scale = norm1(op.k()) + std::abs(op.sigma()) * norm1(op.kg());
  const Vector r = (op.k() - op.sigma() * op.kg()) * u - op.k() * v;
  CHECK(r.norm() <= 1e-10 * scale * std::max(v.norm(), u.norm()));
  CHECK((op.zc_ortho().transpose() * u).norm() <= 1e-10 * std::max(u.norm(), 1e-300));
}

}  // namespace

TEST_SUITE("transform") {
  TEST_CASE("method 1 inertia and singular shift on the tiny pencil") {
    const Tiny t;
    const ShiftInvertOperator op = build_method1(t.k, t.kg, 1.0, t.zc);
    CHECK(op.shifted().factor().size() == 4);
    CHECK(op.inertia_neg() == 2);
    CHECK(op.shifted().shifted_nu_minus() == 1);
    CHECK(kind_of([&] { build_method1(t.k, t.kg, 0.5, t.zc); }) == ErrorKind::SingularShift);
    CHECK(kind_of([&] { build_method1(t.k, t.kg, 0.0, t.zc); }) == ErrorKind::ShiftIsZero);
    CHECK(kind_of([&] { build_method2(t.k, t.kg, 0.5, t.zc); }) == ErrorKind::SingularShift);
  }

  TEST_CASE("method 1 with empty Z_C is a plain factorization") {
    std::mt19937_64 rng(30);
    const Matrix k = testutil::random_spd(12, rng), kg = testutil::random_symmetric(12, rng);
    const double sigma = 2.5;
    const ShiftInvertOperator op = build_method1(k, kg, sigma, Matrix(12, 0));
    CHECK(op.shifted().factor().size() == 12);
    CHECK(op.inertia_neg() == ldlt(k - sigma * kg).inertia().nminus);
  }

  TEST_CASE("method 2 permutation and reduced block") {
    const Tiny t;
    const ShiftInvertOperator op = build_method2(t.k, t.kg, 1.0, t.zc);
    CHECK(op.shifted().permutation() == std::vector<Index>{0, 1, 2});
    CHECK(op.inertia_neg() == 1);
    CHECK(op.shifted().factor().size() == 2);

    CHECK(select_reduced_permutation(Vector::Unit(3, 0)) == std::vector<Index>{1, 2, 0});
    Matrix bad = Matrix::Zero(3, 2);
    bad(0, 0) = bad(0, 1) = 1.0;
    CHECK(kind_of([&] { select_reduced_permutation(bad); }) == ErrorKind::PermutationFailure);
  }

  TEST_CASE("apply examples on the tiny pencil") {
    const Tiny t;
    for (auto method : {MatvecMethod::Augmented, MatvecMethod::Reduced}) {
      const ShiftInvertOperator op(t.k, t.kg, 1.0, t.zc, method);
      CHECK((apply(op, Vector::Unit(3, 0)) + Vector::Unit(3, 0)).norm() <= 1e-15);
      CHECK(op.apply(Vector::Unit(3, 2)).norm() == 0.0);
      CHECK(op.apply_with_diagnostics(Vector::Unit(3, 0)).aux_norm <= 1e-15);
    }
  }

  TEST_CASE("apply: v in span(Z_C) gives zero on a generated pencil") {
    const auto c = fixtures::singular_case(2);
    const auto g = gen_singular(c.spec);
    const ShiftInvertOperator op = build_method2(g.pencil.k, g.pencil.kg, c.sigma, g.pencil.zc);
    const Vector v = g.pencil.zc * Vector::Ones(g.pencil.zc.cols());
    CHECK(op.apply(v).norm() <= 1e-12 * v.norm());
  }

  TEST_CASE("consistent-system contract, method agreement and oracle agreement") {
    for (int i = 0; i < 4; ++i) {
      const auto c = fixtures::singular_case(i);
      const auto g = gen_singular(c.spec);
      const Pencil& p = g.pencil;
      const ShiftInvertOperator m1 = build_method1(p.k, p.kg, c.sigma, p.zc);
      const ShiftInvertOperator m2 = build_method2(p.k, p.kg, c.sigma, p.zc);
      const PseudoInverseOracle oracle(p.k, p.kg, c.sigma);
      for (std::uint64_t s = 0; s < 100; ++s) {
        const Vector v = random_start(p.size(), 100 * i + s);
        check_contract(m1, v);
        check_contract(m2, v);
        const Vector u1 = m1.apply(v), u2 = m2.apply(v), uo = oracle.apply(v);
        CHECK((u1 - u2).norm() <= 1e-10 * u1.norm());
        CHECK((u1 - uo).norm() <= 1e-9 * uo.norm());
        CHECK(m1.apply_with_diagnostics(v).aux_norm <= 1e-8 * u1.norm() * norm1(p.k));
      }
    }
  }

  TEST_CASE("methods agree on a 50x50 generated pencil to 1e-12") {
    SingularSpec spec{{}, {1.0, -1.0}, 3, 21, false};
    for (int k = 0; k < 45; ++k) spec.lambda1_sharp.push_back((k % 2 ? -1.0 : 1.0) / (1.0 + k));
    const Pencil p = gen_singular(spec).pencil;
    REQUIRE(p.size() == 50);
    const ShiftInvertOperator m1 = build_method1(p.k, p.kg, 0.37, p.zc);
    const ShiftInvertOperator m2 = build_method2(p.k, p.kg, 0.37, p.zc);
    for (std::uint64_t s = 0; s < 20; ++s) {
      const Vector v = random_start(50, s);
      const Vector u1 = m1.apply(v);
      CHECK((u1 - m2.apply(v)).norm() <= 1e-12 * u1.norm());
    }
  }

  TEST_CASE("inertia consistency between bordered and reduced factorizations") {
    for (int i = 0; i < 6; ++i) {
      const auto c = fixtures::singular_case(i);
      const Pencil& p = gen_singular(c.spec).pencil;
      for (double alpha : {c.sigma, -0.7, 2.9, -31.0, 55.5}) {
        const ShiftedFactor f1(p.k, p.kg, alpha, orthonormalize(p.zc), MatvecMethod::Augmented);
        const ShiftedFactor f2(p.k, p.kg, alpha, orthonormalize(p.zc), MatvecMethod::Reduced);
        CHECK(f1.nu_minus() - p.zc.cols() == f2.nu_minus());
      }
    }
  }

  TEST_CASE("m_apply examples") {
    const Tiny t;
    const RegularizedInnerProduct m(t.k, t.kg, t.zn, t.zc, Matrix::Identity(1, 1), Matrix::Identity(1, 1));
    CHECK(m.dense().isApprox(Matrix::Identity(3, 3)));
    const Vector x(Vector::LinSpaced(3, 1.0, 3.0));
    CHECK((m_apply(m, x) - x).norm() <= 1e-15);

    // x orthogonal to U_N and Z_C, in range(K): Mx = Kx.
    CHECK((m.apply(Vector::Unit(3, 0)) - t.k * Vector::Unit(3, 0)).norm() == 0.0);

    std::mt19937_64 rng(31);
    const Matrix spd = testutil::random_spd(6, rng);
    const RegularizedInnerProduct plain = RegularizedInnerProduct::plain(spd);
    const Vector y = testutil::random_matrix(6, 1, rng);
    CHECK((plain.apply(y) - spd * y).norm() <= 1e-14 * (spd * y).norm());

    CHECK(kind_of([&] {
      RegularizedInnerProduct(t.k, t.kg, t.zn, t.zc, -Matrix::Identity(1, 1), Matrix::Identity(1, 1));
    }) == ErrorKind::InvalidArgument);
  }

  TEST_CASE("M is symmetric positive definite on generated pencils") {
    for (int i = 0; i < 4; ++i) {
      const Pencil& p = gen_singular(fixtures::singular_case(i).spec).pencil;
      const Scaling sc = default_scaling(p.k, p.kg, p.zn, p.zc);
      const RegularizedInnerProduct m(p.k, p.kg, p.zn, p.zc, sc.hn, sc.hc);
      for (std::uint64_t s = 0; s < 20; ++s) {
        const Vector x = random_start(p.size(), 2 * s), y = random_start(p.size(), 2 * s + 1);
        const double xmy = x.dot(m.apply(y)), ymx = y.dot(m.apply(x));
        CHECK(std::abs(xmy - ymx) <= 1e-13 * m.apply(x).norm() * y.norm());
        CHECK(x.dot(m.apply(x)) > 0.0);
      }
      CHECK(sym_eig(m.dense()).values(0) > 0.0);
    }
  }

  TEST_CASE("C is self-adjoint in the M inner product") {
    for (int i = 0; i < 4; ++i) {
      const auto c = fixtures::singular_case(i);
      const Pencil& p = gen_singular(c.spec).pencil;
      const Scaling sc = default_scaling(p.k, p.kg, p.zn, p.zc);
      const RegularizedInnerProduct m(p.k, p.kg, p.zn, p.zc, sc.hn, sc.hc);
      const ShiftInvertOperator op = build_method1(p.k, p.kg, c.sigma, p.zc);
      for (std::uint64_t s = 0; s < 10; ++s) {
        const Vector x = random_start(p.size(), 2 * s), y = random_start(p.size(), 2 * s + 1);
        const Vector mcx = m.apply(op.apply(x)), mcy = m.apply(op.apply(y));
        CHECK(std::abs(mcx.dot(y) - x.dot(mcy)) <= 1e-10 * mcx.norm() * y.norm());
      }
    }
  }

  TEST_CASE("default_scaling examples") {
    // ||K||_1 = 1, KG Z_N column norm 1.
    const Tiny t;
    Scaling s = default_scaling(t.k, t.kg, t.zn, t.zc);
    CHECK(s.hn(0, 0) == doctest::Approx(1.0));
    CHECK(s.hc(0, 0) == doctest::Approx(1.0));

    // ||K||_1 = 5, column norm 2.
    s = default_scaling(diag({5, 0, 0}), diag({1, 2, 0}), t.zn, t.zc);
    CHECK(s.hn(0, 0) == doctest::Approx(5.0 / 4.0));
    CHECK(s.hc(0, 0) == doctest::Approx(5.0));

    CHECK(kind_of([&] { default_scaling(t.k, t.kg, t.zc, t.zc); }) == ErrorKind::InvalidArgument);
  }

  TEST_CASE("mu and lambda maps") {
    CHECK(mu_to_lambda(-1.0, 1.0) == doctest::Approx(0.5));
    CHECK(mu_to_lambda(0.0, 3.0) == 0.0);
    CHECK(lambda_to_mu(2.0, 1.0) == doctest::Approx(2.0));
    CHECK(mu_to_lambda(lambda_to_mu(2.0, 1.0), 1.0) == doctest::Approx(2.0));
    CHECK(kind_of([] { mu_to_lambda(1.0, 1.0); }) == ErrorKind::InvalidArgument);
    CHECK(kind_of([] { lambda_to_mu(1.0, 1.0); }) == ErrorKind::InvalidArgument);
    for (double l : {-40.0, -1.5, 0.25, 7.0}) {
      CHECK(mu_to_lambda(lambda_to_mu(l, -0.6), -0.6) == doctest::Approx(l).epsilon(1e-14));
    }
  }

  TEST_CASE("spectrum of the dense operator matches the canonical prediction") {
    for (int i = 0; i < 3; ++i) {
      const auto c = fixtures::singular_case(i);
      const Pencil& p = gen_singular(c.spec).pencil;
      const Index n = p.size();
      const ShiftInvertOperator op = build_method1(p.k, p.kg, c.sigma, p.zc);
      Matrix cmat(n, n);
      for (Index j = 0; j < n; ++j) cmat.col(j) = op.apply(Vector::Unit(n, j));
      const Eigen::EigenSolver<Matrix> es(cmat, false);
      std::vector<double> got;
      for (Index j = 0; j < n; ++j) {
        CHECK(std::abs(es.eigenvalues()(j).imag()) <= 1e-8);
        got.push_back(es.eigenvalues()(j).real());
      }
      const CanonicalForm rev = reduce(p.kg, p.k);
      std::vector<double> expect(static_cast<size_t>(rev.n2 + rev.n3), 0.0);
      for (Index j = 0; j < rev.n1; ++j) expect.push_back(1.0 / (1.0 - c.sigma * rev.lambda1(j)));
      std::sort(got.begin(), got.end());
      std::sort(expect.begin(), expect.end());
      REQUIRE(got.size() == expect.size());
      for (size_t j = 0; j < got.size(); ++j) {
        CHECK(got[j] == doctest::Approx(expect[j]).epsilon(1e-8).scale(1.0));
      }
    }
  }
}
