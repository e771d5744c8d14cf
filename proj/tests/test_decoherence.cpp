#include <doctest.h>

#include "helpers.hpp"
#include "histq/decoherence.hpp"
#include "histq/divergence.hpp"
#include "histq/errors.hpp"
#include "histq/sampling.hpp"

using namespace histq;
using namespace histq::test;

namespace {

DensityOperator ket0() { return DensityOperator::pure(basis(2, 0)); }

}  // namespace

TEST_CASE("d_direct hand values") {
  const DensityOperator rho = ket0();
  CHECK(std::abs(d_direct(rho, HomogeneousHistory::identity(2, 2), HomogeneousHistory::identity(2, 2)) - 1.0) <=
        1e-15);
  const HomogeneousHistory h = hist({Pplus(), P0()}), k = hist({Pminus(), P0()});
  CHECK(std::abs(d_direct(rho, h, h) - 0.25) <= 1e-15);
  CHECK(std::abs(d_direct(rho, h, k) - 0.25) <= 1e-15);
  // unequal orders are padded with identities
  CHECK(std::abs(d_direct(rho, hist({Pplus()}), hist({Pplus(), Projection::identity(2)})) - 0.5) <= 1e-15);
  CHECK_THROWS_AS(d_direct(DensityOperator::pure(basis(3, 0)), h, k), ShapeError);
}

TEST_CASE("basis tuples") {
  const BasisTupleSet small(2, 1, ket0());
  CHECK(small.size() == 4);
  for (const BasisTuple& t : small) {
    CHECK(norm(t.eps()) == doctest::Approx(1.0));
    CHECK(norm(t.eps_tilde()) == doctest::Approx(1.0));
  }

  RandomStream rng(31, "tuples");
  const BasisTupleSet set(2, 2, random_density(2, rng));
  std::vector<ComplexVector> eps, tilde;
  for (const BasisTuple& t : set) {
    eps.push_back(t.eps());
    tilde.push_back(t.eps_tilde());
  }
  double worst = 0.0;
  for (std::size_t a = 0; a < eps.size(); ++a)
    for (std::size_t b = 0; b < eps.size(); ++b) {
      const double expect = a == b ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(inner(eps[a], eps[b]) - expect));
      worst = std::max(worst, std::abs(inner(tilde[a], tilde[b]) - expect));
    }
  CHECK(worst <= 1e-10);

  const BasisTuple first = BasisTupleSet(2, 2, ket0()).at(0);
  CHECK(first.index == std::vector<std::size_t>{0, 0, 0, 0});
  const ComplexVector e = first.eps();
  CHECK(std::abs(e[0] - 1.0) <= 1e-15);
  for (std::size_t i = 1; i < 16; ++i) CHECK(e[i] == complex{});

  // index (j1, j2, j3, j4) = (0, 1, 0, 1): eps = psi (x) e_j4 (x) e_j2 (x) e_j3
  const BasisTuple t = BasisTupleSet(2, 2, ket0()).at(0b0101);
  CHECK(t.index == std::vector<std::size_t>{0, 1, 0, 1});
  const ComplexVector expect = kron(kron(kron(basis(2, 0), basis(2, 1)), basis(2, 1)), basis(2, 0));
  const ComplexVector got = t.eps();
  for (std::size_t i = 0; i < 16; ++i) CHECK(got[i] == expect[i]);
  // eps_tilde = e_j4 (x) e_j3 (x) psi (x) e_j2
  const ComplexVector expect_t = kron(kron(kron(basis(2, 1), basis(2, 0)), basis(2, 0)), basis(2, 1));
  const ComplexVector got_t = t.eps_tilde();
  for (std::size_t i = 0; i < 16; ++i) CHECK(got_t[i] == expect_t[i]);
}

TEST_CASE("d_series") {
  const DensityOperator rho = ket0();
  CHECK(std::abs(d_series(rho, HistoryProjection::identity(2, 2), HistoryProjection::identity(2, 2)) - 1.0) <= 1e-14);
  const HistoryProjection h = embed_homogeneous(hist({Pplus(), P0()}));
  CHECK(std::abs(d_series(rho, h, h) - 0.25) <= 1e-14);
  CHECK_THROWS_AS(d_series(rho, h, HistoryProjection::identity(2, 3)), ShapeError);
}

TEST_CASE("oracle triangle on seeded homogeneous pairs") {
  for (std::size_t d : {2, 3})
    for (std::size_t n : {2, 3}) {
      RandomStream rng(32, "triangle-" + std::to_string(d) + "-" + std::to_string(n));
      const DensityOperator rho = random_density(d, rng);
      const ILSOperator m = build_M(rho, d, n, 1u << 20);
      double worst = 0.0;
      for (int i = 0; i < 10; ++i) {
        const HomogeneousHistory h = random_homogeneous(d, n, rng), k = random_homogeneous(d, n, rng);
        const HistoryProjection hp = embed_homogeneous(h), kp = embed_homogeneous(k);
        const complex direct = d_direct(rho, h, k);
        worst = std::max(worst, std::abs(direct - d_series(rho, hp, kp)));
        worst = std::max(worst, std::abs(direct - d_via_M(m, hp, kp)));
        worst = std::max(worst, std::abs(d_via_M(m, hp, kp) - d_via_M_streaming(rho, hp, kp)));
      }
      CHECK(worst <= 1e-9);
    }
}

TEST_CASE("ILS operator") {
  const ILSOperator m1 = build_M(ket0(), 2, 1);
  const HistoryProjection p0(P0(), 2, 1);
  CHECK(std::abs(d_via_M(m1, p0, p0) - 1.0) <= 1e-14);

  RandomStream rng(33, "ils");
  const DensityOperator rho = random_density(2, rng);
  const ILSOperator m = build_M(rho, 2, 2);
  CHECK(std::abs(trace(m.matrix) - 1.0) <= 1e-9);
  CHECK(operator_norm(m.matrix) <= 1.0 + 1e-8);
  CHECK(m.state_fingerprint == rho.fingerprint());
  // d(q, p) = conj d(p, q) for all p, q means F M F = M^dagger with F swapping the two factors
  const ComplexMatrix f = swap_unitary(4);
  CHECK(max_abs_diff(matmul(f, matmul(m.matrix, f)), adjoint(m.matrix)) <= 1e-14);

  const HistoryProjection idn = HistoryProjection::identity(2, 2);
  CHECK(std::abs(d_via_M(m, idn, idn) - 1.0) <= 1e-12);
  CHECK_THROWS_AS(build_M(DensityOperator::pure(basis(4, 0)), 4, 3), SizeError);
  CHECK_THROWS_AS(build_M(rho, 3, 2), ShapeError);

  // complete additivity over a resolution of identity
  const ComplexMatrix frame = random_frame(4, 4, rng);
  const HistoryProjection q(random_projection(4, 2, rng), 2, 2);
  complex total{};
  for (std::size_t i = 0; i < 4; ++i) total += d_via_M(m, HistoryProjection(Projection::onto(frame.col(i)), 2, 2), q);
  CHECK(std::abs(total - d_via_M(m, idn, q)) <= 1e-9);

  const auto [a, b] = random_split(q.projection(), rng);
  const HistoryProjection pa(a, 2, 2), pb(b, 2, 2);
  CHECK(std::abs(d_via_M(m, q, idn) - d_via_M(m, pa, idn) - d_via_M(m, pb, idn)) <= 1e-9);
}

TEST_CASE("streaming") {
  RandomStream rng(34, "stream");
  const DensityOperator rho = random_density(3, rng);
  const HistoryProjection z = HistoryProjection::zero(3, 2);
  CHECK(d_via_M_streaming(rho, z, z) == complex{});
  const HistoryProjection p(random_projection(9, rng), 3, 2), q(random_projection(9, rng), 3, 2);
  const complex one = d_via_M_streaming(rho, p, q, 1);
  CHECK(one == d_via_M_streaming(rho, p, q, 3));
  CHECK(one == d_via_M_streaming(rho, p, q, 8));
  CHECK(std::abs(one - d_via_M(build_M(rho, 3, 2), p, q)) <= 1e-9);
}

TEST_CASE("evaluators and the axiom suite") {
  RandomStream rng(35, "axioms");
  const DensityOperator rho = random_density(2, rng);
  for (Method m : {Method::Direct, Method::Series, Method::Ils, Method::Stream}) {
    const auto ev = make_evaluator(m, rho, 2, 2);
    CHECK(ev->method() == m);
    const AxiomReport r = verify_axioms(*ev, 60, 7, 1e-9);
    CHECK(r.passed());
    CHECK(r.homogeneous_checks == 60);
    CHECK(r.general_checks == (m == Method::Direct ? 0u : 60u));
    const AxiomReport again = verify_axioms(*ev, 60, 7, 1e-9);
    CHECK(again.hermiticity == r.hermiticity);
    CHECK(again.additivity == r.additivity);

    const HomogeneousHistory h = hist({P0(), Pplus()}), k = hist({P1(), Pminus()});
    CHECK(std::abs(ev->evaluate(h, k) - std::conj(ev->evaluate(k, h))) <= 1e-12);
    CHECK(ev->evaluate(h, h).real() >= -1e-10);
  }
  CHECK(make_evaluator(Method::Auto, rho, 2, 2)->method() == Method::Ils);
  CHECK(make_evaluator(Method::Auto, DensityOperator::pure(basis(4, 0)), 4, 3)->method() == Method::Stream);
  const auto direct = make_evaluator(Method::Direct, rho, 2, 2);
  CHECK_FALSE(direct->general());
  CHECK_THROWS_AS(direct->evaluate(HistoryProjection::identity(2, 2), HistoryProjection::identity(2, 2)),
                  ShapeError);
  CHECK(parse_method("stream") == Method::Stream);
  CHECK_THROWS_AS(parse_method("fast"), ValidationError);
}
