#include <doctest.h>

#include "helpers.hpp"
#include "histq/errors.hpp"
#include "histq/matrix.hpp"
#include "histq/random.hpp"
#include "histq/sampling.hpp"

using namespace histq;
using namespace histq::test;

namespace {

ComplexMatrix naive_matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j)
      for (std::size_t k = 0; k < a.cols(); ++k) c(i, j) += a(i, k) * b(k, j);
  return c;
}

// Block formula: (a (x) b) has block (i, j) equal to a_ij * b.
ComplexMatrix block_kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix c(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      for (std::size_t r = 0; r < b.rows(); ++r)
        for (std::size_t s = 0; s < b.cols(); ++s) c(i * b.rows() + r, j * b.cols() + s) = a(i, j) * b(r, s);
  return c;
}

}  // namespace

TEST_CASE("matrix construction rejects bad shapes and non-finite entries") {
  CHECK_THROWS_AS(ComplexMatrix(2, 2, std::vector<complex>(3)), ShapeError);
  CHECK_THROWS_AS(ComplexMatrix(1, 1, {complex(std::nan(""), 0)}), ValidationError);
  CHECK_THROWS_AS(ComplexMatrix(1, 1, {complex(0, INFINITY)}), ValidationError);
}

TEST_CASE("matmul") {
  RandomStream rng(11, "matmul");
  const ComplexMatrix a = random_matrix(3, 3, rng);
  const ComplexMatrix b = random_matrix(3, 3, rng);
  CHECK(max_abs_diff(matmul(ComplexMatrix::identity(3), a), a) == 0.0);
  CHECK(max_abs(matmul(a, ComplexMatrix(3, 3))) == 0.0);
  CHECK(max_abs_diff(matmul(a, b), naive_matmul(a, b)) <= 1e-14);
  CHECK_THROWS_AS(matmul(ComplexMatrix(2, 3), ComplexMatrix(2, 3)), ShapeError);
  const ComplexMatrix c = random_matrix(3, 3, rng);
  CHECK(max_abs_diff(matmul(matmul(a, b), c), matmul(a, matmul(b, c))) <= 1e-13);
}

TEST_CASE("kron") {
  CHECK(kron(ComplexMatrix::identity(2), ComplexMatrix::identity(3)) == ComplexMatrix::identity(6));
  RandomStream rng(12, "kron");
  const ComplexMatrix a = random_matrix(2, 2, rng), b = random_matrix(2, 2, rng);
  CHECK(max_abs_diff(kron(a, b), block_kron(a, b)) == 0.0);

  // (a (x) b)(e_i (x) e_j) = a e_i (x) b e_j
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      const ComplexVector lhs = matvec(kron(a, b), kron(basis(2, i), basis(2, j)));
      const ComplexVector rhs = kron(matvec(a, basis(2, i)), matvec(b, basis(2, j)));
      for (std::size_t k = 0; k < 4; ++k) CHECK(std::abs(lhs[k] - rhs[k]) <= 1e-15);
    }

  const ComplexMatrix c = random_matrix(3, 3, rng), d = random_matrix(3, 3, rng);
  const ComplexMatrix e = random_matrix(2, 2, rng);
  CHECK(max_abs_diff(kron(matmul(a, e), matmul(c, d)), matmul(kron(a, c), kron(e, d))) <= 1e-10);
  CHECK(std::abs(trace(kron(a, c)) - trace(a) * trace(c)) <= 1e-10);
  CHECK_THROWS_AS(kron(ComplexMatrix::identity(64), ComplexMatrix::identity(64), 4095), SizeError);
}

TEST_CASE("adjoint and trace") {
  CHECK(adjoint(ComplexMatrix::identity(3)) == ComplexMatrix::identity(3));
  const ComplexMatrix n{{0, 1}, {0, 0}};
  CHECK(adjoint(n) == ComplexMatrix{{0, 0}, {1, 0}});
  RandomStream rng(13, "adjoint");
  const ComplexMatrix a = random_matrix(3, 4, rng), b = random_matrix(4, 3, rng);
  CHECK(adjoint(adjoint(a)) == a);
  CHECK(trace(ComplexMatrix::identity(5)) == complex(5.0));
  CHECK(std::abs(trace(matmul(a, b)) - trace(matmul(b, a))) <= 1e-12);
  CHECK_THROWS_AS(trace(a), ShapeError);

  // tr |u><v| = <v, u>
  const ComplexVector u = {complex(1, 2), complex(0, -1)}, v = {complex(0.5, 0.5), complex(3, 0)};
  complex oracle{};
  for (std::size_t i = 0; i < 2; ++i) oracle += std::conj(v[i]) * u[i];
  CHECK(std::abs(trace(ComplexMatrix::outer(u, v)) - oracle) <= 1e-15);
  CHECK(std::abs(inner(v, u) - oracle) <= 1e-15);
}

TEST_CASE("vec identity fixes the Kronecker convention") {
  // (h (x) k) vec(X) = vec(h X k^T) with row-major vec
  RandomStream rng(14, "vec");
  const ComplexMatrix h = random_matrix(2, 2, rng), k = random_matrix(3, 3, rng), x = random_matrix(2, 3, rng);
  ComplexMatrix kt(3, 3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) kt(i, j) = k(j, i);
  const ComplexVector lhs = matvec(kron(h, k), x.data());
  const ComplexMatrix rhs = matmul(matmul(h, x), kt);
  for (std::size_t i = 0; i < 6; ++i) CHECK(std::abs(lhs[i] - rhs.data()[i]) <= 1e-13);
}

TEST_CASE("hermitian_eig") {
  SUBCASE("diagonal input") {
    const ComplexMatrix a = ComplexMatrix::diagonal(std::vector<complex>{0.7, 0.3});
    const EigenDecomposition e = hermitian_eig(a);
    CHECK(e.values[0] == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(e.values[1] == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(e.vectors == ComplexMatrix::identity(2));
  }
  SUBCASE("rank-one projector") {
    const EigenDecomposition e = hermitian_eig(ComplexMatrix{{0.5, 0.5}, {0.5, 0.5}});
    CHECK(std::abs(e.values[0] - 1.0) <= 1e-14);
    CHECK(std::abs(e.values[1]) <= 1e-14);
    CHECK(std::abs(e.vectors(0, 0) - kInvSqrt2) <= 1e-14);
    CHECK(std::abs(e.vectors(1, 0) - kInvSqrt2) <= 1e-14);
  }
  SUBCASE("reconstruction of a random 8x8") {
    RandomStream rng(15, "eig");
    const ComplexMatrix a = random_hermitian(8, rng);
    const double tol = 1e-10;
    const EigenDecomposition e = hermitian_eig(a, tol);
    ComplexMatrix lambda(8, 8);
    for (std::size_t i = 0; i < 8; ++i) lambda(i, i) = e.values[i];
    const ComplexMatrix rec = matmul(matmul(e.vectors, lambda), adjoint(e.vectors));
    CHECK(max_abs_diff(rec, a) <= 10 * tol);
    CHECK(max_abs_diff(matmul(adjoint(e.vectors), e.vectors), ComplexMatrix::identity(8)) <= 1e-12);
    for (std::size_t i = 1; i < 8; ++i) CHECK(e.values[i - 1] >= e.values[i]);
    // first nonzero component of each vector is positive real
    for (std::size_t k = 0; k < 8; ++k) {
      std::size_t i = 0;
      while (std::abs(e.vectors(i, k)) <= 1e-10) ++i;
      CHECK(e.vectors(i, k).imag() == 0.0);
      CHECK(e.vectors(i, k).real() > 0.0);
    }
  }
  SUBCASE("projection spectrum is {0, 1}") {
    RandomStream rng(16, "eigp");
    const EigenDecomposition e = hermitian_eig(random_projection(6, 3, rng).matrix());
    for (std::size_t i = 0; i < 6; ++i) CHECK(std::min(std::abs(e.values[i]), std::abs(e.values[i] - 1)) <= 1e-8);
  }
  CHECK_THROWS_AS(hermitian_eig(ComplexMatrix{{0, 1}, {0, 0}}), ValidationError);
}

TEST_CASE("operator_norm") {
  CHECK(operator_norm(ComplexMatrix::identity(4)) == doctest::Approx(1.0).epsilon(1e-12));
  RandomStream rng(17, "norm");
  ComplexMatrix p = random_projection(5, 2, rng).matrix();
  p *= 2.0;
  CHECK(operator_norm(p) == doctest::Approx(2.0).epsilon(1e-10));
  const ComplexMatrix a = random_matrix(6, 6, rng);
  const double oracle = std::sqrt(hermitian_eig(matmul(adjoint(a), a), 1e-13).values[0]);
  CHECK(std::abs(operator_norm(a) - oracle) <= 1e-9 * oracle);
  CHECK(std::abs(operator_norm(adjoint(a)) - operator_norm(a)) <= 1e-9 * oracle);
  CHECK(operator_norm(ComplexMatrix(3, 3)) == 0.0);
}

TEST_CASE("sparse matrix agrees with dense") {
  RandomStream rng(18, "sparse");
  ComplexMatrix a = random_matrix(4, 4, rng);
  a(1, 2) = 0.0;
  a(3, 0) = 0.0;
  const SparseMatrix s = SparseMatrix::from_dense(a);
  CHECK(s.entries().size() == 14);
  CHECK(s.to_dense() == a);
  CHECK(s.adjoint().to_dense() == adjoint(a));
  const ComplexMatrix b = random_matrix(4, 3, rng);
  CHECK(max_abs_diff(s.left_multiply(b), matmul(a, b)) <= 1e-14);
  const ComplexVector v = b.col(0);
  const ComplexVector sv = s.apply(v), dv = matvec(a, v);
  for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(sv[i] - dv[i]) <= 1e-14);
  // duplicates merge, cancellations vanish
  const SparseMatrix t(2, 2, {{0, 1, 1.0}, {0, 1, -1.0}, {1, 0, 2.0}, {1, 0, 1.0}});
  CHECK(t.entries().size() == 1);
  CHECK(t.to_dense()(1, 0) == complex(3.0));
}
