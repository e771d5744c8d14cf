#include "histq/sampling.hpp"

#include "histq/errors.hpp"

namespace histq {

ComplexMatrix random_matrix(std::size_t rows, std::size_t cols, RandomStream& rng) {
  ComplexMatrix m(rows, cols);
  for (auto& z : m.data()) z = rng.complex_normal();
  return m;
}

ComplexMatrix random_frame(std::size_t dim, std::size_t cols, RandomStream& rng) {
  if (cols > dim) throw ShapeError("random_frame: more columns than dimension");
  std::vector<ComplexVector> basis;
  while (basis.size() < cols) {
    ComplexVector v(dim);
    for (auto& z : v) z = rng.complex_normal();
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : basis) {
        const complex c = inner(b, v);
        for (std::size_t k = 0; k < dim; ++k) v[k] -= c * b[k];
      }
    }
    const double n = norm(v);
    if (n < 1e-8) continue;
    for (auto& z : v) z /= n;
    basis.push_back(std::move(v));
  }
  ComplexMatrix frame(dim, cols);
  for (std::size_t j = 0; j < cols; ++j)
    for (std::size_t i = 0; i < dim; ++i) frame(i, j) = basis[j][i];
  return frame;
}

Projection random_projection(std::size_t dim, std::size_t rank, RandomStream& rng) {
  if (rank == 0) return Projection::zero(dim);
  if (rank == dim) return Projection::identity(dim);
  return Projection::onto_frame(random_frame(dim, rank, rng));
}

Projection random_projection(std::size_t dim, RandomStream& rng) {
  return random_projection(dim, rng.index(dim + 1), rng);
}

ComplexMatrix random_hermitian(std::size_t dim, RandomStream& rng) {
  const ComplexMatrix g = random_matrix(dim, dim, rng);
  return 0.5 * (g + adjoint(g));
}

DensityOperator random_density(std::size_t dim, RandomStream& rng) {
  const ComplexMatrix g = random_matrix(dim, dim, rng);
  ComplexMatrix rho = matmul(g, adjoint(g));
  const double tr = trace(rho).real();
  rho *= 1.0 / tr;
  return DensityOperator::from_matrix(rho);
}

DensityOperator random_pure_density(std::size_t dim, RandomStream& rng) {
  ComplexVector v(dim);
  for (auto& z : v) z = rng.complex_normal();
  return DensityOperator::pure(v);
}

HomogeneousHistory random_homogeneous(std::size_t dim, std::size_t order, RandomStream& rng) {
  std::vector<Projection> ps;
  ps.reserve(order);
  for (std::size_t t = 0; t < order; ++t) ps.push_back(random_projection(dim, rng));
  return HomogeneousHistory(std::move(ps));
}

std::pair<Projection, Projection> random_split(const Projection& p, RandomStream& rng) {
  if (p.rank() == 0) throw ValidationError("random_split: cannot split the zero projection");
  // Eigenvectors of p with eigenvalue 1 span its range; rotate them randomly
  // inside the range before splitting.
  const EigenDecomposition eig = hermitian_eig(p.matrix(), 1e-12);
  const std::size_t r = p.rank();
  ComplexMatrix range(p.dim(), r);
  for (std::size_t j = 0; j < r; ++j)
    for (std::size_t i = 0; i < p.dim(); ++i) range(i, j) = eig.vectors(i, j);
  const ComplexMatrix mix = random_frame(r, r, rng);
  const ComplexMatrix frame = matmul(range, mix);
  const std::size_t first = 1 + rng.index(r);
  ComplexMatrix a(p.dim(), first), b(p.dim(), r - first);
  for (std::size_t i = 0; i < p.dim(); ++i) {
    for (std::size_t j = 0; j < first; ++j) a(i, j) = frame(i, j);
    for (std::size_t j = first; j < r; ++j) b(i, j - first) = frame(i, j);
  }
  Projection pa = Projection::onto_frame(a);
  Projection pb = r == first ? Projection::zero(p.dim()) : Projection::onto_frame(b);
  return {std::move(pa), std::move(pb)};
}

}  // namespace histq
