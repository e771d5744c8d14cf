#pragma once

#include "histq/history.hpp"
#include "histq/random.hpp"

namespace histq {

// Seeded random draws of the domain objects. Used by the axiom suite, the
// excess search, the benchmark and the tests.

/// Orthonormal columns from Gram-Schmidt on complex Gaussian vectors.
ComplexMatrix random_frame(std::size_t dim, std::size_t cols, RandomStream& rng);
Projection random_projection(std::size_t dim, std::size_t rank, RandomStream& rng);
/// Rank drawn uniformly from [0, dim].
Projection random_projection(std::size_t dim, RandomStream& rng);
ComplexMatrix random_hermitian(std::size_t dim, RandomStream& rng);
ComplexMatrix random_matrix(std::size_t rows, std::size_t cols, RandomStream& rng);

/// G G^dagger / tr for a complex Ginibre G.
DensityOperator random_density(std::size_t dim, RandomStream& rng);
DensityOperator random_pure_density(std::size_t dim, RandomStream& rng);

HomogeneousHistory random_homogeneous(std::size_t dim, std::size_t order, RandomStream& rng);

/// Splits a projection of rank >= 1 into two orthogonal pieces that sum to it.
/// The first piece has rank in [1, rank]; the second may be zero.
std::pair<Projection, Projection> random_split(const Projection& p, RandomStream& rng);

}  // namespace histq
