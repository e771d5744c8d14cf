#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "histq/matrix.hpp"

namespace histq {

// Materialized history projections live on d^n <= this many dimensions.
inline constexpr std::size_t kDefaultHistoryCap = 64;

/// A validated orthogonal projection (self-adjoint and idempotent).
class Projection {
 public:
  /// Rejects m if ||m^2 - m|| or ||m^dagger - m|| (max-entry) exceeds tol.
  static Projection validate(const ComplexMatrix& m, double tol = kValidationTol);

  static Projection identity(std::size_t dim);
  static Projection zero(std::size_t dim);
  /// Projection onto span{v}; v need not be normalized.
  static Projection onto(std::span<const complex> v);
  /// Projection onto the span of the (orthonormal) columns of frame.
  static Projection onto_frame(const ComplexMatrix& frame, double tol = kValidationTol);

  const ComplexMatrix& matrix() const noexcept { return matrix_; }
  std::size_t dim() const noexcept { return matrix_.rows(); }
  std::size_t rank() const noexcept { return rank_; }

  Projection complement() const;

 private:
  Projection(ComplexMatrix m, std::size_t rank) : matrix_(std::move(m)), rank_(rank) {}
  ComplexMatrix matrix_;
  std::size_t rank_ = 0;
};

/// A state in spectral form rho = sum_i w_i |psi_i><psi_i|.
/// The vectors need not span the space; see completed().
class DensityOperator {
 public:
  static DensityOperator from_matrix(const ComplexMatrix& m, double tol = kValidationTol);
  static DensityOperator from_spectral(std::vector<double> weights, ComplexMatrix vectors);
  static DensityOperator pure(std::span<const complex> psi);

  std::size_t dim() const noexcept { return vectors_.rows(); }
  std::size_t size() const noexcept { return weights_.size(); }
  std::span<const double> weights() const noexcept { return weights_; }
  const ComplexMatrix& vectors() const noexcept { return vectors_; }
  ComplexVector vector(std::size_t i) const { return vectors_.col(i); }

  ComplexMatrix matrix() const;
  /// Same state; vectors extended to an orthonormal basis with zero weights.
  DensityOperator completed() const;
  std::uint64_t fingerprint() const;

 private:
  DensityOperator(std::vector<double> w, ComplexMatrix v) : weights_(std::move(w)), vectors_(std::move(v)) {}
  std::vector<double> weights_;
  ComplexMatrix vectors_;
};

/// Time-ordered single-time projections (h_{t_1}, ..., h_{t_n}).
class HomogeneousHistory {
 public:
  explicit HomogeneousHistory(std::vector<Projection> projections);
  static HomogeneousHistory identity(std::size_t dim, std::size_t order);

  std::size_t order() const noexcept { return projections_.size(); }
  std::size_t single_dim() const noexcept { return projections_.front().dim(); }
  const Projection& at(std::size_t t) const { return projections_.at(t); }
  std::span<const Projection> projections() const noexcept { return projections_; }

  /// Appends identity projections at later times up to the given order.
  HomogeneousHistory padded(std::size_t order) const;

 private:
  std::vector<Projection> projections_;
};

/// A projection on the n-fold tensor space (C^d)^{(x)n}.
class HistoryProjection {
 public:
  HistoryProjection(Projection p, std::size_t single_dim, std::size_t order);
  static HistoryProjection identity(std::size_t single_dim, std::size_t order);
  static HistoryProjection zero(std::size_t single_dim, std::size_t order);

  const Projection& projection() const noexcept { return projection_; }
  const ComplexMatrix& matrix() const noexcept { return projection_.matrix(); }
  std::size_t dim() const noexcept { return projection_.dim(); }
  std::size_t rank() const noexcept { return projection_.rank(); }
  std::size_t single_dim() const noexcept { return single_dim_; }
  std::size_t order() const noexcept { return order_; }

  HistoryProjection complement() const;

 private:
  Projection projection_;
  std::size_t single_dim_;
  std::size_t order_;
};

/// d^n, or SizeError once it passes cap.
std::size_t tensor_dim(std::size_t single_dim, std::size_t order, std::size_t cap);

HistoryProjection embed_homogeneous(const HomogeneousHistory& h, std::size_t cap = kDefaultHistoryCap);

bool orthogonal(const HistoryProjection& p, const HistoryProjection& q, double tol = kValidationTol);

/// Sum of pairwise-orthogonal parts; the empty sum is the zero projection.
HistoryProjection sum_projection(std::span<const HistoryProjection> parts, std::size_t single_dim,
                                 std::size_t order, double tol = kValidationTol);

}  // namespace histq
