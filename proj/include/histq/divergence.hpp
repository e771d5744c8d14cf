#pragma once

#include <memory>
#include <string_view>
#include <vector>

#include "histq/history.hpp"

namespace histq {

// Largest single-time dimension for which swap_unitary will build a dense matrix.
inline constexpr std::size_t kDefaultSwapCap = 64;

struct TruncationSchedule {
  std::vector<std::size_t> cutoffs;
  double convergence_threshold = 1e-9;
  double divergence_threshold = 1e6;

  /// Throws ValidationError unless there are at least 3 strictly increasing
  /// positive cutoffs and 0 < convergence < divergence.
  void validate() const;
  /// 4, 8, ..., max_cutoff.
  static TruncationSchedule doubling(std::size_t first, std::size_t max_cutoff);
};

/// A value in C or the point at infinity, with the partial sums it was read from.
struct DecoherenceValue {
  enum class Kind { Finite, Divergent };
  Kind kind = Kind::Finite;
  complex value{};
  std::vector<std::size_t> cutoffs;
  std::vector<complex> partial_sums;

  bool finite() const noexcept { return kind == Kind::Finite; }
  std::string_view verdict() const noexcept { return finite() ? "finite" : "divergent"; }
};

/// U(e_a (x) e_b) = e_b (x) e_a on C^dim (x) C^dim.
ComplexMatrix swap_unitary(std::size_t dim, std::size_t cap = kDefaultSwapCap);
/// (U + I) / 2, the projection onto the symmetric subspace.
Projection q_u(std::size_t dim, std::size_t cap = kDefaultSwapCap);

/// Read access to an operator on (C^d)^{(x)n} by multi-indices, so large
/// structured operators need not be stored.
class OperatorView {
 public:
  virtual ~OperatorView() = default;
  virtual std::size_t single_dim() const = 0;
  virtual std::size_t order() const = 0;
  /// <e_row, A e_col> for row = (r_1..r_n), col = (c_1..c_n).
  virtual complex entry(std::span<const std::size_t> row, std::span<const std::size_t> col) const = 0;
};

std::unique_ptr<OperatorView> dense_view(const ComplexMatrix& m, std::size_t single_dim, std::size_t order);
std::unique_ptr<OperatorView> identity_view(std::size_t single_dim, std::size_t order);
/// The swap U on two slots.
std::unique_ptr<OperatorView> swap_view(std::size_t single_dim);
/// Q_U = (U + I) / 2 on two slots.
std::unique_ptr<OperatorView> qu_view(std::size_t single_dim);

/// Partial sums of the doubled-space series for ordinary operators P, Q,
/// every basis index (state index included) running up to the cutoff.
std::vector<complex> partial_sums(const DensityOperator& rho, const OperatorView& p, const OperatorView& q,
                                  std::span<const std::size_t> cutoffs);

/// Finite when the last two increments are within convergence_threshold;
/// Divergent when the last partial sum passes divergence_threshold, or
/// otherwise (growing or unsettled).
DecoherenceValue classify(std::vector<std::size_t> cutoffs, std::vector<complex> sums,
                          const TruncationSchedule& schedule);

DecoherenceValue truncated_d(const DensityOperator& rho, const HistoryProjection& p, const HistoryProjection& q,
                             const TruncationSchedule& schedule);
DecoherenceValue classify_generalized(const DensityOperator& rho, const OperatorView& p, const OperatorView& q,
                                      const TruncationSchedule& schedule);

}  // namespace histq
