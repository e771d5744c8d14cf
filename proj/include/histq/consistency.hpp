#pragma once

#include <cstdint>
#include <vector>

#include "histq/decoherence.hpp"

namespace histq {

// Closures have 2^atoms - 1 elements and about 3^atoms / 2 disjoint pairs.
inline constexpr std::size_t kMaxFamilyAtoms = 10;

/// Pairwise-orthogonal generators whose sum is a projection. The atoms are
/// the generators plus I - sum when that remainder is nonzero; the closure
/// is every orthogonal sum of a non-empty set of atoms.
class HistoryFamily {
 public:
  explicit HistoryFamily(std::vector<HistoryProjection> members, double tol = kValidationTol);

  std::span<const HistoryProjection> members() const noexcept { return members_; }
  std::span<const HistoryProjection> atoms() const noexcept { return atoms_; }
  bool has_remainder() const noexcept { return atoms_.size() > members_.size(); }
  std::size_t single_dim() const noexcept { return members_.front().single_dim(); }
  std::size_t order() const noexcept { return members_.front().order(); }

  /// Closure element for a non-empty bit mask over atoms().
  HistoryProjection element(std::uint64_t mask) const;
  std::uint64_t closure_size() const noexcept { return (std::uint64_t{1} << atoms_.size()) - 1; }

 private:
  std::vector<HistoryProjection> members_;
  std::vector<HistoryProjection> atoms_;
  double tol_;
};

struct ConsistencyReport {
  bool consistent = false;
  double tol = 0.0;
  double max_re_offdiag = 0.0;
  std::uint64_t worst_pair[2] = {0, 0};   // atom masks
  std::size_t pairs_checked = 0;
  std::vector<double> probabilities;       // d(h, h) per generator, in input order
  double prob_sum = 0.0;
  std::vector<std::uint64_t> unphysical;  // closure masks with d(h, h) > 1 + tol
};

/// Re d(h, k) over every unordered disjoint pair of closure elements.
/// Each pair is evaluated directly, not reconstructed from atom values.
ConsistencyReport check_consistent(const Evaluator& evaluator, const HistoryFamily& family, double tol);

struct ExcessSearchOptions {
  std::size_t budget = 200;  // restarts
  std::size_t sweeps = 50;   // per restart
  std::uint64_t seed = 0;
};

struct ExcessResult {
  HistoryProjection history;
  double value = 0.0;
  std::size_t rank = 0;
  ComplexMatrix frame;  // orthonormal columns spanning the history
  std::size_t best_restart = 0;
  std::size_t restarts = 0;
};

/// Seeded multistart ascent of d(p, p) = tr((p (x) p) M). Restart r starts
/// from a random projection of rank 1 + (r mod d^n); each sweep replaces p
/// by the top eigenspace of the same rank of the symmetrized gradient.
/// Returns the best value seen (ties go to the lowest restart index).
ExcessResult diag_excess_search(const ILSOperator& m, const ExcessSearchOptions& options);

/// tr((p (x) p) M) for a projection given as a matrix.
double diagonal_value(const ILSOperator& m, const ComplexMatrix& p);

}  // namespace histq
