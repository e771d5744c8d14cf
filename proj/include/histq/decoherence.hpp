#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "histq/history.hpp"

namespace histq {

// Materialize the ILS operator only while d^{2n} stays at or below this.
inline constexpr std::size_t kDefaultMaterializeCap = 1024;

/// One term of the doubled-space series. index holds (j_1, ..., j_{2n}),
/// zero-based; j_1 selects the spectral vector of rho, the others select
/// standard basis vectors. The product vectors are
///   eps       = psi_{j1} (x) e_{j2n} (x) ... (x) e_{j(n+2)} (x) e_{j2} (x) ... (x) e_{j(n+1)}
///   eps_tilde = e_{j2n} (x) ... (x) e_{j(n+1)} (x) psi_{j1} (x) e_{j2} (x) ... (x) e_{jn}
/// and are kept factorized; eps()/eps_tilde() assemble them.
struct BasisTuple {
  std::size_t order = 0;
  std::size_t single_dim = 0;
  std::vector<std::size_t> index;
  double weight = 0.0;
  std::vector<ComplexVector> eps_factors;
  std::vector<ComplexVector> eps_tilde_factors;

  ComplexVector eps() const;
  ComplexVector eps_tilde() const;
  /// Kronecker product of eps factors [first, first + count).
  ComplexVector eps_block(std::size_t first, std::size_t count) const;
  ComplexVector eps_tilde_block(std::size_t first, std::size_t count) const;
};

/// All d^{2n} tuples in lexicographic index order (j_1 most significant).
/// States with fewer than d spectral vectors are completed with zero weights.
class BasisTupleSet {
 public:
  BasisTupleSet(std::size_t single_dim, std::size_t order, const DensityOperator& rho,
                std::size_t cap = kDefaultKronCap);

  std::size_t size() const noexcept { return count_; }
  std::size_t single_dim() const noexcept { return d_; }
  std::size_t order() const noexcept { return n_; }
  double weight_of(std::size_t flat) const;
  BasisTuple at(std::size_t flat) const;

  class iterator {
   public:
    using value_type = BasisTuple;
    using difference_type = std::ptrdiff_t;
    iterator() = default;
    iterator(const BasisTupleSet* set, std::size_t pos) : set_(set), pos_(pos) {}
    BasisTuple operator*() const { return set_->at(pos_); }
    iterator& operator++() {
      ++pos_;
      return *this;
    }
    iterator operator++(int) {
      auto tmp = *this;
      ++pos_;
      return tmp;
    }
    bool operator==(const iterator& o) const { return pos_ == o.pos_; }

   private:
    const BasisTupleSet* set_ = nullptr;
    std::size_t pos_ = 0;
  };
  iterator begin() const { return {this, 0}; }
  iterator end() const { return {this, count_}; }

 private:
  std::size_t d_;
  std::size_t n_;
  std::size_t count_;
  DensityOperator rho_;
};

BasisTupleSet build_basis_tuples(std::size_t single_dim, std::size_t order, const DensityOperator& rho);

/// Finite sum  M = sum_J w_{j1} |eps_J><eps_tilde_J|  realizing
/// d(p, q) = tr((p (x) q) M) on the doubled space.
struct ILSOperator {
  ComplexMatrix matrix;
  std::size_t order = 0;
  std::size_t single_dim = 0;
  std::uint64_t state_fingerprint = 0;
};

/// tr(h_n ... h_1 rho k_1 ... k_n); orders equalized by identity padding.
complex d_direct(const DensityOperator& rho, const HomogeneousHistory& h, const HomogeneousHistory& k);

/// Sum over all basis tuples of w_{j1} <eps_tilde, (h (x) k) eps>.
complex d_series(const DensityOperator& rho, const HistoryProjection& h, const HistoryProjection& k);

ILSOperator build_M(const DensityOperator& rho, std::size_t single_dim, std::size_t order,
                    std::size_t cap = kDefaultMaterializeCap);

/// tr((p (x) q) M).
complex d_via_M(const ILSOperator& m, const HistoryProjection& p, const HistoryProjection& q);

/// Same value as d_via_M without storing M. The per-tuple terms are computed on
/// `workers` threads and reduced with tree_sum, so the result does not depend
/// on the thread count.
complex d_via_M_streaming(const DensityOperator& rho, const HistoryProjection& p, const HistoryProjection& q,
                          std::size_t workers = 0);

enum class Method { Direct, Series, Ils, Stream, Auto };

std::string_view method_name(Method m);
Method parse_method(std::string_view name);

/// The standard functional of a fixed state on histories of a fixed order.
class Evaluator {
 public:
  virtual ~Evaluator() = default;
  virtual Method method() const = 0;
  std::string_view name() const { return method_name(method()); }
  /// False if the evaluator only understands homogeneous histories.
  virtual bool general() const { return true; }

  std::size_t single_dim() const noexcept { return d_; }
  std::size_t order() const noexcept { return n_; }
  const DensityOperator& state() const noexcept { return rho_; }

  virtual complex evaluate(const HistoryProjection& p, const HistoryProjection& q) const = 0;
  virtual complex evaluate(const HomogeneousHistory& h, const HomogeneousHistory& k) const;

 protected:
  Evaluator(DensityOperator rho, std::size_t d, std::size_t n) : rho_(std::move(rho)), d_(d), n_(n) {}
  DensityOperator rho_;
  std::size_t d_;
  std::size_t n_;
};

/// Method::Auto materializes M when d^{2n} <= materialize_cap, else streams.
std::unique_ptr<Evaluator> make_evaluator(Method method, const DensityOperator& rho, std::size_t single_dim,
                                          std::size_t order, std::size_t materialize_cap = kDefaultMaterializeCap);

struct AxiomReport {
  std::string evaluator;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  double tol = 0.0;
  double hermiticity = 0.0;   // max |d(p,q) - conj d(q,p)|
  double positivity = 0.0;    // max (-Re d(p,p))_+
  double normalization = 0.0; // |d(I,I) - 1|
  double additivity = 0.0;    // max |d(p1+p2,q) - d(p1,q) - d(p2,q)|
  std::size_t homogeneous_checks = 0;
  std::size_t general_checks = 0;

  bool passed() const {
    return hermiticity <= tol && positivity <= tol && normalization <= tol && additivity <= tol;
  }
};

/// Seeded property suite for axioms (i)-(iv). Each sample draws random
/// homogeneous histories (split in one of their 2n arguments for
/// ortho-additivity) and, for general evaluators, random projections on the
/// whole history space as well.
AxiomReport verify_axioms(const Evaluator& evaluator, std::size_t samples, std::uint64_t seed, double tol);

}  // namespace histq
