#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "histq/history.hpp"

namespace histq {

/// A finite sum of simple tensors x_1 (x) ... (x) x_n of d x d operators.
/// Factors are stored sparsely; an empty sum is the zero element.
class SimpleTensorSum {
 public:
  SimpleTensorSum(std::size_t order, std::size_t dim);

  static SimpleTensorSum simple(std::vector<ComplexMatrix> factors);
  static SimpleTensorSum identity(std::size_t dim, std::size_t order);
  static SimpleTensorSum from_history(const HomogeneousHistory& h);

  void add_term(std::span<const ComplexMatrix> factors);
  void add_term(std::vector<SparseMatrix> factors);

  std::size_t order() const noexcept { return order_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return terms_.size(); }
  std::span<const SparseMatrix> term(std::size_t i) const { return terms_.at(i); }
  ComplexMatrix factor(std::size_t i, std::size_t slot) const { return terms_.at(i).at(slot).to_dense(); }

  SimpleTensorSum& operator+=(const SimpleTensorSum& other);
  /// c * z, with the scalar folded into the first factor of every term.
  SimpleTensorSum scaled(complex c) const;

 private:
  std::size_t order_;
  std::size_t dim_;
  std::vector<std::vector<SparseMatrix>> terms_;
};

SimpleTensorSum operator+(SimpleTensorSum a, const SimpleTensorSum& b);

/// Pi(x_1 (x) ... (x) x_n) = x_n ... x_1, extended linearly.
ComplexMatrix pi_map(const SimpleTensorSum& z);
/// Pi(z) v without forming Pi(z).
ComplexVector pi_apply(const SimpleTensorSum& z, std::span<const complex> v);

/// D(z, w) = tr(Pi(w)^dagger Pi(z) rho).
complex D_form(const DensityOperator& rho, const SimpleTensorSum& z, const SimpleTensorSum& w);

/// G_ij = D(z_i, z_j). Hermitian positive semidefinite.
ComplexMatrix gns_gram(const DensityOperator& rho, std::span<const SimpleTensorSum> basis);

/// Coefficient vectors c with G c = 0 up to tol: span{sum_i c_i z_i} lies in
/// the null space of the semi-inner product.
std::vector<ComplexVector> gns_null_vectors(const ComplexMatrix& gram, double tol = 1e-9);

/// The element z as an operator on (C^d)^{(x)n}, applied matrix-free.
LinearMap tensor_operator(const SimpleTensorSum& z);
/// The same operator as a dense matrix (small cases only).
ComplexMatrix assemble(const SimpleTensorSum& z, std::size_t cap = kDefaultKronCap);

using SesquilinearForm = std::function<complex(const SimpleTensorSum&, const SimpleTensorSum&)>;

struct UniquenessReport {
  double max_deviation = 0.0;
  std::size_t probes = 0;
  std::size_t worst_probe = 0;
};

/// Compares a candidate form against D on seeded probe pairs: the identity
/// pair, random projection simple tensors, and random sums of simple tensors
/// with unit-norm factors. This is an agreement test on finitely many probes.
UniquenessReport uniqueness_check(const DensityOperator& rho, const SesquilinearForm& candidate,
                                  std::size_t probe_count, std::uint64_t seed);

struct ProbeRow {
  std::size_t n = 0;
  double norm = 0.0;
  double value = 0.0;
};

/// For each N builds z_N = sum_j |e_j><e_1| (x) |e_1><e_j| on C^N (x) C^N and
/// reports its operator norm and delta(z_N) = D_xi(z_N, 1) for xi = e_1.
std::vector<ProbeRow> unboundedness_probe(std::span<const std::size_t> sizes);
SimpleTensorSum probe_element(std::size_t n);

}  // namespace histq
