#include "histq/divergence.hpp"

#include <algorithm>

#include "histq/errors.hpp"

namespace histq {

void TruncationSchedule::validate() const {
  if (cutoffs.size() < 3) throw ValidationError("truncation schedule needs at least 3 cutoffs");
  if (cutoffs.front() == 0) throw ValidationError("cutoffs must be positive");
  for (std::size_t i = 1; i < cutoffs.size(); ++i)
    if (cutoffs[i] <= cutoffs[i - 1]) throw ValidationError("cutoffs must be strictly increasing");
  if (!(convergence_threshold > 0.0) || !(divergence_threshold > 0.0))
    throw ValidationError("thresholds must be positive");
  if (!(convergence_threshold < divergence_threshold))
    throw ValidationError("convergence threshold must be below divergence threshold");
}

TruncationSchedule TruncationSchedule::doubling(std::size_t first, std::size_t max_cutoff) {
  if (first == 0) throw ValidationError("first cutoff must be positive");
  TruncationSchedule s;
  for (std::size_t c = first; c <= max_cutoff; c *= 2) s.cutoffs.push_back(c);
  return s;
}

ComplexMatrix swap_unitary(std::size_t dim, std::size_t cap) {
  if (dim == 0) throw ValidationError("swap_unitary: dim must be >= 1");
  if (dim > cap) throw SizeError("swap_unitary: dim " + std::to_string(dim) + " exceeds cap " + std::to_string(cap));
  ComplexMatrix u(dim * dim, dim * dim);
  for (std::size_t a = 0; a < dim; ++a)
    for (std::size_t b = 0; b < dim; ++b) u(b * dim + a, a * dim + b) = 1.0;
  return u;
}

Projection q_u(std::size_t dim, std::size_t cap) {
  ComplexMatrix q = swap_unitary(dim, cap);
  q += ComplexMatrix::identity(dim * dim);
  q *= 0.5;
  return Projection::validate(q);
}

namespace {

class DenseView final : public OperatorView {
 public:
  DenseView(ComplexMatrix m, std::size_t d, std::size_t n) : m_(std::move(m)), d_(d), n_(n) {
    const std::size_t dim = tensor_dim(d, n, SIZE_MAX);
    if (m_.rows() != dim || m_.cols() != dim) throw ShapeError("dense_view: matrix is not d^n x d^n");
  }
  std::size_t single_dim() const override { return d_; }
  std::size_t order() const override { return n_; }
  complex entry(std::span<const std::size_t> row, std::span<const std::size_t> col) const override {
    return m_(flat(row), flat(col));
  }

 private:
  std::size_t flat(std::span<const std::size_t> idx) const {
    std::size_t f = 0;
    for (const std::size_t i : idx) f = f * d_ + i;
    return f;
  }
  ComplexMatrix m_;
  std::size_t d_, n_;
};

class IdentityView final : public OperatorView {
 public:
  IdentityView(std::size_t d, std::size_t n) : d_(d), n_(n) {}
  std::size_t single_dim() const override { return d_; }
  std::size_t order() const override { return n_; }
  complex entry(std::span<const std::size_t> row, std::span<const std::size_t> col) const override {
    return std::equal(row.begin(), row.end(), col.begin()) ? 1.0 : 0.0;
  }

 private:
  std::size_t d_, n_;
};

class SwapView final : public OperatorView {
 public:
  SwapView(std::size_t d, double swap_weight, double identity_weight)
      : d_(d), swap_(swap_weight), id_(identity_weight) {}
  std::size_t single_dim() const override { return d_; }
  std::size_t order() const override { return 2; }
  complex entry(std::span<const std::size_t> row, std::span<const std::size_t> col) const override {
    double v = 0.0;
    if (row[0] == col[1] && row[1] == col[0]) v += swap_;
    if (row[0] == col[0] && row[1] == col[1]) v += id_;
    return v;
  }

 private:
  std::size_t d_;
  double swap_, id_;
};

}  // namespace

std::unique_ptr<OperatorView> dense_view(const ComplexMatrix& m, std::size_t single_dim, std::size_t order) {
  return std::make_unique<DenseView>(m, single_dim, order);
}
std::unique_ptr<OperatorView> identity_view(std::size_t single_dim, std::size_t order) {
  return std::make_unique<IdentityView>(single_dim, order);
}
std::unique_ptr<OperatorView> swap_view(std::size_t single_dim) {
  return std::make_unique<SwapView>(single_dim, 1.0, 0.0);
}
std::unique_ptr<OperatorView> qu_view(std::size_t single_dim) {
  return std::make_unique<SwapView>(single_dim, 0.5, 0.5);
}

namespace {

// Advances a base-`limit` counter; false once it wraps.
bool next_index(std::vector<std::size_t>& idx, std::size_t limit) {
  for (std::size_t i = idx.size(); i-- > 0;) {
    if (++idx[i] < limit) return true;
    idx[i] = 0;
  }
  return false;
}

// With t = (j_2n, ..., j_(n+2)), s = (j_2, ..., j_n) and m = j_(n+1) a term
// factorizes as
//   <e_t (x) e_m, P (psi (x) e_t)> * <psi (x) e_s, Q (e_s (x) e_m)>
// so the sum over t and s can be taken separately for each m.
complex truncated_sum(const DensityOperator& rho, const OperatorView& p, const OperatorView& q, std::size_t cutoff) {
  const std::size_t d = p.single_dim();
  const std::size_t n = p.order();
  const std::size_t limit = std::min(cutoff, d);
  const std::size_t states = std::min(cutoff, rho.size());
  std::vector<std::size_t> row(n), col(n), free(n - 1);

  complex total{};
  for (std::size_t k = 0; k < states; ++k) {
    const double w = rho.weights()[k];
    if (w == 0.0) continue;
    const ComplexVector psi = rho.vector(k);
    std::vector<std::size_t> support;
    for (std::size_t x = 0; x < d; ++x)
      if (psi[x] != complex{}) support.push_back(x);

    complex state_sum{};
    for (std::size_t m = 0; m < limit; ++m) {
      complex a{};
      std::fill(free.begin(), free.end(), 0);
      do {
        std::copy(free.begin(), free.end(), row.begin());
        row[n - 1] = m;
        std::copy(free.begin(), free.end(), col.begin() + 1);
        for (const std::size_t x : support) {
          col[0] = x;
          a += psi[x] * p.entry(row, col);
        }
      } while (next_index(free, limit));

      complex b{};
      std::fill(free.begin(), free.end(), 0);
      do {
        std::copy(free.begin(), free.end(), row.begin() + 1);
        std::copy(free.begin(), free.end(), col.begin());
        col[n - 1] = m;
        for (const std::size_t y : support) {
          row[0] = y;
          b += std::conj(psi[y]) * q.entry(row, col);
        }
      } while (next_index(free, limit));
      state_sum += a * b;
    }
    total += w * state_sum;
  }
  return total;
}

}  // namespace

std::vector<complex> partial_sums(const DensityOperator& rho, const OperatorView& p, const OperatorView& q,
                                  std::span<const std::size_t> cutoffs) {
  if (p.single_dim() != q.single_dim() || p.order() != q.order())
    throw ShapeError("partial_sums: P and Q live on different spaces");
  if (p.single_dim() != rho.dim()) throw ShapeError("partial_sums: state dimension does not match");
  if (p.order() == 0) throw ShapeError("partial_sums: order must be >= 1");
  std::vector<complex> sums;
  sums.reserve(cutoffs.size());
  for (const std::size_t c : cutoffs) sums.push_back(truncated_sum(rho, p, q, c));
  return sums;
}

DecoherenceValue classify(std::vector<std::size_t> cutoffs, std::vector<complex> sums,
                          const TruncationSchedule& schedule) {
  schedule.validate();
  if (sums.size() != cutoffs.size()) throw ShapeError("classify: one partial sum per cutoff");
  DecoherenceValue out;
  const std::size_t k = sums.size();
  const bool settled = std::abs(sums[k - 1] - sums[k - 2]) <= schedule.convergence_threshold &&
                       std::abs(sums[k - 2] - sums[k - 3]) <= schedule.convergence_threshold;
  if (std::abs(sums[k - 1]) > schedule.divergence_threshold || !settled) {
    out.kind = DecoherenceValue::Kind::Divergent;
  } else {
    out.kind = DecoherenceValue::Kind::Finite;
    out.value = sums[k - 1];
  }
  out.cutoffs = std::move(cutoffs);
  out.partial_sums = std::move(sums);
  return out;
}

DecoherenceValue classify_generalized(const DensityOperator& rho, const OperatorView& p, const OperatorView& q,
                                      const TruncationSchedule& schedule) {
  schedule.validate();
  return classify(schedule.cutoffs, partial_sums(rho, p, q, schedule.cutoffs), schedule);
}

DecoherenceValue truncated_d(const DensityOperator& rho, const HistoryProjection& p, const HistoryProjection& q,
                             const TruncationSchedule& schedule) {
  const auto pv = dense_view(p.matrix(), p.single_dim(), p.order());
  const auto qv = dense_view(q.matrix(), q.single_dim(), q.order());
  return classify_generalized(rho, *pv, *qv, schedule);
}

}  // namespace histq
