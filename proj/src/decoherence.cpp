#include "histq/decoherence.hpp"

#include <cmath>

#include "histq/errors.hpp"
#include "histq/parallel.hpp"
#include "histq/random.hpp"
#include "histq/sampling.hpp"

namespace histq {

namespace {

ComplexVector basis_vector(std::size_t d, std::size_t i) {
  ComplexVector e(d);
  e[i] = 1.0;
  return e;
}

ComplexVector kron_all(std::span<const ComplexVector> factors) {
  ComplexVector out{1.0};
  for (const auto& f : factors) out = kron(out, f);
  return out;
}

struct SparseEntry {
  std::size_t index;
  complex value;
};

std::vector<SparseEntry> nonzeros(std::span<const complex> v) {
  std::vector<SparseEntry> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] != complex{}) out.push_back({i, v[i]});
  return out;
}

// <c, P a> over the nonzero entries of c and a.
complex sandwich(std::span<const SparseEntry> c, const ComplexMatrix& p, std::span<const SparseEntry> a) {
  complex acc{};
  for (const auto& ci : c) {
    complex row{};
    for (const auto& aj : a) row += p(ci.index, aj.index) * aj.value;
    acc += std::conj(ci.value) * row;
  }
  return acc;
}

void require_doubled_pair(const HistoryProjection& p, const HistoryProjection& q, const char* op) {
  if (p.dim() != q.dim() || p.order() != q.order() || p.single_dim() != q.single_dim()) {
    throw ShapeError(std::string(op) + ": histories live on different spaces");
  }
}

void require_state_dim(const DensityOperator& rho, std::size_t d, const char* op) {
  if (rho.dim() != d) {
    throw ShapeError(std::string(op) + ": state of dim " + std::to_string(rho.dim()) +
                     " on single-time dim " + std::to_string(d));
  }
}

}  // namespace

ComplexVector BasisTuple::eps() const { return kron_all(eps_factors); }
ComplexVector BasisTuple::eps_tilde() const { return kron_all(eps_tilde_factors); }

ComplexVector BasisTuple::eps_block(std::size_t first, std::size_t count) const {
  return kron_all(std::span(eps_factors).subspan(first, count));
}

ComplexVector BasisTuple::eps_tilde_block(std::size_t first, std::size_t count) const {
  return kron_all(std::span(eps_tilde_factors).subspan(first, count));
}

BasisTupleSet::BasisTupleSet(std::size_t single_dim, std::size_t order, const DensityOperator& rho,
                             std::size_t cap)
    : d_(single_dim), n_(order), count_(tensor_dim(single_dim, 2 * order, cap)), rho_(rho.completed()) {
  if (order == 0) throw ValidationError("basis tuples need order >= 1");
  require_state_dim(rho, single_dim, "build_basis_tuples");
}

double BasisTupleSet::weight_of(std::size_t flat) const {
  std::size_t lead = flat;
  for (std::size_t r = 1; r < 2 * n_; ++r) lead /= d_;
  return rho_.weights()[lead];
}

BasisTuple BasisTupleSet::at(std::size_t flat) const {
  if (flat >= count_) throw ShapeError("basis tuple index out of range");
  BasisTuple t;
  t.order = n_;
  t.single_dim = d_;
  t.index.resize(2 * n_);
  for (std::size_t r = 2 * n_; r-- > 0;) {
    t.index[r] = flat % d_;
    flat /= d_;
  }
  // j(r) for r = 1..2n is t.index[r - 1].
  auto j = [&t](std::size_t r) { return t.index[r - 1]; };
  t.weight = rho_.weights()[j(1)];
  const ComplexVector psi = rho_.vector(j(1));
  const std::size_t n = n_;

  t.eps_factors.reserve(2 * n);
  t.eps_factors.push_back(psi);
  for (std::size_t r = 2 * n; r >= n + 2; --r) t.eps_factors.push_back(basis_vector(d_, j(r)));
  for (std::size_t r = 2; r <= n + 1; ++r) t.eps_factors.push_back(basis_vector(d_, j(r)));

  t.eps_tilde_factors.reserve(2 * n);
  for (std::size_t r = 2 * n; r >= n + 1; --r) t.eps_tilde_factors.push_back(basis_vector(d_, j(r)));
  t.eps_tilde_factors.push_back(psi);
  for (std::size_t r = 2; r <= n; ++r) t.eps_tilde_factors.push_back(basis_vector(d_, j(r)));
  return t;
}

BasisTupleSet build_basis_tuples(std::size_t single_dim, std::size_t order, const DensityOperator& rho) {
  return {single_dim, order, rho};
}

complex d_direct(const DensityOperator& rho, const HomogeneousHistory& h, const HomogeneousHistory& k) {
  if (h.single_dim() != rho.dim() || k.single_dim() != rho.dim()) {
    throw ShapeError("d_direct: history and state dimensions differ");
  }
  const std::size_t n = std::max(h.order(), k.order());
  const HomogeneousHistory hp = h.padded(n);
  const HomogeneousHistory kp = k.padded(n);
  ComplexMatrix x = hp.at(n - 1).matrix();
  for (std::size_t t = n - 1; t-- > 0;) x = matmul(x, hp.at(t).matrix());
  x = matmul(x, rho.matrix());
  for (std::size_t t = 0; t < n; ++t) x = matmul(x, kp.at(t).matrix());
  return trace(x);
}

complex d_series(const DensityOperator& rho, const HistoryProjection& h, const HistoryProjection& k) {
  require_doubled_pair(h, k, "d_series");
  require_state_dim(rho, h.single_dim(), "d_series");
  const BasisTupleSet tuples(h.single_dim(), h.order(), rho);
  const std::size_t dim = h.dim();
  const ComplexMatrix& hm = h.matrix();
  const ComplexMatrix& km = k.matrix();

  complex total{};
  for (std::size_t flat = 0; flat < tuples.size(); ++flat) {
    if (tuples.weight_of(flat) == 0.0) continue;
    const BasisTuple t = tuples.at(flat);
    // (h (x) k) vec(X) = vec(h X k^T) with X the dim x dim reshape of eps.
    const auto eps = nonzeros(t.eps());
    const auto eps_tilde = nonzeros(t.eps_tilde());
    complex term{};
    for (const auto& out : eps_tilde) {
      const std::size_t i = out.index / dim, j = out.index % dim;
      complex y{};
      for (const auto& in : eps) {
        const std::size_t a = in.index / dim, b = in.index % dim;
        y += hm(i, a) * in.value * km(j, b);
      }
      term += std::conj(out.value) * y;
    }
    total += t.weight * term;
  }
  return total;
}

ILSOperator build_M(const DensityOperator& rho, std::size_t single_dim, std::size_t order, std::size_t cap) {
  require_state_dim(rho, single_dim, "build_M");
  std::size_t doubled = 0;
  try {
    doubled = tensor_dim(single_dim, 2 * order, cap);
  } catch (const SizeError&) {
    throw SizeError("build_M: doubled dimension " + std::to_string(single_dim) + "^" + std::to_string(2 * order) +
                    " exceeds materialization cap " + std::to_string(cap) + "; use d_via_M_streaming");
  }
  const BasisTupleSet tuples(single_dim, order, rho);
  ComplexMatrix m(doubled, doubled);
  for (std::size_t flat = 0; flat < tuples.size(); ++flat) {
    const double w = tuples.weight_of(flat);
    if (w == 0.0) continue;
    const BasisTuple t = tuples.at(flat);
    const auto eps = nonzeros(t.eps());
    const auto eps_tilde = nonzeros(t.eps_tilde());
    for (const auto& a : eps)
      for (const auto& b : eps_tilde) m(a.index, b.index) += w * a.value * std::conj(b.value);
  }
  return {std::move(m), order, single_dim, rho.fingerprint()};
}

complex d_via_M(const ILSOperator& m, const HistoryProjection& p, const HistoryProjection& q) {
  require_doubled_pair(p, q, "d_via_M");
  const std::size_t dim = p.dim();
  if (m.matrix.rows() != dim * dim || p.single_dim() != m.single_dim || p.order() != m.order) {
    throw ShapeError("d_via_M: histories do not match the ILS operator");
  }
  // tr((p (x) q) M) = sum p(i1,j1) q(i2,j2) M((j1,j2),(i1,i2))
  const ComplexMatrix& pm = p.matrix();
  const ComplexMatrix& qm = q.matrix();
  complex total{};
  for (std::size_t i1 = 0; i1 < dim; ++i1) {
    for (std::size_t j1 = 0; j1 < dim; ++j1) {
      const complex pij = pm(i1, j1);
      if (pij == complex{}) continue;
      complex inner_sum{};
      for (std::size_t i2 = 0; i2 < dim; ++i2) {
        const complex* mrow = &m.matrix(j1 * dim, i1 * dim + i2);
        for (std::size_t j2 = 0; j2 < dim; ++j2) {
          const complex qij = qm(i2, j2);
          if (qij == complex{}) continue;
          inner_sum += qij * mrow[j2 * dim * dim];
        }
      }
      total += pij * inner_sum;
    }
  }
  return total;
}

complex d_via_M_streaming(const DensityOperator& rho, const HistoryProjection& p, const HistoryProjection& q,
                          std::size_t workers) {
  require_doubled_pair(p, q, "d_via_M_streaming");
  require_state_dim(rho, p.single_dim(), "d_via_M_streaming");
  const std::size_t n = p.order();
  const BasisTupleSet tuples(p.single_dim(), n, rho);
  std::vector<complex> terms(tuples.size());
  parallel_for(
      tuples.size(),
      [&](std::size_t flat) {
        if (tuples.weight_of(flat) == 0.0) return;
        const BasisTuple t = tuples.at(flat);
        // eps = a (x) b, eps_tilde = c (x) f, split after the first n slots.
        const auto a = nonzeros(t.eps_block(0, n));
        const auto b = nonzeros(t.eps_block(n, n));
        const auto c = nonzeros(t.eps_tilde_block(0, n));
        const auto f = nonzeros(t.eps_tilde_block(n, n));
        terms[flat] = t.weight * sandwich(c, p.matrix(), a) * sandwich(f, q.matrix(), b);
      },
      workers == 0 ? worker_count() : workers);
  return tree_sum(terms);
}

std::string_view method_name(Method m) {
  switch (m) {
    case Method::Direct: return "direct";
    case Method::Series: return "series";
    case Method::Ils: return "ils";
    case Method::Stream: return "stream";
    case Method::Auto: return "auto";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::Direct, Method::Series, Method::Ils, Method::Stream, Method::Auto})
    if (method_name(m) == name) return m;
  throw ValidationError("unknown method '" + std::string(name) + "'");
}

complex Evaluator::evaluate(const HomogeneousHistory& h, const HomogeneousHistory& k) const {
  const std::size_t n = std::max(h.order(), k.order());
  return evaluate(embed_homogeneous(h.padded(n), SIZE_MAX), embed_homogeneous(k.padded(n), SIZE_MAX));
}

namespace {

class DirectEvaluator final : public Evaluator {
 public:
  DirectEvaluator(DensityOperator rho, std::size_t d, std::size_t n) : Evaluator(std::move(rho), d, n) {}
  Method method() const override { return Method::Direct; }
  bool general() const override { return false; }
  complex evaluate(const HistoryProjection&, const HistoryProjection&) const override {
    throw ShapeError("direct evaluator needs homogeneous histories, not general projections");
  }
  complex evaluate(const HomogeneousHistory& h, const HomogeneousHistory& k) const override {
    return d_direct(rho_, h, k);
  }
};

class SeriesEvaluator final : public Evaluator {
 public:
  SeriesEvaluator(DensityOperator rho, std::size_t d, std::size_t n) : Evaluator(std::move(rho), d, n) {}
  Method method() const override { return Method::Series; }
  using Evaluator::evaluate;
  complex evaluate(const HistoryProjection& p, const HistoryProjection& q) const override {
    return d_series(rho_, p, q);
  }
};

class IlsEvaluator final : public Evaluator {
 public:
  IlsEvaluator(DensityOperator rho, std::size_t d, std::size_t n, std::size_t cap)
      : Evaluator(rho, d, n), m_(build_M(rho, d, n, cap)) {}
  Method method() const override { return Method::Ils; }
  using Evaluator::evaluate;
  complex evaluate(const HistoryProjection& p, const HistoryProjection& q) const override {
    return d_via_M(m_, p, q);
  }

 private:
  ILSOperator m_;
};

class StreamEvaluator final : public Evaluator {
 public:
  StreamEvaluator(DensityOperator rho, std::size_t d, std::size_t n) : Evaluator(std::move(rho), d, n) {}
  Method method() const override { return Method::Stream; }
  using Evaluator::evaluate;
  complex evaluate(const HistoryProjection& p, const HistoryProjection& q) const override {
    return d_via_M_streaming(rho_, p, q);
  }
};

}  // namespace

std::unique_ptr<Evaluator> make_evaluator(Method method, const DensityOperator& rho, std::size_t single_dim,
                                          std::size_t order, std::size_t materialize_cap) {
  require_state_dim(rho, single_dim, "make_evaluator");
  if (method == Method::Auto) {
    std::size_t doubled = SIZE_MAX;
    try {
      doubled = tensor_dim(single_dim, 2 * order, materialize_cap);
    } catch (const SizeError&) {
    }
    method = doubled <= materialize_cap ? Method::Ils : Method::Stream;
  }
  switch (method) {
    case Method::Direct: return std::make_unique<DirectEvaluator>(rho, single_dim, order);
    case Method::Series: return std::make_unique<SeriesEvaluator>(rho, single_dim, order);
    case Method::Ils: return std::make_unique<IlsEvaluator>(rho, single_dim, order, materialize_cap);
    case Method::Stream: return std::make_unique<StreamEvaluator>(rho, single_dim, order);
    case Method::Auto: break;
  }
  throw ValidationError("make_evaluator: unresolved method");
}

namespace {

struct AxiomAccumulator {
  AxiomReport& report;

  void hermitian(complex dpq, complex dqp) {
    report.hermiticity = std::max(report.hermiticity, std::abs(dpq - std::conj(dqp)));
  }
  void positive(complex dpp) {
    report.positivity = std::max(report.positivity, std::max(0.0, -dpp.real()));
    report.hermiticity = std::max(report.hermiticity, std::abs(dpp.imag()));
  }
  void additive(complex whole, complex a, complex b) {
    report.additivity = std::max(report.additivity, std::abs(whole - a - b));
  }
};

}  // namespace

AxiomReport verify_axioms(const Evaluator& ev, std::size_t samples, std::uint64_t seed, double tol) {
  AxiomReport report;
  report.evaluator = std::string(ev.name());
  report.samples = samples;
  report.seed = seed;
  report.tol = tol;
  AxiomAccumulator acc{report};

  const std::size_t d = ev.single_dim();
  const std::size_t n = ev.order();
  const HomogeneousHistory one = HomogeneousHistory::identity(d, n);
  report.normalization = std::abs(ev.evaluate(one, one) - 1.0);

  const RandomStream root(seed, "verify");
  for (std::size_t s = 0; s < samples; ++s) {
    RandomStream rng = root.split("sample-" + std::to_string(s));
    const HomogeneousHistory h = random_homogeneous(d, n, rng);
    const HomogeneousHistory k = random_homogeneous(d, n, rng);
    const complex dhk = ev.evaluate(h, k);
    acc.hermitian(dhk, ev.evaluate(k, h));
    acc.positive(ev.evaluate(h, h));

    // Split one of the 2n arguments into orthogonal parts.
    std::vector<std::size_t> splittable;
    for (std::size_t a = 0; a < 2 * n; ++a) {
      const Projection& p = a < n ? h.at(a) : k.at(a - n);
      if (p.rank() > 0) splittable.push_back(a);
    }
    if (!splittable.empty()) {
      const std::size_t a = splittable[rng.index(splittable.size())];
      const bool in_h = a < n;
      const std::size_t t = in_h ? a : a - n;
      const HomogeneousHistory& target = in_h ? h : k;
      auto [p1, p2] = random_split(target.at(t), rng);
      auto with = [&target, t](const Projection& piece) {
        std::vector<Projection> ps(target.projections().begin(), target.projections().end());
        ps[t] = piece;
        return HomogeneousHistory(std::move(ps));
      };
      const HomogeneousHistory t1 = with(p1), t2 = with(p2);
      if (in_h) {
        acc.additive(dhk, ev.evaluate(t1, k), ev.evaluate(t2, k));
      } else {
        acc.additive(dhk, ev.evaluate(h, t1), ev.evaluate(h, t2));
      }
    }
    ++report.homogeneous_checks;

    if (!ev.general()) continue;
    const std::size_t dim = tensor_dim(d, n, SIZE_MAX);
    const HistoryProjection p(random_projection(dim, rng), d, n);
    const HistoryProjection q(random_projection(dim, rng), d, n);
    const complex dpq = ev.evaluate(p, q);
    acc.hermitian(dpq, ev.evaluate(q, p));
    acc.positive(ev.evaluate(p, p));
    const bool split_first = (s % 2 == 0);
    const HistoryProjection& target = split_first ? p : q;
    if (target.rank() > 0) {
      auto [a, b] = random_split(target.projection(), rng);
      const HistoryProjection ta(std::move(a), d, n), tb(std::move(b), d, n);
      if (split_first) {
        acc.additive(dpq, ev.evaluate(ta, q), ev.evaluate(tb, q));
      } else {
        acc.additive(dpq, ev.evaluate(p, ta), ev.evaluate(p, tb));
      }
    }
    ++report.general_checks;
  }
  return report;
}

}  // namespace histq
