#include "histq/quadform.hpp"

#include "histq/errors.hpp"
#include "histq/random.hpp"
#include "histq/sampling.hpp"

namespace histq {

SimpleTensorSum::SimpleTensorSum(std::size_t order, std::size_t dim) : order_(order), dim_(dim) {
  if (order == 0 || dim == 0) throw ValidationError("SimpleTensorSum needs order >= 1 and dim >= 1");
}

SimpleTensorSum SimpleTensorSum::simple(std::vector<ComplexMatrix> factors) {
  if (factors.empty()) throw ValidationError("simple tensor needs at least one factor");
  SimpleTensorSum z(factors.size(), factors.front().rows());
  z.add_term(factors);
  return z;
}

SimpleTensorSum SimpleTensorSum::identity(std::size_t dim, std::size_t order) {
  return simple(std::vector<ComplexMatrix>(order, ComplexMatrix::identity(dim)));
}

SimpleTensorSum SimpleTensorSum::from_history(const HomogeneousHistory& h) {
  std::vector<ComplexMatrix> fs;
  for (const auto& p : h.projections()) fs.push_back(p.matrix());
  return simple(std::move(fs));
}

void SimpleTensorSum::add_term(std::span<const ComplexMatrix> factors) {
  std::vector<SparseMatrix> sparse;
  sparse.reserve(factors.size());
  for (const auto& f : factors) sparse.push_back(SparseMatrix::from_dense(f));
  add_term(std::move(sparse));
}

void SimpleTensorSum::add_term(std::vector<SparseMatrix> factors) {
  if (factors.size() != order_) {
    throw ShapeError("term has " + std::to_string(factors.size()) + " factors, expected " + std::to_string(order_));
  }
  for (const auto& f : factors) {
    if (f.rows() != dim_ || f.cols() != dim_) throw ShapeError("tensor factor is not " + std::to_string(dim_) + "x" + std::to_string(dim_));
  }
  terms_.push_back(std::move(factors));
}

SimpleTensorSum& SimpleTensorSum::operator+=(const SimpleTensorSum& other) {
  if (other.order_ != order_ || other.dim_ != dim_) throw ShapeError("adding tensor sums of different shapes");
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  return *this;
}

SimpleTensorSum SimpleTensorSum::scaled(complex c) const {
  SimpleTensorSum out(order_, dim_);
  for (const auto& t : terms_) {
    std::vector<SparseMatrix> fs = t;
    fs.front() = fs.front().scaled(c);
    out.terms_.push_back(std::move(fs));
  }
  return out;
}

SimpleTensorSum operator+(SimpleTensorSum a, const SimpleTensorSum& b) { return a += b; }

ComplexMatrix pi_map(const SimpleTensorSum& z) {
  ComplexMatrix total(z.dim(), z.dim());
  for (std::size_t i = 0; i < z.size(); ++i) {
    const auto t = z.term(i);
    ComplexMatrix prod = t[0].to_dense();
    for (std::size_t s = 1; s < t.size(); ++s) prod = t[s].left_multiply(prod);
    total += prod;
  }
  return total;
}

ComplexVector pi_apply(const SimpleTensorSum& z, std::span<const complex> v) {
  if (v.size() != z.dim()) throw ShapeError("pi_apply: length mismatch");
  ComplexVector total(z.dim());
  for (std::size_t i = 0; i < z.size(); ++i) {
    ComplexVector w(v.begin(), v.end());
    for (const auto& f : z.term(i)) w = f.apply(w);
    for (std::size_t k = 0; k < w.size(); ++k) total[k] += w[k];
  }
  return total;
}

namespace {

void require_compatible(const DensityOperator& rho, const SimpleTensorSum& z, const SimpleTensorSum& w) {
  if (z.dim() != rho.dim() || w.dim() != rho.dim()) throw ShapeError("D_form: factor and state dimensions differ");
  if (z.order() != w.order()) throw ShapeError("D_form: orders differ");
}

}  // namespace

// tr(Pi(w)^dagger Pi(z) rho) = sum_i w_i <Pi(w) psi_i, Pi(z) psi_i>
complex D_form(const DensityOperator& rho, const SimpleTensorSum& z, const SimpleTensorSum& w) {
  require_compatible(rho, z, w);
  complex total{};
  for (std::size_t i = 0; i < rho.size(); ++i) {
    const double weight = rho.weights()[i];
    if (weight == 0.0) continue;
    const ComplexVector psi = rho.vector(i);
    total += weight * inner(pi_apply(w, psi), pi_apply(z, psi));
  }
  return total;
}

ComplexMatrix gns_gram(const DensityOperator& rho, std::span<const SimpleTensorSum> basis) {
  const std::size_t m = basis.size();
  for (const auto& z : basis) require_compatible(rho, z, basis.front());
  // images[i][k] = Pi(z_i) psi_k
  std::vector<std::vector<ComplexVector>> images(m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = 0; k < rho.size(); ++k) images[i].push_back(pi_apply(basis[i], rho.vector(k)));
  ComplexMatrix g(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      complex acc{};
      for (std::size_t k = 0; k < rho.size(); ++k) {
        if (rho.weights()[k] == 0.0) continue;
        acc += rho.weights()[k] * inner(images[j][k], images[i][k]);
      }
      g(i, j) = acc;
    }
  }
  return g;
}

std::vector<ComplexVector> gns_null_vectors(const ComplexMatrix& gram, double tol) {
  const EigenDecomposition eig = hermitian_eig(gram, 1e-12);
  std::vector<ComplexVector> out;
  for (std::size_t k = 0; k < eig.values.size(); ++k)
    if (std::abs(eig.values[k]) <= tol) out.push_back(eig.vectors.col(k));
  return out;
}

namespace {

// out = (I (x) ... (x) x (x) ... (x) I) v with x acting on `slot`.
ComplexVector mode_apply(const SparseMatrix& x, std::span<const complex> v, std::size_t slot, std::size_t d,
                         std::size_t order) {
  std::size_t stride = 1;
  for (std::size_t s = slot + 1; s < order; ++s) stride *= d;
  const std::size_t block = d * stride;
  const std::size_t outer = v.size() / block;
  ComplexVector out(v.size());
  for (const auto& e : x.entries()) {
    for (std::size_t o = 0; o < outer; ++o) {
      const complex* src = v.data() + o * block + e.col * stride;
      complex* dst = out.data() + o * block + e.row * stride;
      for (std::size_t i = 0; i < stride; ++i) dst[i] += e.value * src[i];
    }
  }
  return out;
}

ComplexVector apply_sum(const std::vector<std::vector<SparseMatrix>>& terms, std::span<const complex> v,
                        std::size_t d, std::size_t order) {
  ComplexVector total(v.size());
  for (const auto& t : terms) {
    ComplexVector w(v.begin(), v.end());
    for (std::size_t s = 0; s < order; ++s) w = mode_apply(t[s], w, s, d, order);
    for (std::size_t k = 0; k < w.size(); ++k) total[k] += w[k];
  }
  return total;
}

}  // namespace

LinearMap tensor_operator(const SimpleTensorSum& z) {
  const std::size_t d = z.dim(), n = z.order();
  const std::size_t dim = tensor_dim(d, n, SIZE_MAX);
  std::vector<std::vector<SparseMatrix>> fwd, adj;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const auto t = z.term(i);
    fwd.emplace_back(t.begin(), t.end());
    std::vector<SparseMatrix> a;
    for (const auto& f : t) a.push_back(f.adjoint());
    adj.push_back(std::move(a));
  }
  return {dim, dim,
          [fwd, d, n](std::span<const complex> v) { return apply_sum(fwd, v, d, n); },
          [adj, d, n](std::span<const complex> v) { return apply_sum(adj, v, d, n); }};
}

ComplexMatrix assemble(const SimpleTensorSum& z, std::size_t cap) {
  const std::size_t dim = tensor_dim(z.dim(), z.order(), cap);
  ComplexMatrix total(dim, dim);
  for (std::size_t i = 0; i < z.size(); ++i) {
    ComplexMatrix m = z.factor(i, 0);
    for (std::size_t s = 1; s < z.order(); ++s) m = kron(m, z.factor(i, s), cap);
    total += m;
  }
  return total;
}

namespace {

ComplexMatrix unit_norm_matrix(std::size_t d, RandomStream& rng) {
  ComplexMatrix m = random_matrix(d, d, rng);
  m *= 1.0 / operator_norm(m);
  return m;
}

SimpleTensorSum random_sum(std::size_t d, std::size_t n, RandomStream& rng) {
  SimpleTensorSum z(n, d);
  const std::size_t terms = 1 + rng.index(3);
  for (std::size_t t = 0; t < terms; ++t) {
    std::vector<ComplexMatrix> fs;
    for (std::size_t s = 0; s < n; ++s) fs.push_back(unit_norm_matrix(d, rng));
    z.add_term(fs);
  }
  return z;
}

}  // namespace

UniquenessReport uniqueness_check(const DensityOperator& rho, const SesquilinearForm& candidate,
                                  std::size_t probe_count, std::uint64_t seed) {
  const std::size_t d = rho.dim();
  // Order 2 is the smallest order where Pi is not just the identity map.
  const std::size_t n = 2;
  UniquenessReport report;
  auto record = [&](const SimpleTensorSum& u, const SimpleTensorSum& v) {
    const double dev = std::abs(candidate(u, v) - D_form(rho, u, v));
    if (dev > report.max_deviation) {
      report.max_deviation = dev;
      report.worst_probe = report.probes;
    }
    ++report.probes;
  };

  const SimpleTensorSum one = SimpleTensorSum::identity(d, n);
  record(one, one);
  const RandomStream root(seed, "uniqueness");
  for (std::size_t i = 0; i < probe_count; ++i) {
    RandomStream rng = root.split("probe-" + std::to_string(i));
    if (i % 2 == 0) {
      record(SimpleTensorSum::from_history(random_homogeneous(d, n, rng)),
             SimpleTensorSum::from_history(random_homogeneous(d, n, rng)));
    } else {
      const SimpleTensorSum u = random_sum(d, n, rng);
      const SimpleTensorSum v = random_sum(d, n, rng);
      record(u, v);
    }
  }
  return report;
}

SimpleTensorSum probe_element(std::size_t n) {
  SimpleTensorSum z(2, n);
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<SparseMatrix> fs;
    fs.emplace_back(n, n, std::vector<SparseMatrix::Entry>{{j, 0, 1.0}});  // |e_j><e_1|
    fs.emplace_back(n, n, std::vector<SparseMatrix::Entry>{{0, j, 1.0}});  // |e_1><e_j|
    z.add_term(std::move(fs));
  }
  return z;
}

std::vector<ProbeRow> unboundedness_probe(std::span<const std::size_t> sizes) {
  std::vector<ProbeRow> rows;
  for (const std::size_t n : sizes) {
    if (n == 0) throw ValidationError("unboundedness_probe: sizes must be positive");
    const SimpleTensorSum z = probe_element(n);
    ComplexVector xi(n);
    xi[0] = 1.0;
    const DensityOperator state = DensityOperator::pure(xi);
    const complex delta = D_form(state, z, SimpleTensorSum::identity(n, 2));
    rows.push_back({n, operator_norm(tensor_operator(z)), delta.real()});
  }
  return rows;
}

}  // namespace histq
