#include "histq/history.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "histq/errors.hpp"

namespace histq {

namespace {

std::string fmt_residual(double r) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << r;
  return os.str();
}

}  // namespace

Projection Projection::validate(const ComplexMatrix& m, double tol) {
  if (!m.square()) throw ShapeError("projection must be square");
  const double adj = max_abs_diff(adjoint(m), m);
  if (adj > tol) {
    throw ValidationError("not self-adjoint: max residual " + fmt_residual(adj), adj);
  }
  const double idem = max_abs_diff(matmul(m, m), m);
  if (idem > tol) {
    throw ValidationError("not idempotent: max residual " + fmt_residual(idem), idem);
  }
  const double tr = trace(m).real();
  const double rank = std::round(tr);
  // trace of a projection is an integer; allow tol per unit of dimension
  if (std::abs(tr - rank) > tol * static_cast<double>(std::max<std::size_t>(1, m.rows()))) {
    throw ValidationError("trace " + std::to_string(tr) + " is not an integer", std::abs(tr - rank));
  }
  return {m, static_cast<std::size_t>(std::max(0.0, rank))};
}

Projection Projection::identity(std::size_t dim) { return {ComplexMatrix::identity(dim), dim}; }

Projection Projection::zero(std::size_t dim) { return {ComplexMatrix(dim, dim), 0}; }

Projection Projection::onto(std::span<const complex> v) {
  const double n = norm(v);
  if (n == 0.0) throw ValidationError("projection onto the zero vector");
  ComplexVector u(v.begin(), v.end());
  for (auto& z : u) z /= n;
  return {ComplexMatrix::outer(u, u), 1};
}

Projection Projection::onto_frame(const ComplexMatrix& frame, double tol) {
  return validate(matmul(frame, adjoint(frame)), tol);
}

Projection Projection::complement() const {
  return {ComplexMatrix::identity(dim()) - matrix_, dim() - rank_};
}

DensityOperator DensityOperator::from_matrix(const ComplexMatrix& m, double tol) {
  if (!m.square()) throw ShapeError("density matrix must be square");
  const complex tr = trace(m);
  if (std::abs(tr - 1.0) > tol) {
    throw ValidationError("density trace " + std::to_string(tr.real()) + " differs from 1",
                          std::abs(tr - 1.0));
  }
  const double asym = max_abs_diff(adjoint(m), m);
  if (asym > tol) throw ValidationError("density matrix not self-adjoint", asym);
  EigenDecomposition eig = hermitian_eig(0.5 * (m + adjoint(m)), std::min(tol, kArithmeticTol));
  std::vector<double> w = eig.values;
  double sum = 0.0;
  for (auto& x : w) {
    if (x < -tol) throw ValidationError("negative eigenvalue " + std::to_string(x), -x);
    x = std::max(x, 0.0);
    sum += x;
  }
  if (std::abs(sum - 1.0) > tol) {
    throw ValidationError("eigenvalues sum to " + std::to_string(sum), std::abs(sum - 1.0));
  }
  for (auto& x : w) x /= sum;
  return {std::move(w), std::move(eig.vectors)};
}

DensityOperator DensityOperator::from_spectral(std::vector<double> weights, ComplexMatrix vectors) {
  if (weights.size() != vectors.cols()) {
    throw ShapeError("density: " + std::to_string(weights.size()) + " weights for " +
                     std::to_string(vectors.cols()) + " vectors");
  }
  if (weights.empty()) throw ValidationError("density: no spectral components");
  double sum = 0.0;
  for (auto& x : weights) {
    if (x < -1e-12) throw ValidationError("density: negative weight " + std::to_string(x), -x);
    x = std::max(x, 0.0);
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-10) {
    throw ValidationError("density: weights sum to " + std::to_string(sum), std::abs(sum - 1.0));
  }
  const ComplexMatrix gram = matmul(adjoint(vectors), vectors);
  const double dev = max_abs_diff(gram, ComplexMatrix::identity(gram.rows()));
  if (dev > 1e-8) throw ValidationError("density: vectors not orthonormal", dev);
  return {std::move(weights), std::move(vectors)};
}

DensityOperator DensityOperator::pure(std::span<const complex> psi) {
  const double n = norm(psi);
  if (n == 0.0) throw ValidationError("density: zero state vector");
  std::vector<complex> v(psi.begin(), psi.end());
  for (auto& z : v) z /= n;
  const std::size_t dim = v.size();
  return {{1.0}, ComplexMatrix(dim, 1, std::move(v))};
}

ComplexMatrix DensityOperator::matrix() const {
  ComplexMatrix rho(dim(), dim());
  for (std::size_t i = 0; i < size(); ++i) {
    if (weights_[i] == 0.0) continue;
    const ComplexVector v = vector(i);
    rho += weights_[i] * ComplexMatrix::outer(v, v);
  }
  return rho;
}

DensityOperator DensityOperator::completed() const {
  const std::size_t d = dim();
  if (size() >= d) return *this;
  std::vector<ComplexVector> basis;
  for (std::size_t i = 0; i < size(); ++i) basis.push_back(vector(i));
  // Gram-Schmidt over the standard basis, twice for stability.
  for (std::size_t e = 0; e < d && basis.size() < d; ++e) {
    ComplexVector v(d);
    v[e] = 1.0;
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : basis) {
        const complex c = inner(b, v);
        for (std::size_t k = 0; k < d; ++k) v[k] -= c * b[k];
      }
    }
    const double n = norm(v);
    if (n < 1e-6) continue;
    for (auto& z : v) z /= n;
    basis.push_back(std::move(v));
  }
  ComplexMatrix vecs(d, d);
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t i = 0; i < d; ++i) vecs(i, j) = basis[j][i];
  std::vector<double> w(weights_.begin(), weights_.end());
  w.resize(d, 0.0);
  return {std::move(w), std::move(vecs)};
}

std::uint64_t DensityOperator::fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const void* p, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 0x100000001b3ULL;
    }
  };
  const std::uint64_t d = dim();
  mix(&d, sizeof d);
  mix(weights_.data(), weights_.size() * sizeof(double));
  mix(vectors_.data().data(), vectors_.data().size() * sizeof(complex));
  return h;
}

HomogeneousHistory::HomogeneousHistory(std::vector<Projection> projections)
    : projections_(std::move(projections)) {
  if (projections_.empty()) throw ValidationError("history order must be at least 1");
  for (const auto& p : projections_) {
    if (p.dim() != projections_.front().dim()) {
      throw ShapeError("history projections have differing dimensions");
    }
  }
}

HomogeneousHistory HomogeneousHistory::identity(std::size_t dim, std::size_t order) {
  return HomogeneousHistory(std::vector<Projection>(order, Projection::identity(dim)));
}

HomogeneousHistory HomogeneousHistory::padded(std::size_t order) const {
  if (order < this->order()) throw ShapeError("cannot pad a history to a smaller order");
  std::vector<Projection> ps(projections_.begin(), projections_.end());
  ps.resize(order, Projection::identity(single_dim()));
  return HomogeneousHistory(std::move(ps));
}

HistoryProjection::HistoryProjection(Projection p, std::size_t single_dim, std::size_t order)
    : projection_(std::move(p)), single_dim_(single_dim), order_(order) {
  if (order == 0 || single_dim == 0) throw ValidationError("history space needs d >= 1, n >= 1");
  std::size_t expect = 1;
  for (std::size_t i = 0; i < order; ++i) expect *= single_dim;
  if (projection_.dim() != expect) {
    throw ShapeError("history projection of dim " + std::to_string(projection_.dim()) +
                     " does not match d^n = " + std::to_string(expect));
  }
}

HistoryProjection HistoryProjection::identity(std::size_t single_dim, std::size_t order) {
  return {Projection::identity(tensor_dim(single_dim, order, SIZE_MAX)), single_dim, order};
}

HistoryProjection HistoryProjection::zero(std::size_t single_dim, std::size_t order) {
  return {Projection::zero(tensor_dim(single_dim, order, SIZE_MAX)), single_dim, order};
}

HistoryProjection HistoryProjection::complement() const {
  return {projection_.complement(), single_dim_, order_};
}

std::size_t tensor_dim(std::size_t single_dim, std::size_t order, std::size_t cap) {
  std::size_t dim = 1;
  for (std::size_t i = 0; i < order; ++i) {
    if (single_dim != 0 && dim > cap / single_dim) {
      throw SizeError("tensor dimension " + std::to_string(single_dim) + "^" + std::to_string(order) +
                      " exceeds cap " + std::to_string(cap));
    }
    dim *= single_dim;
  }
  if (dim > cap) throw SizeError("tensor dimension exceeds cap " + std::to_string(cap));
  return dim;
}

HistoryProjection embed_homogeneous(const HomogeneousHistory& h, std::size_t cap) {
  tensor_dim(h.single_dim(), h.order(), cap);
  ComplexMatrix m = h.at(0).matrix();
  for (std::size_t t = 1; t < h.order(); ++t) m = kron(m, h.at(t).matrix(), cap);
  return {Projection::validate(m, kValidationTol), h.single_dim(), h.order()};
}

bool orthogonal(const HistoryProjection& p, const HistoryProjection& q, double tol) {
  if (p.dim() != q.dim()) throw ShapeError("orthogonal: dimension mismatch");
  return max_abs(matmul(p.matrix(), q.matrix())) <= tol;
}

HistoryProjection sum_projection(std::span<const HistoryProjection> parts, std::size_t single_dim,
                                 std::size_t order, double tol) {
  HistoryProjection total = HistoryProjection::zero(single_dim, order);
  ComplexMatrix acc = total.matrix();
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i].dim() != acc.rows()) throw ShapeError("sum_projection: dimension mismatch");
    for (std::size_t j = 0; j < i; ++j) {
      if (!orthogonal(parts[i], parts[j], tol)) {
        const double r = max_abs(matmul(parts[i].matrix(), parts[j].matrix()));
        throw ValidationError("sum_projection: parts " + std::to_string(j) + " and " + std::to_string(i) +
                                  " are not orthogonal (residual " + fmt_residual(r) + ")",
                              r);
      }
    }
    acc += parts[i].matrix();
  }
  return {Projection::validate(acc, tol), single_dim, order};
}

}  // namespace histq
