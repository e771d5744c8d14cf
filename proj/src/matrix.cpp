#include "histq/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "histq/errors.hpp"

namespace histq {

namespace {

std::string shape_str(const ComplexMatrix& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  return os.str();
}

void require_same_shape(const ComplexMatrix& a, const ComplexMatrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError(std::string(op) + ": shape mismatch " + shape_str(a) + " vs " + shape_str(b));
  }
}

}  // namespace

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<complex> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw ShapeError("ComplexMatrix: " + std::to_string(data_.size()) + " entries for shape " +
                     std::to_string(rows_) + "x" + std::to_string(cols_));
  }
  for (const auto& z : data_) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      throw ValidationError("ComplexMatrix: non-finite entry");
    }
  }
}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<complex>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw ShapeError("ComplexMatrix: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const complex> diag) {
  ComplexMatrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

ComplexMatrix ComplexMatrix::outer(std::span<const complex> u, std::span<const complex> v) {
  ComplexMatrix m(u.size(), v.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] == complex{}) continue;
    for (std::size_t j = 0; j < v.size(); ++j) m(i, j) = u[i] * std::conj(v[j]);
  }
  return m;
}

ComplexMatrix ComplexMatrix::column(std::span<const complex> v) {
  return {v.size(), 1, std::vector<complex>(v.begin(), v.end())};
}

ComplexVector ComplexMatrix::col(std::size_t j) const {
  ComplexVector v(rows_);
  for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
  return v;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
  require_same_shape(*this, other, "add");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
  require_same_shape(*this, other, "subtract");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(complex s) {
  for (auto& z : data_) z *= s;
  return *this;
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
ComplexMatrix operator*(complex s, ComplexMatrix a) { return a *= s; }

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: " + shape_str(a) + " * " + shape_str(b));
  }
  ComplexMatrix c(a.rows(), b.cols());
  const std::size_t m = b.cols();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    complex* out = &c(i, 0);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const complex aik = a(i, k);
      if (aik == complex{}) continue;
      const complex* brow = &b(k, 0);
      for (std::size_t j = 0; j < m; ++j) out[j] += aik * brow[j];
    }
  }
  return c;
}

ComplexVector matvec(const ComplexMatrix& a, std::span<const complex> v) {
  if (a.cols() != v.size()) {
    throw ShapeError("matvec: " + shape_str(a) + " * vector of " + std::to_string(v.size()));
  }
  ComplexVector out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    complex acc{};
    const complex* arow = &a(i, 0);
    for (std::size_t k = 0; k < a.cols(); ++k) acc += arow[k] * v[k];
    out[i] = acc;
  }
  return out;
}

// Composite index i_left * dim_right + i_right; the left factor is the
// most significant.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b, std::size_t max_dim) {
  const std::size_t rows = a.rows() * b.rows();
  const std::size_t cols = a.cols() * b.cols();
  if (rows > max_dim || cols > max_dim) {
    throw SizeError("kron: result " + std::to_string(rows) + "x" + std::to_string(cols) +
                    " exceeds cap " + std::to_string(max_dim));
  }
  ComplexMatrix c(rows, cols);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const complex aij = a(i, j);
      if (aij == complex{}) continue;
      for (std::size_t k = 0; k < b.rows(); ++k) {
        complex* out = &c(i * b.rows() + k, j * b.cols());
        const complex* brow = &b(k, 0);
        for (std::size_t l = 0; l < b.cols(); ++l) out[l] = aij * brow[l];
      }
    }
  }
  return c;
}

ComplexVector kron(std::span<const complex> u, std::span<const complex> v) {
  ComplexVector out(u.size() * v.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] == complex{}) continue;
    for (std::size_t j = 0; j < v.size(); ++j) out[i * v.size() + j] = u[i] * v[j];
  }
  return out;
}

ComplexMatrix adjoint(const ComplexMatrix& a) {
  ComplexMatrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = std::conj(a(i, j));
  return t;
}

complex trace(const ComplexMatrix& a) {
  if (!a.square()) throw ShapeError("trace: non-square " + shape_str(a));
  complex t{};
  for (std::size_t i = 0; i < a.rows(); ++i) t += a(i, i);
  return t;
}

complex inner(std::span<const complex> u, std::span<const complex> v) {
  if (u.size() != v.size()) throw ShapeError("inner: length mismatch");
  complex acc{};
  for (std::size_t i = 0; i < u.size(); ++i) acc += std::conj(u[i]) * v[i];
  return acc;
}

double norm(std::span<const complex> v) {
  double acc = 0.0;
  for (const auto& z : v) acc += std::norm(z);
  return std::sqrt(acc);
}

double max_abs(const ComplexMatrix& a) {
  double m = 0.0;
  for (const auto& z : a.data()) m = std::max(m, std::abs(z));
  return m;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_shape(a, b, "max_abs_diff");
  double m = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

double frobenius_norm(const ComplexMatrix& a) { return norm(a.data()); }

namespace {

double off_diagonal_norm(const ComplexMatrix& a) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) acc += std::norm(a(i, j));
  return std::sqrt(acc);
}

// Zero a(p,q) with a unitary plane rotation J; a <- J^dagger a J, v <- v J.
void jacobi_rotate(ComplexMatrix& a, ComplexMatrix& v, std::size_t p, std::size_t q) {
  const complex apq = a(p, q);
  const double mag = std::abs(apq);
  if (mag == 0.0) return;
  const complex phase = apq / mag;
  const double tau = (a(q, q).real() - a(p, p).real()) / (2.0 * mag);
  const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  const double s = t * c;

  // Columns of J: col p = (c, -s conj(phase)), col q = (s phase, c) on rows (p, q).
  const complex jpp = c, jqp = -s * std::conj(phase), jpq = s * phase, jqq = c;
  const std::size_t n = a.rows();
  for (std::size_t k = 0; k < n; ++k) {
    const complex akp = a(k, p), akq = a(k, q);
    a(k, p) = akp * jpp + akq * jqp;
    a(k, q) = akp * jpq + akq * jqq;
  }
  for (std::size_t k = 0; k < n; ++k) {
    const complex apk = a(p, k), aqk = a(q, k);
    a(p, k) = std::conj(jpp) * apk + std::conj(jqp) * aqk;
    a(q, k) = std::conj(jpq) * apk + std::conj(jqq) * aqk;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  a(p, p) = a(p, p).real();
  a(q, q) = a(q, q).real();
  for (std::size_t k = 0; k < n; ++k) {
    const complex vkp = v(k, p), vkq = v(k, q);
    v(k, p) = vkp * jpp + vkq * jqp;
    v(k, q) = vkp * jpq + vkq * jqq;
  }
}

std::size_t first_nonzero(const ComplexMatrix& v, std::size_t col) {
  for (std::size_t i = 0; i < v.rows(); ++i)
    if (std::abs(v(i, col)) > 1e-10) return i;
  return v.rows();
}

}  // namespace

EigenDecomposition hermitian_eig(const ComplexMatrix& a, double tol) {
  if (!a.square()) throw ShapeError("hermitian_eig: non-square " + shape_str(a));
  const std::size_t n = a.rows();
  double asym = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) asym = std::max(asym, std::abs(a(i, j) - std::conj(a(j, i))));
  if (asym > tol) {
    throw ValidationError("hermitian_eig: matrix not self-adjoint (residual " + std::to_string(asym) + ")",
                          asym);
  }

  ComplexMatrix work(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) work(i, j) = 0.5 * (a(i, j) + std::conj(a(j, i)));
  ComplexMatrix vecs = ComplexMatrix::identity(n);

  const double scale = frobenius_norm(work);
  const double target = tol * scale;
  bool converged = off_diagonal_norm(work) <= target;
  for (int sweep = 0; sweep < kJacobiMaxSweeps && !converged; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) jacobi_rotate(work, vecs, p, q);
    converged = off_diagonal_norm(work) <= target;
  }
  if (!converged) {
    throw NumericalError("hermitian_eig: no convergence after " + std::to_string(kJacobiMaxSweeps) +
                         " sweeps");
  }

  // Phase-normalize: first nonzero component positive real.
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t lead = first_nonzero(vecs, j);
    if (lead == n) continue;
    const complex z = vecs(lead, j);
    const complex rot = std::conj(z) / std::abs(z);
    for (std::size_t i = 0; i < n; ++i) vecs(i, j) *= rot;
    vecs(lead, j) = vecs(lead, j).real();
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return work(x, x).real() > work(y, y).real(); });
  // Within a cluster of (numerically) equal eigenvalues, order by leading component index.
  const double tie = std::max(tol, 1e-12) * std::max(1.0, scale);
  for (std::size_t start = 0; start < n;) {
    std::size_t end = start + 1;
    while (end < n && work(order[start], order[start]).real() - work(order[end], order[end]).real() <= tie) ++end;
    std::stable_sort(order.begin() + static_cast<std::ptrdiff_t>(start), order.begin() + static_cast<std::ptrdiff_t>(end),
                     [&](std::size_t x, std::size_t y) { return first_nonzero(vecs, x) < first_nonzero(vecs, y); });
    start = end;
  }

  EigenDecomposition out;
  out.values.resize(n);
  out.vectors = ComplexMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = work(order[k], order[k]).real();
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = vecs(i, order[k]);
  }
  return out;
}

double operator_norm(const LinearMap& a, double tol) {
  if (a.dim_in == 0 || a.dim_out == 0) return 0.0;
  ComplexVector v(a.dim_in);
  for (std::size_t i = 0; i < a.dim_in; ++i) {
    const double x = static_cast<double>(i);
    v[i] = complex(1.0 + 0.3 * std::cos(1.7 * x), 0.2 * std::sin(2.3 * x));
  }
  double nv = norm(v);
  for (auto& z : v) z /= nv;

  double lambda = -1.0;
  for (int it = 0; it < kPowerIterationCap; ++it) {
    const ComplexVector w = a.apply(v);
    const double next = std::pow(norm(w), 2);
    ComplexVector u = a.apply_adjoint(w);
    const double nu = norm(u);
    if (nu == 0.0) return std::sqrt(next);
    for (auto& z : u) z /= nu;
    v = std::move(u);
    if (std::abs(next - lambda) <= tol * next) return std::sqrt(std::max(next, lambda));
    lambda = next;
  }
  throw NumericalError("operator_norm: power iteration did not converge");
}

double operator_norm(const ComplexMatrix& a, double tol) {
  const ComplexMatrix ah = adjoint(a);
  LinearMap map{a.cols(), a.rows(),
                [&a](std::span<const complex> x) { return matvec(a, x); },
                [&ah](std::span<const complex> x) { return matvec(ah, x); }};
  return operator_norm(map, tol);
}

}  // namespace histq

namespace histq {

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols, std::vector<Entry> entries)
    : rows_(rows), cols_(cols) {
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  for (const auto& e : entries) {
    if (e.row >= rows || e.col >= cols) throw ShapeError("SparseMatrix: entry out of range");
    if (!std::isfinite(e.value.real()) || !std::isfinite(e.value.imag())) {
      throw ValidationError("SparseMatrix: non-finite entry");
    }
    if (!entries_.empty() && entries_.back().row == e.row && entries_.back().col == e.col) {
      entries_.back().value += e.value;
    } else {
      entries_.push_back(e);
    }
  }
  std::erase_if(entries_, [](const Entry& e) { return e.value == complex{}; });
}

SparseMatrix SparseMatrix::from_dense(const ComplexMatrix& m) {
  std::vector<Entry> entries;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (m(i, j) != complex{}) entries.push_back({i, j, m(i, j)});
  SparseMatrix s;
  s.rows_ = m.rows();
  s.cols_ = m.cols();
  s.entries_ = std::move(entries);
  return s;
}

ComplexMatrix SparseMatrix::to_dense() const {
  ComplexMatrix m(rows_, cols_);
  for (const auto& e : entries_) m(e.row, e.col) = e.value;
  return m;
}

SparseMatrix SparseMatrix::adjoint() const {
  std::vector<Entry> t;
  t.reserve(entries_.size());
  for (const auto& e : entries_) t.push_back({e.col, e.row, std::conj(e.value)});
  return {cols_, rows_, std::move(t)};
}

SparseMatrix SparseMatrix::scaled(complex s) const {
  SparseMatrix out = *this;
  for (auto& e : out.entries_) e.value *= s;
  std::erase_if(out.entries_, [](const Entry& e) { return e.value == complex{}; });
  return out;
}

ComplexVector SparseMatrix::apply(std::span<const complex> v) const {
  if (v.size() != cols_) throw ShapeError("SparseMatrix::apply: length mismatch");
  ComplexVector out(rows_);
  for (const auto& e : entries_) out[e.row] += e.value * v[e.col];
  return out;
}

ComplexMatrix SparseMatrix::left_multiply(const ComplexMatrix& dense) const {
  if (dense.rows() != cols_) throw ShapeError("SparseMatrix::left_multiply: shape mismatch");
  ComplexMatrix out(rows_, dense.cols());
  for (const auto& e : entries_) {
    const complex* src = &dense(e.col, 0);
    complex* dst = &out(e.row, 0);
    for (std::size_t j = 0; j < dense.cols(); ++j) dst[j] += e.value * src[j];
  }
  return out;
}

}  // namespace histq
