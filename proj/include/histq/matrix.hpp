#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

namespace histq {

using complex = std::complex<double>;
using ComplexVector = std::vector<complex>;

inline constexpr double kArithmeticTol = 1e-10;
inline constexpr double kValidationTol = 1e-8;

// Largest row or column count kron() will produce unless told otherwise.
inline constexpr std::size_t kDefaultKronCap = 4096;

/// Dense row-major complex matrix. Entries are finite on construction.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols);
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<complex> data);
  ComplexMatrix(std::initializer_list<std::initializer_list<complex>> rows);

  static ComplexMatrix identity(std::size_t n);
  static ComplexMatrix zeros(std::size_t rows, std::size_t cols) { return {rows, cols}; }
  static ComplexMatrix diagonal(std::span<const complex> diag);
  /// |u><v| with the conjugate on v.
  static ComplexMatrix outer(std::span<const complex> u, std::span<const complex> v);
  static ComplexMatrix column(std::span<const complex> v);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }
  bool empty() const noexcept { return data_.empty(); }

  complex& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const complex& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const complex> data() const noexcept { return data_; }
  std::span<complex> data() noexcept { return data_; }
  std::span<const complex> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  ComplexVector col(std::size_t j) const;

  ComplexMatrix& operator+=(const ComplexMatrix& other);
  ComplexMatrix& operator-=(const ComplexMatrix& other);
  ComplexMatrix& operator*=(complex s);

  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<complex> data_;
};

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(complex s, ComplexMatrix a);

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexVector matvec(const ComplexMatrix& a, std::span<const complex> v);
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b,
                   std::size_t max_dim = kDefaultKronCap);
ComplexVector kron(std::span<const complex> u, std::span<const complex> v);
ComplexMatrix adjoint(const ComplexMatrix& a);
complex trace(const ComplexMatrix& a);

/// <u, v>, conjugate-linear in u.
complex inner(std::span<const complex> u, std::span<const complex> v);
double norm(std::span<const complex> v);

double max_abs(const ComplexMatrix& a);
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);
double frobenius_norm(const ComplexMatrix& a);

struct EigenDecomposition {
  std::vector<double> values;  // descending
  ComplexMatrix vectors;       // columns, phase-normalized
};

// Cyclic complex Jacobi. Converged when the off-diagonal Frobenius norm
// drops below tol * ||a||_F.
inline constexpr int kJacobiMaxSweeps = 100;
EigenDecomposition hermitian_eig(const ComplexMatrix& a, double tol = kArithmeticTol);

/// A matrix-free linear map used by the norm estimator.
struct LinearMap {
  std::size_t dim_in = 0;
  std::size_t dim_out = 0;
  std::function<ComplexVector(std::span<const complex>)> apply;
  std::function<ComplexVector(std::span<const complex>)> apply_adjoint;
};

inline constexpr int kPowerIterationCap = 20000;

/// Largest singular value by power iteration on a^dagger a from a fixed start vector.
/// tol is relative.
double operator_norm(const LinearMap& a, double tol = 1e-12);
double operator_norm(const ComplexMatrix& a, double tol = 1e-12);


/// Coordinate-format matrix for factors that are mostly zero (rank-one
/// matrix units and the like). Entries are sorted row-major with no zeros.
class SparseMatrix {
 public:
  struct Entry {
    std::size_t row;
    std::size_t col;
    complex value;
  };

  SparseMatrix() = default;
  SparseMatrix(std::size_t rows, std::size_t cols, std::vector<Entry> entries);
  static SparseMatrix from_dense(const ComplexMatrix& m);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::span<const Entry> entries() const noexcept { return entries_; }

  ComplexMatrix to_dense() const;
  SparseMatrix adjoint() const;
  SparseMatrix scaled(complex s) const;
  ComplexVector apply(std::span<const complex> v) const;
  /// this * dense
  ComplexMatrix left_multiply(const ComplexMatrix& dense) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Entry> entries_;
};

}  // namespace histq
