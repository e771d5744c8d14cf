#pragma once

#include <cmath>

#include <doctest.h>

#include "histq/history.hpp"

namespace histq::test {

inline const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

inline ComplexVector ket(std::initializer_list<complex> v) { return ComplexVector(v); }
inline ComplexVector basis(std::size_t dim, std::size_t i) {
  ComplexVector v(dim);
  v[i] = 1.0;
  return v;
}
inline ComplexVector plus() { return {kInvSqrt2, kInvSqrt2}; }
inline ComplexVector minus() { return {kInvSqrt2, -kInvSqrt2}; }

inline Projection P0() { return Projection::onto(basis(2, 0)); }
inline Projection P1() { return Projection::onto(basis(2, 1)); }
inline Projection Pplus() { return Projection::onto(plus()); }
inline Projection Pminus() { return Projection::onto(minus()); }

inline HomogeneousHistory hist(std::initializer_list<Projection> ps) { return HomogeneousHistory(ps); }

}  // namespace histq::test
