#pragma once

// Test-only oracles, kept independent of the implementation paths they check.

#include "linalg.hpp"
#include "rng.hpp"

namespace ahmsim::oracle {

inline CMatrix random_complex(Rng& rng, long rows, long cols) {
  CMatrix m(rows, cols);
  for (long i = 0; i < rows; ++i)
    for (long j = 0; j < cols; ++j) m(i, j) = cx(rng.normal(), rng.normal());
  return m;
}

inline CMatrix random_hermitian(Rng& rng, long dim, double scale = 1.0) {
  const CMatrix m = random_complex(rng, dim, dim);
  return scale * 0.5 * (m + m.adjoint()).eval();
}

inline CVector random_state(Rng& rng, long dim) {
  CVector v(dim);
  for (long i = 0; i < dim; ++i) v[i] = cx(rng.normal(), rng.normal());
  return v / v.norm();
}

// Nested-loop Kronecker product.
inline CMatrix kron_loops(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (long i = 0; i < a.rows(); ++i)
    for (long j = 0; j < a.cols(); ++j)
      for (long k = 0; k < b.rows(); ++k)
        for (long l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

// 30-term Taylor series with scaling and squaring.
inline CMatrix taylor_expm(const CMatrix& a, int terms = 30) {
  int squarings = 0;
  double norm = a.cwiseAbs().maxCoeff() * a.rows();
  while (norm > 0.25) {
    norm /= 2.0;
    ++squarings;
  }
  const CMatrix scaled = a / std::pow(2.0, squarings);
  CMatrix sum = CMatrix::Identity(a.rows(), a.cols());
  CMatrix term = sum;
  for (int k = 1; k <= terms; ++k) {
    term = (term * scaled / static_cast<double>(k)).eval();
    sum += term;
  }
  for (int s = 0; s < squarings; ++s) sum = (sum * sum).eval();
  return sum;
}

// <psi|O|psi> by explicit loops.
inline double expect_loops(const CMatrix& o, const CVector& psi) {
  cx acc = 0.0;
  for (long i = 0; i < o.rows(); ++i)
    for (long j = 0; j < o.cols(); ++j) acc += std::conj(psi[i]) * o(i, j) * psi[j];
  return acc.real();
}

}  // namespace ahmsim::oracle
