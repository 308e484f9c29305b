// SPDX-License-Identifier: Apache-2.0
#pragma once

// Random inputs and brute-force oracles shared by the unit and acceptance tests.

#include <array>
#include <cstdint>

#include "covmap/covmap.hpp"

namespace covmap::testing {

inline ComplexMatrix random_matrix(std::size_t rows, std::size_t cols, Xoshiro256& rng) {
  ComplexMatrix m(rows, cols);
  for (auto& z : m.data()) z = cplx(rng.normal(), rng.normal());
  return m;
}

inline ComplexMatrix random_hermitian(std::size_t n, Xoshiro256& rng) {
  const auto a = random_matrix(n, n, rng);
  return 0.5 * (a + a.adjoint());
}

inline cplx random_complex(Xoshiro256& rng) {
  return {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
}

inline CovariantCoefficients random_coefficients(std::size_t d, Xoshiro256& rng) {
  std::array<cplx, 6> l;
  for (auto& z : l) z = random_complex(rng);
  return CovariantCoefficients(d, l);
}

inline CovariantCoefficients random_trace_free(std::size_t d, Xoshiro256& rng) {
  auto c = random_coefficients(d, rng);
  c.l[4] = c.l[5] = 0.0;
  return c;
}

/// Real l1, l2, l5, l6 and l4 = conj(l3).
inline CovariantCoefficients random_self_adjoint(std::size_t d, Xoshiro256& rng) {
  CovariantCoefficients c(d, {});
  c.l[0] = rng.uniform(-1.0, 1.0);
  c.l[1] = rng.uniform(-1.0, 1.0);
  c.l[2] = random_complex(rng);
  c.l[3] = std::conj(c.l[2]);
  c.l[4] = rng.uniform(-1.0, 1.0);
  c.l[5] = rng.uniform(-1.0, 1.0);
  return c;
}

/// The defining sum of six operator products, evaluated with kron and the
/// swap matrix. Independent of the index formulas inside apply().
inline ComplexMatrix oracle_apply(const CovariantCoefficients& c, const ComplexMatrix& x) {
  const std::size_t d = c.d;
  const auto id = ComplexMatrix::identity(d);
  const auto s = swap_operator(d);
  const auto ix = kron(id, x);
  const auto xi = kron(x, id);
  const auto ii = ComplexMatrix::identity(d * d);
  const cplx tr = x.trace();
  ComplexMatrix out = c.l[0] * ix;
  out.axpy(c.l[1], xi);
  out.axpy(c.l[2], s * ix);
  out.axpy(c.l[3], s * xi);
  out.axpy(c.l[4] * tr, ii);
  out.axpy(c.l[5] * tr, s);
  return out;
}

/// Matrix of a linear map built column by column from its action on E_ab.
inline ComplexMatrix oracle_superoperator(const CovariantCoefficients& c) {
  const std::size_t d = c.d;
  ComplexMatrix m(d * d * d * d, d * d);
  for (std::size_t b = 0; b < d; ++b)
    for (std::size_t a = 0; a < d; ++a) {
      const auto col = vec(oracle_apply(c, matrix_unit(a + 1, b + 1, d)));
      for (std::size_t r = 0; r < col.size(); ++r) m(r, a + b * d) = col[r];
    }
  return m;
}

inline double max_coefficient_gap(const CovariantCoefficients& a, const CovariantCoefficients& b) {
  double worst = 0.0;
  for (std::size_t k = 0; k < 6; ++k) worst = std::max(worst, std::abs(a.l[k] - b.l[k]));
  return worst;
}

}  // namespace covmap::testing
