// SPDX-License-Identifier: Apache-2.0
#pragma once

// Two-copy unitarily covariant maps X -> B(H (x) H) in the six-coefficient
// form
//
//   Phi(X) = l1 I(x)X + l2 X(x)I + l3 S(I(x)X) + l4 S(X(x)I)
//          + l5 tr(X) I(x)I + l6 tr(X) S.
//
// For d >= 3 the coefficients are unique. For d = 2 they are unique only up
// to shifts along g = (1, 1, -1, -1, -1, 1); gauge_reduce() picks the
// minimum-norm representative.

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <string>

#include "covmap/linalg.hpp"
#include "covmap/operators.hpp"

namespace covmap {

struct CovariantCoefficients {
  std::size_t d = 2;
  std::array<cplx, 6> l{};

  CovariantCoefficients() = default;
  CovariantCoefficients(std::size_t dim, std::array<cplx, 6> coeffs) : d(dim), l(coeffs) {
    detail::require(d >= 2, ErrorKind::dimension_mismatch,
                    "covariant coefficients need dimension d >= 2, got " + std::to_string(d));
  }

  bool operator==(const CovariantCoefficients&) const = default;

  bool trace_free(const Tolerance& tol = {}) const {
    const double scale = max_abs();
    return std::abs(l[4]) <= tol.bound(scale) && std::abs(l[5]) <= tol.bound(scale);
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& z : l) m = std::max(m, std::abs(z));
    return m;
  }
};

/// X -> 1/2 [S(I(x)X) + S(X(x)I)].
inline CovariantCoefficients virtual_broadcaster(std::size_t d) {
  return CovariantCoefficients(d, {0.0, 0.0, 0.5, 0.5, 0.0, 0.0});
}

/// The d = 2 gauge direction.
inline constexpr std::array<double, 6> gauge_direction{1.0, 1.0, -1.0, -1.0, -1.0, 1.0};

inline ComplexMatrix apply(const CovariantCoefficients& c, const ComplexMatrix& x) {
  const std::size_t d = c.d;
  detail::require(x.rows() == d && x.cols() == d, ErrorKind::dimension_mismatch,
                  "apply: input must be " + std::to_string(d) + "x" + std::to_string(d));
  const auto& l = c.l;
  const cplx tr = x.trace();
  ComplexMatrix out(d * d, d * d);
  for (std::size_t i1 = 0; i1 < d; ++i1)
    for (std::size_t i2 = 0; i2 < d; ++i2)
      for (std::size_t j1 = 0; j1 < d; ++j1)
        for (std::size_t j2 = 0; j2 < d; ++j2) {
          cplx v = 0.0;
          if (i1 == j1) v += l[0] * x(i2, j2);                 // I (x) X
          if (i2 == j2) v += l[1] * x(i1, j1);                 // X (x) I
          if (i2 == j1) v += l[2] * x(i1, j2);                 // S (I (x) X)
          if (i1 == j2) v += l[3] * x(i2, j1);                 // S (X (x) I)
          if (i1 == j1 && i2 == j2) v += l[4] * tr;            // tr(X) I (x) I
          if (i1 == j2 && i2 == j1) v += l[5] * tr;            // tr(X) S
          out(i1 * d + i2, j1 * d + j2) = v;
        }
  return out;
}

/// d^4 x d^2 matrix M with M vec(X) = vec(Phi(X)) (column stacking).
inline ComplexMatrix realize_superoperator(const CovariantCoefficients& c) {
  const std::size_t d = c.d;
  const std::size_t out_dim = d * d;
  ComplexMatrix m(out_dim * out_dim, d * d);
  for (std::size_t b = 0; b < d; ++b)
    for (std::size_t a = 0; a < d; ++a) {
      const auto col = vec(apply(c, matrix_unit(a + 1, b + 1, d)));
      const std::size_t k = a + b * d;
      for (std::size_t r = 0; r < col.size(); ++r) m(r, k) = col[r];
    }
  return m;
}

/// Superoperator of an arbitrary linear map on d x d inputs.
inline ComplexMatrix realize_map(const std::function<ComplexMatrix(const ComplexMatrix&)>& phi,
                                 std::size_t d) {
  std::optional<ComplexMatrix> m;
  for (std::size_t b = 0; b < d; ++b)
    for (std::size_t a = 0; a < d; ++a) {
      const auto col = vec(phi(matrix_unit(a + 1, b + 1, d)));
      if (!m) m.emplace(col.size(), d * d);
      for (std::size_t r = 0; r < col.size(); ++r) (*m)(r, a + b * d) = col[r];
    }
  return *m;
}

/// Choi matrix sum_ij E_ij (x) Phi(E_ij); PSD iff Phi is completely positive.
inline ComplexMatrix choi(const CovariantCoefficients& c) {
  const std::size_t d = c.d;
  const std::size_t n = d * d;
  ComplexMatrix out(d * n, d * n);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      const auto img = apply(c, matrix_unit(i + 1, j + 1, d));
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t s = 0; s < n; ++s) out(i * n + r, j * n + s) = img(r, s);
    }
  return out;
}

inline CovariantCoefficients gauge_reduce(const CovariantCoefficients& c) {
  if (c.d != 2) return c;
  cplx proj = 0.0;
  for (std::size_t k = 0; k < 6; ++k) proj += gauge_direction[k] * c.l[k];
  proj /= 6.0;
  CovariantCoefficients out = c;
  for (std::size_t k = 0; k < 6; ++k) out.l[k] -= proj * gauge_direction[k];
  return out;
}

inline bool maps_equal(const CovariantCoefficients& a, const CovariantCoefficients& b,
                       const Tolerance& tol = {}) {
  detail::require(a.d == b.d, ErrorKind::dimension_mismatch,
                  "maps_equal: coefficient dimensions differ");
  const auto ra = gauge_reduce(a);
  const auto rb = gauge_reduce(b);
  for (std::size_t k = 0; k < 6; ++k) {
    const double scale = std::max(std::abs(ra.l[k]), std::abs(rb.l[k]));
    if (std::abs(ra.l[k] - rb.l[k]) > tol.bound(scale)) return false;
  }
  return true;
}

/// A representative with l5 = l6 = 0 when one exists. At d = 2 a gauge
/// shift can remove the trace terms whenever l5 + l6 = 0.
inline std::optional<CovariantCoefficients> trace_free_representative(
    const CovariantCoefficients& c, const Tolerance& tol = {}) {
  if (c.trace_free(tol)) {
    auto out = c;
    out.l[4] = out.l[5] = 0.0;
    return out;
  }
  if (c.d != 2 || std::abs(c.l[4] + c.l[5]) > tol.bound(c.max_abs())) return std::nullopt;
  // c + mu g with mu = l5 zeroes both trace coefficients.
  auto out = c;
  const cplx mu = c.l[4];
  for (std::size_t k = 0; k < 6; ++k) out.l[k] += mu * gauge_direction[k];
  out.l[4] = out.l[5] = 0.0;
  return out;
}

struct Extraction {
  CovariantCoefficients coefficients;
  double residual = 0.0;  // operator norm of superop - realize(coefficients)
  bool covariant = false; // residual within tolerance
};

namespace detail {

inline std::size_t superop_dimension(const ComplexMatrix& superop) {
  const std::size_t d =
      static_cast<std::size_t>(std::llround(std::sqrt(double(superop.cols()))));
  require(d * d == superop.cols() && superop.rows() == d * d * d * d,
          ErrorKind::dimension_mismatch,
          "superoperator must be d^4 x d^2, got " + std::to_string(superop.rows()) + "x" +
              std::to_string(superop.cols()));
  return d;
}

inline Extraction finish_extraction(const ComplexMatrix& superop, CovariantCoefficients c,
                                    const Tolerance& tol) {
  const double residual = operator_norm(superop - realize_superoperator(c));
  const double scale = operator_norm(superop);
  return Extraction{c, residual, residual <= tol.bound(scale)};
}

}  // namespace detail

/// Reads the six coefficients off matrix elements of Phi(e1 e2^*) and
/// Phi(e1 e1^*); requires d >= 3 where they are unique. A non-covariant input
/// is not an error: it shows up as a large residual.
inline Extraction extract(const ComplexMatrix& superop, std::size_t d, const Tolerance& tol = {}) {
  detail::require(d >= 2, ErrorKind::dimension_mismatch,
                  "extract: dimension must be >= 2, got " + std::to_string(d));
  detail::require(d != 2, ErrorKind::gauge_ambiguous,
                  "extract: coefficients are not unique at d = 2 (use fit_coefficients)");
  detail::require(detail::superop_dimension(superop) == d, ErrorKind::dimension_mismatch,
                  "extract: superoperator does not match d = " + std::to_string(d));
  const std::size_t n = d * d;
  // Column of vec(E_ab) is a + b*d; output entry (r, s) sits at row r + s*n.
  auto image = [&](std::size_t a, std::size_t b) {
    const std::size_t col = a + b * d;
    return [&superop, col, n](std::size_t r, std::size_t s) { return superop(r + s * n, col); };
  };
  auto idx = [d](std::size_t i, std::size_t j) { return i * d + j; };  // e_i (x) e_j
  const auto y = image(0, 1);  // Phi(e1 e2^*)
  const auto z = image(0, 0);  // Phi(e1 e1^*)
  CovariantCoefficients c(d, {});
  c.l[0] = y(idx(2, 0), idx(2, 1));  // <e3 e1, Y e3 e2>
  c.l[1] = y(idx(0, 2), idx(1, 2));  // <e1 e3, Y e2 e3>
  c.l[2] = y(idx(0, 2), idx(2, 1));  // <e1 e3, Y e3 e2>
  c.l[3] = y(idx(2, 0), idx(1, 2));  // <e3 e1, Y e2 e3>
  c.l[4] = z(idx(1, 2), idx(1, 2));  // <e2 e3, Z e2 e3>
  c.l[5] = z(idx(2, 1), idx(1, 2));  // <e3 e2, Z e2 e3>
  return detail::finish_extraction(superop, c, tol);
}

/// Least-squares fit onto the six basis maps (Hilbert-Schmidt metric on
/// superoperators). Valid for every d; at d = 2 the minimum-norm solution is
/// the gauge-reduced representative.
inline Extraction fit_coefficients(const ComplexMatrix& superop, std::size_t d,
                                   const Tolerance& tol = {}) {
  detail::require(detail::superop_dimension(superop) == d, ErrorKind::dimension_mismatch,
                  "fit_coefficients: superoperator does not match d = " + std::to_string(d));
  std::array<ComplexMatrix, 6> basis;
  for (std::size_t k = 0; k < 6; ++k) {
    CovariantCoefficients unit(d, {});
    unit.l[k] = 1.0;
    basis[k] = realize_superoperator(unit);
  }
  ComplexMatrix gram(6, 6);
  std::vector<cplx> rhs(6);
  for (std::size_t a = 0; a < 6; ++a) {
    for (std::size_t b = 0; b < 6; ++b) gram(a, b) = hs_inner(basis[a], basis[b]);
    rhs[a] = hs_inner(basis[a], superop);
  }
  const auto sol = solve_psd_pinv(gram, rhs);
  CovariantCoefficients c(d, {});
  for (std::size_t k = 0; k < 6; ++k) c.l[k] = sol.x[k];
  if (d == 2) c = gauge_reduce(c);  // removes round-off along g
  return detail::finish_extraction(superop, c, tol);
}

}  // namespace covmap
