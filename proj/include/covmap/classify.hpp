// SPDX-License-Identifier: Apache-2.0
#pragma once

// Closed-form structural classification of two-copy covariant maps. Every
// verdict carries a numeric witness so reports can be audited: a margin
// (>= 0 when the property holds) or a defect (0 when it holds).

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "covmap/covmap2.hpp"

namespace covmap {

struct Verdict {
  bool holds = false;
  double witness = 0.0;

  explicit operator bool() const noexcept { return holds; }
  bool operator==(const Verdict&) const = default;
};

enum class CpVerdict { yes, no, numerical_only };

inline const char* to_string(CpVerdict v) {
  switch (v) {
    case CpVerdict::yes: return "yes";
    case CpVerdict::no: return "no";
    case CpVerdict::numerical_only: return "numerical-only";
  }
  return "unknown";
}

struct CpResult {
  CpVerdict verdict = CpVerdict::no;
  /// Complete positivity as decided: the closed form, or the Choi test when
  /// verdict is numerical_only.
  bool completely_positive = false;
  /// Closed-form margin, or the smallest Choi eigenvalue for numerical_only.
  double witness = 0.0;

  bool operator==(const CpResult&) const = default;
};

// ---------------------------------------------------------------------------
// Numeric cross-checks on the realized map. These do not use the coefficient
// criteria and serve as their oracles.

/// max over a Hermitian spanning set X of ||Phi(X)^dagger - Phi(X)||_F.
inline double hermiticity_preservation_defect(const CovariantCoefficients& c) {
  const std::size_t d = c.d;
  double worst = 0.0;
  auto check = [&](const ComplexMatrix& x) {
    worst = std::max(worst, hermiticity_defect(apply(c, x)));
  };
  for (std::size_t i = 1; i <= d; ++i) {
    check(matrix_unit(i, i, d));
    for (std::size_t j = i + 1; j <= d; ++j) {
      check(matrix_unit(i, j, d) + matrix_unit(j, i, d));
      check(cplx(0, 1) * (matrix_unit(i, j, d) - matrix_unit(j, i, d)));
    }
  }
  return worst;
}

/// max over matrix units of ||S Phi(E) S - Phi(E)||_F.
inline double permutation_invariance_defect(const CovariantCoefficients& c) {
  const auto s = swap_operator(c.d);
  double worst = 0.0;
  for (std::size_t i = 1; i <= c.d; ++i)
    for (std::size_t j = 1; j <= c.d; ++j) {
      const auto img = apply(c, matrix_unit(i, j, c.d));
      worst = std::max(worst, (s * img * s - img).frobenius_norm());
    }
  return worst;
}

/// max over matrix units E of ||tr_1 Phi(E) - E||_F and ||tr_2 Phi(E) - E||_F.
inline double broadcast_condition_defect(const CovariantCoefficients& c) {
  double worst = 0.0;
  for (std::size_t i = 1; i <= c.d; ++i)
    for (std::size_t j = 1; j <= c.d; ++j) {
      const auto e = matrix_unit(i, j, c.d);
      const auto img = apply(c, e);
      worst = std::max(worst, (partial_trace(TraceSide::first, img, c.d, c.d) - e).frobenius_norm());
      worst = std::max(worst, (partial_trace(TraceSide::second, img, c.d, c.d) - e).frobenius_norm());
    }
  return worst;
}

// ---------------------------------------------------------------------------
// Diagonal operation and classical broadcasting relative to an orthonormal
// basis, given as the columns of a unitary (identity = standard basis).

namespace detail {
inline ComplexMatrix basis_projector(const ComplexMatrix& basis, std::size_t i) {
  const std::size_t d = basis.rows();
  ComplexMatrix p(d, d);
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t s = 0; s < d; ++s) p(r, s) = basis(r, i) * std::conj(basis(s, i));
  return p;
}

inline cplx expectation(const ComplexMatrix& x, const ComplexMatrix& basis, std::size_t i) {
  // <X b_i, b_i>
  cplx s = 0.0;
  for (std::size_t r = 0; r < x.rows(); ++r)
    for (std::size_t c = 0; c < x.cols(); ++c)
      s += std::conj(basis(r, i)) * x(r, c) * basis(c, i);
  return s;
}
}  // namespace detail

/// D(X) = sum_i <X b_i, b_i> b_i b_i^*.
inline ComplexMatrix diagonal_map(const ComplexMatrix& x, const ComplexMatrix& basis) {
  ComplexMatrix out(x.rows(), x.cols());
  for (std::size_t i = 0; i < basis.cols(); ++i)
    out.axpy(detail::expectation(x, basis, i), detail::basis_projector(basis, i));
  return out;
}

/// (D (x) D)(Y) for Y on H (x) H.
inline ComplexMatrix diagonal_map2(const ComplexMatrix& y, const ComplexMatrix& basis) {
  const std::size_t d = basis.rows();
  ComplexMatrix out(d * d, d * d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      const auto pij = kron(detail::basis_projector(basis, i), detail::basis_projector(basis, j));
      // <Y (b_i (x) b_j), b_i (x) b_j> = tr(P_ij Y)
      out.axpy(hs_inner(pij, y), pij);
    }
  return out;
}

/// B_cl(X) = sum_i <X b_i, b_i> b_i b_i^* (x) b_i b_i^*.
inline ComplexMatrix classical_broadcast(const ComplexMatrix& x, const ComplexMatrix& basis) {
  const std::size_t d = basis.rows();
  ComplexMatrix out(d * d, d * d);
  for (std::size_t i = 0; i < d; ++i) {
    const auto p = detail::basis_projector(basis, i);
    out.axpy(detail::expectation(x, basis, i), kron(p, p));
  }
  return out;
}

inline ComplexMatrix classical_broadcast_superoperator(std::size_t d) {
  const auto basis = ComplexMatrix::identity(d);
  return realize_map([&](const ComplexMatrix& x) { return classical_broadcast(x, basis); }, d);
}

// ---------------------------------------------------------------------------
// Coefficient criteria.

inline Verdict is_self_adjoint(const CovariantCoefficients& c, const Tolerance& tol = {}) {
  auto coefficient_defect = [](const CovariantCoefficients& r) {
    const auto& l = r.l;
    return std::max({std::abs(l[0].imag()), std::abs(l[1].imag()), std::abs(l[4].imag()),
                     std::abs(l[5].imag()), std::abs(l[2] - std::conj(l[3]))});
  };
  const auto reduced = gauge_reduce(c);
  const double scale = reduced.max_abs();
  const double defect = coefficient_defect(reduced);
  if (defect <= tol.bound(scale)) return {true, defect};
  if (c.d == 2) {
    // The coefficient criterion holds only modulo gauge at d = 2; confirm on
    // the realized map.
    const double realized = hermiticity_preservation_defect(c);
    if (realized <= tol.bound(scale)) return {true, realized};
  }
  return {false, defect};
}

namespace detail {
// Positivity margins for self-adjoint (reduced) coefficients.
struct PositivityMargins {
  double sum;
  double block_min_eigenvalue;
  double dimension_condition;
};

inline PositivityMargins positivity_margins(const CovariantCoefficients& r) {
  const auto& l = r.l;
  const double m1 = l[0].real(), m2 = l[1].real(), m5 = l[4].real(), m6 = l[5].real();
  const cplx m3 = 0.5 * (l[2] + std::conj(l[3]));
  const double sum = m1 + m2 + 2.0 * m3.real() + m5 + m6;
  // [[m1 + m5, conj(m3) + m6], [m3 + m6, m2 + m5]]
  const double a = m1 + m5, b = m2 + m5;
  const double off = std::abs(m3 + m6);
  const double block_min = 0.5 * (a + b) - std::sqrt(0.25 * (a - b) * (a - b) + off * off);
  const double dim_cond = r.d >= 3 ? m5 - std::abs(m6) : m5 + m6;
  return {sum, block_min, dim_cond};
}
}  // namespace detail

inline Verdict is_positive(const CovariantCoefficients& c, const Tolerance& tol = {}) {
  const auto sa = is_self_adjoint(c, tol);
  if (!sa) return {false, -sa.witness};
  const auto r = gauge_reduce(c);
  const auto m = detail::positivity_margins(r);
  const double margin = std::min({m.sum, m.block_min_eigenvalue, m.dimension_condition});
  return {margin >= -tol.bound(r.max_abs()), margin};
}

/// Closed form for the trace-free family; the Choi test otherwise.
inline CpResult is_cp(const CovariantCoefficients& c, const Tolerance& tol = {}) {
  if (const auto tf = trace_free_representative(c, tol)) {
    const auto& l = tf->l;
    const double scale = tf->max_abs();
    const double bound = tol.bound(scale);
    const double imag_defect = std::max(std::abs(l[0].imag()), std::abs(l[1].imag()));
    const double conj_defect = std::abs(l[3] - std::conj(l[2]));
    const double product = l[0].real() * l[1].real() - std::norm(l[2]);
    const double margin = std::min({l[0].real(), l[1].real(), product / std::max(scale, 1.0),
                                    -imag_defect, -conj_defect});
    const bool ok = imag_defect <= bound && conj_defect <= bound && l[0].real() >= -bound &&
                    l[1].real() >= -bound && product >= -tol.bound(scale * scale);
    return {ok ? CpVerdict::yes : CpVerdict::no, ok, margin};
  }
  const auto ch = choi(c);
  const double defect = hermiticity_defect(ch);
  const double fro = ch.frobenius_norm();
  if (defect > tol.bound(fro)) return {CpVerdict::numerical_only, false, -defect};
  const auto ev = hermitian_eigenvalues(ch, tol);
  const double scale = std::max(std::abs(ev.front()), std::abs(ev.back()));
  return {CpVerdict::numerical_only, ev.front() >= -tol.bound(scale), ev.front()};
}

/// l1 = l2, d l1 + l3 + l4 = 1 and d l5 + l2 + l6 = 0.
inline Verdict satisfies_broadcast(const CovariantCoefficients& c, const Tolerance& tol = {}) {
  const auto& l = c.l;
  const double n = double(c.d);
  const double defect = std::max({std::abs(l[0] - l[1]), std::abs(n * l[0] + l[2] + l[3] - 1.0),
                                  std::abs(n * l[4] + l[1] + l[5])});
  return {defect <= tol.bound(std::max(1.0, c.max_abs())), defect};
}

inline Verdict is_permutation_invariant(const CovariantCoefficients& c, const Tolerance& tol = {}) {
  const auto r = gauge_reduce(c);
  const double defect = std::max(std::abs(r.l[0] - r.l[1]), std::abs(r.l[2] - r.l[3]));
  return {defect <= tol.bound(r.max_abs()), defect};
}

/// (D (x) D) o Phi o D = B_cl, checked on the basis projectors (off-diagonal
/// matrix units are annihilated by D and by B_cl alike).
inline Verdict is_classically_consistent(const CovariantCoefficients& c,
                                         const std::optional<ComplexMatrix>& basis = std::nullopt,
                                         const Tolerance& tol = {}) {
  const auto b = basis.value_or(ComplexMatrix::identity(c.d));
  detail::require(b.rows() == c.d && b.cols() == c.d, ErrorKind::dimension_mismatch,
                  "classical consistency basis must be d x d");
  double worst = 0.0;
  for (std::size_t i = 0; i < c.d; ++i) {
    const auto p = detail::basis_projector(b, i);
    const auto lhs = diagonal_map2(apply(c, diagonal_map(p, b)), b);
    worst = std::max(worst, (lhs - classical_broadcast(p, b)).frobenius_norm());
  }
  return {worst <= tol.bound(std::max(1.0, c.max_abs())), worst};
}

inline Verdict is_virtual_broadcaster(const CovariantCoefficients& c, const Tolerance& tol = {}) {
  const auto a = gauge_reduce(c);
  const auto b = gauge_reduce(virtual_broadcaster(c.d));
  double defect = 0.0;
  for (std::size_t k = 0; k < 6; ++k) defect = std::max(defect, std::abs(a.l[k] - b.l[k]));
  return {maps_equal(c, virtual_broadcaster(c.d), tol), defect};
}

struct CommutantFit {
  cplx alpha;
  cplx beta;
  double residual;  // Frobenius norm of t - alpha I - beta S
};

/// Hilbert-Schmidt projection of t onto span{I (x) I, S}.
inline CommutantFit commutant_fit(const ComplexMatrix& t, std::size_t d) {
  detail::require(d >= 2, ErrorKind::dimension_mismatch, "commutant_fit needs d >= 2");
  detail::require(t.rows() == d * d && t.cols() == d * d, ErrorKind::dimension_mismatch,
                  "commutant_fit: operator must be d^2 x d^2");
  const auto s = swap_operator(d);
  const cplx tr_t = t.trace();
  const cplx tr_st = hs_inner(s, t);
  const double dd = double(d);
  // [[d^2, d], [d, d^2]] (alpha, beta) = (tr t, tr S t)
  const double det = dd * dd * dd * dd - dd * dd;
  const cplx alpha = (dd * dd * tr_t - dd * tr_st) / det;
  const cplx beta = (dd * dd * tr_st - dd * tr_t) / det;
  ComplexMatrix rest = t;
  for (std::size_t i = 0; i < d * d; ++i) rest(i, i) -= alpha;
  rest.axpy(-beta, s);
  return {alpha, beta, rest.frobenius_norm()};
}

struct ConstraintSolve {
  CovariantCoefficients solution;  // minimum-norm solution
  std::size_t nullity = 0;         // dimension of the solution set
  ComplexMatrix null_basis;        // 6 x nullity (1x1 zero if nullity = 0)
  double equation_residual = 0.0;  // ||A x - b|| of the linear system
};

/// Solves, over coefficient space, the linear conditions for permutation
/// invariance (l1 = l2, l3 = l4) together with classical consistency
/// (D (x) D) o Phi o D = B_cl in the given basis.
inline ConstraintSolve solve_permutation_classical_constraints(
    std::size_t d, const std::optional<ComplexMatrix>& basis = std::nullopt) {
  const auto b = basis.value_or(ComplexMatrix::identity(d));
  // Accumulate the normal equations A^dagger A x = A^dagger rhs row by row.
  ComplexMatrix normal(6, 6);
  std::vector<cplx> rhs(6);
  std::vector<std::vector<cplx>> rows;
  std::vector<cplx> targets;
  auto add_row = [&](const std::array<cplx, 6>& a, cplx target) {
    for (std::size_t i = 0; i < 6; ++i) {
      for (std::size_t j = 0; j < 6; ++j) normal(i, j) += std::conj(a[i]) * a[j];
      rhs[i] += std::conj(a[i]) * target;
    }
    rows.emplace_back(a.begin(), a.end());
    targets.push_back(target);
  };
  add_row({1.0, -1.0, 0.0, 0.0, 0.0, 0.0}, 0.0);
  add_row({0.0, 0.0, 1.0, -1.0, 0.0, 0.0}, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    const auto p = detail::basis_projector(b, i);
    const auto dp = diagonal_map(p, b);
    std::array<ComplexMatrix, 6> images;
    for (std::size_t k = 0; k < 6; ++k) {
      CovariantCoefficients unit(d, {});
      unit.l[k] = 1.0;
      images[k] = diagonal_map2(apply(unit, dp), b);
    }
    const auto target = classical_broadcast(p, b);
    for (std::size_t r = 0; r < d * d; ++r)
      for (std::size_t s = 0; s < d * d; ++s) {
        std::array<cplx, 6> a;
        for (std::size_t k = 0; k < 6; ++k) a[k] = images[k](r, s);
        add_row(a, target(r, s));
      }
  }
  const auto sol = solve_psd_pinv(normal, rhs, 1e-10);
  ConstraintSolve out;
  out.solution = CovariantCoefficients(d, {});
  for (std::size_t k = 0; k < 6; ++k) out.solution.l[k] = sol.x[k];
  out.nullity = sol.nullity;
  out.null_basis = sol.null_basis;
  double res2 = 0.0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    cplx v = -targets[r];
    for (std::size_t k = 0; k < 6; ++k) v += rows[r][k] * sol.x[k];
    res2 += std::norm(v);
  }
  out.equation_residual = std::sqrt(res2);
  return out;
}

// ---------------------------------------------------------------------------

struct ClassificationReport {
  CovariantCoefficients coefficients;
  Verdict self_adjoint;
  Verdict positive;
  CpResult completely_positive;
  Verdict broadcasting;
  Verdict permutation_invariant;
  Verdict classically_consistent;
  Verdict virtual_broadcaster;
  /// Set when the coefficients were extracted from a superoperator.
  std::optional<double> extraction_residual;

  bool operator==(const ClassificationReport&) const = default;
};

inline ClassificationReport classify(const CovariantCoefficients& c, const Tolerance& tol = {},
                                     const std::optional<ComplexMatrix>& basis = std::nullopt) {
  ClassificationReport r;
  r.coefficients = c;
  r.self_adjoint = is_self_adjoint(c, tol);
  r.positive = is_positive(c, tol);
  r.completely_positive = is_cp(c, tol);
  r.broadcasting = satisfies_broadcast(c, tol);
  r.permutation_invariant = is_permutation_invariant(c, tol);
  r.classically_consistent = is_classically_consistent(c, basis, tol);
  r.virtual_broadcaster = is_virtual_broadcaster(c, tol);
  return r;
}

}  // namespace covmap
