// SPDX-License-Identifier: Apache-2.0
#pragma once

// Completely bounded norms of trace-free covariant maps
//   Psi(X) = l1 I(x)X + l2 X(x)I + l3 S(I(x)X) + l4 S(X(x)I).
//
// Only certified values are reported: exact values where a closed form
// applies, the corner upper bound on the variety l1 l2 = l3 l4, and sampled
// lower bounds everywhere else.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>

#include "covmap/classify.hpp"
#include "covmap/covmap2.hpp"
#include "covmap/operators.hpp"
#include "covmap/rng.hpp"

namespace covmap {

enum class ValueKind { exact, upper_bound, lower_bound, bracket };
enum class NormMethod { permutation_invariant, corner_bound, monte_carlo };

inline const char* to_string(ValueKind k) {
  switch (k) {
    case ValueKind::exact: return "exact";
    case ValueKind::upper_bound: return "upper_bound";
    case ValueKind::lower_bound: return "lower_bound";
    case ValueKind::bracket: return "bracket";
  }
  return "unknown";
}

inline const char* to_string(NormMethod m) {
  switch (m) {
    case NormMethod::permutation_invariant: return "permutation_invariant";
    case NormMethod::corner_bound: return "corner_bound";
    case NormMethod::monte_carlo: return "monte_carlo";
  }
  return "unknown";
}

struct CbNormResult {
  ValueKind kind = ValueKind::lower_bound;
  NormMethod method = NormMethod::monte_carlo;
  double lower = 0.0;  // equals upper for exact values
  double upper = 0.0;
  double psi_identity_norm = 0.0;
  /// |mu_1|..|mu_4| of the Q / Q_perp corner expansion, set whenever the
  /// coefficients lie on the variety l1 l2 = l3 l4.
  std::optional<std::array<double, 4>> corners;
  std::size_t samples = 0;  // Monte-Carlo samples used (0 if none)

  double value() const { return kind == ValueKind::lower_bound ? lower : upper; }
  bool operator==(const CbNormResult&) const = default;
};

namespace detail {
inline CovariantCoefficients require_trace_free(const CovariantCoefficients& c,
                                                const Tolerance& tol) {
  auto tf = trace_free_representative(c, tol);
  require(tf.has_value(), ErrorKind::trace_terms_present,
          "norms are defined for the trace-free family only (l5 = l6 = 0)");
  return *tf;
}
}  // namespace detail

/// ||Psi(I)|| = max{|l1+l2+l3+l4|, |l1+l2-l3-l4|} since Psi(I) = (l1+l2) I + (l3+l4) S.
inline double psi_identity_norm(const CovariantCoefficients& c, const Tolerance& tol = {}) {
  const auto tf = detail::require_trace_free(c, tol);
  const auto& l = tf.l;
  return std::max(std::abs(l[0] + l[1] + l[2] + l[3]), std::abs(l[0] + l[1] - l[2] - l[3]));
}

/// The same quantity by direct evaluation of ||Psi(I)||.
inline double psi_identity_norm_direct(const CovariantCoefficients& c, const Tolerance& tol = {}) {
  const auto tf = detail::require_trace_free(c, tol);
  return operator_norm(apply(tf, ComplexMatrix::identity(tf.d)));
}

/// Coefficients of Psi in the expansion
///   mu1 Q(I(x)X)Q + mu2 Q(I(x)X)Q_perp + mu3 Q_perp(I(x)X)Q + mu4 Q_perp(I(x)X)Q_perp.
inline std::array<cplx, 4> corner_coefficients(const CovariantCoefficients& c) {
  const auto& l = c.l;
  return {l[0] + l[1] + l[2] + l[3], l[0] - l[1] + l[2] - l[3], l[0] - l[1] - l[2] + l[3],
          l[0] + l[1] - l[2] - l[3]};
}

inline std::array<double, 4> corner_magnitudes(const CovariantCoefficients& c) {
  const auto mu = corner_coefficients(c);
  return {std::abs(mu[0]), std::abs(mu[1]), std::abs(mu[2]), std::abs(mu[3])};
}

/// l1 l2 = l3 l4, relative to the largest coefficient magnitude.
inline bool on_product_variety(const CovariantCoefficients& c, double rel = 1e-9) {
  const auto& l = c.l;
  const double scale = std::max({std::abs(l[0]), std::abs(l[1]), std::abs(l[2]), std::abs(l[3])});
  return std::abs(l[0] * l[1] - l[2] * l[3]) <= rel * scale * scale;
}

namespace detail {
// Sample k of the norm search: k = 0 is the identity, odd k a Haar unitary,
// even k a Gaussian Hermitian scaled to unit operator norm.
inline ComplexMatrix norm_probe(std::size_t d, RngSeed seed, std::size_t k) {
  if (k == 0) return ComplexMatrix::identity(d);
  const auto sub = seed.substream(k);
  if (k % 2 == 1) return haar_unitary(d, sub);
  Xoshiro256 rng(sub);
  ComplexMatrix h(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    h(i, i) = rng.normal();
    for (std::size_t j = i + 1; j < d; ++j) {
      const double re = rng.normal(), im = rng.normal();
      h(i, j) = cplx(re, im) / std::sqrt(2.0);
      h(j, i) = std::conj(h(i, j));
    }
  }
  const double n = operator_norm(h);
  if (n > 0.0) h *= 1.0 / n;
  return h;
}
}  // namespace detail

/// max over `samples` unit-norm probes X of ||Psi(X)||; a lower bound on
/// ||Psi|| <= ||Psi||_cb. The identity is always the first probe.
inline double monte_carlo_norm(const CovariantCoefficients& c, std::size_t samples, RngSeed seed,
                               const Tolerance& tol = {}) {
  const auto tf = detail::require_trace_free(c, tol);
  detail::require(samples >= 1, ErrorKind::invalid_argument, "samples must be >= 1");
  double best = 0.0;
  for (std::size_t k = 0; k < samples; ++k)
    best = std::max(best, operator_norm(apply(tf, detail::norm_probe(tf.d, seed, k))));
  return best;
}

inline CbNormResult cb_norm(const CovariantCoefficients& c, std::size_t samples, RngSeed seed,
                            const Tolerance& tol = {}) {
  const auto tf = detail::require_trace_free(c, tol);
  const auto& l = tf.l;
  CbNormResult out;
  out.psi_identity_norm = psi_identity_norm(tf, tol);

  const bool on_variety = on_product_variety(tf);
  const auto corners = corner_magnitudes(tf);
  const double corner_max = *std::max_element(corners.begin(), corners.end());
  if (on_variety && out.psi_identity_norm >= std::max(corners[1], corners[2]) - tol.bound(corner_max)) {
    out.kind = ValueKind::exact;
    out.method = NormMethod::corner_bound;
    out.lower = out.upper = out.psi_identity_norm;
    out.corners = corners;
    return out;
  }

  if (is_permutation_invariant(tf, tol)) {
    const cplx m1 = 0.5 * (l[0] + l[1]);
    const cplx m2 = 0.5 * (l[2] + l[3]);
    const double v = std::max(2.0 * std::abs(m1 + m2), 2.0 * std::abs(m1 - m2));
    out.kind = ValueKind::exact;
    out.method = NormMethod::permutation_invariant;
    out.lower = out.upper = v;
    return out;
  }

  if (on_variety) {
    out.kind = ValueKind::bracket;
    out.method = NormMethod::corner_bound;
    out.lower = monte_carlo_norm(tf, samples, seed, tol);
    out.upper = corner_max;
    out.corners = corners;
    out.samples = samples;
    return out;
  }

  // Each of the four terms has cb norm 1, so sum |l_i| is a certified upper bound.
  out.kind = ValueKind::bracket;
  out.method = NormMethod::monte_carlo;
  out.lower = monte_carlo_norm(tf, samples, seed, tol);
  out.upper = std::abs(l[0]) + std::abs(l[1]) + std::abs(l[2]) + std::abs(l[3]);
  out.samples = samples;
  return out;
}

/// Checks ||mu1 PAP + mu2 PAP_perp + mu3 P_perp AP + mu4 P_perp AP_perp||
/// <= max|mu_i| ||A|| for an orthogonal projector P and mu1 mu4 = mu2 mu3.
/// The witness is the slack (bound - norm).
inline Verdict corner_norm_bound_check(const ComplexMatrix& p, const ComplexMatrix& a,
                                       const std::array<cplx, 4>& mu, const Tolerance& tol = {}) {
  detail::require(p.is_square() && a.rows() == p.rows() && a.cols() == p.cols(),
                  ErrorKind::dimension_mismatch, "projector and operator shapes differ");
  const double pn = std::max(1.0, p.frobenius_norm());
  detail::require((p * p - p).frobenius_norm() <= tol.bound(pn) &&
                      hermiticity_defect(p) <= tol.bound(pn),
                  ErrorKind::not_projector, "p is not an orthogonal projector");
  const double mscale = std::max({std::abs(mu[0]), std::abs(mu[1]), std::abs(mu[2]),
                                  std::abs(mu[3])});
  detail::require(std::abs(mu[0] * mu[3] - mu[1] * mu[2]) <= tol.bound(mscale * mscale),
                  ErrorKind::invalid_argument, "corner coefficients violate mu1 mu4 = mu2 mu3");
  const auto q = ComplexMatrix::identity(p.rows()) - p;
  ComplexMatrix combo = mu[0] * (p * a * p);
  combo.axpy(mu[1], p * a * q);
  combo.axpy(mu[2], q * a * p);
  combo.axpy(mu[3], q * a * q);
  const double norm = operator_norm(combo);
  const double bound = mscale * operator_norm(a);
  return {norm <= bound + tol.bound(bound), bound - norm};
}

}  // namespace covmap
