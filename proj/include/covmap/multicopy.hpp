// SPDX-License-Identifier: Apache-2.0
#pragma once

// m-copy covariant maps T(H) -> B(H^{(x) m}):
//
//   Phi(X) = sum_{i, j} lam(i, j) Gamma(s_i) Phi_j(X),
//
// with s_i running over S_m in lexicographic order of one-line notation
// (identity first) and slots j = 1..m+1 where Phi_1(X) = tr(X) I and
// Phi_k(X) places X in tensor factor k-1. Indices below are 0-based:
// slot 0 is the trace slot, slot k >= 1 puts X in factor k.
//
// Two-copy dictionary (m = 2): (id, 0) = l5, (id, 1) = l2, (id, 2) = l1,
// (swap, 0) = l6, (swap, 1) = l4, (swap, 2) = l3.

#include <cmath>
#include <string>
#include <vector>

#include "covmap/covmap2.hpp"
#include "covmap/operators.hpp"
#include "covmap/rng.hpp"

namespace covmap {

inline constexpr std::size_t max_copies = 4;
inline constexpr std::size_t max_tensor_dimension = 256;

inline std::size_t factorial(std::size_t m) {
  std::size_t f = 1;
  for (std::size_t k = 2; k <= m; ++k) f *= k;
  return f;
}

namespace detail {
inline void check_multicopy_shape(std::size_t m, std::size_t d) {
  require(m >= 2, ErrorKind::invalid_argument, "multicopy maps need m >= 2 copies");
  require(d >= 2, ErrorKind::dimension_mismatch, "multicopy maps need d >= 2");
  require(m <= max_copies && int_pow(d, m) <= max_tensor_dimension,
          ErrorKind::dimension_mismatch,
          "multicopy size limit exceeded (m <= 4 and d^m <= 256), got m = " + std::to_string(m) +
              ", d = " + std::to_string(d));
}
}  // namespace detail

struct MultiCopyCoefficients {
  std::size_t m = 2;
  std::size_t d = 2;
  std::vector<cplx> lam;  // m! x (m+1), row-major

  MultiCopyCoefficients() : lam(factorial(2) * 3) {}
  MultiCopyCoefficients(std::size_t copies, std::size_t dim)
      : m(copies), d(dim), lam(factorial(copies) * (copies + 1)) {
    detail::check_multicopy_shape(m, d);
  }

  std::size_t permutations() const { return factorial(m); }
  std::size_t slots() const { return m + 1; }

  cplx& at(std::size_t perm, std::size_t slot) { return lam.at(perm * slots() + slot); }
  const cplx& at(std::size_t perm, std::size_t slot) const {
    return lam.at(perm * slots() + slot);
  }

  bool operator==(const MultiCopyCoefficients&) const = default;
};

/// Phi_j(X) for 0-based slot j: j = 0 gives tr(X) I^{(x) m}, j >= 1 places X
/// in tensor factor j.
inline ComplexMatrix slot_embedding(std::size_t slot, const ComplexMatrix& x, std::size_t m,
                                    std::size_t d) {
  detail::require(slot <= m, ErrorKind::invalid_argument,
                  "slot index " + std::to_string(slot) + " out of range 0.." + std::to_string(m));
  detail::require(x.rows() == d && x.cols() == d, ErrorKind::dimension_mismatch,
                  "slot_embedding: input must be d x d");
  const std::size_t dim = int_pow(d, m);
  if (slot == 0) {
    auto out = ComplexMatrix::identity(dim);
    out *= x.trace();
    return out;
  }
  const std::size_t left = int_pow(d, slot - 1);
  const std::size_t right = int_pow(d, m - slot);
  ComplexMatrix out(dim, dim);
  for (std::size_t a = 0; a < left; ++a)
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) {
        const cplx v = x(i, j);
        if (v == cplx{}) continue;
        for (std::size_t b = 0; b < right; ++b)
          out((a * d + i) * right + b, (a * d + j) * right + b) = v;
      }
  return out;
}

inline ComplexMatrix apply_multi(const MultiCopyCoefficients& mc, const ComplexMatrix& x) {
  detail::require(x.rows() == mc.d && x.cols() == mc.d, ErrorKind::dimension_mismatch,
                  "apply_multi: input must be d x d");
  const auto perms = all_permutations(mc.m);
  const std::size_t dim = int_pow(mc.d, mc.m);
  ComplexMatrix out(dim, dim);
  std::vector<std::vector<std::size_t>> maps;
  maps.reserve(perms.size());
  for (const auto& p : perms) maps.push_back(permutation_index_map(p, mc.d));
  for (std::size_t j = 0; j <= mc.m; ++j) {
    const auto emb = slot_embedding(j, x, mc.m, mc.d);
    for (std::size_t i = 0; i < perms.size(); ++i) {
      const cplx w = mc.at(i, j);
      if (w == cplx{}) continue;
      const auto& map = maps[i];
      for (std::size_t r = 0; r < dim; ++r) {
        const cplx* src = &emb(r, 0);
        cplx* dst = &out(map[r], 0);
        for (std::size_t c = 0; c < dim; ++c) dst[c] += w * src[c];
      }
    }
  }
  return out;
}

/// d^{2m} x d^2 superoperator (column stacking).
inline ComplexMatrix realize_multi(const MultiCopyCoefficients& mc) {
  return realize_map([&](const ComplexMatrix& x) { return apply_multi(mc, x); }, mc.d);
}

inline MultiCopyCoefficients from_two_copy(const CovariantCoefficients& c) {
  MultiCopyCoefficients mc(2, c.d);
  const auto& l = c.l;
  mc.at(0, 0) = l[4];
  mc.at(0, 1) = l[1];
  mc.at(0, 2) = l[0];
  mc.at(1, 0) = l[5];
  mc.at(1, 1) = l[3];
  mc.at(1, 2) = l[2];
  return mc;
}

inline CovariantCoefficients to_two_copy(const MultiCopyCoefficients& mc) {
  detail::require(mc.m == 2, ErrorKind::invalid_argument, "to_two_copy needs m = 2");
  return CovariantCoefficients(
      mc.d, {mc.at(0, 2), mc.at(0, 1), mc.at(1, 2), mc.at(1, 1), mc.at(0, 0), mc.at(1, 0)});
}

struct MultiExtraction {
  MultiCopyCoefficients coefficients;
  double residual = 0.0;
  bool covariant = false;
};

/// Recovers lam when d >= m+1. Slot j >= 1: Phi(e1 e2^*) applied to a basis
/// tensor carrying e2 in factor j and e3..e_{m+1} elsewhere yields the
/// Gamma(s_i)-permuted tensor with e2 replaced by e1, weighted by lam(i, j).
/// Trace slot: Phi(e1 e1^*) applied to e2 (x) ... (x) e_{m+1} has no slot
/// contributions, so its amplitude on Gamma(s_i) of that tensor is lam(i, 0).
inline MultiExtraction extract_multi(const ComplexMatrix& superop, std::size_t m, std::size_t d,
                                     const Tolerance& tol = {}) {
  detail::require(m >= 2, ErrorKind::invalid_argument, "extract_multi needs m >= 2");
  detail::require(d >= m + 1, ErrorKind::uniqueness_unavailable,
                  "coefficients are unique only for d >= m+1 (m = " + std::to_string(m) +
                      ", d = " + std::to_string(d) + ")");
  detail::check_multicopy_shape(m, d);
  const std::size_t dim = int_pow(d, m);
  detail::require(superop.rows() == dim * dim && superop.cols() == d * d,
                  ErrorKind::dimension_mismatch, "superoperator must be d^{2m} x d^2");

  auto element = [&](std::size_t a, std::size_t b, std::size_t r, std::size_t s) {
    return superop(r + s * dim, a + b * d);  // <e_r, Phi(E_ab) e_s>
  };
  auto flat = [&](const std::vector<std::size_t>& digits) {
    std::size_t idx = 0;
    for (auto v : digits) idx = idx * d + v;
    return idx;
  };

  const auto perms = all_permutations(m);
  MultiCopyCoefficients mc(m, d);
  for (std::size_t i = 0; i < perms.size(); ++i) {
    const auto map = permutation_index_map(perms[i], d);
    for (std::size_t slot = 1; slot <= m; ++slot) {
      std::vector<std::size_t> in(m), outd(m);
      std::size_t next = 2;  // e3 in 0-based digits
      for (std::size_t f = 0; f < m; ++f) {
        if (f + 1 == slot) {
          in[f] = 1;
          outd[f] = 0;
        } else {
          in[f] = outd[f] = next++;
        }
      }
      mc.at(i, slot) = element(0, 1, map[flat(outd)], flat(in));
    }
    std::vector<std::size_t> v(m);
    for (std::size_t f = 0; f < m; ++f) v[f] = f + 1;
    mc.at(i, 0) = element(0, 0, map[flat(v)], flat(v));
  }
  const double residual = operator_norm(superop - realize_multi(mc));
  const double scale = operator_norm(superop);
  return {mc, residual, residual <= tol.bound(scale)};
}

/// max over Haar samples U and matrix units X of
/// ||Phi(U X U^dagger) - U^{(x) m} Phi(X) U^{dagger (x) m}||.
inline double covariance_residual_multi(const ComplexMatrix& superop, std::size_t m,
                                        std::size_t d, std::size_t samples, RngSeed seed) {
  const std::size_t dim = int_pow(d, m);
  detail::require(superop.rows() == dim * dim && superop.cols() == d * d,
                  ErrorKind::dimension_mismatch, "superoperator must be d^{2m} x d^2");
  std::vector<ComplexMatrix> images;
  for (std::size_t b = 0; b < d; ++b)
    for (std::size_t a = 0; a < d; ++a)
      images.push_back(unvec(superop * std::span<const cplx>(vec(matrix_unit(a + 1, b + 1, d))),
                             dim, dim));
  double worst = 0.0;
  for (std::size_t k = 0; k < samples; ++k) {
    const auto u = haar_unitary(d, seed.substream(k));
    const auto ud = u.adjoint();
    const auto w = kron_power(u, m);
    const auto wd = w.adjoint();
    for (std::size_t b = 0; b < d; ++b)
      for (std::size_t a = 0; a < d; ++a) {
        const auto lhs = apply_superoperator(superop, u * matrix_unit(a + 1, b + 1, d) * ud);
        const auto rhs = w * images[a + b * d] * wd;
        worst = std::max(worst, operator_norm(lhs - rhs));
      }
  }
  return worst;
}

struct SchurWeylFit {
  std::vector<cplx> coefficients;  // one per permutation, lexicographic order
  double residual = 0.0;           // Frobenius norm
  bool degenerate = false;         // Gram matrix singular (possible for d < m)
};

/// Least-squares projection of t onto span{Gamma(s) : s in S_m}.
inline SchurWeylFit schur_weyl_fit(const ComplexMatrix& t, std::size_t m, std::size_t d) {
  detail::check_multicopy_shape(m, d);
  const std::size_t dim = int_pow(d, m);
  detail::require(t.rows() == dim && t.cols() == dim, ErrorKind::dimension_mismatch,
                  "schur_weyl_fit: operator must be d^m x d^m");
  const auto perms = all_permutations(m);
  const std::size_t n = perms.size();
  std::vector<std::vector<std::size_t>> maps;
  for (const auto& p : perms) maps.push_back(permutation_index_map(p, d));
  // Gamma(s) has unit entries at (map_s[idx], idx).
  ComplexMatrix gram(n, n);
  std::vector<cplx> rhs(n);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t u = 0; u < n; ++u) {
      std::size_t agree = 0;
      for (std::size_t idx = 0; idx < dim; ++idx) agree += maps[s][idx] == maps[u][idx];
      gram(s, u) = double(agree);
    }
    cplx b = 0.0;
    for (std::size_t idx = 0; idx < dim; ++idx) b += t(maps[s][idx], idx);
    rhs[s] = b;
  }
  const auto sol = solve_psd_pinv(gram, rhs, 1e-10);
  ComplexMatrix rest = t;
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t idx = 0; idx < dim; ++idx) rest(maps[s][idx], idx) -= sol.x[s];
  return {sol.x, rest.frobenius_norm(), sol.nullity > 0};
}

}  // namespace covmap
