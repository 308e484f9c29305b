// SPDX-License-Identifier: Apache-2.0
#pragma once

// Monte-Carlo Haar twirling. The twirl of Phi is the Haar average of
//   X -> (U (x) U)^dagger Phi(U X U^dagger) (U (x) U),
// whose fixed points are exactly the covariant maps. Exact averaging would
// need a unitary 3-design; we sample instead and report the sample count.

#include <cmath>
#include <cstdint>

#include "covmap/covmap2.hpp"
#include "covmap/multicopy.hpp"
#include "covmap/operators.hpp"
#include "covmap/rng.hpp"

namespace covmap {

/// Samples used for the before/after covariance deviation in twirl().
inline constexpr std::size_t twirl_deviation_samples = 20;

struct TwirlOptions {
  /// Forces sample 0 to be the identity (degenerate single-sample checks).
  bool identity_first = false;
  std::size_t deviation_samples = twirl_deviation_samples;
};

struct TwirlResult {
  CovariantCoefficients coefficients;
  double residual = 0.0;  // extraction residual of the averaged superoperator
  std::size_t samples = 0;
  double deviation_before = 0.0;
  double deviation_after = 0.0;
  RngSeed seed;
  ComplexMatrix averaged;  // d^4 x d^2
};

/// max over Haar samples and matrix units of ||Phi(UXU^dagger) - (U(x)U)Phi(X)(U(x)U)^dagger||.
inline double covariance_deviation(const ComplexMatrix& superop, std::size_t d,
                                   std::size_t samples, RngSeed seed) {
  return covariance_residual_multi(superop, 2, d, samples, seed);
}

namespace detail {
inline ComplexMatrix twirl_sample_unitary(std::size_t d, RngSeed seed, std::size_t k,
                                          bool identity_first) {
  if (identity_first && k == 0) return ComplexMatrix::identity(d);
  return haar_unitary(d, seed.substream(k));
}

// Independent stream for deviation estimates so they do not reuse the
// averaging unitaries.
inline RngSeed deviation_seed(RngSeed seed) {
  return RngSeed{seed.value ^ 0xd1b54a32d192ed03ULL};
}
}  // namespace detail

/// Haar average of the conjugated superoperator, without extraction.
inline ComplexMatrix twirl_superoperator(const ComplexMatrix& superop, std::size_t d,
                                         std::size_t samples, RngSeed seed,
                                         bool identity_first = false) {
  detail::require(samples >= 1, ErrorKind::invalid_argument, "twirl needs samples >= 1");
  detail::require(detail::superop_dimension(superop) == d, ErrorKind::dimension_mismatch,
                  "twirl: superoperator does not match d = " + std::to_string(d));
  const std::size_t n = d * d;
  ComplexMatrix acc(n * n, n);
  for (std::size_t k = 0; k < samples; ++k) {
    const auto u = detail::twirl_sample_unitary(d, seed, k, identity_first);
    const auto ud = u.adjoint();
    const auto w = kron(u, u);
    const auto wd = w.adjoint();
    for (std::size_t b = 0; b < d; ++b)
      for (std::size_t a = 0; a < d; ++a) {
        // U E_ab U^dagger = u_a u_b^dagger
        ComplexMatrix x(d, d);
        for (std::size_t r = 0; r < d; ++r)
          for (std::size_t s = 0; s < d; ++s) x(r, s) = u(r, a) * ud(b, s);
        const auto z = wd * apply_superoperator(superop, x) * w;
        const auto col = vec(z);
        const std::size_t c = a + b * d;
        for (std::size_t r = 0; r < col.size(); ++r) acc(r, c) += col[r];
      }
  }
  acc *= 1.0 / double(samples);
  return acc;
}

inline TwirlResult twirl(const ComplexMatrix& superop, std::size_t d, std::size_t samples,
                         RngSeed seed, const TwirlOptions& opts = {},
                         const Tolerance& tol = {}) {
  TwirlResult out;
  out.averaged = twirl_superoperator(superop, d, samples, seed, opts.identity_first);
  const auto ex = d >= 3 ? extract(out.averaged, d, tol) : fit_coefficients(out.averaged, d, tol);
  out.coefficients = ex.coefficients;
  out.residual = ex.residual;
  out.samples = samples;
  out.seed = seed;
  if (opts.deviation_samples > 0) {
    const auto dseed = detail::deviation_seed(seed);
    out.deviation_before = covariance_deviation(superop, d, opts.deviation_samples, dseed);
    out.deviation_after = covariance_deviation(out.averaged, d, opts.deviation_samples, dseed);
  }
  return out;
}

/// Haar average of U^{(x) m} t U^{dagger (x) m}; approaches the commutant
/// span{Gamma(s)} as samples grow.
inline ComplexMatrix twirl_tensor_operator(const ComplexMatrix& t, std::size_t m, std::size_t d,
                                           std::size_t samples, RngSeed seed) {
  detail::require(samples >= 1, ErrorKind::invalid_argument, "twirl needs samples >= 1");
  const std::size_t dim = int_pow(d, m);
  detail::require(t.rows() == dim && t.cols() == dim, ErrorKind::dimension_mismatch,
                  "twirl_tensor_operator: operator must be d^m x d^m");
  ComplexMatrix acc(dim, dim);
  for (std::size_t k = 0; k < samples; ++k) {
    const auto w = kron_power(haar_unitary(d, seed.substream(k)), m);
    acc += w * t * w.adjoint();
  }
  acc *= 1.0 / double(samples);
  return acc;
}

}  // namespace covmap
