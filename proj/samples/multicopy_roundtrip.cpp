// SPDX-License-Identifier: Apache-2.0
//
// Builds a random three-copy covariant map at d = 4, realizes it as a
// 4096 x 16 superoperator, recovers the coefficients, and fits a twirled
// operator onto the permutation operators.

#include <cstdio>

#include "covmap/covmap.hpp"

int main() {
  using namespace covmap;
  const std::size_t m = 3, d = 4;

  Xoshiro256 rng(RngSeed{5});
  MultiCopyCoefficients mc(m, d);
  for (auto& z : mc.lam) z = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};

  const auto superop = realize_multi(mc);
  std::printf("m = %zu, d = %zu: superoperator %zu x %zu\n", m, d, superop.rows(), superop.cols());
  const auto ex = extract_multi(superop, m, d);
  double gap = 0.0;
  for (std::size_t k = 0; k < mc.lam.size(); ++k)
    gap = std::max(gap, std::abs(ex.coefficients.lam[k] - mc.lam[k]));
  std::printf("  extraction residual %.2e, max coefficient gap %.2e\n", ex.residual, gap);
  std::printf("  covariance deviation over 3 unitaries %.2e\n",
              covariance_residual_multi(superop, m, d, 3, RngSeed{9}));

  // Averaging over U^{(x)3} pushes any operator into span Gamma(S_3).
  const std::size_t n = int_pow(3, m);
  ComplexMatrix t(n, n);
  for (auto& z : t.data()) z = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
  t *= 1.0 / t.frobenius_norm();
  for (std::size_t samples : {200u, 2000u}) {
    const auto fit = schur_weyl_fit(twirl_tensor_operator(t, m, 3, samples, RngSeed{1}), m, 3);
    std::printf("  tensor twirl with %4zu samples: fit residual %.3e\n", samples, fit.residual);
  }

  // Gamma(3-cycle) is fitted by a single unit coefficient once d >= m.
  const auto cycle = Permutation::parse("(1 2 3)", m);
  const auto fit = schur_weyl_fit(permutation_operator(cycle, 3), m, 3);
  const auto perms = all_permutations(m);
  for (std::size_t i = 0; i < perms.size(); ++i)
    if (std::abs(fit.coefficients[i]) > 1e-9)
      std::printf("  Gamma%s coefficient %.6f\n", perms[i].to_cycle_string().c_str(),
                  fit.coefficients[i].real());
  return 0;
}
