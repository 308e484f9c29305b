// SPDX-License-Identifier: Apache-2.0
//
// Classifies the virtual broadcaster and the twirled classical broadcaster,
// then checks the broadcast condition on a random input.

#include <cstdio>

#include "covmap/covmap.hpp"

int main() {
  using namespace covmap;
  const std::size_t d = 3;

  const auto vb = virtual_broadcaster(d);
  const auto report = classify(vb);
  std::printf("virtual broadcaster, d = %zu\n", d);
  std::printf("  self-adjoint %d  positive %d (witness %.3g)  CP %s\n", report.self_adjoint.holds,
              report.positive.holds, report.positive.witness,
              to_string(report.completely_positive.verdict));
  std::printf("  broadcasting %d  permutation-invariant %d  classically consistent %d\n",
              report.broadcasting.holds, report.permutation_invariant.holds,
              report.classically_consistent.holds);

  // tr_1 and tr_2 of the output both return the input.
  Xoshiro256 rng(RngSeed{11});
  ComplexMatrix x(d, d);
  for (auto& z : x.data()) z = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
  const auto y = apply(vb, x);
  std::printf("  ||tr_1 Phi(X) - X|| = %.2e, ||tr_2 Phi(X) - X|| = %.2e\n",
              (partial_trace(TraceSide::first, y, d, d) - x).max_abs(),
              (partial_trace(TraceSide::second, y, d, d) - x).max_abs());

  const auto cb = cb_norm(vb, 200, RngSeed{1});
  std::printf("  cb-norm %.6f (%s, %s)\n\n", cb.value(), to_string(cb.kind), to_string(cb.method));

  // The classical broadcaster is not covariant; its twirl is.
  const auto bcl = classical_broadcast_superoperator(d);
  const auto tw = twirl(bcl, d, 2000, RngSeed{7});
  std::printf("twirled classical broadcaster, %zu samples\n", tw.samples);
  std::printf("  covariance deviation %.3f -> %.3f, extraction residual %.3e\n",
              tw.deviation_before, tw.deviation_after, tw.residual);
  for (std::size_t k = 0; k < 6; ++k)
    std::printf("  l%zu = %+.5f %+.5fi\n", k + 1, tw.coefficients.l[k].real(),
                tw.coefficients.l[k].imag());
  const auto twr = classify(tw.coefficients, Tolerance{1e-2, 1e-2});
  std::printf("  positive %d  broadcasting %d\n", twr.positive.holds, twr.broadcasting.holds);
  return 0;
}
