// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include "test_support.hpp"

using namespace covmap;
using namespace covmap::testing;

TEST_CASE("covariance deviation examples", "[twirl]") {
  Xoshiro256 rng(RngSeed{81});
  const auto c = random_coefficients(3, rng);
  CHECK(covariance_deviation(realize_superoperator(c), 3, 5, RngSeed{1}) < 1e-10);
  CHECK(covariance_deviation(classical_broadcast_superoperator(2), 2, 5, RngSeed{1}) > 0.1);
  CHECK(covariance_deviation(ComplexMatrix(16, 4), 2, 5, RngSeed{1}) == 0.0);
}

TEST_CASE("covariant input is a fixed point", "[twirl]") {
  Xoshiro256 rng(RngSeed{82});
  const auto c = random_coefficients(3, rng);
  const auto r = twirl(realize_superoperator(c), 3, 500, RngSeed{2});
  CHECK(max_coefficient_gap(r.coefficients, c) < 1e-8);
  CHECK(r.residual < 1e-10);
  CHECK(r.deviation_after < 1e-10);
  CHECK(r.samples == 500);
}

TEST_CASE("identity-first single sample leaves the input unchanged", "[twirl]") {
  const auto b = classical_broadcast_superoperator(3);
  TwirlOptions opts;
  opts.identity_first = true;
  const auto r = twirl(b, 3, 1, RngSeed{3}, opts);
  CHECK((r.averaged - b).max_abs() < 1e-15);
}

TEST_CASE("twirling the classical broadcaster", "[twirl]") {
  const auto b = classical_broadcast_superoperator(3);
  const auto r = twirl(b, 3, 10000, RngSeed{4});
  CHECK(covariance_deviation(r.averaged, 3, 20, RngSeed{40}) < 5e-2);
  CHECK(r.deviation_before > 0.1);
  CHECK(r.deviation_after < r.deviation_before / 10.0);

  std::vector<double> residuals;
  for (std::size_t n : {100u, 1000u, 10000u})
    residuals.push_back(twirl(b, 3, n, RngSeed{4}, {false, 0}).residual);
  CHECK(residuals[1] < residuals[0]);
  CHECK(residuals[2] < residuals[1]);
}

TEST_CASE("twirl is deterministic per seed", "[twirl]") {
  const auto b = classical_broadcast_superoperator(3);
  const auto r1 = twirl(b, 3, 50, RngSeed{5});
  const auto r2 = twirl(b, 3, 50, RngSeed{5});
  CHECK(r1.averaged == r2.averaged);
  CHECK(r1.coefficients == r2.coefficients);
  CHECK(r1.deviation_after == r2.deviation_after);
  CHECK_FALSE(twirl(b, 3, 50, RngSeed{6}).averaged == r1.averaged);
}

TEST_CASE("twirl is linear for a fixed seed", "[twirl]") {
  Xoshiro256 rng(RngSeed{83});
  const auto phi = random_matrix(81, 9, rng);
  const auto psi = classical_broadcast_superoperator(3);
  const cplx a(0.7, -0.2), b(-1.3, 0.4);
  const TwirlOptions opts{false, 0};
  const auto lhs = twirl(a * phi + b * psi, 3, 200, RngSeed{7}, opts).coefficients;
  const auto r1 = twirl(phi, 3, 200, RngSeed{7}, opts).coefficients;
  const auto r2 = twirl(psi, 3, 200, RngSeed{7}, opts).coefficients;
  for (std::size_t k = 0; k < 6; ++k)
    CHECK(std::abs(lhs.l[k] - (a * r1.l[k] + b * r2.l[k])) < 1e-12);
}

TEST_CASE("twirl is idempotent in expectation", "[twirl]") {
  // Batches with independent seeds; the per-coefficient mean difference
  // between twice- and once-twirled maps must sit within 3 standard errors.
  const auto b = classical_broadcast_superoperator(3);
  const std::size_t batches = 20, samples = 200;
  const TwirlOptions opts{false, 0};
  std::array<std::vector<double>, 12> diffs;
  for (std::size_t k = 0; k < batches; ++k) {
    // Substreams are seed + index, so seeds must be spaced by more than the
    // sample count to give independent unitaries.
    const RngSeed s1{(2 * k + 1) << 32}, s2{(2 * k + 2) << 32};
    const auto once = twirl(b, 3, samples, s1, opts);
    const auto twice = twirl(once.averaged, 3, samples, s2, opts);
    for (std::size_t i = 0; i < 6; ++i) {
      const cplx delta = twice.coefficients.l[i] - once.coefficients.l[i];
      diffs[2 * i].push_back(delta.real());
      diffs[2 * i + 1].push_back(delta.imag());
    }
  }
  for (const auto& v : diffs) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= double(v.size());
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    var /= double(v.size() - 1);
    const double se = std::sqrt(var / double(v.size()));
    CHECK(std::abs(mean) <= 3.0 * se + 1e-14);
  }
}

TEST_CASE("deviation after twirling stays within statistical tolerance", "[twirl]") {
  Xoshiro256 rng(RngSeed{84});
  const auto phi = random_matrix(81, 9, rng);
  const std::size_t samples = 400;
  const auto r = twirl(phi, 3, samples, RngSeed{8});
  const double stat = 3.0 / std::sqrt(double(samples)) * operator_norm(phi);
  CHECK(r.deviation_after <= r.deviation_before + stat);
  CHECK(r.deviation_after < r.deviation_before);
}

TEST_CASE("twirl at d = 2 returns the gauge-reduced representative", "[twirl]") {
  Xoshiro256 rng(RngSeed{85});
  const auto c = random_coefficients(2, rng);
  const auto r = twirl(realize_superoperator(c), 2, 20, RngSeed{9});
  CHECK(max_coefficient_gap(r.coefficients, gauge_reduce(c)) < 1e-10);
}

TEST_CASE("tensor-power twirl commutes with the permutation span", "[twirl]") {
  Xoshiro256 rng(RngSeed{86});
  const auto t = random_matrix(8, 8, rng);
  const auto avg = twirl_tensor_operator(t, 3, 2, 500, RngSeed{10});
  CHECK(schur_weyl_fit(avg, 3, 2).residual < schur_weyl_fit(t, 3, 2).residual / 5.0);
  CHECK_THROWS_AS(twirl_tensor_operator(t, 2, 2, 5, RngSeed{10}), Error);
  CHECK_THROWS_AS(twirl(ComplexMatrix(16, 4), 2, 0, RngSeed{1}), Error);
}
