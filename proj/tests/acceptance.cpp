// SPDX-License-Identifier: Apache-2.0
// Acceptance suite: one PASS/FAIL line per criterion. Exit status is nonzero
// when any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "test_support.hpp"

using namespace covmap;
using namespace covmap::testing;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Report {
public:
  void add(bool ok, const std::string& what) {
    if (!ok) {
      pass_ = false;
      failures_ << (failures_.tellp() > 0 ? "; " : "") << what;
    }
  }
  Outcome finish(const std::string& summary) const {
    return {pass_, pass_ ? summary : summary + " | FAILED: " + failures_.str()};
  }

private:
  bool pass_ = true;
  std::ostringstream failures_;
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

// 1. Every realized coefficient vector is covariant.
Outcome canonical_form_sufficiency() {
  Report rep;
  double worst = 0.0;
  std::size_t maps = 0;
  Xoshiro256 rng(RngSeed{101});
  for (std::size_t d : {2u, 3u, 4u})
    for (std::size_t k = 0; k < 200; ++k) {
      const auto c = random_coefficients(d, rng);
      const double dev =
          covariance_deviation(realize_superoperator(c), d, 20, RngSeed{1010000 + 1000 * k});
      worst = std::max(worst, dev);
      ++maps;
    }
  rep.add(worst < 1e-10, "deviation " + sci(worst) + " >= 1e-10");
  return rep.finish(std::to_string(maps) + " maps x 20 unitaries, max deviation " + sci(worst));
}

// 2. Extraction inverts realization; the d = 2 gauge freedom is exact.
Outcome uniqueness_round_trip() {
  Report rep;
  Xoshiro256 rng(RngSeed{102});
  double gap = 0.0, residual = 0.0;
  for (std::size_t d : {3u, 4u})
    for (int k = 0; k < 100; ++k) {
      const auto c = random_coefficients(d, rng);
      const auto ex = extract(realize_superoperator(c), d);
      gap = std::max(gap, max_coefficient_gap(ex.coefficients, c));
      residual = std::max(residual, ex.residual);
    }
  rep.add(gap < 1e-10, "d>=3 coefficient gap " + sci(gap));

  double gauge_gap = 0.0, shift_change = 0.0, identity_gap = 0.0;
  for (int k = 0; k < 100; ++k) {
    const auto c = random_coefficients(2, rng);
    const auto sup = realize_superoperator(c);
    const auto fit = fit_coefficients(sup, 2);
    gauge_gap = std::max(gauge_gap, max_coefficient_gap(fit.coefficients, gauge_reduce(c)));
    auto shifted = c;
    const cplx mu = random_complex(rng) * 3.0;
    for (std::size_t i = 0; i < 6; ++i) shifted.l[i] += mu * gauge_direction[i];
    shift_change = std::max(shift_change, (realize_superoperator(shifted) - sup).max_abs());

    const auto x = random_matrix(2, 2, rng);
    const auto id = ComplexMatrix::identity(2);
    const auto s = swap_operator(2);
    const auto lhs =
        kron(id, x) + kron(x, id) - x.trace() * ComplexMatrix::identity(4) + x.trace() * s;
    const auto rhs = s * kron(x, id) + s * kron(id, x);
    identity_gap = std::max(identity_gap, (lhs - rhs).max_abs());
  }
  rep.add(gauge_gap < 1e-10, "d=2 gauge-reduced round trip gap " + sci(gauge_gap));
  rep.add(shift_change < 1e-13, "gauge shift changed the map by " + sci(shift_change));
  rep.add(identity_gap < 1e-13, "d=2 operator identity gap " + sci(identity_gap));
  return rep.finish("d=3,4 gap " + sci(gap) + " (residual " + sci(residual) + "); d=2 gap " +
                    sci(gauge_gap) + ", gauge shift " + sci(shift_change) + ", identity " +
                    sci(identity_gap));
}

bool e11_image_psd(const CovariantCoefficients& c) {
  return is_psd(apply(c, matrix_unit(1, 1, c.d)), Tolerance{1e-8, 1e-8});
}

// 3. Coefficient positivity criterion against the eigenvalues of Phi(e1 e1^*).
Outcome positivity_criterion() {
  Report rep;
  const Tolerance tol{1e-8, 1e-8};
  Xoshiro256 rng(RngSeed{103});
  std::size_t disagreements = 0, positives = 0, total = 0;
  for (std::size_t d : {2u, 3u, 4u})
    for (int k = 0; k < 1000; ++k) {
      const auto c = random_self_adjoint(d, rng);
      const bool crit = bool(is_positive(c, tol));
      disagreements += crit != e11_image_psd(c);
      positives += crit;
      ++total;
    }

  // Vectors with mu5 < |mu6| <= mu5 + mu6 that are positive at d = 2.
  std::size_t split = 0, split_bad = 0;
  for (int k = 0; k < 200 && split < 50; ++k) {
    CovariantCoefficients c2(2, {});
    const double m5 = rng.uniform(0.0, 0.5);
    const double m6 = rng.uniform(m5 + 0.01, 1.0);
    const cplx m3(rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3));
    const double off = std::abs(m3 + m6);
    c2.l = {off - m5 + rng.uniform(0.0, 1.0), off - m5 + rng.uniform(0.0, 1.0), m3,
            std::conj(m3), m5, m6};
    if (!(m5 < std::abs(m6) && std::abs(m6) <= m5 + m6)) continue;
    if (!is_positive(c2, tol)) continue;
    const CovariantCoefficients c3(3, c2.l);
    ++split;
    const bool d3_positive = bool(is_positive(c3, tol));
    split_bad += d3_positive || !e11_image_psd(c2) || e11_image_psd(c3);
  }
  rep.add(disagreements == 0, std::to_string(disagreements) + " disagreements");
  rep.add(split >= 20, "only " + std::to_string(split) + " dimension-split vectors");
  rep.add(split_bad == 0, std::to_string(split_bad) + " dimension-split vectors misclassified");
  return rep.finish(std::to_string(total) + " vectors (" + std::to_string(positives) +
                    " positive), 0 disagreements required, got " +
                    std::to_string(disagreements) + "; " + std::to_string(split) +
                    " vectors positive at d=2 only");
}

// 4. Closed-form CP criterion against the Choi matrix.
Outcome cp_criterion() {
  Report rep;
  const Tolerance tol{1e-8, 1e-8};
  Xoshiro256 rng(RngSeed{104});
  std::size_t disagreements = 0, cp = 0, total = 0;
  for (std::size_t d : {2u, 3u})
    for (int k = 0; k < 1000; ++k) {
      auto c = random_trace_free(d, rng);
      if (k % 2) {  // half the draws near the CP cone so both outcomes occur
        c.l[0] = std::abs(c.l[0]);
        c.l[1] = std::abs(c.l[1]);
        c.l[3] = std::conj(c.l[2]);
      }
      const auto r = is_cp(c, tol);
      disagreements += (r.verdict == CpVerdict::numerical_only) ||
                       r.completely_positive != is_psd(choi(c), tol);
      cp += r.completely_positive;
      ++total;
    }
  rep.add(disagreements == 0, std::to_string(disagreements) + " disagreements");
  rep.add(cp > 0 && cp < total, "only one outcome sampled");
  return rep.finish(std::to_string(total) + " trace-free vectors (" + std::to_string(cp) +
                    " CP), disagreements " + std::to_string(disagreements));
}

// 5. No point of the broadcast subspace is positive.
Outcome no_positive_broadcaster() {
  Report rep;
  Xoshiro256 rng(RngSeed{105});
  std::size_t positives = 0, off_subspace = 0, self_adjoint = 0, total = 0;
  for (std::size_t d : {2u, 3u, 4u, 5u}) {
    const double n = double(d);
    for (int k = 0; k < 1000; ++k) {
      CovariantCoefficients c(d, {});
      if (k % 2 == 0) {
        // Self-adjoint slice: real a, l5; l4 = conj(l3) with l3 + l4 = 1 - d a.
        const double a = rng.uniform(-2.0, 2.0), l5 = rng.uniform(-2.0, 2.0);
        const cplx l3(0.5 * (1.0 - n * a), rng.uniform(-2.0, 2.0));
        c.l = {a, a, l3, std::conj(l3), l5, -n * l5 - a};
      } else {
        const cplx a = 2.0 * random_complex(rng), l3 = 2.0 * random_complex(rng),
                   l5 = 2.0 * random_complex(rng);
        c.l = {a, a, l3, 1.0 - n * a - l3, l5, -n * l5 - a};
      }
      off_subspace += !satisfies_broadcast(c);
      self_adjoint += bool(is_self_adjoint(c));
      positives += bool(is_positive(c));
      ++total;
    }
  }
  rep.add(positives == 0, std::to_string(positives) + " positive broadcasters");
  rep.add(off_subspace == 0, std::to_string(off_subspace) + " samples off the subspace");
  return rep.finish(std::to_string(total) + " broadcast maps (" + std::to_string(self_adjoint) +
                    " self-adjoint), positive: " + std::to_string(positives));
}

// 6. Permutation invariance plus classical consistency pins down B_vb.
Outcome virtual_broadcaster_uniqueness() {
  Report rep;
  std::ostringstream summary;
  for (std::size_t d : {2u, 3u, 4u, 5u}) {
    const auto sol = solve_permutation_classical_constraints(d);
    const auto target = virtual_broadcaster(d);
    if (d == 2) {
      // One-dimensional solution set along the gauge direction.
      rep.add(sol.nullity == 1, "d=2 nullity " + std::to_string(sol.nullity));
      if (sol.nullity == 1) {
        double along = 0.0;
        for (std::size_t k = 0; k < 6; ++k)
          along += std::abs(sol.null_basis(k, 0) - sol.null_basis(0, 0) * gauge_direction[k]);
        rep.add(along < 1e-10, "d=2 null direction is not the gauge direction");
      }
      rep.add(maps_equal(sol.solution, target, Tolerance{1e-12, 1e-12}),
              "d=2 solution differs from B_vb modulo gauge");
    } else {
      rep.add(sol.nullity == 0, "d=" + std::to_string(d) + " nullity " +
                                    std::to_string(sol.nullity));
      const double gap = max_coefficient_gap(sol.solution, target);
      rep.add(gap < 1e-12, "d=" + std::to_string(d) + " gap " + sci(gap));
    }
    rep.add(sol.equation_residual < 1e-12, "constraint residual " + sci(sol.equation_residual));
    const double bc = broadcast_condition_defect(sol.solution);
    rep.add(bc < 1e-12, "broadcast defect " + sci(bc));
    summary << "d=" << d << ": nullity " << sol.nullity << ", broadcast defect " << sci(bc)
            << (d < 5 ? "; " : "");
  }
  return rep.finish(summary.str());
}

// 7. Exact cb-norm formulas.
Outcome cb_norm_formulas() {
  Report rep;
  Xoshiro256 rng(RngSeed{107});
  double worst_pi = 0.0;
  std::size_t not_exact = 0;
  for (int k = 0; k < 100; ++k) {
    const std::size_t d = 2 + k % 3;
    const cplx m1 = random_complex(rng), m2 = random_complex(rng);
    const CovariantCoefficients c(d, {m1, m1, m2, m2, 0, 0});
    const auto r = cb_norm(c, 10, RngSeed{7});
    not_exact += r.kind != ValueKind::exact || r.method != NormMethod::permutation_invariant;
    const double formula = std::max(2.0 * std::abs(m1 + m2), 2.0 * std::abs(m1 - m2));
    worst_pi = std::max({worst_pi, std::abs(r.value() - formula),
                         std::abs(psi_identity_norm_direct(c) - formula)});
  }
  rep.add(not_exact == 0, std::to_string(not_exact) + " permutation-invariant results not exact");
  rep.add(worst_pi < 1e-10, "permutation-invariant gap " + sci(worst_pi));

  double worst_corner = 0.0, worst_excess = -1.0;
  std::size_t accepted = 0, corner_not_exact = 0;
  while (accepted < 100) {
    const std::size_t d = 2 + accepted % 2;
    CovariantCoefficients c(d, {});
    c.l[0] = random_complex(rng);
    c.l[1] = random_complex(rng);
    c.l[2] = random_complex(rng);
    if (std::abs(c.l[2]) < 0.2) continue;
    c.l[3] = c.l[0] * c.l[1] / c.l[2];
    const auto mags = corner_magnitudes(c);
    if (psi_identity_norm(c) < std::max(mags[1], mags[2])) continue;  // dominance
    ++accepted;
    const auto r = cb_norm(c, 500, RngSeed{7000 + 1000 * accepted});
    corner_not_exact += r.kind != ValueKind::exact || r.method != NormMethod::corner_bound;
    worst_corner = std::max({worst_corner, std::abs(r.value() - psi_identity_norm(c)),
                             std::abs(r.value() - psi_identity_norm_direct(c))});
    const double mc = monte_carlo_norm(c, 500, RngSeed{7000 + 1000 * accepted});
    worst_excess = std::max(worst_excess, mc - r.value());
  }
  rep.add(corner_not_exact == 0, std::to_string(corner_not_exact) + " variety results not exact");
  rep.add(worst_corner < 1e-10, "variety gap " + sci(worst_corner));
  rep.add(worst_excess <= 1e-10, "sampled norm exceeds exact value by " + sci(worst_excess));
  return rep.finish("permutation-invariant gap " + sci(worst_pi) + "; variety gap " +
                    sci(worst_corner) + ", max(sampled - exact) " + sci(worst_excess));
}

// 8. Corner-norm bound for projector compressions.
Outcome corner_norm_bound() {
  Report rep;
  Xoshiro256 rng(RngSeed{108});
  double min_slack = std::numeric_limits<double>::infinity();
  std::size_t failures = 0;
  for (int k = 0; k < 1000; ++k) {
    const std::size_t n = 9, rank = 1 + k % 8;
    const auto u = haar_unitary(n, RngSeed{108000 + 100 * std::uint64_t(k)});
    ComplexMatrix p(n, n);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t s = 0; s < n; ++s)
        for (std::size_t c = 0; c < rank; ++c) p(r, s) += u(r, c) * std::conj(u(s, c));
    const auto a = random_matrix(n, n, rng);
    std::array<cplx, 4> mu{random_complex(rng), random_complex(rng), random_complex(rng), 0.0};
    mu[3] = mu[1] * mu[2] / mu[0];
    const auto v = corner_norm_bound_check(p, a, mu, Tolerance{1e-8, 1e-8});
    min_slack = std::min(min_slack, v.witness);
    failures += !v;
  }
  rep.add(min_slack >= -1e-10, "slack " + sci(min_slack));
  rep.add(failures == 0, std::to_string(failures) + " bound violations");
  return rep.finish("1000 triples at dimension 9, min slack " + sci(min_slack));
}

// 9. Multicopy extraction, Gamma representation, covariance.
Outcome multicopy() {
  Report rep;
  Xoshiro256 rng(RngSeed{109});
  double worst_res = 0.0, worst_gap = 0.0, worst_cov = 0.0;
  for (auto [m, d] : {std::pair{2u, 3u}, {3u, 4u}})
    for (int k = 0; k < 50; ++k) {
      MultiCopyCoefficients mc(m, d);
      for (auto& z : mc.lam) z = random_complex(rng);
      const auto sup = realize_multi(mc);
      const auto ex = extract_multi(sup, m, d);
      worst_res = std::max(worst_res, ex.residual);
      for (std::size_t i = 0; i < mc.lam.size(); ++i)
        worst_gap = std::max(worst_gap, std::abs(ex.coefficients.lam[i] - mc.lam[i]));
      if (m == 3)
        worst_cov = std::max(worst_cov, covariance_residual_multi(sup, m, d, 10,
                                                                  RngSeed{std::uint64_t(109000 + 100 * k)}));
    }
  rep.add(worst_res < 1e-9, "extraction residual " + sci(worst_res));
  rep.add(worst_gap < 1e-9, "extraction gap " + sci(worst_gap));
  rep.add(worst_cov < 1e-9, "m=3 covariance deviation " + sci(worst_cov));

  std::size_t rep_failures = 0;
  for (std::size_t m : {3u, 4u}) {
    const auto perms = all_permutations(m);
    std::vector<ComplexMatrix> ops;
    for (const auto& p : perms) ops.push_back(permutation_operator(p, 2));
    const auto id = ComplexMatrix::identity(int_pow(2, m));
    for (std::size_t i = 0; i < perms.size(); ++i) {
      rep_failures += !(ops[i].adjoint() * ops[i] == id);
      rep_failures += !(ops[i].adjoint() == permutation_operator(perms[i].inverse(), 2));
      for (std::size_t j = 0; j < perms.size(); ++j)
        rep_failures += !(ops[i] * ops[j] == permutation_operator(perms[i].compose(perms[j]), 2));
    }
  }
  rep.add(rep_failures == 0, std::to_string(rep_failures) + " representation failures");
  return rep.finish("extraction residual " + sci(worst_res) + ", gap " + sci(worst_gap) +
                    "; m=3 covariance " + sci(worst_cov) + "; Gamma on S3, S4 (d=2) exact");
}

// 10. Twirled tensor operators approach the permutation span.
Outcome schur_weyl_fit_convergence() {
  Report rep;
  Xoshiro256 rng(RngSeed{110});
  auto t = random_matrix(27, 27, rng);
  t *= 1.0 / t.frobenius_norm();
  std::vector<double> residuals;
  std::ostringstream summary;
  summary << "unit-Frobenius input, residual";
  for (std::size_t n : {200u, 2000u, 20000u}) {
    const auto avg = twirl_tensor_operator(t, 3, 3, n, RngSeed{110000});
    residuals.push_back(schur_weyl_fit(avg, 3, 3).residual);
    summary << " n=" << n << ": " << sci(residuals.back());
  }
  rep.add(residuals[1] < 5e-2, "residual at 2000 samples " + sci(residuals[1]));
  rep.add(residuals[0] > residuals[1] && residuals[1] > residuals[2], "not monotone");
  return rep.finish(summary.str());
}

// 11. Twirl residual scales like samples^(-1/2).
Outcome twirl_convergence() {
  Report rep;
  const auto b = classical_broadcast_superoperator(3);
  std::vector<double> scaled;
  std::ostringstream summary;
  summary << "residual*sqrt(n):";
  for (std::size_t n : {100u, 1000u, 10000u}) {
    const auto r = twirl(b, 3, n, RngSeed{111000}, TwirlOptions{false, 0});
    scaled.push_back(r.residual * std::sqrt(double(n)));
    summary << " n=" << n << ": " << sci(scaled.back());
  }
  const double spread = *std::max_element(scaled.begin(), scaled.end()) /
                        *std::min_element(scaled.begin(), scaled.end());
  rep.add(spread <= 3.0, "spread " + sci(spread));
  summary << " (spread " << sci(spread) << ", limit 3)";
  return rep.finish(summary.str());
}

// 12. Seeded operations serialize byte-identically.
Outcome determinism() {
  Report rep;
  const auto b = classical_broadcast_superoperator(3);
  const CovariantCoefficients off(3, {1, 0.2, -0.5, 0.9, 0, 0});
  const CovariantCoefficients bracket(2, {1, -1, 1, -1, 0, 0});
  Xoshiro256 rng(RngSeed{112});
  const auto t = random_matrix(8, 8, rng);
  MultiCopyCoefficients mc(3, 2);
  for (auto& z : mc.lam) z = random_complex(rng);
  const std::vector<std::pair<std::string, std::function<std::string()>>> ops{
      {"haar_unitary", [] { return io::to_json(haar_unitary(5, RngSeed{9})).dump(); }},
      {"twirl", [&] { return io::to_json(twirl(b, 3, 100, RngSeed{9})).dump(); }},
      {"cb_norm", [&] { return io::to_json(cb_norm(off, 200, RngSeed{9})).dump(); }},
      {"cb_norm bracket", [&] { return io::to_json(cb_norm(bracket, 200, RngSeed{9})).dump(); }},
      {"monte_carlo_norm",
       [&] { return io::json(monte_carlo_norm(off, 200, RngSeed{9})).dump(); }},
      {"covariance_deviation",
       [&] { return io::json(covariance_deviation(b, 3, 10, RngSeed{9})).dump(); }},
      {"covariance_residual_multi",
       [&] { return io::json(covariance_residual_multi(realize_multi(mc), 3, 2, 5, RngSeed{9}))
                 .dump(); }},
      {"tensor twirl fit",
       [&] {
         return io::to_json(schur_weyl_fit(twirl_tensor_operator(t, 3, 2, 100, RngSeed{9}), 3, 2),
                            3, 2)
             .dump();
       }},
  };
  for (const auto& [name, run] : ops) rep.add(run() == run(), name + " differs between runs");
  return rep.finish(std::to_string(ops.size()) + " seeded operations compared byte-for-byte");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"canonical-form sufficiency", canonical_form_sufficiency},
      {"uniqueness and gauge round trip", uniqueness_round_trip},
      {"positivity criterion vs eigenvalue oracle", positivity_criterion},
      {"CP criterion vs Choi oracle", cp_criterion},
      {"no positive broadcaster", no_positive_broadcaster},
      {"virtual-broadcaster uniqueness", virtual_broadcaster_uniqueness},
      {"cb-norm formulas", cb_norm_formulas},
      {"corner-norm bound", corner_norm_bound},
      {"multicopy extraction and representation", multicopy},
      {"Schur-Weyl fit after tensor twirl", schur_weyl_fit_convergence},
      {"twirl convergence rate", twirl_convergence},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !out.pass;
    std::printf("AC%02zu %s  %s: %s [%.1fs]\n", i + 1, out.pass ? "PASS" : "FAIL",
                criteria[i].first.c_str(), out.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%zu/%zu acceptance criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
