// SPDX-License-Identifier: Apache-2.0
#pragma once

// JSON schemas for matrices, coefficient sets, permutations and reports.
//
//   matrix        {"rows": n, "cols": m, "data": [[re, im], ...]}   row-major
//   coefficients  {"d": 3, "coeffs": [[re, im] x 6]}
//   multicopy     {"m": 3, "d": 4, "lam": [[[re, im] x (m+1)] x m!]}
//   permutation   {"m": 3, "image": [2, 3, 1]}
//
// Doubles are written in shortest round-trip form, so parse(dump(x)) == x
// bit-for-bit.

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include <json.hpp>

#include "covmap/classify.hpp"
#include "covmap/covmap2.hpp"
#include "covmap/multicopy.hpp"
#include "covmap/norms.hpp"
#include "covmap/operators.hpp"
#include "covmap/twirl.hpp"

namespace covmap::io {

using json = nlohmann::json;

namespace detail {

[[noreturn]] inline void parse_fail(const std::string& what) {
  covmap::detail::fail(ErrorKind::parse_error, what);
}

inline const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) parse_fail(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

inline std::size_t size_field(const json& j, const char* key) {
  const auto& v = field(j, key);
  if (!v.is_number_integer()) parse_fail(std::string("field \"") + key + "\" must be an integer");
  const auto n = v.get<long long>();
  if (n < 0) parse_fail(std::string("field \"") + key + "\" must be nonnegative");
  return static_cast<std::size_t>(n);
}

inline double number(const json& v) {
  if (!v.is_number()) parse_fail("expected a number");
  return v.get<double>();
}

}  // namespace detail

inline json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline cplx complex_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) detail::parse_fail("complex entries are [re, im] pairs");
  return {detail::number(j[0]), detail::number(j[1])};
}

inline json to_json(const ComplexMatrix& m) {
  json data = json::array();
  for (const auto& z : m.data()) data.push_back(to_json(z));
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

inline ComplexMatrix matrix_from_json(const json& j) {
  const auto rows = detail::size_field(j, "rows");
  const auto cols = detail::size_field(j, "cols");
  const auto& data = detail::field(j, "data");
  if (!data.is_array()) detail::parse_fail("\"data\" must be an array");
  if (rows == 0 || cols == 0)
    covmap::detail::fail(ErrorKind::dimension_mismatch, "matrix dimensions must be positive");
  if (data.size() != rows * cols)
    covmap::detail::fail(ErrorKind::dimension_mismatch,
                         "matrix data has " + std::to_string(data.size()) + " entries, expected " +
                             std::to_string(rows * cols));
  std::vector<cplx> entries;
  entries.reserve(data.size());
  for (const auto& z : data) entries.push_back(complex_from_json(z));
  return ComplexMatrix(rows, cols, std::move(entries));
}

inline json to_json(const CovariantCoefficients& c) {
  json coeffs = json::array();
  for (const auto& z : c.l) coeffs.push_back(to_json(z));
  return json{{"d", c.d}, {"coeffs", std::move(coeffs)}};
}

inline CovariantCoefficients coefficients_from_json(const json& j) {
  const auto d = detail::size_field(j, "d");
  const auto& coeffs = detail::field(j, "coeffs");
  if (!coeffs.is_array() || coeffs.size() != 6) detail::parse_fail("\"coeffs\" needs 6 entries");
  std::array<cplx, 6> l;
  for (std::size_t k = 0; k < 6; ++k) l[k] = complex_from_json(coeffs[k]);
  return CovariantCoefficients(d, l);  // validates d >= 2
}

inline json to_json(const Permutation& p) {
  return json{{"m", p.size()}, {"image", p.image()}};
}

inline Permutation permutation_from_json(const json& j) {
  const auto m = detail::size_field(j, "m");
  const auto& image = detail::field(j, "image");
  if (!image.is_array() || image.size() != m) detail::parse_fail("\"image\" must have m entries");
  std::vector<std::size_t> im;
  for (const auto& v : image) {
    if (!v.is_number_integer()) detail::parse_fail("permutation entries must be integers");
    im.push_back(v.get<std::size_t>());
  }
  return Permutation(std::move(im));
}

inline json to_json(const MultiCopyCoefficients& mc) {
  json lam = json::array();
  for (std::size_t i = 0; i < mc.permutations(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < mc.slots(); ++j) row.push_back(to_json(mc.at(i, j)));
    lam.push_back(std::move(row));
  }
  return json{{"m", mc.m}, {"d", mc.d}, {"lam", std::move(lam)}};
}

inline MultiCopyCoefficients multicopy_from_json(const json& j) {
  const auto m = detail::size_field(j, "m");
  const auto d = detail::size_field(j, "d");
  MultiCopyCoefficients mc(m, d);
  const auto& lam = detail::field(j, "lam");
  if (!lam.is_array() || lam.size() != mc.permutations())
    detail::parse_fail("\"lam\" needs m! rows");
  for (std::size_t i = 0; i < mc.permutations(); ++i) {
    if (!lam[i].is_array() || lam[i].size() != mc.slots())
      detail::parse_fail("each \"lam\" row needs m+1 entries");
    for (std::size_t s = 0; s < mc.slots(); ++s) mc.at(i, s) = complex_from_json(lam[i][s]);
  }
  return mc;
}

inline json to_json(const Verdict& v) { return json{{"verdict", v.holds}, {"witness", v.witness}}; }

inline json to_json(const CpResult& r) {
  return json{{"verdict", to_string(r.verdict)},
              {"completely_positive", r.completely_positive},
              {"witness", r.witness}};
}

inline json to_json(const ClassificationReport& r) {
  json out{{"coefficients", to_json(r.coefficients)},
              {"self_adjoint", to_json(r.self_adjoint)},
              {"positive", to_json(r.positive)},
              {"completely_positive", to_json(r.completely_positive)},
              {"broadcasting", to_json(r.broadcasting)},
              {"permutation_invariant", to_json(r.permutation_invariant)},
              {"classically_consistent", to_json(r.classically_consistent)},
              {"virtual_broadcaster", to_json(r.virtual_broadcaster)}};
  if (r.extraction_residual) out["extraction_residual"] = *r.extraction_residual;
  return out;
}

inline json to_json(const CbNormResult& r) {
  json out{{"value_kind", to_string(r.kind)},
           {"method", to_string(r.method)},
           {"psi_identity_norm", r.psi_identity_norm},
           {"samples", r.samples}};
  switch (r.kind) {
    case ValueKind::exact:
    case ValueKind::upper_bound: out["value"] = r.upper; break;
    case ValueKind::lower_bound: out["value"] = r.lower; break;
    case ValueKind::bracket: out["value"] = json{{"lower", r.lower}, {"upper", r.upper}}; break;
  }
  out["detail"] = r.corners ? json{{"corners", *r.corners}} : json(nullptr);
  return out;
}

inline json to_json(const TwirlResult& r) {
  return json{{"coefficients", to_json(r.coefficients)},
              {"residual", r.residual},
              {"samples", r.samples},
              {"seed", r.seed.value},
              {"deviation_before", r.deviation_before},
              {"deviation_after", r.deviation_after}};
}

inline json to_json(const SchurWeylFit& f, std::size_t m, std::size_t d) {
  json coeffs = json::array();
  json perms = json::array();
  const auto all = all_permutations(m);
  for (std::size_t i = 0; i < all.size(); ++i) {
    coeffs.push_back(to_json(f.coefficients[i]));
    perms.push_back(all[i].image());
  }
  return json{{"m", m},
              {"d", d},
              {"permutations", std::move(perms)},
              {"coefficients", std::move(coeffs)},
              {"residual", f.residual},
              {"degenerate", f.degenerate}};
}

inline Verdict verdict_from_json(const json& j) {
  const auto& v = detail::field(j, "verdict");
  if (!v.is_boolean()) detail::parse_fail("\"verdict\" must be a boolean");
  return {v.get<bool>(), detail::number(detail::field(j, "witness"))};
}

inline CpResult cp_result_from_json(const json& j) {
  const auto tag = detail::field(j, "verdict");
  CpResult r;
  if (tag == "yes") r.verdict = CpVerdict::yes;
  else if (tag == "no") r.verdict = CpVerdict::no;
  else if (tag == "numerical-only") r.verdict = CpVerdict::numerical_only;
  else detail::parse_fail("unknown CP verdict");
  const auto& cp = detail::field(j, "completely_positive");
  if (!cp.is_boolean()) detail::parse_fail("\"completely_positive\" must be a boolean");
  r.completely_positive = cp.get<bool>();
  r.witness = detail::number(detail::field(j, "witness"));
  return r;
}

inline ClassificationReport classification_report_from_json(const json& j) {
  ClassificationReport r;
  r.coefficients = coefficients_from_json(detail::field(j, "coefficients"));
  r.self_adjoint = verdict_from_json(detail::field(j, "self_adjoint"));
  r.positive = verdict_from_json(detail::field(j, "positive"));
  r.completely_positive = cp_result_from_json(detail::field(j, "completely_positive"));
  r.broadcasting = verdict_from_json(detail::field(j, "broadcasting"));
  r.permutation_invariant = verdict_from_json(detail::field(j, "permutation_invariant"));
  r.classically_consistent = verdict_from_json(detail::field(j, "classically_consistent"));
  r.virtual_broadcaster = verdict_from_json(detail::field(j, "virtual_broadcaster"));
  if (j.contains("extraction_residual"))
    r.extraction_residual = detail::number(j.at("extraction_residual"));
  return r;
}

inline CbNormResult cb_norm_from_json(const json& j) {
  CbNormResult r;
  const auto kind = detail::field(j, "value_kind");
  const auto method = detail::field(j, "method");
  bool known = false;
  for (auto k : {ValueKind::exact, ValueKind::upper_bound, ValueKind::lower_bound, ValueKind::bracket})
    if (kind == to_string(k)) r.kind = k, known = true;
  if (!known) detail::parse_fail("unknown value_kind");
  known = false;
  for (auto m : {NormMethod::permutation_invariant, NormMethod::corner_bound, NormMethod::monte_carlo})
    if (method == to_string(m)) r.method = m, known = true;
  if (!known) detail::parse_fail("unknown norm method");
  r.psi_identity_norm = detail::number(detail::field(j, "psi_identity_norm"));
  r.samples = detail::size_field(j, "samples");
  const auto& value = detail::field(j, "value");
  switch (r.kind) {
    case ValueKind::exact: r.lower = r.upper = detail::number(value); break;
    case ValueKind::upper_bound:
      r.upper = detail::number(value);
      r.lower = 0.0;
      break;
    case ValueKind::lower_bound:
      r.lower = detail::number(value);
      r.upper = std::numeric_limits<double>::infinity();
      break;
    case ValueKind::bracket:
      r.lower = detail::number(detail::field(value, "lower"));
      r.upper = detail::number(detail::field(value, "upper"));
      break;
  }
  const auto& det = detail::field(j, "detail");
  if (!det.is_null()) {
    const auto& corners = detail::field(det, "corners");
    if (!corners.is_array() || corners.size() != 4) detail::parse_fail("corners needs 4 entries");
    std::array<double, 4> c;
    for (std::size_t k = 0; k < 4; ++k) c[k] = detail::number(corners[k]);
    r.corners = c;
  }
  return r;
}

/// Everything but the averaged superoperator, which is not serialized.
inline TwirlResult twirl_result_from_json(const json& j) {
  TwirlResult r;
  r.coefficients = coefficients_from_json(detail::field(j, "coefficients"));
  r.residual = detail::number(detail::field(j, "residual"));
  r.samples = detail::size_field(j, "samples");
  const auto& seed = detail::field(j, "seed");
  if (!seed.is_number_unsigned() && !seed.is_number_integer()) detail::parse_fail("bad seed");
  r.seed = RngSeed{seed.get<std::uint64_t>()};
  r.deviation_before = detail::number(detail::field(j, "deviation_before"));
  r.deviation_after = detail::number(detail::field(j, "deviation_after"));
  return r;
}

/// Parses text, mapping syntax errors to ErrorKind::parse_error.
inline json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    detail::parse_fail(std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace covmap::io
