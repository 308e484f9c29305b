// SPDX-License-Identifier: Apache-2.0
//
// covmap: command-line front end for the covariant-map library.
//
// Exit codes (stable):
//   0  success
//   1  other failure (bad flags, unreadable file, invalid argument)
//   2  input parse error
//   3  dimension error
//   4  trace terms present where a trace-free map is required
//   5  coefficients not unique for these (m, d)

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "covmap/covmap.hpp"

namespace {

using covmap::io::json;

enum ExitCode : int {
  exit_ok = 0,
  exit_other = 1,
  exit_parse = 2,
  exit_dimension = 3,
  exit_trace_terms = 4,
  exit_uniqueness = 5,
};

int exit_code_for(covmap::ErrorKind kind) {
  using covmap::ErrorKind;
  switch (kind) {
    case ErrorKind::parse_error: return exit_parse;
    case ErrorKind::dimension_mismatch: return exit_dimension;
    case ErrorKind::trace_terms_present: return exit_trace_terms;
    case ErrorKind::uniqueness_unavailable: return exit_uniqueness;
    default: return exit_other;
  }
}

struct CliConfig {
  covmap::Tolerance tol;
  std::optional<std::size_t> d;
  std::size_t samples = 1000;
  std::uint64_t seed = 1;
  std::string out;  // empty: stdout
  std::string format = "json";

  void validate() const {
    using covmap::ErrorKind;
    using covmap::detail::require;
    require(tol.abs >= 0.0 && tol.rel >= 0.0, ErrorKind::invalid_argument,
            "tolerances must be >= 0");
    require(samples >= 1, ErrorKind::invalid_argument, "sample counts must be >= 1");
    require(!d || *d >= 2, ErrorKind::dimension_mismatch, "dimension d must be >= 2");
    require(format == "json" || format == "text", ErrorKind::invalid_argument,
            "format must be json or text");
  }
};

std::string read_text(const std::string& path) {
  if (path == "-") return {std::istreambuf_iterator<char>(std::cin), {}};
  std::ifstream in(path);
  covmap::detail::require(bool(in), covmap::ErrorKind::invalid_argument,
                          "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json load_json(const std::string& path) { return covmap::io::parse(read_text(path)); }

// COVMAP_CONFIG names a JSON file with any of these keys.
void apply_config_file(CliConfig& cfg, const std::string& path) {
  const auto j = load_json(path);
  if (!j.is_object()) covmap::detail::fail(covmap::ErrorKind::parse_error, "config must be an object");
  for (const auto& [key, v] : j.items()) {
    if (key == "tol_abs") cfg.tol.abs = v.get<double>();
    else if (key == "tol_rel") cfg.tol.rel = v.get<double>();
    else if (key == "d") cfg.d = v.get<std::size_t>();
    else if (key == "samples") cfg.samples = v.get<std::size_t>();
    else if (key == "seed") cfg.seed = v.get<std::uint64_t>();
    else if (key == "out") cfg.out = v.get<std::string>();
    else if (key == "format") cfg.format = v.get<std::string>();
    else covmap::detail::fail(covmap::ErrorKind::parse_error, "unknown config key \"" + key + "\"");
  }
}

enum class InputKind { coefficients, superoperator, multicopy };

InputKind detect(const json& j) {
  if (j.is_object()) {
    if (j.contains("lam")) return InputKind::multicopy;
    if (j.contains("coeffs")) return InputKind::coefficients;
    if (j.contains("rows")) return InputKind::superoperator;
  }
  covmap::detail::fail(covmap::ErrorKind::parse_error,
                       "input is not a coefficient, superoperator or multicopy document");
}

void check_d(const CliConfig& cfg, std::size_t actual) {
  if (cfg.d && *cfg.d != actual)
    covmap::detail::fail(covmap::ErrorKind::dimension_mismatch,
                         "--d " + std::to_string(*cfg.d) + " does not match input dimension " +
                             std::to_string(actual));
}

std::size_t require_d(const CliConfig& cfg) {
  covmap::detail::require(cfg.d.has_value(), covmap::ErrorKind::invalid_argument,
                          "this command needs --d");
  return *cfg.d;
}

// Coefficients from either schema. Superoperators are extracted first (fit at
// d = 2, where matrix-element extraction is gauge-ambiguous).
struct LoadedMap {
  covmap::CovariantCoefficients coefficients;
  std::optional<double> extraction_residual;
};

LoadedMap load_map(const json& j, const CliConfig& cfg) {
  switch (detect(j)) {
    case InputKind::coefficients: {
      auto c = covmap::io::coefficients_from_json(j);
      check_d(cfg, c.d);
      return {c, std::nullopt};
    }
    case InputKind::superoperator: {
      const auto s = covmap::io::matrix_from_json(j);
      const auto d = covmap::detail::superop_dimension(s);
      check_d(cfg, d);
      const auto ex = d >= 3 ? covmap::extract(s, d, cfg.tol) : covmap::fit_coefficients(s, d, cfg.tol);
      return {ex.coefficients, ex.residual};
    }
    case InputKind::multicopy: break;
  }
  covmap::detail::fail(covmap::ErrorKind::parse_error,
                       "expected two-copy coefficients or a superoperator, got multicopy coefficients");
}

covmap::ComplexMatrix load_superoperator(const json& j, const CliConfig& cfg) {
  switch (detect(j)) {
    case InputKind::coefficients: {
      const auto c = covmap::io::coefficients_from_json(j);
      check_d(cfg, c.d);
      return covmap::realize_superoperator(c);
    }
    case InputKind::superoperator: {
      auto s = covmap::io::matrix_from_json(j);
      check_d(cfg, covmap::detail::superop_dimension(s));
      return s;
    }
    case InputKind::multicopy: break;
  }
  covmap::detail::fail(covmap::ErrorKind::parse_error,
                       "expected a two-copy superoperator, got multicopy coefficients");
}

covmap::MultiCopyCoefficients load_multicopy(const json& j, const CliConfig& cfg) {
  covmap::MultiCopyCoefficients mc;
  switch (detect(j)) {
    case InputKind::multicopy: mc = covmap::io::multicopy_from_json(j); break;
    case InputKind::coefficients:
      mc = covmap::from_two_copy(covmap::io::coefficients_from_json(j));
      break;
    case InputKind::superoperator:
      covmap::detail::fail(covmap::ErrorKind::parse_error,
                           "expected multicopy or two-copy coefficients, got a matrix");
  }
  check_d(cfg, mc.d);
  return mc;
}

// Smallest d >= 2 with d^m == n.
std::size_t tensor_root(std::size_t n, std::size_t m) {
  for (std::size_t d = 2; covmap::int_pow(d, m) <= n; ++d)
    if (covmap::int_pow(d, m) == n) return d;
  covmap::detail::fail(covmap::ErrorKind::dimension_mismatch,
                       "size " + std::to_string(n) + " is not d^" + std::to_string(m));
}

// ---------------------------------------------------------------------------

json cmd_classify(const json& in, const CliConfig& cfg) {
  const auto map = load_map(in, cfg);
  auto report = covmap::classify(map.coefficients, cfg.tol);
  report.extraction_residual = map.extraction_residual;
  return covmap::io::to_json(report);
}

json cmd_norm(const json& in, const CliConfig& cfg) {
  const auto map = load_map(in, cfg);
  return covmap::io::to_json(
      covmap::cb_norm(map.coefficients, cfg.samples, covmap::RngSeed{cfg.seed}, cfg.tol));
}

json cmd_twirl(const json& in, const CliConfig& cfg) {
  const auto s = load_superoperator(in, cfg);
  const auto d = covmap::detail::superop_dimension(s);
  return covmap::io::to_json(
      covmap::twirl(s, d, cfg.samples, covmap::RngSeed{cfg.seed}, {}, cfg.tol));
}

json cmd_realize(const std::optional<json>& in, const std::string& preset, const CliConfig& cfg) {
  if (!preset.empty()) {
    const auto d = require_d(cfg);
    if (preset == "classical") return covmap::io::to_json(covmap::classical_broadcast_superoperator(d));
    if (preset == "virtual")
      return covmap::io::to_json(covmap::realize_superoperator(covmap::virtual_broadcaster(d)));
    covmap::detail::fail(covmap::ErrorKind::invalid_argument, "unknown preset " + preset);
  }
  covmap::detail::require(in.has_value(), covmap::ErrorKind::invalid_argument,
                          "realize needs an input file or --preset");
  if (detect(*in) == InputKind::multicopy)
    return covmap::io::to_json(covmap::realize_multi(load_multicopy(*in, cfg)));
  return covmap::io::to_json(load_superoperator(*in, cfg));
}

json cmd_multicopy_apply(const json& in, const std::optional<json>& op, const CliConfig& cfg) {
  const auto mc = load_multicopy(in, cfg);
  if (!op) return covmap::io::to_json(covmap::realize_multi(mc));
  return covmap::io::to_json(covmap::apply_multi(mc, covmap::io::matrix_from_json(*op)));
}

json cmd_multicopy_extract(const json& in, std::size_t m, const CliConfig& cfg) {
  const auto s = covmap::io::matrix_from_json(in);
  const auto d = tensor_root(s.cols(), 2);
  check_d(cfg, d);
  const auto ex = covmap::extract_multi(s, m, d, cfg.tol);
  return json{{"coefficients", covmap::io::to_json(ex.coefficients)},
              {"residual", ex.residual},
              {"covariant", ex.covariant}};
}

json cmd_multicopy_fit(const std::optional<json>& in, const std::string& perm, std::size_t m,
                       const CliConfig& cfg) {
  covmap::ComplexMatrix t;
  std::size_t d = 0;
  if (!perm.empty()) {
    d = require_d(cfg);
    t = covmap::permutation_operator(covmap::Permutation::parse(perm, m), d);
  } else {
    covmap::detail::require(in.has_value(), covmap::ErrorKind::invalid_argument,
                            "fit needs an input operator or --perm");
    t = covmap::io::matrix_from_json(*in);
    d = tensor_root(t.rows(), m);
    check_d(cfg, d);
  }
  return covmap::io::to_json(covmap::schur_weyl_fit(t, m, d), m, d);
}

// ---------------------------------------------------------------------------

void render_text(const json& j, const std::string& prefix, std::ostream& os) {
  if (j.is_object()) {
    for (const auto& [key, v] : j.items())
      render_text(v, prefix.empty() ? key : prefix + "." + key, os);
    return;
  }
  os << prefix << ": " << j.dump() << '\n';
}

void emit(const json& result, const CliConfig& cfg) {
  std::ostringstream ss;
  if (cfg.format == "text") render_text(result, "", ss);
  else ss << result.dump(2) << '\n';
  if (cfg.out.empty()) {
    std::cout << ss.str();
    return;
  }
  std::ofstream out(cfg.out, std::ios::binary);
  covmap::detail::require(bool(out), covmap::ErrorKind::invalid_argument,
                          "cannot write " + cfg.out);
  out << ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Covariant two-copy maps: classification, norms, twirling, multicopy analysis"};
  app.require_subcommand(1);
  app.fallthrough();

  std::size_t flag_d = 0, flag_samples = 0;
  std::uint64_t flag_seed = 0;
  double flag_tol_abs = 0.0, flag_tol_rel = 0.0;
  std::string flag_out, flag_format;
  auto* opt_d = app.add_option("--d", flag_d, "Local dimension d (checked against inputs)");
  auto* opt_samples = app.add_option("--samples", flag_samples, "Monte-Carlo sample count");
  auto* opt_seed = app.add_option("--seed", flag_seed, "Seed for all sampled quantities");
  auto* opt_tol_abs = app.add_option("--tol-abs", flag_tol_abs, "Absolute tolerance");
  auto* opt_tol_rel = app.add_option("--tol-rel", flag_tol_rel, "Relative tolerance");
  auto* opt_out = app.add_option("--out", flag_out, "Output file (default stdout)");
  auto* opt_format = app.add_option("--format", flag_format, "Report format: json or text");

  std::string input, operator_path, preset, perm;
  std::size_t m = 2;

  auto* classify = app.add_subcommand("classify", "Classify a map given as coefficients or superoperator");
  classify->add_option("input,--input", input, "Map file ('-' for stdin)")->required();
  auto* norm = app.add_subcommand("norm", "cb-norm of a trace-free map");
  norm->add_option("input,--input", input, "Map file ('-' for stdin)")->required();
  auto* twirl = app.add_subcommand("twirl", "Haar-twirl a superoperator and extract coefficients");
  twirl->add_option("input,--input", input, "Superoperator or coefficient file")->required();
  auto* realize = app.add_subcommand("realize", "Write the superoperator of a map or preset");
  realize->add_option("input,--input", input, "Coefficient or multicopy file");
  realize->add_option("--preset", preset, "classical or virtual (needs --d)");

  auto* multicopy = app.add_subcommand("multicopy", "m-copy covariant maps");
  multicopy->require_subcommand(1);
  auto* mc_apply = multicopy->add_subcommand("apply", "Apply or realize an m-copy map");
  mc_apply->add_option("input,--input", input, "Multicopy or two-copy coefficient file")->required();
  mc_apply->add_option("--operator", operator_path, "d x d operator to apply");
  auto* mc_extract = multicopy->add_subcommand("extract", "Extract m-copy coefficients (d >= m+1)");
  mc_extract->add_option("input,--input", input, "Superoperator file")->required();
  mc_extract->add_option("--m", m, "Number of copies")->check(CLI::Range(2, 4));
  auto* mc_fit = multicopy->add_subcommand("fit", "Least-squares fit onto span Gamma(S_m)");
  mc_fit->add_option("input,--input", input, "d^m x d^m operator file");
  mc_fit->add_option("--perm", perm, "Fit Gamma(perm) instead, e.g. \"(1 2 3)\" (needs --d)");
  mc_fit->add_option("--m", m, "Number of copies")->check(CLI::Range(1, 4));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? exit_ok : exit_other;
  }

  try {
    // Defaults, then COVMAP_CONFIG, then flags.
    CliConfig cfg;
    if (const char* path = std::getenv("COVMAP_CONFIG"); path && *path) apply_config_file(cfg, path);
    if (opt_d->count()) cfg.d = flag_d;
    if (opt_samples->count()) cfg.samples = flag_samples;
    if (opt_seed->count()) cfg.seed = flag_seed;
    if (opt_tol_abs->count()) cfg.tol.abs = flag_tol_abs;
    if (opt_tol_rel->count()) cfg.tol.rel = flag_tol_rel;
    if (opt_out->count()) cfg.out = flag_out;
    if (opt_format->count()) cfg.format = flag_format;
    cfg.validate();

    auto optional_input = [](const std::string& path) -> std::optional<json> {
      if (path.empty()) return std::nullopt;
      return load_json(path);
    };

    json result;
    if (*classify) result = cmd_classify(load_json(input), cfg);
    else if (*norm) result = cmd_norm(load_json(input), cfg);
    else if (*twirl) result = cmd_twirl(load_json(input), cfg);
    else if (*realize) result = cmd_realize(optional_input(input), preset, cfg);
    else if (*mc_apply)
      result = cmd_multicopy_apply(load_json(input), optional_input(operator_path), cfg);
    else if (*mc_extract) result = cmd_multicopy_extract(load_json(input), m, cfg);
    else if (*mc_fit) result = cmd_multicopy_fit(optional_input(input), perm, m, cfg);
    emit(result, cfg);
    return exit_ok;
  } catch (const covmap::Error& e) {
    std::cerr << "covmap: " << covmap::to_string(e.kind()) << ": " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const json::exception& e) {
    std::cerr << "covmap: parse_error: " << e.what() << '\n';
    return exit_parse;
  } catch (const std::exception& e) {
    std::cerr << "covmap: " << e.what() << '\n';
    return exit_other;
  }
}
