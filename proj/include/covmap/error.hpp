// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace covmap {

/// Failure categories. The CLI maps these onto its exit codes.
enum class ErrorKind {
  invalid_argument,
  dimension_mismatch,
  not_hermitian,
  not_projector,
  gauge_ambiguous,
  uniqueness_unavailable,
  trace_terms_present,
  parse_error,
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::dimension_mismatch: return "dimension_mismatch";
    case ErrorKind::not_hermitian: return "not_hermitian";
    case ErrorKind::not_projector: return "not_projector";
    case ErrorKind::gauge_ambiguous: return "gauge_ambiguous";
    case ErrorKind::uniqueness_unavailable: return "uniqueness_unavailable";
    case ErrorKind::trace_terms_present: return "trace_terms_present";
    case ErrorKind::parse_error: return "parse_error";
  }
  return "unknown";
}

namespace detail {
[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}
inline void require(bool ok, ErrorKind kind, const std::string& what) {
  if (!ok) fail(kind, what);
}
}  // namespace detail

}  // namespace covmap
