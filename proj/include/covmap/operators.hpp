// SPDX-License-Identifier: Apache-2.0
#pragma once

// Structural operators: swap, (anti)symmetric projectors, symmetric-group
// permutation operators, matrix units and Haar-random unitaries.

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <numeric>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "covmap/linalg.hpp"
#include "covmap/rng.hpp"

namespace covmap {

/// S on C^d (x) C^d, S(x (x) y) = y (x) x.
inline ComplexMatrix swap_operator(std::size_t d) {
  detail::require(d >= 2, ErrorKind::invalid_argument, "swap_operator needs d >= 2");
  ComplexMatrix s(d * d, d * d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) s(j * d + i, i * d + j) = 1.0;
  return s;
}

enum class Symmetry { symmetric, antisymmetric };

/// Q = (I + S)/2 or Q_perp = (I - S)/2.
inline ComplexMatrix sym_projector(std::size_t d, Symmetry sym) {
  const double sign = sym == Symmetry::symmetric ? 1.0 : -1.0;
  ComplexMatrix q = ComplexMatrix::identity(d * d);
  q.axpy(sign, swap_operator(d));
  q *= 0.5;
  return q;
}

/// e_i e_j^* with 1-based indices.
inline ComplexMatrix matrix_unit(std::size_t i, std::size_t j, std::size_t d) {
  detail::require(i >= 1 && i <= d && j >= 1 && j <= d, ErrorKind::invalid_argument,
                  "matrix_unit index out of range");
  ComplexMatrix e(d, d);
  e(i - 1, j - 1) = 1.0;
  return e;
}

/// A bijection of {1..m}, stored in one-line notation (image[k-1] = s(k)).
class Permutation {
public:
  explicit Permutation(std::vector<std::size_t> image) : image_(std::move(image)) {
    const std::size_t m = image_.size();
    detail::require(m >= 1, ErrorKind::invalid_argument, "permutation of an empty set");
    std::vector<bool> seen(m + 1, false);
    for (auto v : image_) {
      detail::require(v >= 1 && v <= m && !seen[v], ErrorKind::invalid_argument,
                      "permutation image is not a bijection on {1..m}");
      seen[v] = true;
    }
  }

  static Permutation identity(std::size_t m) {
    std::vector<std::size_t> im(m);
    std::iota(im.begin(), im.end(), std::size_t{1});
    return Permutation(std::move(im));
  }

  /// Parses one-line notation ("2 3 1", "[2,3,1]") or cycle notation
  /// ("(1 2 3)", "(1 2)(3 4)", "()"). Cycle notation needs m explicitly
  /// because fixed points may be omitted.
  static Permutation parse(std::string_view text, std::size_t m) {
    const bool cycles = text.find('(') != std::string_view::npos;
    std::vector<std::vector<std::size_t>> groups;
    std::vector<std::size_t> flat;
    std::size_t num = 0;
    bool in_num = false;
    std::vector<std::size_t>* current = &flat;
    auto flush = [&] {
      if (in_num) current->push_back(num);
      in_num = false;
      num = 0;
    };
    for (char ch : text) {
      if (std::isdigit(static_cast<unsigned char>(ch))) {
        num = num * 10 + std::size_t(ch - '0');
        in_num = true;
        continue;
      }
      flush();
      if (cycles && ch == '(') {
        groups.emplace_back();
        current = &groups.back();
      } else if (cycles && ch == ')') {
        current = &flat;
      } else if (!(std::isspace(static_cast<unsigned char>(ch)) || ch == ',' || ch == '[' ||
                   ch == ']')) {
        detail::fail(ErrorKind::parse_error,
                     "unexpected character in permutation: '" + std::string(1, ch) + "'");
      }
    }
    flush();
    if (!cycles) {
      detail::require(m == 0 || flat.size() == m, ErrorKind::invalid_argument,
                      "one-line permutation length does not match m");
      return Permutation(std::move(flat));
    }
    detail::require(flat.empty(), ErrorKind::parse_error, "digits outside of a cycle");
    detail::require(m >= 1, ErrorKind::invalid_argument, "cycle notation needs m >= 1");
    std::vector<std::size_t> im(m);
    std::iota(im.begin(), im.end(), std::size_t{1});
    std::vector<bool> used(m + 1, false);
    for (const auto& cyc : groups) {
      for (std::size_t k = 0; k < cyc.size(); ++k) {
        const std::size_t from = cyc[k];
        detail::require(from >= 1 && from <= m && !used[from], ErrorKind::invalid_argument,
                        "cycle entries must be distinct and within 1..m");
        used[from] = true;
        im[from - 1] = cyc[(k + 1) % cyc.size()];
      }
    }
    return Permutation(std::move(im));
  }

  std::size_t size() const noexcept { return image_.size(); }
  const std::vector<std::size_t>& image() const noexcept { return image_; }

  /// s(k) for 1-based k.
  std::size_t operator()(std::size_t k) const { return image_.at(k - 1); }

  /// (this o other)(k) = this(other(k)).
  Permutation compose(const Permutation& other) const {
    detail::require(size() == other.size(), ErrorKind::dimension_mismatch,
                    "composing permutations of different degree");
    std::vector<std::size_t> im(size());
    for (std::size_t k = 1; k <= size(); ++k) im[k - 1] = (*this)(other(k));
    return Permutation(std::move(im));
  }

  Permutation inverse() const {
    std::vector<std::size_t> im(size());
    for (std::size_t k = 1; k <= size(); ++k) im[(*this)(k) - 1] = k;
    return Permutation(std::move(im));
  }

  std::size_t cycle_count() const {
    std::vector<bool> seen(size() + 1, false);
    std::size_t cycles = 0;
    for (std::size_t k = 1; k <= size(); ++k) {
      if (seen[k]) continue;
      ++cycles;
      for (std::size_t j = k; !seen[j]; j = (*this)(j)) seen[j] = true;
    }
    return cycles;
  }

  std::string to_cycle_string() const {
    std::ostringstream os;
    std::vector<bool> seen(size() + 1, false);
    for (std::size_t k = 1; k <= size(); ++k) {
      if (seen[k] || (*this)(k) == k) continue;
      os << '(';
      for (std::size_t j = k; !seen[j]; j = (*this)(j)) {
        if (j != k) os << ' ';
        os << j;
        seen[j] = true;
      }
      os << ')';
    }
    const auto s = os.str();
    return s.empty() ? "()" : s;
  }

  bool operator==(const Permutation&) const = default;

private:
  std::vector<std::size_t> image_;
};

/// All of S_m in lexicographic order of one-line notation; identity first.
inline std::vector<Permutation> all_permutations(std::size_t m) {
  detail::require(m >= 1 && m <= 8, ErrorKind::invalid_argument,
                  "all_permutations supports 1 <= m <= 8");
  std::vector<std::size_t> im(m);
  std::iota(im.begin(), im.end(), std::size_t{1});
  std::vector<Permutation> out;
  do {
    out.emplace_back(im);
  } while (std::next_permutation(im.begin(), im.end()));
  return out;
}

inline std::size_t int_pow(std::size_t base, std::size_t exp) {
  std::size_t r = 1;
  for (std::size_t k = 0; k < exp; ++k) r *= base;
  return r;
}

/// Index map of Gamma(s) on (C^d)^{(x) m}: basis tensor `idx` is sent to
/// basis tensor `map[idx]`. Gamma(s) moves the factor in position j to
/// position s(j), i.e. Gamma(s)(x_1 (x) ... (x) x_m) = x_{s^-1(1)} (x) ... .
inline std::vector<std::size_t> permutation_index_map(const Permutation& p, std::size_t d) {
  const std::size_t m = p.size();
  const std::size_t dim = int_pow(d, m);
  std::vector<std::size_t> stride(m);
  for (std::size_t j = 0; j < m; ++j) stride[j] = int_pow(d, m - 1 - j);
  std::vector<std::size_t> map(dim);
  for (std::size_t idx = 0; idx < dim; ++idx) {
    std::size_t out = 0;
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t digit = (idx / stride[j]) % d;
      out += digit * stride[p(j + 1) - 1];
    }
    map[idx] = out;
  }
  return map;
}

/// Gamma(s) as a d^m x d^m permutation matrix.
inline ComplexMatrix permutation_operator(const Permutation& p, std::size_t d) {
  detail::require(d >= 2, ErrorKind::invalid_argument, "permutation_operator needs d >= 2");
  const auto map = permutation_index_map(p, d);
  ComplexMatrix g(map.size(), map.size());
  for (std::size_t idx = 0; idx < map.size(); ++idx) g(map[idx], idx) = 1.0;
  return g;
}

namespace detail {

// Householder QR of a square complex matrix. Returns Q and the diagonal of R.
inline std::pair<ComplexMatrix, std::vector<cplx>> householder_qr(ComplexMatrix a) {
  const std::size_t n = a.rows();
  ComplexMatrix q = ComplexMatrix::identity(n);
  std::vector<cplx> rdiag(n);
  std::vector<cplx> v(n);
  for (std::size_t k = 0; k < n; ++k) {
    double xnorm2 = 0.0;
    for (std::size_t i = k; i < n; ++i) xnorm2 += std::norm(a(i, k));
    const double xnorm = std::sqrt(xnorm2);
    if (xnorm == 0.0) {
      rdiag[k] = 0.0;
      continue;
    }
    const cplx x0 = a(k, k);
    const cplx phase = std::abs(x0) == 0.0 ? cplx{1.0} : x0 / std::abs(x0);
    const cplx alpha = -phase * xnorm;
    for (std::size_t i = k; i < n; ++i) v[i] = a(i, k);
    v[k] -= alpha;
    double vnorm2 = 0.0;
    for (std::size_t i = k; i < n; ++i) vnorm2 += std::norm(v[i]);
    const double vnorm = std::sqrt(vnorm2);
    for (std::size_t i = k; i < n; ++i) v[i] /= vnorm;
    // a <- (I - 2 v v^dagger) a
    for (std::size_t j = k; j < n; ++j) {
      cplx dot = 0.0;
      for (std::size_t i = k; i < n; ++i) dot += std::conj(v[i]) * a(i, j);
      for (std::size_t i = k; i < n; ++i) a(i, j) -= 2.0 * v[i] * dot;
    }
    // q <- q (I - 2 v v^dagger)
    for (std::size_t r = 0; r < n; ++r) {
      cplx dot = 0.0;
      for (std::size_t i = k; i < n; ++i) dot += q(r, i) * v[i];
      for (std::size_t i = k; i < n; ++i) q(r, i) -= 2.0 * dot * std::conj(v[i]);
    }
    rdiag[k] = a(k, k);
  }
  return {std::move(q), std::move(rdiag)};
}

}  // namespace detail

/// d x d unitary drawn from the Haar measure, deterministic per seed.
/// Ginibre matrix -> QR -> columns rephased by the phases of diag(R).
inline ComplexMatrix haar_unitary(std::size_t d, RngSeed seed) {
  detail::require(d >= 1, ErrorKind::invalid_argument, "haar_unitary needs d >= 1");
  Xoshiro256 rng(seed);
  ComplexMatrix g(d, d);
  const double s = 1.0 / std::sqrt(2.0);
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c) {
      const double re = rng.normal();
      const double im = rng.normal();
      g(r, c) = cplx(re * s, im * s);
    }
  auto [q, rdiag] = detail::householder_qr(std::move(g));
  for (std::size_t c = 0; c < d; ++c) {
    const double mag = std::abs(rdiag[c]);
    const cplx phase = mag == 0.0 ? cplx{1.0} : rdiag[c] / mag;
    for (std::size_t r = 0; r < d; ++r) q(r, c) *= phase;
  }
  return q;
}

}  // namespace covmap
