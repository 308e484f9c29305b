// SPDX-License-Identifier: Apache-2.0
#pragma once

// Dense complex linear algebra for the small operators this library works
// with (at most a few hundred rows).
//
// Tensor convention: for A acting on H1 (dim d1) and B on H2 (dim d2), the
// basis vector e_i (x) e_j of H1 (x) H2 has flat index i*d2 + j, i.e. the
// first factor is the slow index. Every module relies on this.
//
// Vectorization convention: vec() stacks columns, so the (r, c) entry of an
// n x m matrix lands at index r + c*n.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "covmap/error.hpp"

namespace covmap {

using cplx = std::complex<double>;

/// Absolute/relative tolerance pair. A quantity q passes against a scale s
/// when |q| <= abs + rel * s.
struct Tolerance {
  double abs = 1e-9;
  double rel = 1e-9;

  double bound(double scale = 0.0) const { return abs + rel * scale; }
};

class ComplexMatrix {
public:
  ComplexMatrix() : ComplexMatrix(1, 1) {}

  ComplexMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols) {
    detail::require(rows >= 1 && cols >= 1, ErrorKind::invalid_argument,
                    "matrix dimensions must be positive");
  }

  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    detail::require(rows >= 1 && cols >= 1, ErrorKind::invalid_argument,
                    "matrix dimensions must be positive");
    detail::require(data_.size() == rows * cols, ErrorKind::dimension_mismatch,
                    "entry count " + std::to_string(data_.size()) +
                        " does not match " + std::to_string(rows) + "x" +
                        std::to_string(cols));
  }

  static ComplexMatrix identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static ComplexMatrix diagonal(std::span<const cplx> diag) {
    ComplexMatrix m(diag.size(), diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }

  cplx& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::span<cplx> data() noexcept { return data_; }
  std::span<const cplx> data() const noexcept { return data_; }

  ComplexMatrix adjoint() const {
    ComplexMatrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) out(c, r) = std::conj((*this)(r, c));
    return out;
  }

  ComplexMatrix transpose() const {
    ComplexMatrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) out(c, r) = (*this)(r, c);
    return out;
  }

  cplx trace() const {
    detail::require(is_square(), ErrorKind::dimension_mismatch,
                    "trace of a non-square matrix");
    cplx t = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
    return t;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (const auto& z : data_) s += std::norm(z);
    return std::sqrt(s);
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& z : data_) m = std::max(m, std::abs(z));
    return m;
  }

  ComplexMatrix& operator+=(const ComplexMatrix& o) {
    check_same_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  ComplexMatrix& operator-=(const ComplexMatrix& o) {
    check_same_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  ComplexMatrix& operator*=(cplx s) {
    for (auto& z : data_) z *= s;
    return *this;
  }

  /// Adds s * o in place.
  void axpy(cplx s, const ComplexMatrix& o) {
    check_same_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += s * o.data_[i];
  }

  bool operator==(const ComplexMatrix&) const = default;

private:
  void check_same_shape(const ComplexMatrix& o) const {
    detail::require(rows_ == o.rows_ && cols_ == o.cols_,
                    ErrorKind::dimension_mismatch,
                    "shape mismatch: " + std::to_string(rows_) + "x" +
                        std::to_string(cols_) + " vs " + std::to_string(o.rows_) +
                        "x" + std::to_string(o.cols_));
  }

  std::size_t rows_;
  std::size_t cols_;
  std::vector<cplx> data_;
};

inline ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
inline ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
inline ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }
inline ComplexMatrix operator*(ComplexMatrix a, cplx s) { return a *= s; }

inline ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  detail::require(a.cols() == b.rows(), ErrorKind::dimension_mismatch,
                  "matrix product: inner dimensions differ");
  ComplexMatrix out(a.rows(), b.cols());
  const std::size_t n = b.cols();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    cplx* orow = &out(i, 0);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const cplx aik = a(i, k);
      if (aik == cplx{}) continue;
      const cplx* brow = &b(k, 0);
      for (std::size_t j = 0; j < n; ++j) orow[j] += aik * brow[j];
    }
  }
  return out;
}

/// Matrix-vector product.
inline std::vector<cplx> operator*(const ComplexMatrix& a, std::span<const cplx> x) {
  detail::require(a.cols() == x.size(), ErrorKind::dimension_mismatch,
                  "matrix-vector product: size mismatch");
  std::vector<cplx> y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    cplx s = 0.0;
    const cplx* row = &a(i, 0);
    for (std::size_t k = 0; k < x.size(); ++k) s += row[k] * x[k];
    y[i] = s;
  }
  return y;
}

/// Kronecker product a (x) b; entry block (i, j) is a(i, j) * b.
inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const cplx aij = a(i, j);
      if (aij == cplx{}) continue;
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
    }
  return out;
}

/// a (x) a (x) ... (x) a with `power` factors.
inline ComplexMatrix kron_power(const ComplexMatrix& a, std::size_t power) {
  detail::require(power >= 1, ErrorKind::invalid_argument, "kron_power needs power >= 1");
  ComplexMatrix out = a;
  for (std::size_t k = 1; k < power; ++k) out = kron(out, a);
  return out;
}

enum class TraceSide { first, second };

/// tr_1 (side = first) or tr_2 (side = second) of an operator on C^d1 (x) C^d2.
inline ComplexMatrix partial_trace(TraceSide side, const ComplexMatrix& t,
                                   std::size_t d1, std::size_t d2) {
  detail::require(d1 >= 1 && d2 >= 1, ErrorKind::invalid_argument,
                  "partial_trace: factor dimensions must be positive");
  detail::require(t.rows() == d1 * d2 && t.cols() == d1 * d2,
                  ErrorKind::dimension_mismatch,
                  "partial_trace: operator is not (d1*d2)x(d1*d2)");
  if (side == TraceSide::first) {
    ComplexMatrix out(d2, d2);
    for (std::size_t i = 0; i < d2; ++i)
      for (std::size_t j = 0; j < d2; ++j)
        for (std::size_t k = 0; k < d1; ++k) out(i, j) += t(k * d2 + i, k * d2 + j);
    return out;
  }
  ComplexMatrix out(d1, d1);
  for (std::size_t i = 0; i < d1; ++i)
    for (std::size_t j = 0; j < d1; ++j)
      for (std::size_t k = 0; k < d2; ++k) out(i, j) += t(i * d2 + k, j * d2 + k);
  return out;
}

/// Hilbert-Schmidt inner product tr(a^dagger b).
inline cplx hs_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  detail::require(a.rows() == b.rows() && a.cols() == b.cols(),
                  ErrorKind::dimension_mismatch, "hs_inner: shape mismatch");
  cplx s = 0.0;
  auto da = a.data();
  auto db = b.data();
  for (std::size_t i = 0; i < da.size(); ++i) s += std::conj(da[i]) * db[i];
  return s;
}

/// Column-stacking vectorization.
inline std::vector<cplx> vec(const ComplexMatrix& x) {
  std::vector<cplx> v(x.rows() * x.cols());
  for (std::size_t c = 0; c < x.cols(); ++c)
    for (std::size_t r = 0; r < x.rows(); ++r) v[r + c * x.rows()] = x(r, c);
  return v;
}

inline ComplexMatrix unvec(std::span<const cplx> v, std::size_t rows, std::size_t cols) {
  detail::require(v.size() == rows * cols, ErrorKind::dimension_mismatch,
                  "unvec: length does not match shape");
  ComplexMatrix x(rows, cols);
  for (std::size_t c = 0; c < cols; ++c)
    for (std::size_t r = 0; r < rows; ++r) x(r, c) = v[r + c * rows];
  return x;
}

/// Applies a superoperator matrix (column-stacking convention) to a square
/// input, returning the square output.
inline ComplexMatrix apply_superoperator(const ComplexMatrix& superop, const ComplexMatrix& x) {
  const std::size_t out_dim =
      static_cast<std::size_t>(std::llround(std::sqrt(double(superop.rows()))));
  detail::require(out_dim * out_dim == superop.rows(), ErrorKind::dimension_mismatch,
                  "superoperator row count is not a perfect square");
  detail::require(x.is_square() && x.rows() * x.cols() == superop.cols(),
                  ErrorKind::dimension_mismatch,
                  "superoperator input has the wrong dimension");
  const auto y = superop * std::span<const cplx>(vec(x));
  return unvec(y, out_dim, out_dim);
}

/// Frobenius distance between a and its adjoint.
inline double hermiticity_defect(const ComplexMatrix& a) {
  detail::require(a.is_square(), ErrorKind::dimension_mismatch,
                  "hermiticity check of a non-square matrix");
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) s += std::norm(a(i, j) - std::conj(a(j, i)));
  return std::sqrt(s);
}

struct HermitianEigensystem {
  std::vector<double> values;  // ascending
  ComplexMatrix vectors;       // column k belongs to values[k]
};

namespace detail {

// Cyclic complex Jacobi. Each rotation first removes the phase of the pivot
// a(p, q), then applies the real symmetric rotation that zeroes it.
inline HermitianEigensystem jacobi_eigensystem(const ComplexMatrix& input, bool want_vectors) {
  const std::size_t n = input.rows();
  ComplexMatrix a = input;
  // Symmetrize so rounding noise below the Hermiticity tolerance does not bias
  // the result.
  for (std::size_t i = 0; i < n; ++i) {
    a(i, i) = a(i, i).real();
    for (std::size_t j = i + 1; j < n; ++j) {
      const cplx avg = 0.5 * (a(i, j) + std::conj(a(j, i)));
      a(i, j) = avg;
      a(j, i) = std::conj(avg);
    }
  }
  ComplexMatrix v = want_vectors ? ComplexMatrix::identity(n) : ComplexMatrix(1, 1);

  const double scale = std::max(a.frobenius_norm(), 1e-300);
  constexpr int max_sweeps = 100;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += std::norm(a(p, q));
    if (std::sqrt(2.0 * off) <= 1e-15 * scale) break;

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const cplx apq = a(p, q);
        const double r = std::abs(apq);
        if (r == 0.0) continue;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        if (sweep > 3 && r < 1e-18 * (std::abs(app) + std::abs(aqq))) {
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          continue;
        }
        const cplx phase = apq / r;  // e^{i phi}
        const double theta = (aqq - app) / (2.0 * r);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        // G restricted to (p, q): [[c, s], [-s e^{-i phi}, c e^{-i phi}]].
        const cplx g_pp = c;
        const cplx g_pq = s;
        const cplx g_qp = -s * std::conj(phase);
        const cplx g_qq = c * std::conj(phase);

        // a <- a G
        for (std::size_t k = 0; k < n; ++k) {
          const cplx akp = a(k, p);
          const cplx akq = a(k, q);
          a(k, p) = akp * g_pp + akq * g_qp;
          a(k, q) = akp * g_pq + akq * g_qq;
        }
        // a <- G^dagger a
        for (std::size_t k = 0; k < n; ++k) {
          const cplx apk = a(p, k);
          const cplx aqk = a(q, k);
          a(p, k) = std::conj(g_pp) * apk + std::conj(g_qp) * aqk;
          a(q, k) = std::conj(g_pq) * apk + std::conj(g_qq) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        if (want_vectors) {
          for (std::size_t k = 0; k < n; ++k) {
            const cplx vkp = v(k, p);
            const cplx vkq = v(k, q);
            v(k, p) = vkp * g_pp + vkq * g_qp;
            v(k, q) = vkp * g_pq + vkq * g_qq;
          }
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return a(x, x).real() < a(y, y).real();
  });
  HermitianEigensystem out{std::vector<double>(n), want_vectors ? ComplexMatrix(n, n)
                                                                : ComplexMatrix(1, 1)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]).real();
    if (want_vectors)
      for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = v(r, order[k]);
  }
  return out;
}

// Eigenvalues only: Householder reduction to real symmetric tridiagonal form,
// then implicit QL with Wilkinson shifts. O(n^3) with a small constant; the
// Jacobi routine above is kept for eigenvectors.
inline std::vector<double> tridiagonal_ql_eigenvalues(const ComplexMatrix& input) {
  const std::size_t n = input.rows();
  ComplexMatrix a = input;
  std::vector<double> diag(n), off(n, 0.0);
  std::vector<cplx> v(n), p(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    // Reflect a(k+1:n, k) onto alpha e_1.
    double xnorm2 = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) xnorm2 += std::norm(a(i, k));
    const double xnorm = std::sqrt(xnorm2);
    const cplx x0 = a(k + 1, k);
    if (xnorm == 0.0) continue;
    const cplx phase = std::abs(x0) > 0.0 ? x0 / std::abs(x0) : cplx(1.0);
    const cplx alpha = -phase * xnorm;
    for (std::size_t i = k + 1; i < n; ++i) v[i] = a(i, k);
    v[k + 1] -= alpha;
    double vnorm2 = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) vnorm2 += std::norm(v[i]);
    if (vnorm2 == 0.0) continue;
    const double inv = 1.0 / std::sqrt(vnorm2);
    for (std::size_t i = k + 1; i < n; ++i) v[i] *= inv;
    // B <- (I - 2vv^dagger) B (I - 2vv^dagger) = B - 2 v q^dagger - 2 q v^dagger,
    // with p = B v, K = v^dagger p and q = p - K v.
    double kk = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) {
      cplx acc = 0.0;
      for (std::size_t j = k + 1; j < n; ++j) acc += a(i, j) * v[j];
      p[i] = acc;
      kk += (std::conj(v[i]) * acc).real();
    }
    for (std::size_t i = k + 1; i < n; ++i) p[i] -= kk * v[i];
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j)
        a(i, j) -= 2.0 * (v[i] * std::conj(p[j]) + p[i] * std::conj(v[j]));
    a(k + 1, k) = alpha;
    a(k, k + 1) = std::conj(alpha);
    for (std::size_t i = k + 2; i < n; ++i) a(i, k) = a(k, i) = 0.0;
  }
  // A diagonal unitary makes the off-diagonal real and nonnegative.
  for (std::size_t i = 0; i < n; ++i) diag[i] = a(i, i).real();
  for (std::size_t i = 0; i + 1 < n; ++i) off[i] = std::abs(a(i + 1, i));

  constexpr double eps = 2.220446049250313e-16;
  const long nn = long(n);
  for (long l = 0; l < nn; ++l) {
    int iter = 0;
    long m;
    do {
      for (m = l; m < nn - 1; ++m) {
        const double dd = std::abs(diag[m]) + std::abs(diag[m + 1]);
        if (std::abs(off[m]) <= eps * dd) break;
      }
      if (m != l) {
        require(iter++ < 100, ErrorKind::invalid_argument, "QL iteration did not converge");
        double g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
        double r = std::hypot(g, 1.0);
        g = diag[m] - diag[l] + off[l] / (g + (g >= 0.0 ? r : -r));
        double s = 1.0, c = 1.0, pp = 0.0;
        long i;
        for (i = m - 1; i >= l; --i) {
          double f = s * off[i];
          const double b = c * off[i];
          r = std::hypot(f, g);
          off[i + 1] = r;
          if (r == 0.0) {
            diag[i + 1] -= pp;
            off[m] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = diag[i + 1] - pp;
          r = (diag[i] - g) * s + 2.0 * c * b;
          pp = s * r;
          diag[i + 1] = g + pp;
          g = c * r - b;
        }
        if (r == 0.0 && i >= l) continue;
        diag[l] -= pp;
        off[l] = g;
        off[m] = 0.0;
      }
    } while (m != l);
  }
  std::sort(diag.begin(), diag.end());
  return diag;
}

inline std::vector<double> symmetrized_eigenvalues(const ComplexMatrix& input) {
  ComplexMatrix a = input;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    a(i, i) = a(i, i).real();
    for (std::size_t j = i + 1; j < a.rows(); ++j) {
      const cplx avg = 0.5 * (a(i, j) + std::conj(a(j, i)));
      a(i, j) = avg;
      a(j, i) = std::conj(avg);
    }
  }
  return tridiagonal_ql_eigenvalues(a);
}

inline void require_hermitian(const ComplexMatrix& a, const Tolerance& tol) {
  require(a.is_square(), ErrorKind::dimension_mismatch,
          "eigenvalues requested for a non-square matrix");
  const double defect = hermiticity_defect(a);
  if (defect > tol.bound(a.frobenius_norm()))
    fail(ErrorKind::not_hermitian,
         "matrix is not Hermitian: ||a - a^dagger||_F = " + std::to_string(defect));
}

}  // namespace detail

/// Eigenvalues (ascending) of a Hermitian matrix.
inline std::vector<double> hermitian_eigenvalues(const ComplexMatrix& a,
                                                 const Tolerance& tol = {}) {
  detail::require_hermitian(a, tol);
  return detail::symmetrized_eigenvalues(a);
}

inline HermitianEigensystem hermitian_eigensystem(const ComplexMatrix& a,
                                                  const Tolerance& tol = {}) {
  detail::require_hermitian(a, tol);
  return detail::jacobi_eigensystem(a, true);
}

/// Largest singular value.
inline double operator_norm(const ComplexMatrix& a) {
  if (a.max_abs() == 0.0) return 0.0;
  // Work with the smaller Gram matrix.
  const ComplexMatrix gram = a.rows() >= a.cols() ? a.adjoint() * a : a * a.adjoint();
  const auto ev = detail::symmetrized_eigenvalues(gram);
  return std::sqrt(std::max(ev.back(), 0.0));
}

/// Positive semidefinite within tolerance. Non-Hermitian input is not PSD.
inline bool is_psd(const ComplexMatrix& a, const Tolerance& tol = {}) {
  if (!a.is_square()) return false;
  const double fro = a.frobenius_norm();
  if (hermiticity_defect(a) > tol.bound(fro)) return false;
  const auto ev = detail::symmetrized_eigenvalues(a);
  const double scale = std::max(std::abs(ev.front()), std::abs(ev.back()));
  return ev.front() >= -tol.bound(scale);
}

/// Minimum-norm solution of the Hermitian positive semidefinite system
/// g x = b, through the eigen-decomposition of g. Eigenvalues below
/// rcond * max eigenvalue are treated as zero; their count is `nullity`.
struct PseudoSolve {
  std::vector<cplx> x;
  std::size_t nullity = 0;
  ComplexMatrix null_basis;  // columns span the detected null space (1x1 zero if none)
};

inline PseudoSolve solve_psd_pinv(const ComplexMatrix& g, std::span<const cplx> b,
                                  double rcond = 1e-10) {
  detail::require(g.is_square() && g.rows() == b.size(), ErrorKind::dimension_mismatch,
                  "solve_psd_pinv: system shape mismatch");
  const auto es = hermitian_eigensystem(g, Tolerance{1e-9, 1e-9});
  const std::size_t n = g.rows();
  const double top = std::max(std::abs(es.values.front()), std::abs(es.values.back()));
  PseudoSolve out;
  out.x.assign(n, cplx{});
  std::vector<std::size_t> null_cols;
  for (std::size_t k = 0; k < n; ++k) {
    const double lam = es.values[k];
    if (std::abs(lam) <= rcond * top || top == 0.0) {
      null_cols.push_back(k);
      continue;
    }
    cplx proj = 0.0;
    for (std::size_t r = 0; r < n; ++r) proj += std::conj(es.vectors(r, k)) * b[r];
    proj /= lam;
    for (std::size_t r = 0; r < n; ++r) out.x[r] += proj * es.vectors(r, k);
  }
  out.nullity = null_cols.size();
  if (!null_cols.empty()) {
    out.null_basis = ComplexMatrix(n, null_cols.size());
    for (std::size_t c = 0; c < null_cols.size(); ++c)
      for (std::size_t r = 0; r < n; ++r) out.null_basis(r, c) = es.vectors(r, null_cols[c]);
  }
  return out;
}

}  // namespace covmap
