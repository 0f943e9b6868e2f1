#pragma once

// Dense complex matrices, p-norms and the two eigenvalue kernels everything
// else is built on: the largest eigenvalue of a Hermitian matrix and the full
// spectrum of a general complex matrix.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "stochlog/errors.hpp"

namespace stochlog {

using cplx = std::complex<double>;

/// Which induced matrix norm (and matching vector norm) is meant.
enum class Norm { one, two, inf };

inline std::string to_string(Norm p) {
  switch (p) {
    case Norm::one: return "1";
    case Norm::two: return "2";
    case Norm::inf: return "inf";
  }
  return "?";
}

inline Norm parse_norm(const std::string& text) {
  if (text == "1") return Norm::one;
  if (text == "2") return Norm::two;
  if (text == "inf" || text == "Inf" || text == "INF") return Norm::inf;
  throw ArgumentError("unsupported norm '" + text + "' (expected 1, 2 or inf)");
}

class ComplexMatrix {
 public:
  ComplexMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), entries_(rows * cols) {
    if (rows == 0 || cols == 0) {
      throw DimensionError("matrix dimensions must be positive");
    }
  }

  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
      : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (rows == 0 || cols == 0) {
      throw DimensionError("matrix dimensions must be positive");
    }
    if (entries_.size() != rows * cols) {
      throw DimensionError("expected " + std::to_string(rows * cols) +
                           " entries, got " + std::to_string(entries_.size()));
    }
    for (std::size_t k = 0; k < entries_.size(); ++k) {
      if (!std::isfinite(entries_[k].real()) ||
          !std::isfinite(entries_[k].imag())) {
        throw ArgumentError("non-finite matrix entry at index " +
                            std::to_string(k));
      }
    }
  }

  static ComplexMatrix zeros(std::size_t n) { return ComplexMatrix(n, n); }

  static ComplexMatrix identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static ComplexMatrix diagonal(std::initializer_list<cplx> diag) {
    ComplexMatrix m(diag.size(), diag.size());
    std::size_t i = 0;
    for (const auto& d : diag) {
      m(i, i) = d;
      ++i;
    }
    return m;
  }

  /// Row-major literal, e.g. from_rows({{-1, 2}, {0, -1}}).
  static ComplexMatrix from_rows(
      std::initializer_list<std::initializer_list<cplx>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.begin()->size();
    std::vector<cplx> data;
    data.reserve(r * c);
    for (const auto& row : rows) {
      if (row.size() != c) throw DimensionError("ragged matrix literal");
      data.insert(data.end(), row.begin(), row.end());
    }
    return ComplexMatrix(r, c, std::move(data));
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }

  cplx& operator()(std::size_t i, std::size_t j) noexcept {
    return entries_[i * cols_ + j];
  }
  const cplx& operator()(std::size_t i, std::size_t j) const noexcept {
    return entries_[i * cols_ + j];
  }

  std::span<cplx> data() noexcept { return entries_; }
  std::span<const cplx> data() const noexcept { return entries_; }

  bool is_real() const noexcept {
    return std::all_of(entries_.begin(), entries_.end(),
                       [](const cplx& z) { return z.imag() == 0.0; });
  }

  ComplexMatrix adjoint() const {
    ComplexMatrix out(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
    return out;
  }

  ComplexMatrix& operator+=(const ComplexMatrix& o) {
    require_same_shape(o);
    for (std::size_t k = 0; k < entries_.size(); ++k) entries_[k] += o.entries_[k];
    return *this;
  }

  ComplexMatrix& operator-=(const ComplexMatrix& o) {
    require_same_shape(o);
    for (std::size_t k = 0; k < entries_.size(); ++k) entries_[k] -= o.entries_[k];
    return *this;
  }

  ComplexMatrix& operator*=(cplx s) noexcept {
    for (auto& z : entries_) z *= s;
    return *this;
  }

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) {
    return a += b;
  }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) {
    return a -= b;
  }
  friend ComplexMatrix operator-(ComplexMatrix a) { return a *= -1.0; }
  friend ComplexMatrix operator*(ComplexMatrix a, cplx s) { return a *= s; }
  friend ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }

  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols_ != b.rows_) throw DimensionError("matrix product shape mismatch");
    ComplexMatrix out(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const cplx aik = a(i, k);
        if (aik == cplx{}) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) out(i, j) += aik * b(k, j);
      }
    return out;
  }

  friend bool operator==(const ComplexMatrix& a, const ComplexMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.entries_ == b.entries_;
  }

 private:
  void require_same_shape(const ComplexMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) {
      throw DimensionError("matrix shape mismatch");
    }
  }

  std::size_t rows_;
  std::size_t cols_;
  std::vector<cplx> entries_;
};

struct Spectrum {
  std::vector<cplx> eigenvalues;
  double residual_bound = 0.0;

  double max_real_part() const {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& z : eigenvalues) best = std::max(best, z.real());
    return best;
  }
};

inline void require_square(const ComplexMatrix& m, const char* what) {
  if (!m.is_square()) {
    throw DimensionError(std::string(what) + ": matrix must be square, got " +
                         std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

inline double vector_norm(std::span<const cplx> x, Norm p) {
  double acc = 0.0;
  switch (p) {
    case Norm::one:
      for (const auto& z : x) acc += std::abs(z);
      return acc;
    case Norm::inf:
      for (const auto& z : x) acc = std::max(acc, std::abs(z));
      return acc;
    case Norm::two: {
      // scaled sum of squares, no overflow for large entries
      double scale = 0.0;
      double ssq = 1.0;
      for (const auto& z : x) {
        for (double c : {z.real(), z.imag()}) {
          if (c == 0.0) continue;
          const double a = std::abs(c);
          if (scale < a) {
            ssq = 1.0 + ssq * (scale / a) * (scale / a);
            scale = a;
          } else {
            ssq += (a / scale) * (a / scale);
          }
        }
      }
      return scale * std::sqrt(ssq);
    }
  }
  return acc;
}

inline ComplexMatrix hermitian_part(const ComplexMatrix& m) {
  require_square(m, "hermitian_part");
  const std::size_t n = m.rows();
  ComplexMatrix h(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    h(i, i) = m(i, i).real();
    for (std::size_t j = i + 1; j < n; ++j) {
      const cplx v = 0.5 * (m(i, j) + std::conj(m(j, i)));
      h(i, j) = v;
      h(j, i) = std::conj(v);
    }
  }
  return h;
}

namespace detail {

/// Max row sum of a square row-major buffer.
inline double inf_norm(std::span<const cplx> a, std::size_t n) {
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) row += std::abs(a[i * n + j]);
    best = std::max(best, row);
  }
  return best;
}

/// Largest eigenvalue of a symmetric tridiagonal matrix by Sturm bisection.
/// `diag` has n entries, `off` has n-1 (signs irrelevant).
inline double tridiagonal_lambda_max(std::span<const double> diag,
                                     std::span<const double> off) {
  const std::size_t n = diag.size();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = (i > 0 ? std::abs(off[i - 1]) : 0.0) +
                     (i + 1 < n ? std::abs(off[i]) : 0.0);
    lo = std::min(lo, diag[i] - r);
    hi = std::max(hi, diag[i] + r);
  }
  const double scale = std::max(std::abs(lo), std::abs(hi));
  if (scale == 0.0) return 0.0;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double pivmin = std::numeric_limits<double>::min() * std::max(1.0, scale);

  // number of eigenvalues strictly below x
  auto count_below = [&](double x) {
    std::size_t count = 0;
    double q = diag[0] - x;
    for (std::size_t i = 0;; ++i) {
      if (std::abs(q) < pivmin) q = -pivmin;
      if (q < 0.0) ++count;
      if (i + 1 == n) break;
      q = diag[i + 1] - x - off[i] * off[i] / q;
    }
    return count;
  };

  lo -= 2.0 * eps * scale;
  hi += 2.0 * eps * scale;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= 2.0 * eps * std::max({std::abs(lo), std::abs(hi), eps * scale}))
      break;
    if (mid <= lo || mid >= hi) break;
    if (count_below(mid) == n) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Largest eigenvalue of the Hermitian matrix held (row-major, n x n) in `a`.
/// Only the lower triangle is trusted. The buffer is destroyed. `work` is
/// reusable scratch so hot Monte Carlo loops do not allocate.
inline double hermitian_lambda_max_inplace(std::span<cplx> a, std::size_t n,
                                           std::vector<cplx>& work) {
  if (n == 1) return a[0].real();
  if (n == 2) {
    const double d0 = a[0].real();
    const double d1 = a[3].real();
    return 0.5 * (d0 + d1) + std::hypot(0.5 * (d0 - d1), std::abs(a[2]));
  }
  // Householder reduction to Hermitian tridiagonal form, then the moduli of
  // the subdiagonal give a real symmetric tridiagonal with the same spectrum.
  work.resize(3 * n);
  cplx* v = work.data();
  cplx* p = v + n;
  std::vector<double> diag(n), off(n - 1);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    const std::size_t m = n - k - 1;
    double alpha = 0.0;
    for (std::size_t i = 0; i < m; ++i) alpha = std::hypot(alpha, std::abs(a[(k + 1 + i) * n + k]));
    diag[k] = a[k * n + k].real();
    if (alpha == 0.0) {
      off[k] = 0.0;
      continue;
    }
    const cplx x0 = a[(k + 1) * n + k];
    const double ax0 = std::abs(x0);
    const cplx phase = ax0 == 0.0 ? cplx(1.0) : x0 / ax0;
    const cplx beta = -phase * alpha;
    for (std::size_t i = 0; i < m; ++i) v[i] = a[(k + 1 + i) * n + k];
    v[0] -= beta;
    const double tau = 1.0 / (alpha * (alpha + ax0));  // 2 / |v|^2
    // p = tau * S v with S the trailing block (Hermitian, lower triangle valid)
    for (std::size_t i = 0; i < m; ++i) {
      cplx acc{};
      for (std::size_t j = 0; j < m; ++j) {
        const std::size_t r = k + 1 + i;
        const std::size_t c = k + 1 + j;
        const cplx s = r >= c ? a[r * n + c] : std::conj(a[c * n + r]);
        acc += s * v[j];
      }
      p[i] = tau * acc;
    }
    cplx vhp{};
    for (std::size_t i = 0; i < m; ++i) vhp += std::conj(v[i]) * p[i];
    const cplx kfac = 0.5 * tau * vhp.real();
    for (std::size_t i = 0; i < m; ++i) p[i] -= kfac * v[i];  // p becomes w
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        const std::size_t r = k + 1 + i;
        const std::size_t c = k + 1 + j;
        a[r * n + c] -= v[i] * std::conj(p[j]) + p[i] * std::conj(v[j]);
      }
    }
    off[k] = alpha;
  }
  diag[n - 2] = a[(n - 2) * n + (n - 2)].real();
  diag[n - 1] = a[(n - 1) * n + (n - 1)].real();
  off[n - 2] = std::abs(a[(n - 1) * n + (n - 2)]);
  return tridiagonal_lambda_max(diag, off);
}

}  // namespace detail

/// Largest eigenvalue of a Hermitian matrix. The input must be Hermitian to
/// within 1e-12 * ||H||_inf; it is symmetrized before the solve.
inline double lambda_max_hermitian(const ComplexMatrix& h) {
  require_square(h, "lambda_max_hermitian");
  const std::size_t n = h.rows();
  const double scale = detail::inf_norm(h.data(), n);
  const double tol = 1e-12 * scale;
  std::vector<cplx> a(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const cplx lower = h(i, j);
      const cplx upper_conj = std::conj(h(j, i));
      if (std::abs(lower - upper_conj) > tol) {
        throw ContractError("lambda_max_hermitian: matrix is not Hermitian (entry " +
                            std::to_string(i) + "," + std::to_string(j) + ")");
      }
      a[i * n + j] = i == j ? cplx(lower.real()) : 0.5 * (lower + upper_conj);
    }
  }
  std::vector<cplx> work;
  return detail::hermitian_lambda_max_inplace(a, n, work);
}

inline double lambda_min_hermitian(const ComplexMatrix& h) {
  return -lambda_max_hermitian(-h);
}

namespace detail {

/// Reduce a general square matrix (row-major, in place) to upper Hessenberg
/// form by Householder similarity transforms.
inline void hessenberg_inplace(std::span<cplx> a, std::size_t n) {
  std::vector<cplx> v(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    const std::size_t m = n - k - 1;
    double alpha = 0.0;
    for (std::size_t i = 0; i < m; ++i) alpha = std::hypot(alpha, std::abs(a[(k + 1 + i) * n + k]));
    if (alpha == 0.0) continue;
    const cplx x0 = a[(k + 1) * n + k];
    const double ax0 = std::abs(x0);
    const cplx phase = ax0 == 0.0 ? cplx(1.0) : x0 / ax0;
    const cplx beta = -phase * alpha;
    for (std::size_t i = 0; i < m; ++i) v[i] = a[(k + 1 + i) * n + k];
    v[0] -= beta;
    const double tau = 1.0 / (alpha * (alpha + ax0));
    // left: rows k+1.., all columns from k
    for (std::size_t j = k; j < n; ++j) {
      cplx s{};
      for (std::size_t i = 0; i < m; ++i) s += std::conj(v[i]) * a[(k + 1 + i) * n + j];
      s *= tau;
      for (std::size_t i = 0; i < m; ++i) a[(k + 1 + i) * n + j] -= v[i] * s;
    }
    // right: all rows, columns k+1..
    for (std::size_t i = 0; i < n; ++i) {
      cplx s{};
      for (std::size_t j = 0; j < m; ++j) s += a[i * n + k + 1 + j] * v[j];
      s *= tau;
      for (std::size_t j = 0; j < m; ++j) a[i * n + k + 1 + j] -= s * std::conj(v[j]);
    }
    for (std::size_t i = 2; i <= m; ++i) a[(k + i) * n + k] = 0.0;
  }
}

struct Givens {
  double c;
  cplx s;
};

// [c s; -conj(s) c] [x; y] = [r; 0]
inline Givens make_givens(cplx x, cplx y) {
  const double ay = std::abs(y);
  if (ay == 0.0) return {1.0, 0.0};
  const double ax = std::abs(x);
  if (ax == 0.0) return {0.0, std::conj(y) / ay};
  const double norm = std::hypot(ax, ay);
  const cplx phase = x / ax;
  return {ax / norm, phase * std::conj(y) / norm};
}

}  // namespace detail

/// All eigenvalues of a general complex matrix: Householder Hessenberg
/// reduction followed by single-shift QR with Wilkinson shifts. Gives up
/// after 30*n QR sweeps.
inline Spectrum spectrum(const ComplexMatrix& m) {
  require_square(m, "spectrum");
  const std::size_t n = m.rows();
  std::vector<cplx> a(m.data().begin(), m.data().end());
  if (n == 1) return {{a[0]}, 0.0};
  detail::hessenberg_inplace(a, n);

  constexpr double eps = std::numeric_limits<double>::epsilon();
  double frob = 0.0;
  for (const auto& z : a) frob = std::hypot(frob, std::abs(z));
  double neglected_sq = 0.0;

  std::vector<cplx> eig(n);
  std::vector<cplx> found;
  std::vector<detail::Givens> rot(n);
  const std::size_t budget = 30 * n;
  std::size_t sweeps = 0;
  std::size_t since_deflation = 0;
  auto at = [&](std::size_t i, std::size_t j) -> cplx& { return a[i * n + j]; };

  std::ptrdiff_t hi = static_cast<std::ptrdiff_t>(n) - 1;
  while (hi >= 0) {
    // locate the active unreduced block [lo, hi]
    std::ptrdiff_t lo = hi;
    while (lo > 0) {
      const cplx sub = at(lo, lo - 1);
      double ref = std::abs(at(lo, lo)) + std::abs(at(lo - 1, lo - 1));
      if (ref == 0.0) ref = frob;
      if (std::abs(sub) <= eps * ref) {
        neglected_sq += std::norm(sub);
        at(lo, lo - 1) = 0.0;
        break;
      }
      --lo;
    }
    if (lo == hi) {
      eig[hi] = at(hi, hi);
      found.push_back(eig[hi]);
      --hi;
      since_deflation = 0;
      continue;
    }
    if (sweeps >= budget) {
      throw ConvergenceError("spectrum: QR iteration did not converge within " +
                                 std::to_string(budget) + " sweeps",
                             found);
    }
    ++sweeps;
    ++since_deflation;

    // Wilkinson shift from the trailing 2x2 block
    cplx shift;
    const cplx p = at(hi - 1, hi - 1);
    const cplx q = at(hi - 1, hi);
    const cplx r = at(hi, hi - 1);
    const cplx s = at(hi, hi);
    if (since_deflation % 11 == 10) {
      shift = s + 1.5 * std::abs(r);  // exceptional shift
    } else {
      const cplx half = 0.5 * (p - s);
      const cplx disc = std::sqrt(half * half + q * r);
      const cplx mu1 = s - (q * r) / (half + disc);
      const cplx mu2 = s - (q * r) / (half - disc);
      const bool ok1 = std::isfinite(mu1.real()) && std::isfinite(mu1.imag());
      const bool ok2 = std::isfinite(mu2.real()) && std::isfinite(mu2.imag());
      if (ok1 && (!ok2 || std::abs(mu1 - s) <= std::abs(mu2 - s))) {
        shift = mu1;
      } else if (ok2) {
        shift = mu2;
      } else {
        shift = s;
      }
    }

    for (std::ptrdiff_t k = lo; k <= hi; ++k) at(k, k) -= shift;
    for (std::ptrdiff_t k = lo; k < hi; ++k) {
      const auto g = detail::make_givens(at(k, k), at(k + 1, k));
      rot[k] = g;
      for (std::ptrdiff_t j = k; j <= hi; ++j) {
        const cplx x = at(k, j);
        const cplx y = at(k + 1, j);
        at(k, j) = g.c * x + g.s * y;
        at(k + 1, j) = -std::conj(g.s) * x + g.c * y;
      }
      at(k + 1, k) = 0.0;
    }
    for (std::ptrdiff_t k = lo; k < hi; ++k) {
      const auto& g = rot[k];
      const std::ptrdiff_t last = std::min(k + 1, hi);
      for (std::ptrdiff_t i = lo; i <= last; ++i) {
        const cplx x = at(i, k);
        const cplx y = at(i, k + 1);
        at(i, k) = x * g.c + y * std::conj(g.s);
        at(i, k + 1) = -x * g.s + y * g.c;
      }
    }
    for (std::ptrdiff_t k = lo; k <= hi; ++k) at(k, k) += shift;
  }
  return {std::move(eig), std::sqrt(neglected_sq) + 4.0 * n * eps * frob};
}

inline double matrix_norm(const ComplexMatrix& m, Norm p) {
  require_square(m, "matrix_norm");
  const std::size_t n = m.rows();
  double best = 0.0;
  switch (p) {
    case Norm::one:
      for (std::size_t j = 0; j < n; ++j) {
        double col = 0.0;
        for (std::size_t i = 0; i < n; ++i) col += std::abs(m(i, j));
        best = std::max(best, col);
      }
      return best;
    case Norm::inf:
      return detail::inf_norm(m.data(), n);
    case Norm::two:
      return std::sqrt(std::max(0.0, lambda_max_hermitian(hermitian_part(m.adjoint() * m))));
  }
  return best;
}

}  // namespace stochlog
