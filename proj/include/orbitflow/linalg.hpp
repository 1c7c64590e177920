#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "orbitflow/error.hpp"
#include "orbitflow/rational.hpp"

namespace orbitflow {

/// Relative tolerance used for every floating-point rank decision.
inline constexpr double kRankTolerance = 1e-9;

template <class T>
using Vector = std::vector<T>;

template <class T>
Vector<T> zeros(std::size_t n) {
  return Vector<T>(n, T(0));
}

template <class T>
Vector<T> unit_vector(std::size_t n, std::size_t i) {
  Vector<T> v(n, T(0));
  v.at(i) = T(1);
  return v;
}

template <class To, class From>
Vector<To> convert(const Vector<From>& v) {
  Vector<To> out;
  out.reserve(v.size());
  for (const auto& x : v) {
    if constexpr (std::is_same_v<To, double>)
      out.push_back(to_double(x));
    else
      out.push_back(To(x));
  }
  return out;
}

inline void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b)
    throw InvalidInput(std::string(what) + ": dimension mismatch (" + std::to_string(a) + " vs " + std::to_string(b) +
                       ")");
}

template <class T>
Vector<T> operator+(const Vector<T>& a, const Vector<T>& b) {
  require_same_size(a.size(), b.size(), "vector sum");
  Vector<T> r(a);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += b[i];
  return r;
}

template <class T>
Vector<T> operator-(const Vector<T>& a, const Vector<T>& b) {
  require_same_size(a.size(), b.size(), "vector difference");
  Vector<T> r(a);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
  return r;
}

template <class T>
Vector<T> operator-(const Vector<T>& a) {
  Vector<T> r(a);
  for (auto& x : r) x = -x;
  return r;
}

template <class T>
Vector<T> operator*(const T& s, const Vector<T>& a) {
  Vector<T> r(a);
  for (auto& x : r) x *= s;
  return r;
}

template <class T>
T dot(const Vector<T>& a, const Vector<T>& b) {
  require_same_size(a.size(), b.size(), "dot");
  T s(0);
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

template <class T>
double norm(const Vector<T>& a) {
  double s = 0.0;
  for (const auto& x : a) {
    const double d = to_double(x);
    s += d * d;
  }
  return std::sqrt(s);
}

template <class T>
T max_abs(const Vector<T>& a) {
  T m(0);
  for (const auto& x : a) m = std::max<T>(m, abs_value(x));
  return m;
}

template <class T>
bool is_zero(const Vector<T>& a) {
  return std::all_of(a.begin(), a.end(), [](const T& x) { return x == T(0); });
}

/// Dense row-major matrix over an ordered field (double or Rational).
template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, T(0)) {}
  Matrix(std::initializer_list<std::initializer_list<T>> init) {
    rows_ = init.size();
    cols_ = rows_ ? init.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& row : init) {
      if (row.size() != cols_) throw InvalidInput("ragged matrix literal");
      data_.insert(data_.end(), row.begin(), row.end());
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  /// Builds a matrix whose columns are the given vectors (all of length `rows`).
  static Matrix from_columns(std::size_t rows, const std::vector<Vector<T>>& cols) {
    Matrix m(rows, cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
      require_same_size(cols[j].size(), rows, "from_columns");
      for (std::size_t i = 0; i < rows; ++i) m(i, j) = cols[j][i];
    }
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  Vector<T> column(std::size_t j) const {
    Vector<T> v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
  }
  Vector<T> row(std::size_t i) const { return Vector<T>(data_.begin() + i * cols_, data_.begin() + (i + 1) * cols_); }
  std::vector<Vector<T>> columns() const {
    std::vector<Vector<T>> out;
    for (std::size_t j = 0; j < cols_; ++j) out.push_back(column(j));
    return out;
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  T max_abs() const {
    T m(0);
    for (const auto& x : data_) m = std::max<T>(m, abs_value(x));
    return m;
  }

  bool is_zero() const {
    return std::all_of(data_.begin(), data_.end(), [](const T& x) { return x == T(0); });
  }

  template <class To>
  Matrix<To> cast() const {
    Matrix<To> m(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) {
        if constexpr (std::is_same_v<To, double>)
          m(i, j) = to_double((*this)(i, j));
        else
          m(i, j) = To((*this)(i, j));
      }
    return m;
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  Matrix& operator+=(const Matrix& o) {
    check_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    check_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  Matrix& operator*=(const T& s) {
    for (auto& x : data_) x *= s;
    return *this;
  }

 private:
  void check_same_shape(const Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw InvalidInput("matrix shape mismatch");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

template <class T>
Matrix<T> operator+(Matrix<T> a, const Matrix<T>& b) {
  return a += b;
}
template <class T>
Matrix<T> operator-(Matrix<T> a, const Matrix<T>& b) {
  return a -= b;
}
template <class T>
Matrix<T> operator*(const T& s, Matrix<T> a) {
  return a *= s;
}
template <class T>
Matrix<T> operator-(Matrix<T> a) {
  return a *= T(-1);
}

template <class T>
Matrix<T> operator*(const Matrix<T>& a, const Matrix<T>& b) {
  require_same_size(a.cols(), b.rows(), "matrix product");
  Matrix<T> c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const T& aik = a(i, k);
      if (aik == T(0)) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

template <class T>
Vector<T> operator*(const Matrix<T>& a, const Vector<T>& v) {
  require_same_size(a.cols(), v.size(), "matrix-vector product");
  Vector<T> r(a.rows(), T(0));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) r[i] += a(i, j) * v[j];
  return r;
}

template <class T>
Matrix<T> commutator(const Matrix<T>& a, const Matrix<T>& b) {
  return a * b - b * a;
}

// ---------------------------------------------------------------------------
// Gaussian elimination

template <class T>
struct Echelon {
  Matrix<T> reduced;                // reduced row echelon form
  std::vector<std::size_t> pivots;  // pivot column of each nonzero row
};

/// Reduced row echelon form. Exact for Rational; for double, entries below
/// `kRankTolerance * max|A|` are treated as zero and partial pivoting is used.
template <class T>
Echelon<T> rref(Matrix<T> a) {
  const std::size_t m = a.rows(), n = a.cols();
  T threshold(0);
  if constexpr (!is_exact_v<T>) threshold = kRankTolerance * std::max(1e-300, a.max_abs());
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < n && r < m; ++c) {
    std::size_t best = r;
    if constexpr (is_exact_v<T>) {
      while (best < m && a(best, c) == T(0)) ++best;
      if (best == m) continue;
    } else {
      for (std::size_t i = r + 1; i < m; ++i)
        if (std::fabs(a(i, c)) > std::fabs(a(best, c))) best = i;
      if (std::fabs(a(best, c)) <= threshold) {
        for (std::size_t i = r; i < m; ++i) a(i, c) = 0.0;
        continue;
      }
    }
    if (best != r)
      for (std::size_t j = 0; j < n; ++j) std::swap(a(r, j), a(best, j));
    const T inv = T(1) / a(r, c);
    for (std::size_t j = c; j < n; ++j) a(r, j) *= inv;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == r || a(i, c) == T(0)) continue;
      const T factor = a(i, c);
      for (std::size_t j = c; j < n; ++j) a(i, j) -= factor * a(r, j);
    }
    pivots.push_back(c);
    ++r;
  }
  return {std::move(a), std::move(pivots)};
}

template <class T>
std::size_t rank(const Matrix<T>& a) {
  return rref(a).pivots.size();
}

/// Basis of {x : A x = 0}, one vector per free column, from the echelon form.
template <class T>
std::vector<Vector<T>> nullspace_exact(const Matrix<T>& a) {
  const auto ech = rref(a);
  const std::size_t n = a.cols();
  std::vector<bool> is_pivot(n, false);
  for (auto p : ech.pivots) is_pivot[p] = true;
  std::vector<Vector<T>> basis;
  for (std::size_t free = 0; free < n; ++free) {
    if (is_pivot[free]) continue;
    Vector<T> v(n, T(0));
    v[free] = T(1);
    for (std::size_t r = 0; r < ech.pivots.size(); ++r) v[ech.pivots[r]] = -ech.reduced(r, free);
    basis.push_back(std::move(v));
  }
  return basis;
}

/// Solves A X = B for square non-singular A.
template <class T>
Matrix<T> solve(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.rows() != a.cols()) throw InvalidInput("solve: matrix is not square");
  require_same_size(a.rows(), b.rows(), "solve");
  const std::size_t n = a.rows();
  Matrix<T> aug(n, n + b.cols());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = a(i, j);
    for (std::size_t j = 0; j < b.cols(); ++j) aug(i, n + j) = b(i, j);
  }
  const auto ech = rref(aug);
  if (ech.pivots.size() < n || ech.pivots[n - 1] != n - 1) throw InternalError("solve: singular matrix");
  Matrix<T> x(n, b.cols());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) x(i, j) = ech.reduced(i, n + j);
  return x;
}

template <class T>
Matrix<T> inverse(const Matrix<T>& a) {
  return solve(a, Matrix<T>::identity(a.rows()));
}

/// Determinant by Gaussian elimination (exact for Rational).
template <class T>
T determinant(Matrix<T> a) {
  if (a.rows() != a.cols()) throw InvalidInput("determinant: matrix is not square");
  const std::size_t n = a.rows();
  T det(1);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    if constexpr (is_exact_v<T>) {
      while (p < n && a(p, c) == T(0)) ++p;
      if (p == n) return T(0);
    } else {
      for (std::size_t i = c + 1; i < n; ++i)
        if (std::fabs(a(i, c)) > std::fabs(a(p, c))) p = i;
      if (a(p, c) == 0.0) return 0.0;
    }
    if (p != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(p, j), a(c, j));
      det = -det;
    }
    det *= a(c, c);
    for (std::size_t i = c + 1; i < n; ++i) {
      if (a(i, c) == T(0)) continue;
      const T f = a(i, c) / a(c, c);
      for (std::size_t j = c; j < n; ++j) a(i, j) -= f * a(c, j);
    }
  }
  return det;
}

// ---------------------------------------------------------------------------
// Floating-point helpers backed by Eigen

inline Eigen::MatrixXd to_eigen(const Matrix<double>& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  return e;
}

inline Matrix<double> from_eigen(const Eigen::MatrixXd& e) {
  Matrix<double> m(e.rows(), e.cols());
  for (Eigen::Index i = 0; i < e.rows(); ++i)
    for (Eigen::Index j = 0; j < e.cols(); ++j) m(i, j) = e(i, j);
  return m;
}

/// Number of singular values above `rel_tol` times the largest one.
inline std::size_t numeric_rank(const Matrix<double>& a, double rel_tol = kRankTolerance) {
  if (a.rows() == 0 || a.cols() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_eigen(a));
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > rel_tol * s(0)) ++r;
  return r;
}

/// Orthonormal basis of the numerical null space (right singular vectors).
inline std::vector<Vector<double>> numeric_nullspace(const Matrix<double>& a, double rel_tol = kRankTolerance) {
  const std::size_t n = a.cols();
  if (a.rows() == 0) {
    std::vector<Vector<double>> all;
    for (std::size_t i = 0; i < n; ++i) all.push_back(unit_vector<double>(n, i));
    return all;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_eigen(a), Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double smax = s.size() ? s(0) : 0.0;
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (smax > 0.0 && s(i) > rel_tol * smax) ++r;
  std::vector<Vector<double>> basis;
  const auto& v = svd.matrixV();
  for (std::size_t j = r; j < n; ++j) {
    Vector<double> col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = v(i, j);
    basis.push_back(std::move(col));
  }
  return basis;
}

/// Least-squares coefficients c minimising |A c - b|.
inline Vector<double> least_squares(const Matrix<double>& a, const Vector<double>& b) {
  require_same_size(a.rows(), b.size(), "least_squares");
  if (a.cols() == 0) return {};
  Eigen::VectorXd rhs(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) rhs(i) = b[i];
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(to_eigen(a));
  cod.setThreshold(kRankTolerance);
  const Eigen::VectorXd c = cod.solve(rhs);
  return Vector<double>(c.data(), c.data() + c.size());
}

/// Moore-Penrose pseudo-inverse.
inline Matrix<double> pseudo_inverse(const Matrix<double>& a) {
  if (a.rows() == 0 || a.cols() == 0) return Matrix<double>(a.cols(), a.rows());
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(to_eigen(a));
  cod.setThreshold(kRankTolerance);
  return from_eigen(cod.pseudoInverse());
}

// ---------------------------------------------------------------------------
// Matrix exponential

/// Truncated exponential series sum_{j<=terms} A^j / j!. Exact when A^{terms+1} = 0.
template <class T>
Matrix<T> exp_series(const Matrix<T>& a, std::size_t terms) {
  const std::size_t n = a.rows();
  Matrix<T> sum = Matrix<T>::identity(n);
  Matrix<T> term = Matrix<T>::identity(n);
  for (std::size_t j = 1; j <= terms; ++j) {
    term = a * term;
    term *= T(1) / T(static_cast<long>(j));
    if (term.is_zero()) break;
    sum += term;
  }
  return sum;
}

/// Smallest k with A^k = 0, if it is at most n (exact arithmetic / exact zeros).
template <class T>
std::optional<std::size_t> nilpotency_index(const Matrix<T>& a) {
  const std::size_t n = a.rows();
  Matrix<T> p = Matrix<T>::identity(n);
  for (std::size_t k = 1; k <= n; ++k) {
    p = a * p;
    if (p.is_zero()) return k;
  }
  return std::nullopt;
}

/// Scaling-and-squaring Taylor exponential, accurate to roughly 1e-15 relative.
inline Matrix<double> expm(const Matrix<double>& a) {
  const std::size_t n = a.rows();
  double norm1 = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::fabs(a(i, j));
    norm1 = std::max(norm1, s);
  }
  int squarings = 0;
  if (norm1 > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm1 / 0.5)));
  Matrix<double> scaled = std::ldexp(1.0, -squarings) * a;
  Matrix<double> sum = Matrix<double>::identity(n);
  Matrix<double> term = Matrix<double>::identity(n);
  for (int j = 1; j <= 30; ++j) {
    term = scaled * term;
    term *= 1.0 / j;
    sum += term;
    if (term.max_abs() < 1e-18 * sum.max_abs()) break;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

// ---------------------------------------------------------------------------
// Exact subspaces

/// A subspace of Q^n stored by its reduced row echelon basis, so that two
/// subspaces are equal exactly when their stored bases are equal.
class Subspace {
 public:
  explicit Subspace(std::size_t ambient) : ambient_(ambient), basis_(0, ambient) {}

  static Subspace span(std::size_t ambient, const std::vector<Vector<Rational>>& vectors) {
    Subspace s(ambient);
    if (vectors.empty()) return s;
    Matrix<Rational> rows(vectors.size(), ambient);
    for (std::size_t i = 0; i < vectors.size(); ++i) {
      require_same_size(vectors[i].size(), ambient, "Subspace::span");
      for (std::size_t j = 0; j < ambient; ++j) rows(i, j) = vectors[i][j];
    }
    auto ech = rref(rows);
    const std::size_t r = ech.pivots.size();
    s.basis_ = Matrix<Rational>(r, ambient);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < ambient; ++j) s.basis_(i, j) = ech.reduced(i, j);
    s.pivots_ = std::move(ech.pivots);
    return s;
  }

  static Subspace whole(std::size_t ambient) {
    std::vector<Vector<Rational>> e;
    for (std::size_t i = 0; i < ambient; ++i) e.push_back(unit_vector<Rational>(ambient, i));
    return span(ambient, e);
  }

  std::size_t ambient_dim() const noexcept { return ambient_; }
  std::size_t dim() const noexcept { return basis_.rows(); }
  bool is_zero() const noexcept { return dim() == 0; }

  /// Canonical basis vectors (rows of the reduced echelon form).
  std::vector<Vector<Rational>> basis() const {
    std::vector<Vector<Rational>> out;
    for (std::size_t i = 0; i < basis_.rows(); ++i) out.push_back(basis_.row(i));
    return out;
  }
  const Matrix<Rational>& echelon() const noexcept { return basis_; }

  bool contains(const Vector<Rational>& v) const {
    require_same_size(v.size(), ambient_, "Subspace::contains");
    Vector<Rational> r(v);
    for (std::size_t i = 0; i < pivots_.size(); ++i) {
      const Rational c = r[pivots_[i]];
      if (c == 0) continue;
      for (std::size_t j = 0; j < ambient_; ++j) r[j] -= c * basis_(i, j);
    }
    return is_zero(r);
  }

  bool contains(const Subspace& other) const {
    for (const auto& v : other.basis())
      if (!contains(v)) return false;
    return true;
  }

  Subspace operator+(const Subspace& other) const {
    auto vs = basis();
    for (auto& v : other.basis()) vs.push_back(v);
    return span(ambient_, vs);
  }

  friend bool operator==(const Subspace& a, const Subspace& b) {
    return a.ambient_ == b.ambient_ && a.basis_ == b.basis_;
  }

 private:
  static bool is_zero(const Vector<Rational>& v) { return orbitflow::is_zero(v); }

  std::size_t ambient_;
  Matrix<Rational> basis_;
  std::vector<std::size_t> pivots_;
};

}  // namespace orbitflow
