#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "orbitflow/algebra.hpp"
#include "orbitflow/error.hpp"
#include "orbitflow/linalg.hpp"
#include "orbitflow/polynomial.hpp"
#include "orbitflow/rational.hpp"

namespace orbitflow {

/// One Gram entry <e_i, e_j> = value (0-based); its mirror is implied.
struct GramEntry {
  std::size_t i = 0;
  std::size_t j = 0;
  Rational value;
};

/// Non-degenerate symmetric bilinear form on g, not necessarily positive or
/// ad-invariant. The inverse Gram matrix is computed once at construction.
class BilinearForm {
 public:
  BilinearForm(std::string name, Matrix<Rational> gram) : name_(std::move(name)), gram_(std::move(gram)) {
    if (gram_.rows() != gram_.cols() || gram_.rows() == 0)
      throw InvalidInput("Gram matrix must be square and non-empty");
    if (!(gram_ == gram_.transpose())) throw StructuralError("Gram matrix is not symmetric");
    if (determinant(gram_) == 0) throw StructuralError("bilinear form '" + name_ + "' is degenerate");
    inverse_ = inverse(gram_);
    gram_d_ = gram_.cast<double>();
    inverse_d_ = inverse_.cast<double>();
  }

  BilinearForm(std::string name, std::size_t dim, const std::vector<GramEntry>& entries)
      : BilinearForm(std::move(name), assemble(dim, entries)) {}

  static BilinearForm orthonormal(std::size_t dim, std::string name = "orthonormal") {
    return BilinearForm(std::move(name), Matrix<Rational>::identity(dim));
  }

  const std::string& name() const noexcept { return name_; }
  std::size_t dim() const noexcept { return gram_.rows(); }
  const Matrix<Rational>& gram() const noexcept { return gram_; }

  template <class T>
  const Matrix<T>& gram_as() const {
    if constexpr (is_exact_v<T>)
      return gram_;
    else
      return gram_d_;
  }
  template <class T>
  const Matrix<T>& inverse_as() const {
    if constexpr (is_exact_v<T>)
      return inverse_;
    else
      return inverse_d_;
  }

  /// <X, Y> = X^T G Y.
  template <class T>
  T pair(const Vector<T>& x, const Vector<T>& y) const {
    require_same_size(x.size(), dim(), "pair");
    return dot(x, gram_as<T>() * y);
  }

  /// The functional Y -> <X, Y>.
  template <class T>
  Covector<T> flat(const Vector<T>& x) const {
    require_same_size(x.size(), dim(), "flat");
    return {gram_as<T>() * x};
  }

  /// The unique Z with <Z, Y> = phi(Y) for all Y.
  template <class T>
  Vector<T> sharp(const Covector<T>& phi) const {
    require_same_size(phi.size(), dim(), "sharp");
    return inverse_as<T>() * phi.coords;
  }

  /// Nonzero entries with i <= j, in row order.
  std::vector<GramEntry> entries() const {
    std::vector<GramEntry> out;
    for (std::size_t i = 0; i < dim(); ++i)
      for (std::size_t j = i; j < dim(); ++j)
        if (gram_(i, j) != 0) out.push_back({i, j, gram_(i, j)});
    return out;
  }

 private:
  static Matrix<Rational> assemble(std::size_t dim, const std::vector<GramEntry>& entries) {
    Matrix<Rational> g(dim, dim);
    Matrix<int> set(dim, dim);
    for (const auto& e : entries) {
      if (e.i >= dim || e.j >= dim) throw InvalidInput("Gram entry index out of range");
      for (auto [a, b] : {std::pair{e.i, e.j}, std::pair{e.j, e.i}}) {
        if (set(a, b) && g(a, b) != e.value)
          throw StructuralError("conflicting Gram entries for <e" + std::to_string(a + 1) + ",e" +
                                std::to_string(b + 1) + ">");
        g(a, b) = e.value;
        set(a, b) = 1;
      }
    }
    return g;
  }

  std::string name_;
  Matrix<Rational> gram_;
  Matrix<Rational> inverse_;
  Matrix<double> gram_d_;
  Matrix<double> inverse_d_;
};

/// Matrix of ad^t_X, the G-transpose of ad_X: <ad^t_X Y, Z> = <Y, [X, Z]>.
/// Solves G T = ad_X^T G.
template <class T>
Matrix<T> ad_transpose_matrix(const LieAlgebra& a, const BilinearForm& g, const Vector<T>& x) {
  require_same_size(a.dim(), g.dim(), "ad_transpose_matrix");
  return g.inverse_as<T>() * (a.ad(x).transpose() * g.gram_as<T>());
}

/// ad^t_X applied to Y.
template <class T>
Vector<T> ad_transpose(const LieAlgebra& a, const BilinearForm& g, const Vector<T>& x, const Vector<T>& y) {
  return ad_transpose_matrix(a, g, x) * y;
}

/// The unique vector with <grad f(U), Y> = df_U(Y).
template <class T>
Vector<T> gradient(const BilinearForm& g, const ScalarField& f, const Vector<T>& u) {
  require_same_size(f.dim(), g.dim(), "gradient");
  return g.sharp(f.differential(u));
}

/// max |<[e_i,e_j],e_k> + <e_j,[e_i,e_k]>|; zero exactly for ad-invariant forms.
inline Rational ad_invariance_residual(const LieAlgebra& a, const BilinearForm& g) {
  require_same_size(a.dim(), g.dim(), "ad_invariance_residual");
  const std::size_t n = a.dim();
  Rational worst(0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto ad = a.ad(unit_vector<Rational>(n, i));
    // G ad + ad^T G collects every (j, k) pairing at once.
    const auto defect = g.gram() * ad + ad.transpose() * g.gram();
    worst = std::max(worst, defect.max_abs());
  }
  return worst;
}

}  // namespace orbitflow
