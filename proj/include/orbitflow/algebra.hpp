#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "orbitflow/error.hpp"
#include "orbitflow/linalg.hpp"
#include "orbitflow/rational.hpp"

namespace orbitflow {

/// One structure constant: [e_i, e_j] contains `value` * e_k (0-based indices).
struct StructureEntry {
  std::size_t i = 0;
  std::size_t j = 0;
  std::size_t k = 0;
  Rational value;
};

/// A finite-dimensional real Lie algebra given by exact structure constants
/// c[i][j][k] with [e_i, e_j] = sum_k c[i][j][k] e_k.
///
/// Construction enforces antisymmetry (entries given for [e_i, e_j] are
/// mirrored onto [e_j, e_i]); the Jacobi identity is *not* enforced so that
/// user-supplied tables can be diagnosed with jacobi_residual().
class LieAlgebra {
 public:
  LieAlgebra(std::string name, std::size_t dim, const std::vector<StructureEntry>& entries)
      : name_(std::move(name)), dim_(dim) {
    if (dim_ == 0) throw InvalidInput("Lie algebra dimension must be positive");
    table_.assign(dim_ * dim_ * dim_, Rational(0));
    std::vector<bool> set(table_.size(), false);
    for (const auto& e : entries) {
      if (e.i >= dim_ || e.j >= dim_ || e.k >= dim_) throw InvalidInput("structure constant index out of range");
      if (e.i == e.j) {
        if (e.value != 0)
          throw StructuralError("[e" + std::to_string(e.i + 1) + ",e" + std::to_string(e.i + 1) + "] must vanish");
        continue;
      }
      assign(e.i, e.j, e.k, e.value, set);
      assign(e.j, e.i, e.k, Rational(-e.value), set);
    }
    table_d_.reserve(table_.size());
    for (const auto& q : table_) table_d_.push_back(to_double(q));
    compute_series();
  }

  const std::string& name() const noexcept { return name_; }
  std::size_t dim() const noexcept { return dim_; }

  const Rational& constant(std::size_t i, std::size_t j, std::size_t k) const { return table_[index(i, j, k)]; }

  /// Nonzero constants with i < j, ordered by (i, j, k).
  std::vector<StructureEntry> entries() const {
    std::vector<StructureEntry> out;
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = i + 1; j < dim_; ++j)
        for (std::size_t k = 0; k < dim_; ++k)
          if (const auto& c = constant(i, j, k); c != 0) out.push_back({i, j, k, c});
    return out;
  }

  /// [X, Y]_k = sum_ij x_i y_j c[i][j][k].
  template <class T>
  Vector<T> bracket(const Vector<T>& x, const Vector<T>& y) const {
    require_same_size(x.size(), dim_, "bracket");
    require_same_size(y.size(), dim_, "bracket");
    Vector<T> r(dim_, T(0));
    const auto& c = table<T>();
    for (std::size_t i = 0; i < dim_; ++i) {
      if (x[i] == T(0)) continue;
      for (std::size_t j = 0; j < dim_; ++j) {
        if (y[j] == T(0)) continue;
        const T xy = x[i] * y[j];
        const std::size_t base = (i * dim_ + j) * dim_;
        for (std::size_t k = 0; k < dim_; ++k)
          if (c[base + k] != T(0)) r[k] += xy * c[base + k];
      }
    }
    return r;
  }

  /// Matrix of ad_X, so that ad(X) * Y == bracket(X, Y).
  template <class T>
  Matrix<T> ad(const Vector<T>& x) const {
    require_same_size(x.size(), dim_, "ad_matrix");
    Matrix<T> m(dim_, dim_);
    const auto& c = table<T>();
    for (std::size_t i = 0; i < dim_; ++i) {
      if (x[i] == T(0)) continue;
      for (std::size_t j = 0; j < dim_; ++j) {
        const std::size_t base = (i * dim_ + j) * dim_;
        for (std::size_t k = 0; k < dim_; ++k)
          if (c[base + k] != T(0)) m(k, j) += x[i] * c[base + k];
      }
    }
    return m;
  }

  /// Span of all brackets [a, b] with a in `a`, b in `b`.
  Subspace bracket(const Subspace& a, const Subspace& b) const {
    std::vector<Vector<Rational>> vs;
    for (const auto& x : a.basis())
      for (const auto& y : b.basis()) vs.push_back(bracket(x, y));
    return Subspace::span(dim_, vs);
  }

  bool is_subalgebra(const Subspace& s) const { return s.contains(bracket(s, s)); }

  /// g, [g,g], [g,[g,g]], ... up to the first repeated term.
  const std::vector<Subspace>& lower_central_series() const noexcept { return lower_; }
  /// g, [g,g], [g',g'], ... up to the first repeated term.
  const std::vector<Subspace>& derived_series() const noexcept { return derived_; }

  bool is_nilpotent() const noexcept { return lower_.back().is_zero(); }
  bool is_solvable() const noexcept { return derived_.back().is_zero(); }
  /// k for a k-step nilpotent algebra (0 for the zero algebra of brackets, i.e. abelian is 1).
  std::optional<std::size_t> nilpotency_step() const {
    if (!is_nilpotent()) return std::nullopt;
    return lower_.size() - 1;
  }

 private:
  std::size_t index(std::size_t i, std::size_t j, std::size_t k) const {
    if (i >= dim_ || j >= dim_ || k >= dim_) throw InvalidInput("structure constant index out of range");
    return (i * dim_ + j) * dim_ + k;
  }

  void assign(std::size_t i, std::size_t j, std::size_t k, const Rational& v, std::vector<bool>& set) {
    const auto idx = index(i, j, k);
    if (set[idx] && table_[idx] != v)
      throw StructuralError("conflicting structure constants for [e" + std::to_string(i + 1) + ",e" +
                            std::to_string(j + 1) + "] along e" + std::to_string(k + 1));
    table_[idx] = v;
    set[idx] = true;
  }

  template <class T>
  const std::vector<T>& table() const {
    if constexpr (is_exact_v<T>)
      return table_;
    else
      return table_d_;
  }

  void compute_series() {
    const Subspace g = Subspace::whole(dim_);
    lower_ = {g};
    derived_ = {g};
    for (std::size_t step = 0; step <= dim_; ++step) {
      Subspace next = bracket(g, lower_.back());
      if (next == lower_.back()) break;
      lower_.push_back(std::move(next));
    }
    for (std::size_t step = 0; step <= dim_; ++step) {
      Subspace next = bracket(derived_.back(), derived_.back());
      if (next == derived_.back()) break;
      derived_.push_back(std::move(next));
    }
  }

  std::string name_;
  std::size_t dim_;
  std::vector<Rational> table_;
  std::vector<double> table_d_;
  std::vector<Subspace> lower_;
  std::vector<Subspace> derived_;
};

/// Largest |c[i][j][k] + c[j][i][k]|; always 0 for a constructed LieAlgebra.
inline Rational antisymmetry_residual(const LieAlgebra& a) {
  Rational worst(0);
  const auto n = a.dim();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        worst = std::max(worst, abs_value(Rational(a.constant(i, j, k) + a.constant(j, i, k))));
  return worst;
}

struct JacobiDefect {
  std::array<std::size_t, 3> triple{};  // 0-based (i, j, l)
  Rational magnitude;
};

/// Largest coefficient of [[e_i,e_j],e_l] + [[e_j,e_l],e_i] + [[e_l,e_i],e_j]
/// over all basis triples, together with the first triple attaining it.
inline JacobiDefect jacobi_defect(const LieAlgebra& a) {
  const auto n = a.dim();
  JacobiDefect worst;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t l = j + 1; l < n; ++l) {
        const auto ei = unit_vector<Rational>(n, i);
        const auto ej = unit_vector<Rational>(n, j);
        const auto el = unit_vector<Rational>(n, l);
        const auto sum =
            a.bracket(a.bracket(ei, ej), el) + a.bracket(a.bracket(ej, el), ei) + a.bracket(a.bracket(el, ei), ej);
        const Rational m = max_abs(sum);
        if (m > worst.magnitude) worst = {{i, j, l}, m};
      }
  return worst;
}

inline Rational jacobi_residual(const LieAlgebra& a) { return jacobi_defect(a).magnitude; }

}  // namespace orbitflow
