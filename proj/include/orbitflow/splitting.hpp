#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "orbitflow/algebra.hpp"
#include "orbitflow/error.hpp"
#include "orbitflow/linalg.hpp"
#include "orbitflow/metric.hpp"

namespace orbitflow {

class SplitError : public StructuralError {
 public:
  enum class Kind { not_independent, not_subalgebra, not_direct_sum, degenerate_pairing };
  SplitError(Kind kind, const std::string& what) : StructuralError(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// Which factor of g = g+ (+) g- acts. With `minus` the group G- acts on
/// g+perp; with `plus`, G+ acts on g-perp.
enum class ActingFactor { minus, plus };

inline const char* to_string(ActingFactor f) { return f == ActingFactor::minus ? "minus" : "plus"; }

/// True when P v == v (exactly for Rational, to 1e-9 relative for double).
template <class T>
bool in_range_of(const Matrix<T>& projector, const Vector<T>& v) {
  const auto r = projector * v - v;
  if constexpr (is_exact_v<T>)
    return is_zero(r);
  else
    return norm(r) <= kRankTolerance * std::max(norm(v), 1e-300);
}

/// A double Lie algebra decomposition g = g+ (+) g- together with the
/// induced decomposition g = g+perp (+) g-perp and the projectors for both.
class SplitDecomposition {
 public:
  SplitDecomposition(const LieAlgebra& a, const BilinearForm& g, std::vector<Vector<Rational>> plus_basis,
                     std::vector<Vector<Rational>> minus_basis)
      : plus_input_(std::move(plus_basis)),
        minus_input_(std::move(minus_basis)),
        plus_(a.dim()),
        minus_(a.dim()),
        plus_perp_(a.dim()),
        minus_perp_(a.dim()) {
    const std::size_t n = a.dim();
    require_same_size(g.dim(), n, "build_split");
    plus_ = Subspace::span(n, plus_input_);
    minus_ = Subspace::span(n, minus_input_);
    if (plus_.dim() != plus_input_.size() || minus_.dim() != minus_input_.size())
      throw SplitError(SplitError::Kind::not_independent, "split bases are not linearly independent");
    check_subalgebra(a, plus_input_, "g+");
    check_subalgebra(a, minus_input_, "g-");
    if (plus_.dim() + minus_.dim() != n || (plus_ + minus_).dim() != n)
      throw SplitError(SplitError::Kind::not_direct_sum, "g+ and g- do not form a direct sum: dimensions " +
                                                             std::to_string(plus_.dim()) + " + " +
                                                             std::to_string(minus_.dim()) + " vs " + std::to_string(n));
    plus_perp_ = perp(g, plus_);
    minus_perp_ = perp(g, minus_);
    if ((plus_perp_ + minus_perp_).dim() != n)
      throw SplitError(SplitError::Kind::degenerate_pairing, "g+perp and g-perp do not span g");
    plus_perp_projector_ = projector(plus_perp_, minus_perp_);
    plus_projector_ = projector(plus_, minus_);
    plus_perp_projector_d_ = plus_perp_projector_.cast<double>();
    plus_projector_d_ = plus_projector_.cast<double>();
  }

  std::size_t dim() const noexcept { return plus_.ambient_dim(); }

  /// Bases exactly as supplied (used for serialisation).
  const std::vector<Vector<Rational>>& plus_input() const noexcept { return plus_input_; }
  const std::vector<Vector<Rational>>& minus_input() const noexcept { return minus_input_; }

  const Subspace& plus() const noexcept { return plus_; }
  const Subspace& minus() const noexcept { return minus_; }
  const Subspace& plus_perp() const noexcept { return plus_perp_; }
  const Subspace& minus_perp() const noexcept { return minus_perp_; }

  /// Projection onto g+perp along g-perp.
  template <class T>
  const Matrix<T>& plus_perp_projector() const {
    if constexpr (is_exact_v<T>)
      return plus_perp_projector_;
    else
      return plus_perp_projector_d_;
  }
  /// Projection onto g+ along g-.
  template <class T>
  const Matrix<T>& plus_projector() const {
    if constexpr (is_exact_v<T>)
      return plus_projector_;
    else
      return plus_projector_d_;
  }

 private:
  static void check_subalgebra(const LieAlgebra& a, const std::vector<Vector<Rational>>& basis, const char* label) {
    const auto space = Subspace::span(a.dim(), basis);
    for (std::size_t i = 0; i < basis.size(); ++i)
      for (std::size_t j = i + 1; j < basis.size(); ++j)
        if (!space.contains(a.bracket(basis[i], basis[j])))
          throw SplitError(SplitError::Kind::not_subalgebra,
                           std::string(label) + " is not a subalgebra: bracket of basis vectors " +
                               std::to_string(i + 1) + " and " + std::to_string(j + 1) + " leaves it");
  }

  static Subspace perp(const BilinearForm& g, const Subspace& s) {
    const std::size_t n = s.ambient_dim();
    if (s.dim() == 0) return Subspace::whole(n);
    const Matrix<Rational> pairing = s.echelon() * g.gram();
    return Subspace::span(n, nullspace_exact(pairing));
  }

  /// Projector onto `range` along `kernel`, assuming range (+) kernel = g.
  static Matrix<Rational> projector(const Subspace& range, const Subspace& kernel) {
    const std::size_t n = range.ambient_dim();
    auto cols = range.basis();
    for (auto& v : kernel.basis()) cols.push_back(v);
    const auto c = Matrix<Rational>::from_columns(n, cols);
    Matrix<Rational> keep(n, n);
    for (std::size_t i = 0; i < range.dim(); ++i) keep(i, i) = 1;
    return c * keep * inverse(c);
  }

  std::vector<Vector<Rational>> plus_input_;
  std::vector<Vector<Rational>> minus_input_;
  Subspace plus_;
  Subspace minus_;
  Subspace plus_perp_;
  Subspace minus_perp_;
  Matrix<Rational> plus_perp_projector_;
  Matrix<Rational> plus_projector_;
  Matrix<double> plus_perp_projector_d_;
  Matrix<double> plus_projector_d_;
};

inline SplitDecomposition build_split(const LieAlgebra& a, const BilinearForm& g,
                                      std::vector<Vector<Rational>> plus_basis,
                                      std::vector<Vector<Rational>> minus_basis) {
  return SplitDecomposition(a, g, std::move(plus_basis), std::move(minus_basis));
}

/// Projection onto g+perp along g-perp.
template <class T>
Vector<T> project_plus_perp(const SplitDecomposition& s, const Vector<T>& v) {
  return s.plus_perp_projector<T>() * v;
}

/// Components of grad f(U) along g = g+ (+) g-.
template <class T>
struct GradientSplit {
  Vector<T> plus;
  Vector<T> minus;
};

template <class T>
GradientSplit<T> split_vector(const SplitDecomposition& s, const Vector<T>& v) {
  auto p = s.plus_projector<T>() * v;
  auto m = v - p;
  return {std::move(p), std::move(m)};
}

template <class T>
GradientSplit<T> split_gradient(const SplitDecomposition& s, const BilinearForm& g, const ScalarField& f,
                                const Vector<T>& u) {
  return split_vector(s, gradient(g, f, u));
}

/// A split together with the choice of acting factor: the phase space is the
/// perp of the complementary factor.
class SplitSetting {
 public:
  SplitSetting(SplitDecomposition split, ActingFactor acting) : split_(std::move(split)), acting_(acting) {}

  const SplitDecomposition& split() const noexcept { return split_; }
  ActingFactor acting() const noexcept { return acting_; }

  /// Projection onto the phase space along the other perp.
  template <class T>
  Matrix<T> phase_projector() const {
    const auto& p = split_.plus_perp_projector<T>();
    if (acting_ == ActingFactor::minus) return p;
    return Matrix<T>::identity(p.rows()) - p;
  }

  template <class T>
  Vector<T> project_phase(const Vector<T>& v) const {
    return phase_projector<T>() * v;
  }

  const Subspace& phase_space() const noexcept {
    return acting_ == ActingFactor::minus ? split_.plus_perp() : split_.minus_perp();
  }
  const Subspace& acting_algebra() const noexcept {
    return acting_ == ActingFactor::minus ? split_.minus() : split_.plus();
  }
  const Subspace& complement_algebra() const noexcept {
    return acting_ == ActingFactor::minus ? split_.plus() : split_.minus();
  }

  template <class T>
  bool in_phase_space(const Vector<T>& v) const {
    return in_range_of(phase_projector<T>(), v);
  }

  template <class T>
  bool in_acting_algebra(const Vector<T>& v) const {
    const auto& p = split_.plus_projector<T>();
    if (acting_ == ActingFactor::plus) return in_range_of(p, v);
    return in_range_of(Matrix<T>::identity(p.rows()) - p, v);
  }

  /// Component of v in the acting factor (along the complementary one).
  template <class T>
  Vector<T> acting_component(const Vector<T>& v) const {
    auto parts = split_vector(split_, v);
    return acting_ == ActingFactor::minus ? parts.minus : parts.plus;
  }
  template <class T>
  Vector<T> complement_component(const Vector<T>& v) const {
    auto parts = split_vector(split_, v);
    return acting_ == ActingFactor::minus ? parts.plus : parts.minus;
  }

 private:
  SplitDecomposition split_;
  ActingFactor acting_;
};

/// Infinitesimal generator of the induced action: pi_phase(-ad^t_Y X) for Y
/// in the acting factor and X in the phase space.
template <class T>
Vector<T> induced_action_field(const SplitSetting& s, const LieAlgebra& a, const BilinearForm& g, const Vector<T>& y,
                               const Vector<T>& x) {
  if (!s.in_acting_algebra(y)) throw DomainError("induced action: generator is not in the acting subalgebra");
  if (!s.in_phase_space(x)) throw DomainError("induced action: point is not in the phase space");
  return s.project_phase(-ad_transpose(a, g, y, x));
}

}  // namespace orbitflow
