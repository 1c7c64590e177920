#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "orbitflow/algebra.hpp"
#include "orbitflow/error.hpp"
#include "orbitflow/linalg.hpp"
#include "orbitflow/metric.hpp"
#include "orbitflow/polynomial.hpp"
#include "orbitflow/splitting.hpp"

namespace orbitflow {

/// exp(M) for M = ad or ad^t of some element. The series is summed exactly
/// when M is nilpotent; otherwise scaling and squaring is used (double only).
template <class T>
Matrix<T> operator_exp(const Matrix<T>& m, bool known_nilpotent) {
  if constexpr (is_exact_v<T>) {
    const auto index = nilpotency_index(m);
    if (!index) throw InvalidInput("exact exponential requires a nilpotent operator");
    return exp_series(m, *index - 1);
  } else {
    // For a nilpotent algebra M^dim = 0, so dim - 1 terms lose nothing.
    if (known_nilpotent) return exp_series(m, m.rows());
    return expm(m);
  }
}

/// Matrix of tau(exp X) = exp(-ad^t_X).
template <class T>
Matrix<T> tau_exp(const LieAlgebra& a, const BilinearForm& g, const Vector<T>& x) {
  return operator_exp(-ad_transpose_matrix(a, g, x), a.is_nilpotent());
}

/// Matrix of Ad(exp X) = exp(ad_X).
template <class T>
Matrix<T> adjoint_exp(const LieAlgebra& a, const Vector<T>& x) {
  return operator_exp(a.ad(x), a.is_nilpotent());
}

/// |ad^t_{grad f(U)} U|_inf, which vanishes identically for tau-invariant f.
template <class T>
T tau_invariance_residual(const LieAlgebra& a, const BilinearForm& g, const ScalarField& f, const Vector<T>& u) {
  return max_abs(ad_transpose(a, g, gradient(g, f, u), u));
}

/// |f(tau(exp tY) U) - f(U)|: the finite form of the same test.
inline double tau_invariance_defect(const LieAlgebra& a, const BilinearForm& g, const ScalarField& f,
                                    const Vector<double>& u, const Vector<double>& y, double t) {
  const auto moved = tau_exp(a, g, t * y) * u;
  return std::fabs(f(moved) - f(u));
}

/// Tangent data of an orbit at a point.
template <class T>
struct OrbitPoint {
  Vector<T> base;
  Matrix<T> tangent_basis;  // columns span T_U(orbit)
  std::size_t dim = 0;
};

template <class T>
std::size_t tangent_rank(const Matrix<T>& m) {
  if constexpr (is_exact_v<T>)
    return rank(m);
  else
    return numeric_rank(m, kRankTolerance);
}

/// Tangent space of the tau-orbit through U, spanned by -ad^t_Y U. In split
/// mode Y ranges over the acting factor and the vectors are projected onto
/// the phase space.
template <class T>
OrbitPoint<T> orbit_tangent(const LieAlgebra& a, const BilinearForm& g, const Vector<T>& u,
                            const SplitSetting* split = nullptr) {
  require_same_size(u.size(), a.dim(), "orbit_tangent");
  std::vector<Vector<T>> cols;
  if (split == nullptr) {
    for (std::size_t i = 0; i < a.dim(); ++i) cols.push_back(-ad_transpose(a, g, unit_vector<T>(a.dim(), i), u));
  } else {
    if (!split->in_phase_space(u)) throw DomainError("orbit_tangent: point is not in the phase space");
    for (const auto& b : split->acting_algebra().basis())
      cols.push_back(split->project_phase(-ad_transpose(a, g, convert<T>(b), u)));
  }
  OrbitPoint<T> p{u, Matrix<T>::from_columns(a.dim(), cols), 0};
  p.dim = tangent_rank(p.tangent_basis);
  return p;
}

/// Basis of the isotropy algebra {Y : ad^t_Y U = 0}.
template <class T>
std::vector<Vector<T>> isotropy_algebra(const LieAlgebra& a, const BilinearForm& g, const Vector<T>& u) {
  std::vector<Vector<T>> cols;
  for (std::size_t i = 0; i < a.dim(); ++i) cols.push_back(ad_transpose(a, g, unit_vector<T>(a.dim(), i), u));
  const auto k = Matrix<T>::from_columns(a.dim(), cols);
  if constexpr (is_exact_v<T>)
    return nullspace_exact(k);
  else
    return numeric_nullspace(k);
}

/// omega_U(Y~, Z~) = <U, [Y, Z]>.
template <class T>
T symplectic_form(const LieAlgebra& a, const BilinearForm& g, const Vector<T>& u, const Vector<T>& y,
                  const Vector<T>& z) {
  return g.pair(u, a.bracket(y, z));
}

/// {f, h}(U) = <U, [grad f, grad h]>; in split mode only the acting
/// components of the gradients enter.
template <class T>
T poisson_bracket(const LieAlgebra& a, const BilinearForm& g, const ScalarField& f, const ScalarField& h,
                  const Vector<T>& u, const SplitSetting* split = nullptr) {
  auto gf = gradient(g, f, u);
  auto gh = gradient(g, h, u);
  if (split != nullptr) {
    gf = split->acting_component(gf);
    gh = split->acting_component(gh);
  }
  return symplectic_form(a, g, u, gf, gh);
}

}  // namespace orbitflow
