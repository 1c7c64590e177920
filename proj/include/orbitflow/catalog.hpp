#pragma once

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "orbitflow/algebra.hpp"
#include "orbitflow/error.hpp"
#include "orbitflow/hamiltonian.hpp"
#include "orbitflow/linalg.hpp"
#include "orbitflow/metric.hpp"
#include "orbitflow/polynomial.hpp"
#include "orbitflow/rational.hpp"
#include "orbitflow/splitting.hpp"

namespace orbitflow {

/// A named Hamiltonian flow inside a catalog entry. The sign is pinned so the
/// flow reproduces the entry's closed-form solution.
struct CatalogSystem {
  std::string id;
  std::string metric;
  std::string hamiltonian;
  Vector<Rational> initial;
  int sign = 1;
  double horizon = 1.0;
  Boundedness level_set = Boundedness::inconclusive;  // expected probe verdict
};

class CatalogEntry {
 public:
  CatalogEntry(std::string id, LieAlgebra algebra, std::vector<BilinearForm> metrics,
               std::vector<ScalarField> invariants, std::vector<Vector<Rational>> plus,
               std::vector<Vector<Rational>> minus, ActingFactor acting, std::vector<CatalogSystem> systems,
               std::size_t oscillator_n = 0)
      : id_(std::move(id)),
        algebra_(std::move(algebra)),
        metrics_(std::move(metrics)),
        invariants_(std::move(invariants)),
        plus_(std::move(plus)),
        minus_(std::move(minus)),
        acting_(acting),
        systems_(std::move(systems)),
        oscillator_n_(oscillator_n) {}

  const std::string& id() const noexcept { return id_; }
  /// Label including the family parameter, e.g. "oscillator(2)".
  std::string label() const { return oscillator_n_ ? id_ + "(" + std::to_string(oscillator_n_) + ")" : id_; }
  std::size_t oscillator_n() const noexcept { return oscillator_n_; }
  const LieAlgebra& algebra() const noexcept { return algebra_; }
  const std::vector<BilinearForm>& metrics() const noexcept { return metrics_; }
  const std::vector<ScalarField>& invariants() const noexcept { return invariants_; }
  const std::vector<CatalogSystem>& systems() const noexcept { return systems_; }
  const std::vector<Vector<Rational>>& plus_basis() const noexcept { return plus_; }
  const std::vector<Vector<Rational>>& minus_basis() const noexcept { return minus_; }
  ActingFactor acting() const noexcept { return acting_; }
  bool has_lax_pair() const noexcept { return id_ == "example_iii" || id_ == "oscillator"; }

  const BilinearForm& metric(const std::string& name) const {
    for (const auto& g : metrics_)
      if (g.name() == name) return g;
    throw InvalidInput("entry " + label() + " has no metric '" + name + "'");
  }
  const ScalarField& invariant(const std::string& name) const {
    for (const auto& f : invariants_)
      if (f.name() == name) return f;
    throw InvalidInput("entry " + label() + " has no invariant '" + name + "'");
  }
  bool is_invariant(const std::string& name) const {
    return std::any_of(invariants_.begin(), invariants_.end(), [&](const auto& f) { return f.name() == name; });
  }
  const CatalogSystem& system_spec(const std::string& id) const {
    for (const auto& s : systems_)
      if (s.id == id) return s;
    throw InvalidInput("entry " + label() + " has no system '" + id + "'");
  }

  SplitSetting split(const std::string& metric_name) const {
    return SplitSetting(build_split(algebra_, metric(metric_name), plus_, minus_), acting_);
  }

  HamiltonianSystem system(const std::string& id, std::optional<Vector<double>> initial = std::nullopt) const {
    const auto& spec = system_spec(id);
    return HamiltonianSystem(label() + "/" + id, algebra_, metric(spec.metric), split(spec.metric),
                             invariant(spec.hamiltonian), initial ? *initial : convert<double>(spec.initial), spec.sign,
                             is_invariant(spec.hamiltonian));
  }

 private:
  std::string id_;
  LieAlgebra algebra_;
  std::vector<BilinearForm> metrics_;
  std::vector<ScalarField> invariants_;
  std::vector<Vector<Rational>> plus_;
  std::vector<Vector<Rational>> minus_;
  ActingFactor acting_;
  std::vector<CatalogSystem> systems_;
  std::size_t oscillator_n_ = 0;
};

namespace detail {

inline Vector<Rational> rationals(std::initializer_list<Rational> xs) { return Vector<Rational>(xs); }

inline std::vector<Vector<Rational>> basis_vectors(std::size_t dim, std::initializer_list<std::size_t> idx) {
  std::vector<Vector<Rational>> out;
  for (auto i : idx) out.push_back(unit_vector<Rational>(dim, i));
  return out;
}

/// Polynomial from (coefficient, exponent) pairs.
inline Polynomial poly(std::size_t vars, std::initializer_list<std::pair<Rational, std::vector<unsigned>>> terms) {
  Polynomial p(vars);
  for (const auto& [c, e] : terms) p.add_term(c, e);
  return p;
}

inline LieAlgebra oscillator_algebra(std::size_t n) {
  const std::size_t dim = 2 * n + 2, top = dim - 1;
  std::vector<StructureEntry> s;
  for (std::size_t i = 1; i <= n; ++i) {
    const std::size_t xi = 2 * i - 1, yi = 2 * i;
    s.push_back({top, xi, yi, Rational(1)});
    s.push_back({top, yi, xi, Rational(-1)});
    s.push_back({xi, yi, 0, Rational(1)});
  }
  return LieAlgebra(n == 1 ? "oscillator" : "oscillator(" + std::to_string(n) + ")", dim, s);
}

/// sum (x_i^2 + y_i^2) + 2 x_0 x_{n+1}, the quadratic form of the ad-invariant metric.
inline Matrix<Rational> oscillator_gram(std::size_t dim) {
  Matrix<Rational> g(dim, dim);
  for (std::size_t i = 1; i + 1 < dim; ++i) g(i, i) = 1;
  g(0, dim - 1) = 1;
  g(dim - 1, 0) = 1;
  return g;
}

inline Polynomial oscillator_hamiltonian(std::size_t dim) {
  Polynomial p(dim);
  for (std::size_t i = 1; i + 1 < dim; ++i) {
    std::vector<unsigned> e(dim, 0);
    e[i] = 2;
    p.add_term(Rational(1, 2), e);
  }
  std::vector<unsigned> e(dim, 0);
  e[0] = 1;
  e[dim - 1] = 1;
  p.add_term(Rational(1), e);
  return p;
}

}  // namespace detail

inline CatalogEntry example_i() {
  using detail::poly;
  LieAlgebra a("example_i", 5,
               {{0, 1, 2, Rational(1)},
                {0, 2, 3, Rational(1)},
                {4, 0, 1, Rational(1)},
                {4, 1, 2, Rational(1)},
                {4, 2, 3, Rational(1)}});
  std::vector<ScalarField> inv{
      ScalarField::from_polynomial("f1", poly(5, {{1, {0, 0, 0, 1, 0}}})),
      ScalarField::from_polynomial("f2", poly(5, {{1, {0, 1, 0, 1, 0}}, {Rational(-1, 2), {0, 0, 2, 0, 0}}})),
      ScalarField::from_polynomial("f3", poly(5, {{1, {1, 0, 0, 2, 0}},
                                                  {-1, {0, 0, 0, 2, 1}},
                                                  {-1, {0, 1, 1, 1, 0}},
                                                  {Rational(1, 3), {0, 0, 3, 0, 0}}})),
  };
  std::vector<CatalogSystem> sys{
      {"H3", "orthonormal", "f3", detail::rationals({0, 0, 0, 1, 0}), 1, 1.0, Boundedness::unbounded}};
  return CatalogEntry("example_i", std::move(a), {BilinearForm::orthonormal(5)}, std::move(inv),
                      detail::basis_vectors(5, {0, 1, 2, 3}), detail::basis_vectors(5, {4}), ActingFactor::plus,
                      std::move(sys));
}

inline CatalogEntry example_ii() {
  using detail::poly;
  LieAlgebra a("example_ii", 8,
               {{0, 3, 5, Rational(-1)},
                {0, 5, 6, Rational(-1)},
                {0, 1, 4, Rational(1)},
                {0, 2, 1, Rational(1)},
                {3, 1, 7, Rational(-1)},
                {5, 2, 7, Rational(-1)},
                {1, 2, 3, Rational(1)},
                {4, 1, 6, Rational(1)},
                {4, 2, 5, Rational(-1)}});
  BilinearForm g("standard", 8,
                 {{0, 0, Rational(1)},
                  {1, 1, Rational(1)},
                  {5, 5, Rational(1)},
                  {7, 7, Rational(1)},
                  {2, 4, Rational(-1)},
                  {3, 6, Rational(-1)}});
  std::vector<ScalarField> inv{
      ScalarField::from_polynomial("P1", poly(8, {{1, {0, 0, 0, 1, 0, 0, 0, 0}}})),
      ScalarField::from_polynomial("P2", poly(8, {{1, {0, 0, 0, 0, 0, 0, 0, 1}}})),
      ScalarField::from_polynomial("P3", poly(8, {{1, {0, 0, 0, 1, 0, 0, 1, 0}},
                                                  {-1, {0, 0, 1, 0, 0, 0, 0, 1}},
                                                  {Rational(-1, 2), {0, 0, 0, 0, 0, 2, 0, 0}}})),
      ScalarField::from_polynomial("P4", poly(8, {{1, {1, 0, 0, 0, 0, 0, 0, 1}},
                                                  {1, {0, 0, 0, 1, 1, 0, 0, 0}},
                                                  {1, {0, 1, 0, 0, 0, 1, 0, 0}},
                                                  {1, {0, 0, 1, 0, 0, 0, 1, 0}}})),
  };
  std::vector<CatalogSystem> sys{{"H4", "standard", "P4",
                                  detail::rationals({0, 1, 0, 1, Rational(1, 2), Rational(-1, 2), 1, 1}), -1, 1.0,
                                  Boundedness::unbounded}};
  std::vector<BilinearForm> metrics{std::move(g)};
  return CatalogEntry("example_ii", std::move(a), std::move(metrics), std::move(inv),
                      detail::basis_vectors(8, {1, 2, 3, 5, 6, 7}), detail::basis_vectors(8, {0, 4}),
                      ActingFactor::plus, std::move(sys));
}

/// Basis order (e0, e1, e2, e3).
inline CatalogEntry example_iii() {
  LieAlgebra a("example_iii", 4, {{3, 1, 2, Rational(1)}, {3, 2, 1, Rational(-1)}, {1, 2, 0, Rational(1)}});
  auto adinv = detail::oscillator_gram(4);
  auto neg03 = adinv;
  neg03(0, 3) = neg03(3, 0) = -1;
  auto neg11 = adinv;
  neg11(1, 1) = -1;
  std::vector<BilinearForm> metrics{BilinearForm::orthonormal(4), BilinearForm("ad_invariant", adinv),
                                    BilinearForm("indefinite_03", neg03), BilinearForm("indefinite_11", neg11)};
  std::vector<ScalarField> inv{ScalarField::from_polynomial("P", detail::oscillator_hamiltonian(4))};
  const double period = 2.0 * std::numbers::pi;
  std::vector<CatalogSystem> sys{
      {"sis11", "orthonormal", "P", detail::rationals({1, 1, 0, 0}), -1, period, Boundedness::bounded},
      {"sis22", "ad_invariant", "P", detail::rationals({0, 1, 0, 1}), 1, period, Boundedness::bounded},
      {"indefinite_03", "indefinite_03", "P", detail::rationals({0, 1, 0, 1}), 1, period, Boundedness::bounded},
      {"indefinite_11", "indefinite_11", "P", detail::rationals({0, 1, 0, 1}), 1, period, Boundedness::bounded},
  };
  return CatalogEntry("example_iii", std::move(a), std::move(metrics), std::move(inv),
                      detail::basis_vectors(4, {0, 1, 2}), detail::basis_vectors(4, {3}), ActingFactor::plus,
                      std::move(sys));
}

/// Basis order (X0, X1, Y1, ..., Xn, Yn, X_{n+1}); dimension 2n + 2.
inline CatalogEntry oscillator(std::size_t n) {
  if (n == 0) throw InvalidInput("oscillator family requires n >= 1");
  const std::size_t dim = 2 * n + 2;
  std::vector<BilinearForm> metrics{BilinearForm("ad_invariant", detail::oscillator_gram(dim))};
  std::vector<ScalarField> inv{ScalarField::from_polynomial("P", detail::oscillator_hamiltonian(dim))};
  Vector<Rational> u0(dim, Rational(0));
  for (std::size_t i = 1; i <= n; ++i) {
    u0[2 * i - 1] = Rational(1, static_cast<long>(i));
    u0[2 * i] = Rational(static_cast<long>(i) % 2 == 0 ? -1 : 1, 2);
  }
  u0[dim - 1] = 1;
  std::vector<Vector<Rational>> plus, minus{unit_vector<Rational>(dim, dim - 1)};
  for (std::size_t i = 0; i + 1 < dim; ++i) plus.push_back(unit_vector<Rational>(dim, i));
  std::vector<CatalogSystem> sys{
      {"sis23", "ad_invariant", "P", std::move(u0), 1, 2.0 * std::numbers::pi, Boundedness::bounded}};
  return CatalogEntry("oscillator", detail::oscillator_algebra(n), std::move(metrics), std::move(inv), std::move(plus),
                      std::move(minus), ActingFactor::plus, std::move(sys), n);
}

inline const std::vector<std::string>& catalog_ids() {
  static const std::vector<std::string> ids{"example_i", "example_ii", "example_iii", "oscillator"};
  return ids;
}

/// Looks up "example_i", "example_ii", "example_iii", "oscillator" (with n)
/// or "oscillator(n)".
inline CatalogEntry catalog_entry(const std::string& id, std::size_t n = 1) {
  if (id == "example_i") return example_i();
  if (id == "example_ii") return example_ii();
  if (id == "example_iii") return example_iii();
  if (id == "oscillator") return oscillator(n);
  const std::string prefix = "oscillator(";
  if (id.rfind(prefix, 0) == 0 && id.size() > prefix.size() + 1 && id.back() == ')') {
    const auto digits = id.substr(prefix.size(), id.size() - prefix.size() - 1);
    if (!digits.empty() && std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; }))
      return oscillator(std::stoul(digits));
  }
  throw InvalidInput("unknown catalog entry '" + id + "'");
}

// ---------------------------------------------------------------------------
// Hand-expanded coordinate formulas, used as oracles against the generic
// machinery. Indices are 0-based: e1..e5 -> 0..4 (example_i), e1..e8 -> 0..7
// (example_ii), e0..e3 -> 0..3 (example_iii).

namespace reference {

namespace ex_i {
template <class T>
Vector<T> ad_transpose(const Vector<T>& x, const Vector<T>& y) {
  return {x[4] * y[1] - x[2] * y[3] - x[1] * y[2], x[0] * y[2] + x[4] * y[2], x[0] * y[3] + x[4] * y[3], T(0),
          -(x[0] * y[1] + x[2] * y[3] + x[1] * y[2])};
}
template <class T>
Vector<T> grad_f2(const Vector<T>& x) {
  return {T(0), x[3], -x[2], x[1], T(0)};
}
template <class T>
Vector<T> grad_f3(const Vector<T>& x) {
  return {x[3] * x[3], -x[2] * x[3], x[2] * x[2] - x[1] * x[3], T(2) * (x[0] - x[4]) * x[3] - x[1] * x[2],
          -x[3] * x[3]};
}
/// f3 on the orbit through a point with fourth coordinate x4o.
template <class T>
T restricted_h3(const Vector<T>& x, const T& x4o) {
  return x4o * x4o * x[0] - x[1] * x[2] * x4o + x[2] * x[2] * x[2] / T(3);
}
template <class T>
Vector<T> field_h3(const Vector<T>& u) {
  return {u[3] * u[3] * u[1], u[3] * u[3] * u[2], u[3] * u[3] * u[3], T(0), T(0)};
}
inline Vector<double> solution(const Vector<double>& u0, double t) {
  const double a = u0[3];
  return {std::pow(a, 7) * t * t * t / 6.0 + 0.5 * std::pow(a, 4) * u0[2] * t * t + a * a * u0[1] * t + u0[0],
          0.5 * std::pow(a, 5) * t * t + a * a * u0[2] * t + u0[1], a * a * a * t + u0[2], a, u0[4]};
}
}  // namespace ex_i

namespace ex_ii {
template <class T>
Vector<T> ad_transpose(const Vector<T>& x, const Vector<T>& y) {
  return {x[1] * y[2] - x[2] * y[1] + x[3] * y[5] - x[5] * y[3],
          -x[0] * y[2] + x[2] * y[6] - x[3] * y[7] - x[4] * y[3],
          -x[1] * y[3] - x[2] * y[5],
          T(0),
          -x[0] * y[1] + x[1] * y[6] + x[4] * y[5] + x[5] * y[7],
          x[0] * y[3] + x[2] * y[7],
          x[0] * y[5] - x[1] * y[7],
          T(0)};
}
/// Induced action for x in span{e2,e3,e4,e6,e7,e8}, y with y1 = y3 = 0.
template <class T>
Vector<T> split_action(const Vector<T>& x, const Vector<T>& y) {
  return {T(0), x[2] * y[6] - x[3] * y[7], T(0), T(0), x[1] * y[6] + x[5] * y[7], x[2] * y[7], -x[1] * y[7], T(0)};
}
template <class T>
Vector<T> grad_p3(const Vector<T>& x) {
  return {T(0), T(0), T(0), -x[3], x[7], -x[5], -x[6], -x[2]};
}
template <class T>
Vector<T> grad_p4(const Vector<T>& x) {
  return {x[7], x[5], -x[3], -x[2], -x[6], x[1], -x[4], x[0]};
}
template <class T>
T restricted_h3(const Vector<T>& x, const T& x4o) {
  return x[6] * x4o - x[5] * x[5] / T(2);
}
template <class T>
T restricted_h4(const Vector<T>& x, const T& x4o) {
  return x4o * x[4] + x[1] * x[5];
}
template <class T>
Vector<T> field_h4(const Vector<T>& x) {
  return {T(0), x[6] * x[3], T(0), T(0), -(x[1] * x[7] + x[6] * x[5]), x[7] * x[3], x[7] * x[5], T(0)};
}
inline Vector<double> solution(const Vector<double>& x0, double t) {
  const double x2 = x0[1], x4 = x0[3], x5 = x0[4], x6 = x0[5], x7 = x0[6], x8 = x0[7];
  const double t2 = t * t, t3 = t2 * t, t4 = t3 * t;
  return {0.0,
          x4 * x4 * x8 * x8 * t3 / 6.0 + x6 * x8 * x4 * t2 / 2.0 + x4 * x7 * t + x2,
          0.0,
          x4,
          -(x4 * x4 * x8 * x8 * x8 * t4 / 6.0 + 2.0 / 3.0 * x4 * x6 * x8 * x8 * t3 +
            (x4 * x7 * x8 + 0.5 * x6 * x6 * x8) * t2 + (x2 * x8 + x7 * x6) * t) +
              x5,
          x4 * x8 * t + x6,
          x4 * x8 * x8 * t2 / 2.0 + x6 * x8 * t + x7,
          x8};
}
}  // namespace ex_ii

namespace ex_iii {
template <class T>
Vector<T> ad_transpose_orthonormal(const Vector<T>& x, const Vector<T>& y) {
  return {T(0), x[3] * y[2] - x[2] * y[0], x[1] * y[0] - x[3] * y[1], x[2] * y[1] - x[1] * y[2]};
}
/// Orthonormal metric, x in span{e0,e1,e2}, y with y3 = 0.
template <class T>
Vector<T> split_action_orthonormal(const Vector<T>& x, const Vector<T>& y) {
  return {T(0), -x[2] * y[0], x[1] * y[0], T(0)};
}
/// Ad-invariant metric, x in span{e0,e1,e2}, y with y0 = 0; the induced
/// infinitesimal action coincides with the projected adjoint action.
template <class T>
Vector<T> split_coadjoint_ad_invariant(const Vector<T>& x, const Vector<T>& y) {
  return {T(0), x[2] * y[3], -x[1] * y[3], T(0)};
}
template <class T>
Vector<T> grad_p_orthonormal(const Vector<T>& x) {
  return {x[3], x[1], x[2], x[0]};
}
template <class T>
Vector<T> grad_p_ad_invariant(const Vector<T>& x) {
  return x;
}
template <class T>
T restricted_h(const Vector<T>& x) {
  return (x[1] * x[1] + x[2] * x[2]) / T(2);
}
template <class T>
Vector<T> field_sis11(const Vector<T>& x) {
  return {T(0), x[0] * x[2], -x[0] * x[1], T(0)};
}
template <class T>
Vector<T> field_sis22(const Vector<T>& x) {
  return {T(0), -x[3] * x[2], x[3] * x[1], T(0)};
}
}  // namespace ex_iii

}  // namespace reference

/// Closed-form solution of a catalog system from x0 at time t.
namespace detail {

inline void require_closed_form_start(const CatalogEntry& entry, const std::string& system_id,
                                      const Vector<double>& x0) {
  const auto& spec = entry.system_spec(system_id);
  require_same_size(x0.size(), entry.algebra().dim(), "closed_form");
  if (!entry.split(spec.metric).in_phase_space(x0))
    throw DomainError("closed_form: initial condition does not match the phase space of " + system_id);
}

inline Vector<double> closed_form_unchecked(const CatalogEntry& entry, const std::string& system_id,
                                            const Vector<double>& x0, double t) {
  if (entry.id() == "example_i") return reference::ex_i::solution(x0, t);
  if (entry.id() == "example_ii") return reference::ex_ii::solution(x0, t);
  const auto rotate = [t](double a, double b, double w, int orientation) {
    const double c = std::cos(w * t), s = std::sin(orientation * w * t);
    return std::pair{a * c - b * s, a * s + b * c};
  };
  Vector<double> x = x0;
  if (entry.id() == "example_iii") {
    if (system_id == "sis11") {
      const double a = x0[2], b = x0[1], w = x0[0];
      x[1] = a * std::sin(w * t) + b * std::cos(w * t);
      x[2] = a * std::cos(w * t) - b * std::sin(w * t);
      return x;
    }
    const int orientation = system_id == "sis22" ? 1 : -1;
    std::tie(x[1], x[2]) = rotate(x0[1], x0[2], x0[3], orientation);
    return x;
  }
  const std::size_t n = entry.oscillator_n();
  for (std::size_t i = 1; i <= n; ++i)
    std::tie(x[2 * i - 1], x[2 * i]) = rotate(x0[2 * i - 1], x0[2 * i], x0.back(), 1);
  return x;
}

}  // namespace detail

inline Vector<double> closed_form(const CatalogEntry& entry, const std::string& system_id, const Vector<double>& x0,
                                  double t) {
  detail::require_closed_form_start(entry, system_id, x0);
  return detail::closed_form_unchecked(entry, system_id, x0, t);
}

/// Closed form at every time in `times`; the start is validated once.
inline std::vector<Vector<double>> closed_form(const CatalogEntry& entry, const std::string& system_id,
                                               const Vector<double>& x0, const std::vector<double>& times) {
  detail::require_closed_form_start(entry, system_id, x0);
  std::vector<Vector<double>> out;
  out.reserve(times.size());
  for (double t : times) out.push_back(detail::closed_form_unchecked(entry, system_id, x0, t));
  return out;
}

// ---------------------------------------------------------------------------
// Lax pairs

struct LaxPair {
  Matrix<double> m;
  Matrix<double> l;
};

/// M carries 2x2 rotation blocks [[0, -w], [w, 0]] with w the last state
/// coordinate; L adds the last column (x_1, y_1, ..., x_n, y_n, 0).
inline LaxPair lax_matrices(const CatalogEntry& entry, const Vector<double>& x) {
  if (!entry.has_lax_pair()) throw InvalidInput("entry " + entry.label() + " has no Lax pair");
  require_same_size(x.size(), entry.algebra().dim(), "lax_matrices");
  const std::size_t pairs = (x.size() - 2) / 2, size = 2 * pairs + 1;
  const double w = x.back();
  LaxPair p{Matrix<double>(size, size), Matrix<double>(size, size)};
  for (std::size_t b = 0; b < pairs; ++b) {
    p.m(2 * b, 2 * b + 1) = -w;
    p.m(2 * b + 1, 2 * b) = w;
  }
  p.l = p.m;
  for (std::size_t i = 0; i < 2 * pairs; ++i) p.l(i, size - 1) = x[i + 1];
  return p;
}

struct LaxReport {
  double commutator_residual = 0.0;  // max |central difference of L - [M, L]|
  double field_residual = 0.0;       // max |L(X_H(x)) - [M, L]|; zero when sys is absent
  double eigenvalue_drift = 0.0;     // max distance of the spectrum of L from its initial spectrum
};

namespace detail {
inline std::vector<std::complex<double>> spectrum(const Matrix<double>& m) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(to_eigen(m).cast<std::complex<double>>(), false);
  const auto& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

/// Greedy nearest matching; adequate for well-separated or exactly repeated spectra.
inline double spectrum_distance(std::vector<std::complex<double>> a, std::vector<std::complex<double>> b) {
  double worst = 0.0;
  for (const auto& z : a) {
    auto best = std::min_element(b.begin(), b.end(),
                                 [&](const auto& p, const auto& q) { return std::abs(p - z) < std::abs(q - z); });
    worst = std::max(worst, std::abs(*best - z));
    b.erase(best);
  }
  return worst;
}
}  // namespace detail

/// The central difference carries an O(dt^2) truncation error. With `sys`
/// given, L' is also formed exactly as L(X_H(x)), since L is linear in x.
inline LaxReport lax_residual(const CatalogEntry& entry, const Trajectory& traj,
                              const HamiltonianSystem* sys = nullptr) {
  LaxReport r;
  if (traj.states.empty()) return r;
  const auto base = detail::spectrum(lax_matrices(entry, traj.states.front()).l);
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const auto p = lax_matrices(entry, traj.states[k]);
    r.eigenvalue_drift = std::max(r.eigenvalue_drift, detail::spectrum_distance(base, detail::spectrum(p.l)));
    if (sys) {
      const auto exact = lax_matrices(entry, vector_field(*sys, traj.states[k])).l;
      r.field_residual = std::max(r.field_residual, (exact - commutator(p.m, p.l)).max_abs());
    }
    if (k == 0 || k + 1 == traj.size()) continue;
    const auto next = lax_matrices(entry, traj.states[k + 1]).l;
    const auto prev = lax_matrices(entry, traj.states[k - 1]).l;
    auto derivative = next - prev;
    derivative *= 1.0 / (traj.times[k + 1] - traj.times[k - 1]);
    r.commutator_residual = std::max(r.commutator_residual, (derivative - commutator(p.m, p.l)).max_abs());
  }
  return r;
}

// ---------------------------------------------------------------------------
// Equivalence of two systems under a signed coordinate permutation

struct EquivalenceReport {
  bool found = false;
  std::vector<std::size_t> permutation;  // x_b[permutation[i]] = signs[i] * x_a[i]
  std::vector<int> signs;
  int time_direction = 1;  // -1: x_b(t) corresponds to x_a(-t)
  double max_deviation = 0.0;
  std::size_t candidates_tested = 0;

  std::string describe() const {
    if (!found) return "NOT-FOUND";
    std::string s;
    for (std::size_t i = 0; i < permutation.size(); ++i) {
      if (i) s += ", ";
      s += "e" + std::to_string(i) + " -> " + (signs[i] < 0 ? "-" : "") + "e" + std::to_string(permutation[i]);
    }
    return s + (time_direction < 0 ? " (time reversed)" : "");
  }
};

namespace detail {
inline Vector<double> apply_signed_permutation(const std::vector<std::size_t>& perm, const std::vector<int>& signs,
                                               const Vector<double>& x) {
  Vector<double> y(x.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) y[perm[i]] = signs[i] * x[i];
  return y;
}
}  // namespace detail

/// Searches signed coordinate permutations (and time reversal) mapping the
/// trajectories of system a onto those of system b, starting from a's pinned
/// initial condition. Candidates are prefiltered by conjugacy of the vector
/// fields at seeded sample points, then confirmed by integration.
inline EquivalenceReport equivalence_check(const CatalogEntry& entry, const std::string& system_a,
                                           const std::string& system_b, double duration = 2.0 * std::numbers::pi,
                                           double dt = 1e-3, double tolerance = 1e-6, std::uint64_t seed = 11) {
  const auto a = entry.system(system_a);
  const auto& spec_b = entry.system_spec(system_b);
  const auto split_b = entry.split(spec_b.metric);
  const std::size_t n = entry.algebra().dim();
  const auto samples = sample_phase_points(n, a.split_setting(), 5, seed);
  EquivalenceReport report;

  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  std::optional<Trajectory> traj_a[2];
  do {
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      std::vector<int> signs(n);
      for (std::size_t i = 0; i < n; ++i) signs[i] = (mask >> i) & 1u ? -1 : 1;
      const auto start = detail::apply_signed_permutation(perm, signs, a.initial);
      if (!split_b.in_phase_space(start)) continue;
      const auto b = entry.system(system_b, start);
      for (int direction : {1, -1}) {
        ++report.candidates_tested;
        bool conjugate = true;
        for (const auto& u : samples) {
          const auto mapped = detail::apply_signed_permutation(perm, signs, u);
          if (!split_b.in_phase_space(mapped)) {
            conjugate = false;
            break;
          }
          const auto lhs =
              static_cast<double>(direction) * detail::apply_signed_permutation(perm, signs, vector_field(a, u));
          const auto rhs = vector_field(b, mapped);
          if (norm(lhs - rhs) > 1e-9 * std::max(1.0, norm(rhs))) {
            conjugate = false;
            break;
          }
        }
        if (!conjugate) continue;
        auto& ta = traj_a[direction > 0 ? 0 : 1];
        if (!ta) {
          HamiltonianSystem a_dir = a;
          a_dir.sign = a.sign * direction;
          ta = integrate(a_dir, duration, dt);
        }
        const auto tb = integrate(b, duration, dt);
        double dev = 0.0;
        for (std::size_t k = 0; k < tb.size(); ++k)
          dev = std::max(dev, norm(detail::apply_signed_permutation(perm, signs, ta->states[k]) - tb.states[k]));
        if (dev < tolerance) {
          report.found = true;
          report.permutation = perm;
          report.signs = signs;
          report.time_direction = direction;
          report.max_deviation = dev;
          return report;
        }
      }
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return report;
}

}  // namespace orbitflow
