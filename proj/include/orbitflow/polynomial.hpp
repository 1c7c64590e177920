#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "orbitflow/error.hpp"
#include "orbitflow/linalg.hpp"
#include "orbitflow/rational.hpp"

namespace orbitflow {

/// Element of the dual space, stored by its coordinates in the dual basis.
template <class T>
struct Covector {
  Vector<T> coords;

  T operator()(const Vector<T>& y) const { return dot(coords, y); }
  std::size_t size() const noexcept { return coords.size(); }
};

struct Monomial {
  Rational coefficient;
  std::vector<unsigned> exponents;
};

/// Polynomial with rational coefficients in `vars` variables. Terms are kept
/// sorted by exponent vector with no zero coefficients, so equality is structural.
class Polynomial {
 public:
  explicit Polynomial(std::size_t vars = 0) : vars_(vars) {}
  Polynomial(std::size_t vars, const std::vector<Monomial>& terms) : vars_(vars) {
    for (const auto& t : terms) add_term(t.coefficient, t.exponents);
  }

  static Polynomial constant(std::size_t vars, const Rational& c) {
    Polynomial p(vars);
    p.add_term(c, std::vector<unsigned>(vars, 0));
    return p;
  }
  static Polynomial variable(std::size_t vars, std::size_t i, const Rational& c = 1) {
    std::vector<unsigned> e(vars, 0);
    e.at(i) = 1;
    Polynomial p(vars);
    p.add_term(c, e);
    return p;
  }
  /// Linear form sum_i q_i x_i.
  static Polynomial linear(const Vector<Rational>& q) {
    Polynomial p(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) p += variable(q.size(), i, q[i]);
    return p;
  }

  std::size_t variables() const noexcept { return vars_; }
  bool is_zero() const noexcept { return terms_.empty(); }

  std::vector<Monomial> terms() const {
    std::vector<Monomial> out;
    for (const auto& [e, c] : terms_) out.push_back({c, e});
    return out;
  }

  void add_term(const Rational& c, const std::vector<unsigned>& exponents) {
    require_same_size(exponents.size(), vars_, "polynomial term");
    if (c == 0) return;
    auto [it, inserted] = terms_.emplace(exponents, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  template <class T>
  T evaluate(const Vector<T>& x) const {
    require_same_size(x.size(), vars_, "polynomial evaluation");
    T sum(0);
    for (const auto& [e, c] : terms_) {
      T term = coefficient_as<T>(c);
      for (std::size_t i = 0; i < vars_; ++i)
        for (unsigned p = 0; p < e[i]; ++p) term *= x[i];
      sum += term;
    }
    return sum;
  }

  Polynomial derivative(std::size_t i) const {
    Polynomial d(vars_);
    for (const auto& [e, c] : terms_) {
      if (e.at(i) == 0) continue;
      auto lowered = e;
      --lowered[i];
      d.add_term(c * Rational(e[i]), lowered);
    }
    return d;
  }

  /// Covector of partial derivatives at x.
  template <class T>
  Covector<T> differential(const Vector<T>& x) const {
    Covector<T> df{Vector<T>(vars_, T(0))};
    for (const auto& [e, c] : terms_) {
      for (std::size_t i = 0; i < vars_; ++i) {
        if (e[i] == 0) continue;
        T term = coefficient_as<T>(c * Rational(e[i]));
        for (std::size_t j = 0; j < vars_; ++j) {
          const unsigned power = j == i ? e[j] - 1 : e[j];
          for (unsigned p = 0; p < power; ++p) term *= x[j];
        }
        df.coords[i] += term;
      }
    }
    return df;
  }

  unsigned degree() const {
    unsigned d = 0;
    for (const auto& [e, c] : terms_) {
      unsigned s = 0;
      for (auto p : e) s += p;
      d = std::max(d, s);
    }
    return d;
  }

  Polynomial& operator+=(const Polynomial& o) {
    require_same_size(o.vars_, vars_, "polynomial sum");
    for (const auto& [e, c] : o.terms_) add_term(c, e);
    return *this;
  }
  Polynomial& operator*=(const Rational& s) {
    if (s == 0) {
      terms_.clear();
      return *this;
    }
    for (auto& [e, c] : terms_) c *= s;
    return *this;
  }
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, Polynomial b) { return a += (b *= Rational(-1)); }
  friend Polynomial operator*(const Rational& s, Polynomial p) { return p *= s; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    require_same_size(a.vars_, b.vars_, "polynomial product");
    Polynomial r(a.vars_);
    for (const auto& [ea, ca] : a.terms_)
      for (const auto& [eb, cb] : b.terms_) {
        std::vector<unsigned> e(a.vars_);
        for (std::size_t i = 0; i < a.vars_; ++i) e[i] = ea[i] + eb[i];
        r.add_term(ca * cb, e);
      }
    return r;
  }
  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.vars_ == b.vars_ && a.terms_ == b.terms_;
  }

 private:
  template <class T>
  static T coefficient_as(const Rational& c) {
    if constexpr (is_exact_v<T>)
      return c;
    else
      return to_double(c);
  }

  std::size_t vars_;
  std::map<std::vector<unsigned>, Rational> terms_;
};

/// Default central-difference step for fields without an analytic differential.
inline constexpr double kDefaultDifferenceStep = 1e-5;

/// A real function on the Lie algebra: a Hamiltonian or an invariant.
///
/// The differential is analytic whenever a polynomial representation or an
/// explicit differential is supplied; otherwise central differences with a
/// fixed step are used.
class ScalarField {
 public:
  using Evaluator = std::function<double(const Vector<double>&)>;
  using Differential = std::function<Covector<double>(const Vector<double>&)>;

  static ScalarField from_polynomial(std::string name, Polynomial p) {
    ScalarField f;
    f.name_ = std::move(name);
    f.dim_ = p.variables();
    f.polynomial_ = std::move(p);
    return f;
  }

  static ScalarField numeric(std::string name, std::size_t dim, Evaluator eval, double step = kDefaultDifferenceStep) {
    if (!(step > 0.0)) throw InvalidInput("finite-difference step must be positive");
    ScalarField f;
    f.name_ = std::move(name);
    f.dim_ = dim;
    f.eval_ = std::move(eval);
    f.step_ = step;
    return f;
  }

  static ScalarField analytic(std::string name, std::size_t dim, Evaluator eval, Differential diff,
                              std::optional<Polynomial> poly = std::nullopt) {
    ScalarField f;
    f.name_ = std::move(name);
    f.dim_ = dim;
    f.eval_ = std::move(eval);
    f.diff_ = std::move(diff);
    f.polynomial_ = std::move(poly);
    return f;
  }

  const std::string& name() const noexcept { return name_; }
  std::size_t dim() const noexcept { return dim_; }
  const std::optional<Polynomial>& polynomial() const noexcept { return polynomial_; }
  bool has_analytic_differential() const noexcept { return diff_ || polynomial_; }
  double difference_step() const noexcept { return step_; }

  double operator()(const Vector<double>& x) const {
    require_same_size(x.size(), dim_, name_.c_str());
    const double v = eval_ ? eval_(x) : polynomial_->evaluate(x);
    return v;
  }

  /// Exact value; only available for polynomial fields.
  Rational operator()(const Vector<Rational>& x) const { return exact().evaluate(x); }

  Covector<double> differential(const Vector<double>& x) const {
    require_same_size(x.size(), dim_, name_.c_str());
    Covector<double> df;
    if (diff_)
      df = diff_(x);
    else if (polynomial_)
      df = polynomial_->differential(x);
    else
      return numeric_differential(x, step_);
    for (double d : df.coords)
      if (!std::isfinite(d)) throw EvaluationError("non-finite differential of " + name_);
    return df;
  }

  Covector<Rational> differential(const Vector<Rational>& x) const { return exact().differential(x); }

  /// Central differences, regardless of whether an analytic form exists.
  Covector<double> numeric_differential(const Vector<double>& x, double h) const {
    if (!(h > 0.0)) throw InvalidInput("finite-difference step must be positive");
    Covector<double> df{Vector<double>(dim_, 0.0)};
    Vector<double> probe(x);
    for (std::size_t i = 0; i < dim_; ++i) {
      const double saved = probe[i];
      probe[i] = saved + h;
      const double up = (*this)(probe);
      probe[i] = saved - h;
      const double down = (*this)(probe);
      probe[i] = saved;
      if (!std::isfinite(up) || !std::isfinite(down))
        throw EvaluationError("non-finite value of " + name_ + " near evaluation point");
      df.coords[i] = (up - down) / (2.0 * h);
    }
    return df;
  }

 private:
  const Polynomial& exact() const {
    if (!polynomial_) throw InvalidInput(name_ + " has no polynomial representation for exact evaluation");
    return *polynomial_;
  }

  std::string name_;
  std::size_t dim_ = 0;
  Evaluator eval_;
  Differential diff_;
  std::optional<Polynomial> polynomial_;
  double step_ = kDefaultDifferenceStep;
};

}  // namespace orbitflow
