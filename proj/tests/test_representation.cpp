#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "orbitflow/catalog.hpp"
#include "orbitflow/representation.hpp"
#include "orbitflow/runs.hpp"

namespace of = orbitflow;
using of::operator+;
using of::operator-;
using of::operator*;
using of::Rational;
using V = of::Vector<Rational>;

namespace {
V e(std::size_t n, std::size_t i) { return of::unit_vector<Rational>(n, i); }
}  // namespace

TEST(TauExp, ExampleIOnE4) {
  const auto ex = of::example_i();
  const auto tau = of::tau_exp(ex.algebra(), ex.metric("orthonormal"), e(5, 4));
  // ad^t_{e5} shifts e4 -> e3 -> e2 -> e1, so the series stops after four terms.
  EXPECT_EQ(tau * e(5, 3), V({Rational(-1, 6), Rational(1, 2), -1, 1, 0}));
}

TEST(TauExp, IsAGroupActionOnNilpotentAlgebras) {
  std::mt19937_64 rng(5);
  for (const auto& ex : {of::example_i(), of::example_ii()}) {
    const auto& a = ex.algebra();
    const auto& g = ex.metrics().front();
    for (int k = 0; k < 5; ++k) {
      const auto x = of::random_rational_vector(rng, a.dim());
      const auto fwd = of::tau_exp(a, g, x), back = of::tau_exp(a, g, V(-x));
      EXPECT_EQ(fwd * back, of::Matrix<Rational>::identity(a.dim())) << ex.label();
    }
  }
}

TEST(TauExp, IsTheMetricContragredientOfAd) {
  // <tau(exp X) U, Ad(exp X) Y> = <U, Y>.
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n01;
  for (const auto& ex : {of::example_ii(), of::example_iii()}) {
    const auto& a = ex.algebra();
    for (const auto& g : ex.metrics()) {
      of::Vector<double> x(a.dim());
      for (auto& c : x) c = n01(rng);
      const auto tau = of::tau_exp(a, g, x), ad = of::adjoint_exp(a, x);
      const auto lhs = tau.transpose() * (g.gram_as<double>() * ad);
      EXPECT_LT((lhs - g.gram_as<double>()).max_abs(), 1e-10) << ex.label() << " " << g.name();
    }
  }
}

TEST(TauExp, ExactRequiresNilpotent) {
  const auto ex = of::example_iii();
  EXPECT_THROW(of::tau_exp(ex.algebra(), ex.metric("orthonormal"), e(4, 3)), of::InvalidInput);
}

TEST(Invariance, InfinitesimalAndFiniteFormsAgree) {
  const auto ex = of::example_iii();
  const auto& f = ex.invariant("P");
  std::mt19937_64 rng(13);
  std::normal_distribution<double> n01;
  for (const auto& g : ex.metrics()) {
    of::Vector<double> u(4), y(4);
    for (auto& c : u) c = n01(rng);
    for (auto& c : y) c = n01(rng);
    EXPECT_LT(of::tau_invariance_residual(ex.algebra(), g, f, u), 1e-12);
    EXPECT_LT(of::tau_invariance_defect(ex.algebra(), g, f, u, y, 0.7), 1e-10);
  }
  // A linear function of a non-central direction is not invariant.
  const auto lin = of::ScalarField::from_polynomial("x1", of::Polynomial::variable(4, 1));
  const of::Vector<double> u{1, 1, 1, 1};
  EXPECT_GT(of::tau_invariance_residual(ex.algebra(), ex.metric("orthonormal"), lin, u), 0.5);
}

TEST(Isotropy, ExampleIiiAtE0) {
  const auto ex = of::example_iii();
  const auto iso = of::isotropy_algebra(ex.algebra(), ex.metric("orthonormal"), e(4, 0));
  EXPECT_EQ(of::Subspace::span(4, iso), of::Subspace::span(4, {e(4, 0), e(4, 3)}));
}

TEST(SymplecticForm, ExampleIiiAtE0) {
  const auto ex = of::example_iii();
  const auto& g = ex.metric("orthonormal");
  EXPECT_EQ(of::symplectic_form(ex.algebra(), g, e(4, 0), e(4, 1), e(4, 2)), 1);
  EXPECT_EQ(of::symplectic_form(ex.algebra(), g, e(4, 0), e(4, 2), e(4, 1)), -1);
  EXPECT_EQ(of::symplectic_form(ex.algebra(), g, e(4, 0), e(4, 0), e(4, 3)), 0);
}

TEST(OrbitTangent, FullOrbitDimensionIsRankOfCoadjointMap) {
  const auto ex = of::example_iii();
  const auto& g = ex.metric("orthonormal");
  // Generic point: dimension 2; the center direction e0 alone gives dimension 2 too,
  // the origin gives 0.
  EXPECT_EQ(of::orbit_tangent(ex.algebra(), g, V{1, 1, 1, 1}).dim, 2u);
  EXPECT_EQ(of::orbit_tangent(ex.algebra(), g, V{0, 0, 0, 0}).dim, 0u);
  EXPECT_EQ(of::orbit_tangent(ex.algebra(), g, V{0, 0, 0, 1}).dim, 0u);
}

TEST(PoissonBracket, AntisymmetricAndLeibniz) {
  const auto ex = of::example_i();
  const auto& a = ex.algebra();
  const auto& g = ex.metric("orthonormal");
  const auto x1 = of::ScalarField::from_polynomial("x1", of::Polynomial::variable(5, 0));
  const auto x5 = of::ScalarField::from_polynomial("x5", of::Polynomial::variable(5, 4));
  const V u{1, 2, 3, 4, 5};
  // {x1, x5}(U) = <U, [e1, e5]> = -<U, e2> = -2.
  EXPECT_EQ(of::poisson_bracket(a, g, x1, x5, u), -2);
  EXPECT_EQ(of::poisson_bracket(a, g, x5, x1, u), 2);
  for (const auto& f : ex.invariants()) EXPECT_EQ(of::poisson_bracket(a, g, f, x1, u), 0) << f.name();
}
