#include <gtest/gtest.h>

#include <random>

#include "orbitflow/catalog.hpp"
#include "orbitflow/metric.hpp"
#include "orbitflow/runs.hpp"

namespace of = orbitflow;
using of::Rational;
using V = of::Vector<Rational>;

TEST(BilinearForm, RejectsDegenerateAndAsymmetric) {
  of::Matrix<Rational> degenerate(2, 2);
  degenerate(0, 0) = 1;
  EXPECT_THROW(of::BilinearForm("d", degenerate), of::StructuralError);
  of::Matrix<Rational> asym = of::Matrix<Rational>::identity(2);
  asym(0, 1) = 1;
  EXPECT_THROW(of::BilinearForm("a", asym), of::StructuralError);
  EXPECT_THROW(of::BilinearForm("e", of::Matrix<Rational>(0, 0)), of::InvalidInput);
}

TEST(BilinearForm, FlatAndSharpAreInverse) {
  const auto g = of::example_ii().metric("standard");
  const V x{1, -2, Rational(1, 2), 3, 0, 7, -1, Rational(5, 3)};
  EXPECT_EQ(g.sharp(g.flat(x)), x);
  // <e3, e5> = -1 in the standard form.
  EXPECT_EQ(g.pair(of::unit_vector<Rational>(8, 2), of::unit_vector<Rational>(8, 4)), -1);
}

TEST(AdTranspose, DefiningIdentityHoldsExactly) {
  std::mt19937_64 rng(3);
  for (const auto& entry : {of::example_i(), of::example_ii(), of::example_iii(), of::oscillator(2)}) {
    const auto& a = entry.algebra();
    for (const auto& g : entry.metrics())
      for (int k = 0; k < 10; ++k) {
        const auto x = of::random_rational_vector(rng, a.dim());
        const auto y = of::random_rational_vector(rng, a.dim());
        const auto z = of::random_rational_vector(rng, a.dim());
        EXPECT_EQ(g.pair(of::ad_transpose(a, g, x, y), z), g.pair(y, a.bracket(x, z))) << entry.label();
      }
  }
}

TEST(AdTranspose, OrthonormalIsPlainTranspose) {
  const auto e = of::example_i();
  const V x{1, 2, 3, 4, 5};
  EXPECT_EQ(of::ad_transpose_matrix(e.algebra(), e.metric("orthonormal"), x), e.algebra().ad(x).transpose());
}

TEST(Gradient, UsesTheMetric) {
  const auto e = of::example_iii();
  const auto& f = e.invariant("P");
  const V x{2, 3, 5, 7};
  // With the ad-invariant form the gradient of P is the identity map.
  EXPECT_EQ(of::gradient(e.metric("ad_invariant"), f, x), x);
  // In the orthonormal metric it is the differential itself.
  const auto df = f.differential(x).coords;
  EXPECT_EQ(of::gradient(e.metric("orthonormal"), f, x), df);
}

TEST(AdInvariance, DetectsInvariantForms) {
  const auto e = of::example_iii();
  EXPECT_EQ(of::ad_invariance_residual(e.algebra(), e.metric("ad_invariant")), 0);
  EXPECT_GT(of::ad_invariance_residual(e.algebra(), e.metric("orthonormal")), 0);
  for (std::size_t n : {1, 2, 3}) {
    const auto o = of::oscillator(n);
    EXPECT_EQ(of::ad_invariance_residual(o.algebra(), o.metric("ad_invariant")), 0) << n;
  }
}

TEST(AdInvariance, InvariantFormMakesAdTransposeSkew) {
  const auto e = of::example_iii();
  const V x{1, -1, 2, 3};
  const auto& g = e.metric("ad_invariant");
  EXPECT_EQ(of::ad_transpose_matrix(e.algebra(), g, x), -e.algebra().ad(x));
}
