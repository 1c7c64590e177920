#include <gtest/gtest.h>

#include "orbitflow/algebra.hpp"
#include "orbitflow/catalog.hpp"

namespace of = orbitflow;
using of::operator+;
using of::operator-;
using of::operator*;
using of::Rational;
using V = of::Vector<Rational>;

namespace {

V e(std::size_t n, std::size_t i) { return of::unit_vector<Rational>(n, i); }

// [e1,e2] = e3 and nothing else.
of::LieAlgebra heisenberg() { return of::LieAlgebra("heisenberg", 3, {{0, 1, 2, Rational(1)}}); }

}  // namespace

TEST(LieAlgebra, BracketIsBilinearAndAntisymmetric) {
  const auto h = heisenberg();
  EXPECT_EQ(h.bracket(e(3, 0), e(3, 1)), e(3, 2));
  EXPECT_EQ(h.bracket(e(3, 1), e(3, 0)), V({0, 0, -1}));
  const V x{2, Rational(1, 3), 5}, y{-1, 4, Rational(7, 2)};
  // [x,y] = (x1 y2 - x2 y1) e3
  EXPECT_EQ(h.bracket(x, y), V({0, 0, Rational(2 * 4) - Rational(1, 3) * -1}));
  EXPECT_EQ(of::antisymmetry_residual(h), 0);
  EXPECT_EQ(of::jacobi_residual(h), 0);
}

TEST(LieAlgebra, AdMatrixColumnsAreBrackets) {
  const auto a = of::example_i().algebra();
  const V x{1, -2, Rational(1, 2), 3, 4};
  const auto ad = a.ad(x);
  for (std::size_t j = 0; j < 5; ++j) EXPECT_EQ(ad.column(j), a.bracket(x, e(5, j)));
}

TEST(LieAlgebra, RejectsNonzeroSelfBracket) {
  EXPECT_THROW(of::LieAlgebra("bad", 2, {{0, 0, 1, Rational(1)}}), of::StructuralError);
}

TEST(LieAlgebra, RejectsOutOfRangeIndex) {
  EXPECT_THROW(of::LieAlgebra("bad", 2, {{0, 2, 1, Rational(1)}}), of::InvalidInput);
  EXPECT_THROW(of::LieAlgebra("bad", 0, {}), of::InvalidInput);
}

TEST(LieAlgebra, JacobiDefectNamesTheFailingTriple) {
  // [e1,e2] = e3, [e2,e3] = e1, [e1,e3] = e1 violates Jacobi.
  const of::LieAlgebra bad("bad", 3, {{0, 1, 2, Rational(1)}, {1, 2, 0, Rational(1)}, {0, 2, 0, Rational(1)}});
  const auto d = of::jacobi_defect(bad);
  EXPECT_GT(d.magnitude, 0);
  // Jacobi sum over the only triple of distinct indices.
  const auto& [i, j, l] = d.triple;
  EXPECT_TRUE(i != j && j != l && i != l);
  const auto ei = e(3, i), ej = e(3, j), el = e(3, l);
  const auto sum = bad.bracket(bad.bracket(ei, ej), el) + bad.bracket(bad.bracket(ej, el), ei) +
                   bad.bracket(bad.bracket(el, ei), ej);
  EXPECT_FALSE(of::is_zero(sum));
}

TEST(LieAlgebra, EntriesRoundTrip) {
  const auto a = of::example_ii().algebra();
  const of::LieAlgebra b("copy", a.dim(), a.entries());
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j)
      for (std::size_t k = 0; k < a.dim(); ++k) EXPECT_EQ(a.constant(i, j, k), b.constant(i, j, k));
}

TEST(LieAlgebra, CatalogSeries) {
  const auto a1 = of::example_i().algebra();
  // Lower central series of the filiform algebra: 5, 3, 2, 1, 0.
  std::vector<std::size_t> dims;
  for (const auto& s : a1.lower_central_series()) dims.push_back(s.dim());
  EXPECT_EQ(dims, (std::vector<std::size_t>{5, 3, 2, 1, 0}));
  EXPECT_EQ(a1.nilpotency_step(), 4u);

  const auto a2 = of::example_ii().algebra();
  EXPECT_TRUE(a2.is_nilpotent());
  EXPECT_EQ(a2.nilpotency_step(), 5u);

  const auto a3 = of::example_iii().algebra();
  EXPECT_TRUE(a3.is_solvable());
  EXPECT_FALSE(a3.is_nilpotent());
  EXPECT_FALSE(a3.nilpotency_step().has_value());
}

TEST(LieAlgebra, OscillatorOfRankOneMatchesExampleIii) {
  const auto a = of::oscillator(1).algebra(), b = of::example_iii().algebra();
  ASSERT_EQ(a.dim(), b.dim());
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(a.bracket(e(4, i), e(4, j)), b.bracket(e(4, i), e(4, j)));
}

TEST(LieAlgebra, OscillatorFamilyIsLie) {
  for (std::size_t n : {1, 2, 3, 4}) {
    const auto a = of::oscillator(n).algebra();
    EXPECT_EQ(a.dim(), 2 * n + 2);
    EXPECT_EQ(of::jacobi_residual(a), 0) << n;
    EXPECT_TRUE(a.is_solvable());
  }
}

TEST(LieAlgebra, SubalgebraTest) {
  const auto a = of::example_i().algebra();
  const auto first_four = of::Subspace::span(5, {e(5, 0), e(5, 1), e(5, 2), e(5, 3)});
  EXPECT_TRUE(a.is_subalgebra(first_four));
  const auto abelian = of::Subspace::span(5, {e(5, 1), e(5, 2), e(5, 3)});
  EXPECT_TRUE(a.is_subalgebra(abelian));
  EXPECT_TRUE(of::is_zero(a.bracket(e(5, 1), e(5, 3))));
  const auto pair = of::Subspace::span(5, {e(5, 0), e(5, 4)});
  EXPECT_FALSE(a.is_subalgebra(pair));
}
