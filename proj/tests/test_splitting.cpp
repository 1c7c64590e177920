#include <gtest/gtest.h>

#include <random>

#include "orbitflow/catalog.hpp"
#include "orbitflow/runs.hpp"
#include "orbitflow/splitting.hpp"

namespace of = orbitflow;
using of::operator+;
using of::operator-;
using of::operator*;
using of::Rational;
using V = of::Vector<Rational>;

namespace {
V e(std::size_t n, std::size_t i) { return of::unit_vector<Rational>(n, i); }
of::Subspace span(std::size_t n, std::initializer_list<std::size_t> idx) {
  std::vector<V> b;
  for (auto i : idx) b.push_back(e(n, i));
  return of::Subspace::span(n, b);
}
}  // namespace

TEST(Split, ExampleIProjection) {
  const auto ex = of::example_i();
  const auto s = of::build_split(ex.algebra(), ex.metric("orthonormal"), ex.plus_basis(), ex.minus_basis());
  EXPECT_EQ(s.plus_perp(), span(5, {4}));
  EXPECT_EQ(s.minus_perp(), span(5, {0, 1, 2, 3}));
  EXPECT_EQ(of::project_plus_perp(s, V(e(5, 0) + e(5, 4))), e(5, 4));
}

TEST(Split, ProjectorsAreIdempotentWithTheRightKernels) {
  for (const auto& ex : {of::example_i(), of::example_ii(), of::example_iii(), of::oscillator(2)})
    for (const auto& g : ex.metrics()) {
      const auto s = of::build_split(ex.algebra(), g, ex.plus_basis(), ex.minus_basis());
      const auto& p = s.plus_perp_projector<Rational>();
      EXPECT_EQ(p * p, p) << ex.label() << " " << g.name();
      for (const auto& b : s.plus_perp().basis()) EXPECT_EQ(p * b, b);
      for (const auto& b : s.minus_perp().basis()) EXPECT_TRUE(of::is_zero(p * b));
      const auto& q = s.plus_projector<Rational>();
      for (const auto& b : s.plus().basis()) EXPECT_EQ(q * b, b);
      for (const auto& b : s.minus().basis()) EXPECT_TRUE(of::is_zero(q * b));
    }
}

TEST(Split, ExampleIiiMetricsGiveDifferentPerps) {
  const auto ex = of::example_iii();
  const auto so = of::build_split(ex.algebra(), ex.metric("orthonormal"), ex.plus_basis(), ex.minus_basis());
  const auto sa = of::build_split(ex.algebra(), ex.metric("ad_invariant"), ex.plus_basis(), ex.minus_basis());
  EXPECT_EQ(so.plus_perp(), span(4, {3}));
  EXPECT_EQ(sa.plus_perp(), span(4, {0}));
  EXPECT_EQ(so.minus_perp(), span(4, {0, 1, 2}));
  EXPECT_EQ(sa.minus_perp(), span(4, {1, 2, 3}));
}

TEST(Split, RejectsNonSubalgebra) {
  const auto ex = of::example_i();
  try {
    of::build_split(ex.algebra(), ex.metric("orthonormal"), {e(5, 0), e(5, 4)}, {e(5, 1), e(5, 2), e(5, 3)});
    FAIL() << "expected SplitError";
  } catch (const of::SplitError& err) {
    EXPECT_EQ(err.kind(), of::SplitError::Kind::not_subalgebra);
  }
}

TEST(Split, RejectsOverlapAndDeficiency) {
  const auto ex = of::example_i();
  const auto& g = ex.metric("orthonormal");
  EXPECT_THROW(of::build_split(ex.algebra(), g, {e(5, 1), e(5, 2)}, {e(5, 3)}), of::SplitError);
  EXPECT_THROW(of::build_split(ex.algebra(), g, {e(5, 1), e(5, 2), e(5, 3)}, {e(5, 3), e(5, 0), e(5, 4)}),
               of::SplitError);
  EXPECT_THROW(of::build_split(ex.algebra(), g, {e(5, 1), e(5, 1)}, {e(5, 0), e(5, 3), e(5, 4)}), of::SplitError);
}

TEST(SplitSetting, PhaseSpaceIsPerpOfComplement) {
  const auto ex = of::example_ii();
  const auto s = ex.split("standard");
  EXPECT_EQ(s.acting(), of::ActingFactor::plus);
  EXPECT_EQ(s.phase_space(), s.split().minus_perp());
  EXPECT_EQ(s.acting_algebra(), s.split().plus());
  EXPECT_EQ(s.complement_algebra(), s.split().minus());
  EXPECT_TRUE(s.in_phase_space(ex.system_spec("H4").initial));
  EXPECT_FALSE(s.in_phase_space(e(8, 0)));
  const V v{1, 2, 3, 4, 5, 6, 7, 8};
  EXPECT_EQ(s.acting_component(v) + s.complement_component(v), v);
  EXPECT_TRUE(s.in_acting_algebra(s.acting_component(v)));
  EXPECT_EQ(s.project_phase(s.project_phase(v)), s.project_phase(v));
}

TEST(SplitSetting, InducedActionKeepsPointsInPhaseSpace) {
  std::mt19937_64 rng(17);
  for (const auto& ex : {of::example_i(), of::example_ii(), of::example_iii()})
    for (const auto& g : ex.metrics()) {
      const auto s = ex.split(g.name());
      for (int k = 0; k < 10; ++k) {
        const auto y = of::random_rational_in(rng, s.acting_algebra());
        const auto x = of::random_rational_in(rng, s.phase_space());
        EXPECT_TRUE(s.in_phase_space(of::induced_action_field(s, ex.algebra(), g, y, x)));
      }
    }
}

TEST(SplitSetting, InducedActionValidatesArguments) {
  const auto ex = of::example_i();
  const auto s = ex.split("orthonormal");
  const auto& g = ex.metric("orthonormal");
  EXPECT_THROW(of::induced_action_field(s, ex.algebra(), g, e(5, 4), e(5, 0)), of::DomainError);
  EXPECT_THROW(of::induced_action_field(s, ex.algebra(), g, e(5, 0), e(5, 4)), of::DomainError);
}

TEST(SplitSetting, MinusActingSwapsRoles) {
  const auto ex = of::example_i();
  const auto split = of::build_split(ex.algebra(), ex.metric("orthonormal"), ex.plus_basis(), ex.minus_basis());
  const of::SplitSetting s(split, of::ActingFactor::minus);
  EXPECT_EQ(s.phase_space(), split.plus_perp());
  EXPECT_EQ(s.acting_algebra(), split.minus());
  EXPECT_STREQ(of::to_string(of::ActingFactor::minus), "minus");
}
