#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "orbitflow/catalog.hpp"

namespace of = orbitflow;
using of::operator+;
using of::operator-;
using of::operator*;
using D = of::Vector<double>;

TEST(Catalog, LookupByIdAndFamilyParameter) {
  EXPECT_EQ(of::catalog_entry("example_ii").algebra().dim(), 8u);
  EXPECT_EQ(of::catalog_entry("oscillator(3)").algebra().dim(), 8u);
  EXPECT_EQ(of::catalog_entry("oscillator", 2).label(), "oscillator(2)");
  EXPECT_THROW(of::catalog_entry("oscillator(x)"), of::InvalidInput);
  EXPECT_THROW(of::catalog_entry("nope"), of::InvalidInput);
  EXPECT_THROW(of::oscillator(0), of::InvalidInput);
  EXPECT_EQ(of::catalog_ids().size(), 4u);
}

TEST(Catalog, NamedLookupsFailLoudly) {
  const auto e = of::example_iii();
  EXPECT_THROW(e.metric("missing"), of::InvalidInput);
  EXPECT_THROW(e.invariant("missing"), of::InvalidInput);
  EXPECT_THROW(e.system_spec("missing"), of::InvalidInput);
  EXPECT_TRUE(e.is_invariant("P"));
}

TEST(Catalog, PinnedInitialConditionsLieInPhaseSpace) {
  for (const auto& e : {of::example_i(), of::example_ii(), of::example_iii(), of::oscillator(1), of::oscillator(4)})
    for (const auto& s : e.systems()) EXPECT_TRUE(e.split(s.metric).in_phase_space(s.initial)) << e.label() << s.id;
}

TEST(ClosedForm, RejectsStartsOffThePhaseSpace) {
  const auto e = of::example_iii();
  EXPECT_THROW(of::closed_form(e, "sis22", D{1, 1, 0, 1}, 1.0), of::DomainError);
  EXPECT_THROW(of::closed_form(e, "sis11", D{1, 1, 0, 1}, 1.0), of::DomainError);
  EXPECT_THROW(of::closed_form(e, "sis11", D{1, 1, 0}, 1.0), of::InvalidInput);
}

TEST(ClosedForm, BatchMatchesPointwise) {
  const auto e = of::example_ii();
  const D x0{0, 1, 0, 2, 0.5, -0.5, 1, 1.5};
  const std::vector<double> ts{0.0, 0.25, 1.0};
  const auto batch = of::closed_form(e, "H4", x0, ts);
  for (std::size_t k = 0; k < ts.size(); ++k) EXPECT_EQ(batch[k], of::closed_form(e, "H4", x0, ts[k]));
  EXPECT_EQ(batch.front(), x0);
}

TEST(ClosedForm, Sis11FrequencyIsTheCentralCoordinate) {
  const auto e = of::example_iii();
  const D x0{2, 1, 0, 0};
  const auto traj = of::integrate(e.system("sis11", x0), std::numbers::pi, 1e-3);
  // Half a period at frequency 2 returns the rotating pair to its start.
  EXPECT_LT(of::max_abs(traj.final_state() - x0), 1e-10);
}

TEST(Lax, MatricesAtRestPoint) {
  const auto lax = of::lax_matrices(of::example_iii(), D{0, 0, 0, 1});
  of::Matrix<double> m(3, 3);
  m(0, 1) = -1;
  m(1, 0) = 1;
  EXPECT_EQ(lax.m, m);
  EXPECT_EQ(lax.l, m);
  EXPECT_THROW(of::lax_matrices(of::example_i(), D(5, 0.0)), of::InvalidInput);
}

TEST(Lax, LastColumnCarriesRotatingPairs) {
  const auto lax = of::lax_matrices(of::oscillator(2), D{9, 1, 2, 3, 4, 5});
  EXPECT_EQ(lax.l(0, 4), 1);
  EXPECT_EQ(lax.l(3, 4), 4);
  EXPECT_EQ(lax.l(2, 3), -5);
  EXPECT_EQ(lax.l(4, 4), 0);
}

TEST(Lax, EquationHoldsAlongSis22) {
  const auto e = of::example_iii();
  const auto traj = of::integrate(e.system("sis22"), 2.0 * std::numbers::pi, 1e-3);
  const auto r = of::lax_residual(e, traj);
  EXPECT_LT(r.commutator_residual, 1e-5);
  EXPECT_LT(r.eigenvalue_drift, 1e-8);
}

TEST(Equivalence, Sis11AndSis22AreConjugate) {
  const auto e = of::example_iii();
  const auto r = of::equivalence_check(e, "sis11", "sis22");
  ASSERT_TRUE(r.found);
  EXPECT_LT(r.max_deviation, 1e-6);
  // sis11 rotates (e1,e2) at rate e0; sis22 rotates at rate e3, so e0 <-> e3.
  EXPECT_EQ(r.permutation[0], 3u);
  EXPECT_EQ(r.permutation[3], 0u);
  EXPECT_NE(r.describe(), "NOT-FOUND");
}

TEST(Equivalence, Sis22AndIndefiniteRunInOppositeSenses) {
  const auto e = of::example_iii();
  const auto r = of::equivalence_check(e, "sis22", "indefinite_03");
  ASSERT_TRUE(r.found);
  EXPECT_LT(r.max_deviation, 1e-6);
}

TEST(Lax, ExactDerivativeIsStepIndependent) {
  const auto e = of::oscillator(2);
  const auto sys = e.system("sis23");
  for (double dt : {1e-2, 1e-3}) {
    const auto r = of::lax_residual(e, of::integrate(sys, 1.0, dt), &sys);
    EXPECT_LT(r.field_residual, 1e-12) << dt;
  }
}
