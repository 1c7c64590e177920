#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "orbitflow/catalog.hpp"
#include "orbitflow/hamiltonian.hpp"

namespace of = orbitflow;
using of::operator+;
using of::operator-;
using of::operator*;
using of::Rational;
using D = of::Vector<double>;

namespace {

double dist(const D& a, const D& b) { return of::max_abs(a - b); }

// [e1,e2] = e2 with the orthonormal metric; H = x1 x2 is not invariant and
// gives x1' = -x1 x2, x2' = x2^2, which blows up at t = 1 from (0, 1).
of::HamiltonianSystem blowup_system() {
  of::LieAlgebra a("affine", 2, {{0, 1, 1, Rational(1)}});
  of::Polynomial h(2);
  h.add_term(1, {1, 1});
  return of::HamiltonianSystem("blowup", a, of::BilinearForm::orthonormal(2), std::nullopt,
                               of::ScalarField::from_polynomial("x1x2", h), D{0, 1}, 1, false);
}

}  // namespace

TEST(VectorField, ExampleIClosedFormAtTwo) {
  const auto ex = of::example_i();
  const auto traj = of::integrate(ex.system("H3"), 2.0, 1e-3);
  EXPECT_LT(dist(traj.final_state(), D{4.0 / 3.0, 2, 2, 1, 0}), 1e-10);
  EXPECT_LT(dist(of::closed_form(ex, "H3", D{0, 0, 0, 1, 0}, 2.0), D{4.0 / 3.0, 2, 2, 1, 0}), 1e-15);
}

TEST(VectorField, Sis22IsARotation) {
  const auto ex = of::example_iii();
  const auto sys = ex.system("sis22", D{0, 1, 0, 1});
  const auto traj = of::integrate(sys, 1.0, 1e-3);
  for (std::size_t k = 0; k < traj.size(); k += 100) {
    const double t = traj.times[k];
    EXPECT_LT(dist(traj.states[k], D{0, std::cos(t), std::sin(t), 1}), 1e-12) << t;
  }
}

TEST(VectorField, RejectsPointsOutsidePhaseSpace) {
  const auto ex = of::example_i();
  const auto sys = ex.system("H3");
  EXPECT_THROW(of::vector_field(sys, D{0, 0, 0, 1, 1}), of::DomainError);
  EXPECT_THROW(ex.system("H3", D{0, 0, 0, 1, 1}), of::DomainError);
}

TEST(VectorField, CrossCheckCatchesNonInvariantHamiltonians) {
  const auto ex = of::example_i();
  const auto split = ex.split("orthonormal");
  const auto x3 = of::ScalarField::from_polynomial("x3", of::Polynomial::variable(5, 2));
  const of::HamiltonianSystem flagged("x3", ex.algebra(), ex.metric("orthonormal"), split, x3, D{1, 1, 1, 1, 0}, 1,
                                      true);
  EXPECT_THROW(of::vector_field(flagged, flagged.initial), of::InternalError);
  const of::HamiltonianSystem plain("x3", ex.algebra(), ex.metric("orthonormal"), split, x3, D{1, 1, 1, 1, 0}, 1,
                                    false);
  EXPECT_NO_THROW(of::vector_field(plain, plain.initial));
}

TEST(VectorField, SignReversesTime) {
  const auto ex = of::example_ii();
  auto sys = ex.system("H4");
  const auto forward = of::vector_field(sys, sys.initial);
  sys.sign = -sys.sign;
  EXPECT_EQ(of::vector_field(sys, sys.initial), -forward);
}

TEST(VectorField, TangentToOrbits) {
  for (const auto& ex : {of::example_i(), of::example_ii(), of::example_iii()})
    for (const auto& spec : ex.systems()) {
      const auto sys = ex.system(spec.id);
      for (const auto& u : of::sample_phase_points(sys.dim(), sys.split_setting(), 10, 3))
        EXPECT_LT(of::tangency_residual(sys, u), 1e-9) << ex.label() << "/" << spec.id;
    }
}

TEST(Rk4, UniformGridEndsAtT) {
  const auto ex = of::example_iii();
  const auto traj = of::integrate(ex.system("sis22"), 1.0, 0.3);
  EXPECT_EQ(traj.size(), 4u);
  EXPECT_DOUBLE_EQ(traj.times.back(), 1.0);
  EXPECT_DOUBLE_EQ(traj.dt, 1.0 / 3.0);
  EXPECT_THROW(of::integrate(ex.system("sis22"), 1.0, 0.0), of::InvalidInput);
  EXPECT_THROW(of::integrate(ex.system("sis22"), -1.0, 0.1), of::InvalidInput);
}

TEST(Rk4, DivergenceKeepsValidPrefix) {
  const auto sys = blowup_system();
  const auto outcome = of::integrate_partial(sys, 2.0, 1e-3);
  ASSERT_TRUE(outcome.diverged_after.has_value());
  EXPECT_EQ(outcome.trajectory.size(), *outcome.diverged_after + 1);
  EXPECT_LT(outcome.trajectory.times.back(), 1.0 + 1e-2);
  EXPECT_THROW(of::integrate(sys, 2.0, 1e-3), of::DivergenceError);
}

TEST(Rk4, FourthOrderOnSis22) {
  const auto ex = of::example_iii();
  const auto sys = ex.system("sis22");
  const double T = 2.0 * std::numbers::pi;
  auto err = [&](double dt) { return dist(of::integrate(sys, T, dt).final_state(), sys.initial); };
  const double ratio = err(T / 32) / err(T / 64);
  EXPECT_GT(ratio, std::pow(2.0, 3.8));
  EXPECT_LT(ratio, std::pow(2.0, 4.3));
}

TEST(Flows, LinearFlowSolvesCoadjointEquation) {
  const auto ex = of::example_ii();
  const auto& a = ex.algebra();
  const auto& g = ex.metric("standard");
  const D q{1, 0, 2, -1, 0, 1, 0, 1}, p{1, 1, 0, 1, 2, -1, 1, 1};
  const double t = 0.8, h = 1e-5;
  const auto x = of::linear_flow(a, g, q, p, t);
  const auto deriv = (1.0 / (2 * h)) * (of::linear_flow(a, g, q, p, t + h) - of::linear_flow(a, g, q, p, t - h));
  EXPECT_LT(dist(deriv, of::ad_transpose(a, g, q, x)), 1e-7);
  EXPECT_LT(dist(of::linear_flow(a, g, q, p, 0.0), p), 1e-15);
}

TEST(Flows, ReconstructionMatchesLinearFlow) {
  const auto ex = of::example_iii();
  const auto& a = ex.algebra();
  const auto& g = ex.metric("orthonormal");
  const D p{0.3, -1, 2, 0.5}, u0{1, 2, -1, 0.25};
  for (int sign : {1, -1}) {
    const auto u = of::reconstruct_flow(a, g, p, u0, 1.3, sign);
    const auto expected = of::linear_flow(a, g, D(static_cast<double>(sign) * p), u0, 1.3);
    EXPECT_LT(dist(u, expected), 1e-10) << sign;
  }
}

TEST(Flows, StationaryCurveIsConstantForInvariants) {
  const auto ex = of::example_i();
  const D u0{1, -2, 0.5, 1.5, 3};
  for (const auto& f : ex.invariants())
    for (double t : {0.5, 2.0})
      EXPECT_LT(dist(of::stationary_curve(ex.algebra(), ex.metric("orthonormal"), f, u0, t), u0), 1e-12) << f.name();
}

TEST(Conservation, InvariantsStayConstantAlongFlows) {
  for (const auto& ex : {of::example_i(), of::example_ii(), of::example_iii()})
    for (const auto& spec : ex.systems()) {
      const auto traj = of::integrate(ex.system(spec.id), 1.0, 1e-2);
      for (const auto& d : of::conservation_report(traj, ex.invariants()))
        EXPECT_LT(d.drift, 1e-9) << ex.label() << "/" << spec.id << " " << d.field;
    }
}

TEST(Involution, CatalogInvariantsCommute) {
  for (const auto& ex : {of::example_i(), of::example_ii(), of::example_iii()})
    for (const auto& g : ex.metrics()) {
      const auto s = ex.split(g.name());
      const auto pts = of::sample_phase_points(ex.algebra().dim(), &s, 20, 1);
      const auto m = of::involution_matrix(ex.algebra(), g, &s, ex.invariants(), pts);
      EXPECT_LT(m.max_abs(), 1e-10) << ex.label();
    }
}

TEST(LevelSets, VerdictsMatchCatalogExpectations) {
  const auto e1 = of::example_i();
  const auto h3 = e1.system("H3");
  const auto v1 = of::level_set_probe(h3, {h3.hamiltonian}, {h3.hamiltonian(h3.initial)});
  EXPECT_EQ(v1.verdict, of::Boundedness::unbounded) << v1.note;
  ASSERT_GE(v1.witness.size(), 2u);
  for (std::size_t k = 1; k < v1.witness.size(); ++k) EXPECT_GT(of::norm(v1.witness[k]), of::norm(v1.witness[k - 1]));

  const auto e3 = of::example_iii();
  const auto s = e3.system("sis22");
  const auto v3 = of::level_set_probe(s, {s.hamiltonian}, {s.hamiltonian(s.initial)});
  EXPECT_EQ(v3.verdict, of::Boundedness::bounded) << v3.note;
  EXPECT_LT(v3.max_norm, 2.0);
  EXPECT_STREQ(of::to_string(of::Boundedness::inconclusive), "INCONCLUSIVE");
}

TEST(Factorization, ReportedForBothBehaviours) {
  const auto e3 = of::example_iii();
  const auto r3 = of::factorization_check(e3.system("sis22"), 1.0, 1e-3);
  EXPECT_LT(r3.stationarity_residual, 1e-10);
  EXPECT_TRUE(r3.agrees);
  const auto e2 = of::example_ii();
  const auto r2 = of::factorization_check(e2.system("H4"), 1.0, 1e-3);
  EXPECT_LT(r2.stationarity_residual, 1e-10);
  EXPECT_GT(r2.max_deviation, 0.1);
  EXPECT_FALSE(r2.agrees);
}
