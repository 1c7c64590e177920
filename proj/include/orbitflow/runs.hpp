#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "orbitflow/catalog.hpp"
#include "orbitflow/config.hpp"
#include "orbitflow/error.hpp"
#include "orbitflow/hamiltonian.hpp"
#include "orbitflow/representation.hpp"

namespace orbitflow {

/// Shortest decimal string that reads back to the same double.
inline std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline std::string trajectory_csv(const Trajectory& traj) {
  std::string out = "t";
  const std::size_t n = traj.states.empty() ? 0 : traj.states.front().size();
  for (std::size_t i = 0; i < n; ++i) out += ",x_" + std::to_string(i + 1);
  out += '\n';
  for (std::size_t k = 0; k < traj.size(); ++k) {
    out += format_double(traj.times[k]);
    for (double v : traj.states[k]) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

inline Json trajectory_json(const Trajectory& traj) {
  return Json{{"method", traj.method}, {"dt", traj.dt}, {"times", traj.times}, {"states", traj.states}};
}

/// Seeded rational vector with entries p/q, |p| <= 9, 1 <= q <= 5.
template <class Rng>
Vector<Rational> random_rational_vector(Rng& rng, std::size_t dim) {
  std::uniform_int_distribution<int> num(-9, 9), den(1, 5);
  Vector<Rational> v;
  for (std::size_t i = 0; i < dim; ++i) v.emplace_back(num(rng), den(rng));
  return v;
}

/// Seeded rational combination of a subspace basis.
template <class Rng>
Vector<Rational> random_rational_in(Rng& rng, const Subspace& s) {
  Vector<Rational> v(s.ambient_dim(), Rational(0));
  const auto coeffs = random_rational_vector(rng, s.dim());
  for (std::size_t i = 0; i < s.dim(); ++i) v = v + coeffs[i] * s.basis()[i];
  return v;
}

namespace detail {
inline Json check_item(const std::string& name, bool passed, Json data = Json::object()) {
  Json j{{"name", name}, {"passed", passed}};
  for (auto& [k, v] : data.items()) j[k] = v;
  return j;
}

inline std::string basis_label(std::size_t i) { return "e" + std::to_string(i + 1); }

inline bool wants(const RunConfig& c, const std::string& check) {
  return c.checks.empty() || std::find(c.checks.begin(), c.checks.end(), check) != c.checks.end();
}
}  // namespace detail

// ---------------------------------------------------------------------------
// validate

struct ValidationResult {
  Json report;
  bool passed = false;
};

/// Structural validation: Jacobi identity, metric, split, exact invariance
/// of declared invariants at seeded rational points, initial condition.
inline ValidationResult validate_config(const RunConfig& c, std::size_t exact_points = 20) {
  Json checks = Json::array();
  bool ok = true;
  auto add = [&](Json item) {
    ok = ok && item["passed"].get<bool>();
    checks.push_back(std::move(item));
  };

  std::optional<LieAlgebra> a;
  try {
    a.emplace(build_algebra(c));
    add(detail::check_item("antisymmetry", true, {{"residual", format_rational(antisymmetry_residual(*a))}}));
    const auto d = jacobi_defect(*a);
    Json data{{"residual", format_rational(d.magnitude)}};
    if (d.magnitude != 0)
      data["triple"] = "(" + detail::basis_label(d.triple[0]) + "," + detail::basis_label(d.triple[1]) + "," +
                       detail::basis_label(d.triple[2]) + ")";
    add(detail::check_item("jacobi", d.magnitude == 0, std::move(data)));
  } catch (const Error& e) {
    add(detail::check_item("antisymmetry", false, {{"error", e.what()}}));
  }

  std::optional<BilinearForm> g;
  try {
    g.emplace(build_metric(c));
    Json data{{"determinant", format_rational(determinant(g->gram()))}};
    if (a) data["ad_invariance_residual"] = format_rational(ad_invariance_residual(*a, *g));
    add(detail::check_item("metric", true, std::move(data)));
  } catch (const Error& e) {
    add(detail::check_item("metric", false, {{"error", e.what()}}));
  }

  std::optional<SplitSetting> split;
  if (c.split && a && g) {
    try {
      split.emplace(build_split(*a, *g, c.split->plus, c.split->minus), c.split->acting);
      add(detail::check_item("split", true,
                             {{"plus_perp_dim", split->split().plus_perp().dim()},
                              {"minus_perp_dim", split->split().minus_perp().dim()},
                              {"acting", to_string(c.split->acting)}}));
    } catch (const Error& e) {
      add(detail::check_item("split", false, {{"error", e.what()}}));
    }
  }

  if (a && g && jacobi_residual(*a) == 0) {
    std::mt19937_64 rng(c.seed);
    for (const auto& spec : c.invariants) {
      const auto f = build_field(spec, c.dim);
      Rational worst(0);
      for (std::size_t k = 0; k < exact_points; ++k)
        worst = std::max(worst, tau_invariance_residual(*a, *g, f, random_rational_vector(rng, c.dim)));
      add(detail::check_item("invariance:" + spec.name, worst == 0,
                             {{"points", exact_points}, {"residual", format_rational(worst)}}));
    }
  }

  if (split) {
    const bool inside = split->in_phase_space(c.initial);
    add(detail::check_item("initial_in_phase_space", inside));
  }

  Json report{{"algebra", c.algebra_name}, {"passed", ok}, {"checks", std::move(checks)}};
  return {std::move(report), ok};
}

// ---------------------------------------------------------------------------
// simulate

struct SimulationResult {
  Trajectory trajectory;
  std::string csv;
  Json summary;
  bool diverged = false;
};

inline std::optional<CatalogEntry> catalog_for(const RunConfig& c) {
  if (!c.catalog) return std::nullopt;
  return catalog_entry(c.catalog->entry, c.catalog->n);
}

inline SimulationResult simulate(const RunConfig& c, std::optional<double> duration = std::nullopt,
                                 std::optional<double> dt = std::nullopt) {
  const auto model = build_model(c);
  const auto sys = build_system(c, model);
  const double horizon = duration.value_or(c.duration);
  auto outcome = integrate_partial(sys, horizon, dt.value_or(c.dt));
  SimulationResult r;
  r.trajectory = std::move(outcome.trajectory);
  r.diverged = outcome.diverged_after.has_value();
  r.csv = trajectory_csv(r.trajectory);

  std::vector<ScalarField> tracked = model.invariants;
  if (!model.hamiltonian_invariant) tracked.push_back(model.hamiltonian);
  Json drifts = Json::object();
  for (const auto& d : conservation_report(r.trajectory, tracked)) drifts[d.field] = d.drift;

  double tangency = 0.0;
  if (!r.diverged)
    for (const auto& x : r.trajectory.states) tangency = std::max(tangency, tangency_residual(sys, x));

  Json s{{"system", sys.id},
         {"method", r.trajectory.method},
         {"T", horizon},
         {"dt", r.trajectory.dt},
         {"steps", r.trajectory.size() - 1},
         {"sign", sys.sign},
         {"final_state", r.trajectory.final_state()},
         {"drifts", std::move(drifts)},
         {"max_tangency_residual", tangency},
         {"diverged", r.diverged}};
  if (r.diverged) s["last_valid_index"] = *outcome.diverged_after;
  if (const auto entry = catalog_for(c); entry && !r.diverged) {
    const auto exact = closed_form(*entry, c.catalog->system, c.initial, r.trajectory.times);
    double dev = 0.0;
    for (std::size_t k = 0; k < r.trajectory.size(); ++k)
      dev = std::max(dev, max_abs(exact[k] - r.trajectory.states[k]));
    s["closed_form_deviation"] = dev;
  }
  r.summary = std::move(s);
  return r;
}

// ---------------------------------------------------------------------------
// check

struct Tolerances {
  double invariance = 1e-10;
  double involution = 1e-10;
  double identity = 1e-10;
  double drift = 1e-8;
  double reversal = 1e-8;
  double closed_form = 1e-6;
  double lax_residual = 1e-10;  // exact L' along the field, relative to max(1, |L|)
  double lax_eigen = 1e-8;
  double tangency = 1e-9;
};

struct CheckResult {
  Json report;
  bool passed = false;
};

/// Numerical checks of a configured system: invariance, involution, orbit
/// dimensions, level-set probe, conservation, time reversal, and the
/// catalog oracles when the config references a catalog system.
inline CheckResult check_config(const RunConfig& c, const Tolerances& tol = {}, std::size_t points = 100) {
  const auto model = build_model(c);
  const auto sys = build_system(c, model);
  const SplitSetting* split = sys.split_setting();
  const std::size_t n = c.dim;
  const auto phase_points = sample_phase_points(n, split, points, c.seed);
  Json checks = Json::array();
  bool ok = true;
  auto add = [&](Json item) {
    ok = ok && item["passed"].get<bool>();
    checks.push_back(std::move(item));
  };

  if (detail::wants(c, "invariance")) {
    std::mt19937_64 rng(c.seed);
    std::uniform_real_distribution<double> coord(-2.0, 2.0);
    std::vector<Vector<double>> pts(points, Vector<double>(n));
    for (auto& p : pts)
      for (auto& x : p) x = coord(rng);
    for (const auto& f : model.invariants) {
      double worst = 0.0;
      for (const auto& u : pts) worst = std::max(worst, tau_invariance_residual(model.algebra, model.metric, f, u));
      add(detail::check_item("invariance:" + f.name(), worst < tol.invariance, {{"max_residual", worst}}));
    }
  }

  if (detail::wants(c, "involution")) {
    const auto m = involution_matrix(model.algebra, model.metric, split, model.invariants, phase_points);
    Json names = Json::array(), rows = Json::array();
    for (const auto& f : model.invariants) names.push_back(f.name());
    for (std::size_t i = 0; i < m.rows(); ++i) rows.push_back(m.row(i));
    const double worst = m.rows() ? m.max_abs() : 0.0;
    add(detail::check_item("involution", worst < tol.involution,
                           {{"fields", std::move(names)}, {"matrix", std::move(rows)}, {"max", worst}}));
  }

  if (detail::wants(c, "orbit")) {
    const auto here = orbit_tangent(model.algebra, model.metric, sys.initial, split);
    bool even = true;
    for (const auto& u : phase_points) even = even && orbit_tangent(model.algebra, model.metric, u, split).dim % 2 == 0;
    add(detail::check_item("orbit", even && here.dim % 2 == 0,
                           {{"dimension_at_initial", here.dim}, {"even_at_samples", even}}));
  }

  if (split && sys.invariant) {
    double identity = 0.0, closure = 0.0;
    for (const auto& u : phase_points) {
      const auto grad = gradient(model.metric, model.hamiltonian, u);
      const auto act = ad_transpose(model.algebra, model.metric, split->acting_component(grad), u);
      const auto comp = ad_transpose(model.algebra, model.metric, split->complement_component(grad), u);
      identity = std::max(identity, norm(act + comp));
      closure = std::max(closure, norm(comp - split->project_phase(comp)));
    }
    add(detail::check_item("split_identity", identity < tol.identity && closure < tol.identity,
                           {{"max_identity_residual", identity}, {"max_phase_closure_residual", closure}}));
  }

  if (detail::wants(c, "level_set")) {
    std::vector<ScalarField> fields = model.invariants;
    if (!model.hamiltonian_invariant) fields.push_back(model.hamiltonian);
    std::vector<double> values;
    for (const auto& f : fields) values.push_back(f(sys.initial));
    const auto v = level_set_probe(sys, fields, values, default_probe_radii(), c.seed);
    Json witness = Json::array();
    for (const auto& w : v.witness) witness.push_back(w);
    Json data{{"verdict", to_string(v.verdict)}, {"heuristic", true},
              {"max_norm", v.max_norm},          {"max_level_residual", v.max_level_residual},
              {"witness", std::move(witness)},   {"note", v.note}};
    bool passed = true;
    if (const auto entry = catalog_for(c)) {
      const auto expected = entry->system_spec(c.catalog->system).level_set;
      data["expected"] = to_string(expected);
      passed = v.verdict == expected;
    }
    add(detail::check_item("level_set", passed, std::move(data)));
  }

  const bool integrate_needed =
      detail::wants(c, "conservation") || detail::wants(c, "closed_form") || detail::wants(c, "lax");
  if (integrate_needed && c.duration > 0.0) {
    const auto traj = integrate(sys, c.duration, c.dt);
    if (detail::wants(c, "conservation")) {
      std::vector<ScalarField> tracked = model.invariants;
      if (!model.hamiltonian_invariant) tracked.push_back(model.hamiltonian);
      Json drifts = Json::object();
      double worst = 0.0;
      for (const auto& d : conservation_report(traj, tracked)) {
        drifts[d.field] = d.drift;
        worst = std::max(worst, d.drift);
      }
      add(detail::check_item("conservation", worst < tol.drift, {{"drifts", std::move(drifts)}, {"max", worst}}));

      HamiltonianSystem back = sys;
      back.sign = -sys.sign;
      back.initial = traj.final_state();
      const auto rev = integrate(back, c.duration, c.dt);
      double dev = 0.0;
      for (std::size_t k = 0; k < traj.size(); ++k)
        dev = std::max(dev, norm(rev.states[k] - traj.states[traj.size() - 1 - k]));
      add(detail::check_item("time_reversal", dev < tol.reversal, {{"max_deviation", dev}}));

      double tangency = 0.0;
      for (const auto& x : traj.states) tangency = std::max(tangency, tangency_residual(sys, x));
      add(detail::check_item("tangency", tangency < tol.tangency, {{"max_residual", tangency}}));
    }
    if (const auto entry = catalog_for(c)) {
      if (detail::wants(c, "closed_form")) {
        const auto exact = closed_form(*entry, c.catalog->system, sys.initial, traj.times);
        double dev = 0.0;
        for (std::size_t k = 0; k < traj.size(); ++k) dev = std::max(dev, max_abs(exact[k] - traj.states[k]));
        add(detail::check_item("closed_form", dev < tol.closed_form, {{"max_deviation", dev}}));
      }
      if (detail::wants(c, "lax") && entry->has_lax_pair()) {
        const auto lax = lax_residual(*entry, traj, &sys);
        double scale = 1.0;
        for (const auto& x : traj.states) scale = std::max(scale, lax_matrices(*entry, x).l.max_abs());
        add(detail::check_item("lax",
                               lax.field_residual < tol.lax_residual * scale && lax.eigenvalue_drift < tol.lax_eigen,
                               {{"field_residual", lax.field_residual},
                                {"finite_difference_residual", lax.commutator_residual},
                                {"eigenvalue_drift", lax.eigenvalue_drift}}));
      }
    }
  }

  Json report{{"system", sys.id},
              {"seed", c.seed},
              {"mode", split ? "split" : "full"},
              {"passed", ok},
              {"checks", std::move(checks)}};
  if (split && sys.invariant && c.duration > 0.0) {
    const auto f = factorization_check(sys, c.duration, c.dt);
    report["factorization"] = Json{{"max_deviation", f.max_deviation},
                                   {"stationarity_residual", f.stationarity_residual},
                                   {"agrees", f.agrees},
                                   {"asserted", false}};
  }
  return {std::move(report), ok};
}

}  // namespace orbitflow
