#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "orbitflow/algebra.hpp"
#include "orbitflow/error.hpp"
#include "orbitflow/linalg.hpp"
#include "orbitflow/metric.hpp"
#include "orbitflow/polynomial.hpp"
#include "orbitflow/representation.hpp"
#include "orbitflow/splitting.hpp"

namespace orbitflow {

enum class OrbitMode { full, split };

/// Relative tolerance of the runtime cross-check between the two forms of
/// the split Hamiltonian field for invariant Hamiltonians.
inline constexpr double kCrossCheckTolerance = 1e-8;

/// A Hamiltonian on an orbit of the transadjoint action.
///
/// Full mode: X_H(U) = sign * ad^t_{grad f(U)} U.
/// Split mode: X_H(U) = sign * pi_phase(ad^t_{grad f_a(U)} U), where f_a is
/// the component of the gradient in the acting factor. sign = +1 is the
/// Hamiltonian field for the orbit symplectic form; -1 is the reversed flow.
struct HamiltonianSystem {
  std::string id;
  LieAlgebra algebra;
  BilinearForm metric;
  std::optional<SplitSetting> split;
  ScalarField hamiltonian;
  Vector<double> initial;
  int sign = 1;
  bool invariant = false;  // hamiltonian flagged tau-invariant

  HamiltonianSystem(std::string id_, LieAlgebra a, BilinearForm g, std::optional<SplitSetting> s, ScalarField h,
                    Vector<double> u0, int sign_ = 1, bool invariant_ = false)
      : id(std::move(id_)),
        algebra(std::move(a)),
        metric(std::move(g)),
        split(std::move(s)),
        hamiltonian(std::move(h)),
        initial(std::move(u0)),
        sign(sign_),
        invariant(invariant_) {
    require_same_size(metric.dim(), algebra.dim(), "HamiltonianSystem metric");
    require_same_size(hamiltonian.dim(), algebra.dim(), "HamiltonianSystem hamiltonian");
    require_same_size(initial.size(), algebra.dim(), "HamiltonianSystem initial condition");
    if (sign != 1 && sign != -1) throw InvalidInput("sign must be +1 or -1");
    if (split && !split->in_phase_space(initial))
      throw DomainError("initial condition of '" + id + "' is not in the phase space");
  }

  OrbitMode mode() const noexcept { return split ? OrbitMode::split : OrbitMode::full; }
  std::size_t dim() const noexcept { return algebra.dim(); }
  const SplitSetting* split_setting() const noexcept { return split ? &*split : nullptr; }
};

inline Vector<double> vector_field(const HamiltonianSystem& sys, const Vector<double>& u) {
  require_same_size(u.size(), sys.dim(), "vector_field");
  const auto grad = gradient(sys.metric, sys.hamiltonian, u);
  const double s = sys.sign;
  if (!sys.split) return s * ad_transpose(sys.algebra, sys.metric, grad, u);

  const auto& setting = *sys.split;
  if (!setting.in_phase_space(u)) throw DomainError("vector_field: point left the phase space");
  auto field = s * setting.project_phase(ad_transpose(sys.algebra, sys.metric, setting.acting_component(grad), u));
  if (sys.invariant) {
    const auto other = (-s) * ad_transpose(sys.algebra, sys.metric, setting.complement_component(grad), u);
    const double gap = norm(field - other);
    if (gap > kCrossCheckTolerance * std::max(1.0, norm(field)))
      throw InternalError("vector_field: invariant Hamiltonian '" + sys.hamiltonian.name() +
                          "' gives disagreeing split fields (gap " + std::to_string(gap) + ")");
  }
  return field;
}

/// Relative distance of the Hamiltonian field from the orbit tangent space.
inline double tangency_residual(const HamiltonianSystem& sys, const Vector<double>& u) {
  const auto field = vector_field(sys, u);
  const double scale = norm(field);
  if (scale == 0.0) return 0.0;
  const auto tangent = orbit_tangent(sys.algebra, sys.metric, u, sys.split_setting()).tangent_basis;
  const auto coeffs = least_squares(tangent, field);
  const auto fitted = coeffs.empty() ? zeros<double>(u.size()) : tangent * coeffs;
  return norm(fitted - field) / scale;
}

struct Trajectory {
  std::vector<double> times;
  std::vector<Vector<double>> states;
  double dt = 0.0;
  std::string method = "rk4";

  std::size_t size() const noexcept { return states.size(); }
  const Vector<double>& final_state() const { return states.back(); }
};

/// Trajectory up to the first non-finite state, if any.
struct IntegrationOutcome {
  Trajectory trajectory;
  std::optional<std::size_t> diverged_after;  // last valid index
};

namespace detail {
inline bool all_finite(const Vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}
}  // namespace detail

/// Classical fixed-step RK4. The step is adjusted to T / round(T / dt) so the
/// grid is uniform and ends exactly at T.
template <class Field>
IntegrationOutcome rk4(const Field& field, const Vector<double>& u0, double duration, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidInput("integrate: dt must be positive");
  if (!(duration >= 0.0) || !std::isfinite(duration)) throw InvalidInput("integrate: T must be non-negative");
  IntegrationOutcome out;
  auto& traj = out.trajectory;
  const auto steps = static_cast<std::size_t>(std::llround(duration / dt));
  const double h = steps > 0 ? duration / static_cast<double>(steps) : dt;
  traj.dt = h;
  traj.times.reserve(steps + 1);
  traj.states.reserve(steps + 1);
  traj.times.push_back(0.0);
  traj.states.push_back(u0);
  if (!detail::all_finite(u0)) {
    out.diverged_after = 0;
    return out;
  }
  Vector<double> u = u0;
  for (std::size_t n = 0; n < steps; ++n) {
    try {
      const auto k1 = field(u);
      const auto k2 = field(u + (0.5 * h) * k1);
      const auto k3 = field(u + (0.5 * h) * k2);
      const auto k4 = field(u + h * k3);
      for (std::size_t i = 0; i < u.size(); ++i) u[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    } catch (const EvaluationError&) {
      out.diverged_after = n;
      return out;
    }
    if (!detail::all_finite(u)) {
      out.diverged_after = n;
      return out;
    }
    traj.times.push_back(static_cast<double>(n + 1) * h);
    traj.states.push_back(u);
  }
  return out;
}

inline IntegrationOutcome integrate_partial(const HamiltonianSystem& sys, double duration, double dt) {
  return rk4([&sys](const Vector<double>& u) { return vector_field(sys, u); }, sys.initial, duration, dt);
}

inline Trajectory integrate(const HamiltonianSystem& sys, double duration, double dt) {
  auto outcome = integrate_partial(sys, duration, dt);
  if (outcome.diverged_after)
    throw DivergenceError("integration of '" + sys.id + "' produced a non-finite state", *outcome.diverged_after);
  return std::move(outcome.trajectory);
}

/// Solution of x' = ad^t_Q x, x(0) = P, i.e. the flow of f(V) = <Q, V>:
/// x(t) = tau(exp(-tQ)) P.
template <class T>
Vector<T> linear_flow(const LieAlgebra& a, const BilinearForm& g, const Vector<T>& q, const Vector<T>& p, const T& t) {
  return tau_exp(a, g, (-t) * q) * p;
}

/// u(t) = tau(g(t)^{-1}) u0 with g(t) = exp(sign * t * P), the curve whose
/// left logarithmic derivative is the constant generator sign * P. Solves
/// u' = sign * ad^t_P u.
template <class T>
Vector<T> reconstruct_flow(const LieAlgebra& a, const BilinearForm& g, const Vector<T>& p, const Vector<T>& u0,
                           const T& t, int sign = 1) {
  const T s = sign > 0 ? t : T(-t);
  return inverse(tau_exp(a, g, s * p)) * u0;
}

/// tau(exp(t grad f(U0))) U0, constant in t for invariant f.
template <class T>
Vector<T> stationary_curve(const LieAlgebra& a, const BilinearForm& g, const ScalarField& f, const Vector<T>& u0,
                           const T& t) {
  return tau_exp(a, g, t * gradient(g, f, u0)) * u0;
}

/// The factorization candidate tau(exp(t grad f_c(U0))) U0, where f_c is the
/// gradient component in the non-acting factor, evaluated as written.
inline Vector<double> factorization_solution(const HamiltonianSystem& sys, double t) {
  if (!sys.split) throw InvalidInput("factorization_solution requires a split system");
  const auto grad = gradient(sys.metric, sys.hamiltonian, sys.initial);
  const auto generator = sys.split->complement_component(grad);
  return tau_exp(sys.algebra, sys.metric, t * generator) * sys.initial;
}

struct FactorizationReport {
  double max_deviation = 0.0;  // vs RK4 of the sign +1 field
  double stationarity_residual = 0.0;
  bool agrees = false;  // max_deviation < tolerance
};

inline FactorizationReport factorization_check(const HamiltonianSystem& sys, double duration, double dt,
                                               double tolerance = 1e-6) {
  HamiltonianSystem forward = sys;
  forward.sign = 1;
  const auto traj = integrate(forward, duration, dt);
  FactorizationReport r;
  for (std::size_t n = 0; n < traj.size(); ++n) {
    r.max_deviation = std::max(r.max_deviation, norm(factorization_solution(sys, traj.times[n]) - traj.states[n]));
    r.stationarity_residual = std::max(
        r.stationarity_residual,
        norm(stationary_curve(sys.algebra, sys.metric, sys.hamiltonian, sys.initial, traj.times[n]) - sys.initial));
  }
  r.agrees = r.max_deviation < tolerance;
  return r;
}

struct Drift {
  std::string field;
  double drift = 0.0;
};

/// max_t |f(x(t)) - f(x(0))| for each field.
inline std::vector<Drift> conservation_report(const Trajectory& traj, const std::vector<ScalarField>& fields) {
  std::vector<Drift> out;
  for (const auto& f : fields) {
    Drift d{f.name(), 0.0};
    if (!traj.states.empty()) {
      const double f0 = f(traj.states.front());
      for (const auto& x : traj.states) d.drift = std::max(d.drift, std::fabs(f(x) - f0));
    }
    out.push_back(std::move(d));
  }
  return out;
}

/// Symmetric matrix of max |{f_i, f_j}| over the sample points.
inline Matrix<double> involution_matrix(const LieAlgebra& a, const BilinearForm& g, const SplitSetting* split,
                                        const std::vector<ScalarField>& fields,
                                        const std::vector<Vector<double>>& points) {
  const std::size_t k = fields.size();
  Matrix<double> m(k, k);
  for (const auto& u : points) {
    std::vector<Vector<double>> grads;
    for (const auto& f : fields) {
      auto gr = gradient(g, f, u);
      grads.push_back(split ? split->acting_component(gr) : gr);
    }
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = i + 1; j < k; ++j) {
        const double v = std::fabs(symplectic_form(a, g, u, grads[i], grads[j]));
        m(i, j) = std::max(m(i, j), v);
        m(j, i) = m(i, j);
      }
  }
  return m;
}

/// Seeded random points of the phase space (the whole algebra in full mode),
/// coordinates uniform in [-scale, scale].
inline std::vector<Vector<double>> sample_phase_points(std::size_t dim, const SplitSetting* split, std::size_t count,
                                                       std::uint64_t seed, double scale = 2.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-scale, scale);
  std::vector<Vector<double>> basis;
  if (split)
    for (const auto& b : split->phase_space().basis()) basis.push_back(convert<double>(b));
  else
    for (std::size_t i = 0; i < dim; ++i) basis.push_back(unit_vector<double>(dim, i));
  std::vector<Vector<double>> pts;
  for (std::size_t n = 0; n < count; ++n) {
    Vector<double> u(dim, 0.0);
    for (const auto& b : basis) u = u + coord(rng) * b;
    pts.push_back(std::move(u));
  }
  return pts;
}

// ---------------------------------------------------------------------------
// Level-set probing

enum class Boundedness { bounded, unbounded, inconclusive };

inline const char* to_string(Boundedness b) {
  switch (b) {
    case Boundedness::bounded:
      return "BOUNDED";
    case Boundedness::unbounded:
      return "UNBOUNDED";
    case Boundedness::inconclusive:
      return "INCONCLUSIVE";
  }
  return "INCONCLUSIVE";
}

/// Heuristic verdict on compactness of a joint level set inside an orbit.
struct LevelSetVerdict {
  Boundedness verdict = Boundedness::inconclusive;
  std::vector<Vector<double>> witness;  // level-set points, increasing norm
  double max_norm = 0.0;
  double max_level_residual = 0.0;
  std::string note;
};

inline const std::vector<double>& default_probe_radii() {
  static const std::vector<double> radii{1.0, 10.0, 100.0, 1000.0};
  return radii;
}

namespace detail {

/// Moves within one orbit: x -> pi(tau(exp(sum alpha_j b_j)) x).
class OrbitWalker {
 public:
  OrbitWalker(const HamiltonianSystem& sys, const std::vector<ScalarField>& fields, std::vector<double> values)
      : sys_(sys), fields_(fields), values_(std::move(values)) {
    if (sys.split)
      for (const auto& b : sys.split->acting_algebra().basis()) generators_.push_back(convert<double>(b));
    else
      for (std::size_t i = 0; i < sys.dim(); ++i) generators_.push_back(unit_vector<double>(sys.dim(), i));
  }

  std::size_t generator_count() const noexcept { return generators_.size(); }

  Vector<double> act(const Vector<double>& alpha, const Vector<double>& x) const {
    Vector<double> y(sys_.dim(), 0.0);
    for (std::size_t j = 0; j < generators_.size(); ++j) y = y + alpha[j] * generators_[j];
    auto moved = tau_exp(sys_.algebra, sys_.metric, y) * x;
    return sys_.split ? sys_.split->project_phase(moved) : moved;
  }

  Matrix<double> tangent(const Vector<double>& x) const {
    std::vector<Vector<double>> cols;
    for (const auto& b : generators_) {
      auto v = -ad_transpose(sys_.algebra, sys_.metric, b, x);
      cols.push_back(sys_.split ? sys_.split->project_phase(v) : v);
    }
    return Matrix<double>::from_columns(sys_.dim(), cols);
  }

  /// Jacobian of the level map with respect to the group coordinates.
  Matrix<double> level_jacobian(const Vector<double>& x, const Matrix<double>& tangent) const {
    Matrix<double> j(fields_.size(), tangent.cols());
    for (std::size_t i = 0; i < fields_.size(); ++i) {
      const auto df = fields_[i].differential(x);
      for (std::size_t c = 0; c < tangent.cols(); ++c) j(i, c) = df(tangent.column(c));
    }
    return j;
  }

  Vector<double> residual(const Vector<double>& x) const {
    Vector<double> r(fields_.size());
    for (std::size_t i = 0; i < fields_.size(); ++i) r[i] = fields_[i](x) - values_[i];
    return r;
  }

  double tolerance(const Vector<double>& x) const {
    double scale = 1.0;
    for (std::size_t i = 0; i < fields_.size(); ++i) {
      scale = std::max(scale, std::fabs(values_[i]));
      scale = std::max(scale, norm(fields_[i].differential(x).coords) * norm(x));
    }
    return 1e-9 * scale;
  }

  /// Newton iteration along the orbit onto the level set.
  std::optional<Vector<double>> correct(Vector<double> x) const {
    for (int it = 0; it < 60; ++it) {
      const auto r = residual(x);
      if (max_abs(r) <= tolerance(x)) return x;
      const auto t = tangent(x);
      const auto j = level_jacobian(x, t);
      const auto step = -1.0 * (pseudo_inverse(j) * r);
      double damping = 1.0;
      bool improved = false;
      for (int k = 0; k < 30 && !improved; ++k, damping *= 0.5) {
        auto y = act(damping * step, x);
        if (detail::all_finite(y) && max_abs(residual(y)) < max_abs(r)) {
          x = std::move(y);
          improved = true;
        }
      }
      if (!improved) return std::nullopt;
    }
    if (max_abs(residual(x)) <= tolerance(x)) return x;
    return std::nullopt;
  }

  /// Direction in group coordinates that increases |x|^2 while staying
  /// tangent to the level set; empty when no such direction exists.
  std::optional<Vector<double>> outward(const Vector<double>& x) const {
    const auto t = tangent(x);
    const auto j = level_jacobian(x, t);
    auto d = t.transpose() * x;
    if (j.rows() > 0) {
      const auto jp = pseudo_inverse(j);
      d = d - jp * (j * d);
    }
    const auto moved = t * d;
    const double tscale = std::max(t.max_abs(), 1e-300);
    if (norm(moved) <= kRankTolerance * tscale * std::max(1.0, norm(x)) * std::max(1.0, norm(x))) return std::nullopt;
    return (1.0 / norm(moved)) * d;
  }

 private:
  const HamiltonianSystem& sys_;
  const std::vector<ScalarField>& fields_;
  std::vector<double> values_;
  std::vector<Vector<double>> generators_;
};

}  // namespace detail

/// Searches the joint level set {f_i = c_i} inside the orbit of sys.initial
/// for points of growing norm, pushing outward along the level set through
/// the group action. Radii default to {1, 10, 100, 1000}. The verdict is a
/// numerical heuristic, not a proof.
inline LevelSetVerdict level_set_probe(const HamiltonianSystem& sys, const std::vector<ScalarField>& fields,
                                       const std::vector<double>& values,
                                       const std::vector<double>& radii = default_probe_radii(), std::uint64_t seed = 7,
                                       std::size_t restarts = 4) {
  if (fields.size() != values.size()) throw InvalidInput("level_set_probe: one value per field required");
  if (radii.empty()) throw InvalidInput("level_set_probe: empty radius schedule");
  LevelSetVerdict result;
  detail::OrbitWalker walker(sys, fields, values);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  auto record = [&](const Vector<double>& x) {
    result.max_norm = std::max(result.max_norm, norm(x));
    result.max_level_residual = std::max(result.max_level_residual, max_abs(walker.residual(x)));
  };

  bool any_start = false;
  bool all_stalled = true;
  double stalled_max = 0.0;
  for (std::size_t attempt = 0; attempt < restarts; ++attempt) {
    Vector<double> start = sys.initial;
    if (attempt > 0) {
      Vector<double> alpha(walker.generator_count());
      for (auto& a : alpha) a = gauss(rng);
      start = walker.act(alpha, start);
    }
    auto on_level = walker.correct(start);
    if (!on_level) continue;
    any_start = true;
    Vector<double> x = *on_level;
    record(x);
    std::vector<Vector<double>> path{x};
    bool stalled = false;
    for (double radius : radii) {
      for (int step = 0; step < 2000 && norm(x) < radius; ++step) {
        const auto dir = walker.outward(x);
        if (!dir) {
          stalled = true;
          break;
        }
        double h = 0.5 * std::max(1.0, norm(x));
        bool moved = false;
        for (int k = 0; k < 40 && !moved; ++k, h *= 0.5) {
          auto candidate = walker.correct(walker.act(h * *dir, x));
          if (candidate && norm(*candidate) > norm(x) * (1.0 + 1e-12)) {
            x = std::move(*candidate);
            moved = true;
          }
        }
        if (!moved) {
          stalled = true;
          break;
        }
      }
      if (stalled || norm(x) < radius) break;
      record(x);
      if (norm(x) > norm(path.back())) path.push_back(x);
    }
    if (!stalled && norm(x) >= radii.back()) {
      result.verdict = Boundedness::unbounded;
      result.witness = std::move(path);
      result.note = "level set reached |x| >= " + std::to_string(radii.back());
      return result;
    }
    record(x);
    if (!stalled) all_stalled = false;
    stalled_max = std::max(stalled_max, norm(x));
    if (result.witness.empty() || norm(x) > norm(result.witness.back())) result.witness = {x};
  }
  if (!any_start) {
    result.note = "no level-set point found in the orbit";
    return result;
  }
  if (all_stalled && stalled_max < radii.back()) {
    result.verdict = Boundedness::bounded;
    result.note = "norm is locally maximal on the level set at |x| = " + std::to_string(stalled_max);
  } else {
    result.note = "search budget exhausted";
  }
  return result;
}

}  // namespace orbitflow
