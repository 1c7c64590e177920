#pragma once

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "orbitflow/algebra.hpp"
#include "orbitflow/catalog.hpp"
#include "orbitflow/error.hpp"
#include "orbitflow/hamiltonian.hpp"
#include "orbitflow/metric.hpp"
#include "orbitflow/polynomial.hpp"
#include "orbitflow/rational.hpp"
#include "orbitflow/splitting.hpp"

namespace orbitflow {

using Json = nlohmann::ordered_json;

struct PolynomialSpec {
  std::string name;
  std::vector<Monomial> terms;
};

struct SplitSpec {
  std::vector<Vector<Rational>> plus;
  std::vector<Vector<Rational>> minus;
  ActingFactor acting = ActingFactor::plus;
};

struct CatalogRef {
  std::string entry;
  std::string system;
  std::size_t n = 1;
};

/// Everything needed to rebuild one run. Indices are 0-based in memory and
/// 1-based in the JSON form; rationals are JSON strings.
struct RunConfig {
  std::string algebra_name;
  std::size_t dim = 0;
  std::vector<StructureEntry> structure;
  std::string metric_name;
  std::vector<GramEntry> gram;
  std::optional<SplitSpec> split;
  std::vector<PolynomialSpec> invariants;
  std::string hamiltonian;  // name of an invariant, or of hamiltonian_terms
  std::optional<PolynomialSpec> hamiltonian_terms;
  Vector<double> initial;
  int sign = 1;
  double duration = 1.0;
  double dt = 1e-3;
  std::uint64_t seed = 7;
  std::vector<std::string> checks;
  std::optional<CatalogRef> catalog;
};

inline const std::vector<std::string>& known_checks() {
  static const std::vector<std::string> checks{"jacobi", "metric",    "split",        "invariance",  "involution",
                                               "orbit",  "level_set", "conservation", "closed_form", "lax"};
  return checks;
}

// ---------------------------------------------------------------------------
// JSON -> RunConfig

namespace detail {

/// Reads one JSON node, prefixing every diagnostic with its field path.
class Node {
 public:
  Node(const Json& j, std::string path) : j_(j), path_(std::move(path)) {}

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(path_ + ": " + msg); }

  bool has(const char* key) const { return j_.is_object() && j_.contains(key); }
  Node at(const char* key) const {
    if (!j_.is_object()) fail("expected an object");
    if (!j_.contains(key)) fail(std::string("missing field '") + key + "'");
    return Node(j_.at(key), path_.empty() ? key : path_ + "." + key);
  }
  std::vector<Node> items() const {
    if (!j_.is_array()) fail("expected an array");
    std::vector<Node> out;
    for (std::size_t i = 0; i < j_.size(); ++i) out.emplace_back(j_[i], path_ + "[" + std::to_string(i) + "]");
    return out;
  }
  std::string str() const {
    if (!j_.is_string()) fail("expected a string");
    return j_.get<std::string>();
  }
  double number() const {
    if (!j_.is_number()) fail("expected a number");
    return j_.get<double>();
  }
  std::int64_t integer() const {
    if (!j_.is_number_integer()) fail("expected an integer");
    return j_.get<std::int64_t>();
  }
  std::uint64_t unsigned_integer() const {
    if (!j_.is_number_unsigned() && !(j_.is_number_integer() && j_.get<std::int64_t>() >= 0))
      fail("expected a non-negative integer");
    return j_.get<std::uint64_t>();
  }
  /// 1-based index in [1, dim], returned 0-based.
  std::size_t index(std::size_t dim) const {
    const auto v = integer();
    if (v < 1 || static_cast<std::size_t>(v) > dim)
      fail("index " + std::to_string(v) + " outside 1.." + std::to_string(dim));
    return static_cast<std::size_t>(v - 1);
  }
  Rational rational() const {
    if (j_.is_number_integer()) return Rational(j_.get<std::int64_t>());
    try {
      return parse_rational(str());
    } catch (const ParseError& e) {
      fail(e.what());
    }
  }
  bool is_array() const { return j_.is_array(); }
  bool is_string() const { return j_.is_string(); }
  bool is_object() const { return j_.is_object(); }
  const std::string& path() const noexcept { return path_; }

 private:
  const Json& j_;
  std::string path_;
};

inline PolynomialSpec read_polynomial(const Node& n, std::size_t dim) {
  PolynomialSpec p{n.at("name").str(), {}};
  for (const auto& t : n.at("terms").items()) {
    Monomial m{t.at("coefficient").rational(), {}};
    const auto exps = t.at("exponents").items();
    if (exps.size() != dim) t.at("exponents").fail("expected " + std::to_string(dim) + " exponents");
    for (const auto& e : exps) {
      const auto v = e.integer();
      if (v < 0) e.fail("exponent must be non-negative");
      m.exponents.push_back(static_cast<unsigned>(v));
    }
    p.terms.push_back(std::move(m));
  }
  return p;
}

inline Vector<Rational> read_basis_vector(const Node& n, std::size_t dim) {
  if (n.is_array()) {
    const auto xs = n.items();
    if (xs.size() != dim) n.fail("expected " + std::to_string(dim) + " coordinates");
    Vector<Rational> v;
    for (const auto& x : xs) v.push_back(x.rational());
    return v;
  }
  return unit_vector<Rational>(dim, n.index(dim));
}

}  // namespace detail

inline RunConfig parse_config(const Json& root) {
  using detail::Node;
  Node top(root, "");
  if (!root.is_object()) top.fail("configuration must be a JSON object");
  RunConfig c;

  const auto alg = top.at("algebra");
  c.algebra_name = alg.has("name") ? alg.at("name").str() : "algebra";
  const auto dim = alg.at("dim").integer();
  if (dim < 1) alg.at("dim").fail("dimension must be positive");
  c.dim = static_cast<std::size_t>(dim);
  if (alg.has("structure"))
    for (const auto& e : alg.at("structure").items())
      c.structure.push_back(
          {e.at("i").index(c.dim), e.at("j").index(c.dim), e.at("k").index(c.dim), e.at("value").rational()});

  const auto met = top.at("metric");
  c.metric_name = met.has("name") ? met.at("name").str() : "metric";
  for (const auto& e : met.at("gram").items())
    c.gram.push_back({e.at("i").index(c.dim), e.at("j").index(c.dim), e.at("value").rational()});

  if (top.has("split")) {
    const auto sp = top.at("split");
    SplitSpec s;
    for (const auto& b : sp.at("plus").items()) s.plus.push_back(detail::read_basis_vector(b, c.dim));
    for (const auto& b : sp.at("minus").items()) s.minus.push_back(detail::read_basis_vector(b, c.dim));
    const auto acting = sp.has("acting") ? sp.at("acting").str() : std::string("plus");
    if (acting == "plus")
      s.acting = ActingFactor::plus;
    else if (acting == "minus")
      s.acting = ActingFactor::minus;
    else
      sp.at("acting").fail("expected \"plus\" or \"minus\"");
    c.split = std::move(s);
  }

  if (top.has("invariants"))
    for (const auto& f : top.at("invariants").items()) c.invariants.push_back(detail::read_polynomial(f, c.dim));

  const auto ham = top.at("hamiltonian");
  if (ham.is_string()) {
    c.hamiltonian = ham.str();
    bool found = false;
    for (const auto& f : c.invariants) found = found || f.name == c.hamiltonian;
    if (!found) ham.fail("no invariant named '" + c.hamiltonian + "'");
  } else if (ham.is_object()) {
    c.hamiltonian_terms = detail::read_polynomial(ham, c.dim);
    c.hamiltonian = c.hamiltonian_terms->name;
  } else {
    ham.fail("expected an invariant name or a polynomial object");
  }

  const auto init = top.at("initial");
  const auto xs = init.items();
  if (xs.size() != c.dim) init.fail("expected " + std::to_string(c.dim) + " coordinates");
  for (const auto& x : xs) c.initial.push_back(x.number());

  if (top.has("sign")) {
    const auto s = top.at("sign").integer();
    if (s != 1 && s != -1) top.at("sign").fail("sign must be 1 or -1");
    c.sign = static_cast<int>(s);
  }
  if (top.has("mode")) {
    const auto m = top.at("mode").str();
    if (m != "full" && m != "split") top.at("mode").fail("expected \"full\" or \"split\"");
    if ((m == "split") != c.split.has_value())
      top.at("mode").fail("mode must be \"split\" exactly when a split is given");
  }
  if (top.has("T")) c.duration = top.at("T").number();
  if (top.has("dt")) c.dt = top.at("dt").number();
  if (!(c.duration >= 0.0)) top.at("T").fail("T must be non-negative");
  if (!(c.dt > 0.0)) top.at("dt").fail("dt must be positive");
  if (top.has("seed")) c.seed = top.at("seed").unsigned_integer();
  if (top.has("checks"))
    for (const auto& k : top.at("checks").items()) {
      auto name = k.str();
      if (std::find(known_checks().begin(), known_checks().end(), name) == known_checks().end())
        k.fail("unknown check '" + name + "'");
      c.checks.push_back(std::move(name));
    }
  if (top.has("catalog")) {
    const auto cat = top.at("catalog");
    CatalogRef r{cat.at("entry").str(), cat.at("system").str(), 1};
    if (cat.has("n")) r.n = static_cast<std::size_t>(cat.at("n").unsigned_integer());
    c.catalog = std::move(r);
  }
  return c;
}

/// Parses JSON text; syntax errors report line and column.
inline RunConfig parse_config_text(const std::string& text) {
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) throw ParseError("configuration is empty");
  Json root;
  try {
    root = Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError("line " + std::to_string(line) + ", column " + std::to_string(col) + ": invalid JSON");
  }
  return parse_config(root);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline RunConfig load_config(const std::string& path) { return parse_config_text(read_file(path)); }

// ---------------------------------------------------------------------------
// RunConfig -> JSON

namespace detail {

inline Json polynomial_json(const PolynomialSpec& p) {
  Json terms = Json::array();
  for (const auto& m : p.terms) {
    Json e = Json::array();
    for (auto x : m.exponents) e.push_back(x);
    terms.push_back(Json{{"coefficient", format_rational(m.coefficient)}, {"exponents", std::move(e)}});
  }
  return Json{{"name", p.name}, {"terms", std::move(terms)}};
}

inline Json basis_vector_json(const Vector<Rational>& v) {
  std::size_t ones = 0, at = 0, nonzero = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] != 0) {
      ++nonzero;
      at = i;
    }
    if (v[i] == 1) ++ones;
  }
  if (nonzero == 1 && ones == 1) return Json(at + 1);
  Json out = Json::array();
  for (const auto& x : v) out.push_back(format_rational(x));
  return out;
}

inline PolynomialSpec polynomial_spec(const ScalarField& f) {
  if (!f.polynomial()) throw InvalidInput(f.name() + " has no polynomial form to export");
  return {f.name(), f.polynomial()->terms()};
}

}  // namespace detail

inline Json config_json(const RunConfig& c) {
  Json j;
  Json structure = Json::array();
  for (const auto& e : c.structure)
    structure.push_back(Json{{"i", e.i + 1}, {"j", e.j + 1}, {"k", e.k + 1}, {"value", format_rational(e.value)}});
  j["algebra"] = Json{{"name", c.algebra_name}, {"dim", c.dim}, {"structure", std::move(structure)}};
  Json gram = Json::array();
  for (const auto& e : c.gram)
    gram.push_back(Json{{"i", e.i + 1}, {"j", e.j + 1}, {"value", format_rational(e.value)}});
  j["metric"] = Json{{"name", c.metric_name}, {"gram", std::move(gram)}};
  if (c.split) {
    Json plus = Json::array(), minus = Json::array();
    for (const auto& v : c.split->plus) plus.push_back(detail::basis_vector_json(v));
    for (const auto& v : c.split->minus) minus.push_back(detail::basis_vector_json(v));
    j["split"] = Json{{"plus", std::move(plus)}, {"minus", std::move(minus)}, {"acting", to_string(c.split->acting)}};
  }
  Json inv = Json::array();
  for (const auto& f : c.invariants) inv.push_back(detail::polynomial_json(f));
  j["invariants"] = std::move(inv);
  j["hamiltonian"] = c.hamiltonian_terms ? detail::polynomial_json(*c.hamiltonian_terms) : Json(c.hamiltonian);
  j["initial"] = c.initial;
  j["sign"] = c.sign;
  j["mode"] = c.split ? "split" : "full";
  j["T"] = c.duration;
  j["dt"] = c.dt;
  j["seed"] = c.seed;
  j["checks"] = c.checks;
  if (c.catalog) {
    Json r{{"entry", c.catalog->entry}, {"system", c.catalog->system}};
    if (c.catalog->entry == "oscillator") r["n"] = c.catalog->n;
    j["catalog"] = std::move(r);
  }
  return j;
}

inline std::string config_text(const RunConfig& c) { return config_json(c).dump(2) + "\n"; }

/// The config of one catalog system, with all checks enabled that apply.
inline RunConfig catalog_config(const CatalogEntry& entry, const std::string& system_id, double dt = 1e-3,
                                std::uint64_t seed = 7) {
  const auto& spec = entry.system_spec(system_id);
  const auto& g = entry.metric(spec.metric);
  RunConfig c;
  c.algebra_name = entry.algebra().name();
  c.dim = entry.algebra().dim();
  c.structure = entry.algebra().entries();
  c.metric_name = g.name();
  c.gram = g.entries();
  c.split = SplitSpec{entry.plus_basis(), entry.minus_basis(), entry.acting()};
  for (const auto& f : entry.invariants()) c.invariants.push_back(detail::polynomial_spec(f));
  c.hamiltonian = spec.hamiltonian;
  c.initial = convert<double>(spec.initial);
  c.sign = spec.sign;
  c.duration = spec.horizon;
  c.dt = dt;
  c.seed = seed;
  c.checks = {"jacobi", "metric",    "split",        "invariance", "involution",
              "orbit",  "level_set", "conservation", "closed_form"};
  if (entry.has_lax_pair() && (spec.metric == "ad_invariant")) c.checks.push_back("lax");
  c.catalog = CatalogRef{entry.id(), system_id, entry.oscillator_n() ? entry.oscillator_n() : 1};
  return c;
}

// ---------------------------------------------------------------------------
// RunConfig -> model objects

struct Model {
  LieAlgebra algebra;
  BilinearForm metric;
  std::optional<SplitSetting> split;
  std::vector<ScalarField> invariants;
  ScalarField hamiltonian;
  bool hamiltonian_invariant = false;
};

inline ScalarField build_field(const PolynomialSpec& p, std::size_t dim) {
  return ScalarField::from_polynomial(p.name, Polynomial(dim, p.terms));
}

inline LieAlgebra build_algebra(const RunConfig& c) { return LieAlgebra(c.algebra_name, c.dim, c.structure); }
inline BilinearForm build_metric(const RunConfig& c) { return BilinearForm(c.metric_name, c.dim, c.gram); }

inline Model build_model(const RunConfig& c) {
  auto a = build_algebra(c);
  auto g = build_metric(c);
  std::optional<SplitSetting> split;
  if (c.split) split.emplace(build_split(a, g, c.split->plus, c.split->minus), c.split->acting);
  std::vector<ScalarField> inv;
  for (const auto& p : c.invariants) inv.push_back(build_field(p, c.dim));
  std::optional<ScalarField> h;
  bool invariant = false;
  if (c.hamiltonian_terms) {
    h = build_field(*c.hamiltonian_terms, c.dim);
  } else {
    for (const auto& f : inv)
      if (f.name() == c.hamiltonian) {
        h = f;
        invariant = true;
      }
  }
  if (!h) throw InvalidInput("hamiltonian '" + c.hamiltonian + "' is not defined");
  return Model{std::move(a), std::move(g), std::move(split), std::move(inv), std::move(*h), invariant};
}

inline HamiltonianSystem build_system(const RunConfig& c, const Model& m) {
  const std::string id = c.catalog ? c.catalog->entry + "/" + c.catalog->system : m.algebra.name();
  return HamiltonianSystem(id, m.algebra, m.metric, m.split, m.hamiltonian, c.initial, c.sign, m.hamiltonian_invariant);
}

}  // namespace orbitflow
