#pragma once

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include "orbitflow/acceptance.hpp"
#include "orbitflow/catalog.hpp"
#include "orbitflow/config.hpp"
#include "orbitflow/error.hpp"
#include "orbitflow/runs.hpp"

namespace orbitflow::cli {

enum ExitCode : int { kOk = 0, kValidationFailure = 1, kParseError = 2, kDivergence = 3 };

enum class LogLevel { error = 0, warn = 1, info = 2, debug = 3 };

/// Verbosity from ORBITFLOW_LOG (error, warn, info, debug); default warn.
inline LogLevel log_level() {
  const char* env = std::getenv("ORBITFLOW_LOG");
  const std::string_view v = env ? env : "";
  if (v == "error") return LogLevel::error;
  if (v == "info") return LogLevel::info;
  if (v == "debug") return LogLevel::debug;
  return LogLevel::warn;
}

inline void log(LogLevel level, const std::string& msg) {
  static const char* names[] = {"error", "warn", "info", "debug"};
  if (static_cast<int>(level) <= static_cast<int>(log_level()))
    std::cerr << "orbitflow[" << names[static_cast<int>(level)] << "] " << msg << '\n';
}

/// Writes through a sibling temporary file and renames it into place.
inline void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidInput("cannot write '" + tmp.string() + "'");
    out << content;
    if (!out.flush()) throw InvalidInput("write to '" + tmp.string() + "' failed");
  }
  fs::rename(tmp, target);
}

inline void emit(const std::optional<std::string>& path, const std::string& content, std::ostream& os) {
  if (path) {
    write_atomic(*path, content);
    log(LogLevel::info, "wrote " + *path);
  } else {
    os << content;
  }
}

inline std::string json_text(const Json& j) { return j.dump(2) + "\n"; }

/// Maps library exceptions to exit codes.
template <class F>
int guarded(F&& body) {
  try {
    return body();
  } catch (const ParseError& e) {
    log(LogLevel::error, std::string("parse error: ") + e.what());
    return kParseError;
  } catch (const DivergenceError& e) {
    log(LogLevel::error, e.what());
    return kDivergence;
  } catch (const Error& e) {
    log(LogLevel::error, e.what());
    return kValidationFailure;
  } catch (const std::filesystem::filesystem_error& e) {
    log(LogLevel::error, e.what());
    return kValidationFailure;
  }
}

inline RunConfig load_with_seed(const std::string& path, std::optional<std::uint64_t> seed) {
  auto c = load_config(path);
  if (seed) c.seed = *seed;
  return c;
}

inline int cmd_validate(const std::string& config_path, const std::optional<std::string>& out,
                        std::optional<std::uint64_t> seed, std::ostream& os) {
  return guarded([&] {
    const auto c = load_with_seed(config_path, seed);
    const auto v = validate_config(c);
    for (const auto& item : v.report["checks"])
      if (!item["passed"].get<bool>()) log(LogLevel::warn, "validation failed: " + item.dump());
    emit(out, json_text(v.report), os);
    return v.passed ? kOk : kValidationFailure;
  });
}

enum class TrajectoryFormat { csv, json };

/// Writes the trajectory to `out` (stdout if absent) and the summary JSON to
/// `summary_out`; without `summary_out` the summary goes to stdout only when
/// the trajectory went to a file. A divergent run still writes the valid prefix.
inline int cmd_simulate(const std::string& config_path, std::optional<double> duration, std::optional<double> dt,
                        const std::optional<std::string>& out, const std::optional<std::string>& summary_out,
                        std::optional<std::uint64_t> seed, TrajectoryFormat format, std::ostream& os) {
  return guarded([&] {
    const auto c = load_with_seed(config_path, seed);
    const auto r = simulate(c, duration, dt);
    emit(out, format == TrajectoryFormat::csv ? r.csv : json_text(trajectory_json(r.trajectory)), os);
    if (summary_out)
      emit(summary_out, json_text(r.summary), os);
    else if (out)
      os << json_text(r.summary);
    if (r.diverged) {
      log(LogLevel::error, "integration diverged after index " + r.summary["last_valid_index"].dump());
      return kDivergence;
    }
    return kOk;
  });
}

inline int cmd_check(const std::string& config_path, const std::optional<std::string>& out,
                     std::optional<std::uint64_t> seed, std::ostream& os) {
  return guarded([&] {
    const auto c = load_with_seed(config_path, seed);
    const auto r = check_config(c);
    emit(out, json_text(r.report), os);
    return r.passed ? kOk : kValidationFailure;
  });
}

inline int cmd_catalog_list(TrajectoryFormat format, std::ostream& os) {
  if (format == TrajectoryFormat::json) {
    Json list = Json::array();
    for (const auto& id : catalog_ids()) {
      const auto e = catalog_entry(id);
      Json systems = Json::array();
      for (const auto& s : e.systems()) systems.push_back(s.id);
      list.push_back(Json{{"id", id}, {"dim", e.algebra().dim()}, {"systems", std::move(systems)}});
    }
    os << json_text(list);
  } else {
    for (const auto& id : catalog_ids()) os << id << '\n';
  }
  return kOk;
}

inline int cmd_catalog_export(const std::string& id, const std::optional<std::string>& system, std::size_t n,
                              std::optional<double> dt, std::optional<std::uint64_t> seed,
                              const std::optional<std::string>& out, std::ostream& os) {
  return guarded([&] {
    const auto e = catalog_entry(id, n);
    const auto sys = system.value_or(e.systems().front().id);
    emit(out, config_text(catalog_config(e, sys, dt.value_or(1e-3), seed.value_or(7))), os);
    return kOk;
  });
}

/// Every acceptance criterion plus a check report for every catalog system.
inline Json run_all(int* failures = nullptr) {
  Json criteria = Json::array(), systems = Json::array();
  int failed = 0;
  for (const auto& criterion : acceptance::criteria()) {
    const auto c = criterion();
    log(LogLevel::info, "criterion " + std::to_string(c.id) + (c.passed() ? " passed" : " FAILED"));
    if (!c.passed()) ++failed;
    criteria.push_back(acceptance::criterion_json(c));
  }
  for (const auto& e : {example_i(), example_ii(), example_iii(), oscillator(1), oscillator(2), oscillator(3)})
    for (const auto& s : e.systems()) {
      const auto r = check_config(catalog_config(e, s.id, 1e-3, acceptance::kSeed));
      if (!r.passed) ++failed;
      systems.push_back(r.report);
    }
  if (failures) *failures = failed;
  return Json{{"seed", acceptance::kSeed},
              {"failures", failed},
              {"passed", failed == 0},
              {"criteria", std::move(criteria)},
              {"systems", std::move(systems)}};
}

inline int cmd_catalog_run_all(const std::optional<std::string>& out, std::ostream& os) {
  return guarded([&] {
    int failures = 0;
    const auto report = run_all(&failures);
    emit(out, json_text(report), os);
    return failures == 0 ? kOk : kValidationFailure;
  });
}

}  // namespace orbitflow::cli
