#pragma once

#include <set>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "lighttrap/design.hpp"
#include "lighttrap/eikonal.hpp"
#include "lighttrap/field.hpp"
#include "lighttrap/orbit.hpp"
#include "lighttrap/perturbation.hpp"

namespace lighttrap {

using json = nlohmann::json;

/// Schema violation carrying the offending key path. Consumers (the CLI) map
/// this to a dedicated exit code.
class JsonSchemaError : public std::runtime_error {
 public:
  JsonSchemaError(std::string path, const std::string& what)
      : std::runtime_error("config error at '" + path + "': " + what),
        path_(std::move(path)) {}

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// Strict accessor over one JSON object: every key must be consumed exactly
/// once, required keys must exist, and leftovers are reported by name.
/// Never falls back silently.
class StrictObject {
 public:
  StrictObject(const json& j, std::string path);

  bool has(const std::string& key) const;

  const json& require(const std::string& key);
  const json* optional(const std::string& key);

  double require_double(const std::string& key);
  double optional_double(const std::string& key, double fallback);
  std::uint64_t optional_u64(const std::string& key, std::uint64_t fallback);
  std::string require_string(const std::string& key);
  std::string optional_string(const std::string& key, const std::string& fallback);
  bool optional_bool(const std::string& key, bool fallback);

  /// Throws when any key was not consumed.
  void finish() const;

  const std::string& path() const { return path_; }
  std::string child_path(const std::string& key) const { return path_ + "." + key; }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> consumed_;
};

// ---- index fields ----
// {"type":"constant","n":2.0}
// {"type":"gaussian","n_a":3.8,"n_c":1.0,"sigma":1.0}
// {"type":"bump","base":{...},"delta_n":0.05,"r_p":1.0,"s_p":0.2[,"phi_p":0.0,"phi_width":0.5]}
// {"type":"switchable","n_a":3.8,"n_c":1.0,"sigma":1.0,"t_off":50.0,"tau_ramp":10.0}
json field_to_json(const IndexField& field);
FieldPtr field_from_json(const json& j, const std::string& path = "field");

// ---- analysis results ----
json orbit_summary_to_json(const OrbitSummary& s);
json deviation_report_to_json(const DeviationReport& r);
json scan_table_to_json(const ScanTable& t);

// ---- inverse design ----
json design_problem_to_json(const DesignProblem& p);
DesignProblem design_problem_from_json(const json& j,
                                       const std::string& path = "problem");
json design_solution_to_json(const DesignSolution& s);
json design_outcome_to_json(const DesignOutcome& o);
json design_verification_to_json(const DesignVerification& v);

}  // namespace lighttrap
