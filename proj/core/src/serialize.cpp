#include "lighttrap/serialize.hpp"

#include <cmath>

namespace lighttrap {

// ---- StrictObject ----

StrictObject::StrictObject(const json& j, std::string path)
    : j_(j), path_(std::move(path)) {
  if (!j_.is_object()) {
    throw JsonSchemaError(path_, "expected a JSON object");
  }
}

bool StrictObject::has(const std::string& key) const { return j_.contains(key); }

const json& StrictObject::require(const std::string& key) {
  auto it = j_.find(key);
  if (it == j_.end()) {
    throw JsonSchemaError(child_path(key), "missing required key");
  }
  consumed_.insert(key);
  return *it;
}

const json* StrictObject::optional(const std::string& key) {
  auto it = j_.find(key);
  if (it == j_.end()) return nullptr;
  consumed_.insert(key);
  return &*it;
}

double StrictObject::require_double(const std::string& key) {
  const json& v = require(key);
  if (!v.is_number()) {
    throw JsonSchemaError(child_path(key), "expected a number");
  }
  return v.get<double>();
}

double StrictObject::optional_double(const std::string& key, double fallback) {
  const json* v = optional(key);
  if (!v) return fallback;
  if (!v->is_number()) {
    throw JsonSchemaError(child_path(key), "expected a number");
  }
  return v->get<double>();
}

std::uint64_t StrictObject::optional_u64(const std::string& key,
                                         std::uint64_t fallback) {
  const json* v = optional(key);
  if (!v) return fallback;
  if (!v->is_number_unsigned()) {
    throw JsonSchemaError(child_path(key), "expected an unsigned integer");
  }
  return v->get<std::uint64_t>();
}

std::string StrictObject::require_string(const std::string& key) {
  const json& v = require(key);
  if (!v.is_string()) {
    throw JsonSchemaError(child_path(key), "expected a string");
  }
  return v.get<std::string>();
}

std::string StrictObject::optional_string(const std::string& key,
                                          const std::string& fallback) {
  const json* v = optional(key);
  if (!v) return fallback;
  if (!v->is_string()) {
    throw JsonSchemaError(child_path(key), "expected a string");
  }
  return v->get<std::string>();
}

bool StrictObject::optional_bool(const std::string& key, bool fallback) {
  const json* v = optional(key);
  if (!v) return fallback;
  if (!v->is_boolean()) {
    throw JsonSchemaError(child_path(key), "expected a boolean");
  }
  return v->get<bool>();
}

void StrictObject::finish() const {
  for (auto it = j_.begin(); it != j_.end(); ++it) {
    if (!consumed_.count(it.key())) {
      throw JsonSchemaError(child_path(it.key()), "unknown key");
    }
  }
}

// ---- fields ----

json field_to_json(const IndexField& field) {
  if (auto* c = dynamic_cast<const ConstantField*>(&field)) {
    return {{"type", "constant"}, {"n", c->value()}};
  }
  if (auto* g = dynamic_cast<const GaussianRadialField*>(&field)) {
    return {{"type", "gaussian"},
            {"n_a", g->n_a()},
            {"n_c", g->n_c()},
            {"sigma", g->sigma()}};
  }
  if (auto* b = dynamic_cast<const BumpPerturbedField*>(&field)) {
    json j = {{"type", "bump"},
              {"base", field_to_json(b->base())},
              {"delta_n", b->bump().delta_n},
              {"r_p", b->bump().r_p},
              {"s_p", b->bump().s_p}};
    if (b->bump().azimuthal()) {
      j["phi_p"] = *b->bump().phi_p;
      j["phi_width"] = b->bump().phi_width;
    }
    return j;
  }
  if (auto* s = dynamic_cast<const SwitchableGaussianField*>(&field)) {
    return {{"type", "switchable"}, {"n_a", s->base().n_a()},
            {"n_c", s->base().n_c()}, {"sigma", s->base().sigma()},
            {"t_off", s->t_off()},    {"tau_ramp", s->tau_ramp()}};
  }
  throw std::logic_error("field_to_json: unknown field type");
}

FieldPtr field_from_json(const json& j, const std::string& path) {
  StrictObject o(j, path);
  const std::string type = o.require_string("type");
  try {
    if (type == "constant") {
      const double n = o.require_double("n");
      o.finish();
      return make_constant(n);
    }
    if (type == "gaussian") {
      const double n_a = o.require_double("n_a");
      const double n_c = o.require_double("n_c");
      const double sigma = o.require_double("sigma");
      const double n_max = o.optional_double(
          "n_max_material", GaussianRadialField::kDefaultMaterialLimit);
      o.finish();
      return make_gaussian(n_a, n_c, sigma, n_max);
    }
    if (type == "bump") {
      FieldPtr base = field_from_json(o.require("base"), o.child_path("base"));
      BumpPerturbation bump;
      bump.delta_n = o.require_double("delta_n");
      bump.r_p = o.require_double("r_p");
      bump.s_p = o.require_double("s_p");
      if (o.has("phi_p")) {
        bump.phi_p = o.require_double("phi_p");
        bump.phi_width = o.optional_double("phi_width", 0.5);
      }
      o.finish();
      return make_bump_perturbed(std::move(base), bump);
    }
    if (type == "switchable") {
      GaussianRadialField base(
          o.require_double("n_a"), o.require_double("n_c"),
          o.require_double("sigma"),
          o.optional_double("n_max_material",
                            GaussianRadialField::kDefaultMaterialLimit));
      const double t_off = o.require_double("t_off");
      const double tau_ramp = o.require_double("tau_ramp");
      o.finish();
      return make_switchable(base, t_off, tau_ramp);
    }
  } catch (const std::invalid_argument& e) {
    throw JsonSchemaError(path, e.what());
  }
  throw JsonSchemaError(o.child_path("type"),
                        "unknown field type '" + type +
                            "' (expected constant|gaussian|bump|switchable)");
}

// ---- analysis ----

json orbit_summary_to_json(const OrbitSummary& s) {
  return {{"b", s.b},
          {"classification", std::string(to_string(s.classification))},
          {"r_min_obs", s.r_min_obs},
          {"r_max_obs", s.r_max_obs},
          {"w_o", s.w_o},
          {"T_r", s.T_r},
          {"delta_phi_per_T_r", s.delta_phi_per_T_r},
          {"periodicity_residual", s.periodicity_residual},
          {"turning_count", s.turning_count}};
}

json deviation_report_to_json(const DeviationReport& r) {
  json j = {{"delta_r_min", r.delta_r_min},
            {"delta_r_max", r.delta_r_max},
            {"delta_w_o", r.delta_w_o},
            {"classification_changed", r.classification_changed},
            {"base_class", std::string(to_string(r.base_class))},
            {"perturbed_class", std::string(to_string(r.perturbed_class))},
            {"base_r_min", r.base_r_min},
            {"base_r_max", r.base_r_max},
            {"base_w_o", r.base_w_o},
            {"pert_r_min", r.pert_r_min},
            {"pert_r_max", r.pert_r_max},
            {"pert_w_o", r.pert_w_o}};
  if (r.escape_tau) {
    j["escape_tau"] = *r.escape_tau;
  } else {
    j["escape_tau"] = nullptr;
  }
  return j;
}

json scan_table_to_json(const ScanTable& t) {
  json rows = json::array();
  for (const ScanRow& row : t.rows) {
    json r = {{"amplitude", row.amplitude},
              {"applied_delta", row.applied_delta},
              {"ok", row.ok}};
    if (row.ok) {
      r["report"] = deviation_report_to_json(row.report);
    } else {
      r["error"] = row.error;
    }
    rows.push_back(std::move(r));
  }
  json j = {{"rows", std::move(rows)},
            {"base_b", t.base_b},
            {"base_r_min", t.base_r_min},
            {"base_r_max", t.base_r_max},
            {"base_w_o", t.base_w_o},
            {"seed", t.seed},
            {"bump_r_p", t.resolved_shape.r_p},
            {"bump_s_p", t.resolved_shape.s_p}};
  j["threshold_amplitude"] =
      t.threshold_amplitude ? json(*t.threshold_amplitude) : json(nullptr);
  if (t.resolved_shape.azimuthal()) {
    j["bump_phi_p"] = *t.resolved_shape.phi_p;
    j["bump_phi_width"] = t.resolved_shape.phi_width;
  }
  return j;
}

// ---- design ----

json design_problem_to_json(const DesignProblem& p) {
  json j = {{"r_min_target", p.r_min_target},
            {"r_max_target", p.r_max_target},
            {"n_max_material", p.n_max_material},
            {"n_floor", p.n_floor}};
  if (p.fixed_n_c) j["n_c"] = *p.fixed_n_c;
  return j;
}

DesignProblem design_problem_from_json(const json& j, const std::string& path) {
  StrictObject o(j, path);
  DesignProblem p;
  p.r_min_target = o.require_double("r_min_target");
  p.r_max_target = o.require_double("r_max_target");
  p.n_max_material = o.optional_double(
      "n_max_material", GaussianRadialField::kDefaultMaterialLimit);
  p.n_floor = o.optional_double("n_floor", 1.0);
  if (o.has("n_c")) p.fixed_n_c = o.require_double("n_c");
  o.finish();
  return p;
}

json design_solution_to_json(const DesignSolution& s) {
  return {{"field",
           {{"type", "gaussian"}, {"n_a", s.n_a}, {"n_c", s.n_c}, {"sigma", s.sigma}}},
          {"b", s.b},
          {"band", {{"b_lo", s.band.b_lo}, {"b_hi", s.band.b_hi}}},
          {"margin_lo", s.margin_lo},
          {"margin_hi", s.margin_hi},
          {"achieved", {{"r_min", s.achieved.r_min}, {"r_max", s.achieved.r_max}}}};
}

json design_outcome_to_json(const DesignOutcome& o) {
  json cands = json::array();
  for (const DesignCandidate& c : o.candidates) {
    cands.push_back({{"sigma", c.sigma}, {"verdict", c.verdict}});
  }
  json j = {{"feasible", o.feasible()}, {"candidates", std::move(cands)}};
  if (o.solution) {
    j["solution"] = design_solution_to_json(*o.solution);
  } else {
    j["failure_reason"] = o.failure_reason;
  }
  return j;
}

json design_verification_to_json(const DesignVerification& v) {
  return {{"r_min_obs", v.observed.r_min},
          {"r_max_obs", v.observed.r_max},
          {"w_o", v.w_o},
          {"rel_dev_r_min", v.rel_dev_r_min},
          {"rel_dev_r_max", v.rel_dev_r_max},
          {"classification", std::string(to_string(v.classification))},
          {"termination", std::string(to_string(v.termination))},
          {"turning_count", v.turning_count}};
}

}  // namespace lighttrap
