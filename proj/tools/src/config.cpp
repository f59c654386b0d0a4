#include "config.hpp"

#include <fstream>

namespace lighttrap::cli {

json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw JsonSchemaError(path.string(), std::string("malformed JSON: ") + e.what());
  }
  return j;
}

namespace {

void parse_integrator_into(StrictObject& parent, IntegrateOptions& opts,
                           bool& escape_given, bool required) {
  const json* node = parent.optional("integrator");
  if (!node) {
    if (required) {
      throw JsonSchemaError(parent.child_path("integrator"),
                            "missing required key");
    }
    return;
  }
  StrictObject o(*node, parent.child_path("integrator"));
  opts.rel_tol = o.require_double("rel_tol");
  opts.abs_tol = o.require_double("abs_tol");
  opts.max_tau = o.require_double("max_tau");
  opts.sample_interval = o.require_double("sample_interval");
  if (o.has("escape_r")) {
    opts.escape_r = o.require_double("escape_r");
    escape_given = true;
    if (!(opts.escape_r > 0.0)) {
      throw JsonSchemaError(o.child_path("escape_r"), "must be > 0");
    }
  }
  opts.min_r = o.optional_double("min_r", opts.min_r);
  const double steps =
      o.optional_double("max_steps", static_cast<double>(opts.max_steps));
  opts.max_steps = static_cast<std::int64_t>(steps);
  o.finish();

  if (!(opts.rel_tol > 0.0)) {
    throw JsonSchemaError(o.child_path("rel_tol"), "must be > 0");
  }
  if (!(opts.abs_tol > 0.0)) {
    throw JsonSchemaError(o.child_path("abs_tol"), "must be > 0");
  }
  if (!(opts.max_tau > 0.0)) {
    throw JsonSchemaError(o.child_path("max_tau"), "must be > 0");
  }
  if (!(opts.sample_interval > 0.0)) {
    throw JsonSchemaError(o.child_path("sample_interval"), "must be > 0");
  }
  if (!(opts.min_r >= 0.0)) {
    throw JsonSchemaError(o.child_path("min_r"), "must be >= 0");
  }
  if (opts.max_steps <= 0) {
    throw JsonSchemaError(o.child_path("max_steps"), "must be > 0");
  }
}

LaunchSpec parse_launch(StrictObject& parent) {
  const json& node = parent.require("launch");
  StrictObject o(node, parent.child_path("launch"));
  LaunchSpec spec;
  if (o.has("state")) {
    StrictObject s(o.require("state"), o.child_path("state"));
    RayState st;
    st.r = s.require_double("r");
    st.phi = s.require_double("phi");
    st.z = s.require_double("z");
    st.t = s.require_double("t");
    st.dr = s.require_double("dr");
    st.dphi = s.require_double("dphi");
    st.dz = s.require_double("dz");
    st.dt = s.require_double("dt");
    s.finish();
    spec.state = st;
  } else {
    spec.r0 = o.require_double("r0");
    if (!(*spec.r0 > 0.0)) {
      throw JsonSchemaError(o.child_path("r0"), "must be > 0");
    }
    const double sense = o.optional_double("sense", 1.0);
    if (sense != 1.0 && sense != -1.0) {
      throw JsonSchemaError(o.child_path("sense"), "must be +1 or -1");
    }
    spec.sense = static_cast<int>(sense);
  }
  o.finish();
  return spec;
}

OutputSpec parse_outputs(StrictObject& parent,
                         std::initializer_list<const char*> keys) {
  OutputSpec spec;
  const json* node = parent.optional("outputs");
  if (!node) return spec;
  StrictObject o(*node, parent.child_path("outputs"));
  for (const char* key : keys) {
    if (!o.has(key)) continue;
    const std::string value = o.require_string(key);
    if (std::string(key) == "trajectory_csv") spec.trajectory_csv = value;
    if (std::string(key) == "summary_json") spec.summary_json = value;
    if (std::string(key) == "plot_svg") spec.plot_svg = value;
  }
  o.finish();
  return spec;
}

}  // namespace

SceneConfig parse_scene_config(const json& j) {
  StrictObject o(j, "config");
  SceneConfig cfg;
  cfg.field = field_from_json(o.require("field"), o.child_path("field"));
  cfg.launch = parse_launch(o);
  parse_integrator_into(o, cfg.integrator, cfg.escape_r_given, true);
  cfg.outputs =
      parse_outputs(o, {"trajectory_csv", "summary_json", "plot_svg"});
  cfg.seed = o.optional_u64("seed", 0);
  o.finish();
  return cfg;
}

SweepConfig parse_sweep_config(const json& j) {
  StrictObject o(j, "config");
  SweepConfig cfg;

  StrictObject base(o.require("base"), o.child_path("base"));
  cfg.n_a = base.require_double("n_a");
  cfg.n_c = base.require_double("n_c");
  cfg.sigma = base.require_double("sigma");
  base.finish();

  StrictObject sweep(o.require("sweep"), o.child_path("sweep"));
  cfg.parameter = sweep.require_string("parameter");
  if (cfg.parameter != "n_c" && cfg.parameter != "sigma" && cfg.parameter != "b") {
    throw JsonSchemaError(sweep.child_path("parameter"),
                          "must be one of n_c|sigma|b");
  }
  const json& values = sweep.require("values");
  if (!values.is_array() || values.empty()) {
    throw JsonSchemaError(sweep.child_path("values"),
                          "must be a non-empty array of numbers");
  }
  for (const json& v : values) {
    if (!v.is_number()) {
      throw JsonSchemaError(sweep.child_path("values"), "must contain numbers");
    }
    cfg.values.push_back(v.get<double>());
  }
  sweep.finish();

  bool escape_given = false;
  cfg.integrator.max_tau = 0.0;  // derived per grid point
  parse_integrator_into(o, cfg.integrator, escape_given, false);
  cfg.integrator_given = o.has("integrator");

  const json* outputs = o.optional("outputs");
  if (outputs) {
    StrictObject oo(*outputs, o.child_path("outputs"));
    if (oo.has("csv")) cfg.csv_path = oo.require_string("csv");
    if (oo.has("svg")) cfg.svg_path = oo.require_string("svg");
    oo.finish();
  }
  cfg.seed = o.optional_u64("seed", 0);
  o.finish();
  return cfg;
}

PerturbConfig parse_perturb_config(const json& j) {
  StrictObject o(j, "config");
  PerturbConfig cfg;
  cfg.field = field_from_json(o.require("field"), o.child_path("field"));

  const json* launch = o.optional("launch");
  if (launch) {
    StrictObject lo(*launch, o.child_path("launch"));
    cfg.launch_r0 = lo.require_double("r0");
    if (!(*cfg.launch_r0 > 0.0)) {
      throw JsonSchemaError(lo.child_path("r0"), "must be > 0");
    }
    const double sense = lo.optional_double("sense", 1.0);
    if (sense != 1.0 && sense != -1.0) {
      throw JsonSchemaError(lo.child_path("sense"), "must be +1 or -1");
    }
    cfg.sense = static_cast<int>(sense);
    lo.finish();
  }

  const json& amps = o.require("amplitudes");
  if (!amps.is_array() || amps.size() < 3) {
    throw JsonSchemaError(o.child_path("amplitudes"),
                          "must be an array of at least 3 amplitudes");
  }
  double prev = -1.0;
  for (const json& a : amps) {
    if (!a.is_number()) {
      throw JsonSchemaError(o.child_path("amplitudes"), "must contain numbers");
    }
    const double v = a.get<double>();
    if (v < 0.0 || v < prev) {
      throw JsonSchemaError(o.child_path("amplitudes"),
                            "must be non-negative and non-decreasing");
    }
    cfg.amplitudes.push_back(v);
    prev = v;
  }

  const json* bump = o.optional("bump");
  if (bump) {
    StrictObject bo(*bump, o.child_path("bump"));
    if (bo.has("r_p")) cfg.shape.r_p = bo.require_double("r_p");
    if (bo.has("s_p")) {
      cfg.shape.s_p = bo.require_double("s_p");
      if (!(cfg.shape.s_p > 0.0)) {
        throw JsonSchemaError(bo.child_path("s_p"), "must be > 0");
      }
    }
    const std::string dir = bo.optional_string("direction", "dip");
    if (dir == "dip") {
      cfg.shape.direction = -1.0;
    } else if (dir == "bump") {
      cfg.shape.direction = +1.0;
    } else {
      throw JsonSchemaError(bo.child_path("direction"), "must be dip|bump");
    }
    if (bo.has("phi_p")) cfg.shape.phi_p = bo.require_double("phi_p");
    cfg.shape.randomize_phi = bo.optional_bool("randomize_phi", false);
    cfg.shape.phi_width = bo.optional_double("phi_width", 0.5);
    if (!(cfg.shape.phi_width > 0.0)) {
      throw JsonSchemaError(bo.child_path("phi_width"), "must be > 0");
    }
    bo.finish();
  }

  cfg.periods = o.optional_double("periods", 20.0);
  if (!(cfg.periods > 0.0)) {
    throw JsonSchemaError(o.child_path("periods"), "must be > 0");
  }

  const json* outputs = o.optional("outputs");
  if (outputs) {
    StrictObject oo(*outputs, o.child_path("outputs"));
    if (oo.has("csv")) cfg.csv_path = oo.require_string("csv");
    if (oo.has("json")) cfg.json_path = oo.require_string("json");
    if (oo.has("svg")) cfg.svg_path = oo.require_string("svg");
    oo.finish();
  }
  cfg.seed = o.optional_u64("seed", 0);
  o.finish();
  return cfg;
}

DesignConfig parse_design_config(const json& j) {
  StrictObject o(j, "config");
  DesignConfig cfg;
  DesignProblem p;
  p.r_min_target = o.require_double("r_min_target");
  p.r_max_target = o.require_double("r_max_target");
  p.n_max_material = o.optional_double(
      "n_max_material", GaussianRadialField::kDefaultMaterialLimit);
  p.n_floor = o.optional_double("n_floor", 1.0);
  if (o.has("n_c")) p.fixed_n_c = o.require_double("n_c");
  cfg.problem = p;

  const json* outputs = o.optional("outputs");
  if (outputs) {
    StrictObject oo(*outputs, o.child_path("outputs"));
    if (oo.has("solution_json")) cfg.outcome_path = oo.require_string("solution_json");
    if (oo.has("verification_json")) {
      cfg.verification_path = oo.require_string("verification_json");
    }
    oo.finish();
  }
  o.finish();

  if (!(p.r_min_target > 0.0) || !(p.r_max_target > p.r_min_target)) {
    throw JsonSchemaError("config.r_min_target",
                          "need 0 < r_min_target < r_max_target");
  }
  return cfg;
}

void write_file(const std::filesystem::path& out_dir, const std::string& path,
                const std::string& content) {
  std::filesystem::path target(path);
  if (target.is_relative()) target = out_dir / target;
  std::error_code ec;
  if (target.has_parent_path()) {
    std::filesystem::create_directories(target.parent_path(), ec);
  }
  std::ofstream out(target, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + target.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("write failed: " + target.string());
}

}  // namespace lighttrap::cli
