#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "src/commands.hpp"

using namespace lighttrap::cli;

int main(int argc, char** argv) {
  CLI::App app{
      "lighttrap: ray dynamics, trap design, and sensitivity analysis for "
      "inhomogeneous refractive-index fields"};
  app.require_subcommand(1);

  struct Common {
    std::string config;
    std::string out = ".";
    int jobs = 0;
    std::optional<std::uint64_t> seed;
  };
  Common trace_o, design_o, sweep_o, perturb_o, check_o;
  std::optional<std::string> check_report;
  bool inject_rhs = false;

  auto add_common = [](CLI::App* sub, Common& o, bool config_required) {
    auto* c = sub->add_option("--config", o.config, "JSON configuration file");
    if (config_required) c->required();
    sub->add_option("--out", o.out, "Output directory (default: cwd)");
    sub->add_option("--jobs", o.jobs, "Worker threads (0 = hardware)");
    sub->add_option("--seed", o.seed, "Seed override");
  };

  CLI::App* trace =
      app.add_subcommand("trace", "Integrate one ray and emit CSV/JSON/SVG");
  add_common(trace, trace_o, true);
  CLI::App* design = app.add_subcommand(
      "design", "Solve the inverse trap design problem and verify it");
  add_common(design, design_o, true);
  CLI::App* sweep = app.add_subcommand(
      "sweep", "Trap geometry across a parameter grid (CSV + trend SVG)");
  add_common(sweep, sweep_o, true);
  CLI::App* perturb = app.add_subcommand(
      "perturb", "Deviation scan over perturbation amplitudes");
  add_common(perturb, perturb_o, true);
  CLI::App* check =
      app.add_subcommand("check", "Run the built-in self-test suites");
  add_common(check, check_o, false);
  check->add_option("--report", check_report, "Write a JSON report here");
  check
      ->add_flag("--inject-rhs-sign-error", inject_rhs,
                 "Fault-injection fixture: corrupt the radial gradient")
      ->group("");  // hidden

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (trace->parsed()) {
      return cmd_trace(load_json_file(trace_o.config), trace_o.out);
    }
    if (design->parsed()) {
      return cmd_design(load_json_file(design_o.config), design_o.out);
    }
    if (sweep->parsed()) {
      return cmd_sweep(load_json_file(sweep_o.config), sweep_o.out,
                       sweep_o.jobs);
    }
    if (perturb->parsed()) {
      return cmd_perturb(load_json_file(perturb_o.config), perturb_o.out,
                         perturb_o.jobs, perturb_o.seed);
    }
    if (check->parsed()) {
      return cmd_check(check_report, check_o.out, inject_rhs);
    }
  } catch (const lighttrap::JsonSchemaError& e) {
    std::cerr << e.what() << "\n";
    return kConfigError;
  } catch (const IoError& e) {
    std::cerr << e.what() << "\n";
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumericalFailure;
  }
  return kOk;
}
