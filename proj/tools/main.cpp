// ssinv: sound-speed-profile inversion workbench.
//
// Builds EOF bases from historical (or synthetic) profiles, simulates
// multi-beam surveys, inverts travel times for profile coefficients, and
// reproduces the parameter-sensitivity sweeps.

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ssinv/experiment.hpp"
#include "ssinv/types.hpp"
#include "ssinv/util.hpp"

namespace {

struct CommonArgs {
  std::string config;
  std::map<std::string, nlohmann::json> overrides;
};

// Flags shared by every subcommand; values land in the config JSON before
// parsing so they are covered by the recorded config hash.
void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("-c,--config", args.config, "JSON config file")->required();
  auto over = [&args](const std::string& ptr) {
    return [&args, ptr](const std::string& v) {
      double d;
      if (ssinv::parse_double(v, d) && v.find_first_not_of("0123456789") == std::string::npos &&
          !v.empty())
        args.overrides[ptr] = static_cast<std::int64_t>(d);
      else if (ssinv::parse_double(v, d))
        args.overrides[ptr] = d;
      else
        args.overrides[ptr] = v;
    };
  };
  cmd->add_option_function<std::string>("--seed", over("seed"), "override config seed");
  cmd->add_option_function<std::string>("--output-dir", over("output_dir"),
                                        "override output directory");
  cmd->add_option_function<std::string>("--n-eof", over("n_eof"), "override basis size");
  cmd->add_option_function<std::string>("--n-ping", over("n_ping"), "override ping count");
  cmd->add_option_function<std::string>("--n-beam", over("geometry/n_beam"),
                                        "override beam count");
  cmd->add_option_function<std::string>("--swath-deg", over("geometry/swath_width_deg"),
                                        "override swath width [deg]");
  cmd->add_option_function<std::string>("--alpha-mode", over("alpha_selection/mode"),
                                        "override alpha selection (baseline|net|fixed)");
  cmd->add_option_function<std::string>("--fixed-alpha", over("alpha_selection/fixed_alpha"),
                                        "override the fixed alpha value");
  cmd->add_option_function<std::string>("--threads", over("threads"),
                                        "override worker thread count");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sound-speed profile inversion from multi-beam travel times"};
  app.require_subcommand(1);

  CommonArgs eof_args, sim_args, inv_args, sweep_args, base_args, train_args, report_args;
  std::string measurements_path, report_input, axis;
  std::vector<double> axis_values;

  add_common(app.add_subcommand("eof-build", "build and persist the EOF basis"), eof_args);
  add_common(app.add_subcommand("simulate", "generate test surveys and write measurements"),
             sim_args);
  CLI::App* inv = app.add_subcommand("invert", "invert one measurement file");
  add_common(inv, inv_args);
  inv->add_option("-m,--measurements", measurements_path, "measurement CSV from simulate")
      ->required();
  CLI::App* sweep = app.add_subcommand("sweep", "sensitivity sweep over one parameter axis");
  add_common(sweep, sweep_args);
  sweep->add_option("-a,--axis", axis,
                    "axis name: beams_pings, swath_deg, n_eof, spatial_error_cm")
      ->required();
  sweep->add_option("-v,--values", axis_values, "axis values (default: built-in per axis)");
  add_common(app.add_subcommand("baselines", "mean-profile baseline errors"), base_args);
  add_common(app.add_subcommand("train-alpha", "train the alpha-selection regressor"),
             train_args);
  CLI::App* report = app.add_subcommand("report", "aggregate statistics and histogram");
  add_common(report, report_args);
  report->add_option("-i,--input", report_input, "per-profile detail CSV with an rms_mps column")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (app.got_subcommand("eof-build"))
      return ssinv::cmd_eof_build(ssinv::load_config(eof_args.config, eof_args.overrides));
    if (app.got_subcommand("simulate"))
      return ssinv::cmd_simulate(ssinv::load_config(sim_args.config, sim_args.overrides));
    if (app.got_subcommand("invert"))
      return ssinv::cmd_invert(ssinv::load_config(inv_args.config, inv_args.overrides),
                               measurements_path);
    if (app.got_subcommand("sweep"))
      return ssinv::cmd_sweep(ssinv::load_config(sweep_args.config, sweep_args.overrides), axis,
                              axis_values);
    if (app.got_subcommand("baselines"))
      return ssinv::cmd_baselines(ssinv::load_config(base_args.config, base_args.overrides));
    if (app.got_subcommand("train-alpha"))
      return ssinv::cmd_train_alpha(ssinv::load_config(train_args.config, train_args.overrides));
    if (app.got_subcommand("report"))
      return ssinv::cmd_report(ssinv::load_config(report_args.config, report_args.overrides),
                               report_input);
    std::cerr << "error: no subcommand\n";
    return 1;
  } catch (const ssinv::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ssinv::ComputeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
}
