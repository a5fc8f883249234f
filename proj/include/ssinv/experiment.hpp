#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ssinv/alphasel.hpp"
#include "ssinv/invert.hpp"
#include "ssinv/synth.hpp"
#include "ssinv/types.hpp"

namespace ssinv {

enum class AlphaMode { baseline, net, fixed };

enum class SourceMode { synthetic, csv };

// Exactly one of sigma_x_m / sigma_t_s may be given in the config; the spatial
// form is converted with c_ref.
struct NoiseSpec {
  std::optional<double> sigma_x_m;
  std::optional<double> sigma_t_s;
  double c_ref_mps = 1500.0;

  double sigma_t() const;
};

// Everything a pipeline run needs, parsed from a JSON config file. CLI
// overrides are applied to the JSON before parsing so the recorded config hash
// covers them.
struct ExperimentConfig {
  std::uint64_t seed = 0;
  DepthGrid grid{151, 2.0};

  SourceMode source_mode = SourceMode::synthetic;
  SynthOceanSpec ocean;  // grid/box/months kept in sync with the fields below
  int n_train = 151;
  int n_test = 111;
  int train_year_min = 1990, train_year_max = 2000;
  int test_year_min = 2001, test_year_max = 2010;
  std::string csv_path;  // csv mode only
  BoundingBox box{59.849, 62.092, 2.924, 4.990};
  std::vector<int> months{4};

  double crop_depth_m = 300.0;
  int n_eof = 5;
  std::string basis_path = "basis.json";

  double swath_width_deg = 120.0;
  int n_beam = 100;
  double bottom_depth_m = 300.0;
  double source_depth_m = 0.0;
  int n_ping = 5;

  NoiseSpec noise;

  InversionConfig inversion;

  AlphaMode alpha_mode = AlphaMode::baseline;
  double fixed_alpha = 1e-4;
  std::string net_path = "alpha_net.json";

  AlphaTrainConfig training;

  std::string output_dir = "out";
  int threads = 1;

  nlohmann::json effective;  // config json after overrides, used for hashing

  Geometry geometry() const;
  std::string hash_hex() const;

  // Resolves a config-relative artifact path against output_dir (absolute
  // paths pass through).
  std::string resolve(const std::string& path) const;
};

// Overrides are JSON-pointer-style paths ("seed", "geometry/n_beam") mapped to
// already-typed JSON values.
ExperimentConfig load_config(const std::string& path,
                             const std::map<std::string, nlohmann::json>& overrides = {});
ExperimentConfig config_from_json(const nlohmann::json& j);

struct Datasets {
  ProfileSet train;
  ProfileSet test;
};

// Generates (synthetic mode) or loads+filters (csv mode) the train/test sets,
// cropped to crop_depth_m.
Datasets prepare_datasets(const ExperimentConfig& cfg);

// Per-profile measurement seed; shared by simulate and sweep so that a stored
// measurement file reproduces the corresponding sweep case.
std::uint64_t measurement_seed(const ExperimentConfig& cfg, int profile_index);

struct BaselineSummary {
  double train_mean_rms = 0.0;  // mean RMS of test profiles vs train-set mean
  double test_mean_rms = 0.0;   // same vs the test set's own mean
};

BaselineSummary compute_baselines(const Datasets& data);

// One inverted test profile within a sweep.
struct CaseResult {
  int profile_index = 0;
  double rms = 0.0;
  double selected_alpha = 0.0;
  int selected_index = 0;
  int converged_count = 0;
};

struct AxisResult {
  double value = 0.0;
  std::vector<CaseResult> cases;
  double mean_rms = 0.0;
  double median_rms = 0.0;
  double stddev_rms = 0.0;
};

// Valid axis names: beams_pings, swath_deg, n_eof, spatial_error_cm.
AxisResult run_axis_value(const ExperimentConfig& cfg, const Datasets& data,
                          const std::string& axis, double value,
                          const AlphaNet* net);

int cmd_eof_build(const ExperimentConfig& cfg);
int cmd_simulate(const ExperimentConfig& cfg);
int cmd_invert(const ExperimentConfig& cfg, const std::string& measurements_path);
int cmd_sweep(const ExperimentConfig& cfg, const std::string& axis,
              const std::vector<double>& values);
int cmd_baselines(const ExperimentConfig& cfg);
int cmd_train_alpha(const ExperimentConfig& cfg);
int cmd_report(const ExperimentConfig& cfg, const std::string& detail_csv);

}  // namespace ssinv
