// Python bindings for the inversion core. Eigen vectors/matrices cross the
// boundary as numpy arrays; seeded operations take an integer seed instead
// of an Rng so Python callers stay deterministic without holding RNG state.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <fstream>
#include <sstream>

#include "ssinv/alphasel.hpp"
#include "ssinv/eof.hpp"
#include "ssinv/experiment.hpp"
#include "ssinv/forward.hpp"
#include "ssinv/invert.hpp"
#include "ssinv/profiles.hpp"
#include "ssinv/synth.hpp"
#include "ssinv/util.hpp"

namespace py = pybind11;
using namespace ssinv;

namespace {

Vector ray_times(const TravelTimeSet& tts) {
  Vector t(static_cast<int>(tts.rays.size()));
  for (int i = 0; i < t.size(); ++i) t[i] = tts.rays[static_cast<std::size_t>(i)].time;
  return t;
}

Vector ray_offsets(const TravelTimeSet& tts) {
  Vector t(static_cast<int>(tts.rays.size()));
  for (int i = 0; i < t.size(); ++i) t[i] = tts.rays[static_cast<std::size_t>(i)].offset;
  return t;
}

}  // namespace

PYBIND11_MODULE(_ssinv, m) {
  m.doc() = "sound-speed profile inversion from multi-beam travel times";

  py::register_exception<Error>(m, "InputError");
  py::register_exception<ComputeError>(m, "ComputeFailure");

  // ---- core types -----------------------------------------------------

  py::class_<DepthGrid>(m, "DepthGrid")
      .def(py::init<int, double>(), py::arg("count"), py::arg("spacing"))
      .def_readonly("count", &DepthGrid::count)
      .def_readonly("spacing", &DepthGrid::spacing)
      .def("depths", &DepthGrid::depths)
      .def("max_depth", &DepthGrid::max_depth)
      .def("__repr__", [](const DepthGrid& g) {
        std::ostringstream ss;
        ss << "DepthGrid(count=" << g.count << ", spacing=" << g.spacing << ")";
        return ss.str();
      });

  py::class_<ProfileMeta>(m, "ProfileMeta")
      .def(py::init<>())
      .def_readwrite("lat", &ProfileMeta::lat)
      .def_readwrite("lon", &ProfileMeta::lon)
      .def_readwrite("year", &ProfileMeta::year)
      .def_readwrite("month", &ProfileMeta::month)
      .def_readwrite("day", &ProfileMeta::day)
      .def_readwrite("synthetic", &ProfileMeta::synthetic);

  py::class_<SoundSpeedProfile>(m, "SoundSpeedProfile")
      .def(py::init<>())
      .def(py::init([](const DepthGrid& grid, const Vector& speeds) {
             SoundSpeedProfile p;
             p.grid = grid;
             p.speeds = speeds;
             p.meta.synthetic = true;
             return p;
           }),
           py::arg("grid"), py::arg("speeds"))
      .def_readwrite("grid", &SoundSpeedProfile::grid)
      .def_readwrite("speeds", &SoundSpeedProfile::speeds)
      .def_readwrite("meta", &SoundSpeedProfile::meta);

  py::class_<ProfileSet>(m, "ProfileSet")
      .def(py::init<>())
      .def_readwrite("profiles", &ProfileSet::profiles)
      .def("__len__", &ProfileSet::size)
      .def("__getitem__",
           [](const ProfileSet& s, std::size_t i) {
             if (i >= s.size()) throw py::index_error();
             return s.profiles[i];
           })
      .def("grid", &ProfileSet::grid);

  py::class_<SpeedBand>(m, "SpeedBand")
      .def(py::init<>())
      .def_readwrite("lo", &SpeedBand::lo)
      .def_readwrite("hi", &SpeedBand::hi);
  m.def("validate_profile", &validate_profile, py::arg("profile"), py::arg("band") = SpeedBand{});

  m.def(
      "regrid_profile",
      [](const std::vector<std::pair<double, double>>& samples, const DepthGrid& grid) {
        return regrid_profile(samples, grid);
      },
      py::arg("samples"), py::arg("grid"));

  m.def(
      "parse_profiles",
      [](const std::filesystem::path& path, const DepthGrid& grid) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw Error("cannot open " + path.string());
        ParseOutcome out = parse_profiles(in, grid);
        return std::make_pair(out.set, out.record_errors);
      },
      py::arg("path"), py::arg("grid"),
      "Parse a profile CSV file; returns (profiles, record_errors).");

  m.def(
      "write_profiles",
      [](const std::filesystem::path& path, const ProfileSet& set) {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw Error("cannot open " + path.string());
        write_profiles(out, set);
      },
      py::arg("path"), py::arg("profiles"));

  m.def("filter_profiles", &filter_profiles, py::arg("profiles"), py::arg("box"),
        py::arg("months"), py::arg("years"));
  m.def("crop_depth", &crop_depth, py::arg("profiles"), py::arg("max_depth"));
  m.def("rms_error", &rms_error, py::arg("a"), py::arg("b"));

  py::class_<BoundingBox>(m, "BoundingBox")
      .def(py::init([](double lat_min, double lat_max, double lon_min, double lon_max) {
             BoundingBox b{lat_min, lat_max, lon_min, lon_max};
             b.validate();
             return b;
           }),
           py::arg("lat_min"), py::arg("lat_max"), py::arg("lon_min"), py::arg("lon_max"))
      .def_readonly("lat_min", &BoundingBox::lat_min)
      .def_readonly("lat_max", &BoundingBox::lat_max)
      .def_readonly("lon_min", &BoundingBox::lon_min)
      .def_readonly("lon_max", &BoundingBox::lon_max);

  // ---- EOF basis ------------------------------------------------------

  py::class_<EofBasis>(m, "EofBasis")
      .def_readonly("grid", &EofBasis::grid)
      .def_readonly("mean", &EofBasis::mean)
      .def_readonly("eofs", &EofBasis::eofs)
      .def_readonly("sigma", &EofBasis::sigma)
      .def_readonly("n_training", &EofBasis::n_training)
      .def("n_eof", &EofBasis::n_eof);

  m.def("build_basis", &build_basis, py::arg("train"), py::arg("n_eof"));
  m.def("validate_basis", &validate_basis, py::arg("basis"));
  m.def("project", &project, py::arg("basis"), py::arg("profile"));
  m.def("reconstruct", &reconstruct, py::arg("basis"), py::arg("x"));
  m.def("log_prior", &log_prior, py::arg("basis"), py::arg("x"));
  m.def(
      "sample_coefficients",
      [](const EofBasis& basis, std::uint64_t seed) {
        Rng rng(seed);
        return sample_coefficients(basis, rng);
      },
      py::arg("basis"), py::arg("seed"));
  m.def("save_basis", &save_basis, py::arg("basis"), py::arg("path"));
  m.def("load_basis", &load_basis, py::arg("path"));

  // ---- forward model --------------------------------------------------

  py::class_<Geometry>(m, "Geometry")
      .def(py::init<>())
      .def_readwrite("bottom_depth", &Geometry::bottom_depth)
      .def_readwrite("source_depth", &Geometry::source_depth)
      .def_readwrite("beam_angles", &Geometry::beam_angles);

  py::enum_<RayStatus>(m, "RayStatus")
      .value("ok", RayStatus::ok)
      .value("turned", RayStatus::turned);

  py::class_<RayResult>(m, "RayResult")
      .def_readonly("status", &RayResult::status)
      .def_readonly("time", &RayResult::time)
      .def_readonly("offset", &RayResult::offset);

  py::class_<TravelTimeSet>(m, "TravelTimeSet")
      .def_readonly("angles", &TravelTimeSet::angles)
      .def_readonly("rays", &TravelTimeSet::rays)
      .def("times", &ray_times, "Two-way times [s]; NaN where the beam turned.")
      .def("offsets", &ray_offsets);

  m.def("make_geometry", &make_geometry, py::arg("swath_width_deg"), py::arg("n_beam"),
        py::arg("bottom_depth"), py::arg("source_depth") = 0.0);
  m.def("validate_geometry", &validate_geometry, py::arg("geometry"), py::arg("grid"));
  m.def("trace_ray_parameter", &trace_ray_parameter, py::arg("profile"), py::arg("p"),
        py::arg("source_depth"), py::arg("bottom_depth"));
  m.def("layered_travel_time", &layered_travel_time, py::arg("profile"), py::arg("theta1"),
        py::arg("geometry"));
  m.def("travel_times", &travel_times, py::arg("profile"), py::arg("geometry"));
  m.def("travel_times_of_coefficients", &travel_times_of_coefficients, py::arg("basis"),
        py::arg("x"), py::arg("geometry"));

  // ---- synthetic ocean and surveys ------------------------------------

  py::class_<SynthOceanSpec>(m, "SynthOceanSpec")
      .def(py::init<>())
      .def_readwrite("grid", &SynthOceanSpec::grid)
      .def_readwrite("surface_speed", &SynthOceanSpec::surface_speed)
      .def_readwrite("mixed_layer_depth", &SynthOceanSpec::mixed_layer_depth)
      .def_readwrite("thermocline_gradient", &SynthOceanSpec::thermocline_gradient)
      .def_readwrite("thermocline_thickness", &SynthOceanSpec::thermocline_thickness)
      .def_readwrite("deep_gradient", &SynthOceanSpec::deep_gradient)
      .def_readwrite("mode_amplitudes", &SynthOceanSpec::mode_amplitudes)
      .def_readwrite("profile_count", &SynthOceanSpec::profile_count)
      .def_readwrite("year_min", &SynthOceanSpec::year_min)
      .def_readwrite("year_max", &SynthOceanSpec::year_max)
      .def_readwrite("months", &SynthOceanSpec::months);

  m.def("base_profile", &base_profile, py::arg("spec"));
  m.def(
      "generate_ocean",
      [](const SynthOceanSpec& spec, std::uint64_t seed) {
        Rng rng(seed);
        return generate_ocean(spec, rng);
      },
      py::arg("spec"), py::arg("seed"));

  py::class_<MeasurementSet::Observation>(m, "Observation")
      .def_readonly("ping", &MeasurementSet::Observation::ping)
      .def_readonly("beam", &MeasurementSet::Observation::beam)
      .def_readonly("angle", &MeasurementSet::Observation::angle)
      .def_readonly("time", &MeasurementSet::Observation::time);

  py::class_<MeasurementSet>(m, "MeasurementSet")
      .def_readonly("geometry", &MeasurementSet::geometry)
      .def_readonly("observations", &MeasurementSet::observations)
      .def_readonly("sigma_t", &MeasurementSet::sigma_t)
      .def_readonly("truth_id", &MeasurementSet::truth_id)
      .def("__len__", &MeasurementSet::size)
      .def("max_time", &MeasurementSet::max_time)
      .def("times", [](const MeasurementSet& m_) {
        Vector t(static_cast<int>(m_.size()));
        for (int i = 0; i < t.size(); ++i) t[i] = m_.observations[static_cast<std::size_t>(i)].time;
        return t;
      });

  m.def("sigma_t_from_spatial", &sigma_t_from_spatial, py::arg("sigma_x"), py::arg("c_ref"));
  m.def(
      "simulate_measurements",
      [](const SoundSpeedProfile& truth, const Geometry& geom, double sigma_t, int n_ping,
         std::uint64_t seed) {
        Rng rng(seed);
        return simulate_measurements(truth, geom, sigma_t, n_ping, rng);
      },
      py::arg("truth"), py::arg("geometry"), py::arg("sigma_t"), py::arg("n_ping"),
      py::arg("seed"));
  m.def(
      "save_measurements",
      [](const MeasurementSet& m_, const std::filesystem::path& path, std::uint64_t seed) {
        save_measurements(m_, path, seed);
      },
      py::arg("measurements"), py::arg("path"), py::arg("seed"));
  m.def("load_measurements", &load_measurements, py::arg("path"));

  // ---- inversion ------------------------------------------------------

  py::class_<InversionConfig>(m, "InversionConfig")
      .def(py::init<>())
      .def_readwrite("alpha_grid", &InversionConfig::alpha_grid)
      .def_readwrite("max_iterations", &InversionConfig::max_iterations)
      .def_readwrite("step_tolerance", &InversionConfig::step_tolerance)
      .def_readwrite("stall_tolerance", &InversionConfig::stall_tolerance)
      .def_readwrite("fd_step_floor", &InversionConfig::fd_step_floor)
      .def_readwrite("fd_step_rel", &InversionConfig::fd_step_rel)
      .def_readwrite("damping_factor", &InversionConfig::damping_factor)
      .def_readwrite("damping_min", &InversionConfig::damping_min)
      .def_static("log_spaced", &InversionConfig::log_spaced, py::arg("lo"), py::arg("hi"),
                  py::arg("n"))
      .def("validate", &InversionConfig::validate);

  py::class_<GaussNewtonDiagnostics>(m, "GaussNewtonDiagnostics")
      .def_readonly("iterations", &GaussNewtonDiagnostics::iterations)
      .def_readonly("converged", &GaussNewtonDiagnostics::converged)
      .def_readonly("final_cost", &GaussNewtonDiagnostics::final_cost)
      .def_readonly("last_step_rms", &GaussNewtonDiagnostics::last_step_rms)
      .def_readonly("lifted", &GaussNewtonDiagnostics::lifted);

  py::class_<SweepEntry>(m, "SweepEntry")
      .def_readonly("alpha", &SweepEntry::alpha)
      .def_readonly("x", &SweepEntry::x)
      .def_readonly("misfit", &SweepEntry::misfit)
      .def_readonly("prior", &SweepEntry::prior)
      .def_readonly("iterations", &SweepEntry::iterations)
      .def_readonly("converged", &SweepEntry::converged);

  py::class_<SweepResult>(m, "SweepResult")
      .def_readonly("entries", &SweepResult::entries)
      .def_readonly("n_obs", &SweepResult::n_obs);

  m.def("cost", &cost, py::arg("x"), py::arg("measurements"), py::arg("basis"), py::arg("alpha"));
  m.def("residual_vector", &residual_vector, py::arg("x"), py::arg("measurements"),
        py::arg("basis"), py::arg("alpha"));
  m.def("gauss_newton", &gauss_newton, py::arg("x0"), py::arg("measurements"), py::arg("basis"),
        py::arg("alpha"), py::arg("config") = InversionConfig{});
  m.def("sweep", &sweep, py::arg("measurements"), py::arg("basis"),
        py::arg("config") = InversionConfig{});

  // ---- alpha selection ------------------------------------------------

  py::class_<SweepFeatures>(m, "SweepFeatures")
      .def_readonly("blocks", &SweepFeatures::blocks)
      .def_readonly("carried", &SweepFeatures::carried)
      .def_readonly("n_obs", &SweepFeatures::n_obs);

  py::class_<AlphaNet>(m, "AlphaNet")
      .def_readonly("layer_sizes", &AlphaNet::layer_sizes)
      .def_readonly("window_halfwidth", &AlphaNet::window_halfwidth)
      .def_readonly("training_seed", &AlphaNet::training_seed);

  py::class_<AlphaTrainConfig>(m, "AlphaTrainConfig")
      .def(py::init<>())
      .def_readwrite("n_truths", &AlphaTrainConfig::n_truths)
      .def_readwrite("ping_counts", &AlphaTrainConfig::ping_counts)
      .def_readwrite("sigma_t_values", &AlphaTrainConfig::sigma_t_values)
      .def_readwrite("swath_values_deg", &AlphaTrainConfig::swath_values_deg)
      .def_readwrite("inversion", &AlphaTrainConfig::inversion)
      .def_readwrite("hidden", &AlphaTrainConfig::hidden)
      .def_readwrite("window_halfwidth", &AlphaTrainConfig::window_halfwidth)
      .def_readwrite("epochs", &AlphaTrainConfig::epochs)
      .def_readwrite("batch_size", &AlphaTrainConfig::batch_size)
      .def_readwrite("learning_rate", &AlphaTrainConfig::learning_rate)
      .def_readwrite("validation_fraction", &AlphaTrainConfig::validation_fraction);

  py::class_<AlphaTrainReport>(m, "AlphaTrainReport")
      .def_readonly("n_train", &AlphaTrainReport::n_train)
      .def_readonly("n_val", &AlphaTrainReport::n_val)
      .def_readonly("first_epoch_train_loss", &AlphaTrainReport::first_epoch_train_loss)
      .def_readonly("final_train_loss", &AlphaTrainReport::final_train_loss)
      .def_readonly("best_val_loss", &AlphaTrainReport::best_val_loss)
      .def_readonly("label_variance", &AlphaTrainReport::label_variance)
      .def_readonly("best_epoch", &AlphaTrainReport::best_epoch)
      .def_readonly("retried", &AlphaTrainReport::retried);

  m.def("extract_features", &extract_features, py::arg("sweep"), py::arg("basis"));
  m.def("window_input", &window_input, py::arg("features"), py::arg("index"),
        py::arg("half_width"));
  m.def("normalized_obs_count", &normalized_obs_count, py::arg("n_obs"));
  m.def("mlp_forward", &mlp_forward, py::arg("net"), py::arg("input"));
  m.def(
      "train_alpha_net",
      [](const EofBasis& basis, const Geometry& geom, const AlphaTrainConfig& cfg,
         std::uint64_t seed) {
        Rng rng(seed);
        AlphaTrainReport report;
        AlphaNet net = train_alpha_net(basis, geom, cfg, rng, &report);
        return std::make_pair(net, report);
      },
      py::arg("basis"), py::arg("geometry"), py::arg("config"), py::arg("seed"),
      "Returns (net, training_report).");
  m.def("select_alpha", &select_alpha, py::arg("net"), py::arg("features"),
        py::arg("alpha_grid"));
  m.def("baseline_select_alpha", &baseline_select_alpha, py::arg("sweep"), py::arg("sigma_t"));
  m.def("save_net", &save_net, py::arg("net"), py::arg("path"));
  m.def("load_net", &load_net, py::arg("path"));

  // ---- experiment pipeline --------------------------------------------

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def_readonly("seed", &ExperimentConfig::seed)
      .def_readonly("grid", &ExperimentConfig::grid)
      .def_readonly("n_eof", &ExperimentConfig::n_eof)
      .def_readonly("n_beam", &ExperimentConfig::n_beam)
      .def_readonly("n_ping", &ExperimentConfig::n_ping)
      .def_readonly("output_dir", &ExperimentConfig::output_dir)
      .def_readonly("inversion", &ExperimentConfig::inversion)
      .def_readonly("training", &ExperimentConfig::training)
      .def("geometry", &ExperimentConfig::geometry)
      .def("hash_hex", &ExperimentConfig::hash_hex)
      .def("sigma_t", [](const ExperimentConfig& cfg) { return cfg.noise.sigma_t(); });

  py::class_<Datasets>(m, "Datasets")
      .def_readonly("train", &Datasets::train)
      .def_readonly("test", &Datasets::test);

  py::class_<BaselineSummary>(m, "BaselineSummary")
      .def_readonly("train_mean_rms", &BaselineSummary::train_mean_rms)
      .def_readonly("test_mean_rms", &BaselineSummary::test_mean_rms);

  py::class_<CaseResult>(m, "CaseResult")
      .def_readonly("profile_index", &CaseResult::profile_index)
      .def_readonly("rms", &CaseResult::rms)
      .def_readonly("selected_alpha", &CaseResult::selected_alpha)
      .def_readonly("selected_index", &CaseResult::selected_index)
      .def_readonly("converged_count", &CaseResult::converged_count);

  py::class_<AxisResult>(m, "AxisResult")
      .def_readonly("value", &AxisResult::value)
      .def_readonly("cases", &AxisResult::cases)
      .def_readonly("mean_rms", &AxisResult::mean_rms)
      .def_readonly("median_rms", &AxisResult::median_rms)
      .def_readonly("stddev_rms", &AxisResult::stddev_rms);

  m.def(
      "load_config", [](const std::string& path) { return load_config(path); },
      py::arg("path"));
  m.def("prepare_datasets", &prepare_datasets, py::arg("config"));
  m.def("compute_baselines", &compute_baselines, py::arg("datasets"));
  m.def(
      "run_axis_value",
      [](const ExperimentConfig& cfg, const Datasets& data, const std::string& axis,
         double value, const AlphaNet* net) { return run_axis_value(cfg, data, axis, value, net); },
      py::arg("config"), py::arg("datasets"), py::arg("axis"), py::arg("value"),
      py::arg("net") = nullptr);

  // ---- utilities ------------------------------------------------------

  m.def("derive_seed", &derive_seed, py::arg("master"), py::arg("stream"));
  m.def("format_double", &format_double, py::arg("value"));
}
