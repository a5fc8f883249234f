#pragma once

#include "ssinv/forward.hpp"
#include "ssinv/profiles.hpp"
#include "ssinv/rng.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace ssinv {

// Noisy bottom-return times for one survey: n_ping repeats over the
// geometry's beams, turned beams excluded at simulation time.
struct MeasurementSet {
  struct Observation {
    int ping = 0;
    int beam = 0;     // index into geometry.beam_angles
    double angle = 0; // radians, copy of the beam angle
    double time = 0;  // measured two-way time [s]
  };

  Geometry geometry;
  std::vector<Observation> observations;
  double sigma_t = 0;       // travel-time noise stddev [s]
  std::string truth_id;     // optional reference to the generating profile

  std::size_t size() const { return observations.size(); }
  double max_time() const;
};

// n_beam angles uniformly spaced over [-swath/2, +swath/2] (degrees in,
// radians out); a single beam sits at the vertical.
Geometry make_geometry(double swath_width_deg, int n_beam, double bottom_depth,
                       double source_depth = 0);

// sigma_t = 2 sigma_x / c_ref (two-way time equivalent of a one-way range error).
double sigma_t_from_spatial(double sigma_x, double c_ref);

// Exact forward times plus independent Gaussian noise per observation,
// ping-major draw order. Throws ComputeError if every beam turns.
MeasurementSet simulate_measurements(const SoundSpeedProfile& truth, const Geometry& geom,
                                     double sigma_t, int n_ping, Rng& rng);

// Family of synthetic profiles standing in for a measured dataset: a fixed
// mixed-layer/thermocline/deep-gradient base shape plus Gaussian cosine
// modes in depth, with randomized metadata.
struct SynthOceanSpec {
  DepthGrid grid{151, 2.0};
  double surface_speed = 1488.0;        // [m/s]
  double mixed_layer_depth = 30.0;      // [m]
  double thermocline_gradient = -0.06;  // [(m/s)/m]
  double thermocline_thickness = 120.0; // [m]
  double deep_gradient = 0.016;         // [(m/s)/m]
  // Stddev of the cosine mode cos((m - 1/2)*pi*z/z_max), m = 1..N [m/s].
  std::vector<double> mode_amplitudes = {4.0, 2.2, 1.3, 0.45, 0.22,
                                         0.12, 0.07, 0.04, 0.025, 0.015};
  int profile_count = 151;
  double lat_min = 59.849, lat_max = 62.092;
  double lon_min = 2.924, lon_max = 4.990;
  int year_min = 1990, year_max = 2000;
  std::vector<int> months = {4};
};

// Deterministic base shape evaluated on the spec grid.
SoundSpeedProfile base_profile(const SynthOceanSpec& spec);

// profile_count seeded draws from the spec family; every profile passes the
// plausibility band or the call throws.
ProfileSet generate_ocean(const SynthOceanSpec& spec, Rng& rng);

// CSV (ping,angle_rad,time_s) + JSON sidecar (geometry, sigma_t, seed,
// truth_id) at path and path + ".json".
void save_measurements(const MeasurementSet& m, const std::filesystem::path& csv_path,
                       std::uint64_t seed);
MeasurementSet load_measurements(const std::filesystem::path& csv_path);

}  // namespace ssinv
