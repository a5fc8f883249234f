#include "ssinv/synth.hpp"

#include "ssinv/util.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace ssinv {

double MeasurementSet::max_time() const {
  double t = 0;
  for (const auto& o : observations) t = std::max(t, o.time);
  return t;
}

Geometry make_geometry(double swath_width_deg, int n_beam, double bottom_depth,
                       double source_depth) {
  if (!(swath_width_deg > 0) || !(swath_width_deg < 180))
    throw Error("swath width must be in (0, 180) degrees");
  if (n_beam < 1) throw Error("need at least one beam");

  Geometry geom;
  geom.bottom_depth = bottom_depth;
  geom.source_depth = source_depth;
  geom.beam_angles.reserve(n_beam);
  double half = swath_width_deg / 2 * std::numbers::pi / 180.0;
  if (n_beam == 1) {
    geom.beam_angles.push_back(0.0);
  } else {
    for (int i = 0; i < n_beam; ++i)
      geom.beam_angles.push_back(-half + 2 * half * i / (n_beam - 1));
  }
  return geom;
}

double sigma_t_from_spatial(double sigma_x, double c_ref) {
  if (!(c_ref > 0)) throw Error("reference sound speed must be positive");
  if (sigma_x < 0) throw Error("spatial error must be nonnegative");
  return 2.0 * sigma_x / c_ref;
}

MeasurementSet simulate_measurements(const SoundSpeedProfile& truth, const Geometry& geom,
                                     double sigma_t, int n_ping, Rng& rng) {
  if (n_ping < 1) throw Error("need at least one ping");
  if (sigma_t < 0) throw Error("sigma_t must be nonnegative");
  TravelTimeSet exact = travel_times(truth, geom);

  MeasurementSet m;
  m.geometry = geom;
  m.sigma_t = sigma_t;
  for (int ping = 0; ping < n_ping; ++ping) {
    for (std::size_t b = 0; b < exact.rays.size(); ++b) {
      if (exact.rays[b].status != RayStatus::ok) continue;
      MeasurementSet::Observation obs;
      obs.ping = ping;
      obs.beam = static_cast<int>(b);
      obs.angle = exact.angles[b];
      obs.time = exact.rays[b].time + (sigma_t > 0 ? rng.normal(0.0, sigma_t) : 0.0);
      m.observations.push_back(obs);
    }
  }
  if (m.observations.empty()) throw ComputeError("all beams turned: no usable measurements");
  return m;
}

SoundSpeedProfile base_profile(const SynthOceanSpec& spec) {
  SoundSpeedProfile p;
  p.grid = spec.grid;
  p.speeds.resize(spec.grid.count);
  double knee = spec.mixed_layer_depth + spec.thermocline_thickness;
  for (int i = 0; i < spec.grid.count; ++i) {
    double z = spec.grid.depth(i);
    double c = spec.surface_speed;
    if (z > spec.mixed_layer_depth)
      c += spec.thermocline_gradient * (std::min(z, knee) - spec.mixed_layer_depth);
    if (z > knee) c += spec.deep_gradient * (z - knee);
    p.speeds[i] = c;
  }
  p.meta.synthetic = true;
  return p;
}

ProfileSet generate_ocean(const SynthOceanSpec& spec, Rng& rng) {
  if (spec.profile_count < 2) throw Error("synthetic ocean needs at least 2 profiles");
  if (spec.months.empty()) throw Error("synthetic ocean needs at least one month");
  SoundSpeedProfile base = base_profile(spec);
  const int k = spec.grid.count;
  const double z_max = spec.grid.max_depth();

  ProfileSet set;
  set.profiles.reserve(spec.profile_count);
  for (int n = 0; n < spec.profile_count; ++n) {
    SoundSpeedProfile p = base;
    p.meta.lat = rng.uniform(spec.lat_min, spec.lat_max);
    p.meta.lon = rng.uniform(spec.lon_min, spec.lon_max);
    p.meta.year = rng.uniform_int(spec.year_min, spec.year_max);
    p.meta.month = spec.months[rng.uniform_int(0, static_cast<int>(spec.months.size()) - 1)];
    p.meta.day = rng.uniform_int(1, 28);
    p.meta.synthetic = true;
    for (std::size_t m = 0; m < spec.mode_amplitudes.size(); ++m) {
      double a = rng.normal(0.0, spec.mode_amplitudes[m]);
      // Quarter-wave cosines: each mode carries a distinct depth-mean, as the
      // leading EOFs of real shelf profiles do.
      double freq = (static_cast<double>(m) + 0.5) * std::numbers::pi / z_max;
      for (int i = 0; i < k; ++i) p.speeds[i] += a * std::cos(freq * spec.grid.depth(i));
    }
    try {
      validate_profile(p);
    } catch (const Error& e) {
      throw Error(std::string("synthetic ocean spec produced an implausible profile: ") +
                  e.what());
    }
    set.profiles.push_back(std::move(p));
  }
  return set;
}

void save_measurements(const MeasurementSet& m, const std::filesystem::path& csv_path,
                       std::uint64_t seed) {
  std::ofstream out(csv_path);
  if (!out) throw Error("cannot write measurement file " + csv_path.string());
  out << "ping,angle_rad,time_s\n";
  for (const auto& o : m.observations)
    out << o.ping << ',' << format_double(o.angle) << ',' << format_double(o.time) << '\n';

  nlohmann::json j;
  j["format"] = "ssinv-measurements";
  j["version"] = 1;
  j["sigma_t_s"] = m.sigma_t;
  j["seed"] = seed;
  j["truth_id"] = m.truth_id;
  j["geometry"] = {{"bottom_depth_m", m.geometry.bottom_depth},
                   {"source_depth_m", m.geometry.source_depth},
                   {"beam_angles_rad", m.geometry.beam_angles}};
  std::ofstream side(csv_path.string() + ".json");
  if (!side) throw Error("cannot write measurement sidecar for " + csv_path.string());
  side << j.dump(1) << '\n';
}

MeasurementSet load_measurements(const std::filesystem::path& csv_path) {
  std::ifstream side(csv_path.string() + ".json");
  if (!side) throw Error("missing measurement sidecar " + csv_path.string() + ".json");
  nlohmann::json j;
  try {
    side >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error("measurement sidecar " + csv_path.string() + ".json: " + e.what());
  }
  if (j.value("format", "") != "ssinv-measurements")
    throw Error("measurement sidecar " + csv_path.string() + ".json: unrecognized format");

  MeasurementSet m;
  m.sigma_t = j["sigma_t_s"].get<double>();
  m.truth_id = j.value("truth_id", "");
  m.geometry.bottom_depth = j["geometry"]["bottom_depth_m"].get<double>();
  m.geometry.source_depth = j["geometry"]["source_depth_m"].get<double>();
  m.geometry.beam_angles = j["geometry"]["beam_angles_rad"].get<std::vector<double>>();

  std::ifstream in(csv_path);
  if (!in) throw Error("cannot open measurement file " + csv_path.string());
  std::string line;
  if (!std::getline(in, line) || trim(line) != "ping,angle_rad,time_s")
    throw Error(csv_path.string() + ": bad header, expected ping,angle_rad,time_s");
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto fields = split(line, ',');
    if (fields.size() != 3)
      throw Error(csv_path.string() + ": line " + std::to_string(lineno) + ": expected 3 fields");
    MeasurementSet::Observation o;
    if (!parse_int(fields[0], o.ping) || !parse_double(fields[1], o.angle) ||
        !parse_double(fields[2], o.time))
      throw Error(csv_path.string() + ": line " + std::to_string(lineno) + ": malformed field");
    // Recover the beam index from the sidecar's angle table.
    int best = -1;
    double best_err = 1e-9;
    for (std::size_t b = 0; b < m.geometry.beam_angles.size(); ++b) {
      double err = std::abs(m.geometry.beam_angles[b] - o.angle);
      if (err < best_err) {
        best = static_cast<int>(b);
        best_err = err;
      }
    }
    if (best < 0)
      throw Error(csv_path.string() + ": line " + std::to_string(lineno) +
                  ": angle does not match any geometry beam");
    o.beam = best;
    m.observations.push_back(o);
  }
  if (m.observations.empty()) throw Error(csv_path.string() + ": no observations");
  return m;
}

}  // namespace ssinv
