#include "ssinv/forward.hpp"

#include "ssinv/util.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

namespace ssinv {

void validate_geometry(const Geometry& geom, const DepthGrid& grid) {
  if (!(geom.source_depth >= 0) || !(geom.source_depth < geom.bottom_depth))
    throw Error("geometry: need 0 <= source_depth < bottom_depth");
  if (geom.bottom_depth > grid.max_depth() + 1e-9)
    throw Error("geometry: bottom depth " + format_double(geom.bottom_depth) +
                " m exceeds grid maximum " + format_double(grid.max_depth()) + " m");
  for (double a : geom.beam_angles) {
    if (!(std::abs(a) < std::numbers::pi / 2))
      throw Error("geometry: beam angle " + format_double(a) + " rad not inside (-pi/2, pi/2)");
  }
}

RayResult trace_ray_parameter(const SoundSpeedProfile& profile, double p, double source_depth,
                              double bottom_depth) {
  const DepthGrid& grid = profile.grid;
  if (bottom_depth > grid.max_depth() + 1e-9)
    throw Error("trace: bottom depth outside profile grid");
  if (!(source_depth >= 0) || !(source_depth < bottom_depth))
    throw Error("trace: need 0 <= source_depth < bottom_depth");

  const double dz = grid.spacing;
  const int max_cell = grid.count - 2;
  int first = std::clamp(static_cast<int>(std::floor(source_depth / dz + 1e-12)), 0, max_cell);
  int last = std::clamp(static_cast<int>(std::floor(bottom_depth / dz - 1e-12)), 0, max_cell);
  double time = 0;
  double offset = 0;
  for (int cell = first; cell <= last; ++cell) {
    double z_lo = std::max(cell * dz, source_depth);
    double z_hi = std::min((cell + 1) * dz, bottom_depth);
    double h = z_hi - z_lo;
    if (h <= 0) continue;
    double c = profile.speeds[cell];
    double s = c * p;
    if (s * s >= 1.0) {
      double nan = std::numeric_limits<double>::quiet_NaN();
      return {RayStatus::turned, nan, nan};
    }
    double q = std::sqrt(1.0 - s * s);
    time += h / (c * q);
    offset += h * s / q;
  }
  return {RayStatus::ok, time, offset};
}

RayResult layered_travel_time(const SoundSpeedProfile& profile, double theta1,
                              const Geometry& geom) {
  validate_geometry(geom, profile.grid);
  if (!(std::abs(theta1) < std::numbers::pi / 2))
    throw Error("beam angle " + format_double(theta1) + " rad not inside (-pi/2, pi/2)");

  const double dz = profile.grid.spacing;
  int source_cell = std::min(static_cast<int>(std::floor(geom.source_depth / dz + 1e-12)),
                             profile.grid.count - 2);
  double p = std::sin(theta1) / profile.speeds[source_cell];

  RayResult one_way = trace_ray_parameter(profile, p, geom.source_depth, geom.bottom_depth);
  if (one_way.status == RayStatus::turned) return one_way;
  // Colocated transmit/receive over a flat bottom: the return path mirrors
  // the down-going one.
  return {RayStatus::ok, 2.0 * one_way.time, one_way.offset};
}

TravelTimeSet travel_times(const SoundSpeedProfile& profile, const Geometry& geom) {
  TravelTimeSet tts;
  tts.angles = geom.beam_angles;
  tts.rays.reserve(geom.beam_angles.size());
  for (double a : geom.beam_angles) tts.rays.push_back(layered_travel_time(profile, a, geom));
  return tts;
}

TravelTimeSet travel_times_of_coefficients(const EofBasis& basis, const Coefficients& x,
                                           const Geometry& geom) {
  return travel_times(reconstruct(basis, x), geom);
}

void write_travel_times(std::ostream& out, const TravelTimeSet& tts) {
  out << "angle_rad,time_s,offset_m,status\n";
  for (std::size_t i = 0; i < tts.rays.size(); ++i) {
    const RayResult& r = tts.rays[i];
    out << format_double(tts.angles[i]) << ',' << format_double(r.time) << ','
        << format_double(r.offset) << ',' << (r.status == RayStatus::ok ? "ok" : "turned") << '\n';
  }
}

}  // namespace ssinv
