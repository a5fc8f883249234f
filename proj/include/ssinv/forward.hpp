#pragma once

#include "ssinv/eof.hpp"
#include "ssinv/types.hpp"

namespace ssinv {

// Flat-bottom scene for a surface (or near-surface) multi-beam sounder.
struct Geometry {
  double bottom_depth = 0;  // z_b [m]
  double source_depth = 0;  // [m]
  std::vector<double> beam_angles; // radians from vertical, in (-pi/2, pi/2)
};

// Checks depth ordering and angle ranges against a profile grid.
void validate_geometry(const Geometry& geom, const DepthGrid& grid);

enum class RayStatus { ok, turned };

struct RayResult {
  RayStatus status = RayStatus::ok;
  double time = 0;   // two-way [s]; NaN when turned
  double offset = 0; // one-way horizontal offset at the bottom [m]; NaN when turned
};

struct TravelTimeSet {
  std::vector<double> angles;   // copy of the beam angles, same order
  std::vector<RayResult> rays;
};

// One-way traversal of the piecewise-constant layers between source_depth
// and bottom_depth at fixed ray parameter p [s/m]. The layer speed is the
// speed at the layer's upper grid point. Turned when |c_i p| >= 1 in any
// traversed layer. Returned time/offset are one-way.
RayResult trace_ray_parameter(const SoundSpeedProfile& profile, double p, double source_depth,
                              double bottom_depth);

// Two-way bottom-return time for a beam launched at theta1 from the
// vertical; p = sin(theta1) / c at the source depth.
RayResult layered_travel_time(const SoundSpeedProfile& profile, double theta1,
                              const Geometry& geom);

// layered_travel_time over every beam angle, order preserved; turned beams
// are reported in place, never dropped.
TravelTimeSet travel_times(const SoundSpeedProfile& profile, const Geometry& geom);

// travel_times(reconstruct(basis, x), geom).
TravelTimeSet travel_times_of_coefficients(const EofBasis& basis, const Coefficients& x,
                                           const Geometry& geom);

// Debug CSV: angle_rad,time_s,offset_m,status.
void write_travel_times(std::ostream& out, const TravelTimeSet& tts);

}  // namespace ssinv
