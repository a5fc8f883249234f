#pragma once

#include "ssinv/types.hpp"

#include <iosfwd>
#include <set>
#include <utility>

namespace ssinv {

// Accept/reject band for parsed sound speeds [m/s].
struct SpeedBand {
  double lo = 1300.0;
  double hi = 1700.0;
};

// Throws Error if the profile violates its invariants (length, finiteness,
// plausibility band).
void validate_profile(const SoundSpeedProfile& p, const SpeedBand& band = {});

// Linear interpolation onto `grid`; constant extrapolation beyond the
// shallowest/deepest sample. Samples are (depth [m], speed [m/s]) pairs with
// strictly increasing depths; at least 2 required.
SoundSpeedProfile regrid_profile(const std::vector<std::pair<double, double>>& samples,
                                 const DepthGrid& grid, const ProfileMeta& meta = {});

// Result of parsing a profile CSV stream: accepted profiles in file order,
// plus one message per rejected record.
struct ParseOutcome {
  ProfileSet set;
  std::vector<std::string> record_errors;
};

// Parses the documented profile CSV (header lat,lon,year,month,day,depth_m,
// speed_mps; rows of one profile contiguous). Structural problems (bad
// header, malformed row) throw Error with the line number; records violating
// profile invariants are reported in `record_errors` and skipped.
ParseOutcome parse_profiles(std::istream& in, const DepthGrid& grid, const SpeedBand& band = {});

// Inverse of parse_profiles; round-trips exactly at printed precision.
void write_profiles(std::ostream& out, const ProfileSet& set);

// Keeps profiles inside the box (boundaries inclusive) whose month is in
// `months` and year in [years.first, years.second].
ProfileSet filter_profiles(const ProfileSet& set, const BoundingBox& box,
                           const std::set<int>& months, std::pair<int, int> years);

// Truncates every profile to [0, max_depth]; max_depth must sit on the grid.
ProfileSet crop_depth(const ProfileSet& set, double max_depth);

// sqrt(mean over depths of squared speed difference) [m/s].
double rms_error(const SoundSpeedProfile& a, const SoundSpeedProfile& b);

}  // namespace ssinv
