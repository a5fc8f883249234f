#include "ssinv/profiles.hpp"

#include "ssinv/util.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace ssinv {

DepthGrid::DepthGrid(int count_, double spacing_) : count(count_), spacing(spacing_) {
  if (count < 2) throw Error("depth grid needs at least 2 points, got " + std::to_string(count));
  if (!(spacing > 0)) throw Error("depth grid spacing must be positive");
}

DepthGrid DepthGrid::from_depths(const std::vector<double>& depths) {
  if (depths.size() < 2) throw Error("depth grid needs at least 2 points");
  if (std::abs(depths.front()) > 1e-9) throw Error("depth grid must start at 0 m");
  double dz = depths[1] - depths[0];
  if (!(dz > 0)) throw Error("depth grid must be strictly increasing");
  for (std::size_t i = 0; i + 1 < depths.size(); ++i) {
    double step = depths[i + 1] - depths[i];
    if (std::abs(step - dz) > 1e-9)
      throw Error("depth grid spacing is not uniform at index " + std::to_string(i));
  }
  return DepthGrid(static_cast<int>(depths.size()), dz);
}

std::vector<double> DepthGrid::depths() const {
  std::vector<double> d(count);
  for (int i = 0; i < count; ++i) d[i] = depth(i);
  return d;
}

const DepthGrid& ProfileSet::grid() const {
  if (profiles.empty()) throw Error("profile set is empty");
  return profiles.front().grid;
}

void BoundingBox::validate() const {
  if (!(lat_min < lat_max) || !(lon_min < lon_max))
    throw Error("bounding box must have lat_min < lat_max and lon_min < lon_max");
}

void validate_profile(const SoundSpeedProfile& p, const SpeedBand& band) {
  if (p.speeds.size() != p.grid.count)
    throw Error("profile has " + std::to_string(p.speeds.size()) + " speeds for a grid of " +
                std::to_string(p.grid.count) + " depths");
  for (int i = 0; i < p.speeds.size(); ++i) {
    double v = p.speeds[i];
    if (!std::isfinite(v)) throw Error("non-finite sound speed at depth index " + std::to_string(i));
    if (v < band.lo || v > band.hi)
      throw Error("sound speed " + format_double(v) + " m/s at " + format_double(p.grid.depth(i)) +
                  " m outside plausibility band [" + format_double(band.lo) + ", " +
                  format_double(band.hi) + "]");
  }
}

SoundSpeedProfile regrid_profile(const std::vector<std::pair<double, double>>& samples,
                                 const DepthGrid& grid, const ProfileMeta& meta) {
  if (samples.size() < 2) throw Error("regrid needs at least 2 samples");
  for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
    if (!(samples[i + 1].first > samples[i].first))
      throw Error("sample depths must be strictly increasing (violated at sample " +
                  std::to_string(i + 1) + ")");
  }

  SoundSpeedProfile p;
  p.grid = grid;
  p.meta = meta;
  p.speeds.resize(grid.count);
  std::size_t seg = 0; // current interpolation segment [seg, seg+1]
  for (int i = 0; i < grid.count; ++i) {
    double z = grid.depth(i);
    if (z <= samples.front().first) {
      p.speeds[i] = samples.front().second;
      continue;
    }
    if (z >= samples.back().first) {
      p.speeds[i] = samples.back().second;
      continue;
    }
    while (samples[seg + 1].first < z) ++seg;
    const auto& [z0, c0] = samples[seg];
    const auto& [z1, c1] = samples[seg + 1];
    double w = (z - z0) / (z1 - z0);
    p.speeds[i] = c0 + w * (c1 - c0);
  }
  return p;
}

namespace {

struct CsvRow {
  ProfileMeta meta;
  double depth = 0;
  double speed = 0;
};

bool same_record(const ProfileMeta& a, const ProfileMeta& b) {
  return a.lat == b.lat && a.lon == b.lon && a.year == b.year && a.month == b.month &&
         a.day == b.day;
}

CsvRow parse_row(std::string_view line, int lineno) {
  auto fields = split(line, ',');
  if (fields.size() != 7)
    throw Error("line " + std::to_string(lineno) + ": expected 7 fields, got " +
                std::to_string(fields.size()));
  CsvRow row;
  if (!parse_double(fields[0], row.meta.lat) || !parse_double(fields[1], row.meta.lon) ||
      !parse_int(fields[2], row.meta.year) || !parse_int(fields[3], row.meta.month) ||
      !parse_int(fields[4], row.meta.day) || !parse_double(fields[5], row.depth) ||
      !parse_double(fields[6], row.speed))
    throw Error("line " + std::to_string(lineno) + ": malformed field");
  return row;
}

}  // namespace

ParseOutcome parse_profiles(std::istream& in, const DepthGrid& grid, const SpeedBand& band) {
  std::string line;
  if (!std::getline(in, line)) throw Error("empty profile file");
  if (trim(line) != "lat,lon,year,month,day,depth_m,speed_mps")
    throw Error("line 1: bad header, expected lat,lon,year,month,day,depth_m,speed_mps");

  ParseOutcome out;
  std::vector<std::pair<double, double>> samples;
  ProfileMeta current;
  bool have_record = false;
  int record_start_line = 0;
  int lineno = 1;

  auto flush = [&]() {
    if (!have_record) return;
    try {
      SoundSpeedProfile p = regrid_profile(samples, grid, current);
      validate_profile(p, band);
      out.set.profiles.push_back(std::move(p));
    } catch (const Error& e) {
      std::ostringstream msg;
      msg << "record at line " << record_start_line << " (lat=" << format_double(current.lat)
          << ", lon=" << format_double(current.lon) << ", " << current.year << "-" << current.month
          << "-" << current.day << "): " << e.what();
      out.record_errors.push_back(msg.str());
    }
    samples.clear();
    have_record = false;
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    CsvRow row = parse_row(line, lineno);
    if (!have_record || !same_record(row.meta, current)) {
      flush();
      current = row.meta;
      have_record = true;
      record_start_line = lineno;
    }
    samples.emplace_back(row.depth, row.speed);
  }
  flush();

  if (out.set.empty() && out.record_errors.empty()) throw Error("profile file has no data rows");
  return out;
}

void write_profiles(std::ostream& out, const ProfileSet& set) {
  out << "lat,lon,year,month,day,depth_m,speed_mps\n";
  for (const auto& p : set.profiles) {
    for (int i = 0; i < p.grid.count; ++i) {
      out << format_double(p.meta.lat) << ',' << format_double(p.meta.lon) << ',' << p.meta.year
          << ',' << p.meta.month << ',' << p.meta.day << ',' << format_double(p.grid.depth(i))
          << ',' << format_double(p.speeds[i]) << '\n';
    }
  }
}

ProfileSet filter_profiles(const ProfileSet& set, const BoundingBox& box,
                           const std::set<int>& months, std::pair<int, int> years) {
  box.validate();
  ProfileSet out;
  for (const auto& p : set.profiles) {
    if (!box.contains(p.meta.lat, p.meta.lon)) continue;
    if (!months.count(p.meta.month)) continue;
    if (p.meta.year < years.first || p.meta.year > years.second) continue;
    out.profiles.push_back(p);
  }
  return out;
}

ProfileSet crop_depth(const ProfileSet& set, double max_depth) {
  const DepthGrid& grid = set.grid();
  double steps = max_depth / grid.spacing;
  long nearest = std::lround(steps);
  if (std::abs(steps - static_cast<double>(nearest)) > 1e-9)
    throw Error("crop depth " + format_double(max_depth) + " m is not on the grid (spacing " +
                format_double(grid.spacing) + " m)");
  if (max_depth > grid.max_depth() + 1e-9)
    throw Error("crop depth exceeds grid maximum " + format_double(grid.max_depth()) + " m");
  int new_count = static_cast<int>(nearest) + 1;
  if (new_count < 2) throw Error("crop depth leaves fewer than 2 grid points");

  DepthGrid cropped(new_count, grid.spacing);
  ProfileSet out;
  out.profiles.reserve(set.size());
  for (const auto& p : set.profiles) {
    SoundSpeedProfile q;
    q.grid = cropped;
    q.speeds = p.speeds.head(new_count);
    q.meta = p.meta;
    out.profiles.push_back(std::move(q));
  }
  return out;
}

double rms_error(const SoundSpeedProfile& a, const SoundSpeedProfile& b) {
  if (!a.grid.compatible(b.grid)) throw Error("rms_error: profiles on different grids");
  return std::sqrt((a.speeds - b.speeds).squaredNorm() / static_cast<double>(a.grid.count));
}

}  // namespace ssinv
