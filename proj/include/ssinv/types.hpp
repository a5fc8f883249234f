#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace ssinv {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Invalid input: bad files, incompatible arguments, violated preconditions.
// The CLI maps this to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A computation that could not be completed (e.g. no inversion converged).
// The CLI maps this to exit code 2.
class ComputeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Uniform depth grid starting at the surface: depth(i) = i * spacing.
struct DepthGrid {
  int count = 0;      // K
  double spacing = 0; // [m]

  DepthGrid() = default;
  DepthGrid(int count_, double spacing_);

  // Builds from explicit depths; rejects non-uniform spacing (> 1e-9 m).
  static DepthGrid from_depths(const std::vector<double>& depths);

  double depth(int i) const { return i * spacing; }
  double max_depth() const { return (count - 1) * spacing; }
  std::vector<double> depths() const;

  bool compatible(const DepthGrid& other) const {
    return count == other.count && std::abs(spacing - other.spacing) <= 1e-9;
  }
};

struct ProfileMeta {
  double lat = 0;
  double lon = 0;
  int year = 0;
  int month = 0;
  int day = 0;
  bool synthetic = false;
};

struct SoundSpeedProfile {
  DepthGrid grid;
  Vector speeds; // [m/s], length grid.count
  ProfileMeta meta;
};

// Ordered profiles sharing one grid. May be empty as a value; operations
// that need members check for themselves.
struct ProfileSet {
  std::vector<SoundSpeedProfile> profiles;

  bool empty() const { return profiles.empty(); }
  std::size_t size() const { return profiles.size(); }
  const DepthGrid& grid() const;
};

struct BoundingBox {
  double lat_min = 0, lat_max = 0;
  double lon_min = 0, lon_max = 0;

  void validate() const;
  bool contains(double lat, double lon) const {
    return lat >= lat_min && lat <= lat_max && lon >= lon_min && lon <= lon_max;
  }
};

}  // namespace ssinv
