#include "ssinv/eof.hpp"

#include "ssinv/util.hpp"

#include <nlohmann/json.hpp>

#include <Eigen/SVD>

#include <cmath>
#include <fstream>

namespace ssinv {

namespace {
constexpr double kDegenerateSv = 1e-12;
constexpr double kOrthoTol = 1e-10;
}  // namespace

void validate_basis(const EofBasis& basis) {
  const int k = basis.grid.count;
  const int n = basis.n_eof();
  if (basis.mean.size() != k) throw Error("basis mean length does not match grid");
  if (basis.eofs.rows() != k) throw Error("basis EOF rows do not match grid");
  if (basis.sigma.size() != n) throw Error("basis sigma length does not match EOF count");
  if (n < 1) throw Error("basis has no EOFs");
  if (n > std::min(k, basis.n_training))
    throw Error("basis EOF count exceeds min(grid size, training count)");

  Matrix gram = basis.eofs.transpose() * basis.eofs;
  double ortho = (gram - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
  if (ortho > kOrthoTol)
    throw Error("basis columns not orthonormal (max deviation " + format_double(ortho) + ")");

  for (int j = 0; j + 1 < n; ++j) {
    if (basis.sigma[j + 1] > basis.sigma[j] * (1 + 1e-12))
      throw Error("basis sigma not non-increasing at index " + std::to_string(j));
  }
  for (int j = 0; j < n; ++j) {
    if (!(basis.sigma[j] > 0)) throw Error("basis sigma must be positive");
    for (int i = 0; i < k; ++i) {
      double u = basis.eofs(i, j);
      if (std::abs(u) > 1e-12) {
        if (u < 0) throw Error("sign convention violated in EOF " + std::to_string(j));
        break;
      }
    }
  }
}

EofBasis build_basis(const ProfileSet& train, int n_eof) {
  if (n_eof < 1) throw Error("EOF count must be positive");
  const std::size_t n = train.size();
  if (n < static_cast<std::size_t>(n_eof) + 1)
    throw Error("need at least " + std::to_string(n_eof + 1) + " training profiles for " +
                std::to_string(n_eof) + " EOFs, got " + std::to_string(n));
  const DepthGrid& grid = train.grid();
  const int k = grid.count;
  if (n_eof > k) throw Error("EOF count exceeds grid size");
  for (const auto& p : train.profiles) {
    if (!p.grid.compatible(grid)) throw Error("training profiles do not share one grid");
  }

  Vector mean = Vector::Zero(k);
  for (const auto& p : train.profiles) mean += p.speeds;
  mean /= static_cast<double>(n);

  Matrix centered(k, n);
  for (std::size_t j = 0; j < n; ++j) centered.col(j) = train.profiles[j].speeds - mean;

  Eigen::BDCSVD<Matrix> svd(centered, Eigen::ComputeThinU);
  const Vector& sv = svd.singularValues();
  if (sv.size() == 0 || sv.maxCoeff() < kDegenerateSv)
    throw Error("degenerate basis: training set has no variance");

  EofBasis basis;
  basis.grid = grid;
  basis.mean = std::move(mean);
  basis.n_training = static_cast<int>(n);
  basis.eofs = svd.matrixU().leftCols(n_eof);

  // Sign convention: first nonzero entry of each column nonnegative.
  for (int j = 0; j < n_eof; ++j) {
    for (int i = 0; i < k; ++i) {
      double u = basis.eofs(i, j);
      if (std::abs(u) > 1e-12) {
        if (u < 0) basis.eofs.col(j) = -basis.eofs.col(j);
        break;
      }
    }
  }

  // Coefficient standard deviations over the training set, N-1 denominator.
  Matrix coeffs = basis.eofs.transpose() * centered; // n_eof x n
  basis.sigma.resize(n_eof);
  for (int j = 0; j < n_eof; ++j) {
    double m = coeffs.row(j).mean();
    basis.sigma[j] =
        std::sqrt((coeffs.row(j).array() - m).square().sum() / static_cast<double>(n - 1));
  }
  return basis;
}

Coefficients project(const EofBasis& basis, const SoundSpeedProfile& p) {
  if (!p.grid.compatible(basis.grid)) throw Error("project: profile grid does not match basis");
  return basis.eofs.transpose() * (p.speeds - basis.mean);
}

SoundSpeedProfile reconstruct(const EofBasis& basis, const Coefficients& x) {
  if (x.size() != basis.n_eof())
    throw Error("reconstruct: coefficient length " + std::to_string(x.size()) +
                " does not match basis with " + std::to_string(basis.n_eof()) + " EOFs");
  SoundSpeedProfile p;
  p.grid = basis.grid;
  p.speeds = basis.mean + basis.eofs * x;
  p.meta.synthetic = true;
  return p;
}

double log_prior(const EofBasis& basis, const Coefficients& x) {
  if (x.size() != basis.n_eof()) throw Error("log_prior: coefficient length mismatch");
  double acc = 0;
  for (int j = 0; j < x.size(); ++j) {
    double s = basis.sigma[j];
    if (!(s > 0)) throw Error("log_prior: sigma must be positive");
    acc += (x[j] / s) * (x[j] / s);
  }
  return acc;
}

Coefficients sample_coefficients(const EofBasis& basis, Rng& rng) {
  Coefficients x(basis.n_eof());
  for (int j = 0; j < x.size(); ++j) x[j] = rng.normal(0.0, basis.sigma[j]);
  return x;
}

namespace {
nlohmann::json vector_to_json(const Vector& v) {
  nlohmann::json a = nlohmann::json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Vector vector_from_json(const nlohmann::json& a) {
  Vector v(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<int>(i)] = a[i].get<double>();
  return v;
}
}  // namespace

void save_basis(const EofBasis& basis, const std::filesystem::path& path) {
  nlohmann::json j;
  j["format"] = "ssinv-eof-basis";
  j["version"] = 1;
  j["grid"] = {{"count", basis.grid.count}, {"spacing_m", basis.grid.spacing}};
  j["n_training"] = basis.n_training;
  j["mean"] = vector_to_json(basis.mean);
  j["sigma"] = vector_to_json(basis.sigma);
  nlohmann::json cols = nlohmann::json::array();
  for (int c = 0; c < basis.eofs.cols(); ++c) cols.push_back(vector_to_json(basis.eofs.col(c)));
  j["eofs"] = cols;

  std::ofstream out(path);
  if (!out) throw Error("cannot write basis file " + path.string());
  out << j.dump(1) << '\n';
}

EofBasis load_basis(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open basis file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error("basis file " + path.string() + ": " + e.what());
  }
  if (j.value("format", "") != "ssinv-eof-basis")
    throw Error("basis file " + path.string() + ": unrecognized format");
  if (j.value("version", 0) != 1)
    throw Error("basis file " + path.string() + ": unsupported version");

  EofBasis basis;
  basis.grid = DepthGrid(j["grid"]["count"].get<int>(), j["grid"]["spacing_m"].get<double>());
  basis.n_training = j["n_training"].get<int>();
  basis.mean = vector_from_json(j["mean"]);
  basis.sigma = vector_from_json(j["sigma"]);
  const auto& cols = j["eofs"];
  if (cols.empty()) throw Error("basis file has no EOF columns");
  basis.eofs.resize(basis.grid.count, static_cast<int>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c)
    basis.eofs.col(static_cast<int>(c)) = vector_from_json(cols[c]);
  validate_basis(basis);
  return basis;
}

}  // namespace ssinv
