#pragma once

#include "ssinv/rng.hpp"
#include "ssinv/types.hpp"

#include <filesystem>

namespace ssinv {

using Coefficients = Vector;

// Truncated EOF basis of a training set: orthonormal columns of `eofs`
// span the dominant anomaly directions about `mean`; `sigma` holds the
// per-coefficient standard deviations of the training projections.
struct EofBasis {
  DepthGrid grid;
  Vector mean;    // K
  Matrix eofs;    // K x n_eof
  Vector sigma;   // n_eof, non-increasing
  int n_training = 0;

  int n_eof() const { return static_cast<int>(eofs.cols()); }
};

// Checks orthonormality (1e-10), sigma ordering, dimensions and the sign
// convention; throws Error on violation.
void validate_basis(const EofBasis& basis);

// SVD of the centered training matrix; columns ordered by decreasing
// singular value, each flipped so its first nonzero entry is nonnegative.
// Throws Error on too few profiles or a zero-variance training set.
EofBasis build_basis(const ProfileSet& train, int n_eof);

// x = U^T (p - mean).
Coefficients project(const EofBasis& basis, const SoundSpeedProfile& p);

// mean + U x, metadata marked synthetic.
SoundSpeedProfile reconstruct(const EofBasis& basis, const Coefficients& x);

// Sum of x_k^2 / sigma_k^2 (the regularizer without its weight).
double log_prior(const EofBasis& basis, const Coefficients& x);

// Independent zero-mean Gaussian draw per coefficient with stddev sigma_k.
Coefficients sample_coefficients(const EofBasis& basis, Rng& rng);

// JSON persistence; exact round trip at stored precision.
void save_basis(const EofBasis& basis, const std::filesystem::path& path);
EofBasis load_basis(const std::filesystem::path& path);

}  // namespace ssinv
