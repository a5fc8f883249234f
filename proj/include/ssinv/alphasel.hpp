#pragma once

#include "ssinv/invert.hpp"

#include <cstdint>
#include <filesystem>

namespace ssinv {

// Dimensionless per-alpha summary of a sweep: block i is the root-misfit
// normalized by the sweep median followed by the prior-normalized
// coefficients x_k / sigma_k.
struct SweepFeatures {
  std::vector<Vector> blocks;
  std::vector<bool> carried; // block copied from the nearest converged entry
  int n_obs = 0;
};

// Throws Error when the sweep has no converged entry.
SweepFeatures extract_features(const SweepResult& sweep, const EofBasis& basis);

// log10(n_obs) / 4, the scalar appended to every window.
double normalized_obs_count(int n_obs);

// Blocks index-k .. index+k (boundary indices duplicated) concatenated,
// then the normalized observation count. `index` is 0-based.
Vector window_input(const SweepFeatures& features, int index, int half_width);

// Small fully connected regressor predicting the reconstruction RMS error
// [m/s] of one sweep entry from its windowed features.
struct AlphaNet {
  std::vector<int> layer_sizes;  // input .. output (1)
  std::vector<Matrix> weights;   // weights[l]: layer_sizes[l+1] x layer_sizes[l]
  std::vector<Vector> biases;
  std::string activation = "tanh";
  Vector input_mean;
  Vector input_std;
  int window_halfwidth = 2;
  std::uint64_t training_seed = 0;

  int input_dim() const { return layer_sizes.empty() ? 0 : layer_sizes.front(); }
  void validate() const;
};

// Normalized affine/tanh layers, linear final layer, clamped at 0.
double mlp_forward(const AlphaNet& net, const Vector& input);

struct AlphaTrainConfig {
  int n_truths = 160;
  // The (swath, sigma_t, ping count) product grid is cycled over truths so
  // the net sees every geometry/noise/data-quantity regime it may be asked
  // to select in. An empty swath list keeps the template geometry.
  std::vector<int> ping_counts = {1, 3, 5, 7, 9};
  std::vector<double> sigma_t_values = {sigma_t_from_spatial(0.01, 1500.0)};
  std::vector<double> swath_values_deg = {100, 110, 120, 130, 140};
  InversionConfig inversion;
  std::vector<int> hidden = {32, 32};
  int window_halfwidth = 2;
  int epochs = 300;
  int batch_size = 32;
  double learning_rate = 1e-2;
  double validation_fraction = 0.2;
};

struct AlphaTrainReport {
  int n_train = 0;
  int n_val = 0;
  double first_epoch_train_loss = 0;
  double final_train_loss = 0;
  double best_val_loss = 0;
  double label_variance = 0;
  int best_epoch = 0;
  bool retried = false;
};

// Generates synthetic truths from the basis prior, simulates surveys, runs
// sweeps, and fits the regressor to the true per-alpha reconstruction
// errors by mini-batch gradient descent. Returns the best-validation net.
// A divergent run is retried once at a tenth of the learning rate.
AlphaNet train_alpha_net(const EofBasis& basis, const Geometry& geom, const AlphaTrainConfig& cfg,
                         Rng& rng, AlphaTrainReport* report = nullptr);

// Index/value of the grid alpha with the lowest predicted error; ties break
// toward larger alpha.
std::pair<double, int> select_alpha(const AlphaNet& net, const SweepFeatures& features,
                                    const std::vector<double>& alpha_grid);

// Discrepancy principle on converged entries: smallest alpha whose
// per-observation misfit reaches sigma_t^2, else the largest converged one.
std::pair<double, int> baseline_select_alpha(const SweepResult& sweep, double sigma_t);

void save_net(const AlphaNet& net, const std::filesystem::path& path);
AlphaNet load_net(const std::filesystem::path& path);

}  // namespace ssinv
