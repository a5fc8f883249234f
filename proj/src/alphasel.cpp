#include "ssinv/alphasel.hpp"

#include "ssinv/util.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>

namespace ssinv {

SweepFeatures extract_features(const SweepResult& sweep, const EofBasis& basis) {
  const int n = static_cast<int>(sweep.entries.size());
  if (n == 0) throw Error("extract_features: empty sweep");

  std::vector<double> converged_roots;
  for (const auto& e : sweep.entries)
    if (e.converged && std::isfinite(e.misfit)) converged_roots.push_back(std::sqrt(e.misfit));
  if (converged_roots.empty()) throw Error("extract_features: sweep has no converged entry");
  double median_root = median_of(converged_roots);

  SweepFeatures f;
  f.n_obs = sweep.n_obs;
  f.blocks.resize(n);
  f.carried.assign(n, false);

  auto block_of = [&](const SweepEntry& e) {
    Vector block(1 + basis.n_eof());
    double root = std::sqrt(e.misfit);
    // All-zero sweeps normalize to 1 (equal misfits sit at the median).
    if (median_root > 0)
      block[0] = root / median_root;
    else
      block[0] = (root == 0) ? 1.0 : root / 1e-30;
    for (int k = 0; k < basis.n_eof(); ++k) block[1 + k] = e.x[k] / basis.sigma[k];
    return block;
  };

  for (int i = 0; i < n; ++i) {
    if (sweep.entries[i].converged) {
      f.blocks[i] = block_of(sweep.entries[i]);
    }
  }
  for (int i = 0; i < n; ++i) {
    if (sweep.entries[i].converged) continue;
    int nearest = -1;
    for (int d = 1; d < n && nearest < 0; ++d) {
      if (i - d >= 0 && sweep.entries[i - d].converged) nearest = i - d;
      else if (i + d < n && sweep.entries[i + d].converged) nearest = i + d;
    }
    f.blocks[i] = f.blocks[nearest];
    f.carried[i] = true;
  }
  return f;
}

double normalized_obs_count(int n_obs) {
  return std::log10(static_cast<double>(std::max(n_obs, 1))) / 4.0;
}

Vector window_input(const SweepFeatures& features, int index, int half_width) {
  const int n = static_cast<int>(features.blocks.size());
  if (n == 0) throw Error("window_input: no features");
  if (index < 0 || index >= n) throw Error("window_input: index out of range");
  if (half_width < 0) throw Error("window_input: negative half width");

  const int block_dim = static_cast<int>(features.blocks.front().size());
  Vector input((2 * half_width + 1) * block_dim + 1);
  int at = 0;
  for (int j = index - half_width; j <= index + half_width; ++j) {
    int jj = std::clamp(j, 0, n - 1); // boundary duplication
    input.segment(at, block_dim) = features.blocks[jj];
    at += block_dim;
  }
  input[at] = normalized_obs_count(features.n_obs);
  return input;
}

void AlphaNet::validate() const {
  if (layer_sizes.size() < 2) throw Error("alpha net needs at least input and output layers");
  if (layer_sizes.back() != 1) throw Error("alpha net output layer must have size 1");
  if (weights.size() != layer_sizes.size() - 1 || biases.size() != weights.size())
    throw Error("alpha net layer count mismatch");
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (weights[l].rows() != layer_sizes[l + 1] || weights[l].cols() != layer_sizes[l] ||
        biases[l].size() != layer_sizes[l + 1])
      throw Error("alpha net weight dimensions inconsistent at layer " + std::to_string(l));
    if (!weights[l].allFinite() || !biases[l].allFinite())
      throw Error("alpha net has non-finite weights");
  }
  if (activation != "tanh") throw Error("unsupported activation: " + activation);
  if (input_mean.size() != layer_sizes.front() || input_std.size() != layer_sizes.front())
    throw Error("alpha net normalization constants do not match input layer");
  if (window_halfwidth < 0) throw Error("alpha net window half-width must be nonnegative");
}

namespace {

double forward_raw(const AlphaNet& net, const Vector& input) {
  if (input.size() != net.input_dim())
    throw Error("mlp_forward: input dimension " + std::to_string(input.size()) +
                " does not match net input " + std::to_string(net.input_dim()));
  Vector a = (input - net.input_mean).cwiseQuotient(net.input_std);
  const std::size_t n_layers = net.weights.size();
  for (std::size_t l = 0; l + 1 < n_layers; ++l)
    a = (net.weights[l] * a + net.biases[l]).array().tanh();
  return (net.weights[n_layers - 1] * a + net.biases[n_layers - 1])[0];
}

}  // namespace

double mlp_forward(const AlphaNet& net, const Vector& input) {
  return std::max(0.0, forward_raw(net, input));
}

namespace {

struct Sample {
  Vector input;
  double label = 0;
};

// One full training run; returns false when the loss went non-finite.
bool run_training(AlphaNet& net, const std::vector<Sample>& train, const std::vector<Sample>& val,
                  const AlphaTrainConfig& cfg, double learning_rate, std::uint64_t shuffle_seed,
                  AlphaTrainReport& report) {
  const std::size_t n_layers = net.weights.size();
  std::vector<Matrix> grad_w(n_layers), vel_w(n_layers);
  std::vector<Vector> grad_b(n_layers), vel_b(n_layers);
  std::vector<Vector> acts(n_layers + 1);
  for (std::size_t l = 0; l < n_layers; ++l) {
    vel_w[l] = Matrix::Zero(net.weights[l].rows(), net.weights[l].cols());
    vel_b[l] = Vector::Zero(net.biases[l].size());
  }
  const double momentum = 0.9;

  auto loss_of = [&](const std::vector<Sample>& samples) {
    double acc = 0;
    for (const auto& s : samples) {
      double d = forward_raw(net, s.input) - s.label;
      acc += d * d;
    }
    return samples.empty() ? 0.0 : acc / static_cast<double>(samples.size());
  };

  std::vector<Matrix> best_w = net.weights;
  std::vector<Vector> best_b = net.biases;
  double best_val = loss_of(val);
  report.best_epoch = 0;

  Rng shuffle_rng(shuffle_seed);
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    // Half-cosine learning-rate decay to a 5% floor.
    double lr_epoch = learning_rate *
                      std::max(0.05, 0.5 * (1.0 + std::cos(std::numbers::pi * epoch /
                                                           std::max(1, cfg.epochs - 1))));
    // Fisher-Yates with our own rng for platform-stable shuffles.
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[shuffle_rng.uniform_int(0, static_cast<int>(i) - 1)]);

    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      std::size_t stop = std::min(order.size(), start + cfg.batch_size);
      for (std::size_t l = 0; l < n_layers; ++l) {
        grad_w[l] = Matrix::Zero(net.weights[l].rows(), net.weights[l].cols());
        grad_b[l] = Vector::Zero(net.biases[l].size());
      }
      for (std::size_t s = start; s < stop; ++s) {
        const Sample& sample = train[order[s]];
        acts[0] = (sample.input - net.input_mean).cwiseQuotient(net.input_std);
        for (std::size_t l = 0; l < n_layers; ++l) {
          Vector z = net.weights[l] * acts[l] + net.biases[l];
          acts[l + 1] = (l + 1 < n_layers) ? Vector(z.array().tanh()) : z;
        }
        // d(squared error)/d(output)
        Vector delta(1);
        delta[0] = 2.0 * (acts[n_layers][0] - sample.label);
        for (std::size_t l = n_layers; l-- > 0;) {
          grad_w[l] += delta * acts[l].transpose();
          grad_b[l] += delta;
          if (l > 0) {
            Vector back = net.weights[l].transpose() * delta;
            delta = back.cwiseProduct(
                (1.0 - acts[l].array().square()).matrix());
          }
        }
      }
      double scale = lr_epoch / static_cast<double>(stop - start);
      for (std::size_t l = 0; l < n_layers; ++l) {
        vel_w[l] = momentum * vel_w[l] - scale * grad_w[l];
        vel_b[l] = momentum * vel_b[l] - scale * grad_b[l];
        net.weights[l] += vel_w[l];
        net.biases[l] += vel_b[l];
      }
    }

    double train_loss = loss_of(train);
    if (!std::isfinite(train_loss)) return false;
    if (epoch == 0) report.first_epoch_train_loss = train_loss;
    report.final_train_loss = train_loss;

    double val_loss = loss_of(val);
    if (val_loss < best_val) {
      best_val = val_loss;
      best_w = net.weights;
      best_b = net.biases;
      report.best_epoch = epoch;
    }
  }

  net.weights = std::move(best_w);
  net.biases = std::move(best_b);
  report.best_val_loss = best_val;
  return true;
}

AlphaNet init_net(const std::vector<int>& layer_sizes, int window_halfwidth, Rng& rng) {
  AlphaNet net;
  net.layer_sizes = layer_sizes;
  net.window_halfwidth = window_halfwidth;
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    int fan_in = layer_sizes[l];
    int fan_out = layer_sizes[l + 1];
    double scale = std::sqrt(6.0 / (fan_in + fan_out));
    Matrix w(fan_out, fan_in);
    for (int r = 0; r < fan_out; ++r)
      for (int c = 0; c < fan_in; ++c) w(r, c) = rng.uniform(-scale, scale);
    net.weights.push_back(std::move(w));
    net.biases.push_back(Vector::Zero(fan_out));
  }
  return net;
}

}  // namespace

AlphaNet train_alpha_net(const EofBasis& basis, const Geometry& geom, const AlphaTrainConfig& cfg,
                         Rng& rng, AlphaTrainReport* report_out) {
  if (cfg.n_truths < 4) throw Error("train_alpha_net: need at least 4 synthetic truths");
  if (cfg.ping_counts.empty()) throw Error("train_alpha_net: empty ping count list");
  if (cfg.sigma_t_values.empty()) throw Error("train_alpha_net: empty sigma_t list");
  for (double s : cfg.sigma_t_values)
    if (!(s >= 0)) throw Error("train_alpha_net: sigma_t values must be nonnegative");
  cfg.inversion.validate();
  validate_geometry(geom, basis.grid);

  const std::uint64_t run_seed = rng.next_u64();
  const int n_alpha = static_cast<int>(cfg.inversion.alpha_grid.size());
  const std::size_t ns = std::max<std::size_t>(1, cfg.swath_values_deg.size());
  const std::size_t nv = cfg.sigma_t_values.size();

  std::vector<Sample> samples;
  samples.reserve(static_cast<std::size_t>(cfg.n_truths) * n_alpha);
  for (int t = 0; t < cfg.n_truths; ++t) {
    Rng truth_rng(derive_seed(run_seed, t));
    Coefficients x_true = sample_coefficients(basis, truth_rng);
    SoundSpeedProfile truth = reconstruct(basis, x_true);
    Geometry g = geom;
    if (!cfg.swath_values_deg.empty())
      g = make_geometry(cfg.swath_values_deg[t % ns], static_cast<int>(geom.beam_angles.size()),
                        geom.bottom_depth, geom.source_depth);
    double sigma_t = cfg.sigma_t_values[(t / ns) % nv];
    int n_ping = cfg.ping_counts[(t / (ns * nv)) % cfg.ping_counts.size()];
    MeasurementSet m;
    try {
      m = simulate_measurements(truth, g, sigma_t, n_ping, truth_rng);
    } catch (const ComputeError&) {
      continue; // a pathological truth that turns every beam
    }
    SweepResult sw = sweep(m, basis, cfg.inversion);
    SweepFeatures features;
    try {
      features = extract_features(sw, basis);
    } catch (const Error&) {
      continue;
    }
    for (int i = 0; i < n_alpha; ++i) {
      const SweepEntry& entry = sw.entries[i];
      if (!entry.x.allFinite()) continue;
      Sample s;
      s.input = window_input(features, i, cfg.window_halfwidth);
      s.label = rms_error(reconstruct(basis, entry.x), truth);
      if (!s.input.allFinite() || !std::isfinite(s.label)) continue;
      samples.push_back(std::move(s));
    }
  }
  if (samples.size() < 16) throw Error("train_alpha_net: too few usable training examples");

  // Shuffle then split off the validation tail.
  Rng split_rng(derive_seed(run_seed, 1u << 20));
  for (std::size_t i = samples.size(); i > 1; --i)
    std::swap(samples[i - 1], samples[split_rng.uniform_int(0, static_cast<int>(i) - 1)]);
  std::size_t n_val = std::max<std::size_t>(1, static_cast<std::size_t>(
                                                   samples.size() * cfg.validation_fraction));
  std::vector<Sample> val(samples.end() - n_val, samples.end());
  samples.resize(samples.size() - n_val);

  AlphaTrainReport report;
  report.n_train = static_cast<int>(samples.size());
  report.n_val = static_cast<int>(val.size());
  {
    std::vector<double> labels;
    for (const auto& s : val) labels.push_back(s.label);
    double m = mean_of(labels);
    double acc = 0;
    for (double v : labels) acc += (v - m) * (v - m);
    report.label_variance = acc / static_cast<double>(labels.size());
  }

  const int block_dim = static_cast<int>(samples.front().input.size());
  std::vector<int> layer_sizes;
  layer_sizes.push_back(block_dim);
  for (int h : cfg.hidden) layer_sizes.push_back(h);
  layer_sizes.push_back(1);

  // Input normalization from the training split.
  Vector mean = Vector::Zero(block_dim);
  for (const auto& s : samples) mean += s.input;
  mean /= static_cast<double>(samples.size());
  Vector var = Vector::Zero(block_dim);
  for (const auto& s : samples) var += (s.input - mean).cwiseAbs2();
  var /= static_cast<double>(samples.size());
  Vector stddev = var.cwiseSqrt().cwiseMax(1e-9);

  AlphaNet net;
  double lr = cfg.learning_rate;
  for (int attempt = 0; attempt < 2; ++attempt) {
    Rng init_rng(derive_seed(run_seed, 2000 + attempt));
    net = init_net(layer_sizes, cfg.window_halfwidth, init_rng);
    net.input_mean = mean;
    net.input_std = stddev;
    net.training_seed = run_seed;
    if (run_training(net, samples, val, cfg, lr, derive_seed(run_seed, 3000 + attempt), report)) {
      net.validate();
      if (report_out) {
        report.retried = attempt > 0;
        *report_out = report;
      }
      return net;
    }
    lr *= 0.1;
  }
  throw ComputeError("train_alpha_net: training diverged twice");
}

std::pair<double, int> select_alpha(const AlphaNet& net, const SweepFeatures& features,
                                    const std::vector<double>& alpha_grid) {
  if (features.blocks.size() != alpha_grid.size())
    throw Error("select_alpha: features do not cover the alpha grid");
  int best = -1;
  double best_pred = 0;
  for (int i = 0; i < static_cast<int>(alpha_grid.size()); ++i) {
    double pred = mlp_forward(net, window_input(features, i, net.window_halfwidth));
    if (best < 0 || pred <= best_pred) { // ties break toward larger alpha
      best = i;
      best_pred = pred;
    }
  }
  return {alpha_grid[best], best};
}

std::pair<double, int> baseline_select_alpha(const SweepResult& sweep, double sigma_t) {
  int last_converged = -1;
  for (int i = 0; i < static_cast<int>(sweep.entries.size()); ++i) {
    const SweepEntry& e = sweep.entries[i];
    if (!e.converged) continue;
    last_converged = i;
    if (e.misfit >= sigma_t * sigma_t) return {e.alpha, i};
  }
  if (last_converged < 0) throw Error("baseline_select_alpha: no converged entries");
  return {sweep.entries[last_converged].alpha, last_converged};
}

namespace {
nlohmann::json vec_json(const Vector& v) {
  nlohmann::json a = nlohmann::json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Vector vec_from(const nlohmann::json& a) {
  Vector v(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<int>(i)] = a[i].get<double>();
  return v;
}
}  // namespace

void save_net(const AlphaNet& net, const std::filesystem::path& path) {
  net.validate();
  nlohmann::json j;
  j["format"] = "ssinv-alpha-net";
  j["version"] = 1;
  j["layer_sizes"] = net.layer_sizes;
  j["activation"] = net.activation;
  j["window_halfwidth"] = net.window_halfwidth;
  j["training_seed"] = net.training_seed;
  j["input_mean"] = vec_json(net.input_mean);
  j["input_std"] = vec_json(net.input_std);
  nlohmann::json layers = nlohmann::json::array();
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    nlohmann::json rows = nlohmann::json::array();
    for (int r = 0; r < net.weights[l].rows(); ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (int c = 0; c < net.weights[l].cols(); ++c) row.push_back(net.weights[l](r, c));
      rows.push_back(row);
    }
    layers.push_back({{"weights", rows}, {"bias", vec_json(net.biases[l])}});
  }
  j["layers"] = layers;

  std::ofstream out(path);
  if (!out) throw Error("cannot write net file " + path.string());
  out << j.dump(1) << '\n';
}

AlphaNet load_net(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open net file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error("net file " + path.string() + ": " + e.what());
  }
  if (j.value("format", "") != "ssinv-alpha-net")
    throw Error("net file " + path.string() + ": unrecognized format");
  if (j.value("version", 0) != 1) throw Error("net file " + path.string() + ": unsupported version");

  AlphaNet net;
  net.layer_sizes = j["layer_sizes"].get<std::vector<int>>();
  net.activation = j["activation"].get<std::string>();
  net.window_halfwidth = j["window_halfwidth"].get<int>();
  net.training_seed = j["training_seed"].get<std::uint64_t>();
  net.input_mean = vec_from(j["input_mean"]);
  net.input_std = vec_from(j["input_std"]);
  for (const auto& layer : j["layers"]) {
    const auto& rows = layer["weights"];
    Matrix w(rows.size(), rows.empty() ? 0 : rows[0].size());
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (std::size_t c = 0; c < rows[r].size(); ++c)
        w(static_cast<int>(r), static_cast<int>(c)) = rows[r][c].get<double>();
    net.weights.push_back(std::move(w));
    net.biases.push_back(vec_from(layer["bias"]));
  }
  net.validate();
  return net;
}

}  // namespace ssinv
