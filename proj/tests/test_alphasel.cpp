#include "ssinv/alphasel.hpp"

#include "ssinv/eof.hpp"
#include "ssinv/synth.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <vector>

using namespace ssinv;

namespace {

// Hand-built sweep: misfits 1e-8/4e-8/9e-8, simple coefficient vectors.
SweepResult tiny_sweep() {
  SweepResult s;
  s.n_obs = 100;
  for (int i = 0; i < 3; ++i) {
    SweepEntry e;
    e.alpha = std::pow(10.0, -4 + i);
    e.x = (Coefficients(2) << 1.0 * (i + 1), -2.0).finished();
    e.misfit = 1e-8 * (i + 1) * (i + 1);
    e.prior = 1.0;
    e.converged = true;
    s.entries.push_back(e);
  }
  return s;
}

EofBasis tiny_basis() {
  EofBasis b;
  b.grid = DepthGrid(2, 10.0);
  b.mean = Vector::Constant(2, 1500.0);
  b.eofs = Matrix::Identity(2, 2);
  b.sigma = (Vector(2) << 2.0, 1.0).finished();
  b.n_training = 4;
  return b;
}

AlphaNet constant_net(int input_dim, double value, int half_width) {
  AlphaNet net;
  net.layer_sizes = {input_dim, 1};
  net.weights = {Matrix::Zero(1, input_dim)};
  net.biases = {(Vector(1) << value).finished()};
  net.input_mean = Vector::Zero(input_dim);
  net.input_std = Vector::Ones(input_dim);
  net.window_halfwidth = half_width;
  return net;
}

}  // namespace

TEST_CASE("features normalize misfit by the sweep median") {
  auto sweep = tiny_sweep();
  auto basis = tiny_basis();
  auto f = extract_features(sweep, basis);
  REQUIRE(f.blocks.size() == 3);
  CHECK(f.n_obs == 100);
  // Root misfits 1e-4, 2e-4, 3e-4; median 2e-4.
  CHECK(f.blocks[0][0] == doctest::Approx(0.5));
  CHECK(f.blocks[1][0] == doctest::Approx(1.0));
  CHECK(f.blocks[2][0] == doctest::Approx(1.5));
  // Coefficients normalized by sigma.
  CHECK(f.blocks[0][1] == doctest::Approx(0.5));  // 1 / 2
  CHECK(f.blocks[0][2] == doctest::Approx(-2.0)); // -2 / 1
  CHECK(f.blocks[2][1] == doctest::Approx(1.5));  // 3 / 2
  for (bool c : f.carried) CHECK_FALSE(c);
}

TEST_CASE("all-equal misfits make every normalized misfit one") {
  auto sweep = tiny_sweep();
  for (auto& e : sweep.entries) {
    e.misfit = 7e-9;
    e.x = Coefficients::Zero(2);
  }
  auto f = extract_features(sweep, tiny_basis());
  for (const auto& blk : f.blocks) {
    CHECK(blk[0] == doctest::Approx(1.0));
    CHECK(blk[1] == 0.0);
    CHECK(blk[2] == 0.0);
  }
}

TEST_CASE("failed entries borrow the nearest converged block") {
  auto sweep = tiny_sweep();
  sweep.entries[1].converged = false;
  sweep.entries[1].misfit = std::nan("");
  sweep.entries[1].x = Coefficients::Constant(2, std::nan(""));
  auto f = extract_features(sweep, tiny_basis());
  REQUIRE(f.carried.size() == 3);
  CHECK_FALSE(f.carried[0]);
  CHECK(f.carried[1]);
  CHECK_FALSE(f.carried[2]);
  CHECK(f.blocks[1] == f.blocks[0]); // nearest converged neighbor below

  SweepResult none = tiny_sweep();
  for (auto& e : none.entries) e.converged = false;
  CHECK_THROWS_AS(extract_features(none, tiny_basis()), Error);
}

TEST_CASE("window duplicates boundary blocks exactly half-width times") {
  auto f = extract_features(tiny_sweep(), tiny_basis());
  const int dim = 3; // 1 misfit + 2 coefficients
  double n_scalar = normalized_obs_count(100);

  SUBCASE("k = 0 is the block plus the observation count") {
    Vector w = window_input(f, 1, 0);
    REQUIRE(w.size() == dim + 1);
    CHECK(w.head(dim) == f.blocks[1]);
    CHECK(w[dim] == n_scalar);
  }

  SUBCASE("first index duplicates the first block") {
    Vector w = window_input(f, 0, 2);
    REQUIRE(w.size() == 5 * dim + 1);
    CHECK(w.segment(0 * dim, dim) == f.blocks[0]);
    CHECK(w.segment(1 * dim, dim) == f.blocks[0]);
    CHECK(w.segment(2 * dim, dim) == f.blocks[0]);
    CHECK(w.segment(3 * dim, dim) == f.blocks[1]);
    CHECK(w.segment(4 * dim, dim) == f.blocks[2]);
  }

  SUBCASE("last index duplicates the last block") {
    Vector w = window_input(f, 2, 1);
    REQUIRE(w.size() == 3 * dim + 1);
    CHECK(w.segment(0 * dim, dim) == f.blocks[1]);
    CHECK(w.segment(1 * dim, dim) == f.blocks[2]);
    CHECK(w.segment(2 * dim, dim) == f.blocks[2]);
  }

  SUBCASE("duplicate counts are exact for k in 0..3") {
    for (int k = 0; k <= 3; ++k) {
      Vector w_first = window_input(f, 0, k);
      Vector w_last = window_input(f, 2, k);
      int first_dups = 0, last_dups = 0;
      for (int j = 0; j < 2 * k + 1; ++j) {
        if (w_first.segment(j * dim, dim) == f.blocks[0]) ++first_dups;
        if (w_last.segment(j * dim, dim) == f.blocks[2]) ++last_dups;
      }
      // k duplicated copies plus the genuine boundary block itself.
      CHECK(first_dups == k + 1);
      CHECK(last_dups == k + 1);
      // Interior-facing entries are genuine neighbors, not duplicates.
      Vector w_mid = window_input(f, 1, 1);
      CHECK(w_mid.segment(0, dim) == f.blocks[0]);
      CHECK(w_mid.segment(dim, dim) == f.blocks[1]);
      CHECK(w_mid.segment(2 * dim, dim) == f.blocks[2]);
    }
  }

  SUBCASE("out-of-range index is rejected") {
    CHECK_THROWS_AS(window_input(f, -1, 1), Error);
    CHECK_THROWS_AS(window_input(f, 3, 1), Error);
  }
}

TEST_CASE("normalized_obs_count is the scaled decade") {
  CHECK(normalized_obs_count(10000) == doctest::Approx(1.0));
  CHECK(normalized_obs_count(100) == doctest::Approx(0.5));
  CHECK(normalized_obs_count(500) == doctest::Approx(std::log10(500.0) / 4.0));
}

TEST_CASE("mlp_forward on hand-checkable nets") {
  // Zero weights: output is the bias, clamped at zero.
  auto net = constant_net(4, -0.5, 1);
  CHECK(mlp_forward(net, Vector::Zero(4)) == 0.0);
  net.biases[0][0] = 0.75;
  CHECK(mlp_forward(net, Vector::Ones(4)) == 0.75);

  // One tanh unit: out = 2 tanh(x0 + x1) - 0.1.
  AlphaNet one;
  one.layer_sizes = {2, 1, 1};
  one.weights = {Matrix::Ones(1, 2), Matrix::Constant(1, 1, 2.0)};
  one.biases = {Vector::Zero(1), (Vector(1) << -0.1).finished()};
  one.input_mean = Vector::Zero(2);
  one.input_std = Vector::Ones(2);
  one.window_halfwidth = 0;
  Vector in = (Vector(2) << 0.3, 0.4).finished();
  CHECK(mlp_forward(one, in) == doctest::Approx(2.0 * std::tanh(0.7) - 0.1));

  // Input standardization happens before the first layer.
  one.input_mean = (Vector(2) << 0.3, 0.4).finished();
  CHECK(mlp_forward(one, in) == doctest::Approx(std::max(0.0, 2.0 * std::tanh(0.0) - 0.1)));

  CHECK_THROWS_AS(mlp_forward(one, Vector::Zero(3)), Error);
}

TEST_CASE("select_alpha takes the argmin and prefers more regularization on ties") {
  auto f = extract_features(tiny_sweep(), tiny_basis());
  std::vector<double> grid = {1e-4, 1e-3, 1e-2};

  auto flat = constant_net(3 + 1, 1.0, 0);
  auto [a_flat, i_flat] = select_alpha(flat, f, grid);
  CHECK(i_flat == 2);
  CHECK(a_flat == 1e-2);

  // A net keyed to the normalized misfit picks the entry whose misfit block
  // is closest to zero: index 0 here.
  AlphaNet keyed = constant_net(4, 0.0, 0);
  keyed.weights[0](0, 0) = 1.0;
  auto [a_min, i_min] = select_alpha(keyed, f, grid);
  CHECK(i_min == 0);
  CHECK(a_min == 1e-4);

  // Rescaling all predictions leaves the choice unchanged.
  keyed.weights[0] *= 7.0;
  CHECK(select_alpha(keyed, f, grid).second == i_min);
}

TEST_CASE("baseline selection follows the discrepancy principle") {
  auto sweep = tiny_sweep(); // misfits 1e-8, 4e-8, 9e-8

  SUBCASE("zero noise selects the least regularized entry") {
    auto [a, i] = baseline_select_alpha(sweep, 0.0);
    CHECK(i == 0);
    CHECK(a == sweep.entries[0].alpha);
  }
  SUBCASE("threshold inside the range picks the straddling entry") {
    auto [a, i] = baseline_select_alpha(sweep, 1.5e-4); // sigma^2 = 2.25e-8
    CHECK(i == 1);
  }
  SUBCASE("threshold above every misfit falls back to the largest alpha") {
    auto [a, i] = baseline_select_alpha(sweep, 1e-3);
    CHECK(i == 2);
  }
  SUBCASE("unconverged entries are skipped") {
    sweep.entries[0].converged = false;
    auto [a, i] = baseline_select_alpha(sweep, 0.0);
    CHECK(i == 1);
  }
}

TEST_CASE("training fits the sweep-to-error regression") {
  SynthOceanSpec spec;
  Rng ocean_rng(31);
  auto ocean = generate_ocean(spec, ocean_rng);
  auto basis = build_basis(ocean, 4);
  auto geom = make_geometry(120.0, 25, 300.0);

  AlphaTrainConfig cfg;
  cfg.n_truths = 12;
  cfg.ping_counts = {1};
  cfg.sigma_t_values = {sigma_t_from_spatial(0.01, 1500.0)};
  cfg.swath_values_deg.clear(); // keep the template geometry
  cfg.hidden = {8};
  cfg.window_halfwidth = 1;
  cfg.epochs = 40;
  cfg.batch_size = 16;

  AlphaTrainReport report;
  Rng rng(777);
  auto net = train_alpha_net(basis, geom, cfg, rng, &report);
  CHECK_NOTHROW(net.validate());
  CHECK(net.window_halfwidth == 1);
  CHECK(net.input_dim() == 3 * (1 + 4) + 1);

  CHECK(report.n_train + report.n_val == 12 * 13);
  CHECK(report.final_train_loss < report.first_epoch_train_loss);
  CHECK(report.best_val_loss < report.label_variance); // beats predicting the mean

  SUBCASE("training is deterministic under the seed") {
    Rng rng2(777);
    auto net2 = train_alpha_net(basis, geom, cfg, rng2, nullptr);
    REQUIRE(net2.weights.size() == net.weights.size());
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
      CHECK(net2.weights[l] == net.weights[l]);
      CHECK(net2.biases[l] == net.biases[l]);
    }
  }

  SUBCASE("net files round-trip bit-exactly") {
    auto path = std::filesystem::temp_directory_path() / "ssinv_test_net.json";
    save_net(net, path);
    auto back = load_net(path);
    CHECK(back.layer_sizes == net.layer_sizes);
    CHECK(back.window_halfwidth == net.window_halfwidth);
    CHECK(back.input_mean == net.input_mean);
    CHECK(back.input_std == net.input_std);
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
      CHECK(back.weights[l] == net.weights[l]);
      CHECK(back.biases[l] == net.biases[l]);
    }
    std::filesystem::remove(path);
  }

  SUBCASE("the trained net selects a grid entry end to end") {
    Rng sim_rng(5);
    auto x = sample_coefficients(basis, sim_rng);
    auto truth = reconstruct(basis, x);
    auto m = simulate_measurements(truth, geom, cfg.sigma_t_values[0], 1, sim_rng);
    auto sw = sweep(m, basis, cfg.inversion);
    auto f = extract_features(sw, basis);
    auto [alpha, idx] = select_alpha(net, f, cfg.inversion.alpha_grid);
    CHECK(idx >= 0);
    CHECK(idx < static_cast<int>(cfg.inversion.alpha_grid.size()));
    CHECK(alpha == cfg.inversion.alpha_grid[idx]);
  }
}

TEST_CASE("training rejects invalid configs") {
  SynthOceanSpec spec;
  spec.profile_count = 30;
  Rng ocean_rng(32);
  auto ocean = generate_ocean(spec, ocean_rng);
  auto basis = build_basis(ocean, 3);
  auto geom = make_geometry(120.0, 10, 300.0);
  Rng rng(1);

  AlphaTrainConfig cfg;
  cfg.sigma_t_values.clear();
  CHECK_THROWS_AS(train_alpha_net(basis, geom, cfg, rng, nullptr), Error);
  cfg = AlphaTrainConfig{};
  cfg.sigma_t_values = {-1e-5};
  CHECK_THROWS_AS(train_alpha_net(basis, geom, cfg, rng, nullptr), Error);
  cfg = AlphaTrainConfig{};
  cfg.n_truths = 0;
  CHECK_THROWS_AS(train_alpha_net(basis, geom, cfg, rng, nullptr), Error);
}
