// Acceptance harness: end-to-end numerical claims of the inversion
// pipeline, one PASS/FAIL line per criterion, nonzero exit when any
// criterion fails.
//
// argv[1]: path to the ssinv CLI binary (used by the determinism check).
//
// Everything is seeded from one master seed, so every number printed here
// is reproducible run to run and machine to machine.

#include "oracles.hpp"

#include "ssinv/alphasel.hpp"
#include "ssinv/eof.hpp"
#include "ssinv/experiment.hpp"
#include "ssinv/forward.hpp"
#include "ssinv/invert.hpp"
#include "ssinv/profiles.hpp"
#include "ssinv/synth.hpp"
#include "ssinv/util.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

using namespace ssinv;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint64_t kSeed = 20250801;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string strf(const char* format, ...) {
  va_list args;
  va_start(args, format);
  char buf[1024];
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

struct Check {
  bool ok = false;
  std::string detail;
};

// Spearman correlation between axis position (quality ascending with the
// index) and the error rank, required <= -0.9. Evaluated in exact integer
// arithmetic: rho <= -0.9  <=>  60 sum d^2 >= 19 n (n^2 - 1).
struct Trend {
  bool ok = false;
  double rho = 0;
};

Trend trend_down(const std::vector<double>& errs) {
  const int n = static_cast<int>(errs.size());
  long long sd2 = 0;
  for (int i = 0; i < n; ++i) {
    int rank = 1;
    for (int j = 0; j < n; ++j) {
      if (errs[j] < errs[i]) ++rank;
      if (j != i && errs[j] == errs[i]) return {false, 0.0};  // tie: no clean rank
    }
    const long long d = (i + 1) - rank;
    sd2 += d * d;
  }
  const long long nn = static_cast<long long>(n) * n * n - n;
  Trend t;
  t.ok = 60 * sd2 >= 19 * nn;
  t.rho = 1.0 - 6.0 * static_cast<double>(sd2) / static_cast<double>(nn);
  return t;
}

std::string joined(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += " ";
    s += strf("%.4f", v[i]);
  }
  return s;
}

ExperimentConfig make_config(int alpha_count, const json& training) {
  json j = {
      {"seed", kSeed},
      {"inversion",
       {{"alpha_min", 1e-13}, {"alpha_max", 1e-3}, {"alpha_count", alpha_count}}},
  };
  if (!training.is_null()) j["training"] = training;
  return config_from_json(j);
}

// ---- criterion 1: forward model vs fine-step oracle -------------------

Check criterion1(const Datasets& data) {
  const auto t0 = Clock::now();
  Geometry geom;
  geom.bottom_depth = 300.0;
  geom.source_depth = 0.0;
  std::vector<const SoundSpeedProfile*> pool;
  for (const auto& p : data.train.profiles) pool.push_back(&p);
  for (const auto& p : data.test.profiles) pool.push_back(&p);

  Rng rng(derive_seed(kSeed, 101));
  double max_rel = 0;
  int turned = 0;
  for (int i = 0; i < 1000; ++i) {
    const SoundSpeedProfile& p = *pool[i % pool.size()];
    const double theta = rng.uniform(-1.4, 1.4);
    const RayResult model = layered_travel_time(p, theta, geom);
    const oracles::RayOracle ref = oracles::trace_fine_beam(p, theta, geom);
    if ((model.status == RayStatus::turned) != ref.turned)
      return {false, strf("turned-status disagreement at pair %d (theta %.4f)", i, theta)};
    if (ref.turned) {
      ++turned;
      continue;
    }
    const double oracle_time = 2.0 * ref.one_way_time;
    max_rel = std::max(max_rel, std::abs(model.time - oracle_time) / oracle_time);
  }
  const double dt = seconds_since(t0);
  return {max_rel <= 1e-9 && dt < 10.0,
          strf("max rel deviation %.2e vs fine-step oracle over 1000 pairs (%d turned) in %.1f s",
               max_rel, turned, dt)};
}

// ---- criterion 2: travel time independent of layer order --------------

Check criterion2() {
  const DepthGrid grid(6, 60.0);
  Rng rng(derive_seed(kSeed, 102));
  double max_dev = 0;
  for (int c = 0; c < 100; ++c) {
    SoundSpeedProfile p;
    p.grid = grid;
    p.speeds.resize(6);
    for (int i = 0; i < 6; ++i) p.speeds[i] = 1500.0 + rng.uniform(-25.0, 25.0);
    // Fixed ray parameter below critical for every layer order.
    const double ray_p = std::sin(rng.uniform(0.15, 1.2)) / 1540.0;
    const RayResult ref = trace_ray_parameter(p, ray_p, 0.0, 300.0);
    if (ref.status != RayStatus::ok) return {false, "reference ray unexpectedly turned"};
    std::vector<int> idx = {0, 1, 2, 3, 4};
    do {
      SoundSpeedProfile q = p;
      for (int i = 0; i < 5; ++i) q.speeds[i] = p.speeds[idx[i]];
      const RayResult r = trace_ray_parameter(q, ray_p, 0.0, 300.0);
      if (r.status != RayStatus::ok) return {false, "permutation changed turning status"};
      max_dev = std::max(max_dev, std::abs(r.time - ref.time));
    } while (std::next_permutation(idx.begin(), idx.end()));
  }
  return {max_dev <= 1e-12,
          strf("max travel-time change %.2e s over 100 profiles x 120 layer permutations",
               max_dev)};
}

// ---- criterion 3: noiseless in-span recovery --------------------------

// Deep-water scene whose two modes (offset and tilt of a strong positive
// gradient) both carry a clear travel-time signature, so the pinned
// alpha = 1e-8 leaves the noiseless data term dominant.
Check criterion3() {
  const auto t0 = Clock::now();
  const DepthGrid grid(2001, 2.0);
  Vector mean(grid.count), tilt(grid.count);
  for (int i = 0; i < grid.count; ++i) {
    const double z = grid.depth(i);
    mean[i] = 1460.0 + 0.02 * z;
    tilt[i] = z - 2000.0;
  }
  EofBasis basis;
  basis.grid = grid;
  basis.mean = mean;
  basis.eofs = Matrix(grid.count, 2);
  basis.eofs.col(0) = Vector::Ones(grid.count) / std::sqrt(static_cast<double>(grid.count));
  basis.eofs.col(1) = tilt / tilt.norm();
  basis.sigma = Vector(2);
  basis.sigma << 180.0, 130.0;
  basis.n_training = 100;

  const Geometry geom = make_geometry(120.0, 500, 4000.0);
  const InversionConfig icfg;
  Rng rng(derive_seed(kSeed, 303));
  int good = 0;
  double worst = 0;
  for (int c = 0; c < 100; ++c) {
    const Coefficients x = sample_coefficients(basis, rng);
    const SoundSpeedProfile truth = reconstruct(basis, x);
    const MeasurementSet m = simulate_measurements(truth, geom, 0.0, 1, rng);
    const auto [xhat, diag] = gauss_newton(Coefficients::Zero(2), m, basis, 1e-8, icfg);
    const double r = rms_error(reconstruct(basis, xhat), truth);
    if (diag.converged && r <= 0.01) ++good;
    worst = std::max(worst, r);
  }
  const double dt = seconds_since(t0);
  return {good >= 99 && dt < 120.0,
          strf("%d/100 cases within 0.01 m/s at alpha=1e-8 (worst %.2e m/s) in %.0f s", good,
               worst, dt)};
}

// ---- criterion 4: second-order finite-difference convergence ----------

Check criterion4(const EofBasis& basis) {
  // Error of J(h) and J(h/2) against a J(h/16) reference; second order
  // means a ratio near (1 - 1/256) / (1/4 - 1/256) = 255/63 ~ 4.05.
  double lo = std::numeric_limits<double>::infinity(), hi = 0;
  int in_band = 0;
  for (int i = 0; i < 50; ++i) {
    Rng rng(derive_seed(kSeed, 400 + i));
    const Coefficients x = 0.3 * sample_coefficients(basis, rng);
    double angle = rng.uniform(1.10, 1.28);
    Geometry geom;
    geom.bottom_depth = 300.0;
    geom.beam_angles = {angle};
    MeasurementSet m;
    for (int tries = 0;; ++tries) {
      try {
        m = simulate_measurements(reconstruct(basis, x), geom, 0.0, 1, rng);
        break;
      } catch (const ComputeError&) {
        if (tries >= 40) return {false, strf("config %d: no untrapped steep beam found", i)};
        angle *= 0.95;
        geom.beam_angles = {angle};
      }
    }
    const auto jac = [&](double h) {
      return jacobian_fd(x, m, basis, 0.0, Vector::Constant(basis.n_eof(), h));
    };
    const Matrix ref = jac(1.0 / 16.0);
    const double e1 = (jac(1.0) - ref).norm();
    const double e2 = (jac(0.5) - ref).norm();
    const double ratio = e1 / e2;
    if (ratio >= 3.5 && ratio <= 4.5) ++in_band;
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  return {in_band == 50,
          strf("%d/50 steep-beam configs with halving ratio in [3.5, 4.5] (range %.3f .. %.3f)",
               in_band, lo, hi)};
}

// ---- criterion 5: misfit/prior monotone in alpha ----------------------

Check criterion5(const Datasets& data, const EofBasis& basis, const ExperimentConfig& cfg) {
  int checked = 0;
  for (int j = 0; j < 13; ++j) {
    InversionConfig icfg;              // default 13-point grid ...
    if (j >= 10) icfg = cfg.inversion; // ... plus three on the wide grid
    const SoundSpeedProfile& truth = data.test.profiles[static_cast<std::size_t>(j)];
    Rng rng(derive_seed(kSeed, 500 + static_cast<std::uint64_t>(j)));
    const MeasurementSet m =
        simulate_measurements(truth, cfg.geometry(), cfg.noise.sigma_t(), 1, rng);
    const SweepResult sw = sweep(m, basis, icfg);
    const SweepEntry* prev = nullptr;
    for (const auto& e : sw.entries) {
      if (!e.converged) continue;
      if (prev) {
        ++checked;
        if (e.misfit < prev->misfit * (1.0 - 1e-10))
          return {false, strf("sweep %d: misfit fell %.6e -> %.6e between alpha %.3e and %.3e",
                              j, prev->misfit, e.misfit, prev->alpha, e.alpha)};
        if (e.prior > prev->prior * (1.0 + 1e-10) + 1e-15)
          return {false, strf("sweep %d: prior rose %.6e -> %.6e between alpha %.3e and %.3e",
                              j, prev->prior, e.prior, prev->alpha, e.alpha)};
      }
      prev = &e;
    }
  }
  return {true, strf("misfit non-decreasing, prior non-increasing across %d converged alpha "
                     "steps on 13 sweeps", checked)};
}

// ---- criteria 6 and 7: sensitivity trends and baseline ratio ----------

struct TrendOutcome {
  Check c6;
  Check c7;
};

TrendOutcome criteria67(const ExperimentConfig& cfg21, const Datasets& data,
                        const EofBasis& basis) {
  const auto t0 = Clock::now();

  // Calibration of the synthetic ocean: spread of the training set about
  // its own mean profile.
  SoundSpeedProfile train_mean;
  train_mean.grid = data.train.grid();
  train_mean.speeds = Vector::Zero(train_mean.grid.count);
  for (const auto& p : data.train.profiles) train_mean.speeds += p.speeds;
  train_mean.speeds /= static_cast<double>(data.train.size());
  train_mean.meta.synthetic = true;
  double calib = 0;
  for (const auto& p : data.train.profiles) calib += rms_error(p, train_mean);
  calib /= static_cast<double>(data.train.size());

  // Regressor used on the beams axis, where the discrepancy-principle
  // fallback is blind to the observation count.
  Rng net_rng(derive_seed(kSeed, 21));
  const AlphaNet net = train_alpha_net(basis, cfg21.geometry(), cfg21.training, net_rng);

  ExperimentConfig cfg_net = cfg21;
  cfg_net.alpha_mode = AlphaMode::net;

  const std::vector<double> beam_values = {100, 300, 500, 700, 900};
  const std::vector<double> swath_values = {100, 110, 120, 130, 140};
  const std::vector<double> spatial_values = {10, 4, 2, 1, 0.5, 0.25};
  const std::vector<double> eof_values = {3, 4, 5, 6, 7, 8};

  std::vector<double> beams, swath, spatial, eofs;
  for (double v : beam_values)
    beams.push_back(run_axis_value(cfg_net, data, "beams_pings", v, &net).mean_rms);
  for (double v : swath_values)
    swath.push_back(run_axis_value(cfg21, data, "swath_deg", v, nullptr).mean_rms);
  for (double v : spatial_values)
    spatial.push_back(run_axis_value(cfg21, data, "spatial_error_cm", v, nullptr).mean_rms);
  for (double v : eof_values)
    eofs.push_back(run_axis_value(cfg21, data, "n_eof", v, nullptr).mean_rms);

  const Trend tb = trend_down(beams);
  const Trend ts = trend_down(swath);
  const Trend tx = trend_down(spatial);
  const int best_eof =
      static_cast<int>(std::min_element(eofs.begin(), eofs.end()) - eofs.begin());
  const bool plateau = eofs[static_cast<std::size_t>(best_eof)] <= eofs.front();
  const double dt = seconds_since(t0);

  TrendOutcome out;
  const bool setup_ok = data.test.size() == 111 && calib >= 1.0 && calib <= 6.0;
  out.c6.ok = setup_ok && tb.ok && ts.ok && tx.ok && plateau && dt < 1800.0;
  out.c6.detail = strf(
      "beams [%s] rho %.2f; swath [%s] rho %.2f; spatial [%s] rho %.2f; "
      "n_eof [%s] best at %d; train spread %.2f m/s; %zu test profiles; %.0f s",
      joined(beams).c_str(), tb.rho, joined(swath).c_str(), ts.rho, joined(spatial).c_str(),
      tx.rho, joined(eofs).c_str(), static_cast<int>(eof_values[best_eof]), calib, data.test.size(),
      dt);

  const double central = spatial[3];  // 1 cm spatial error, 500 beams x pings
  const double baseline = compute_baselines(data).train_mean_rms;
  out.c7.ok = central <= baseline / 3.0;
  out.c7.detail = strf("central mean RMS %.4f m/s vs training-mean baseline %.4f m/s "
                       "(ratio %.3f, need <= 0.333)",
                       central, baseline, central / baseline);
  return out;
}

// ---- criterion 8: alpha selection quality -----------------------------

Check criterion8(const ExperimentConfig& cfg11, const Datasets& data, const EofBasis& basis) {
  const auto t0 = Clock::now();
  Rng net_rng(derive_seed(kSeed, 21));
  const AlphaNet net = train_alpha_net(basis, cfg11.geometry(), cfg11.training, net_rng);

  const int n_alpha = static_cast<int>(cfg11.inversion.alpha_grid.size());
  Rng case_rng(derive_seed(kSeed, 314159));
  double oracle = 0, disc = 0, nn = 0;
  const int n_cases = 200;
  for (int c = 0; c < n_cases; ++c) {
    const Coefficients x = sample_coefficients(basis, case_rng);
    const SoundSpeedProfile truth = reconstruct(basis, x);
    const int pings = std::vector<int>{1, 3, 5, 7, 9}[static_cast<std::size_t>(c % 5)];
    const MeasurementSet m =
        simulate_measurements(truth, cfg11.geometry(), cfg11.noise.sigma_t(), pings, case_rng);
    const SweepResult sw = sweep(m, basis, cfg11.inversion);
    std::vector<double> rms(static_cast<std::size_t>(n_alpha));
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_alpha; ++i) {
      rms[static_cast<std::size_t>(i)] =
          rms_error(reconstruct(basis, sw.entries[static_cast<std::size_t>(i)].x), truth);
      if (sw.entries[static_cast<std::size_t>(i)].converged &&
          rms[static_cast<std::size_t>(i)] < best)
        best = rms[static_cast<std::size_t>(i)];
    }
    oracle += best;
    disc += rms[static_cast<std::size_t>(baseline_select_alpha(sw, m.sigma_t).second)];
    const SweepFeatures feats = extract_features(sw, basis);
    nn += rms[static_cast<std::size_t>(
        select_alpha(net, feats, cfg11.inversion.alpha_grid).second)];
  }
  oracle /= n_cases;
  disc /= n_cases;
  nn /= n_cases;
  const double dt = seconds_since(t0);
  return {nn <= 1.15 * oracle && nn <= 1.10 * disc,
          strf("200 held-out cases: net %.4f, grid oracle %.4f, discrepancy %.4f m/s; "
               "net/oracle %.3f (need <= 1.15), net/discrepancy %.3f (need <= 1.10); %.0f s",
               nn, oracle, disc, nn / oracle, nn / disc, dt)};
}

// ---- criterion 9: CLI determinism -------------------------------------

int run_cli(const fs::path& dir, const std::string& cli, const std::string& args) {
  const std::string cmd =
      "cd '" + dir.string() + "' && '" + cli + "' " + args + " >> cli.log 2>&1";
  return std::system(cmd.c_str());
}

Check criterion9(const std::string& cli) {
  if (cli.empty()) return {false, "no CLI binary path on the command line"};
  const auto t0 = Clock::now();
  const fs::path root = fs::temp_directory_path() / "ssinv_acceptance_cli";
  std::error_code ec;
  fs::remove_all(root, ec);

  const char* config_text = R"({
  "seed": 424243,
  "source": {"n_train": 24, "n_test": 10},
  "n_eof": 3,
  "geometry": {"n_beam": 20},
  "n_ping": 1,
  "inversion": {"alpha_min": 1e-6, "alpha_max": 1.0, "alpha_count": 5},
  "training": {"n_truths": 12, "ping_counts": [1, 3], "sigma_t_factors": [1],
               "swath_values_deg": [], "hidden": [8], "window_halfwidth": 1,
               "epochs": 30, "batch_size": 16},
  "output_dir": "out"
}
)";
  const std::vector<std::string> commands = {
      "eof-build -c cfg.json",
      "simulate -c cfg.json",
      "invert -c cfg.json -m out/measurements/meas_000.csv",
      "sweep -c cfg.json -a beams_pings -v 20 -v 40",
      "baselines -c cfg.json",
      "train-alpha -c cfg.json",
      "report -c cfg.json -i out/sweep_beams_pings_detail.csv",
  };
  for (const char* run : {"a", "b"}) {
    const fs::path dir = root / run;
    fs::create_directories(dir);
    std::ofstream(dir / "cfg.json", std::ios::binary) << config_text;
    for (const auto& args : commands)
      if (run_cli(dir, cli, args) != 0)
        return {false, strf("command failed on run %s: ssinv %s", run, args.c_str())};
  }

  const auto listing = [](const fs::path& dir) {
    std::vector<fs::path> rel;
    for (const auto& entry : fs::recursive_directory_iterator(dir))
      if (entry.is_regular_file()) rel.push_back(fs::relative(entry.path(), dir));
    std::sort(rel.begin(), rel.end());
    return rel;
  };
  const auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  const std::vector<fs::path> la = listing(root / "a" / "out");
  const std::vector<fs::path> lb = listing(root / "b" / "out");
  if (la != lb) return {false, "the two runs produced different file sets"};
  if (la.empty()) return {false, "no output files produced"};
  for (const auto& relpath : la)
    if (slurp(root / "a" / "out" / relpath) != slurp(root / "b" / "out" / relpath))
      return {false, "byte mismatch in " + relpath.string()};
  fs::remove_all(root, ec);
  return {true, strf("all 7 CLI commands rerun: %zu output files byte-identical in %.0f s",
                     la.size(), seconds_since(t0))};
}

// ---- criterion 10: boundary window duplication ------------------------

Check criterion10() {
  const int dim = 3, n = 5;
  SweepFeatures f;
  f.n_obs = 100;
  for (int i = 0; i < n; ++i) {
    Vector b(dim);
    b << 10.0 + i, 20.0 + i, 30.0 + i;
    f.blocks.push_back(b);
    f.carried.push_back(false);
  }
  for (int k = 0; k <= 3; ++k) {
    for (const int edge : {0, n - 1}) {
      const Vector w = window_input(f, edge, k);
      if (w.size() != (2 * k + 1) * dim + 1)
        return {false, strf("k=%d edge=%d: window length %d", k, edge, (int)w.size())};
      int duplicated = 0;
      for (int j = -k; j <= k; ++j) {
        const int src = std::clamp(edge + j, 0, n - 1);
        const Vector seg = w.segment((j + k) * dim, dim);
        if ((seg.array() != f.blocks[static_cast<std::size_t>(src)].array()).any())
          return {false, strf("k=%d edge=%d: slot %d does not hold block %d", k, edge, j, src)};
        if (src == edge && j != 0) ++duplicated;
      }
      if (duplicated != k)
        return {false,
                strf("k=%d edge=%d: %d duplicated boundary blocks, expected %d", k, edge,
                     duplicated, k)};
      if (w[w.size() - 1] != normalized_obs_count(f.n_obs))
        return {false, strf("k=%d edge=%d: trailing scalar wrong", k, edge)};
    }
    // Interior windows must not duplicate anything.
    if (k <= 2) {
      const Vector w = window_input(f, 2, k);
      for (int j = -k; j <= k; ++j) {
        const Vector seg = w.segment((j + k) * dim, dim);
        if ((seg.array() != f.blocks[static_cast<std::size_t>(2 + j)].array()).any())
          return {false, strf("k=%d interior: slot %d wrong", k, j)};
      }
    }
  }
  return {true, "edge windows hold exactly k duplicated boundary blocks for k = 0, 1, 2, 3"};
}

}  // namespace

int main(int argc, char** argv) {
  std::setvbuf(stdout, nullptr, _IOLBF, 0);
  const std::string cli = argc > 1 ? argv[1] : "";
  const auto t0 = Clock::now();

  ExperimentConfig cfg21, cfg11;
  Datasets data;
  EofBasis basis;
  try {
    cfg21 = make_config(21, json{{"n_truths", 480},
                                 {"sigma_t_factors", json::array({1})},
                                 {"swath_values_deg", json::array()}});
    cfg11 = make_config(11, json{{"n_truths", 900},
                                 {"sigma_t_factors", json::array({1})},
                                 {"swath_values_deg", json::array()},
                                 {"window_halfwidth", 3},
                                 {"hidden", json::array({48, 48})},
                                 {"epochs", 450}});
    data = prepare_datasets(cfg21);
    basis = build_basis(data.train, cfg21.n_eof);
  } catch (const std::exception& e) {
    std::printf("FAIL setup: %s\n", e.what());
    return 1;
  }

  bool all_ok = true;
  const auto gate = [&](int index, const char* name, auto&& fn) {
    Check c;
    try {
      c = fn();
    } catch (const std::exception& e) {
      c = {false, strf("unhandled exception: %s", e.what())};
    }
    std::printf("%s criterion %2d (%s): %s\n", c.ok ? "PASS" : "FAIL", index, name,
                c.detail.c_str());
    all_ok = all_ok && c.ok;
  };

  gate(1, "forward exactness", [&] { return criterion1(data); });
  gate(2, "layer-order invariance", [&] { return criterion2(); });
  gate(3, "noiseless recovery", [&] { return criterion3(); });
  gate(4, "jacobian convergence", [&] { return criterion4(basis); });
  gate(5, "tikhonov monotonicity", [&] { return criterion5(data, basis, cfg21); });

  Check c7{false, "not evaluated (criterion 6 did not complete)"};
  gate(6, "sensitivity trends", [&] {
    TrendOutcome out = criteria67(cfg21, data, basis);
    c7 = out.c7;
    return out.c6;
  });
  gate(7, "beats baseline", [&] { return c7; });
  gate(8, "alpha selection", [&] { return criterion8(cfg11, data, basis); });
  gate(9, "CLI determinism", [&] { return criterion9(cli); });
  gate(10, "window boundaries", [&] { return criterion10(); });

  std::printf("%s: 10 criteria evaluated in %.0f s\n", all_ok ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED",
              seconds_since(t0));
  return all_ok ? 0 : 1;
}
