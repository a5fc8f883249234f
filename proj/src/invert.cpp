#include "ssinv/invert.hpp"

#include "ssinv/util.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>
#include <ostream>

namespace ssinv {

std::vector<double> InversionConfig::log_spaced(double lo, double hi, int n) {
  if (!(lo > 0) || !(hi > lo) || n < 2) throw Error("log grid needs 0 < lo < hi and n >= 2");
  std::vector<double> g(n);
  double step = (std::log(hi) - std::log(lo)) / (n - 1);
  for (int i = 0; i < n; ++i) g[i] = std::exp(std::log(lo) + step * i);
  g.front() = lo;
  g.back() = hi;
  return g;
}

std::vector<double> InversionConfig::default_alpha_grid() { return log_spaced(1e-6, 1.0, 13); }

void InversionConfig::validate() const {
  if (alpha_grid.size() < 3) throw Error("alpha grid needs at least 3 values");
  for (std::size_t i = 0; i < alpha_grid.size(); ++i) {
    if (!(alpha_grid[i] > 0)) throw Error("alpha grid values must be positive");
    if (i > 0 && !(alpha_grid[i] > alpha_grid[i - 1]))
      throw Error("alpha grid must be strictly increasing");
  }
  if (max_iterations < 1 || !(step_tolerance > 0) || !(stall_tolerance >= step_tolerance) ||
      !(fd_step_floor > 0) || !(fd_step_rel > 0) || !(damping_factor > 0) ||
      !(damping_factor < 1) || !(damping_min > 0))
    throw Error("invalid inversion config");
}

namespace {

// Unscaled observation residuals [s] plus the per-beam turned pattern of the
// modelled field.
struct DataEval {
  Vector residuals;            // N_obs
  std::vector<bool> turned;    // per geometry beam
};

DataEval eval_data(const Coefficients& x, const MeasurementSet& m, const EofBasis& basis) {
  TravelTimeSet model = travel_times_of_coefficients(basis, x, m.geometry);
  DataEval ev;
  ev.turned.resize(model.rays.size());
  for (std::size_t b = 0; b < model.rays.size(); ++b)
    ev.turned[b] = model.rays[b].status == RayStatus::turned;

  double penalty = 3.0 * m.max_time();
  ev.residuals.resize(static_cast<int>(m.size()));
  for (std::size_t j = 0; j < m.size(); ++j) {
    const auto& obs = m.observations[j];
    ev.residuals[static_cast<int>(j)] =
        ev.turned[obs.beam] ? penalty : obs.time - model.rays[obs.beam].time;
  }
  return ev;
}

bool all_beams_turned(const DataEval& ev, const MeasurementSet& m) {
  for (const auto& obs : m.observations)
    if (!ev.turned[obs.beam]) return false;
  return true;
}

}  // namespace

double cost(const Coefficients& x, const MeasurementSet& m, const EofBasis& basis, double alpha) {
  if (alpha < 0) throw Error("alpha must be nonnegative");
  if (m.observations.empty()) throw Error("cost: empty measurement set");
  DataEval ev = eval_data(x, m, basis);
  if (all_beams_turned(ev, m)) throw ComputeError("cost: all modelled beams turned");
  double misfit = ev.residuals.squaredNorm() / static_cast<double>(m.size());
  return misfit + alpha * log_prior(basis, x);
}

Vector residual_vector(const Coefficients& x, const MeasurementSet& m, const EofBasis& basis,
                       double alpha) {
  if (alpha < 0) throw Error("alpha must be nonnegative");
  if (m.observations.empty()) throw Error("residual_vector: empty measurement set");
  DataEval ev = eval_data(x, m, basis);
  if (all_beams_turned(ev, m)) throw ComputeError("residual_vector: all modelled beams turned");

  const int n_obs = static_cast<int>(m.size());
  const int n_eof = basis.n_eof();
  Vector r(n_obs + n_eof);
  r.head(n_obs) = ev.residuals / std::sqrt(static_cast<double>(n_obs));
  double sqrt_alpha = std::sqrt(alpha);
  for (int k = 0; k < n_eof; ++k) r[n_obs + k] = sqrt_alpha * x[k] / basis.sigma[k];
  return r;
}

Vector fd_steps(const EofBasis& basis, const InversionConfig& config) {
  Vector steps(basis.n_eof());
  for (int k = 0; k < basis.n_eof(); ++k)
    steps[k] = std::max(config.fd_step_floor, config.fd_step_rel * basis.sigma[k]);
  return steps;
}

Matrix jacobian_fd(const Coefficients& x, const MeasurementSet& m, const EofBasis& basis,
                   double alpha, const Vector& steps) {
  if (steps.size() != x.size()) throw Error("jacobian_fd: one step per coefficient required");
  for (int k = 0; k < steps.size(); ++k)
    if (!(steps[k] > 0)) throw Error("jacobian_fd: steps must be positive");

  DataEval base = eval_data(x, m, basis);
  const int n_obs = static_cast<int>(m.size());
  const int n_eof = basis.n_eof();
  const double scale = 1.0 / std::sqrt(static_cast<double>(n_obs));

  Matrix jac = Matrix::Zero(n_obs + n_eof, n_eof);
  for (int k = 0; k < n_eof; ++k) {
    double h = steps[k];
    bool ok = false;
    for (int attempt = 0; attempt <= 8; ++attempt) {
      Coefficients xp = x, xm = x;
      xp[k] += h;
      xm[k] -= h;
      DataEval plus = eval_data(xp, m, basis);
      DataEval minus = eval_data(xm, m, basis);
      if (plus.turned == base.turned && minus.turned == base.turned) {
        jac.col(k).head(n_obs) = (plus.residuals - minus.residuals) * (scale / (2 * h));
        ok = true;
        break;
      }
      h *= 0.5;
    }
    if (!ok)
      throw ComputeError("jacobian_fd: ray turning within the smallest step for coefficient " +
                         std::to_string(k));
  }

  double sqrt_alpha = std::sqrt(alpha);
  for (int k = 0; k < n_eof; ++k) jac(n_obs + k, k) = sqrt_alpha / basis.sigma[k];
  return jac;
}

std::pair<Coefficients, GaussNewtonDiagnostics> gauss_newton(const Coefficients& x0,
                                                             const MeasurementSet& m,
                                                             const EofBasis& basis, double alpha,
                                                             const InversionConfig& config) {
  config.validate();
  if (x0.size() != basis.n_eof()) throw Error("gauss_newton: x0 length mismatch");

  const double sqrt_k = std::sqrt(static_cast<double>(basis.grid.count));
  Vector steps = fd_steps(basis, config);

  Coefficients x = x0;
  Vector r = residual_vector(x, m, basis, alpha);
  double current_cost = r.squaredNorm();
  if (!std::isfinite(current_cost)) throw Error("gauss_newton: non-finite cost at x0");

  GaussNewtonDiagnostics diag;
  for (int it = 0; it < config.max_iterations; ++it) {
    Matrix jac = jacobian_fd(x, m, basis, alpha, steps);
    Matrix hess = jac.transpose() * jac;
    Vector grad = jac.transpose() * r;

    Vector delta = -hess.ldlt().solve(grad);
    if (!delta.allFinite()) {
      hess.diagonal().array() += 1e-12;
      delta = -hess.ldlt().solve(grad);
      diag.lifted = true;
      if (!delta.allFinite()) throw ComputeError("gauss_newton: normal-equation solve failed");
    }

    diag.last_step_rms = delta.norm() / sqrt_k;
    if (diag.last_step_rms < config.step_tolerance) {
      diag.converged = true;
      break;
    }

    double lambda = 1.0;
    bool accepted = false;
    while (lambda >= config.damping_min) {
      Coefficients trial = x + lambda * delta;
      Vector r_trial = residual_vector(trial, m, basis, alpha);
      double trial_cost = r_trial.squaredNorm();
      if (std::isfinite(trial_cost) && trial_cost < current_cost) {
        x = std::move(trial);
        r = std::move(r_trial);
        current_cost = trial_cost;
        accepted = true;
        break;
      }
      lambda *= config.damping_factor;
    }
    ++diag.iterations;
    if (!accepted) {
      // no descent left at this resolution; converged if already sub-stall
      diag.converged = diag.last_step_rms < config.stall_tolerance;
      break;
    }
  }

  diag.final_cost = current_cost;
  return {x, diag};
}

SweepResult sweep(const MeasurementSet& m, const EofBasis& basis, const InversionConfig& config) {
  config.validate();
  const int n_alpha = static_cast<int>(config.alpha_grid.size());
  const int n_eof = basis.n_eof();

  SweepResult result;
  result.n_obs = static_cast<int>(m.size());
  result.entries.resize(n_alpha);

  Coefficients warm = Coefficients::Zero(n_eof);
  for (int i = n_alpha - 1; i >= 0; --i) {
    SweepEntry& entry = result.entries[i];
    entry.alpha = config.alpha_grid[i];
    try {
      auto [x, diag] = gauss_newton(warm, m, basis, entry.alpha, config);
      entry.x = x;
      entry.iterations = diag.iterations;
      entry.converged = diag.converged;
      DataEval ev = eval_data(x, m, basis);
      entry.misfit = ev.residuals.squaredNorm() / static_cast<double>(m.size());
      entry.prior = log_prior(basis, x);
      warm = std::move(x);
    } catch (const std::exception&) {
      entry.x = Coefficients::Constant(n_eof, std::numeric_limits<double>::quiet_NaN());
      entry.misfit = std::numeric_limits<double>::quiet_NaN();
      entry.prior = std::numeric_limits<double>::quiet_NaN();
      entry.converged = false;
      // keep the previous warm start for the next alpha
    }
  }
  return result;
}

void write_sweep(std::ostream& out, const SweepResult& sweep) {
  int n_eof = sweep.entries.empty() ? 0 : static_cast<int>(sweep.entries.front().x.size());
  out << "alpha,misfit,prior,iters,converged";
  for (int k = 1; k <= n_eof; ++k) out << ",x_" << k;
  out << '\n';
  for (const auto& e : sweep.entries) {
    out << format_double(e.alpha) << ',' << format_double(e.misfit) << ','
        << format_double(e.prior) << ',' << e.iterations << ',' << (e.converged ? 1 : 0);
    for (int k = 0; k < e.x.size(); ++k) out << ',' << format_double(e.x[k]);
    out << '\n';
  }
}

}  // namespace ssinv
