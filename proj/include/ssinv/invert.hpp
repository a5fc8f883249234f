#pragma once

#include "ssinv/eof.hpp"
#include "ssinv/synth.hpp"

#include <iosfwd>

namespace ssinv {

struct InversionConfig {
  std::vector<double> alpha_grid = default_alpha_grid();
  int max_iterations = 60;
  // Convergence threshold on the Gauss-Newton step, expressed as the RMS
  // speed change [m/s] the step would cause through the basis.
  double step_tolerance = 1e-10;
  // A stalled line search (no damped step decreases the cost) still counts
  // as converged when the proposed full step is below this RMS [m/s]:
  // the iterate cannot be improved at floating-point resolution.
  double stall_tolerance = 1e-6;
  // Per-coefficient finite-difference step: max(floor, rel * sigma_k).
  double fd_step_floor = 1e-3;
  double fd_step_rel = 1e-6;
  double damping_factor = 0.5;
  double damping_min = 1.0 / 1024.0;

  static std::vector<double> default_alpha_grid(); // 13 points, 1e-6 .. 1
  static std::vector<double> log_spaced(double lo, double hi, int n);
  void validate() const;
};

// Mean squared time misfit over observations plus alpha * sum x^2/sigma^2.
// A beam that turns under x but was observed enters the misfit with a fixed
// penalty residual of 3x the largest observed time.
double cost(const Coefficients& x, const MeasurementSet& m, const EofBasis& basis, double alpha);

// Scaled residual whose squared norm equals cost: observation rows
// (T_j - t_j(x)) / sqrt(N_obs), then regularization rows sqrt(alpha) x_k / sigma_k.
Vector residual_vector(const Coefficients& x, const MeasurementSet& m, const EofBasis& basis,
                       double alpha);

// Central finite differences of the observation rows per coefficient with
// the given steps; regularization rows are exact. If a perturbed point
// changes any beam's turned status, the step is halved (up to 8 times)
// before giving up with ComputeError.
Matrix jacobian_fd(const Coefficients& x, const MeasurementSet& m, const EofBasis& basis,
                   double alpha, const Vector& steps);

// Steps used by gauss_newton for the Jacobian.
Vector fd_steps(const EofBasis& basis, const InversionConfig& config);

struct GaussNewtonDiagnostics {
  int iterations = 0;
  bool converged = false;
  double final_cost = 0;
  double last_step_rms = 0; // [m/s equivalent]
  bool lifted = false;      // normal equations needed a diagonal lift
};

// Damped Gauss-Newton on the augmented residual from x0. Accepts steps only
// when they reduce the cost; returns the best iterate seen.
std::pair<Coefficients, GaussNewtonDiagnostics> gauss_newton(const Coefficients& x0,
                                                             const MeasurementSet& m,
                                                             const EofBasis& basis, double alpha,
                                                             const InversionConfig& config);

struct SweepEntry {
  double alpha = 0;
  Coefficients x;
  double misfit = 0; // ||T - t(x)||^2 / N_obs
  double prior = 0;  // sum x^2 / sigma^2
  int iterations = 0;
  bool converged = false;
};

struct SweepResult {
  std::vector<SweepEntry> entries; // one per grid alpha, ascending alpha
  int n_obs = 0;
};

// One Gauss-Newton run per grid alpha, largest alpha first from x0 = 0,
// each warm-started from the previous solution. Per-alpha failures are
// flagged entries; the sweep itself always completes.
SweepResult sweep(const MeasurementSet& m, const EofBasis& basis, const InversionConfig& config);

// CSV: alpha,misfit,prior,iters,converged,x_1..x_N.
void write_sweep(std::ostream& out, const SweepResult& sweep);

}  // namespace ssinv
