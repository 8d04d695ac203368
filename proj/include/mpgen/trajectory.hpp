#pragma once

#include <string>
#include <vector>

#include "mpgen/vehicle.hpp"

namespace mpgen {

enum class Direction { Forward, Backward };

std::string to_string(Direction d);
Direction direction_from_string(const std::string& s);

/// Weights of L = T + lambda * integral(J) with
/// J = w_alpha a^2 + w_omega w^2 + w_ualpha u^2 (+ w_beta3 b3^2 + w_beta2 b2^2
/// for backward two-trailer motion).
struct ObjectiveWeights {
  double lambda = 1.0;
  double w_alpha = 1.0;
  double w_omega = 10.0;
  double w_ualpha = 1.0;
  double w_beta3 = 1.0;
  double w_beta2 = 1.0;

  void validate() const;
  bool operator==(const ObjectiveWeights&) const = default;
};

/// Knots sampled uniformly in time; controls are held constant over each
/// interval and every interval is integrated with `substeps` RK4 steps.
struct Trajectory {
  double duration = 0.0;
  std::vector<VehicleState> knots;
  std::vector<double> controls;
  double speed = 1.0;
  Direction direction = Direction::Forward;
  double cost = 0.0;
  int substeps = 32;

  int intervals() const { return static_cast<int>(controls.size()); }
  double interval_length() const { return duration / intervals(); }
  double time_at(int k) const { return duration * k / intervals(); }
};

/// Trapezoidal quadrature of the state part of J over the knots plus the exact
/// integral of the piecewise-constant control term.
double smoothness_integral(const Trajectory& traj, const ObjectiveWeights& w);

/// T + lambda * smoothness_integral.
double evaluate_objective(const Trajectory& traj, const ObjectiveWeights& w);

/// Max over intervals of |knot[k+1] - integrate(knot[k])| with `substeps_override`
/// RK4 steps per interval (0 keeps the trajectory's own count). Angles compared wrapped.
double max_defect(const Trajectory& traj, const VehicleParams& params, int substeps_override = 0);

/// True if every knot and control passes vehicle validation (with slack `tol`).
bool within_limits(const Trajectory& traj, const VehicleParams& params, double tol = 1e-9);

/// Forward simulation of the trajectory's controls from its first knot.
std::vector<VehicleState> reintegrate(const Trajectory& traj, const VehicleParams& params,
                                      int substeps_override = 0);

/// Largest component difference (angles wrapped) between two states.
double state_distance_inf(const VehicleState& a, const VehicleState& b);

}  // namespace mpgen
