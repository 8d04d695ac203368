#pragma once

#include <string>

#include "mpgen/maneuvers.hpp"
#include "mpgen/trajectory.hpp"
#include "mpgen/vehicle.hpp"

namespace mpgen {

struct SolverOptions {
  int intervals = 20;
  int substeps = 32;
  double feas_tol = 1e-10;
  double opt_tol = 1e-8;
  int max_outer = 500;
  int max_newton = 5000;
  double rho_init = 1e3;
  /// Starting penalty when warm-started from a nearby solution.
  double rho_warm = 1e4;
  double rho_max = 1e9;
  double infeasible_threshold = 1e-4;
  /// Box on both joint angles, well inside the jack-knife limit pi/2.
  double joint_angle_limit = 1.3;
  double t_min = 0.05;
  double t_max = 200.0;

  /// Throws ConfigError on nonsensical values.
  void validate() const;
};

enum class SolveStatus { Converged, Infeasible, NotConverged, Degenerate };

std::string to_string(SolveStatus s);

/// Transcription variables and constraint multipliers of an earlier solve.
struct WarmStart {
  Eigen::VectorXd variables;
  Eigen::VectorXd multipliers;
};

struct SolveResult {
  SolveStatus status = SolveStatus::NotConverged;
  Trajectory trajectory;
  /// Max-norm constraint violation at the returned point.
  double violation = 0.0;
  /// Max-norm projected Lagrangian gradient at the returned point.
  double kkt_residual = 0.0;
  int outer_iterations = 0;
  int newton_iterations = 0;
  Eigen::VectorXd variables;
  Eigen::VectorXd multipliers;

  bool converged() const { return status == SolveStatus::Converged; }
  WarmStart warm_start() const { return {variables, multipliers}; }
};

/// Free-final-time OCP with the relaxed terminal manifold of `spec`.
SolveResult solve_maneuver_ocp(const OcpSpec& spec, const SolverOptions& options = {},
                               const WarmStart* warm = nullptr);

/// Packs a trajectory with options.intervals intervals into transcription
/// variables of `spec`.
WarmStart warm_start_from(const Trajectory& traj, const OcpSpec& spec, const SolverOptions& options,
                          const Eigen::VectorXd& multipliers = {});

/// Fixed-endpoint problem. An endpoint equal to the start is Degenerate.
/// The target heading is reached by the shortest signed rotation.
SolveResult solve_bvp(const VehicleState& initial, const VehicleState& final, Direction direction,
                      const ObjectiveWeights& weights, const VehicleParams& params,
                      const SolverOptions& options = {}, const WarmStart* warm = nullptr);

}  // namespace mpgen
