#include "mpgen/trajopt.hpp"

#include <cmath>

#include "mpgen/alm.hpp"
#include "mpgen/transcription.hpp"

namespace mpgen {

void SolverOptions::validate() const {
  if (intervals < 20) throw ConfigError("interval count K must be at least 20");
  if (substeps < 1) throw ConfigError("substeps must be positive");
  if (!(feas_tol > 0.0) || !(opt_tol > 0.0)) throw ConfigError("tolerances must be positive");
  if (max_outer < 1 || max_newton < 1) throw ConfigError("iteration budgets must be positive");
  if (!(rho_init > 0.0) || !(rho_warm > 0.0) || !(rho_max >= rho_init)) throw ConfigError("invalid penalty settings");
  if (!(joint_angle_limit > 0.0) || joint_angle_limit >= std::acos(0.0)) {
    throw ConfigError("joint angle limit must lie in (0, pi/2)");
  }
  if (!(t_min > 0.0) || !(t_max > t_min)) throw ConfigError("duration bounds must satisfy 0 < t_min < t_max");
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged:
      return "converged";
    case SolveStatus::Infeasible:
      return "infeasible";
    case SolveStatus::NotConverged:
      return "not_converged";
    case SolveStatus::Degenerate:
      return "degenerate";
  }
  return "unknown";
}

namespace {

bool is_degenerate(const OcpSpec& spec) {
  const int n = spec.params.state_dim();
  if (spec.manifold.codimension() != n || !spec.manifold.linear.empty()) return false;
  for (const auto& f : spec.manifold.fixed) {
    if (std::abs(f.value - spec.initial_state.values[f.component]) > 1e-12) return false;
  }
  return true;
}

TranscriptionData make_data(const OcpSpec& spec, const SolverOptions& options) {
  TranscriptionData data;
  data.initial_state = spec.initial_state;
  data.manifold = spec.manifold;
  data.speed = spec.speed;
  data.direction = spec.direction;
  data.weights = spec.objective;
  data.params = spec.params;
  data.intervals = options.intervals;
  data.substeps = options.substeps;
  data.joint_angle_limit = options.joint_angle_limit;
  data.t_min = options.t_min;
  data.t_max = options.t_max;
  return data;
}

}  // namespace

WarmStart warm_start_from(const Trajectory& traj, const OcpSpec& spec, const SolverOptions& options,
                          const Eigen::VectorXd& multipliers) {
  const MultipleShootingProblem problem(make_data(spec, options));
  return {problem.pack(traj), multipliers};
}

SolveResult solve_maneuver_ocp(const OcpSpec& spec, const SolverOptions& options, const WarmStart* warm) {
  options.validate();
  spec.params.validate();
  spec.objective.validate();
  SolveResult out;
  if (is_degenerate(spec)) {
    out.status = SolveStatus::Degenerate;
    return out;
  }

  const MultipleShootingProblem problem(make_data(spec, options));

  nlp::AlmOptions alm;
  alm.feas_tol = options.feas_tol;
  alm.opt_tol = options.opt_tol;
  alm.max_outer = options.max_outer;
  alm.max_newton = options.max_newton;
  alm.rho_init = options.rho_init;
  alm.rho_max = options.rho_max;
  alm.infeasible_threshold = options.infeasible_threshold;

  Eigen::VectorXd z0;
  Eigen::VectorXd y0;
  if (warm != nullptr && warm->variables.size() == problem.num_variables()) {
    z0 = warm->variables;
    y0 = Eigen::VectorXd::Zero(problem.num_constraints());
    const Eigen::Index shared = std::min<Eigen::Index>(warm->multipliers.size(), problem.intervals() *
                                                                                    (problem.state_dim() + 1));
    y0.head(shared) = warm->multipliers.head(shared);
    alm.rho_init = options.rho_warm;
  } else {
    z0 = problem.initial_guess();
  }

  const nlp::AlmResult r = nlp::solve_alm(problem, z0, y0, alm);
  switch (r.status) {
    case nlp::AlmStatus::Converged:
      out.status = SolveStatus::Converged;
      break;
    case nlp::AlmStatus::Infeasible:
    case nlp::AlmStatus::EvaluationFailed:
      out.status = SolveStatus::Infeasible;
      break;
    case nlp::AlmStatus::BudgetExhausted:
      out.status = SolveStatus::NotConverged;
      break;
  }
  out.violation = r.violation;
  out.kkt_residual = r.kkt_residual;
  out.outer_iterations = r.outer_iterations;
  out.newton_iterations = r.newton_iterations;
  out.variables = r.z;
  out.multipliers = r.y;
  if (r.status != nlp::AlmStatus::EvaluationFailed) out.trajectory = problem.to_trajectory(r.z);
  return out;
}

SolveResult solve_bvp(const VehicleState& initial, const VehicleState& final, Direction direction,
                      const ObjectiveWeights& weights, const VehicleParams& params, const SolverOptions& options,
                      const WarmStart* warm) {
  if (initial.kind != params.kind || final.kind != params.kind) {
    throw ContractViolation("boundary states do not match the vehicle kind");
  }
  OcpSpec spec;
  spec.initial_state = initial;
  spec.initial_state.normalize();
  spec.manifold = fixed_endpoint_manifold(final, spec.initial_state);
  spec.direction = direction;
  spec.speed = speed_for(direction, params);
  spec.objective = weights;
  spec.params = params;
  spec.tag = "bvp";
  return solve_maneuver_ocp(spec, options, warm);
}

}  // namespace mpgen
