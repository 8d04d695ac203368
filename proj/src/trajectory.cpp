#include "mpgen/trajectory.hpp"

#include <algorithm>
#include <cmath>

#include "mpgen/angles.hpp"

namespace mpgen {

std::string to_string(Direction d) { return d == Direction::Forward ? "forward" : "backward"; }

Direction direction_from_string(const std::string& s) {
  if (s == "forward") return Direction::Forward;
  if (s == "backward") return Direction::Backward;
  throw ConfigError("unknown direction '" + s + "' (expected forward or backward)");
}

void ObjectiveWeights::validate() const {
  for (double w : {lambda, w_alpha, w_omega, w_ualpha, w_beta3, w_beta2}) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ConfigError("objective weights must be finite and >= 0");
  }
}

namespace {

double state_integrand(const VehicleState& s, Direction dir, const ObjectiveWeights& w) {
  double j = w.w_alpha * s.alpha() * s.alpha() + w.w_omega * s.omega() * s.omega();
  if (s.kind == VehicleKind::TwoTrailer && dir == Direction::Backward) {
    j += w.w_beta3 * s.beta3() * s.beta3() + w.w_beta2 * s.beta2() * s.beta2();
  }
  return j;
}

}  // namespace

double smoothness_integral(const Trajectory& traj, const ObjectiveWeights& w) {
  const int K = traj.intervals();
  if (K <= 0 || static_cast<int>(traj.knots.size()) != K + 1) {
    throw ContractViolation("trajectory needs K controls and K+1 knots");
  }
  double sum = 0.0;
  for (int k = 0; k <= K; ++k) {
    const double wk = (k == 0 || k == K) ? 0.5 : 1.0;
    sum += wk * state_integrand(traj.knots[k], traj.direction, w);
  }
  for (double u : traj.controls) sum += w.w_ualpha * u * u;
  return sum * traj.duration / K;
}

double evaluate_objective(const Trajectory& traj, const ObjectiveWeights& w) {
  return traj.duration + w.lambda * smoothness_integral(traj, w);
}

double state_distance_inf(const VehicleState& a, const VehicleState& b) {
  if (a.kind != b.kind) throw ContractViolation("comparing states of different kinds");
  double m = 0.0;
  for (int i = 0; i < a.dim(); ++i) {
    double d = a.values[i] - b.values[i];
    if (idx::is_angle(a.kind, i)) d = normalize_angle(d);
    m = std::max(m, std::abs(d));
  }
  return m;
}

double max_defect(const Trajectory& traj, const VehicleParams& params, int substeps_override) {
  const int sub = substeps_override > 0 ? substeps_override : traj.substeps;
  const double dt = traj.interval_length();
  double worst = 0.0;
  for (int k = 0; k < traj.intervals(); ++k) {
    const StateVector next =
        integrate_interval_t<double>(params, traj.knots[k].values, traj.speed, traj.controls[k], dt, sub);
    worst = std::max(worst, state_distance_inf(VehicleState(traj.knots[k].kind, next), traj.knots[k + 1]));
  }
  return worst;
}

bool within_limits(const Trajectory& traj, const VehicleParams& params, double tol) {
  for (const auto& s : traj.knots) {
    if (std::abs(s.alpha()) > params.alpha_max + tol || std::abs(s.omega()) > params.omega_max + tol) return false;
  }
  for (double u : traj.controls) {
    if (std::abs(u) > params.u_alpha_max + tol) return false;
  }
  return true;
}

std::vector<VehicleState> reintegrate(const Trajectory& traj, const VehicleParams& params, int substeps_override) {
  const int sub = substeps_override > 0 ? substeps_override : traj.substeps;
  const double dt = traj.interval_length();
  std::vector<VehicleState> out;
  out.reserve(traj.knots.size());
  VehicleState s = traj.knots.front();
  out.push_back(s);
  for (int k = 0; k < traj.intervals(); ++k) {
    s = VehicleState(s.kind, integrate_interval_t<double>(params, s.values, traj.speed, traj.controls[k], dt, sub));
    s.normalize();
    out.push_back(s);
  }
  return out;
}

}  // namespace mpgen
