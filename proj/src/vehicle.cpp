#include "mpgen/vehicle.hpp"

#include <algorithm>
#include <cmath>

#include "mpgen/angles.hpp"

namespace mpgen {

std::string to_string(VehicleKind kind) {
  return kind == VehicleKind::CarLike ? "car_like" : "two_trailer";
}

VehicleKind vehicle_kind_from_string(const std::string& s) {
  if (s == "car_like") return VehicleKind::CarLike;
  if (s == "two_trailer") return VehicleKind::TwoTrailer;
  throw ConfigError("unknown vehicle kind '" + s + "' (expected car_like or two_trailer)");
}

VehicleParams VehicleParams::car_like(double L1) {
  VehicleParams p;
  p.kind = VehicleKind::CarLike;
  p.L1 = L1;
  return p;
}

VehicleParams VehicleParams::two_trailer(double L1, double L2, double L3, double M1) {
  VehicleParams p;
  p.kind = VehicleKind::TwoTrailer;
  p.L1 = L1;
  p.L2 = L2;
  p.L3 = L3;
  p.M1 = M1;
  return p;
}

void VehicleParams::validate() const {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!(L1 > 0.0) || !finite(L1)) throw ConfigError("L1 must be positive");
  if (kind == VehicleKind::TwoTrailer) {
    if (!(L2 > 0.0) || !finite(L2)) throw ConfigError("L2 must be positive");
    if (!(L3 > 0.0) || !finite(L3)) throw ConfigError("L3 must be positive");
    if (!finite(M1)) throw ConfigError("M1 must be finite");
  }
  if (!(alpha_max > 0.0 && alpha_max < kPi / 2.0)) throw ConfigError("alpha_max must lie in (0, pi/2)");
  if (!(omega_max > 0.0) || !finite(omega_max)) throw ConfigError("omega_max must be positive");
  if (!(u_alpha_max > 0.0) || !finite(u_alpha_max)) throw ConfigError("u_alpha_max must be positive");
  if (speeds.empty()) throw ConfigError("speed set must not be empty");
  for (double v : speeds) {
    if (v == 0.0 || !finite(v)) throw ConfigError("speed set entries must be finite and nonzero");
  }
}

double VehicleParams::max_speed() const {
  double m = 0.0;
  for (double v : speeds) m = std::max(m, std::abs(v));
  return m;
}

double VehicleParams::axle_speed_bound() const {
  if (kind == VehicleKind::CarLike) return 1.0;
  // v3 / v1 = cos(b3) * (cos(b2) + (M1/L1) sin(b2) tan(alpha)) <= sqrt(1 + ((M1/L1) tan(alpha_max))^2)
  const double a = std::abs(M1 / L1) * std::tan(alpha_max);
  return std::sqrt(1.0 + a * a);
}

VehicleState::VehicleState(VehicleKind k, const StateVector& v) : kind(k), values(v) {
  if (v.size() != idx::dim(k)) {
    throw ContractViolation("state dimension " + std::to_string(v.size()) + " does not match vehicle kind " +
                            to_string(k));
  }
}

VehicleState VehicleState::car_like(double x, double y, double heading, double alpha, double omega) {
  StateVector v(5);
  v << x, y, heading, alpha, omega;
  return VehicleState(VehicleKind::CarLike, v);
}

VehicleState VehicleState::two_trailer(double x, double y, double heading, double beta3, double beta2,
                                       double alpha, double omega) {
  StateVector v(7);
  v << x, y, heading, beta3, beta2, alpha, omega;
  return VehicleState(VehicleKind::TwoTrailer, v);
}

double VehicleState::beta3() const {
  if (kind != VehicleKind::TwoTrailer) throw ContractViolation("beta3 only exists for the two-trailer model");
  return values[idx::kBeta3];
}

double VehicleState::beta2() const {
  if (kind != VehicleKind::TwoTrailer) throw ContractViolation("beta2 only exists for the two-trailer model");
  return values[idx::kBeta2];
}

void VehicleState::normalize() {
  for (int i = 0; i < dim(); ++i) {
    if (idx::is_angle(kind, i)) values[i] = normalize_angle(values[i]);
  }
}

namespace {

void check_dims(const VehicleState& state, const VehicleParams& params) {
  if (state.kind != params.kind || state.dim() != params.state_dim()) {
    throw ContractViolation("state of kind " + to_string(state.kind) + " used with parameters of kind " +
                            to_string(params.kind));
  }
}

}  // namespace

StateVector dynamics(const VehicleState& state, const ControlInput& control, const VehicleParams& params) {
  check_dims(state, params);
  return dynamics_t<double>(params, state.values, control.v1, control.u_alpha);
}

VehicleState rk4_step(const VehicleState& state, const ControlInput& control, double dt,
                      const VehicleParams& params) {
  check_dims(state, params);
  VehicleState next(state.kind, rk4_step_t<double>(params, state.values, control.v1, control.u_alpha, dt));
  next.normalize();
  return next;
}

VehicleState integrate(const VehicleState& state, const ControlInput& control, double duration, int steps,
                       const VehicleParams& params) {
  if (steps <= 0) throw ContractViolation("integrate needs at least one step");
  VehicleState s = state;
  const double h = duration / steps;
  for (int i = 0; i < steps; ++i) s = rk4_step(s, control, h, params);
  return s;
}

JointAngles equilibrium_configuration(double alpha_e, const VehicleParams& params) {
  if (params.kind != VehicleKind::TwoTrailer) {
    throw ContractViolation("equilibrium configuration is only defined for the two-trailer model");
  }
  if (std::abs(alpha_e) > params.alpha_max) {
    throw ContractViolation("equilibrium steering angle exceeds alpha_max");
  }
  const double ta = std::tan(alpha_e);
  const double L1 = params.L1, L2 = params.L2, L3 = params.L3, M1 = params.M1;

  // beta2-rate = 0 only involves beta2: tan(a)/L1 - sin(b)/L2 + M1/(L1 L2) cos(b) tan(a) = 0.
  auto g = [&](double b) { return ta / L1 - std::sin(b) / L2 + M1 / (L1 * L2) * std::cos(b) * ta; };
  auto dg = [&](double b) { return -std::cos(b) / L2 - M1 / (L1 * L2) * std::sin(b) * ta; };
  double b2 = 0.0;
  bool converged = false;
  for (int it = 0; it < 100; ++it) {
    const double r = g(b2);
    if (std::abs(r) < 1e-15) {
      converged = true;
      break;
    }
    const double d = dg(b2);
    if (d == 0.0 || !std::isfinite(d)) break;
    double step = r / d;
    // Keep iterates inside the model's validity region.
    while (std::abs(b2 - step) >= kPi / 2.0) step *= 0.5;
    b2 -= step;
    if (std::abs(step) < 1e-16) {
      converged = std::abs(g(b2)) < 1e-12;
      break;
    }
  }
  if (!converged || std::abs(b2) >= kPi / 2.0) {
    throw EquilibriumNotFound("no circular equilibrium for alpha_e = " + std::to_string(alpha_e));
  }

  const double tb2 = std::tan(b2);
  const double s3 = L3 * (tb2 - M1 / L1 * ta) / (L2 * (1.0 + M1 / L1 * tb2 * ta));
  if (!(std::abs(s3) < 1.0)) {
    throw EquilibriumNotFound("trailer joint angle has no equilibrium for alpha_e = " + std::to_string(alpha_e));
  }
  JointAngles out{std::asin(s3), b2};

  const VehicleState probe =
      VehicleState::two_trailer(0.0, 0.0, 0.0, out.beta3, out.beta2, alpha_e, 0.0);
  const StateVector d = dynamics_t<double>(params, probe.values, 1.0, 0.0);
  if (std::abs(d[idx::kBeta3]) > 1e-10 || std::abs(d[idx::kBeta2]) > 1e-10) {
    throw EquilibriumNotFound("equilibrium residual too large for alpha_e = " + std::to_string(alpha_e));
  }
  return out;
}

bool validate(const VehicleState& state, const ControlInput& control, const VehicleParams& params) {
  return std::abs(state.alpha()) <= params.alpha_max && std::abs(state.omega()) <= params.omega_max &&
         std::abs(control.u_alpha) <= params.u_alpha_max;
}

std::vector<BodyPose> body_poses(const VehicleState& state, const VehicleParams& params) {
  check_dims(state, params);
  if (params.kind == VehicleKind::CarLike) {
    return {BodyPose{state.x(), state.y(), state.heading()}};
  }
  const double th3 = state.heading();
  const double th2 = th3 + state.beta3();
  const double th1 = th2 + state.beta2();
  const BodyPose trailer{state.x(), state.y(), th3};
  const BodyPose dolly{trailer.x + params.L3 * std::cos(th3), trailer.y + params.L3 * std::sin(th3), th2};
  const double hx = dolly.x + params.L2 * std::cos(th2);
  const double hy = dolly.y + params.L2 * std::sin(th2);
  const BodyPose truck{hx + params.M1 * std::cos(th1), hy + params.M1 * std::sin(th1), th1};
  return {truck, dolly, trailer};
}

}  // namespace mpgen
