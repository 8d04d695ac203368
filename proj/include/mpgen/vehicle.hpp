#pragma once

#include <Eigen/Core>
#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "mpgen/errors.hpp"

namespace mpgen {

enum class VehicleKind { CarLike, TwoTrailer };

std::string to_string(VehicleKind kind);
VehicleKind vehicle_kind_from_string(const std::string& s);

/// Geometry and actuator limits of one instance of the vehicle family.
///
/// For the two-trailer system, M1 > 0 places the off-axle hitch behind the
/// truck's rear axle. The trailer (x3, y3) is the reference point of the state.
struct VehicleParams {
  VehicleKind kind = VehicleKind::CarLike;
  double L1 = 4.66;
  double L2 = 0.0;
  double L3 = 0.0;
  double M1 = 0.0;
  double alpha_max = std::numbers::pi / 4.0;
  double omega_max = 0.5;
  double u_alpha_max = 40.0;
  std::vector<double> speeds{1.0, -1.0};

  static VehicleParams car_like(double L1);
  static VehicleParams two_trailer(double L1, double L2, double L3, double M1);

  /// Throws ConfigError when an invariant is broken.
  void validate() const;
  int state_dim() const { return kind == VehicleKind::CarLike ? 5 : 7; }
  double max_speed() const;
  /// Upper bound on |reference axle speed| / |v1| over the admissible set.
  double axle_speed_bound() const;

  bool operator==(const VehicleParams&) const = default;
};

using StateVector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 7, 1>;

template <typename Scalar>
using StateVectorT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1, 0, 7, 1>;

/// Component positions inside a state vector.
///   CarLike:    (x1, y1, theta1, alpha, omega)
///   TwoTrailer: (x3, y3, theta3, beta3, beta2, alpha, omega)
namespace idx {
inline constexpr int kX = 0;
inline constexpr int kY = 1;
inline constexpr int kHeading = 2;
inline constexpr int kBeta3 = 3;
inline constexpr int kBeta2 = 4;
inline constexpr int alpha(VehicleKind k) { return k == VehicleKind::CarLike ? 3 : 5; }
inline constexpr int omega(VehicleKind k) { return k == VehicleKind::CarLike ? 4 : 6; }
inline constexpr int dim(VehicleKind k) { return k == VehicleKind::CarLike ? 5 : 7; }
/// True for components that are angles wrapped into (-pi, pi].
inline constexpr bool is_angle(VehicleKind k, int i) {
  return i == kHeading || (k == VehicleKind::TwoTrailer && (i == kBeta3 || i == kBeta2));
}
}  // namespace idx

struct VehicleState {
  VehicleKind kind = VehicleKind::CarLike;
  StateVector values = StateVector::Zero(5);

  VehicleState() = default;
  VehicleState(VehicleKind k, const StateVector& v);

  static VehicleState car_like(double x, double y, double heading, double alpha, double omega);
  static VehicleState two_trailer(double x, double y, double heading, double beta3, double beta2,
                                  double alpha, double omega);

  int dim() const { return static_cast<int>(values.size()); }
  double x() const { return values[idx::kX]; }
  double y() const { return values[idx::kY]; }
  double heading() const { return values[idx::kHeading]; }
  double alpha() const { return values[idx::alpha(kind)]; }
  double omega() const { return values[idx::omega(kind)]; }
  double beta3() const;
  double beta2() const;

  /// Wraps heading and joint angles into (-pi, pi].
  void normalize();
};

struct ControlInput {
  double v1 = 1.0;
  double u_alpha = 0.0;
};

struct JointAngles {
  double beta3 = 0.0;
  double beta2 = 0.0;
};

namespace detail {
inline double scalar_value(double v) { return v; }
template <typename S>
double scalar_value(const S& s) {
  return s.value();
}
}  // namespace detail

/// Time derivative of the state. Templated so the trajectory optimizer can
/// differentiate through it; `v1` is a per-primitive constant.
template <typename Scalar>
StateVectorT<Scalar> dynamics_t(const VehicleParams& p, const StateVectorT<Scalar>& x, double v1,
                                const Scalar& u_alpha) {
  using std::cos;
  using std::sin;
  using std::tan;
  StateVectorT<Scalar> dx(x.size());
  if (p.kind == VehicleKind::CarLike) {
    const Scalar& th = x[2];
    const Scalar& a = x[3];
    dx[0] = v1 * cos(th);
    dx[1] = v1 * sin(th);
    dx[2] = v1 * tan(a) / p.L1;
    dx[3] = x[4];
    dx[4] = u_alpha;
    return dx;
  }
  const Scalar& th3 = x[2];
  const Scalar& b3 = x[3];
  const Scalar& b2 = x[4];
  const Scalar& a = x[5];
  constexpr double kHalfPi = std::numbers::pi / 2.0;
  if (std::abs(detail::scalar_value(b3)) >= kHalfPi ||
      std::abs(detail::scalar_value(b2)) >= kHalfPi) {
    throw ModelDomainError("joint angle outside (-pi/2, pi/2): jack-knife region");
  }
  const Scalar ta = tan(a);
  const Scalar tb2 = tan(b2);
  const Scalar cb2 = cos(b2);
  const Scalar sb3 = sin(b3);
  const double m_ratio = p.M1 / p.L1;
  const Scalar hitch = 1.0 + m_ratio * tb2 * ta;
  const Scalar v3 = v1 * cos(b3) * cb2 * hitch;
  dx[0] = v3 * cos(th3);
  dx[1] = v3 * sin(th3);
  dx[2] = v1 * sb3 * cb2 / p.L3 * hitch;
  dx[3] = v1 * cb2 * ((tb2 - m_ratio * ta) / p.L2 - sb3 / p.L3 * hitch);
  dx[4] = v1 * (ta / p.L1 - sin(b2) / p.L2 + p.M1 / (p.L1 * p.L2) * cb2 * ta);
  dx[5] = x[6];
  dx[6] = u_alpha;
  return dx;
}

/// One classic RK4 step of length h (no angle wrapping).
template <typename Scalar, typename Step>
StateVectorT<Scalar> rk4_step_t(const VehicleParams& p, const StateVectorT<Scalar>& x, double v1,
                                const Scalar& u_alpha, const Step& h) {
  const StateVectorT<Scalar> k1 = dynamics_t<Scalar>(p, x, v1, u_alpha);
  const StateVectorT<Scalar> k2 = dynamics_t<Scalar>(p, (x + k1 * (h * 0.5)).eval(), v1, u_alpha);
  const StateVectorT<Scalar> k3 = dynamics_t<Scalar>(p, (x + k2 * (h * 0.5)).eval(), v1, u_alpha);
  const StateVectorT<Scalar> k4 = dynamics_t<Scalar>(p, (x + k3 * h).eval(), v1, u_alpha);
  return x + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
}

/// Integrates one shooting interval of length dt with `substeps` RK4 steps
/// and a constant steering acceleration (no angle wrapping).
template <typename Scalar, typename Step>
StateVectorT<Scalar> integrate_interval_t(const VehicleParams& p, StateVectorT<Scalar> x, double v1,
                                          const Scalar& u_alpha, const Step& dt, int substeps) {
  const Step h = dt / static_cast<double>(substeps);
  for (int i = 0; i < substeps; ++i) x = rk4_step_t<Scalar>(p, x, v1, u_alpha, h);
  return x;
}

/// Derivative of the state under the given control.
StateVector dynamics(const VehicleState& state, const ControlInput& control, const VehicleParams& params);

/// RK4 step followed by angle normalization.
VehicleState rk4_step(const VehicleState& state, const ControlInput& control, double dt,
                      const VehicleParams& params);

/// `steps` RK4 steps of equal length over `duration`, normalizing after each step.
VehicleState integrate(const VehicleState& state, const ControlInput& control, double duration, int steps,
                       const VehicleParams& params);

/// Joint angles that stay constant under constant steering `alpha_e` (omega = 0).
/// Throws EquilibriumNotFound if the root-find fails or leaves the valid region.
JointAngles equilibrium_configuration(double alpha_e, const VehicleParams& params);

/// True iff steering angle, steering rate and steering acceleration respect the limits.
bool validate(const VehicleState& state, const ControlInput& control, const VehicleParams& params);

/// Pose of one rigid body of the vehicle, located at its (rear) axle.
struct BodyPose {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
};

enum class Body { Truck = 0, Dolly = 1, Trailer = 2 };

/// Axle poses of every body. CarLike returns only the truck.
std::vector<BodyPose> body_poses(const VehicleState& state, const VehicleParams& params);

}  // namespace mpgen
