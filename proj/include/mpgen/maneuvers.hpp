#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mpgen/lattice.hpp"
#include "mpgen/trajectory.hpp"
#include "mpgen/vehicle.hpp"

namespace mpgen {

enum class ManeuverType { Straight, HeadingChange, Parallel, Circular };

std::string to_string(ManeuverType t);
ManeuverType maneuver_type_from_string(const std::string& s);

/// How the end line of a parallel maneuver is written.
///   Lateral: -sin(theta) x + cos(theta) y = c_lat (signed lateral offset, default)
///   Printed: cos(theta) y + sin(theta) x = c_lat (legacy form; equal for theta = 0)
enum class ParallelLineForm { Lateral, Printed };

/// One user-declared maneuver. Each spec is expanded over every heading orbit.
struct ManeuverSpec {
  ManeuverType type = ManeuverType::Straight;
  /// Heading-index offset (HeadingChange / Circular).
  int delta_theta = 0;
  /// Lateral offset in meters (Parallel). Ignored when lateral_steps != 0.
  double c_lat = 0.0;
  /// Lateral offset in grid lines of the start heading (Parallel).
  int lateral_steps = 0;
  Direction direction = Direction::Forward;
  /// Emit both +delta/-delta (or +c_lat/-c_lat).
  bool both_signs = true;
  /// Circular only: (start, end) steering indices; all adjacent pairs if unset.
  std::optional<std::pair<int, int>> steering_transition;

  std::string tag() const;
};

struct FixedComponent {
  int component = 0;
  double value = 0.0;
};

/// a_x * x + a_y * y = c over the terminal position.
struct LinearConstraint {
  double a_x = 0.0;
  double a_y = 0.0;
  double c = 0.0;
};

/// Relaxed end-point condition g(x(T)) = 0. Fixed angle targets are stored
/// unwrapped (start heading plus the signed change) so the optimizer sees a
/// continuous target.
struct TerminalManifold {
  std::vector<FixedComponent> fixed;
  std::vector<int> free;
  std::vector<LinearConstraint> linear;
  /// Lattice heading and steering indices that the fixed components encode.
  int end_heading_idx = -1;
  int end_steering_idx = -1;

  /// Number of scalar equalities l.
  int codimension() const { return static_cast<int>(fixed.size() + linear.size()); }
  bool position_fixed() const;
  std::optional<double> fixed_value(int component) const;
  /// Throws ContractViolation unless every component is covered exactly once.
  void check_cover(int state_dim) const;
};

/// Boundary data of one optimal control problem.
struct OcpSpec {
  VehicleState initial_state;
  LatticeState start;
  TerminalManifold manifold;
  Direction direction = Direction::Forward;
  double speed = 1.0;
  ObjectiveWeights objective;
  VehicleParams params;
  std::string tag;
  int heading_sign = 0;
};

struct InterpretOptions {
  ParallelLineForm parallel_form = ParallelLineForm::Lateral;
  /// Emit one representative heading per quarter-turn orbit.
  bool exploit_symmetry = true;
};

/// Compiles maneuvers into OCPs, one per (maneuver, representative heading, sign).
std::vector<OcpSpec> interpret(const std::vector<ManeuverSpec>& maneuvers, const LatticeSpec& spec,
                               const VehicleParams& params, const ObjectiveWeights& objective,
                               const InterpretOptions& options = {});

/// Stacked residuals of fixed equalities (angles wrapped) then linear constraints.
Eigen::VectorXd manifold_residual(const TerminalManifold& m, const VehicleState& x_T);

/// Speed for a direction from the parameter set (largest magnitude of that sign).
double speed_for(Direction d, const VehicleParams& params);

/// Manifold that fixes every component of `target` (fixed-endpoint problem).
TerminalManifold fixed_endpoint_manifold(const VehicleState& target, const VehicleState& initial);

}  // namespace mpgen
