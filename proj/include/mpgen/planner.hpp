#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mpgen/lattice.hpp"
#include "mpgen/primgen.hpp"
#include "mpgen/vehicle.hpp"

namespace mpgen {

struct Aabb {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  bool valid() const { return x_min <= x_max && y_min <= y_max; }
  bool operator==(const Aabb&) const = default;
};

/// Distance from a point to a box (0 inside).
double point_box_distance(double x, double y, const Aabb& box);

/// True if the closed disc touches the box.
bool circle_intersects_box(double cx, double cy, double radius, const Aabb& box);

/// Bounding circle fixed to one body; `offset` is measured forward from the
/// body's axle along its heading.
struct FootprintCircle {
  Body body = Body::Truck;
  double offset = 0.0;
  double radius = 1.0;

  bool operator==(const FootprintCircle&) const = default;
};

/// Circles covering a plausible outline of each body of the vehicle.
std::vector<FootprintCircle> default_footprint(const VehicleParams& params);

struct PlanningProblem {
  LatticeState start;
  LatticeState goal;
  std::vector<Aabb> obstacles;
  Aabb world_bounds{-50.0, -50.0, 50.0, 50.0};
  std::vector<FootprintCircle> footprint;

  /// Throws ProblemError on an empty footprint, broken boxes or obstacles
  /// outside the world.
  void validate() const;
};

struct PlanStep {
  int primitive_id = 0;
  /// Lattice state the primitive is applied from.
  LatticeState anchor;
};

/// One point of the concatenated trajectory. `u_alpha` and `v1` are the
/// controls held from this sample to the next.
struct PathSample {
  double t = 0.0;
  VehicleState state;
  double v1 = 0.0;
  double u_alpha = 0.0;
};

enum class PlanStatus { Solved, NoSolution };

std::string to_string(PlanStatus s);

struct Plan {
  PlanStatus status = PlanStatus::NoSolution;
  std::vector<PlanStep> steps;
  double total_cost = 0.0;
  std::vector<PathSample> path;
  int expansions = 0;

  bool solved() const { return status == PlanStatus::Solved; }
};

/// Knots of `prim` shifted to start at `anchor`. Throws ContractViolation if
/// the anchor's heading or steering differs from the primitive's start.
std::vector<VehicleState> translate_primitive(const MotionPrimitive& prim, const LatticeState& anchor,
                                              const LatticeSpec& lattice);

/// States along a trajectory, dense enough that the reference point moves at
/// most `spacing` between samples (sub-interval states come from RK4).
std::vector<VehicleState> sample_swept(const Trajectory& traj, const VehicleParams& params, double spacing);

/// True iff every body circle at every sample is disjoint from every obstacle
/// and inside the world bounds.
bool collision_free(const std::vector<VehicleState>& samples, const PlanningProblem& problem,
                    const VehicleParams& params);

/// Euclidean distance over the largest reference-point speed, shrunk by a
/// relative 1e-8; a lower bound on the cost to go.
double heuristic(const LatticeState& state, const LatticeState& goal, const LatticeSpec& lattice,
                 const VehicleParams& params);

/// A* over translated primitives with a closed set on lattice states.
/// Sweeps are sampled at resolution / 4.
class Planner {
 public:
  explicit Planner(const PrimitiveSet& set);

  Plan plan(const PlanningProblem& problem) const;

  const PrimitiveSet& set() const { return set_; }
  /// Swept samples of primitive `id` anchored at the origin.
  const std::vector<VehicleState>& swept(int id) const { return swept_.at(static_cast<std::size_t>(id)); }
  /// Whether primitive `id` applied at `anchor` stays collision-free.
  bool edge_free(int id, const LatticeState& anchor, const PlanningProblem& problem) const;

 private:
  const PrimitiveSet& set_;
  std::vector<std::vector<VehicleState>> swept_;
};

/// Simulates the plan's controls from the embedded start state, primitive by
/// primitive, without resetting to the knots.
VehicleState simulate_plan(const Plan& plan, const PrimitiveSet& set, const VehicleState& start, int substeps = 0);

}  // namespace mpgen
