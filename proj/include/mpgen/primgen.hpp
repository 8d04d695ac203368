#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mpgen/lattice.hpp"
#include "mpgen/maneuvers.hpp"
#include "mpgen/trajectory.hpp"
#include "mpgen/trajopt.hpp"
#include "mpgen/vehicle.hpp"

namespace mpgen {

/// A trajectory between two lattice states, anchored at the origin.
struct MotionPrimitive {
  LatticeState start;
  LatticeState end;
  Trajectory trajectory;
  double cost = 0.0;
  std::string maneuver_tag;

  bool operator==(const MotionPrimitive&) const;
};

class PrimitiveSet {
 public:
  PrimitiveSet() = default;
  PrimitiveSet(LatticeSpec lattice, VehicleParams params, ObjectiveWeights weights,
               std::vector<MotionPrimitive> primitives);

  const LatticeSpec& lattice() const { return lattice_; }
  const VehicleParams& params() const { return params_; }
  const ObjectiveWeights& weights() const { return weights_; }
  const std::vector<MotionPrimitive>& primitives() const { return primitives_; }
  std::size_t size() const { return primitives_.size(); }
  bool empty() const { return primitives_.empty(); }

  /// Ids of the primitives starting at (heading, steering).
  const std::vector<int>& applicable(int heading_idx, int steering_idx) const;

  bool operator==(const PrimitiveSet& o) const;

 private:
  void build_index();

  LatticeSpec lattice_;
  VehicleParams params_;
  ObjectiveWeights weights_;
  std::vector<MotionPrimitive> primitives_;
  std::vector<std::vector<int>> index_;
};

struct ManeuverReport {
  std::string tag;
  int n_ocp = 0;
  int n_prim = 0;
  int n_infeasible = 0;
};

struct GenerationReport {
  int n_ocp = 0;
  int n_prim = 0;
  /// OCPs that did not converge plus primitives dropped because no snapped
  /// endpoint could be reached.
  int n_infeasible = 0;
  /// Every solver call that did not converge, rounding re-solves included.
  int n_failed_solves = 0;
  int n_solves = 0;
  double wall_time = 0.0;
  /// A time budget cut the run short.
  bool partial = false;
  std::vector<ManeuverReport> per_maneuver;
  /// Tags of the OCPs that produced no primitive, with the reason.
  std::vector<std::pair<std::string, std::string>> infeasible;
};

struct GenerationConfig {
  SolverOptions solver;
  InterpretOptions interpret;
  int workers = 1;
  /// Seconds; 0 means unlimited. Only the exhaustive baseline honours it.
  double time_budget = 0.0;

  void validate() const;
};

/// Outcome of rounding one continuous solution onto the lattice.
struct ConnectivityResult {
  std::optional<MotionPrimitive> primitive;
  std::vector<SnapCandidate> candidates;
  /// Solve result per candidate, same order as `candidates`.
  std::vector<SolveResult> solves;
  /// Position in `candidates` of the returned primitive, or -1.
  int chosen = -1;
};

/// Warm start for the fixed-endpoint re-solve towards `target`: the continuous
/// knots with knot k shifted by (k / K) * (target - continuous end) in position.
WarmStart snapped_warm_start(const SolveResult& continuous, const OcpSpec& spec, const LatticeState& target,
                             const LatticeSpec& lattice, const SolverOptions& options);

/// Fixed-endpoint version of `spec` ending at `target`. Heading and joint
/// targets keep the unwrapped values of the relaxed manifold.
OcpSpec snapped_spec(const OcpSpec& spec, const LatticeState& target, const LatticeSpec& lattice);

/// Re-solves the fixed-endpoint problem for every snap candidate of the
/// continuous end state and keeps the cheapest converged one. Costs within
/// 1e-9 keep the earlier (closer) candidate.
ConnectivityResult ensure_connectivity(const SolveResult& continuous, const OcpSpec& spec, const LatticeSpec& lattice,
                                       const SolverOptions& options);

/// The four quarter-turn rotations of `prim` (k = 0 first).
std::vector<MotionPrimitive> exploit_symmetries(const MotionPrimitive& prim, const LatticeSpec& lattice);

/// Maneuver-based pipeline: interpret, solve, round onto the lattice, expand by
/// symmetry. Throws GenerationError if no primitive survives.
std::pair<PrimitiveSet, GenerationReport> generate(const std::vector<ManeuverSpec>& maneuvers,
                                                   const LatticeSpec& lattice, const VehicleParams& params,
                                                   const ObjectiveWeights& weights,
                                                   const GenerationConfig& config = {});

/// Exhaustive baseline. From every start (heading orbit representative,
/// steering level) and direction, a fixed-endpoint problem is tried towards
/// every lattice state whose position lies in the box |ix|, |iy| <= radius,
/// nearest positions first. Every converged attempt becomes a primitive and
/// every failed one counts as infeasible, the degenerate origin included.
std::pair<PrimitiveSet, GenerationReport> baseline_exhaustive(const LatticeSpec& lattice, const VehicleParams& params,
                                                              const ObjectiveWeights& weights, int radius = 4,
                                                              const GenerationConfig& config = {});

/// Re-solves the connectivity of `source` (its (start, end) pairs) for another
/// vehicle on `lattice`. Pairs that fail are dropped and counted infeasible.
std::pair<PrimitiveSet, GenerationReport> reuse_connectivity(const PrimitiveSet& source, const LatticeSpec& lattice,
                                                             const VehicleParams& params,
                                                             const ObjectiveWeights& weights,
                                                             const GenerationConfig& config = {});

}  // namespace mpgen
