#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mpgen/lattice.hpp"
#include "mpgen/maneuvers.hpp"
#include "mpgen/planner.hpp"
#include "mpgen/primgen.hpp"
#include "mpgen/trajectory.hpp"
#include "mpgen/vehicle.hpp"

namespace mpgen::io {

using nlohmann::json;

inline constexpr const char* kParamsSchema = "mpgen.params/1";
inline constexpr const char* kLatticeSchema = "mpgen.lattice/1";
inline constexpr const char* kManeuversSchema = "mpgen.maneuvers/1";
inline constexpr const char* kPrimitiveSetSchema = "mpgen.primitive_set/1";
inline constexpr const char* kScenarioSchema = "mpgen.scenario/1";
inline constexpr const char* kReportSchema = "mpgen.generation_report/1";
inline constexpr const char* kPlanSchema = "mpgen.plan/1";

/// File missing, unreadable or not JSON.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

json read_json(const std::filesystem::path& path);
/// Pretty-printed, keys sorted, trailing newline.
void write_json(const std::filesystem::path& path, const json& doc);
void write_text(const std::filesystem::path& path, const std::string& text);
std::string dump(const json& doc);

json to_json(const VehicleParams& p);
VehicleParams params_from_json(const json& j);

json to_json(const ObjectiveWeights& w);
ObjectiveWeights weights_from_json(const json& j);

/// Headings are stored explicitly. Reading also accepts
/// {"headings": {"default": n}} / {"regular": n} and
/// {"steering": {"turn_radius_m": R}}, which needs `params` for L1.
json to_json(const LatticeSpec& l);
LatticeSpec lattice_from_json(const json& j, const std::optional<VehicleParams>& params = std::nullopt);

json to_json(const LatticeState& s);
LatticeState lattice_state_from_json(const json& j);

struct ManeuverFile {
  std::vector<ManeuverSpec> maneuvers;
  ObjectiveWeights weights;
  ParallelLineForm parallel_form = ParallelLineForm::Lateral;
};

/// Each entry may list several "directions"; it expands to one ManeuverSpec per direction.
ManeuverFile maneuvers_from_json(const json& j);
json to_json(const ManeuverFile& f);

json to_json(const Trajectory& t);
Trajectory trajectory_from_json(const json& j, VehicleKind kind);

json to_json(const PrimitiveSet& s);
PrimitiveSet primitive_set_from_json(const json& j);

json to_json(const GenerationReport& r);
std::string report_table(const GenerationReport& r);

/// A planning scenario: one world, one goal, several starts.
struct Scenario {
  std::string name;
  PlanningProblem world;
  LatticeState goal;
  std::vector<LatticeState> starts;
};

/// Positions are metric and must fall on the lattice grid; headings are in
/// radians and must be lattice headings. "random_starts" draws `count` grid
/// starts in a box with the given seed (missing footprint -> default_footprint).
Scenario scenario_from_json(const json& j, const LatticeSpec& lattice, const VehicleParams& params,
                            std::uint64_t seed = 0);

json to_json(const Plan& p, const PrimitiveSet& set);

/// t, state components, v1, u_alpha.
void write_trajectory_csv(std::ostream& os, const Trajectory& t);
void write_path_csv(std::ostream& os, const std::vector<PathSample>& path);

/// Loaders that prefix errors with the file path.
VehicleParams load_params(const std::filesystem::path& path);
LatticeSpec load_lattice(const std::filesystem::path& path, const std::optional<VehicleParams>& params);
ManeuverFile load_maneuvers(const std::filesystem::path& path);
PrimitiveSet load_primitive_set(const std::filesystem::path& path);
Scenario load_scenario(const std::filesystem::path& path, const LatticeSpec& lattice, const VehicleParams& params,
                       std::uint64_t seed = 0);

}  // namespace mpgen::io
