#include "mpgen/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include "mpgen/angles.hpp"
#include "mpgen/errors.hpp"

namespace mpgen::io {

namespace {

const json& field(const json& j, const char* key) {
  if (!j.is_object()) throw ConfigError(std::string("expected an object holding '") + key + "'");
  const auto it = j.find(key);
  if (it == j.end()) throw ConfigError(std::string("missing field '") + key + "'");
  return *it;
}

template <typename T>
T get(const json& j, const char* key) {
  const json& v = field(j, key);
  try {
    return v.get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("field '") + key + "': " + e.what());
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return get<T>(j, key);
}

void check_schema(const json& j, const char* schema) {
  const std::string found = get_or<std::string>(j, "schema", "");
  if (found != schema) throw ConfigError("schema tag '" + found + "' is not '" + schema + "'");
}

template <typename Fn>
auto with_path(const std::filesystem::path& path, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  } catch (const ProblemError& e) {
    throw ProblemError(path.string() + ": " + e.what());
  }
}

int grid_index(double meters, double resolution, const char* what) {
  const double q = meters / resolution;
  const double r = std::round(q);
  if (std::abs(q - r) > 1e-9) throw ProblemError(std::string(what) + " is not on the lattice grid");
  return static_cast<int>(r);
}

}  // namespace

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

void write_json(const std::filesystem::path& path, const json& doc) { write_text(path, dump(doc)); }

json to_json(const VehicleParams& p) {
  json j{{"schema", kParamsSchema},
         {"kind", to_string(p.kind)},
         {"L1_m", p.L1},
         {"alpha_max_rad", p.alpha_max},
         {"omega_max_rad_s", p.omega_max},
         {"u_alpha_max_rad_s2", p.u_alpha_max},
         {"speeds_m_s", p.speeds}};
  if (p.kind == VehicleKind::TwoTrailer) {
    j["L2_m"] = p.L2;
    j["L3_m"] = p.L3;
    j["M1_m"] = p.M1;
  }
  return j;
}

VehicleParams params_from_json(const json& j) {
  check_schema(j, kParamsSchema);
  const VehicleKind kind = vehicle_kind_from_string(get<std::string>(j, "kind"));
  VehicleParams p = kind == VehicleKind::CarLike
                        ? VehicleParams::car_like(get<double>(j, "L1_m"))
                        : VehicleParams::two_trailer(get<double>(j, "L1_m"), get<double>(j, "L2_m"),
                                                     get<double>(j, "L3_m"), get<double>(j, "M1_m"));
  p.alpha_max = get_or<double>(j, "alpha_max_rad", p.alpha_max);
  p.omega_max = get_or<double>(j, "omega_max_rad_s", p.omega_max);
  p.u_alpha_max = get_or<double>(j, "u_alpha_max_rad_s2", p.u_alpha_max);
  p.speeds = get_or<std::vector<double>>(j, "speeds_m_s", p.speeds);
  p.validate();
  return p;
}

json to_json(const ObjectiveWeights& w) {
  return {{"lambda", w.lambda},   {"w_alpha", w.w_alpha}, {"w_omega", w.w_omega},
          {"w_ualpha", w.w_ualpha}, {"w_beta3", w.w_beta3}, {"w_beta2", w.w_beta2}};
}

ObjectiveWeights weights_from_json(const json& j) {
  ObjectiveWeights w;
  w.lambda = get_or<double>(j, "lambda", w.lambda);
  w.w_alpha = get_or<double>(j, "w_alpha", w.w_alpha);
  w.w_omega = get_or<double>(j, "w_omega", w.w_omega);
  w.w_ualpha = get_or<double>(j, "w_ualpha", w.w_ualpha);
  w.w_beta3 = get_or<double>(j, "w_beta3", w.w_beta3);
  w.w_beta2 = get_or<double>(j, "w_beta2", w.w_beta2);
  w.validate();
  return w;
}

json to_json(const LatticeSpec& l) {
  return {{"schema", kLatticeSchema},
          {"kind", to_string(l.kind())},
          {"resolution_m", l.resolution()},
          {"headings_rad", l.headings()},
          {"steering_levels_rad", l.steering_levels()}};
}

LatticeSpec lattice_from_json(const json& j, const std::optional<VehicleParams>& params) {
  check_schema(j, kLatticeSchema);
  std::vector<double> headings;
  if (j.contains("headings_rad")) {
    headings = get<std::vector<double>>(j, "headings_rad");
  } else {
    const json& h = field(j, "headings");
    if (h.contains("default")) {
      headings = default_heading_set(get<int>(h, "default"));
    } else {
      headings = regular_heading_set(get<int>(h, "regular"));
    }
  }
  std::vector<double> steering;
  if (j.contains("steering_levels_rad")) {
    steering = get<std::vector<double>>(j, "steering_levels_rad");
  } else {
    const json& s = field(j, "steering");
    if (!params) throw ConfigError("steering levels from a turn radius need vehicle parameters");
    steering = default_steering_levels(params->L1, get<double>(s, "turn_radius_m"));
  }
  VehicleKind kind = params ? params->kind : VehicleKind::CarLike;
  if (j.contains("kind")) kind = vehicle_kind_from_string(get<std::string>(j, "kind"));
  if (params && params->kind != kind) throw ConfigError("lattice kind differs from the vehicle parameters");
  return LatticeSpec::make(get<double>(j, "resolution_m"), std::move(headings), std::move(steering), kind);
}

json to_json(const LatticeState& s) {
  return {{"ix", s.ix}, {"iy", s.iy}, {"heading_idx", s.heading_idx}, {"steering_idx", s.steering_idx}};
}

LatticeState lattice_state_from_json(const json& j) {
  return {get<std::int32_t>(j, "ix"), get<std::int32_t>(j, "iy"), get<int>(j, "heading_idx"),
          get<int>(j, "steering_idx")};
}

ManeuverFile maneuvers_from_json(const json& j) {
  check_schema(j, kManeuversSchema);
  ManeuverFile f;
  if (j.contains("weights")) f.weights = weights_from_json(field(j, "weights"));
  const std::string form = get_or<std::string>(j, "parallel_line_form", "lateral");
  if (form == "lateral") {
    f.parallel_form = ParallelLineForm::Lateral;
  } else if (form == "printed") {
    f.parallel_form = ParallelLineForm::Printed;
  } else {
    throw ConfigError("field 'parallel_line_form': unknown value '" + form + "'");
  }
  const json& list = field(j, "maneuvers");
  if (!list.is_array()) throw ConfigError("field 'maneuvers' must be an array");
  for (std::size_t i = 0; i < list.size(); ++i) {
    const json& m = list[i];
    try {
      ManeuverSpec spec;
      spec.type = maneuver_type_from_string(get<std::string>(m, "type"));
      spec.delta_theta = get_or<int>(m, "delta_theta", 0);
      spec.c_lat = get_or<double>(m, "c_lat_m", 0.0);
      spec.lateral_steps = get_or<int>(m, "lateral_steps", 0);
      spec.both_signs = get_or<bool>(m, "both_signs", true);
      if (m.contains("steering_transition")) {
        const auto t = get<std::vector<int>>(m, "steering_transition");
        if (t.size() != 2) throw ConfigError("field 'steering_transition' needs two indices");
        spec.steering_transition = std::make_pair(t[0], t[1]);
      }
      const auto dirs = get_or<std::vector<std::string>>(m, "directions", {"forward"});
      if (dirs.empty()) throw ConfigError("field 'directions' is empty");
      for (const auto& d : dirs) {
        spec.direction = direction_from_string(d);
        f.maneuvers.push_back(spec);
      }
    } catch (const ConfigError& e) {
      throw ConfigError("maneuvers[" + std::to_string(i) + "]: " + e.what());
    } catch (const InterpretationError& e) {
      throw ConfigError("maneuvers[" + std::to_string(i) + "]: " + e.what());
    }
  }
  return f;
}

json to_json(const ManeuverFile& f) {
  json list = json::array();
  for (const auto& m : f.maneuvers) {
    json e{{"type", to_string(m.type)},
           {"directions", {to_string(m.direction)}},
           {"both_signs", m.both_signs},
           {"delta_theta", m.delta_theta}};
    if (m.lateral_steps != 0) e["lateral_steps"] = m.lateral_steps;
    if (m.c_lat != 0.0) e["c_lat_m"] = m.c_lat;
    if (m.steering_transition) e["steering_transition"] = {m.steering_transition->first, m.steering_transition->second};
    list.push_back(std::move(e));
  }
  return {{"schema", kManeuversSchema},
          {"weights", to_json(f.weights)},
          {"parallel_line_form", f.parallel_form == ParallelLineForm::Lateral ? "lateral" : "printed"},
          {"maneuvers", std::move(list)}};
}

json to_json(const Trajectory& t) {
  json knots = json::array();
  for (const auto& k : t.knots) {
    json row = json::array();
    for (int i = 0; i < k.dim(); ++i) row.push_back(k.values[i]);
    knots.push_back(std::move(row));
  }
  return {{"T", t.duration},
          {"knots", std::move(knots)},
          {"controls", t.controls},
          {"speed", t.speed},
          {"direction", to_string(t.direction)},
          {"substeps", t.substeps}};
}

Trajectory trajectory_from_json(const json& j, VehicleKind kind) {
  Trajectory t;
  t.duration = get<double>(j, "T");
  t.controls = get<std::vector<double>>(j, "controls");
  t.speed = get<double>(j, "speed");
  t.direction = direction_from_string(get<std::string>(j, "direction"));
  t.substeps = get<int>(j, "substeps");
  for (const auto& row : field(j, "knots")) {
    const auto v = row.get<std::vector<double>>();
    if (static_cast<int>(v.size()) != idx::dim(kind)) throw ConfigError("knot has the wrong dimension");
    t.knots.emplace_back(kind, Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
  }
  if (t.knots.size() != t.controls.size() + 1) throw ConfigError("knot and control counts disagree");
  return t;
}

json to_json(const PrimitiveSet& s) {
  json prims = json::array();
  for (const auto& p : s.primitives()) {
    json e = to_json(p.trajectory);
    e["start"] = to_json(p.start);
    e["end"] = to_json(p.end);
    e["cost"] = p.cost;
    e["tag"] = p.maneuver_tag;
    prims.push_back(std::move(e));
  }
  return {{"schema", kPrimitiveSetSchema},
          {"lattice", to_json(s.lattice())},
          {"params", to_json(s.params())},
          {"weights", to_json(s.weights())},
          {"primitives", std::move(prims)}};
}

PrimitiveSet primitive_set_from_json(const json& j) {
  check_schema(j, kPrimitiveSetSchema);
  const VehicleParams params = params_from_json(field(j, "params"));
  const LatticeSpec lattice = lattice_from_json(field(j, "lattice"), params);
  const ObjectiveWeights weights = weights_from_json(field(j, "weights"));
  std::vector<MotionPrimitive> prims;
  const json& list = field(j, "primitives");
  for (std::size_t i = 0; i < list.size(); ++i) {
    try {
      MotionPrimitive p;
      p.trajectory = trajectory_from_json(list[i], params.kind);
      p.start = lattice_state_from_json(field(list[i], "start"));
      p.end = lattice_state_from_json(field(list[i], "end"));
      p.cost = get<double>(list[i], "cost");
      p.trajectory.cost = p.cost;
      p.maneuver_tag = get<std::string>(list[i], "tag");
      prims.push_back(std::move(p));
    } catch (const ConfigError& e) {
      throw ConfigError("primitives[" + std::to_string(i) + "]: " + e.what());
    }
  }
  try {
    return PrimitiveSet(lattice, params, weights, std::move(prims));
  } catch (const ContractViolation& e) {
    throw ConfigError(e.what());
  }
}

json to_json(const GenerationReport& r) {
  json per = json::array();
  for (const auto& m : r.per_maneuver) {
    per.push_back({{"tag", m.tag}, {"n_ocp", m.n_ocp}, {"n_prim", m.n_prim}, {"n_infeasible", m.n_infeasible}});
  }
  json inf = json::array();
  for (const auto& [tag, why] : r.infeasible) inf.push_back({{"tag", tag}, {"reason", why}});
  return {{"schema", kReportSchema},
          {"n_ocp", r.n_ocp},
          {"n_prim", r.n_prim},
          {"n_infeasible", r.n_infeasible},
          {"n_solves", r.n_solves},
          {"n_failed_solves", r.n_failed_solves},
          {"wall_time_s", r.wall_time},
          {"partial", r.partial},
          {"per_maneuver", std::move(per)},
          {"infeasible", std::move(inf)}};
}

std::string report_table(const GenerationReport& r) {
  std::ostringstream os;
  os << std::left << std::setw(36) << "maneuver" << std::right << std::setw(8) << "n_ocp" << std::setw(8) << "n_prim"
     << std::setw(8) << "n_inf" << "\n";
  for (const auto& m : r.per_maneuver) {
    os << std::left << std::setw(36) << m.tag << std::right << std::setw(8) << m.n_ocp << std::setw(8) << m.n_prim
       << std::setw(8) << m.n_infeasible << "\n";
  }
  os << std::left << std::setw(36) << "total" << std::right << std::setw(8) << r.n_ocp << std::setw(8) << r.n_prim
     << std::setw(8) << r.n_infeasible << "\n";
  os << "solves " << r.n_solves << " (failed " << r.n_failed_solves << "), wall time " << std::fixed
     << std::setprecision(2) << r.wall_time << " s" << (r.partial ? " [partial: time budget exceeded]" : "") << "\n";
  return os.str();
}

namespace {

Aabb box_from_json(const json& j) {
  Aabb b{get<double>(j, "x_min"), get<double>(j, "y_min"), get<double>(j, "x_max"), get<double>(j, "y_max")};
  if (!b.valid()) throw ProblemError("box has min above max");
  return b;
}

LatticeState pose_from_json(const json& j, const LatticeSpec& lattice, int default_steering) {
  if (j.contains("ix")) return lattice_state_from_json(j);
  LatticeState s;
  s.ix = grid_index(get<double>(j, "x_m"), lattice.resolution(), "x_m");
  s.iy = grid_index(get<double>(j, "y_m"), lattice.resolution(), "y_m");
  s.heading_idx = lattice.find_heading(normalize_angle(get<double>(j, "heading_rad")));
  if (s.heading_idx < 0) throw ProblemError("heading_rad is not a lattice heading");
  s.steering_idx = get_or<int>(j, "steering_idx", default_steering);
  return s;
}

Body body_from_string(const std::string& s) {
  if (s == "truck") return Body::Truck;
  if (s == "dolly") return Body::Dolly;
  if (s == "trailer") return Body::Trailer;
  throw ConfigError("unknown body '" + s + "'");
}

}  // namespace

Scenario scenario_from_json(const json& j, const LatticeSpec& lattice, const VehicleParams& params,
                            std::uint64_t seed) {
  check_schema(j, kScenarioSchema);
  Scenario s;
  s.name = get_or<std::string>(j, "name", "scenario");
  s.world.world_bounds = box_from_json(field(j, "world_bounds"));
  if (j.contains("obstacles")) {
    for (const auto& o : field(j, "obstacles")) s.world.obstacles.push_back(box_from_json(o));
  }
  if (j.contains("footprint")) {
    for (const auto& c : field(j, "footprint")) {
      s.world.footprint.push_back(
          {body_from_string(get<std::string>(c, "body")), get<double>(c, "offset_m"), get<double>(c, "radius_m")});
    }
  } else {
    s.world.footprint = default_footprint(params);
  }
  const int zero = lattice.zero_steering_index();
  s.goal = pose_from_json(field(j, "goal"), lattice, zero);
  if (j.contains("starts")) {
    for (const auto& p : field(j, "starts")) s.starts.push_back(pose_from_json(p, lattice, zero));
  }
  if (j.contains("random_starts")) {
    const json& rs = field(j, "random_starts");
    const Aabb region = box_from_json(field(rs, "region"));
    const int count = get<int>(rs, "count");
    const int h = lattice.find_heading(normalize_angle(get<double>(rs, "heading_rad")));
    if (h < 0) throw ProblemError("random_starts heading_rad is not a lattice heading");
    const double r = lattice.resolution();
    const int x0 = static_cast<int>(std::ceil(region.x_min / r));
    const int x1 = static_cast<int>(std::floor(region.x_max / r));
    const int y0 = static_cast<int>(std::ceil(region.y_min / r));
    const int y1 = static_cast<int>(std::floor(region.y_max / r));
    if (x0 > x1 || y0 > y1) throw ProblemError("random_starts region holds no grid point");
    std::mt19937_64 rng(seed);
    for (int i = 0; i < count; ++i) {
      const auto ix = static_cast<std::int32_t>(x0 + static_cast<int>(rng() % static_cast<std::uint64_t>(x1 - x0 + 1)));
      const auto iy = static_cast<std::int32_t>(y0 + static_cast<int>(rng() % static_cast<std::uint64_t>(y1 - y0 + 1)));
      s.starts.push_back({ix, iy, h, zero});
    }
  }
  if (s.starts.empty()) throw ProblemError("scenario has no start");
  s.world.start = s.starts.front();
  s.world.goal = s.goal;
  s.world.validate();
  return s;
}

json to_json(const Plan& p, const PrimitiveSet& set) {
  json steps = json::array();
  for (const auto& st : p.steps) {
    const MotionPrimitive& prim = set.primitives().at(static_cast<std::size_t>(st.primitive_id));
    steps.push_back({{"primitive_id", st.primitive_id},
                     {"anchor", to_json(st.anchor)},
                     {"tag", prim.maneuver_tag},
                     {"cost", prim.cost}});
  }
  return {{"schema", kPlanSchema},
          {"status", to_string(p.status)},
          {"total_cost", p.total_cost},
          {"expansions", p.expansions},
          {"steps", std::move(steps)}};
}

namespace {

void write_header(std::ostream& os, VehicleKind kind) {
  os << "t";
  if (kind == VehicleKind::CarLike) {
    os << ",x1,y1,theta1,alpha,omega";
  } else {
    os << ",x3,y3,theta3,beta3,beta2,alpha,omega";
  }
  os << ",v1,u_alpha\n";
}

void write_row(std::ostream& os, double t, const VehicleState& s, double v1, double u) {
  os << t;
  for (int i = 0; i < s.dim(); ++i) os << "," << s.values[i];
  os << "," << v1 << "," << u << "\n";
}

}  // namespace

void write_trajectory_csv(std::ostream& os, const Trajectory& t) {
  if (t.knots.empty()) return;
  os << std::setprecision(17);
  write_header(os, t.knots.front().kind);
  for (int k = 0; k <= t.intervals(); ++k) {
    const bool last = k == t.intervals();
    write_row(os, t.time_at(k), t.knots[static_cast<std::size_t>(k)], last ? 0.0 : t.speed,
              last ? 0.0 : t.controls[static_cast<std::size_t>(k)]);
  }
}

void write_path_csv(std::ostream& os, const std::vector<PathSample>& path) {
  if (path.empty()) return;
  os << std::setprecision(17);
  write_header(os, path.front().state.kind);
  for (const auto& p : path) write_row(os, p.t, p.state, p.v1, p.u_alpha);
}

VehicleParams load_params(const std::filesystem::path& path) {
  return with_path(path, [&] { return params_from_json(read_json(path)); });
}

LatticeSpec load_lattice(const std::filesystem::path& path, const std::optional<VehicleParams>& params) {
  return with_path(path, [&] { return lattice_from_json(read_json(path), params); });
}

ManeuverFile load_maneuvers(const std::filesystem::path& path) {
  return with_path(path, [&] { return maneuvers_from_json(read_json(path)); });
}

PrimitiveSet load_primitive_set(const std::filesystem::path& path) {
  return with_path(path, [&] { return primitive_set_from_json(read_json(path)); });
}

Scenario load_scenario(const std::filesystem::path& path, const LatticeSpec& lattice, const VehicleParams& params,
                       std::uint64_t seed) {
  return with_path(path, [&] { return scenario_from_json(read_json(path), lattice, params, seed); });
}

}  // namespace mpgen::io
