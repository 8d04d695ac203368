#include "mpgen/planner.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <unordered_map>
#include <unordered_set>

#include "mpgen/angles.hpp"
#include "mpgen/errors.hpp"

namespace mpgen {

double point_box_distance(double x, double y, const Aabb& box) {
  const double dx = std::max({box.x_min - x, 0.0, x - box.x_max});
  const double dy = std::max({box.y_min - y, 0.0, y - box.y_max});
  return std::hypot(dx, dy);
}

bool circle_intersects_box(double cx, double cy, double radius, const Aabb& box) {
  return point_box_distance(cx, cy, box) <= radius;
}

std::vector<FootprintCircle> default_footprint(const VehicleParams& params) {
  std::vector<FootprintCircle> out;
  auto cover = [&](Body body, double from, double to, double radius) {
    const int n = std::max(1, static_cast<int>(std::ceil((to - from) / radius)));
    for (int i = 0; i <= n; ++i) out.push_back({body, from + (to - from) * i / n, radius});
  };
  cover(Body::Truck, 0.0, params.L1, 1.1);
  if (params.kind == VehicleKind::TwoTrailer) {
    out.push_back({Body::Dolly, 0.0, 1.0});
    cover(Body::Trailer, 0.0, params.L3 - 1.0, 1.25);
  }
  return out;
}

void PlanningProblem::validate() const {
  if (footprint.empty()) throw ProblemError("footprint has no circles");
  for (const auto& c : footprint) {
    if (!(c.radius > 0.0)) throw ProblemError("footprint circle radius must be positive");
  }
  if (!world_bounds.valid()) throw ProblemError("world bounds are empty");
  for (const auto& b : obstacles) {
    if (!b.valid()) throw ProblemError("obstacle box has min above max");
    if (b.x_min < world_bounds.x_min || b.y_min < world_bounds.y_min || b.x_max > world_bounds.x_max ||
        b.y_max > world_bounds.y_max) {
      throw ProblemError("obstacle lies outside the world bounds");
    }
  }
}

std::string to_string(PlanStatus s) { return s == PlanStatus::Solved ? "solved" : "no_solution"; }

std::vector<VehicleState> translate_primitive(const MotionPrimitive& prim, const LatticeState& anchor,
                                              const LatticeSpec& lattice) {
  if (anchor.heading_idx != prim.start.heading_idx || anchor.steering_idx != prim.start.steering_idx) {
    throw ContractViolation("primitive start heading/steering differs from the anchor");
  }
  const double ox = anchor.ix * lattice.resolution();
  const double oy = anchor.iy * lattice.resolution();
  std::vector<VehicleState> out = prim.trajectory.knots;
  for (auto& s : out) {
    s.values[idx::kX] += ox;
    s.values[idx::kY] += oy;
  }
  return out;
}

std::vector<VehicleState> sample_swept(const Trajectory& traj, const VehicleParams& params, double spacing) {
  if (!(spacing > 0.0)) throw ContractViolation("sampling spacing must be positive");
  std::vector<VehicleState> out;
  if (traj.knots.empty()) return out;
  out.push_back(traj.knots.front());
  const double h = traj.interval_length();
  const double reach = std::abs(traj.speed) * params.axle_speed_bound() * h;
  const int m = std::max(1, static_cast<int>(std::ceil(reach / spacing)));
  const int steps = std::max(1, traj.substeps / m);
  for (int k = 0; k < traj.intervals(); ++k) {
    VehicleState s = traj.knots[static_cast<std::size_t>(k)];
    const ControlInput u{traj.speed, traj.controls[static_cast<std::size_t>(k)]};
    for (int j = 1; j < m; ++j) {
      s = integrate(s, u, h / m, steps, params);
      out.push_back(s);
    }
    out.push_back(traj.knots[static_cast<std::size_t>(k) + 1]);
  }
  return out;
}

bool collision_free(const std::vector<VehicleState>& samples, const PlanningProblem& problem,
                    const VehicleParams& params) {
  const Aabb& w = problem.world_bounds;
  for (const auto& s : samples) {
    const std::vector<BodyPose> poses = body_poses(s, params);
    for (const auto& c : problem.footprint) {
      const auto b = static_cast<std::size_t>(c.body);
      if (b >= poses.size()) continue;
      const double cx = poses[b].x + c.offset * std::cos(poses[b].heading);
      const double cy = poses[b].y + c.offset * std::sin(poses[b].heading);
      if (cx - c.radius < w.x_min || cx + c.radius > w.x_max || cy - c.radius < w.y_min ||
          cy + c.radius > w.y_max) {
        return false;
      }
      for (const auto& box : problem.obstacles) {
        if (circle_intersects_box(cx, cy, c.radius, box)) return false;
      }
    }
  }
  return true;
}

double heuristic(const LatticeState& state, const LatticeState& goal, const LatticeSpec& lattice,
                 const VehicleParams& params) {
  const double d = std::hypot(static_cast<double>(state.ix) - goal.ix, static_cast<double>(state.iy) - goal.iy) *
                   lattice.resolution();
  // Primitive durations are only feasible to solver tolerance; stay strictly below.
  return d / (params.max_speed() * params.axle_speed_bound()) * (1.0 - 1e-8);
}

Planner::Planner(const PrimitiveSet& set) : set_(set) {
  const double spacing = set.lattice().resolution() / 4.0;
  swept_.reserve(set.size());
  for (const auto& p : set.primitives()) swept_.push_back(sample_swept(p.trajectory, set.params(), spacing));
}

bool Planner::edge_free(int id, const LatticeState& anchor, const PlanningProblem& problem) const {
  std::vector<VehicleState> s = swept(id);
  const double ox = anchor.ix * set_.lattice().resolution();
  const double oy = anchor.iy * set_.lattice().resolution();
  for (auto& v : s) {
    v.values[idx::kX] += ox;
    v.values[idx::kY] += oy;
  }
  return collision_free(s, problem, set_.params());
}

namespace {

void check_lattice_state(const LatticeState& s, const LatticeSpec& lattice, const char* what) {
  if (s.heading_idx < 0 || s.heading_idx >= lattice.num_headings() || s.steering_idx < 0 ||
      s.steering_idx >= lattice.num_steering()) {
    throw ProblemError(std::string(what) + " heading/steering is not part of the lattice");
  }
}

LatticeState apply(const LatticeState& anchor, const MotionPrimitive& p) {
  return {anchor.ix + p.end.ix, anchor.iy + p.end.iy, p.end.heading_idx, p.end.steering_idx};
}

}  // namespace

Plan Planner::plan(const PlanningProblem& problem) const {
  problem.validate();
  const LatticeSpec& lattice = set_.lattice();
  const VehicleParams& params = set_.params();
  check_lattice_state(problem.start, lattice, "start");
  check_lattice_state(problem.goal, lattice, "goal");

  Plan out;
  const VehicleState start_state = embed(problem.start, lattice, params);
  if (!collision_free({start_state}, problem, params)) return out;
  if (problem.start == problem.goal) {
    out.status = PlanStatus::Solved;
    out.path.push_back({0.0, start_state, 0.0, 0.0});
    return out;
  }

  struct Node {
    LatticeState state;
    double g = 0.0;
    int parent = -1;
    int primitive = -1;
  };
  struct Entry {
    double f;
    std::size_t seq;
    int node;
    bool operator>(const Entry& o) const { return f != o.f ? f > o.f : seq > o.seq; }
  };
  std::vector<Node> nodes{{problem.start, 0.0, -1, -1}};
  std::unordered_map<LatticeState, double, LatticeStateHash> best{{problem.start, 0.0}};
  std::unordered_set<LatticeState, LatticeStateHash> closed;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  std::size_t seq = 0;
  open.push({heuristic(problem.start, problem.goal, lattice, params), seq++, 0});

  int goal_node = -1;
  while (!open.empty()) {
    const Entry e = open.top();
    open.pop();
    const Node cur = nodes[static_cast<std::size_t>(e.node)];
    if (closed.contains(cur.state)) continue;
    closed.insert(cur.state);
    ++out.expansions;
    if (cur.state == problem.goal) {
      goal_node = e.node;
      break;
    }
    for (int id : set_.applicable(cur.state.heading_idx, cur.state.steering_idx)) {
      const MotionPrimitive& p = set_.primitives()[static_cast<std::size_t>(id)];
      const LatticeState next = apply(cur.state, p);
      if (closed.contains(next)) continue;
      const double g = cur.g + p.cost;
      const auto it = best.find(next);
      if (it != best.end() && it->second <= g) continue;
      if (!edge_free(id, cur.state, problem)) continue;
      best[next] = g;
      nodes.push_back({next, g, e.node, id});
      open.push({g + heuristic(next, problem.goal, lattice, params), seq++, static_cast<int>(nodes.size() - 1)});
    }
  }
  if (goal_node < 0) return out;

  for (int n = goal_node; nodes[static_cast<std::size_t>(n)].parent >= 0; n = nodes[static_cast<std::size_t>(n)].parent) {
    const Node& node = nodes[static_cast<std::size_t>(n)];
    out.steps.push_back({node.primitive, nodes[static_cast<std::size_t>(node.parent)].state});
  }
  std::reverse(out.steps.begin(), out.steps.end());
  out.status = PlanStatus::Solved;

  double t0 = 0.0;
  for (const auto& step : out.steps) {
    const MotionPrimitive& p = set_.primitives()[static_cast<std::size_t>(step.primitive_id)];
    out.total_cost += p.cost;
    const std::vector<VehicleState> knots = translate_primitive(p, step.anchor, lattice);
    const Trajectory& tr = p.trajectory;
    if (!out.path.empty()) out.path.pop_back();
    for (int k = 0; k <= tr.intervals(); ++k) {
      const bool last = k == tr.intervals();
      out.path.push_back({t0 + tr.time_at(k), knots[static_cast<std::size_t>(k)], last ? 0.0 : tr.speed,
                          last ? 0.0 : tr.controls[static_cast<std::size_t>(k)]});
    }
    t0 += tr.duration;
  }
  return out;
}

VehicleState simulate_plan(const Plan& plan, const PrimitiveSet& set, const VehicleState& start, int substeps) {
  VehicleState s = start;
  for (const auto& step : plan.steps) {
    const Trajectory& tr = set.primitives().at(static_cast<std::size_t>(step.primitive_id)).trajectory;
    const int n = substeps > 0 ? substeps : tr.substeps;
    for (int k = 0; k < tr.intervals(); ++k) {
      s = integrate(s, {tr.speed, tr.controls[static_cast<std::size_t>(k)]}, tr.interval_length(), n, set.params());
    }
  }
  return s;
}

}  // namespace mpgen
