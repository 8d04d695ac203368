#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <vector>

#include "mpgen/planner.hpp"
#include "mpgen/transcription.hpp"
#include "mpgen/trajopt.hpp"

namespace mpgen::testing {

inline TranscriptionData data_for(const OcpSpec& spec, const SolverOptions& o) {
  TranscriptionData d;
  d.initial_state = spec.initial_state;
  d.manifold = spec.manifold;
  d.speed = spec.speed;
  d.direction = spec.direction;
  d.weights = spec.objective;
  d.params = spec.params;
  d.intervals = o.intervals;
  d.substeps = o.substeps;
  d.joint_angle_limit = o.joint_angle_limit;
  d.t_min = o.t_min;
  d.t_max = o.t_max;
  return d;
}

/// Projected Lagrangian gradient built from central differences of f and c only.
/// NaN if an evaluation leaves the model domain.
inline double fd_kkt_residual(const nlp::Problem& prob, const Eigen::VectorXd& z, const Eigen::VectorXd& y) {
  const int n = prob.num_variables();
  Eigen::VectorXd cp, cm;
  double r = 0.0;
  for (int i = 0; i < n; ++i) {
    const double h = 1e-6 * std::max(1.0, std::abs(z[i]));
    Eigen::VectorXd zp = z, zm = z;
    zp[i] += h;
    zm[i] -= h;
    double fp = 0, fm = 0;
    if (!prob.evaluate(zp, fp, cp) || !prob.evaluate(zm, fm, cm)) return std::numeric_limits<double>::quiet_NaN();
    const double g = (fp - fm + y.dot(cp - cm)) / (2 * h);
    const double stepped = std::clamp(z[i] - g, prob.lower()[i], prob.upper()[i]);
    r = std::max(r, std::abs(stepped - z[i]));
  }
  return r;
}

/// Sweep check written out independently of the planner: every circle must
/// clear every box and stay inside the world.
inline bool sweep_clear(const std::vector<VehicleState>& samples, double ox, double oy, const PlanningProblem& pb,
                        const VehicleParams& params) {
  for (const auto& s0 : samples) {
    VehicleState s = s0;
    s.values[idx::kX] += ox;
    s.values[idx::kY] += oy;
    const auto poses = body_poses(s, params);
    for (const auto& c : pb.footprint) {
      const auto& pose = poses.at(static_cast<std::size_t>(c.body));
      const double cx = pose.x + c.offset * std::cos(pose.heading);
      const double cy = pose.y + c.offset * std::sin(pose.heading);
      if (cx - c.radius < pb.world_bounds.x_min || cx + c.radius > pb.world_bounds.x_max ||
          cy - c.radius < pb.world_bounds.y_min || cy + c.radius > pb.world_bounds.y_max) {
        return false;
      }
      for (const auto& b : pb.obstacles) {
        const double nx = std::clamp(cx, b.x_min, b.x_max);
        const double ny = std::clamp(cy, b.y_min, b.y_max);
        if ((nx - cx) * (nx - cx) + (ny - cy) * (ny - cy) <= c.radius * c.radius) return false;
      }
    }
  }
  return true;
}

/// Plain Dijkstra over the planner's primitive graph; -1 if the goal is unreachable.
inline double dijkstra(const Planner& planner, const PlanningProblem& pb) {
  const PrimitiveSet& set = planner.set();
  const double r = set.lattice().resolution();
  if (!sweep_clear({embed(pb.start, set.lattice(), set.params())}, 0, 0, pb, set.params())) return -1.0;
  std::map<LatticeState, double> dist{{pb.start, 0.0}};
  using Item = std::pair<double, LatticeState>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> q;
  q.push({0.0, pb.start});
  while (!q.empty()) {
    const auto [d, s] = q.top();
    q.pop();
    if (d > dist[s]) continue;
    if (s == pb.goal) return d;
    for (int id : set.applicable(s.heading_idx, s.steering_idx)) {
      const MotionPrimitive& p = set.primitives()[static_cast<std::size_t>(id)];
      const LatticeState n{s.ix + p.end.ix, s.iy + p.end.iy, p.end.heading_idx, p.end.steering_idx};
      if (!sweep_clear(planner.swept(id), s.ix * r, s.iy * r, pb, set.params())) continue;
      const auto it = dist.find(n);
      if (it == dist.end() || d + p.cost < it->second) {
        dist[n] = d + p.cost;
        q.push({d + p.cost, n});
      }
    }
  }
  return -1.0;
}

}  // namespace mpgen::testing
