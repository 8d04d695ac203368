#include "mpgen/primgen.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <tuple>

#include "mpgen/angles.hpp"
#include "mpgen/errors.hpp"
#include "parallel.hpp"

namespace mpgen {

bool MotionPrimitive::operator==(const MotionPrimitive& o) const {
  if (start != o.start || end != o.end || cost != o.cost || maneuver_tag != o.maneuver_tag) return false;
  const Trajectory& a = trajectory;
  const Trajectory& b = o.trajectory;
  if (a.duration != b.duration || a.controls != b.controls || a.speed != b.speed || a.direction != b.direction ||
      a.cost != b.cost || a.substeps != b.substeps || a.knots.size() != b.knots.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.knots.size(); ++i) {
    if (a.knots[i].kind != b.knots[i].kind || a.knots[i].values != b.knots[i].values) return false;
  }
  return true;
}

PrimitiveSet::PrimitiveSet(LatticeSpec lattice, VehicleParams params, ObjectiveWeights weights,
                           std::vector<MotionPrimitive> primitives)
    : lattice_(std::move(lattice)),
      params_(std::move(params)),
      weights_(weights),
      primitives_(std::move(primitives)) {
  if (params_.kind != lattice_.kind()) throw ContractViolation("primitive set mixes vehicle kinds");
  build_index();
}

void PrimitiveSet::build_index() {
  const int nh = lattice_.num_headings();
  const int ns = lattice_.num_steering();
  index_.assign(static_cast<std::size_t>(nh * ns), {});
  for (std::size_t i = 0; i < primitives_.size(); ++i) {
    const LatticeState& s = primitives_[i].start;
    if (s.ix != 0 || s.iy != 0) throw ContractViolation("primitive does not start at the origin");
    if (s.heading_idx < 0 || s.heading_idx >= nh || s.steering_idx < 0 || s.steering_idx >= ns) {
      throw ContractViolation("primitive start is not a lattice heading/steering");
    }
    const LatticeState& e = primitives_[i].end;
    if (e.heading_idx < 0 || e.heading_idx >= nh || e.steering_idx < 0 || e.steering_idx >= ns) {
      throw ContractViolation("primitive end is not a lattice heading/steering");
    }
    index_[static_cast<std::size_t>(s.heading_idx * ns + s.steering_idx)].push_back(static_cast<int>(i));
  }
}

const std::vector<int>& PrimitiveSet::applicable(int heading_idx, int steering_idx) const {
  const int ns = lattice_.num_steering();
  if (heading_idx < 0 || heading_idx >= lattice_.num_headings() || steering_idx < 0 || steering_idx >= ns) {
    throw ContractViolation("heading/steering index outside the lattice");
  }
  return index_[static_cast<std::size_t>(heading_idx * ns + steering_idx)];
}

bool PrimitiveSet::operator==(const PrimitiveSet& o) const {
  return lattice_ == o.lattice_ && params_ == o.params_ && weights_ == o.weights_ && primitives_ == o.primitives_;
}

void GenerationConfig::validate() const {
  solver.validate();
  if (workers < 1) throw ConfigError("worker count must be positive");
  if (!(time_budget >= 0.0)) throw ConfigError("time budget must be non-negative");
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

MotionPrimitive make_primitive(const OcpSpec& spec, const LatticeState& end, const SolveResult& r) {
  MotionPrimitive p;
  p.start = spec.start;
  p.end = end;
  p.trajectory = r.trajectory;
  p.cost = r.trajectory.cost;
  p.maneuver_tag = spec.tag;
  return p;
}

/// Keeps the cheapest primitive per (start, end, direction); ties keep the first.
std::vector<MotionPrimitive> deduplicate(std::vector<MotionPrimitive> prims) {
  std::map<std::tuple<LatticeState, LatticeState, int>, std::size_t> seen;
  std::vector<MotionPrimitive> out;
  for (auto& p : prims) {
    const auto key = std::make_tuple(p.start, p.end, static_cast<int>(p.trajectory.direction));
    const auto it = seen.find(key);
    if (it == seen.end()) {
      seen.emplace(key, out.size());
      out.push_back(std::move(p));
    } else if (p.cost < out[it->second].cost - 1e-9) {
      out[it->second] = std::move(p);
    }
  }
  return out;
}

std::vector<MotionPrimitive> expand(const MotionPrimitive& p, const LatticeSpec& lattice, bool symmetric) {
  if (!symmetric) return {p};
  return exploit_symmetries(p, lattice);
}

}  // namespace

OcpSpec snapped_spec(const OcpSpec& spec, const LatticeState& target, const LatticeSpec& lattice) {
  OcpSpec out = spec;
  TerminalManifold m;
  m.end_heading_idx = target.heading_idx;
  m.end_steering_idx = target.steering_idx;
  m.fixed.push_back({idx::kX, target.ix * lattice.resolution()});
  m.fixed.push_back({idx::kY, target.iy * lattice.resolution()});
  for (const auto& f : spec.manifold.fixed) {
    if (f.component != idx::kX && f.component != idx::kY) m.fixed.push_back(f);
  }
  std::sort(m.fixed.begin(), m.fixed.end(),
            [](const FixedComponent& a, const FixedComponent& b) { return a.component < b.component; });
  m.check_cover(spec.params.state_dim());
  out.manifold = std::move(m);
  return out;
}

WarmStart snapped_warm_start(const SolveResult& continuous, const OcpSpec& spec, const LatticeState& target,
                             const LatticeSpec& lattice, const SolverOptions& options) {
  Trajectory guess = continuous.trajectory;
  const VehicleState& last = guess.knots.back();
  const double dx = target.ix * lattice.resolution() - last.x();
  const double dy = target.iy * lattice.resolution() - last.y();
  const int K = guess.intervals();
  for (int k = 0; k <= K; ++k) {
    const double s = static_cast<double>(k) / K;
    guess.knots[static_cast<std::size_t>(k)].values[idx::kX] += s * dx;
    guess.knots[static_cast<std::size_t>(k)].values[idx::kY] += s * dy;
  }
  return warm_start_from(guess, snapped_spec(spec, target, lattice), options, continuous.multipliers);
}

ConnectivityResult ensure_connectivity(const SolveResult& continuous, const OcpSpec& spec, const LatticeSpec& lattice,
                                       const SolverOptions& options) {
  if (!continuous.converged()) throw ContractViolation("rounding needs a converged continuous solution");
  ConnectivityResult out;
  out.candidates = snap_candidates(continuous.trajectory.knots.back(), lattice, spec.manifold);
  double best = 0.0;
  for (std::size_t i = 0; i < out.candidates.size(); ++i) {
    const LatticeState& target = out.candidates[i].state;
    const OcpSpec fixed = snapped_spec(spec, target, lattice);
    const WarmStart warm = snapped_warm_start(continuous, spec, target, lattice, options);
    out.solves.push_back(solve_maneuver_ocp(fixed, options, &warm));
    const SolveResult& r = out.solves.back();
    if (!r.converged()) continue;
    if (out.chosen < 0 || r.trajectory.cost < best - 1e-9) {
      out.chosen = static_cast<int>(i);
      best = r.trajectory.cost;
    }
  }
  if (out.chosen >= 0) {
    out.primitive = make_primitive(spec, out.candidates[static_cast<std::size_t>(out.chosen)].state,
                                   out.solves[static_cast<std::size_t>(out.chosen)]);
  }
  return out;
}

std::vector<MotionPrimitive> exploit_symmetries(const MotionPrimitive& prim, const LatticeSpec& lattice) {
  std::vector<MotionPrimitive> out;
  out.reserve(4);
  for (int k = 0; k < 4; ++k) {
    MotionPrimitive p = prim;
    p.start = rotate_quarter_turns(prim.start, k, lattice);
    p.end = rotate_quarter_turns(prim.end, k, lattice);
    for (auto& knot : p.trajectory.knots) knot = rotate_quarter_turns(knot, k);
    if (k > 0) p.maneuver_tag += "/rot" + std::to_string(k);
    out.push_back(std::move(p));
  }
  return out;
}

std::pair<PrimitiveSet, GenerationReport> generate(const std::vector<ManeuverSpec>& maneuvers,
                                                   const LatticeSpec& lattice, const VehicleParams& params,
                                                   const ObjectiveWeights& weights, const GenerationConfig& config) {
  if (maneuvers.empty()) throw GenerationError("maneuver list is empty");
  config.validate();
  const auto t0 = Clock::now();

  std::vector<OcpSpec> ocps;
  std::vector<int> owner;
  GenerationReport report;
  for (std::size_t m = 0; m < maneuvers.size(); ++m) {
    const std::vector<OcpSpec> part = interpret({maneuvers[m]}, lattice, params, weights, config.interpret);
    ocps.insert(ocps.end(), part.begin(), part.end());
    owner.insert(owner.end(), part.size(), static_cast<int>(m));
    report.per_maneuver.push_back({maneuvers[m].tag(), static_cast<int>(part.size()), 0, 0});
  }

  struct Outcome {
    std::optional<MotionPrimitive> primitive;
    bool ocp_failed = false;
    int solves = 0;
    int failed = 0;
  };
  std::vector<Outcome> outcomes(ocps.size());
  detail::parallel_for(static_cast<int>(ocps.size()), config.workers, [&](int i) {
    Outcome& o = outcomes[static_cast<std::size_t>(i)];
    const OcpSpec& spec = ocps[static_cast<std::size_t>(i)];
    const SolveResult cont = solve_maneuver_ocp(spec, config.solver);
    ++o.solves;
    if (!cont.converged()) {
      ++o.failed;
      o.ocp_failed = true;
      return;
    }
    ConnectivityResult c = ensure_connectivity(cont, spec, lattice, config.solver);
    o.solves += static_cast<int>(c.solves.size());
    for (const auto& s : c.solves) o.failed += s.converged() ? 0 : 1;
    o.primitive = std::move(c.primitive);
  });

  std::vector<MotionPrimitive> prims;
  for (std::size_t i = 0; i < ocps.size(); ++i) {
    const Outcome& o = outcomes[i];
    ManeuverReport& mr = report.per_maneuver[static_cast<std::size_t>(owner[i])];
    report.n_solves += o.solves;
    report.n_failed_solves += o.failed;
    if (!o.primitive) {
      ++report.n_infeasible;
      ++mr.n_infeasible;
      report.infeasible.emplace_back(ocps[i].tag, o.ocp_failed ? "ocp" : "connectivity");
      continue;
    }
    for (auto& p : expand(*o.primitive, lattice, config.interpret.exploit_symmetry)) {
      ++mr.n_prim;
      prims.push_back(std::move(p));
    }
  }
  report.n_ocp = static_cast<int>(ocps.size());
  prims = deduplicate(std::move(prims));
  if (prims.empty()) throw GenerationError("no maneuver produced a feasible primitive");
  PrimitiveSet set(lattice, params, weights, std::move(prims));
  report.n_prim = static_cast<int>(set.size());
  report.wall_time = seconds_since(t0);
  return {std::move(set), std::move(report)};
}

std::pair<PrimitiveSet, GenerationReport> baseline_exhaustive(const LatticeSpec& lattice, const VehicleParams& params,
                                                              const ObjectiveWeights& weights, int radius,
                                                              const GenerationConfig& config) {
  if (radius < 0) throw ConfigError("baseline radius must be non-negative");
  config.validate();
  const auto t0 = Clock::now();

  std::vector<LatticeState> positions;
  for (int ix = -radius; ix <= radius; ++ix) {
    for (int iy = -radius; iy <= radius; ++iy) positions.push_back({ix, iy, 0, 0});
  }
  std::stable_sort(positions.begin(), positions.end(), [](const LatticeState& a, const LatticeState& b) {
    const long da = static_cast<long>(a.ix) * a.ix + static_cast<long>(a.iy) * a.iy;
    const long db = static_cast<long>(b.ix) * b.ix + static_cast<long>(b.iy) * b.iy;
    return da < db;
  });

  struct Attempt {
    LatticeState start;
    LatticeState end;
    double speed = 1.0;
  };
  const int n_start = config.interpret.exploit_symmetry ? lattice.quarter_turn_shift() : lattice.num_headings();
  std::vector<Attempt> attempts;
  for (int h = 0; h < n_start; ++h) {
    for (int s = 0; s < lattice.num_steering(); ++s) {
      for (double v : params.speeds) {
        for (const LatticeState& pos : positions) {
          for (int eh = 0; eh < lattice.num_headings(); ++eh) {
            for (int es = 0; es < lattice.num_steering(); ++es) {
              attempts.push_back({{0, 0, h, s}, {pos.ix, pos.iy, eh, es}, v});
            }
          }
        }
      }
    }
  }

  struct Outcome {
    std::optional<MotionPrimitive> primitive;
    bool tried = false;
  };
  std::vector<Outcome> outcomes(attempts.size());
  detail::parallel_for(static_cast<int>(attempts.size()), config.workers, [&](int i) {
    if (config.time_budget > 0.0 && seconds_since(t0) > config.time_budget) return;
    const Attempt& q = attempts[static_cast<std::size_t>(i)];
    Outcome& o = outcomes[static_cast<std::size_t>(i)];
    OcpSpec spec;
    spec.initial_state = embed(q.start, lattice, params);
    spec.start = q.start;
    spec.direction = q.speed > 0.0 ? Direction::Forward : Direction::Backward;
    spec.speed = q.speed;
    spec.objective = weights;
    spec.params = params;
    spec.manifold = fixed_endpoint_manifold(embed(q.end, lattice, params), spec.initial_state);
    spec.manifold.end_heading_idx = q.end.heading_idx;
    spec.manifold.end_steering_idx = q.end.steering_idx;
    spec.tag = "baseline@h" + std::to_string(q.start.heading_idx) + ":s" + std::to_string(q.start.steering_idx) +
               "->(" + std::to_string(q.end.ix) + "," + std::to_string(q.end.iy) + ",h" +
               std::to_string(q.end.heading_idx) + ",s" + std::to_string(q.end.steering_idx) + ")" +
               (q.speed > 0.0 ? ":+" : ":-");
    o.tried = true;
    const SolveResult r = solve_maneuver_ocp(spec, config.solver);
    if (r.converged()) o.primitive = make_primitive(spec, q.end, r);
  });

  GenerationReport report;
  std::vector<MotionPrimitive> prims;
  for (const Outcome& o : outcomes) {
    if (!o.tried) {
      report.partial = true;
      continue;
    }
    ++report.n_ocp;
    ++report.n_solves;
    if (!o.primitive) {
      ++report.n_failed_solves;
      ++report.n_infeasible;
      continue;
    }
    for (auto& p : expand(*o.primitive, lattice, config.interpret.exploit_symmetry)) prims.push_back(std::move(p));
  }
  prims = deduplicate(std::move(prims));
  report.n_prim = static_cast<int>(prims.size());
  report.per_maneuver.push_back({"baseline", report.n_ocp, report.n_prim, report.n_infeasible});
  report.wall_time = seconds_since(t0);
  return {PrimitiveSet(lattice, params, weights, std::move(prims)), std::move(report)};
}

std::pair<PrimitiveSet, GenerationReport> reuse_connectivity(const PrimitiveSet& source, const LatticeSpec& lattice,
                                                             const VehicleParams& params,
                                                             const ObjectiveWeights& weights,
                                                             const GenerationConfig& config) {
  config.validate();
  if (lattice.num_headings() != source.lattice().num_headings() ||
      lattice.num_steering() != source.lattice().num_steering() || lattice.kind() != params.kind) {
    throw ConfigError("connectivity can only be reused on a lattice with the same heading and steering counts");
  }
  const auto t0 = Clock::now();
  const bool symmetric = config.interpret.exploit_symmetry;
  std::vector<const MotionPrimitive*> reps;
  for (const auto& p : source.primitives()) {
    if (!symmetric || p.start.heading_idx < lattice.quarter_turn_shift()) reps.push_back(&p);
  }

  std::vector<SolveResult> results(reps.size());
  std::vector<OcpSpec> specs(reps.size());
  detail::parallel_for(static_cast<int>(reps.size()), config.workers, [&](int i) {
    const MotionPrimitive& p = *reps[static_cast<std::size_t>(i)];
    const Trajectory& src = p.trajectory;
    double turn = 0.0;
    for (std::size_t k = 1; k < src.knots.size(); ++k) {
      turn += angle_diff(src.knots[k].heading(), src.knots[k - 1].heading());
    }
    OcpSpec& spec = specs[static_cast<std::size_t>(i)];
    spec.start = p.start;
    spec.initial_state = embed(p.start, lattice, params);
    spec.manifold = fixed_endpoint_manifold(embed(p.end, lattice, params), spec.initial_state);
    for (auto& f : spec.manifold.fixed) {
      if (f.component == idx::kHeading) f.value = spec.initial_state.heading() + turn;
    }
    spec.manifold.end_heading_idx = p.end.heading_idx;
    spec.manifold.end_steering_idx = p.end.steering_idx;
    spec.direction = src.direction;
    spec.speed = speed_for(src.direction, params);
    spec.objective = weights;
    spec.params = params;
    spec.tag = p.maneuver_tag;
    results[static_cast<std::size_t>(i)] = solve_maneuver_ocp(spec, config.solver);
  });

  GenerationReport report;
  std::vector<MotionPrimitive> prims;
  for (std::size_t i = 0; i < reps.size(); ++i) {
    ++report.n_ocp;
    ++report.n_solves;
    const SolveResult& r = results[i];
    if (!r.converged()) {
      ++report.n_failed_solves;
      ++report.n_infeasible;
      report.infeasible.emplace_back(specs[i].tag, to_string(r.status));
      continue;
    }
    for (auto& p : expand(make_primitive(specs[i], reps[i]->end, r), lattice, symmetric)) prims.push_back(std::move(p));
  }
  prims = deduplicate(std::move(prims));
  report.n_prim = static_cast<int>(prims.size());
  report.per_maneuver.push_back({"reuse", report.n_ocp, report.n_prim, report.n_infeasible});
  report.wall_time = seconds_since(t0);
  return {PrimitiveSet(lattice, params, weights, std::move(prims)), std::move(report)};
}

}  // namespace mpgen
