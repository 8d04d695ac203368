// Acceptance checks, one line per criterion. Usage: acceptance [criterion numbers...]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "mpgen/angles.hpp"
#include "mpgen/io.hpp"
#include "mpgen/planner.hpp"
#include "mpgen/primgen.hpp"
#include "support.hpp"

using namespace mpgen;
namespace fs = std::filesystem;

namespace {

const fs::path kData = MPGEN_DATA_DIR;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int digits = 4) {
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

// ---------------------------------------------------------------------------
// Shared fixtures, built on first use.

io::ManeuverFile with_both_directions(io::ManeuverFile mf) {
  std::vector<ManeuverSpec> out;
  for (const auto& m : mf.maneuvers) {
    for (Direction d : {Direction::Forward, Direction::Backward}) {
      ManeuverSpec c = m;
      c.direction = d;
      out.push_back(c);
    }
  }
  std::set<std::string> seen;
  mf.maneuvers.clear();
  for (const auto& m : out) {
    if (seen.insert(m.tag()).second) mf.maneuvers.push_back(m);
  }
  return mf;
}

struct DeskFixture {
  LatticeSpec lattice;
  VehicleParams params;
  io::ManeuverFile maneuvers;
  PrimitiveSet set;
  GenerationReport report;
};

const DeskFixture& desk() {
  static const DeskFixture f = [] {
    DeskFixture d;
    d.params = io::load_params(kData / "params/car.json");
    d.lattice = io::load_lattice(kData / "lattice/desk8.json", d.params);
    d.maneuvers = with_both_directions(io::load_maneuvers(kData / "maneuvers/desk.json"));
    auto [set, rep] = generate(d.maneuvers.maneuvers, d.lattice, d.params, d.maneuvers.weights);
    d.set = std::move(set);
    d.report = std::move(rep);
    return d;
  }();
  return f;
}

struct InstanceSet {
  std::string name;
  VehicleParams params;
  LatticeSpec lattice;
  PrimitiveSet set;
};

InstanceSet build_instance(const std::string& name, const std::string& params_file, const std::string& lattice_file,
                           const std::string& maneuver_file) {
  InstanceSet s;
  s.name = name;
  s.params = io::load_params(kData / "params" / params_file);
  s.lattice = io::load_lattice(kData / "lattice" / lattice_file, s.params);
  const io::ManeuverFile mf = io::load_maneuvers(kData / "maneuvers" / maneuver_file);
  InterpretOptions iopt;
  iopt.parallel_form = mf.parallel_form;
  GenerationConfig cfg;
  cfg.interpret = iopt;
  s.set = generate(mf.maneuvers, s.lattice, s.params, mf.weights, cfg).first;
  return s;
}

const InstanceSet& car_p1() {
  static const InstanceSet s = build_instance("car L1=2.5", "car.json", "p1.json", "p1.json");
  return s;
}

const InstanceSet& truck_p1() {
  static const InstanceSet s = build_instance("truck L1=4.66", "truck.json", "p1.json", "p1.json");
  return s;
}

// ---------------------------------------------------------------------------
// 1. Dynamics fidelity

double observed_order(const VehicleState& x0, const ControlInput& u, double duration, const VehicleParams& p) {
  double worst = std::numeric_limits<double>::infinity();
  for (int n : {8, 16, 32}) {
    const VehicleState a = integrate(x0, u, duration, n, p);
    const VehicleState b = integrate(x0, u, duration, 2 * n, p);
    const VehicleState c = integrate(x0, u, duration, 4 * n, p);
    worst = std::min(worst, std::log2(state_distance_inf(a, b) / state_distance_inf(b, c)));
  }
  return worst;
}

Outcome criterion_dynamics() {
  const VehicleParams car = VehicleParams::car_like(4.66);
  const VehicleParams tt = VehicleParams::two_trailer(4.66, 3.75, 8.0, 1.67);
  const double p_car = observed_order(VehicleState::car_like(0, 0, 0.1, -0.3, 0.2), {1.0, 0.4}, 2.0, car);
  const double p_tt_f = observed_order(VehicleState::two_trailer(0, 0, 0.2, 0.1, -0.15, 0.2, -0.1), {1.0, 0.3}, 2.0, tt);
  const double p_tt_b = observed_order(VehicleState::two_trailer(0, 0, 0.2, 0.1, -0.15, 0.2, -0.1), {-1.0, 0.3}, 2.0, tt);
  double residual = 0.0, drift = 0.0;
  for (double a : {-0.3, -0.2313, -0.1, 0.1, 0.2313, 0.3}) {
    const JointAngles eq = equilibrium_configuration(a, tt);
    const VehicleState x = VehicleState::two_trailer(0, 0, 0, eq.beta3, eq.beta2, a, 0.0);
    for (double v : {1.0, -1.0}) {
      const StateVector d = dynamics(x, {v, 0.0}, tt);
      residual = std::max({residual, std::abs(d[idx::kBeta3]), std::abs(d[idx::kBeta2])});
      VehicleState s = x;
      for (int i = 0; i < 100; ++i) {
        s = integrate(s, {v, 0.0}, 0.1, 10, tt);
        drift = std::max({drift, std::abs(s.beta3() - eq.beta3), std::abs(s.beta2() - eq.beta2)});
      }
    }
  }
  const double order = std::min({p_car, p_tt_f, p_tt_b});
  return {order >= 3.8 && residual < 1e-10 && drift < 1e-8,
          "min order " + fmt(order) + ", equilibrium residual " + fmt(residual, 2) + ", 10 s drift " + fmt(drift, 2)};
}

// ---------------------------------------------------------------------------
// 2. OCP correctness

/// Largest bound violation between knots: alpha is quadratic and omega linear
/// in time on every interval; joint angles are sampled with RK4.
double path_violation(const Trajectory& t, const VehicleParams& p, double joint_limit) {
  double worst = 0.0;
  const double h = t.interval_length();
  for (int k = 0; k < t.intervals(); ++k) {
    const VehicleState& x = t.knots[static_cast<std::size_t>(k)];
    const double a = x.alpha(), w = x.omega(), u = t.controls[static_cast<std::size_t>(k)];
    std::vector<double> times{0.0, h};
    if (u != 0.0 && -w / u > 0.0 && -w / u < h) times.push_back(-w / u);
    for (double s : times) worst = std::max(worst, std::abs(a + w * s + 0.5 * u * s * s) - p.alpha_max);
    worst = std::max({worst, std::abs(w) - p.omega_max, std::abs(w + u * h) - p.omega_max, std::abs(u) - p.u_alpha_max});
    if (p.kind == VehicleKind::TwoTrailer) {
      VehicleState s = x;
      for (int j = 0; j < 8; ++j) {
        s = integrate(s, {t.speed, u}, h / 8, 4, p);
        worst = std::max({worst, std::abs(s.beta3()) - joint_limit, std::abs(s.beta2()) - joint_limit});
      }
    }
  }
  return worst;
}

struct OcpCheck {
  int converged = 0;
  int bad = 0;
  double boundary = 0, defect = 0, kkt = 0, path = 0;
};

void check_ocp(const OcpSpec& spec, const SolverOptions& o, OcpCheck& acc) {
  const SolveResult r = solve_maneuver_ocp(spec, o);
  if (!r.converged()) return;
  ++acc.converged;
  const Trajectory& t = r.trajectory;
  const double boundary = std::max(state_distance_inf(t.knots.front(), spec.initial_state),
                                   manifold_residual(spec.manifold, t.knots.back()).lpNorm<Eigen::Infinity>());
  const double defect = max_defect(t, spec.params, 64);
  const MultipleShootingProblem prob(testing::data_for(spec, o));
  const double kkt = testing::fd_kkt_residual(prob, r.variables, r.multipliers);
  const double path = path_violation(t, spec.params, o.joint_angle_limit);
  acc.boundary = std::max(acc.boundary, boundary);
  acc.defect = std::max(acc.defect, defect);
  acc.kkt = std::max(acc.kkt, std::isnan(kkt) ? 1e9 : kkt);
  acc.path = std::max(acc.path, path);
  if (boundary > 1e-6 || defect > 1e-8 || !(kkt <= 1e-5) || path > 1e-9) ++acc.bad;
}

Outcome criterion_ocp() {
  const SolverOptions o;
  OcpCheck acc;
  int total = 0;
  const io::ManeuverFile mf = io::load_maneuvers(kData / "maneuvers/p1.json");
  // Truck on the diagonal-ish heading representative, car on the axis one.
  for (const auto& [pf, rep] : {std::pair{"truck.json", 1}, std::pair{"car.json", 0}}) {
    const VehicleParams p = io::load_params(kData / "params" / pf);
    const LatticeSpec l = io::load_lattice(kData / "lattice/p1.json", p);
    for (const OcpSpec& spec : interpret(mf.maneuvers, l, p, mf.weights)) {
      if (spec.start.heading_idx != rep) continue;
      ++total;
      check_ocp(spec, o, acc);
    }
  }
  {
    const VehicleParams p = io::load_params(kData / "params/two_trailer_l3_6.json");
    const LatticeSpec l = io::load_lattice(kData / "lattice/planar16.json", p);
    std::vector<ManeuverSpec> some(mf.maneuvers.begin(), mf.maneuvers.begin() + 3);
    for (const OcpSpec& spec : interpret(some, l, p, mf.weights)) {
      if (spec.start.heading_idx != 0) continue;
      ++total;
      check_ocp(spec, o, acc);
    }
  }

  // Dubins check: lambda = 0 with steering rate and acceleration effectively free.
  VehicleParams relaxed = VehicleParams::car_like(4.66);
  relaxed.omega_max = 50.0;
  relaxed.u_alpha_max = 1e4;
  const LatticeSpec l16 = LatticeSpec::make(1.0, default_heading_set(16), {0.0}, VehicleKind::CarLike);
  ManeuverSpec quarter;
  quarter.type = ManeuverType::HeadingChange;
  quarter.delta_theta = 4;
  quarter.both_signs = false;
  ObjectiveWeights w0;
  w0.lambda = 0.0;
  SolverOptions fine;
  fine.intervals = 120;
  fine.substeps = 8;
  const OcpSpec dubins = interpret({quarter}, l16, relaxed, w0).front();
  const SolveResult r = solve_maneuver_ocp(dubins, fine);
  const double bound = kPi / 2 * relaxed.L1 / std::tan(relaxed.alpha_max);
  const double T = r.converged() ? r.trajectory.duration : std::numeric_limits<double>::quiet_NaN();
  const double dubins_defect = r.converged() ? max_defect(r.trajectory, relaxed, 64) : 0.0;
  const bool dubins_ok = r.converged() && std::abs(T - bound) <= 0.02 * bound;

  return {acc.bad == 0 && acc.converged > 0 && dubins_ok,
          std::to_string(acc.converged) + "/" + std::to_string(total) + " converged, " + std::to_string(acc.bad) +
              " violating; max boundary " + fmt(acc.boundary, 2) + ", defect " + fmt(acc.defect, 2) + ", FD KKT " +
              fmt(acc.kkt, 2) + ", path " + fmt(acc.path, 2) + "; Dubins T " + fmt(T, 6) + " vs " + fmt(bound, 6) + " (defect " + fmt(dubins_defect, 2) + ")"};
}

// ---------------------------------------------------------------------------
// 3. Rounding heuristic

Outcome criterion_rounding() {
  std::mt19937_64 rng(20180801);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const SolverOptions o;
  int checked = 0, agree = 0, draws = 0;
  std::string first_miss;
  while (checked < 50 && draws < 200) {
    ++draws;
    const VehicleParams p = VehicleParams::car_like(2.0 + 3.0 * uni(rng));
    const LatticeSpec l = LatticeSpec::make(uni(rng) < 0.5 ? 1.0 : 0.5, default_heading_set(16), {0.0},
                                            VehicleKind::CarLike);
    ManeuverSpec m;
    if (uni(rng) < 0.7) {
      m.type = ManeuverType::HeadingChange;
      m.delta_theta = 1 + static_cast<int>(4 * uni(rng));
    } else {
      m.type = ManeuverType::Parallel;
      m.lateral_steps = 1 + static_cast<int>(2 * uni(rng));
    }
    m.direction = uni(rng) < 0.5 ? Direction::Forward : Direction::Backward;
    ObjectiveWeights w;
    w.lambda = std::exp(std::log(0.2) + std::log(25.0) * uni(rng));
    const auto ocps = interpret({m}, l, p, w);
    const OcpSpec& spec = ocps[static_cast<std::size_t>(uni(rng) * static_cast<double>(ocps.size()))];
    const SolveResult cont = solve_maneuver_ocp(spec, o);
    if (!cont.converged()) continue;
    const ConnectivityResult c = ensure_connectivity(cont, spec, l, o);

    // Brute force: cold re-solve of every candidate, cheapest converged wins.
    int arg = -1;
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> costs;
    for (const auto& cand : c.candidates) {
      const SolveResult r = solve_maneuver_ocp(snapped_spec(spec, cand.state, l), o);
      costs.push_back(r.converged() ? r.trajectory.cost : std::numeric_limits<double>::infinity());
      if (r.converged() && r.trajectory.cost < best - 1e-9) {
        best = r.trajectory.cost;
        arg = static_cast<int>(costs.size()) - 1;
      }
    }
    ++checked;
    if (c.chosen == arg) {
      ++agree;
    } else if (first_miss.empty()) {
      std::ostringstream os;
      os << spec.tag << " L1=" << fmt(p.L1) << " lambda=" << fmt(w.lambda) << ": chose " << c.chosen << ", oracle "
         << arg << " (costs";
      for (double v : costs) os << " " << fmt(v, 8);
      os << ")";
      first_miss = os.str();
    }
  }
  return {checked == 50 && agree == checked,
          std::to_string(agree) + "/" + std::to_string(checked) + " agree" +
              (first_miss.empty() ? "" : "; first mismatch " + first_miss)};
}

// ---------------------------------------------------------------------------
// 4. Symmetry soundness

Outcome criterion_symmetry() {
  int rotated = 0, bad = 0;
  double worst = 0.0;
  auto check = [&](const PrimitiveSet& set) {
    for (const auto& p : set.primitives()) {
      if (p.maneuver_tag.find("/rot") == std::string::npos) continue;
      ++rotated;
      const auto sim = reintegrate(p.trajectory, set.params());
      const double e = state_distance_inf(sim.back(), embed(p.end, set.lattice(), set.params()));
      worst = std::max(worst, e);
      if (!(e <= 1e-8)) ++bad;
    }
  };
  check(desk().set);
  check(car_p1().set);
  check(truck_p1().set);
  return {rotated > 0 && bad == 0,
          std::to_string(rotated - bad) + "/" + std::to_string(rotated) + " rotated primitives within 1e-8 (max " +
              fmt(worst, 2) + ")"};
}

// ---------------------------------------------------------------------------
// 5. Pipeline vs exhaustive baseline

Outcome criterion_baseline() {
  const DeskFixture& d = desk();
  const double pipeline_time = d.report.wall_time;
  GenerationConfig cfg;
  cfg.time_budget = 25 * 60.0;
  const auto [bset, brep] = baseline_exhaustive(d.lattice, d.params, d.maneuvers.weights, 4, cfg);
  const bool ok = !brep.partial && d.report.n_infeasible < 0.1 * brep.n_infeasible && pipeline_time < brep.wall_time;

  // Endpoint-matched costs between the two sets.
  using Key = std::tuple<LatticeState, LatticeState, bool>;
  std::map<Key, double> pipeline_cost;
  for (const auto& p : d.set.primitives()) pipeline_cost[{p.start, p.end, p.trajectory.speed > 0.0}] = p.trajectory.cost;
  int shared = 0;
  double gap = 0.0;
  for (const auto& p : bset.primitives()) {
    const auto it = pipeline_cost.find({p.start, p.end, p.trajectory.speed > 0.0});
    if (it == pipeline_cost.end()) continue;
    ++shared;
    gap = std::max(gap, std::abs(it->second - p.trajectory.cost));
  }
  return {ok, "pipeline N_inf " + std::to_string(d.report.n_infeasible) + " in " + fmt(pipeline_time) + " s (" +
                  std::to_string(d.set.size()) + " primitives); baseline N_inf " + std::to_string(brep.n_infeasible) +
                  " of " + std::to_string(brep.n_ocp) + " in " + fmt(brep.wall_time) + " s (" +
                  std::to_string(bset.size()) + " primitives" + (brep.partial ? ", partial" : "") + "); " + std::to_string(shared) +
                  " shared endpoints, max cost gap " + fmt(gap, 2)};
}

// ---------------------------------------------------------------------------
// 6. Planner optimality

Outcome criterion_planner() {
  const DeskFixture& d = desk();
  const Planner planner(d.set);
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  int solved = 0, unsolved = 0, cost_mismatch = 0, status_mismatch = 0, reint_bad = 0, junction_bad = 0;
  double worst_end = 0.0;
  for (int world = 0; world < 50; ++world) {
    PlanningProblem pb;
    pb.world_bounds = {-15, -15, 15, 15};
    pb.footprint = default_footprint(d.params);
    const int n_obs = 2 + static_cast<int>(3 * uni(rng));
    for (int b = 0; b < n_obs; ++b) {
      const double x = -8 + 14 * uni(rng), y = -8 + 14 * uni(rng);
      pb.obstacles.push_back({x, y, x + 0.5 + 1.5 * uni(rng), y + 0.5 + 1.5 * uni(rng)});
    }
    pb.start = {-10 + static_cast<int>(4 * uni(rng)), -10 + static_cast<int>(4 * uni(rng)),
                static_cast<int>(8 * uni(rng)), 0};
    // Quarter turns keep heading parity, so the goal heading shares the start's.
    pb.goal = {6 + static_cast<int>(4 * uni(rng)), 6 + static_cast<int>(4 * uni(rng)),
               (pb.start.heading_idx + 2 * static_cast<int>(4 * uni(rng))) % 8, 0};
    const Plan plan = planner.plan(pb);
    const double oracle = testing::dijkstra(planner, pb);
    if (plan.solved() != (oracle >= 0.0)) {
      ++status_mismatch;
      continue;
    }
    if (!plan.solved()) {
      ++unsolved;
      continue;
    }
    ++solved;
    if (plan.total_cost != oracle && std::abs(plan.total_cost - oracle) > 1e-9 * (1.0 + oracle)) ++cost_mismatch;
    const VehicleState end = simulate_plan(plan, d.set, embed(pb.start, d.lattice, d.params));
    const double e = state_distance_inf(end, embed(pb.goal, d.lattice, d.params));
    worst_end = std::max(worst_end, e);
    if (!(e <= 1e-6)) ++reint_bad;
    for (std::size_t i = 0; i + 1 < plan.steps.size(); ++i) {
      const auto& a = d.set.primitives()[static_cast<std::size_t>(plan.steps[i].primitive_id)].trajectory.knots.back();
      const auto& b = d.set.primitives()[static_cast<std::size_t>(plan.steps[i + 1].primitive_id)].trajectory.knots.front();
      if (std::abs(a.alpha() - b.alpha()) > 1e-6 || std::abs(a.omega()) > 1e-6 || std::abs(b.omega()) > 1e-6) {
        ++junction_bad;
      }
    }
  }
  const bool ok = status_mismatch == 0 && cost_mismatch == 0 && reint_bad == 0 && junction_bad == 0 && solved >= 25;
  return {ok, std::to_string(solved) + " solved, " + std::to_string(unsolved) + " infeasible worlds; " +
                  std::to_string(cost_mismatch + status_mismatch) + " disagreements with Dijkstra; max re-integration error " +
                  fmt(worst_end, 2) + "; " + std::to_string(junction_bad) + " bad junctions"};
}

// ---------------------------------------------------------------------------
// 7. Connectivity reuse

struct ScenarioCost {
  double mean = 0.0;
  std::vector<double> costs;
  bool all_solved = true;
};

ScenarioCost plan_scenario(const PrimitiveSet& set, const io::Scenario& sc) {
  const Planner planner(set);
  ScenarioCost out;
  for (const auto& s : sc.starts) {
    PlanningProblem pb = sc.world;
    pb.start = s;
    pb.goal = sc.goal;
    const Plan p = planner.plan(pb);
    out.all_solved = out.all_solved && p.solved();
    out.costs.push_back(p.solved() ? p.total_cost : std::numeric_limits<double>::infinity());
    out.mean += out.costs.back() / static_cast<double>(sc.starts.size());
  }
  return out;
}

Outcome criterion_reuse() {
  const InstanceSet& small = car_p1();
  const InstanceSet& large = truck_p1();
  const fs::path scenario = kData / "scenarios/demo_depot.json";

  // Larger-instance connectivity on the smaller vehicle.
  const auto [down, down_rep] = reuse_connectivity(large.set, small.lattice, small.params, small.set.weights());
  const io::Scenario sc = io::load_scenario(scenario, small.lattice, small.params);
  const ScenarioCost native = plan_scenario(small.set, sc);
  const ScenarioCost reused = plan_scenario(down, sc);
  bool strict = false;
  for (std::size_t i = 0; i < native.costs.size(); ++i) strict |= native.costs[i] < reused.costs[i];
  const bool trend = down_rep.n_infeasible == 0 && native.all_solved && reused.all_solved &&
                     native.mean <= reused.mean && strict;

  // Smaller-instance connectivity on the larger vehicle.
  const auto [up, up_rep] = reuse_connectivity(small.set, large.lattice, large.params, large.set.weights());
  const bool dash = up_rep.n_infeasible > 0;

  std::ostringstream os;
  os << small.name << ": native mean " << fmt(native.mean, 5) << ", with " << large.name << " connectivity "
     << fmt(reused.mean, 5) << " (ratio " << fmt(reused.mean / native.mean, 3) << ", "
     << (strict ? "strictly better native on some start" : "native never strictly better") << ", "
     << down_rep.n_infeasible << " dropped); " << large.name << " with " << small.name << " connectivity: "
     << up_rep.n_infeasible << " infeasible" << (dash ? " (-)" : "");
  return {trend && dash, os.str()};
}

// ---------------------------------------------------------------------------
// 8. Lambda trade-off

Outcome criterion_lambda() {
  const VehicleParams p = io::load_params(kData / "params/truck.json");
  const LatticeSpec l = LatticeSpec::make(1.0, default_heading_set(16), {0.0}, VehicleKind::CarLike);
  ManeuverSpec quarter;
  quarter.type = ManeuverType::HeadingChange;
  quarter.delta_theta = 4;
  quarter.both_signs = false;
  std::vector<Trajectory> paths;
  std::vector<double> integrals;
  std::string detail;
  for (double lambda : {0.1, 1.0, 10.0}) {
    ObjectiveWeights w;
    w.lambda = lambda;
    const SolveResult r = solve_maneuver_ocp(interpret({quarter}, l, p, w).front(), SolverOptions{});
    if (!r.converged()) return {false, "lambda " + fmt(lambda) + " did not converge"};
    paths.push_back(r.trajectory);
    integrals.push_back(smoothness_integral(r.trajectory, w));
    detail += "lambda " + fmt(lambda) + ": T " + fmt(r.trajectory.duration) + ", int J " + fmt(integrals.back()) + "; ";
  }
  bool monotone = true;
  for (std::size_t i = 1; i < integrals.size(); ++i) monotone &= integrals[i] <= integrals[i - 1] + 1e-9;
  double min_dev = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < paths.size(); ++a) {
    for (std::size_t b = a + 1; b < paths.size(); ++b) {
      double dev = 0.0;
      for (std::size_t k = 0; k < paths[a].knots.size(); ++k) {
        dev = std::max(dev, std::hypot(paths[a].knots[k].x() - paths[b].knots[k].x(),
                                       paths[a].knots[k].y() - paths[b].knots[k].y()));
      }
      min_dev = std::min(min_dev, dev);
    }
  }
  return {monotone && min_dev > 0.05, detail + "smallest pairwise deviation " + fmt(min_dev) + " m"};
}

// ---------------------------------------------------------------------------
// 9. Determinism and round-trip

Outcome criterion_determinism() {
  const DeskFixture& d = desk();
  GenerationConfig two;
  two.workers = 2;
  const auto again = generate(d.maneuvers.maneuvers, d.lattice, d.params, d.maneuvers.weights).first;
  const auto threaded = generate(d.maneuvers.maneuvers, d.lattice, d.params, d.maneuvers.weights, two).first;
  const std::string a = io::dump(io::to_json(d.set));
  const bool same = a == io::dump(io::to_json(again)) && a == io::dump(io::to_json(threaded));

  const fs::path dir = fs::temp_directory_path() / "mpgen_acceptance";
  fs::create_directories(dir);
  io::write_json(dir / "set.json", io::to_json(d.set));
  const PrimitiveSet back = io::load_primitive_set(dir / "set.json");
  const bool round = io::dump(io::to_json(back)) == a && back == d.set;
  io::write_json(dir / "report.json", io::to_json(d.report));
  const bool report_round = io::dump(io::read_json(dir / "report.json")) == io::dump(io::to_json(d.report));
  return {same && round && report_round, std::string("repeat runs ") + (same ? "identical" : "differ") +
                                              ", set round-trip " + (round ? "identical" : "differs") +
                                              ", report round-trip " + (report_round ? "identical" : "differs")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"dynamics fidelity", criterion_dynamics},
      {"OCP correctness", criterion_ocp},
      {"rounding heuristic", criterion_rounding},
      {"symmetry soundness", criterion_symmetry},
      {"pipeline vs exhaustive baseline", criterion_baseline},
      {"planner optimality", criterion_planner},
      {"connectivity reuse trend", criterion_reuse},
      {"lambda trade-off", criterion_lambda},
      {"determinism and round-trip", criterion_determinism},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::stoi(argv[i]));
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int n = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.contains(n)) continue;
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::printf("criterion %d %-32s %s  [%.1f s] %s\n", n, criteria[i].first.c_str(), o.pass ? "PASS" : "FAIL",
                seconds_since(t0), o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
