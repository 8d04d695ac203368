#include <cmath>
#include <limits>

#include "doctest.h"
#include "mpgen/angles.hpp"
#include "mpgen/primgen.hpp"

using namespace mpgen;

namespace {

const VehicleParams kCar = VehicleParams::car_like(2.5);

LatticeSpec desk8() { return LatticeSpec::make(1.0, default_heading_set(8), {0.0}, VehicleKind::CarLike); }
LatticeSpec car16() { return LatticeSpec::make(1.0, default_heading_set(16), {0.0}, VehicleKind::CarLike); }

std::vector<ManeuverSpec> small_maneuvers() {
  ManeuverSpec s;
  ManeuverSpec h;
  h.type = ManeuverType::HeadingChange;
  h.delta_theta = 2;
  ManeuverSpec p;
  p.type = ManeuverType::Parallel;
  p.c_lat = 1.0;
  return {s, h, p};
}

}  // namespace

TEST_CASE("rounding keeps the cheapest of the brute-force candidate solves") {
  ManeuverSpec h;
  h.type = ManeuverType::HeadingChange;
  h.delta_theta = 3;
  const LatticeSpec l = car16();
  const SolverOptions o;
  const auto ocps = interpret({h}, l, kCar, {});
  for (std::size_t i = 0; i < ocps.size(); i += 3) {
    const OcpSpec& spec = ocps[i];
    CAPTURE(spec.tag);
    const SolveResult cont = solve_maneuver_ocp(spec, o);
    REQUIRE(cont.converged());
    const ConnectivityResult c = ensure_connectivity(cont, spec, l, o);
    REQUIRE(c.primitive.has_value());
    REQUIRE(c.solves.size() == c.candidates.size());

    // Cold, independent fixed-endpoint solves of every candidate.
    int arg = -1;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < c.candidates.size(); ++j) {
      const VehicleState target = embed(c.candidates[j].state, l, kCar);
      const SolveResult r = solve_bvp(spec.initial_state, target, spec.direction, spec.objective, kCar, o);
      if (r.converged() && r.trajectory.cost < best - 1e-9) {
        best = r.trajectory.cost;
        arg = static_cast<int>(j);
      }
    }
    CHECK(c.chosen == arg);
    CHECK(c.primitive->cost == doctest::Approx(best).epsilon(1e-6));
    CHECK(c.primitive->cost >= cont.trajectory.cost - 1e-6);
    CHECK(state_distance_inf(c.primitive->trajectory.knots.back(), embed(c.primitive->end, l, kCar)) < 1e-6);
  }
}

TEST_CASE("snapped specs fix the position and keep the unwrapped heading") {
  ManeuverSpec h;
  h.type = ManeuverType::HeadingChange;
  h.delta_theta = 1;
  const LatticeSpec l = car16();
  const OcpSpec spec = interpret({h}, l, kCar, {}).front();
  const OcpSpec fixed = snapped_spec(spec, {4, 2, spec.manifold.end_heading_idx, 0}, l);
  CHECK(fixed.manifold.position_fixed());
  CHECK(*fixed.manifold.fixed_value(idx::kX) == 4.0);
  CHECK(*fixed.manifold.fixed_value(idx::kHeading) == *spec.manifold.fixed_value(idx::kHeading));
  CHECK(fixed.manifold.codimension() == 5);
}

TEST_CASE("rotated primitives re-integrate onto their rotated end states") {
  const LatticeSpec l = car16();
  ManeuverSpec h;
  h.type = ManeuverType::HeadingChange;
  h.delta_theta = 2;
  const OcpSpec spec = interpret({h}, l, kCar, {})[2];
  const SolverOptions o;
  const SolveResult cont = solve_maneuver_ocp(spec, o);
  REQUIRE(cont.converged());
  const auto c = ensure_connectivity(cont, spec, l, o);
  REQUIRE(c.primitive);
  const auto rotated = exploit_symmetries(*c.primitive, l);
  REQUIRE(rotated.size() == 4);
  for (int k = 0; k < 4; ++k) {
    const MotionPrimitive& p = rotated[static_cast<std::size_t>(k)];
    CHECK(p.start == rotate_quarter_turns(c.primitive->start, k, l));
    CHECK(p.end == rotate_quarter_turns(c.primitive->end, k, l));
    CHECK(p.cost == c.primitive->cost);
    const auto sim = reintegrate(p.trajectory, kCar);
    CHECK(state_distance_inf(sim.back(), embed(p.end, l, kCar)) < 1e-8);
    CHECK(state_distance_inf(sim.front(), embed(p.start, l, kCar)) == 0.0);
  }
  CHECK(rotated[3].maneuver_tag == c.primitive->maneuver_tag + "/rot3");
}

TEST_CASE("pipeline on a small car lattice") {
  const LatticeSpec l = desk8();
  auto [set, report] = generate(small_maneuvers(), l, kCar, {});
  CHECK(report.n_infeasible == 0);
  // 1 m is a whole grid line only on the axis headings: 2 parallel OCPs.
  CHECK(report.n_ocp == 2 + 4 + 2);
  CHECK(report.n_prim == static_cast<int>(set.size()));
  CHECK(report.per_maneuver.size() == 3);
  CHECK(set.size() == 4 * 8);
  for (const auto& p : set.primitives()) {
    CHECK(p.start.ix == 0);
    CHECK(p.start.iy == 0);
    CHECK(p.cost == doctest::Approx(evaluate_objective(p.trajectory, set.weights())));
    CHECK(state_distance_inf(p.trajectory.knots.back(), embed(p.end, l, kCar)) < 1e-6);
    CHECK(max_defect(p.trajectory, kCar, 64) <= 1e-8);
  }
  int total = 0;
  for (int h = 0; h < 8; ++h) total += static_cast<int>(set.applicable(h, 0).size());
  CHECK(total == static_cast<int>(set.size()));

  SUBCASE("deterministic, also with several workers") {
    GenerationConfig cfg;
    cfg.workers = 3;
    CHECK(generate(small_maneuvers(), l, kCar, {}, cfg).first == set);
  }
  SUBCASE("reusing the set's own connectivity reproduces its end states") {
    auto [again, rep] = reuse_connectivity(set, l, kCar, {});
    CHECK(rep.n_infeasible == 0);
    CHECK(again.size() == set.size());
    for (std::size_t i = 0; i < set.size(); ++i) CHECK(again.primitives()[i].end == set.primitives()[i].end);
  }
}

TEST_CASE("baseline with radius 0 only tries the origin") {
  const LatticeSpec l = desk8();
  auto [set, report] = baseline_exhaustive(l, kCar, {}, 0);
  // 2 orbit representatives x 2 speeds x 8 end headings.
  CHECK(report.n_ocp == 2 * 2 * 8);
  CHECK_FALSE(report.partial);
  // The identity attempts are degenerate; the others can only succeed as loops.
  CHECK(report.n_infeasible >= 2 * 2);
  CHECK(report.n_ocp - report.n_infeasible <= static_cast<int>(set.size()));
  for (const auto& p : set.primitives()) {
    CHECK(p.end.ix == 0);
    CHECK(p.end.iy == 0);
    CHECK(p.end.heading_idx != p.start.heading_idx);
    CHECK(state_distance_inf(reintegrate(p.trajectory, kCar).back(), embed(p.end, l, kCar)) < 1e-6);
    // A loop through the origin is at least one minimum-radius circle long.
    CHECK(p.trajectory.duration > kCar.L1 / std::tan(kCar.alpha_max));
  }
  CHECK_THROWS_AS(baseline_exhaustive(l, kCar, {}, -1), ConfigError);
}

TEST_CASE("baseline with radius 1 finds the unit straights") {
  const LatticeSpec l = desk8();
  GenerationConfig cfg;
  auto [set, report] = baseline_exhaustive(l, kCar, {}, 1, cfg);
  CHECK(report.n_ocp == 2 * 2 * 9 * 8);
  bool straight = false;
  for (const auto& p : set.primitives()) {
    if (p.start == LatticeState{0, 0, 0, 0} && p.end == LatticeState{1, 0, 0, 0} && p.trajectory.speed > 0.0) {
      straight = true;
      CHECK(p.trajectory.cost == doctest::Approx(1.0).epsilon(1e-4));
    }
  }
  CHECK(straight);
  CHECK(report.n_infeasible + report.n_ocp - report.n_failed_solves == report.n_ocp);
}

TEST_CASE("generation errors") {
  CHECK_THROWS_AS(generate({}, desk8(), kCar, {}), GenerationError);
  GenerationConfig cfg;
  cfg.workers = 0;
  CHECK_THROWS_AS(generate(small_maneuvers(), desk8(), kCar, {}, cfg), ConfigError);
  CHECK_THROWS_AS(reuse_connectivity(PrimitiveSet(desk8(), kCar, {}, {}), car16(), kCar, {}), ConfigError);

  MotionPrimitive off;
  off.start = {1, 0, 0, 0};
  off.end = {2, 0, 0, 0};
  CHECK_THROWS_AS(PrimitiveSet(desk8(), kCar, {}, {off}), ContractViolation);
  CHECK_THROWS_AS(PrimitiveSet(desk8(), kCar, {}, {}).applicable(8, 0), ContractViolation);
}
