#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "mpgen/io.hpp"

using namespace mpgen;
namespace fs = std::filesystem;

namespace {

const fs::path kData = MPGEN_DATA_DIR;

fs::path temp_dir() {
  const fs::path d = fs::temp_directory_path() / "mpgen_test_io";
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

PrimitiveSet tiny_set() {
  const VehicleParams p = VehicleParams::car_like(2.5);
  const LatticeSpec l = LatticeSpec::make(1.0, default_heading_set(8), {0.0}, VehicleKind::CarLike);
  std::vector<ManeuverSpec> m(2);
  m[1].type = ManeuverType::HeadingChange;
  m[1].delta_theta = 2;
  return generate(m, l, p, {}).first;
}

}  // namespace

TEST_CASE("shipped data files load") {
  for (const char* name : {"truck", "car", "two_trailer_l3_8", "two_trailer_l3_6"}) {
    const VehicleParams p = io::load_params(kData / "params" / (std::string(name) + ".json"));
    CHECK_NOTHROW(p.validate());
    for (const char* lat : {"p1", "planar16", "desk8"}) {
      const LatticeSpec l = io::load_lattice(kData / "lattice" / (std::string(lat) + ".json"), p);
      CHECK(l.kind() == p.kind);
    }
  }
  const VehicleParams tt = io::load_params(kData / "params" / "two_trailer_l3_8.json");
  CHECK(tt.L3 == 8.0);
  CHECK(tt.M1 == doctest::Approx(1.67));
  const LatticeSpec p1 = io::load_lattice(kData / "lattice" / "p1.json", tt);
  CHECK(p1.num_headings() == 16);
  CHECK(p1.num_steering() == 3);
  CHECK(p1.steering_levels()[2] == doctest::Approx(std::atan(tt.L1 / 20.0)));

  const io::ManeuverFile mf = io::load_maneuvers(kData / "maneuvers" / "p1.json");
  CHECK(mf.maneuvers.size() > 6);
  const io::Scenario sc = io::load_scenario(kData / "scenarios" / "demo_depot.json", p1, tt);
  CHECK(sc.starts.size() == 6);
  CHECK(sc.goal == LatticeState{13, 4, 0, p1.zero_steering_index()});
  CHECK(sc.world.footprint == default_footprint(tt));
}

TEST_CASE("parameters, lattices and maneuver files round-trip") {
  const VehicleParams p = VehicleParams::two_trailer(4.66, 3.75, 6.0, 1.67);
  CHECK(io::params_from_json(io::to_json(p)) == p);
  const LatticeSpec l =
      LatticeSpec::make(0.5, default_heading_set(16), default_steering_levels(p.L1), VehicleKind::TwoTrailer);
  CHECK(io::lattice_from_json(io::to_json(l)) == l);
  ObjectiveWeights w;
  w.lambda = 0.3;
  CHECK(io::weights_from_json(io::to_json(w)) == w);

  const io::ManeuverFile mf = io::load_maneuvers(kData / "maneuvers" / "p1.json");
  const std::string once = io::dump(io::to_json(mf));
  CHECK(io::dump(io::to_json(io::maneuvers_from_json(io::json::parse(once)))) == once);
}

TEST_CASE("primitive sets round-trip byte for byte") {
  const PrimitiveSet set = tiny_set();
  const fs::path a = temp_dir() / "a.json";
  const fs::path b = temp_dir() / "b.json";
  io::write_json(a, io::to_json(set));
  const PrimitiveSet back = io::load_primitive_set(a);
  CHECK(back == set);
  io::write_json(b, io::to_json(back));
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(a).back() == '\n');
}

TEST_CASE("error messages name the file") {
  const fs::path missing = temp_dir() / "nope.json";
  try {
    io::load_params(missing);
    FAIL("expected an error");
  } catch (const io::IoError& e) {
    CHECK(std::string(e.what()).find(missing.string()) != std::string::npos);
  }
  const fs::path bad = temp_dir() / "bad_params.json";
  io::write_text(bad, R"({"schema": "mpgen.params/1", "kind": "car_like", "L1_m": -2})");
  try {
    io::load_params(bad);
    FAIL("expected an error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find(bad.string()) != std::string::npos);
  }
  const fs::path junk = temp_dir() / "junk.json";
  io::write_text(junk, "{ not json");
  CHECK_THROWS_AS(io::read_json(junk), io::IoError);
  const fs::path wrong = temp_dir() / "wrong_schema.json";
  io::write_text(wrong, R"({"schema": "mpgen.lattice/1"})");
  CHECK_THROWS_AS(io::load_params(wrong), ConfigError);
}

TEST_CASE("scenario parsing") {
  const VehicleParams p = VehicleParams::car_like(2.5);
  const LatticeSpec l = LatticeSpec::make(1.0, default_heading_set(16), {0.0}, VehicleKind::CarLike);
  io::json j = {{"schema", "mpgen.scenario/1"},
                {"world_bounds", {{"x_min", -20}, {"y_min", -20}, {"x_max", 20}, {"y_max", 20}}},
                {"goal", {{"x_m", 3.0}, {"y_m", 4.0}, {"heading_rad", 0.0}}},
                {"random_starts",
                 {{"count", 5},
                  {"heading_rad", 1.5707963267948966},
                  {"region", {{"x_min", -10}, {"y_min", -10}, {"x_max", -5}, {"y_max", -5}}}}}};
  const io::Scenario a = io::scenario_from_json(j, l, p, 11);
  const io::Scenario b = io::scenario_from_json(j, l, p, 11);
  REQUIRE(a.starts.size() == 5);
  CHECK(a.starts == b.starts);
  for (const auto& s : a.starts) {
    CHECK(s.ix >= -10);
    CHECK(s.ix <= -5);
    CHECK(s.heading_idx == 4);
  }

  io::json off = j;
  off["goal"]["x_m"] = 3.5;
  CHECK_THROWS_AS(io::scenario_from_json(off, l, p), ProblemError);
  off = j;
  off["goal"]["heading_rad"] = 0.3;
  CHECK_THROWS_AS(io::scenario_from_json(off, l, p), ProblemError);
  off = j;
  off["obstacles"] = io::json::array({{{"x_min", 30}, {"y_min", 0}, {"x_max", 31}, {"y_max", 1}}});
  CHECK_THROWS_AS(io::scenario_from_json(off, l, p), ProblemError);
  off = j;
  off.erase("random_starts");
  CHECK_THROWS_AS(io::scenario_from_json(off, l, p), ProblemError);
}

TEST_CASE("trajectory CSV has one row per knot") {
  const PrimitiveSet set = tiny_set();
  std::ostringstream os;
  io::write_trajectory_csv(os, set.primitives().front().trajectory);
  const std::string csv = os.str();
  const auto rows = std::count(csv.begin(), csv.end(), '\n');
  CHECK(rows == static_cast<long>(set.primitives().front().trajectory.knots.size()) + 1);
  CHECK(csv.rfind("t,", 0) == 0);
}
