#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mpgen/errors.hpp"
#include "mpgen/io.hpp"
#include "mpgen/planner.hpp"
#include "mpgen/primgen.hpp"
#include "mpgen/trajopt.hpp"

namespace fs = std::filesystem;
using namespace mpgen;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitInternal = 4;

struct NoSolution : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string params;
  std::string maneuvers;
  std::string lattice;
  std::string scenario;
  std::string out = "out";
  int workers = 1;
  std::uint64_t seed = 1;
  int k_intervals = 20;
  double tol = 1e-8;
};

SolverOptions solver_options(const Common& c) {
  SolverOptions o;
  o.intervals = c.k_intervals;
  o.opt_tol = c.tol;
  o.validate();
  return o;
}

GenerationConfig generation_config(const Common& c) {
  GenerationConfig g;
  g.solver = solver_options(c);
  g.workers = c.workers;
  g.validate();
  return g;
}

std::string fmt(double v, int prec = 3) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(prec) << v;
  return os.str();
}

void write_csv(const fs::path& path, const std::function<void(std::ostream&)>& fn) {
  std::ostringstream os;
  fn(os);
  io::write_text(path, os.str());
}

int cmd_generate(const Common& c, const std::string& reuse_path) {
  const VehicleParams params = io::load_params(c.params);
  const LatticeSpec lattice = io::load_lattice(c.lattice, params);
  GenerationConfig cfg = generation_config(c);
  PrimitiveSet set;
  GenerationReport report;
  if (!reuse_path.empty()) {
    const PrimitiveSet source = io::load_primitive_set(reuse_path);
    const io::ManeuverFile mf = c.maneuvers.empty() ? io::ManeuverFile{} : io::load_maneuvers(c.maneuvers);
    std::tie(set, report) = reuse_connectivity(source, lattice, params, mf.weights, cfg);
  } else {
    const io::ManeuverFile mf = io::load_maneuvers(c.maneuvers);
    cfg.interpret.parallel_form = mf.parallel_form;
    std::tie(set, report) = generate(mf.maneuvers, lattice, params, mf.weights, cfg);
  }
  const fs::path out(c.out);
  io::write_json(out / "primitives.json", io::to_json(set));
  io::write_json(out / "report.json", io::to_json(report));
  io::write_text(out / "report.txt", io::report_table(report));
  std::cout << io::report_table(report);
  std::cout << "wrote " << (out / "primitives.json").string() << " (" << set.size() << " primitives)\n";
  if (set.empty()) throw NoSolution("primitive set is empty");
  return kExitOk;
}

struct ScenarioCosts {
  std::vector<double> costs;  // negative: no solution
  double mean = 0.0;
  bool all_solved = true;
};

ScenarioCosts run_scenario(const PrimitiveSet& set, const io::Scenario& sc, const fs::path* out_dir) {
  const Planner planner(set);
  ScenarioCosts r;
  double sum = 0.0;
  for (std::size_t i = 0; i < sc.starts.size(); ++i) {
    PlanningProblem pb = sc.world;
    pb.start = sc.starts[i];
    pb.goal = sc.goal;
    const Plan p = planner.plan(pb);
    r.costs.push_back(p.solved() ? p.total_cost : -1.0);
    if (p.solved()) {
      sum += p.total_cost;
    } else {
      r.all_solved = false;
    }
    if (out_dir != nullptr) {
      const std::string stem = "plan_" + std::to_string(i);
      io::write_json(*out_dir / (stem + ".json"), io::to_json(p, set));
      if (p.solved()) write_csv(*out_dir / (stem + ".csv"), [&](std::ostream& os) { io::write_path_csv(os, p.path); });
    }
  }
  r.mean = r.all_solved && !r.costs.empty() ? sum / static_cast<double>(r.costs.size()) : -1.0;
  return r;
}

int cmd_plan(const Common& c, const std::string& set_path) {
  const PrimitiveSet set = io::load_primitive_set(set_path);
  const io::Scenario sc = io::load_scenario(c.scenario, set.lattice(), set.params(), c.seed);
  const fs::path out(c.out);
  fs::create_directories(out);
  const ScenarioCosts r = run_scenario(set, sc, &out);
  std::ostringstream table;
  table << std::left << std::setw(8) << "start" << std::setw(22) << "(ix, iy, h)" << "cost\n";
  for (std::size_t i = 0; i < sc.starts.size(); ++i) {
    const LatticeState& s = sc.starts[i];
    const std::string where =
        "(" + std::to_string(s.ix) + ", " + std::to_string(s.iy) + ", " + std::to_string(s.heading_idx) + ")";
    table << std::left << std::setw(8) << i << std::setw(22) << where
          << (r.costs[i] >= 0.0 ? fmt(r.costs[i]) : std::string("no solution")) << "\n";
  }
  table << "mean cost: " << (r.all_solved ? fmt(r.mean) : std::string("-")) << "\n";
  io::write_text(out / "summary.txt", table.str());
  io::json summary{{"scenario", sc.name}, {"costs", r.costs}, {"mean_cost", r.mean}, {"all_solved", r.all_solved}};
  io::write_json(out / "summary.json", summary);
  std::cout << table.str();
  return r.all_solved ? kExitOk : kExitInfeasible;
}

int cmd_compare(const Common& c, const std::vector<std::string>& set_paths) {
  if (set_paths.size() < 2) throw ConfigError("compare needs at least two primitive sets");
  std::vector<PrimitiveSet> native;
  for (const auto& p : set_paths) native.push_back(io::load_primitive_set(p));
  const GenerationConfig cfg = generation_config(c);
  const std::size_t n = native.size();
  std::vector<std::vector<double>> means(n, std::vector<double>(n, -1.0));
  for (std::size_t i = 0; i < n; ++i) {
    const io::Scenario sc = io::load_scenario(c.scenario, native[i].lattice(), native[i].params(), c.seed);
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) {
        means[i][j] = run_scenario(native[i], sc, nullptr).mean;
        continue;
      }
      auto [set, rep] = reuse_connectivity(native[j], native[i].lattice(), native[i].params(), native[i].weights(), cfg);
      if (rep.n_infeasible > 0) continue;
      means[i][j] = run_scenario(set, sc, nullptr).mean;
    }
  }
  std::ostringstream table;
  table << std::left << std::setw(40) << "instance \\ connectivity from";
  for (std::size_t j = 0; j < n; ++j) table << std::setw(10) << ("set" + std::to_string(j));
  table << "\n";
  io::json rows = io::json::array();
  for (std::size_t i = 0; i < n; ++i) {
    table << std::left << std::setw(40) << ("set" + std::to_string(i) + " " + set_paths[i]);
    io::json row = io::json::array();
    for (std::size_t j = 0; j < n; ++j) {
      const double base = means[i][i];
      if (means[i][j] < 0.0 || base <= 0.0) {
        table << std::setw(10) << "-";
        row.push_back("-");
      } else {
        table << std::setw(10) << fmt(means[i][j] / base, 2);
        row.push_back(means[i][j] / base);
      }
    }
    table << "\n";
    rows.push_back(std::move(row));
  }
  const fs::path out(c.out);
  io::write_text(out / "compare.txt", table.str());
  io::write_json(out / "compare.json", {{"sets", set_paths}, {"relative_cost", rows}});
  std::cout << table.str();
  return kExitOk;
}

int cmd_sweep(const Common& c, const std::vector<double>& lambdas, int ocp_index) {
  if (lambdas.empty()) throw ConfigError("no lambda given");
  for (double l : lambdas) {
    if (!(l >= 0.0)) throw ConfigError("lambda must be non-negative");
  }
  const VehicleParams params = io::load_params(c.params);
  const LatticeSpec lattice = io::load_lattice(c.lattice, params);
  const io::ManeuverFile mf = io::load_maneuvers(c.maneuvers);
  if (mf.maneuvers.size() != 1) throw ConfigError("sweep-lambda needs a maneuver file with exactly one entry");
  InterpretOptions iopt;
  iopt.parallel_form = mf.parallel_form;
  const SolverOptions so = solver_options(c);
  const fs::path out(c.out);
  std::cout << std::left << std::setw(10) << "lambda" << std::setw(12) << "T" << std::setw(14) << "int J dt"
            << "status\n";
  bool all = true;
  for (double l : lambdas) {
    ObjectiveWeights w = mf.weights;
    w.lambda = l;
    const std::vector<OcpSpec> ocps = interpret(mf.maneuvers, lattice, params, w, iopt);
    if (ocp_index < 0 || ocp_index >= static_cast<int>(ocps.size())) throw ConfigError("--ocp index out of range");
    const OcpSpec& spec = ocps[static_cast<std::size_t>(ocp_index)];
    const SolveResult r = solve_maneuver_ocp(spec, so);
    const double smooth = smoothness_integral(r.trajectory, w);
    std::cout << std::left << std::setw(10) << l << std::setw(12) << fmt(r.trajectory.duration, 4) << std::setw(14)
              << fmt(smooth, 5) << to_string(r.status) << "\n";
    all = all && r.converged();
    std::ostringstream name;
    name << "sweep_lambda_" << l << ".csv";
    write_csv(out / name.str(), [&](std::ostream& os) { io::write_trajectory_csv(os, r.trajectory); });
  }
  return all ? kExitOk : kExitInfeasible;
}

int cmd_inspect(const std::string& set_path) {
  const PrimitiveSet set = io::load_primitive_set(set_path);
  std::cout << "vehicle: " << to_string(set.params().kind) << " L1=" << set.params().L1 << "\n";
  std::cout << "lattice: r=" << set.lattice().resolution() << " headings=" << set.lattice().num_headings()
            << " steering=" << set.lattice().num_steering() << "\n";
  std::cout << "primitives: " << set.size() << "\n";
  if (set.empty()) return kExitOk;
  std::map<std::string, int> per_tag;
  double cmin = 1e300, cmax = 0.0, csum = 0.0, tmin = 1e300, tmax = 0.0;
  for (const auto& p : set.primitives()) {
    std::string tag = p.maneuver_tag.substr(0, p.maneuver_tag.find('@'));
    ++per_tag[tag];
    cmin = std::min(cmin, p.cost);
    cmax = std::max(cmax, p.cost);
    csum += p.cost;
    tmin = std::min(tmin, p.trajectory.duration);
    tmax = std::max(tmax, p.trajectory.duration);
  }
  std::cout << "cost: min " << fmt(cmin) << " mean " << fmt(csum / static_cast<double>(set.size())) << " max "
            << fmt(cmax) << "\n";
  std::cout << "duration: min " << fmt(tmin) << " max " << fmt(tmax) << "\n";
  for (int h = 0; h < set.lattice().num_headings(); ++h) {
    std::cout << "heading " << std::setw(2) << h << ":";
    for (int s = 0; s < set.lattice().num_steering(); ++s) std::cout << " " << set.applicable(h, s).size();
    std::cout << "\n";
  }
  for (const auto& [tag, n] : per_tag) std::cout << "  " << std::left << std::setw(40) << tag << n << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Maneuver-based motion primitive generation and lattice planning"};
  app.require_subcommand(1);
  Common c;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--workers", c.workers, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--seed", c.seed, "Seed for randomized scenario starts");
    sub->add_option("--k-intervals", c.k_intervals, "Shooting intervals K (>= 20)");
    sub->add_option("--tol", c.tol, "Optimality tolerance of the NLP solver");
    sub->add_option("--out", c.out, "Output directory");
  };

  std::string reuse, set_path;
  std::vector<std::string> set_paths;
  std::vector<double> lambdas{0.1, 1.0, 10.0};
  int ocp_index = 0;

  auto* gen = app.add_subcommand("generate", "Generate a primitive set");
  add_common(gen);
  gen->add_option("--params", c.params, "Vehicle parameter file")->required();
  gen->add_option("--lattice", c.lattice, "Lattice file")->required();
  gen->add_option("--maneuvers", c.maneuvers, "Maneuver file (weights only with --reuse)");
  gen->add_option("--reuse", reuse, "Re-solve the connectivity of this primitive set instead");

  auto* plan = app.add_subcommand("plan", "Plan every start of a scenario");
  add_common(plan);
  plan->add_option("--primitives", set_path, "Primitive set file")->required();
  plan->add_option("--scenario", c.scenario, "Scenario file")->required();

  auto* cmp = app.add_subcommand("compare", "Relative planning cost with reused connectivity");
  add_common(cmp);
  cmp->add_option("--primitives", set_paths, "Natively optimized primitive sets, one per instance")->required();
  cmp->add_option("--scenario", c.scenario, "Scenario file")->required();

  auto* sweep = app.add_subcommand("sweep-lambda", "Solve one maneuver for several lambda");
  add_common(sweep);
  sweep->add_option("--params", c.params, "Vehicle parameter file")->required();
  sweep->add_option("--lattice", c.lattice, "Lattice file")->required();
  sweep->add_option("--maneuvers", c.maneuvers, "Maneuver file with one entry")->required();
  sweep->add_option("--lambdas", lambdas, "Lambda values")->delimiter(',');
  sweep->add_option("--ocp", ocp_index, "Which OCP of the maneuver to solve");

  auto* insp = app.add_subcommand("inspect", "Print statistics of a primitive set");
  insp->add_option("set", set_path, "Primitive set file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (gen->parsed()) {
      if (reuse.empty() && c.maneuvers.empty()) throw ConfigError("generate needs --maneuvers or --reuse");
      return cmd_generate(c, reuse);
    }
    if (plan->parsed()) return cmd_plan(c, set_path);
    if (cmp->parsed()) return cmd_compare(c, set_paths);
    if (sweep->parsed()) return cmd_sweep(c, lambdas, ocp_index);
    if (insp->parsed()) return cmd_inspect(set_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const io::IoError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InterpretationError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ProblemError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const GenerationError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const NoSolution& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}
