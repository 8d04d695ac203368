#include "mpgen/maneuvers.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mpgen/angles.hpp"

namespace mpgen {

std::string to_string(ManeuverType t) {
  switch (t) {
    case ManeuverType::Straight:
      return "straight";
    case ManeuverType::HeadingChange:
      return "heading_change";
    case ManeuverType::Parallel:
      return "parallel";
    case ManeuverType::Circular:
      return "circular";
  }
  return "unknown";
}

ManeuverType maneuver_type_from_string(const std::string& s) {
  if (s == "straight") return ManeuverType::Straight;
  if (s == "heading_change") return ManeuverType::HeadingChange;
  if (s == "parallel") return ManeuverType::Parallel;
  if (s == "circular") return ManeuverType::Circular;
  throw ConfigError("unknown maneuver type '" + s + "'");
}

std::string ManeuverSpec::tag() const {
  std::ostringstream os;
  os << to_string(type);
  switch (type) {
    case ManeuverType::HeadingChange:
    case ManeuverType::Circular:
      os << "(" << delta_theta << ")";
      break;
    case ManeuverType::Parallel:
      if (lateral_steps != 0) {
        os << "(" << lateral_steps << " lines)";
      } else {
        os << "(" << c_lat << " m)";
      }
      break;
    case ManeuverType::Straight:
      break;
  }
  os << "/" << to_string(direction);
  return os.str();
}

bool TerminalManifold::position_fixed() const {
  return fixed_value(idx::kX).has_value() && fixed_value(idx::kY).has_value();
}

std::optional<double> TerminalManifold::fixed_value(int component) const {
  for (const auto& f : fixed) {
    if (f.component == component) return f.value;
  }
  return std::nullopt;
}

void TerminalManifold::check_cover(int state_dim) const {
  std::vector<int> count(state_dim, 0);
  for (const auto& f : fixed) {
    if (f.component < 0 || f.component >= state_dim) throw ContractViolation("fixed component out of range");
    ++count[f.component];
  }
  for (int c : free) {
    if (c < 0 || c >= state_dim) throw ContractViolation("free component out of range");
    ++count[c];
  }
  if (!linear.empty()) {
    ++count[idx::kX];
    ++count[idx::kY];
  }
  for (int i = 0; i < state_dim; ++i) {
    if (count[i] != 1) throw ContractViolation("terminal manifold must cover every component exactly once");
  }
  if (codimension() > state_dim) throw ContractViolation("terminal manifold has more equalities than states");
}

double speed_for(Direction d, const VehicleParams& params) {
  double best = 0.0;
  for (double v : params.speeds) {
    if (d == Direction::Forward && v > 0.0 && v > best) best = v;
    if (d == Direction::Backward && v < 0.0 && v < best) best = v;
  }
  if (best == 0.0) {
    throw InterpretationError("speed set has no " + to_string(d) + " speed");
  }
  return best;
}

namespace {

/// Fixes heading, joint angles, steering and steering rate of `end`; the
/// heading target is unwrapped relative to `start`. Position optionally.
TerminalManifold lattice_manifold(const VehicleState& start, const VehicleState& end, const LatticeState& end_ls,
                                  bool fix_position) {
  TerminalManifold m;
  for (int i = 0; i < end.dim(); ++i) {
    if ((i == idx::kX || i == idx::kY) && !fix_position) continue;
    double value = end.values[i];
    if (i == idx::kHeading) value = start.values[i] + angle_diff(end.values[i], start.values[i]);
    m.fixed.push_back({i, value});
  }
  m.end_heading_idx = end_ls.heading_idx;
  m.end_steering_idx = end_ls.steering_idx;
  return m;
}

}  // namespace

TerminalManifold fixed_endpoint_manifold(const VehicleState& target, const VehicleState& initial) {
  if (target.kind != initial.kind) throw ContractViolation("fixed endpoint of a different vehicle kind");
  TerminalManifold m;
  for (int i = 0; i < target.dim(); ++i) {
    double value = target.values[i];
    if (i == idx::kHeading) value = initial.values[i] + angle_diff(target.values[i], initial.values[i]);
    m.fixed.push_back({i, value});
  }
  return m;
}

std::vector<OcpSpec> interpret(const std::vector<ManeuverSpec>& maneuvers, const LatticeSpec& spec,
                               const VehicleParams& params, const ObjectiveWeights& objective,
                               const InterpretOptions& options) {
  if (maneuvers.empty()) throw InterpretationError("maneuver list is empty");
  if (params.kind != spec.kind()) throw InterpretationError("lattice and vehicle parameters disagree on kind");
  const int N = spec.num_headings();
  const int n_start = options.exploit_symmetry ? spec.quarter_turn_shift() : N;
  const int zero = spec.zero_steering_index();
  const double r = spec.resolution();

  std::vector<OcpSpec> out;
  for (const ManeuverSpec& man : maneuvers) {
    const double v = speed_for(man.direction, params);
    const int dir_sign = v > 0.0 ? 1 : -1;
    const std::vector<int> signs = man.both_signs ? std::vector<int>{1, -1} : std::vector<int>{1};

    if (man.type == ManeuverType::HeadingChange || man.type == ManeuverType::Circular) {
      if (man.delta_theta < 1 || 2 * man.delta_theta >= N) {
        throw InterpretationError(man.tag() + ": heading change must lie in [1, N/2)");
      }
    }
    if (man.type == ManeuverType::Parallel && man.lateral_steps == 0 && man.c_lat == 0.0) {
      throw InterpretationError(man.tag() + ": parallel maneuver needs a nonzero lateral offset");
    }

    std::vector<std::pair<int, int>> transitions;
    if (man.type == ManeuverType::Circular) {
      if (man.steering_transition) {
        const auto [a, b] = *man.steering_transition;
        if (a < 0 || b < 0 || a >= spec.num_steering() || b >= spec.num_steering() || std::abs(a - b) != 1) {
          throw InterpretationError(man.tag() + ": steering transition must join adjacent steering levels");
        }
        transitions.emplace_back(a, b);
      } else {
        for (int a = 0; a < spec.num_steering(); ++a) {
          for (int b : {a - 1, a + 1}) {
            if (b >= 0 && b < spec.num_steering()) transitions.emplace_back(a, b);
          }
        }
      }
      if (transitions.empty()) {
        throw InterpretationError(man.tag() + ": lattice has a single steering level, no circular transitions");
      }
    } else {
      transitions.emplace_back(zero, zero);
    }

    std::size_t emitted_for_maneuver = 0;
    for (int h = 0; h < n_start; ++h) {
      for (const auto& [s_start, s_end] : transitions) {
        for (int sign : signs) {
          if (man.type == ManeuverType::Straight && sign < 0) continue;
          const LatticeState start_ls{0, 0, h, s_start};
          const VehicleState x0 = embed(start_ls, spec, params);

          OcpSpec ocp;
          ocp.initial_state = x0;
          ocp.start = start_ls;
          ocp.direction = man.direction;
          ocp.speed = v;
          ocp.objective = objective;
          ocp.params = params;
          ocp.heading_sign = sign;

          std::ostringstream tag;
          tag << man.tag() << "@h" << h;
          if (man.type == ManeuverType::Circular) tag << ":s" << s_start << "->s" << s_end;
          if (man.type != ManeuverType::Straight) tag << (sign > 0 ? ":+" : ":-");

          switch (man.type) {
            case ManeuverType::Straight: {
              const auto& vec = spec.heading_vector(h);
              const LatticeState end_ls{dir_sign * vec[0], dir_sign * vec[1], h, zero};
              ocp.manifold = lattice_manifold(x0, embed(end_ls, spec, params), end_ls, true);
              break;
            }
            case ManeuverType::HeadingChange:
            case ManeuverType::Circular: {
              const int end_h = ((h + sign * man.delta_theta) % N + N) % N;
              const LatticeState end_ls{0, 0, end_h, s_end};
              ocp.manifold = lattice_manifold(x0, embed(end_ls, spec, params), end_ls, false);
              ocp.manifold.free = {idx::kX, idx::kY};
              break;
            }
            case ManeuverType::Parallel: {
              const auto& vec = spec.heading_vector(h);
              const double norm = std::hypot(static_cast<double>(vec[0]), static_cast<double>(vec[1]));
              const double c = man.lateral_steps != 0 ? sign * man.lateral_steps * r / norm : sign * man.c_lat;
              const double units = c * norm / r;
              if (std::abs(units - std::round(units)) > 1e-9 || std::round(units) == 0.0) continue;
              const double th = x0.heading();
              LinearConstraint lc;
              if (options.parallel_form == ParallelLineForm::Lateral) {
                lc = {-std::sin(th), std::cos(th), c};
              } else {
                lc = {std::sin(th), std::cos(th), c};
              }
              const LatticeState end_ls{0, 0, h, zero};
              ocp.manifold = lattice_manifold(x0, embed(end_ls, spec, params), end_ls, false);
              ocp.manifold.linear.push_back(lc);
              tag.str("");
              tag << man.tag() << "@h" << h << (sign > 0 ? ":+" : ":-");
              break;
            }
          }
          ocp.tag = tag.str();
          ocp.manifold.check_cover(params.state_dim());
          out.push_back(std::move(ocp));
          ++emitted_for_maneuver;
        }
      }
    }
    if (emitted_for_maneuver == 0) {
      throw InterpretationError(man.tag() + ": lateral offset is not representable on the grid for any heading");
    }
  }
  return out;
}

Eigen::VectorXd manifold_residual(const TerminalManifold& m, const VehicleState& x_T) {
  Eigen::VectorXd r(m.codimension());
  int i = 0;
  for (const auto& f : m.fixed) {
    double d = x_T.values[f.component] - f.value;
    if (idx::is_angle(x_T.kind, f.component)) d = normalize_angle(d);
    r[i++] = d;
  }
  for (const auto& lc : m.linear) r[i++] = lc.a_x * x_T.x() + lc.a_y * x_T.y() - lc.c;
  return r;
}

}  // namespace mpgen
