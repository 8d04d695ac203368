#include "mpgen/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mpgen/angles.hpp"
#include "mpgen/maneuvers.hpp"

namespace mpgen {

namespace {

constexpr double kAngleTol = 1e-9;
constexpr int kMaxVectorComponent = 10;

bool same_angle(double a, double b, double tol = kAngleTol) { return std::abs(normalize_angle(a - b)) <= tol; }

std::vector<double> angles_of(const std::vector<std::array<int, 2>>& vecs) {
  std::vector<double> out;
  for (const auto& v : vecs) out.push_back(wrap_to_2pi(std::atan2(static_cast<double>(v[1]), v[0])));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(), [](double a, double b) { return std::abs(a - b) < kAngleTol; }),
            out.end());
  return out;
}

}  // namespace

std::size_t LatticeStateHash::operator()(const LatticeState& s) const noexcept {
  std::size_t h = static_cast<std::uint32_t>(s.ix);
  h = h * 0x9E3779B97F4A7C15ULL ^ static_cast<std::uint32_t>(s.iy);
  h = h * 0x9E3779B97F4A7C15ULL ^ static_cast<std::size_t>(s.heading_idx);
  h = h * 0x9E3779B97F4A7C15ULL ^ static_cast<std::size_t>(s.steering_idx);
  return h ^ (h >> 29);
}

LatticeSpec LatticeSpec::make(double resolution, std::vector<double> headings, std::vector<double> steering_levels,
                              VehicleKind kind) {
  if (!(resolution > 0.0) || !std::isfinite(resolution)) throw ConfigError("lattice resolution must be positive");
  if (headings.empty() || headings.size() % 4 != 0) {
    throw ConfigError("heading count must be a positive multiple of 4 for quarter-turn symmetry");
  }
  for (double& h : headings) {
    if (!std::isfinite(h)) throw ConfigError("heading must be finite");
    h = wrap_to_2pi(h);
    if (std::abs(h - kTwoPi) < kAngleTol) h = 0.0;
  }
  std::sort(headings.begin(), headings.end());
  for (std::size_t i = 1; i < headings.size(); ++i) {
    if (headings[i] - headings[i - 1] < kAngleTol) throw ConfigError("headings must be distinct");
  }
  const std::size_t n = headings.size();
  const std::size_t shift = n / 4;
  for (std::size_t i = 0; i < n; ++i) {
    if (!same_angle(headings[(i + shift) % n], headings[i] + kPi / 2.0)) {
      throw ConfigError("heading set is not closed under rotation by pi/2");
    }
  }

  if (steering_levels.empty()) throw ConfigError("steering level set must not be empty");
  std::sort(steering_levels.begin(), steering_levels.end());
  int zero = -1;
  for (std::size_t i = 0; i < steering_levels.size(); ++i) {
    if (!std::isfinite(steering_levels[i])) throw ConfigError("steering level must be finite");
    if (i > 0 && steering_levels[i] - steering_levels[i - 1] < kAngleTol) {
      throw ConfigError("steering levels must be distinct");
    }
    if (std::abs(steering_levels[i]) < kAngleTol) {
      steering_levels[i] = 0.0;
      zero = static_cast<int>(i);
    }
    const double mirrored = steering_levels[steering_levels.size() - 1 - i];
    if (std::abs(steering_levels[i] + mirrored) > kAngleTol) {
      throw ConfigError("steering levels must be symmetric about zero");
    }
  }
  if (zero < 0) throw ConfigError("steering levels must contain zero");

  LatticeSpec spec;
  spec.resolution_ = resolution;
  spec.headings_ = std::move(headings);
  spec.steering_levels_ = std::move(steering_levels);
  spec.kind_ = kind;
  spec.zero_steering_ = zero;
  for (double h : spec.headings_) {
    std::array<int, 2> best{0, 0};
    long best_norm = -1;
    for (int i = -kMaxVectorComponent; i <= kMaxVectorComponent; ++i) {
      for (int j = -kMaxVectorComponent; j <= kMaxVectorComponent; ++j) {
        if ((i == 0 && j == 0) || std::gcd(i, j) != 1) continue;
        if (!same_angle(std::atan2(static_cast<double>(j), i), h)) continue;
        const long norm = static_cast<long>(i) * i + static_cast<long>(j) * j;
        if (best_norm < 0 || norm < best_norm) {
          best_norm = norm;
          best = {i, j};
        }
      }
    }
    if (best_norm < 0) {
      throw ConfigError("heading " + std::to_string(h) + " is not aligned with any short integer grid vector");
    }
    spec.heading_vectors_.push_back(best);
  }
  return spec;
}

int LatticeSpec::find_heading(double angle, double tol) const {
  for (int i = 0; i < num_headings(); ++i) {
    if (same_angle(headings_[i], angle, tol)) return i;
  }
  return -1;
}

int LatticeSpec::find_steering(double angle, double tol) const {
  for (int i = 0; i < num_steering(); ++i) {
    if (std::abs(steering_levels_[i] - angle) <= tol) return i;
  }
  return -1;
}

std::vector<double> default_heading_set(int n) {
  switch (n) {
    case 4:
      return angles_of({{1, 0}, {0, 1}, {-1, 0}, {0, -1}});
    case 8:
      return angles_of({{1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}});
    case 16: {
      std::vector<std::array<int, 2>> vecs;
      for (int i = -2; i <= 2; ++i) {
        for (int j = -2; j <= 2; ++j) {
          if ((i == 0 && j == 0) || std::gcd(i, j) != 1) continue;
          vecs.push_back({i, j});
        }
      }
      return angles_of(vecs);
    }
    default:
      throw ConfigError("default heading set supports n = 4, 8 or 16, got " + std::to_string(n));
  }
}

std::vector<double> regular_heading_set(int n) {
  if (n <= 0 || n % 4 != 0) throw ConfigError("regular heading set needs a positive multiple of 4");
  std::vector<double> out;
  for (int k = 0; k < n; ++k) out.push_back(kTwoPi * k / n);
  return out;
}

std::vector<double> default_steering_levels(double L1, double turn_radius) {
  if (!(L1 > 0.0) || !(turn_radius > 0.0)) throw ConfigError("steering levels need positive L1 and radius");
  const double a = std::atan(L1 / turn_radius);
  return {-a, 0.0, a};
}

VehicleState embed(const LatticeState& ls, const LatticeSpec& spec, const VehicleParams& params) {
  if (ls.heading_idx < 0 || ls.heading_idx >= spec.num_headings() || ls.steering_idx < 0 ||
      ls.steering_idx >= spec.num_steering()) {
    throw ContractViolation("lattice state index out of range");
  }
  if (params.kind != spec.kind()) throw ContractViolation("lattice and vehicle parameters disagree on kind");
  const double r = spec.resolution();
  const double x = ls.ix * r;
  const double y = ls.iy * r;
  const double th = normalize_angle(spec.headings()[ls.heading_idx]);
  const double a = spec.steering_levels()[ls.steering_idx];
  if (params.kind == VehicleKind::CarLike) return VehicleState::car_like(x, y, th, a, 0.0);
  const JointAngles eq = equilibrium_configuration(a, params);
  return VehicleState::two_trailer(x, y, th, eq.beta3, eq.beta2, a, 0.0);
}

LatticeState rotate_quarter_turns(const LatticeState& ls, int k, const LatticeSpec& spec) {
  k = ((k % 4) + 4) % 4;
  LatticeState out = ls;
  for (int i = 0; i < k; ++i) {
    const std::int32_t x = out.ix;
    out.ix = -out.iy;
    out.iy = x;
  }
  const int n = spec.num_headings();
  out.heading_idx = (ls.heading_idx + k * spec.quarter_turn_shift()) % n;
  return out;
}

VehicleState rotate_quarter_turns(const VehicleState& s, int k) {
  k = ((k % 4) + 4) % 4;
  VehicleState out = s;
  for (int i = 0; i < k; ++i) {
    const double x = out.values[idx::kX];
    out.values[idx::kX] = -out.values[idx::kY];
    out.values[idx::kY] = x;
  }
  out.values[idx::kHeading] = normalize_angle(s.values[idx::kHeading] + k * (kPi / 2.0));
  return out;
}

std::vector<SnapCandidate> snap_candidates(const VehicleState& x_cont, const LatticeSpec& spec,
                                           const TerminalManifold& manifold) {
  if (manifold.end_heading_idx < 0 || manifold.end_steering_idx < 0) {
    throw ContractViolation("manifold does not name its lattice heading and steering");
  }
  const double r = spec.resolution();
  const double px = x_cont.x();
  const double py = x_cont.y();
  std::vector<SnapCandidate> out;
  auto push = [&](std::int32_t ix, std::int32_t iy) {
    LatticeState s{ix, iy, manifold.end_heading_idx, manifold.end_steering_idx};
    for (const auto& c : out) {
      if (c.state == s) return;
    }
    out.push_back({s, std::hypot(ix * r - px, iy * r - py)});
  };

  if (manifold.position_fixed()) {
    const double fx = *manifold.fixed_value(idx::kX) / r;
    const double fy = *manifold.fixed_value(idx::kY) / r;
    push(static_cast<std::int32_t>(std::lround(fx)), static_cast<std::int32_t>(std::lround(fy)));
  } else if (!manifold.linear.empty()) {
    const LinearConstraint& lc = manifold.linear.front();
    const auto cx = static_cast<std::int32_t>(std::lround(px / r));
    const auto cy = static_cast<std::int32_t>(std::lround(py / r));
    constexpr int kWindow = 8;
    std::vector<SnapCandidate> on_line;
    for (int dx = -kWindow; dx <= kWindow; ++dx) {
      for (int dy = -kWindow; dy <= kWindow; ++dy) {
        const std::int32_t ix = cx + dx;
        const std::int32_t iy = cy + dy;
        if (std::abs(lc.a_x * ix * r + lc.a_y * iy * r - lc.c) > 1e-7) continue;
        on_line.push_back({LatticeState{ix, iy, manifold.end_heading_idx, manifold.end_steering_idx},
                           std::hypot(ix * r - px, iy * r - py)});
      }
    }
    std::sort(on_line.begin(), on_line.end(), [](const SnapCandidate& a, const SnapCandidate& b) {
      if (a.distance != b.distance) return a.distance < b.distance;
      return a.state < b.state;
    });
    for (std::size_t i = 0; i < on_line.size() && i < 2; ++i) out.push_back(on_line[i]);
    return out;
  } else {
    const auto fx = static_cast<std::int32_t>(std::floor(px / r));
    const auto fy = static_cast<std::int32_t>(std::floor(py / r));
    const auto ux = static_cast<std::int32_t>(std::ceil(px / r));
    const auto uy = static_cast<std::int32_t>(std::ceil(py / r));
    push(fx, fy);
    push(fx, uy);
    push(ux, fy);
    push(ux, uy);
  }
  std::stable_sort(out.begin(), out.end(), [](const SnapCandidate& a, const SnapCandidate& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    return a.state < b.state;
  });
  return out;
}

}  // namespace mpgen
