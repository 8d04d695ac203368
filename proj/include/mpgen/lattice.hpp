#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "mpgen/vehicle.hpp"

namespace mpgen {

struct TerminalManifold;

/// Discrete state space: uniform position grid, a heading set closed under
/// quarter turns, and a symmetric set of equilibrium steering angles. The
/// steering rate is zero at every lattice state.
class LatticeSpec {
 public:
  LatticeSpec() = default;

  /// Validates and builds a lattice; throws ConfigError on a broken invariant.
  static LatticeSpec make(double resolution, std::vector<double> headings, std::vector<double> steering_levels,
                          VehicleKind kind);

  double resolution() const { return resolution_; }
  const std::vector<double>& headings() const { return headings_; }
  const std::vector<double>& steering_levels() const { return steering_levels_; }
  VehicleKind kind() const { return kind_; }

  int num_headings() const { return static_cast<int>(headings_.size()); }
  int num_steering() const { return static_cast<int>(steering_levels_.size()); }
  /// Index shift applied to a heading index by a +pi/2 rotation.
  int quarter_turn_shift() const { return num_headings() / 4; }
  /// Index of the zero steering level.
  int zero_steering_index() const { return zero_steering_; }
  /// Shortest integer grid vector (i, j) pointing along heading `h`.
  const std::array<int, 2>& heading_vector(int h) const { return heading_vectors_.at(h); }

  /// Heading index for an angle, or -1 if it is not a lattice heading.
  int find_heading(double angle, double tol = 1e-9) const;
  int find_steering(double angle, double tol = 1e-9) const;

  bool operator==(const LatticeSpec&) const = default;

 private:
  double resolution_ = 1.0;
  std::vector<double> headings_;
  std::vector<double> steering_levels_;
  VehicleKind kind_ = VehicleKind::CarLike;
  std::vector<std::array<int, 2>> heading_vectors_;
  int zero_steering_ = 0;
};

struct LatticeState {
  std::int32_t ix = 0;
  std::int32_t iy = 0;
  int heading_idx = 0;
  int steering_idx = 0;

  bool operator==(const LatticeState&) const = default;
  auto operator<=>(const LatticeState&) const = default;
};

struct LatticeStateHash {
  std::size_t operator()(const LatticeState& s) const noexcept;
};

/// Headings of the integer vectors with max component 2 (n = 16), the eight
/// multiples of pi/4 (n = 8), or the four axis directions (n = 4).
std::vector<double> default_heading_set(int n);

/// Regular set {2*pi*k/n}; n must be a multiple of 4.
std::vector<double> regular_heading_set(int n);

/// {-a, 0, a} with a the steering angle that gives `turn_radius` for wheelbase L1.
std::vector<double> default_steering_levels(double L1, double turn_radius = 20.0);

/// Continuous state of a lattice vertex; joint angles follow from the steering level.
VehicleState embed(const LatticeState& ls, const LatticeSpec& spec, const VehicleParams& params);

/// Rotates a lattice state by k quarter turns about the origin.
LatticeState rotate_quarter_turns(const LatticeState& ls, int k, const LatticeSpec& spec);

/// Rotates a continuous state by k quarter turns about the origin (exact on positions).
VehicleState rotate_quarter_turns(const VehicleState& s, int k);

struct SnapCandidate {
  LatticeState state;
  double distance = 0.0;
};

/// Lattice end states nearest to a continuous end state that keep the
/// manifold's fixed heading and steering, ordered by ascending distance.
std::vector<SnapCandidate> snap_candidates(const VehicleState& x_cont, const LatticeSpec& spec,
                                           const TerminalManifold& manifold);

}  // namespace mpgen
