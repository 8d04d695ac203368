#pragma once

#include <vector>

#include "mpgen/alm.hpp"
#include "mpgen/maneuvers.hpp"
#include "mpgen/trajectory.hpp"
#include "mpgen/vehicle.hpp"

namespace mpgen {

/// Everything the multiple-shooting transcription needs from an OCP.
struct TranscriptionData {
  VehicleState initial_state;
  TerminalManifold manifold;
  double speed = 1.0;
  Direction direction = Direction::Forward;
  ObjectiveWeights weights;
  VehicleParams params;
  int intervals = 20;
  int substeps = 32;
  double joint_angle_limit = 1.3;
  double t_min = 0.05;
  double t_max = 200.0;
};

/// Direct multiple shooting with free final time on K uniform intervals.
///
/// Variables, per interval k = 0..K-1: [u_k, s_k, x_{k+1}], then T last.
/// x_0 is the fixed initial state and is not a variable. s_k is the middle
/// control point of the quadratic Bezier that alpha traces on interval k,
/// so bounding it bounds alpha between knots.
/// Constraints, per interval: (F(x_k, u_k, T) - x_{k+1}) K / T (n rows), then
/// alpha_k + omega_k T / (2K) - s_k; linear terminal rows last. Fixed terminal
/// components are bounds with l = u.
class MultipleShootingProblem final : public nlp::Problem {
 public:
  explicit MultipleShootingProblem(TranscriptionData data);

  int num_variables() const override { return num_vars_; }
  int num_constraints() const override { return num_cons_; }
  const Eigen::VectorXd& lower() const override { return lower_; }
  const Eigen::VectorXd& upper() const override { return upper_; }
  bool evaluate(const Eigen::VectorXd& z, double& f, Eigen::VectorXd& c) const override;
  bool derivatives(const Eigen::VectorXd& z, const Eigen::VectorXd& y, Eigen::VectorXd& grad,
                   nlp::SparseMatrix& jac, std::vector<nlp::Triplet>& hess) const override;

  int state_dim() const { return n_; }
  int intervals() const { return K_; }
  int u_index(int k) const { return k * (n_ + 2); }
  int s_index(int k) const { return k * (n_ + 2) + 1; }
  /// First index of knot k (k >= 1).
  int x_index(int k) const { return (k - 1) * (n_ + 2) + 2; }
  int t_index() const { return K_ * (n_ + 2); }
  int defect_row(int k) const { return k * (n_ + 1); }
  int midpoint_row(int k) const { return k * (n_ + 1) + n_; }

  StateVector knot(const Eigen::VectorXd& z, int k) const;
  const TranscriptionData& data() const { return data_; }

  /// Heading, joint angles normalized; cost from evaluate_objective.
  Trajectory to_trajectory(const Eigen::VectorXd& z) const;

  /// Bezier-curve initial guess, projected onto the bounds.
  Eigen::VectorXd initial_guess() const;

  /// Packs a trajectory with the same K back into variables (angles unwrapped
  /// along the knots starting from the initial heading).
  Eigen::VectorXd pack(const Trajectory& traj) const;

 private:
  double smoothness_sum(const Eigen::VectorXd& z) const;

  TranscriptionData data_;
  int n_ = 0;
  int K_ = 0;
  int num_vars_ = 0;
  int num_cons_ = 0;
  Eigen::VectorXd lower_;
  Eigen::VectorXd upper_;
  /// (component, weight) pairs of the quadratic state integrand.
  std::vector<std::pair<int, double>> quad_;
};

/// Effective wheelbase of the reference axle: tan(alpha)/curvature at small alpha.
double effective_wheelbase(const VehicleParams& params);

}  // namespace mpgen
