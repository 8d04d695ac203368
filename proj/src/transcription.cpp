#include "mpgen/transcription.hpp"

#include <unsupported/Eigen/AutoDiff>
#include <algorithm>
#include <cmath>
#include <limits>

#include "mpgen/angles.hpp"

namespace mpgen {

namespace {

constexpr int kMaxDir = 9;
using Deriv = Eigen::Matrix<double, kMaxDir, 1>;
using AD = Eigen::AutoDiffScalar<Deriv>;
constexpr double kInf = std::numeric_limits<double>::infinity();

/// F(x, u, T) and its Jacobian with columns (x, u, T).
bool interval_ad(const TranscriptionData& d, const StateVector& x, double u, double T, StateVector& F,
                 Eigen::MatrixXd& jac) {
  const int n = static_cast<int>(x.size());
  StateVectorT<AD> xa(n);
  for (int i = 0; i < n; ++i) xa[i] = AD(x[i], kMaxDir, i);
  const AD ua(u, kMaxDir, n);
  const AD dt = AD(T, kMaxDir, n + 1) / static_cast<double>(d.intervals);
  StateVectorT<AD> out;
  try {
    out = integrate_interval_t<AD, AD>(d.params, xa, d.speed, ua, dt, d.substeps);
  } catch (const ModelDomainError&) {
    return false;
  }
  F.resize(n);
  jac.resize(n, n + 2);
  for (int i = 0; i < n; ++i) {
    F[i] = out[i].value();
    jac.row(i) = out[i].derivatives().head(n + 2).transpose();
  }
  return F.allFinite() && jac.allFinite();
}

bool interval_value(const TranscriptionData& d, const StateVector& x, double u, double T, StateVector& F) {
  try {
    F = integrate_interval_t<double, double>(d.params, x, d.speed, u, T / d.intervals, d.substeps);
  } catch (const ModelDomainError&) {
    return false;
  }
  return F.allFinite();
}

}  // namespace

double effective_wheelbase(const VehicleParams& params) {
  if (params.kind == VehicleKind::CarLike) return params.L1;
  const double a = 0.1;
  const JointAngles eq = equilibrium_configuration(a, params);
  const VehicleState s = VehicleState::two_trailer(0, 0, 0, eq.beta3, eq.beta2, a, 0);
  const StateVector dx = dynamics(s, ControlInput{1.0, 0.0}, params);
  const double v3 = std::hypot(dx[0], dx[1]);
  return std::tan(a) * v3 / std::abs(dx[2]);
}

MultipleShootingProblem::MultipleShootingProblem(TranscriptionData data) : data_(std::move(data)) {
  n_ = data_.params.state_dim();
  K_ = data_.intervals;
  if (data_.initial_state.dim() != n_ || data_.initial_state.kind != data_.params.kind) {
    throw ContractViolation("initial state does not match the vehicle kind");
  }
  if (K_ < 1 || data_.substeps < 1) throw ContractViolation("need at least one interval and one substep");
  if (!(data_.t_min > 0.0) || !(data_.t_max > data_.t_min)) throw ContractViolation("invalid duration bounds");
  data_.manifold.check_cover(n_);
  num_vars_ = K_ * (n_ + 2) + 1;
  num_cons_ = K_ * (n_ + 1) + static_cast<int>(data_.manifold.linear.size());

  const VehicleKind kind = data_.params.kind;
  const auto& p = data_.params;
  lower_ = Eigen::VectorXd::Constant(num_vars_, -kInf);
  upper_ = Eigen::VectorXd::Constant(num_vars_, kInf);
  for (int k = 0; k < K_; ++k) {
    lower_[u_index(k)] = -p.u_alpha_max;
    upper_[u_index(k)] = p.u_alpha_max;
    lower_[s_index(k)] = -p.alpha_max;
    upper_[s_index(k)] = p.alpha_max;
    const int xi = x_index(k + 1);
    lower_[xi + idx::alpha(kind)] = -p.alpha_max;
    upper_[xi + idx::alpha(kind)] = p.alpha_max;
    lower_[xi + idx::omega(kind)] = -p.omega_max;
    upper_[xi + idx::omega(kind)] = p.omega_max;
    if (kind == VehicleKind::TwoTrailer) {
      for (int c : {idx::kBeta3, idx::kBeta2}) {
        lower_[xi + c] = -data_.joint_angle_limit;
        upper_[xi + c] = data_.joint_angle_limit;
      }
    }
  }
  for (const auto& f : data_.manifold.fixed) {
    const int i = x_index(K_) + f.component;
    if (f.value < lower_[i] - 1e-12 || f.value > upper_[i] + 1e-12) {
      throw ContractViolation("terminal value outside the admissible box");
    }
    lower_[i] = upper_[i] = f.value;
  }
  lower_[t_index()] = data_.t_min;
  upper_[t_index()] = data_.t_max;

  const auto& w = data_.weights;
  quad_ = {{idx::alpha(kind), w.w_alpha}, {idx::omega(kind), w.w_omega}};
  if (kind == VehicleKind::TwoTrailer && data_.direction == Direction::Backward) {
    quad_.emplace_back(idx::kBeta3, w.w_beta3);
    quad_.emplace_back(idx::kBeta2, w.w_beta2);
  }
}

StateVector MultipleShootingProblem::knot(const Eigen::VectorXd& z, int k) const {
  if (k == 0) return data_.initial_state.values;
  return z.segment(x_index(k), n_);
}

double MultipleShootingProblem::smoothness_sum(const Eigen::VectorXd& z) const {
  double sum = 0.0;
  for (int k = 0; k <= K_; ++k) {
    const double wk = (k == 0 || k == K_) ? 0.5 : 1.0;
    const StateVector x = knot(z, k);
    for (const auto& [c, q] : quad_) sum += wk * q * x[c] * x[c];
  }
  for (int k = 0; k < K_; ++k) sum += data_.weights.w_ualpha * z[u_index(k)] * z[u_index(k)];
  return sum;
}

bool MultipleShootingProblem::evaluate(const Eigen::VectorXd& z, double& f, Eigen::VectorXd& c) const {
  const double T = z[t_index()];
  const int ia = idx::alpha(data_.params.kind);
  const int iw = idx::omega(data_.params.kind);
  c.resize(num_cons_);
  StateVector F;
  for (int k = 0; k < K_; ++k) {
    const StateVector xk = knot(z, k);
    if (!interval_value(data_, xk, z[u_index(k)], T, F)) return false;
    c.segment(defect_row(k), n_) = (F - z.segment(x_index(k + 1), n_)) * (K_ / T);
    c[midpoint_row(k)] = xk[ia] + xk[iw] * T / (2.0 * K_) - z[s_index(k)];
  }
  const int xK = x_index(K_);
  for (std::size_t j = 0; j < data_.manifold.linear.size(); ++j) {
    const auto& lc = data_.manifold.linear[j];
    c[K_ * (n_ + 1) + static_cast<int>(j)] = lc.a_x * z[xK + idx::kX] + lc.a_y * z[xK + idx::kY] - lc.c;
  }
  f = T + data_.weights.lambda * T * smoothness_sum(z) / K_;
  return std::isfinite(f);
}

bool MultipleShootingProblem::derivatives(const Eigen::VectorXd& z, const Eigen::VectorXd& y,
                                          Eigen::VectorXd& grad, nlp::SparseMatrix& jac,
                                          std::vector<nlp::Triplet>& hess) const {
  const double T = z[t_index()];
  const int ti = t_index();
  const int ia = idx::alpha(data_.params.kind);
  const int iw = idx::omega(data_.params.kind);
  const double lam = data_.weights.lambda;

  // Objective: f = T + lam * T * S / K.
  grad = Eigen::VectorXd::Zero(num_vars_);
  grad[ti] = 1.0 + lam * smoothness_sum(z) / K_;
  auto obj_term = [&](int i, double dS, double d2S) {
    grad[i] += lam * T * dS / K_;
    hess.emplace_back(i, i, lam * T * d2S / K_);
    hess.emplace_back(i, ti, lam * dS / K_);
    hess.emplace_back(ti, i, lam * dS / K_);
  };
  for (int k = 1; k <= K_; ++k) {
    const double wk = k == K_ ? 0.5 : 1.0;
    const int xi = x_index(k);
    for (const auto& [c, q] : quad_) obj_term(xi + c, 2.0 * wk * q * z[xi + c], 2.0 * wk * q);
  }
  for (int k = 0; k < K_; ++k) {
    const double wu = data_.weights.w_ualpha;
    obj_term(u_index(k), 2.0 * wu * z[u_index(k)], 2.0 * wu);
  }

  std::vector<nlp::Triplet> jt;
  jt.reserve(static_cast<std::size_t>(K_) * (n_ * (n_ + 4) + 4) + 2 * data_.manifold.linear.size());
  StateVector F;
  Eigen::MatrixXd J;
  Eigen::MatrixXd Jp;
  StateVector Fp;
  Eigen::MatrixXd Hk(n_ + 2, n_ + 2);
  for (int k = 0; k < K_; ++k) {
    const StateVector xk = knot(z, k);
    const double uk = z[u_index(k)];
    if (!interval_ad(data_, xk, uk, T, F, J)) return false;
    // Defect rows are (F - x_{k+1}) * K / T.
    const double sc = K_ / T;
    const StateVector D = F - z.segment(x_index(k + 1), n_);
    const int r0 = defect_row(k);
    // Column index of each local direction (x_k, u_k, T); -1 for constants.
    std::vector<int> col(n_ + 2, -1);
    if (k > 0) {
      for (int j = 0; j < n_; ++j) col[j] = x_index(k) + j;
    }
    col[n_] = u_index(k);
    col[n_ + 1] = ti;
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_ + 1; ++j) {
        if (col[j] >= 0) jt.emplace_back(r0 + i, col[j], sc * J(i, j));
      }
      jt.emplace_back(r0 + i, ti, sc * (J(i, n_ + 1) - D[i] / T));
      jt.emplace_back(r0 + i, x_index(k + 1) + i, -sc);
    }
    const int rm = midpoint_row(k);
    if (k > 0) {
      jt.emplace_back(rm, x_index(k) + ia, 1.0);
      jt.emplace_back(rm, x_index(k) + iw, T / (2.0 * K_));
      hess.emplace_back(x_index(k) + iw, ti, y[rm] / (2.0 * K_));
      hess.emplace_back(ti, x_index(k) + iw, y[rm] / (2.0 * K_));
    }
    jt.emplace_back(rm, ti, xk[iw] / (2.0 * K_));
    jt.emplace_back(rm, s_index(k), -1.0);

    // Hessian of y_k' c_k. The (x_k, u_k, T) block comes from forward
    // differences of the exact gradient; x_{k+1} only couples with T.
    const Eigen::VectorXd yk = y.segment(r0, n_);
    auto local_grad = [&](const Eigen::MatrixXd& Jw, const StateVector& Fw, double Tw) {
      const double s = K_ / Tw;
      Eigen::VectorXd g = s * (Jw.transpose() * yk);
      g[n_ + 1] -= s / Tw * yk.dot(Fw - z.segment(x_index(k + 1), n_));
      return g;
    };
    const Eigen::VectorXd g0 = local_grad(J, F, T);
    for (int i = 0; i < n_; ++i) {
      const double v = K_ / (T * T) * yk[i];
      hess.emplace_back(x_index(k + 1) + i, ti, v);
      hess.emplace_back(ti, x_index(k + 1) + i, v);
    }
    Hk.setZero();
    for (int j = 0; j < n_ + 2; ++j) {
      if (col[j] < 0) continue;
      StateVector xp = xk;
      double up = uk;
      double Tp = T;
      double h = 0.0;
      if (j < n_) {
        h = 1e-7 * (1.0 + std::abs(xp[j]));
        xp[j] += h;
      } else if (j == n_) {
        h = 1e-7 * (1.0 + std::abs(up));
        up += h;
      } else {
        h = 1e-7 * (1.0 + std::abs(Tp));
        Tp += h;
      }
      if (!interval_ad(data_, xp, up, Tp, Fp, Jp)) return false;
      Hk.col(j) = (local_grad(Jp, Fp, Tp) - g0) / h;
    }
    for (int a = 0; a < n_ + 2; ++a) {
      if (col[a] < 0) continue;
      for (int b = 0; b < n_ + 2; ++b) {
        if (col[b] < 0) continue;
        const double v = 0.5 * (Hk(a, b) + Hk(b, a));
        if (v != 0.0) hess.emplace_back(col[a], col[b], v);
      }
    }
  }
  const int xK = x_index(K_);
  for (std::size_t j = 0; j < data_.manifold.linear.size(); ++j) {
    const auto& lc = data_.manifold.linear[j];
    const int r = K_ * (n_ + 1) + static_cast<int>(j);
    jt.emplace_back(r, xK + idx::kX, lc.a_x);
    jt.emplace_back(r, xK + idx::kY, lc.a_y);
  }
  jac.resize(num_cons_, num_vars_);
  jac.setFromTriplets(jt.begin(), jt.end());
  return true;
}

Trajectory MultipleShootingProblem::to_trajectory(const Eigen::VectorXd& z) const {
  Trajectory t;
  t.duration = z[t_index()];
  t.speed = data_.speed;
  t.direction = data_.direction;
  t.substeps = data_.substeps;
  t.knots.reserve(K_ + 1);
  for (int k = 0; k <= K_; ++k) {
    VehicleState s(data_.params.kind, knot(z, k));
    s.normalize();
    t.knots.push_back(s);
  }
  for (int k = 0; k < K_; ++k) t.controls.push_back(z[u_index(k)]);
  t.cost = evaluate_objective(t, data_.weights);
  return t;
}

Eigen::VectorXd MultipleShootingProblem::pack(const Trajectory& traj) const {
  if (traj.intervals() != K_ || traj.knots.front().kind != data_.params.kind) {
    throw ContractViolation("trajectory does not match the transcription");
  }
  Eigen::VectorXd z = Eigen::VectorXd::Zero(num_vars_);
  StateVector prev = data_.initial_state.values;
  for (int k = 1; k <= K_; ++k) {
    StateVector x = traj.knots[k].values;
    for (int i = 0; i < n_; ++i) {
      if (idx::is_angle(data_.params.kind, i)) x[i] = prev[i] + angle_diff(x[i], prev[i]);
    }
    z.segment(x_index(k), n_) = x;
    prev = x;
  }
  const double h = traj.duration / K_;
  const int ia = idx::alpha(data_.params.kind);
  const int iw = idx::omega(data_.params.kind);
  for (int k = 0; k < K_; ++k) {
    z[u_index(k)] = traj.controls[k];
    const StateVector xk = knot(z, k);
    z[s_index(k)] = xk[ia] + xk[iw] * h / 2.0;
  }
  z[t_index()] = traj.duration;
  return z;
}

Eigen::VectorXd MultipleShootingProblem::initial_guess() const {
  const auto& p = data_.params;
  const VehicleKind kind = p.kind;
  const auto& m = data_.manifold;
  const VehicleState& x0 = data_.initial_state;
  const double vs = data_.speed > 0.0 ? 1.0 : -1.0;
  const double L = effective_wheelbase(p);

  const double psi0 = x0.heading();
  const double psi3 = m.fixed_value(idx::kHeading).value_or(psi0);
  const Eigen::Vector2d p0(x0.x(), x0.y());
  const Eigen::Vector2d e0(std::cos(psi0), std::sin(psi0));
  const Eigen::Vector2d e3(std::cos(psi3), std::sin(psi3));
  Eigen::Vector2d p3;
  if (m.position_fixed()) {
    p3 = Eigen::Vector2d(*m.fixed_value(idx::kX), *m.fixed_value(idx::kY));
  } else if (!m.linear.empty()) {
    const auto& lc = m.linear.front();
    const Eigen::Vector2d a(lc.a_x, lc.a_y);
    const Eigen::Vector2d foot = p0 + (lc.c - a.dot(p0)) / a.squaredNorm() * a;
    Eigen::Vector2d tangent(a.y(), -a.x());
    tangent.normalize();
    if (tangent.dot(vs * e0) < 0.0) tangent = -tangent;
    const double along = std::max(3.0 * std::abs(lc.c), 2.0 * L);
    p3 = foot + along * tangent;
  } else {
    const double dpsi = psi3 - psi0;
    if (std::abs(dpsi) < 1e-9) {
      p3 = p0 + vs * 2.0 * L * e0;
    } else {
      const double R = 1.5 * L / std::tan(p.alpha_max);
      const Eigen::Vector2d local(vs * R * std::sin(std::abs(dpsi)),
                                  vs * R * (dpsi > 0 ? 1.0 : -1.0) * (1.0 - std::cos(std::abs(dpsi))));
      const Eigen::Vector2d n0(-e0.y(), e0.x());
      p3 = p0 + local.x() * e0 + local.y() * n0;
    }
  }
  const double chord = (p3 - p0).norm();
  const double handle = chord > 1e-9 ? 0.4 * chord : L;
  const Eigen::Vector2d b0 = p0;
  const Eigen::Vector2d b1 = p0 + handle * vs * e0;
  const Eigen::Vector2d b2 = p3 - handle * vs * e3;
  const Eigen::Vector2d b3 = p3;
  auto bez = [&](double s) {
    const double t = 1.0 - s;
    return Eigen::Vector2d(t * t * t * b0 + 3 * t * t * s * b1 + 3 * t * s * s * b2 + s * s * s * b3);
  };
  auto bez_d = [&](double s) {
    const double t = 1.0 - s;
    return Eigen::Vector2d(3 * t * t * (b1 - b0) + 6 * t * s * (b2 - b1) + 3 * s * s * (b3 - b2));
  };
  auto bez_dd = [&](double s) {
    const double t = 1.0 - s;
    return Eigen::Vector2d(6 * t * (b2 - 2 * b1 + b0) + 6 * s * (b3 - 2 * b2 + b1));
  };

  // Arc-length table for uniform-speed sampling.
  const int fine = 40 * K_;
  std::vector<double> cum(fine + 1, 0.0);
  for (int i = 1; i <= fine; ++i) cum[i] = cum[i - 1] + (bez(double(i) / fine) - bez(double(i - 1) / fine)).norm();
  const double length = std::max(cum.back(), 1e-3);
  std::vector<double> params_at(K_ + 1, 0.0);
  for (int k = 0; k <= K_; ++k) {
    const double target = length * k / K_;
    const auto it = std::lower_bound(cum.begin(), cum.end(), target);
    const int i = std::clamp(static_cast<int>(it - cum.begin()), 1, fine);
    const double span = cum[i] - cum[i - 1];
    const double frac = span > 0 ? (target - cum[i - 1]) / span : 0.0;
    params_at[k] = (i - 1 + std::clamp(frac, 0.0, 1.0)) / fine;
  }

  const double T = std::clamp(length / std::abs(data_.speed), std::max(data_.t_min, 0.5), data_.t_max);
  const double h = T / K_;
  std::vector<StateVector> xs(K_ + 1, StateVector::Zero(n_));
  std::vector<double> alpha(K_ + 1, 0.0);
  double prev_psi = psi0;
  for (int k = 0; k <= K_; ++k) {
    const double s = params_at[k];
    const Eigen::Vector2d pt = bez(s);
    const Eigen::Vector2d d1 = bez_d(s);
    const Eigen::Vector2d d2 = bez_dd(s);
    double psi = prev_psi;
    double kappa = 0.0;
    if (d1.norm() > 1e-9) {
      const double phi = std::atan2(d1.y(), d1.x()) + (vs < 0 ? kPi : 0.0);
      psi = prev_psi + angle_diff(phi, prev_psi);
      kappa = (d1.x() * d2.y() - d1.y() * d2.x()) / std::pow(d1.norm(), 3);
    }
    prev_psi = psi;
    alpha[k] = std::clamp(std::atan(vs * kappa * L), -0.95 * p.alpha_max, 0.95 * p.alpha_max);
    StateVector& x = xs[k];
    x[idx::kX] = pt.x();
    x[idx::kY] = pt.y();
    x[idx::kHeading] = psi;
    if (kind == VehicleKind::TwoTrailer) {
      JointAngles eq;
      try {
        eq = equilibrium_configuration(alpha[k], p);
      } catch (const std::exception&) {
        eq = {};
      }
      x[idx::kBeta3] = std::clamp(eq.beta3, -data_.joint_angle_limit, data_.joint_angle_limit);
      x[idx::kBeta2] = std::clamp(eq.beta2, -data_.joint_angle_limit, data_.joint_angle_limit);
    }
  }
  const int ia = idx::alpha(kind);
  const int iw = idx::omega(kind);
  for (int k = 0; k <= K_; ++k) {
    const int lo = std::max(k - 1, 0);
    const int hi = std::min(k + 1, K_);
    xs[k][ia] = alpha[k];
    xs[k][iw] = std::clamp((alpha[hi] - alpha[lo]) / ((hi - lo) * h), -p.omega_max, p.omega_max);
  }
  xs[0] = x0.values;

  Eigen::VectorXd z(num_vars_);
  for (int k = 0; k < K_; ++k) {
    z[u_index(k)] = std::clamp((xs[k + 1][iw] - xs[k][iw]) / h, -p.u_alpha_max, p.u_alpha_max);
    z[s_index(k)] = xs[k][ia] + xs[k][iw] * h / 2.0;
    z.segment(x_index(k + 1), n_) = xs[k + 1];
  }
  z[t_index()] = T;
  return z.cwiseMax(lower_).cwiseMin(upper_);
}

}  // namespace mpgen
