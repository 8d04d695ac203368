#include "mpgen/alm.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <limits>

#include "mpgen/errors.hpp"

namespace mpgen::nlp {

double projected_gradient_norm(const Eigen::VectorXd& z, const Eigen::VectorXd& g, const Eigen::VectorXd& l,
                               const Eigen::VectorXd& u) {
  double m = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double p = std::clamp(z[i] - g[i], l[i], u[i]);
    m = std::max(m, std::abs(p - z[i]));
  }
  return m;
}

namespace {

enum class InnerExit { Stationary, Stalled, Budget, EvalFailed };

struct State {
  Eigen::VectorXd z;
  double f = 0.0;
  Eigen::VectorXd c;
  double phi = 0.0;
  double pg = std::numeric_limits<double>::infinity();
};

double merit(double f, const Eigen::VectorXd& c, const Eigen::VectorXd& lambda, double rho) {
  return f + lambda.dot(c) + 0.5 * rho * c.squaredNorm();
}

Eigen::VectorXd project(const Eigen::VectorXd& z, const Eigen::VectorXd& l, const Eigen::VectorXd& u) {
  return z.cwiseMax(l).cwiseMin(u);
}

class InnerSolver {
 public:
  InnerSolver(const Problem& p, const AlmOptions& o) : p_(p), o_(o), n_(p.num_variables()) {}

  InnerExit run(State& s, const Eigen::VectorXd& lambda, double rho, double tol, int& newton_count) {
    const Eigen::VectorXd& l = p_.lower();
    const Eigen::VectorXd& u = p_.upper();
    s.phi = merit(s.f, s.c, lambda, rho);
    Eigen::VectorXd grad_f(n_);
    SparseMatrix jac;
    std::vector<Triplet> hess;
    std::vector<char> active(n_);
    int idle = 0;
    while (true) {
      const Eigen::VectorXd yhat = lambda + rho * s.c;
      hess.clear();
      if (!p_.derivatives(s.z, yhat, grad_f, jac, hess)) return InnerExit::EvalFailed;
      const Eigen::VectorXd g = grad_f + jac.transpose() * yhat;
      s.pg = projected_gradient_norm(s.z, g, l, u);
      if (s.pg <= tol) return InnerExit::Stationary;
      if (newton_count >= o_.max_newton) return InnerExit::Budget;
      ++newton_count;

      for (int i = 0; i < n_; ++i) {
        const bool fixed = l[i] == u[i];
        const bool at_lower = s.z[i] <= l[i] && g[i] > 0.0;
        const bool at_upper = s.z[i] >= u[i] && g[i] < 0.0;
        active[i] = fixed || at_lower || at_upper;
      }

      const SparseMatrix jtj = (jac.transpose() * jac).eval();
      Eigen::VectorXd diag = Eigen::VectorXd::Zero(n_);
      std::vector<Triplet> trip;
      trip.reserve(hess.size() + static_cast<std::size_t>(jtj.nonZeros()) + n_);
      auto add = [&](int r, int c, double v) {
        if (r == c) diag[r] += v;
        if (active[r] || active[c]) return;
        if (r >= c) trip.emplace_back(r, c, v);
      };
      for (const auto& t : hess) add(static_cast<int>(t.row()), static_cast<int>(t.col()), t.value());
      for (int k = 0; k < jtj.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(jtj, k); it; ++it) {
          add(static_cast<int>(it.row()), static_cast<int>(it.col()), rho * it.value());
        }
      }
      for (int i = 0; i < n_; ++i) trip.emplace_back(i, i, active[i] ? 1.0 : 0.0);
      SparseMatrix h(n_, n_);
      h.setFromTriplets(trip.begin(), trip.end());

      Eigen::VectorXd rhs(n_);
      for (int i = 0; i < n_; ++i) rhs[i] = active[i] ? 0.0 : -g[i];
      Eigen::VectorXd d;
      if (!factor_and_solve(h, rhs, diag, d)) return InnerExit::Stalled;
      for (int i = 0; i < n_; ++i) {
        if (active[i]) d[i] = 0.0;
      }

      double alpha = 1.0;
      bool accepted = false;
      for (int ls = 0; ls < 50; ++ls) {
        Eigen::VectorXd zn = project(s.z + alpha * d, l, u);
        double fn = 0.0;
        Eigen::VectorXd cn;
        if (p_.evaluate(zn, fn, cn) && std::isfinite(fn) && cn.allFinite()) {
          const double phin = merit(fn, cn, lambda, rho);
          const double pred = g.dot(zn - s.z);
          if (phin <= s.phi + o_.armijo * pred + 1e-15 * std::abs(s.phi)) {
            const bool moved = (zn - s.z).lpNorm<Eigen::Infinity>() > 0.0;
            s.z = std::move(zn);
            s.f = fn;
            s.c = std::move(cn);
            const double old_phi = s.phi;
            s.phi = phin;
            accepted = moved || phin < old_phi;
            idle = old_phi - phin > 1e-14 * std::abs(old_phi) ? 0 : idle + 1;
            break;
          }
        }
        alpha *= 0.5;
      }
      if (!accepted || idle >= 5) return InnerExit::Stalled;
    }
  }

 private:
  bool factor_and_solve(const SparseMatrix& h, const Eigen::VectorXd& rhs, const Eigen::VectorXd& diag,
                        Eigen::VectorXd& d) {
    const double scale = std::max(1.0, diag.cwiseAbs().maxCoeff());
    double delta = shift_ > 0.0 ? shift_ / 4.0 : 0.0;
    if (delta < 1e-12 * scale) delta = 0.0;
    ldlt_.analyzePattern(h);
    for (int attempt = 0; attempt < 60; ++attempt) {
      ldlt_.setShift(delta);
      ldlt_.factorize(h);
      if (ldlt_.info() == Eigen::Success && ldlt_.vectorD().minCoeff() > 0.0) {
        d = ldlt_.solve(rhs);
        for (int refine = 0; refine < 2 && d.allFinite(); ++refine) {
          const Eigen::VectorXd r = rhs - h.selfadjointView<Eigen::Lower>() * d - delta * d;
          d += ldlt_.solve(r);
        }
        if (d.allFinite()) {
          shift_ = delta;
          return true;
        }
      }
      delta = delta == 0.0 ? 1e-8 * scale : delta * 8.0;
    }
    return false;
  }

  const Problem& p_;
  const AlmOptions& o_;
  int n_;
  Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower> ldlt_;
  double shift_ = 0.0;
};

}  // namespace

AlmResult solve_alm(const Problem& problem, Eigen::VectorXd z0, Eigen::VectorXd lambda0, const AlmOptions& options) {
  const int n = problem.num_variables();
  const int m = problem.num_constraints();
  if (z0.size() != n) throw ContractViolation("initial point has the wrong dimension");
  if (lambda0.size() == 0) lambda0 = Eigen::VectorXd::Zero(m);
  if (lambda0.size() != m) throw ContractViolation("initial multipliers have the wrong dimension");
  const Eigen::VectorXd& l = problem.lower();
  const Eigen::VectorXd& u = problem.upper();
  if ((l.array() > u.array()).any()) throw ContractViolation("lower bound above upper bound");

  AlmResult res;
  State s;
  s.z = project(z0, l, u);
  if (!problem.evaluate(s.z, s.f, s.c) || !std::isfinite(s.f) || !s.c.allFinite()) {
    res.status = AlmStatus::EvaluationFailed;
    res.z = s.z;
    res.y = lambda0;
    return res;
  }

  Eigen::VectorXd lambda = lambda0;
  double rho = options.rho_init;
  double eta = 1.0 / std::pow(rho, 0.1);
  double omega = std::max(1.0 / rho, options.opt_tol);
  InnerSolver inner(problem, options);
  std::vector<double> violation_at_increase;
  int stalls = 0;

  auto finish = [&](AlmStatus status) {
    res.status = status;
    res.z = s.z;
    res.y = lambda + rho * s.c;
    res.objective = s.f;
    res.violation = m > 0 ? s.c.lpNorm<Eigen::Infinity>() : 0.0;
    res.kkt_residual = s.pg;
    res.rho = rho;
    return res;
  };

  for (int outer = 0; outer < options.max_outer; ++outer) {
    res.outer_iterations = outer + 1;
    const InnerExit exit = inner.run(s, lambda, rho, omega, res.newton_iterations);
    if (exit == InnerExit::EvalFailed) return finish(AlmStatus::EvaluationFailed);
    const double v = m > 0 ? s.c.lpNorm<Eigen::Infinity>() : 0.0;
    if (v <= options.feas_tol && s.pg <= options.opt_tol) return finish(AlmStatus::Converged);
    if (exit == InnerExit::Stalled && v <= options.feas_tol && s.pg <= options.stall_opt_tol) {
      return finish(AlmStatus::Converged);
    }
    if (exit == InnerExit::Budget) {
      return finish(v > options.infeasible_threshold ? AlmStatus::Infeasible : AlmStatus::BudgetExhausted);
    }
    if (exit == InnerExit::Stalled) {
      if (++stalls > 5) {
        return finish(v > options.infeasible_threshold ? AlmStatus::Infeasible : AlmStatus::BudgetExhausted);
      }
    } else {
      stalls = 0;
    }

    if (v <= std::max(eta, options.feas_tol)) {
      lambda += rho * s.c;
      eta = std::max(eta / std::pow(rho, 0.9), options.feas_tol);
      omega = std::max(omega / rho, options.opt_tol);
    } else {
      violation_at_increase.push_back(v);
      const std::size_t h = violation_at_increase.size();
      const bool stagnant = h >= 3 && v > 0.5 * violation_at_increase[h - 3];
      if (v > options.infeasible_threshold && (rho >= options.rho_max || (stagnant && rho >= 1e3))) {
        return finish(AlmStatus::Infeasible);
      }
      if (rho >= options.rho_max) return finish(AlmStatus::BudgetExhausted);
      rho = std::min(rho * 10.0, options.rho_max);
      eta = std::max(1.0 / std::pow(rho, 0.1), options.feas_tol);
      omega = std::max(1.0 / rho, options.opt_tol);
    }
  }
  const double v = m > 0 ? s.c.lpNorm<Eigen::Infinity>() : 0.0;
  return finish(v > options.infeasible_threshold ? AlmStatus::Infeasible : AlmStatus::BudgetExhausted);
}

}  // namespace mpgen::nlp
