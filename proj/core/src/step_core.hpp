#pragma once

// Internal one-step solvers shared by the direct, semi-implicit and fast
// drivers. Not installed.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "fracstep/errors.hpp"
#include "fracstep/stepper.hpp"

namespace fracstep::detail {

using Field = std::vector<double>;

inline void axpy(std::span<double> y, double a, std::span<const double> x) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

// Solves gamma_eff (u - u0) + hist = L u + f(u); hist carries tau^{-alpha}
// already. u enters as the initial guess and leaves as the solution.
// Returns the iteration count.
inline int solve_implicit_step(const ProblemSpec& problem, const SolverSettings& s,
                               double gamma_eff, std::span<const double> hist, Field& u,
                               int n) {
  const SpatialOperator& op = *problem.op;
  const std::size_t dof = static_cast<std::size_t>(op.dof());

  Field base(dof);
  for (std::size_t i = 0; i < dof; ++i) base[i] = gamma_eff * problem.u0[i] - hist[i];

  if (!problem.f) {
    op.solve_shifted(gamma_eff, 1.0, base, u);
    return 1;
  }

  SolverMode mode = s.mode;
  if (mode == SolverMode::Auto)
    mode = (op.supports_pointwise_jacobian() && problem.f_prime) ? SolverMode::Newton
                                                                 : SolverMode::FixedPoint;
  const double scale = std::max(1.0, gamma_eff * op.l2_norm(problem.u0));
  double prev_res = std::numeric_limits<double>::infinity();
  int growing = 0;

  if (mode == SolverMode::FixedPoint) {
    Field fu(dof), fu_new(dof), rhs(dof), diff(dof);
    op.apply_pointwise(problem.f, u, fu);
    for (int k = 1; k <= s.max_iter; ++k) {
      for (std::size_t i = 0; i < dof; ++i) rhs[i] = base[i] + fu[i];
      op.solve_shifted(gamma_eff, 1.0, rhs, u);
      op.apply_pointwise(problem.f, u, fu_new);
      // the new iterate solves the step with f frozen at the old one, so its
      // residual is exactly f(u_new) - f(u_old)
      for (std::size_t i = 0; i < dof; ++i) diff[i] = fu_new[i] - fu[i];
      const double res = op.l2_norm(diff);
      fu.swap(fu_new);
      if (res <= s.tol * scale) return k;
      growing = res >= prev_res ? growing + 1 : 0;
      if (growing >= 5) throw SolverError(n, res, "fixed-point iteration diverging");
      prev_res = res;
    }
    throw SolverError(n, prev_res, "fixed-point solver did not converge");
  }

  if (!problem.f_prime || !op.supports_pointwise_jacobian())
    throw std::invalid_argument("Newton mode needs f' and a pointwise Jacobian operator");
  Field r(dof), lu(dof), fu(dof), d(dof), delta(dof);
  for (int k = 0; k <= s.max_iter; ++k) {
    op.apply(u, lu);
    op.apply_pointwise(problem.f, u, fu);
    for (std::size_t i = 0; i < dof; ++i)
      r[i] = gamma_eff * (u[i] - problem.u0[i]) + hist[i] - lu[i] - fu[i];
    const double res = op.l2_norm(r);
    if (res <= s.tol * scale) return k;
    growing = res >= prev_res ? growing + 1 : 0;
    if (growing >= 5) throw SolverError(n, res, "Newton iteration diverging");
    prev_res = res;
    op.apply_pointwise(problem.f_prime, u, d);
    op.solve_jacobian(gamma_eff, d, r, delta);
    for (std::size_t i = 0; i < dof; ++i) u[i] -= delta[i];
  }
  throw SolverError(n, prev_res, "Newton solver did not converge");
}

// Linear step: gamma_eff (u - u0) + hist = L u + fext.
inline void solve_linear_step(const ProblemSpec& problem, double gamma_eff,
                              std::span<const double> hist, std::span<const double> fext,
                              Field& u) {
  const SpatialOperator& op = *problem.op;
  const std::size_t dof = static_cast<std::size_t>(op.dof());
  Field rhs(dof);
  for (std::size_t i = 0; i < dof; ++i)
    rhs[i] = gamma_eff * problem.u0[i] - hist[i] + (fext.empty() ? 0.0 : fext[i]);
  op.solve_shifted(gamma_eff, 1.0, rhs, u);
}

}  // namespace fracstep::detail
