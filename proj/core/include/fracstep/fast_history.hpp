#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fracstep/series.hpp"
#include "fracstep/stepper.hpp"

namespace fracstep {

// Truncated-trapezoid exponential-sum representation of the tail quadrature
// weights: omega~_n = tau^{1+alpha} sum_l varpi_l (1 + tau e^{lambda_l})^{-1-n},
// valid for lags n >= n0.
struct ExpSumApprox {
  double eps = 0.0;  // build precision target
  int n0 = 0;        // lags below n0 use exact weights
  int Q = 0;
  double x_min = 0.0, x_max = 0.0, dx = 0.0;
  double alpha = 0.0, tau = 0.0;
  int n_T = 0;
  std::vector<double> nodes;    // lambda_l
  std::vector<double> weights;  // varpi_l = dx * phi(lambda_l)
  std::vector<double> decay;    // 1 / (1 + tau e^{lambda_l})
};

// Integrand kernel phi(x) = -sin(alpha pi)/pi * e^{(1+alpha)x} / b(1 + tau e^x),
// the branch-cut spectral density of the weight series: 1/b(1+s) is the
// analytic continuation omega(1+s)/(-s)^alpha, evaluated by closed form. It
// vanishes identically at alpha = 1 and is cut off beyond the secondary
// branch point s_c (2/(1-2 theta) for the two-step families); the builder
// keeps its nodes below that point and the exact window absorbs the rest.
// The CN variants define no omega series and are rejected.
double phi(const GeneratingFunction& gf, double x, double tau);

// Location of the secondary branch point of 1/b(1+s) on the positive s axis
// (infinity when the continuation is entire).
double phi_branch_point(const GeneratingFunction& gf);

// Builds the node/weight tables from the precision-driven x-range formulas;
// Q is doubled from 64 until the weight fidelity check passes (cap 4096).
// Throws std::runtime_error with the achieved accuracy if the cap is hit.
ExpSumApprox build_exp_sum(const GeneratingFunction& gf, double tau, int n_T, int n0,
                           double eps);

// Build precision backing a trajectory deviation target: tau^alpha *
// eps_target per the fast-convergence premise, floored at what double
// precision can certify over n_T lags.
double default_build_eps(double tau, double alpha, int n_T, double eps_target);

// omega~_n for n >= n0 (exact weights are used below n0).
double approx_weight(const ExpSumApprox& approx, int n);

struct WeightFidelityReport {
  double max_rel_dev = 0.0;  // max |omega~_n - omega_n| / |omega_n| over [n0, n_T]
  int worst_n = 0;
  double eps = 0.0;
  bool pass = false;  // max_rel_dev <= 10 eps
};

WeightFidelityReport validate(const ExpSumApprox& approx, const CoeffSeries& omega_exact);

// Per-node accumulators y_l with the one-step recurrence
//   y_l <- (y_l + tau d) / (1 + tau e^{lambda_l}),
// where d = u^k - u^0 is the sample leaving the exact window. After k pushes,
//   tail_sum = sum_l varpi_l (1+tau e^{lambda_l})^{-n0} y_l
//            = tau^{-alpha} sum_{j=1}^{k} omega~_{n-j} (u^j - u^0),  n = k + n0.
class FastHistoryState {
 public:
  FastHistoryState(const ExpSumApprox& approx, int dof);

  int index() const { return k_; }
  void push(std::span<const double> u, std::span<const double> u0);
  void push_diff(std::span<const double> diff);
  void tail_sum(std::span<double> out) const;
  std::span<const double> node(int l) const;
  std::uint64_t size_doubles() const { return y_.size(); }

 private:
  const ExpSumApprox* a_;
  int dof_;
  int k_ = 0;
  std::vector<double> y_;      // Q x dof
  std::vector<double> coeff_;  // varpi_l (1 + tau e^{lambda_l})^{-n0}
};

// Fast scheme: exact weights inside the n0-window, exponential-sum recurrence
// beyond; O(Q n_T dof) history work, O((Q + n0) dof) history memory. The
// prefix n < n0 is computed by the direct method. eps_target is the allowed
// trajectory deviation from the direct run; the weight build targets
// tau^alpha * eps_target.
Trajectory run_fast(const ProblemSpec& problem, const SchemeConfig& scheme, double eps_target,
                    std::span<const int> snapshots);
Trajectory run_fast(const ProblemSpec& problem, const SchemeConfig& scheme,
                    const ExpSumApprox& approx, std::span<const int> snapshots);

}  // namespace fracstep
