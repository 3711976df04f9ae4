#include "fracstep/fast_history.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <limits>
#include <cmath>
#include <stdexcept>

#include "step_core.hpp"

namespace fracstep {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double phi_branch_point(const GeneratingFunction& gf) {
  switch (gf.family) {
    case Family::FBDF2:
      return 2.0;
    case Family::BNTheta:
      return gf.theta < 0.5 ? 2.0 / (1.0 - 2.0 * gf.theta)
                            : std::numeric_limits<double>::infinity();
    default:
      return std::numeric_limits<double>::infinity();
  }
}

double phi(const GeneratingFunction& gf, double x, double tau) {
  gf.validate();
  if (!gf.has_omega())
    throw std::invalid_argument(family_name(gf.family) +
                                " defines b(z) only; its weights have no integral kernel");
  const double a = gf.alpha;
  const double s = tau * std::exp(x);
  if (s >= phi_branch_point(gf)) return 0.0;
  double b_inv;  // 1/b(1+s) = omega(1+s)/(-s)^alpha, continued across the cut
  switch (gf.family) {
    case Family::FBDF1:
      b_inv = 1.0;
      break;
    case Family::FBDF2:
      b_inv = std::pow(1.0 - s / 2.0, a);
      break;
    case Family::GNGF2:
      b_inv = 1.0 - a * s / 2.0;
      break;
    case Family::BNTheta: {
      const double th = gf.theta;
      b_inv = std::pow(1.0 - s * (0.5 - th), a) * (1.0 - th * a * s);
      break;
    }
    default:
      b_inv = 0.0;
      break;
  }
  return -std::sin(a * kPi) / kPi * std::exp((1.0 + a) * x) * b_inv;
}

namespace {

void fill_tables(ExpSumApprox& a, const GeneratingFunction& gf) {
  a.dx = (a.x_max - a.x_min) / a.Q;
  a.nodes.resize(static_cast<std::size_t>(a.Q));
  a.weights.resize(static_cast<std::size_t>(a.Q));
  a.decay.resize(static_cast<std::size_t>(a.Q));
  for (int l = 0; l < a.Q; ++l) {
    const double lam = a.x_min + l * a.dx;
    a.nodes[static_cast<std::size_t>(l)] = lam;
    a.weights[static_cast<std::size_t>(l)] = a.dx * phi(gf, lam, a.tau);
    a.decay[static_cast<std::size_t>(l)] = 1.0 / (1.0 + a.tau * std::exp(lam));
  }
}

}  // namespace

ExpSumApprox build_exp_sum(const GeneratingFunction& gf, double tau, int n_T, int n0,
                           double eps) {
  gf.validate();
  if (!gf.has_omega())
    throw std::invalid_argument("fast history needs an omega^(alpha) family");
  if (gf.alpha >= 1.0)
    throw std::invalid_argument("alpha = 1 is degenerate for the exponential sum (phi == 0)");
  if (!(eps >= 1e-14 && eps <= 1e-4))
    throw std::invalid_argument("build_exp_sum: eps must lie in [1e-14, 1e-4]");
  if (n0 < 2 || n0 >= n_T) throw std::invalid_argument("build_exp_sum: need 2 <= n0 < n_T");
  if (!(tau > 0.0)) throw std::invalid_argument("build_exp_sum: tau must be positive");

  ExpSumApprox a;
  a.eps = eps;
  a.alpha = gf.alpha;
  a.tau = tau;
  a.n_T = n_T;

  // a finite secondary branch point caps the node range; widen the exact
  // window until the truncated piece beyond it is below the target
  a.n0 = n0;
  const double s_c = phi_branch_point(gf);
  double s_limit = std::numeric_limits<double>::infinity();
  if (std::isfinite(s_c)) {
    s_limit = 0.995 * s_c;
    const int n0_branch =
        static_cast<int>(std::ceil(-std::log(0.01 * eps) / std::log1p(s_limit))) + 2;
    a.n0 = std::max(a.n0, n0_branch);
    if (a.n0 >= n_T)
      throw std::invalid_argument("build_exp_sum: n_T too short for the branch-safe window");
  }

  a.x_min = std::log(eps) / (1.0 + gf.alpha) - std::log(n_T * tau);
  const double arg =
      (-2.0 * std::log(eps) + 2.0 * (1.0 + gf.alpha) * std::log(a.n0 * tau)) / (a.n0 * tau);
  // the log argument can lose positivity for very small n0*tau; clamp and let
  // the fidelity check certify the window
  double x_max_base = arg > std::exp(a.x_min) ? std::log(arg) : a.x_min + 40.0;
  if (x_max_base <= a.x_min) x_max_base = a.x_min + 40.0;
  // the same corner starves the right tail before the argument goes negative:
  // the nodes must reach (n0+1) tau e^x ~ ln(1/eps) for the shortest lag
  x_max_base = std::max(x_max_base, std::log((-std::log(eps) + 10.0) / ((a.n0 + 1) * tau)));

  const CoeffSeries omega = omega_weights(gf, n_T);
  const int q_cap = std::min(4096, std::max(64, n_T / 4));
  // Q is kept minimal; the nominal x_max leaves an O(1) multiple of eps in
  // the shortest lag, so the window may be extended at fixed Q before the
  // node count doubles
  WeightFidelityReport rep;
  for (int q = 64; q <= q_cap; q *= 2) {
    a.Q = q;
    double prev_x_max = -std::numeric_limits<double>::infinity();
    for (double ext : {0.0, 0.5, 1.0, 1.5, 2.0}) {
      a.x_max = x_max_base + ext;
      if (std::isfinite(s_limit)) a.x_max = std::min(a.x_max, std::log(s_limit / tau));
      if (a.x_max <= prev_x_max) break;  // branch clamp is binding, wider helps nothing
      prev_x_max = a.x_max;
      fill_tables(a, gf);
      rep = validate(a, omega);
      if (rep.pass) return a;
    }
  }
  char msg[160];
  std::snprintf(msg, sizeof(msg),
                "exponential-sum build failed at Q cap %d: achieved max relative deviation "
                "%.3e for target %.3e",
                q_cap, rep.max_rel_dev, eps);
  throw std::runtime_error(msg);
}

double default_build_eps(double tau, double alpha, int n_T, double eps_target) {
  const double floor = std::max(4e-12, 2e-16 * static_cast<double>(n_T));
  return std::clamp(std::pow(tau, alpha) * eps_target, floor, 9.9e-5);
}

double approx_weight(const ExpSumApprox& a, int n) {
  if (n < a.n0)
    throw std::invalid_argument("approx_weight: exact weights are used for lags below n0");
  double s = 0.0;
  for (int l = 0; l < a.Q; ++l)
    s += a.weights[static_cast<std::size_t>(l)] *
         std::pow(a.decay[static_cast<std::size_t>(l)], n + 1);
  return std::pow(a.tau, 1.0 + a.alpha) * s;
}

WeightFidelityReport validate(const ExpSumApprox& a, const CoeffSeries& omega_exact) {
  if (omega_exact.max_index() < a.n_T)
    throw std::invalid_argument("validate: exact weights must reach n_T");
  WeightFidelityReport rep;
  rep.eps = a.eps;
  const double tau_pow = std::pow(a.tau, 1.0 + a.alpha);
  std::vector<double> p(static_cast<std::size_t>(a.Q));
  for (int l = 0; l < a.Q; ++l)
    p[static_cast<std::size_t>(l)] = std::pow(a.decay[static_cast<std::size_t>(l)], a.n0 + 1);
  for (int n = a.n0; n <= a.n_T; ++n) {
    double s = 0.0;
    for (int l = 0; l < a.Q; ++l) s += a.weights[static_cast<std::size_t>(l)] * p[static_cast<std::size_t>(l)];
    const double approx = tau_pow * s;
    const double exact = omega_exact[n];
    if (exact != 0.0) {
      const double dev = std::fabs(approx - exact) / std::fabs(exact);
      if (dev > rep.max_rel_dev) {
        rep.max_rel_dev = dev;
        rep.worst_n = n;
      }
    }
    for (int l = 0; l < a.Q; ++l) p[static_cast<std::size_t>(l)] *= a.decay[static_cast<std::size_t>(l)];
  }
  rep.pass = rep.max_rel_dev <= 10.0 * a.eps;
  return rep;
}

FastHistoryState::FastHistoryState(const ExpSumApprox& approx, int dof)
    : a_(&approx),
      dof_(dof),
      y_(static_cast<std::size_t>(approx.Q) * static_cast<std::size_t>(dof), 0.0),
      coeff_(static_cast<std::size_t>(approx.Q)) {
  for (int l = 0; l < approx.Q; ++l)
    coeff_[static_cast<std::size_t>(l)] =
        approx.weights[static_cast<std::size_t>(l)] *
        std::pow(approx.decay[static_cast<std::size_t>(l)], approx.n0);
}

void FastHistoryState::push_diff(std::span<const double> diff) {
  const double tau = a_->tau;
  for (int l = 0; l < a_->Q; ++l) {
    const double dec = a_->decay[static_cast<std::size_t>(l)];
    double* row = y_.data() + static_cast<std::size_t>(l) * static_cast<std::size_t>(dof_);
    for (int i = 0; i < dof_; ++i) row[i] = dec * (row[i] + tau * diff[static_cast<std::size_t>(i)]);
  }
  ++k_;
}

void FastHistoryState::push(std::span<const double> u, std::span<const double> u0) {
  std::vector<double> d(static_cast<std::size_t>(dof_));
  for (int i = 0; i < dof_; ++i)
    d[static_cast<std::size_t>(i)] = u[static_cast<std::size_t>(i)] - u0[static_cast<std::size_t>(i)];
  push_diff(d);
}

void FastHistoryState::tail_sum(std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  for (int l = 0; l < a_->Q; ++l) {
    const double c = coeff_[static_cast<std::size_t>(l)];
    const double* row = y_.data() + static_cast<std::size_t>(l) * static_cast<std::size_t>(dof_);
    for (int i = 0; i < dof_; ++i) out[static_cast<std::size_t>(i)] += c * row[i];
  }
}

std::span<const double> FastHistoryState::node(int l) const {
  return {y_.data() + static_cast<std::size_t>(l) * static_cast<std::size_t>(dof_),
          static_cast<std::size_t>(dof_)};
}

Trajectory run_fast(const ProblemSpec& problem, const SchemeConfig& scheme, double eps_target,
                    std::span<const int> snapshots) {
  scheme.validate(problem.T);
  const int n0 = std::max(scheme.corr.m() + 2, 16);
  // fast-convergence premise: weight deviation below tau^alpha * budget
  const double eps_build =
      default_build_eps(scheme.tau, scheme.gf.alpha, scheme.n_T, eps_target);
  const ExpSumApprox approx =
      build_exp_sum(scheme.gf, scheme.tau, scheme.n_T, n0, eps_build);
  return run_fast(problem, scheme, approx, snapshots);
}

Trajectory run_fast(const ProblemSpec& problem, const SchemeConfig& scheme,
                    const ExpSumApprox& approx, std::span<const int> snapshots) {
  scheme.validate(problem.T);
  const SpatialOperator& op = *problem.op;
  const std::size_t dof = static_cast<std::size_t>(op.dof());
  if (problem.u0.size() != dof) throw std::invalid_argument("u0 size does not match operator");
  const int m = scheme.corr.m();
  const int n0 = approx.n0;
  if (n0 <= m + 1) throw std::invalid_argument("run_fast needs n0 > m+1");
  if (n0 >= scheme.n_T)
    throw std::invalid_argument("run_fast needs n0 < n_T; use the direct method");
  if (approx.n_T < scheme.n_T || std::fabs(approx.tau - scheme.tau) > 1e-15 * scheme.tau)
    throw std::invalid_argument("exponential-sum tables do not match the scheme grid");

  const PreparedScheme prep = PreparedScheme::build(scheme);
  const int n_T = prep.n_T;
  const double tau_ma = std::pow(prep.tau, -prep.gf.alpha);
  const double gamma_imp = tau_ma * prep.omega[0];

  Trajectory out;
  out.tau = prep.tau;
  out.n_T = n_T;
  out.iterations.assign(static_cast<std::size_t>(n_T) + 1, 0);
  std::vector<int> want(snapshots.begin(), snapshots.end());
  std::sort(want.begin(), want.end());
  want.erase(std::unique(want.begin(), want.end()), want.end());
  auto record = [&](int n, const std::vector<double>& u) {
    if (std::binary_search(want.begin(), want.end(), n)) {
      out.snapshot_index.push_back(n);
      out.snapshots.push_back(u);
    }
  };

  const auto t0 = std::chrono::steady_clock::now();

  // direct prefix u^0..u^{n0-1}
  std::vector<std::vector<double>> u(static_cast<std::size_t>(n0));
  u[0] = problem.u0;
  record(0, u[0]);
  int first = 1;
  if (m == 1) {
    int iters = 0;
    u[1] = m1_first_step(problem, prep, &iters);
    out.iterations[1] = iters;
    record(1, u[1]);
    first = 2;
  } else if (m >= 2) {
    const auto starts = scheme.startup == StartupMode::GivenValues
                            ? scheme.start_values
                            : bootstrap_start(problem, scheme);
    if (static_cast<int>(starts.size()) != m)
      throw std::invalid_argument("startup values must cover u^1..u^m");
    for (int j = 1; j <= m; ++j) {
      if (starts[static_cast<std::size_t>(j - 1)].size() != dof)
        throw std::invalid_argument("startup value size mismatch");
      u[static_cast<std::size_t>(j)] = starts[static_cast<std::size_t>(j - 1)];
      record(j, u[static_cast<std::size_t>(j)]);
    }
    first = m + 1;
  }
  for (int n = first; n < n0; ++n) {
    int iters = 0;
    u[static_cast<std::size_t>(n)] = implicit_step(problem, prep, u, n, &iters);
    out.iterations[static_cast<std::size_t>(n)] = iters;
    record(n, u[static_cast<std::size_t>(n)]);
    out.history_madds += static_cast<std::uint64_t>(n - 1 + m) * dof;
  }

  // ring of the last n0 differences + the m correction differences
  std::vector<double> ring(static_cast<std::size_t>(n0) * dof, 0.0);
  auto ringrow = [&](int j) {
    return std::span<double>(ring.data() + static_cast<std::size_t>(j % n0) * dof, dof);
  };
  std::vector<std::vector<double>> corr_diff(static_cast<std::size_t>(m));
  for (int j = 1; j < n0; ++j) {
    auto row = ringrow(j);
    for (std::size_t i = 0; i < dof; ++i)
      row[i] = u[static_cast<std::size_t>(j)][i] - problem.u0[i];
  }
  for (int j = 1; j <= m; ++j) {
    corr_diff[static_cast<std::size_t>(j - 1)].resize(dof);
    for (std::size_t i = 0; i < dof; ++i)
      corr_diff[static_cast<std::size_t>(j - 1)][i] =
          u[static_cast<std::size_t>(j)][i] - problem.u0[i];
  }
  detail::Field cur = u[static_cast<std::size_t>(n0 - 1)];
  std::vector<std::vector<double>>().swap(u);  // history state is ring + accumulators only

  FastHistoryState state(approx, static_cast<int>(dof));
  detail::Field hist(dof), tail(dof);
  out.step_madds_min = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t q_dof = static_cast<std::uint64_t>(approx.Q) * dof;

  for (int n = n0; n <= n_T; ++n) {
    std::uint64_t madds = 0;
    if (n - n0 >= 1) {
      state.push_diff(ringrow(n - n0));
      madds += q_dof;
    }
    std::fill(hist.begin(), hist.end(), 0.0);
    for (int lag = 1; lag < n0; ++lag) {
      const int j = n - lag;
      if (j < 1) break;
      detail::axpy(hist, prep.omega[lag], ringrow(j));
      madds += dof;
    }
    for (int j = 1; j <= m; ++j) {
      detail::axpy(hist, prep.weights.at(n, j), corr_diff[static_cast<std::size_t>(j - 1)]);
      madds += dof;
    }
    for (double& v : hist) v *= tau_ma;
    state.tail_sum(tail);  // already carries tau^{-alpha}
    madds += q_dof;
    for (std::size_t i = 0; i < dof; ++i) hist[i] += tail[i];

    out.iterations[static_cast<std::size_t>(n)] =
        detail::solve_implicit_step(problem, prep.solver, gamma_imp, hist, cur, n);

    auto row = ringrow(n);
    for (std::size_t i = 0; i < dof; ++i) row[i] = cur[i] - problem.u0[i];
    record(n, cur);
    out.history_madds += madds;
    if (n > n0) {  // steady state: the first fast step has no state injection
      out.step_madds_min = std::min(out.step_madds_min, madds);
      out.step_madds_max = std::max(out.step_madds_max, madds);
    }
  }
  if (out.step_madds_min == std::numeric_limits<std::uint64_t>::max()) out.step_madds_min = 0;
  out.history_peak_doubles =
      (static_cast<std::uint64_t>(approx.Q) + static_cast<std::uint64_t>(n0) +
       static_cast<std::uint64_t>(m)) *
      dof;
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace fracstep
