#include "fracstep/stepper.hpp"

#include <chrono>
#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>

#include "step_core.hpp"

namespace fracstep {

// defined in fast_history.cpp; used for long bootstrap prefixes
Trajectory run_fast(const ProblemSpec& problem, const SchemeConfig& scheme, double eps_target,
                    std::span<const int> snapshots);

void SchemeConfig::validate(double T) const {
  gf.validate();
  corr.validate();
  if (!(tau > 0.0) || !std::isfinite(tau)) throw std::invalid_argument("tau must be positive");
  if (n_T < 1) throw std::invalid_argument("n_T must be >= 1");
  if (std::fabs(n_T * tau - T) > 1e-9 * std::max(1.0, std::fabs(T)))
    throw std::invalid_argument("n_T * tau must equal the final time T");
  if (startup == StartupMode::GivenValues &&
      static_cast<int>(start_values.size()) != corr.m())
    throw std::invalid_argument("given startup values must cover u^1..u^m");
}

PreparedScheme PreparedScheme::build(const SchemeConfig& scheme) {
  PreparedScheme p;
  p.gf = scheme.gf;
  p.gf.validate();
  p.corr = scheme.corr;
  p.corr.validate();
  p.tau = scheme.tau;
  p.n_T = scheme.n_T;
  p.solver = scheme.solver;
  p.omega = omega_weights(scheme.gf, scheme.n_T);
  if (scheme.corr.m() > 0) {
    p.weights = starting_weights(p.omega, scheme.gf.alpha, scheme.corr, scheme.n_T);
    p.gamma1 = gamma_ratio(scheme.corr.sigmas.front(), scheme.gf.alpha);
  } else {
    p.weights.n_max = scheme.n_T;
  }
  return p;
}

bool Trajectory::has(int n) const {
  for (int s : snapshot_index)
    if (s == n) return true;
  return false;
}

const std::vector<double>& Trajectory::at(int n) const {
  for (std::size_t i = 0; i < snapshot_index.size(); ++i)
    if (snapshot_index[i] == n) return snapshots[i];
  throw std::out_of_range("no snapshot recorded at step " + std::to_string(n));
}

std::vector<double> caputo_apply(const PreparedScheme& prep,
                                 const std::vector<std::vector<double>>& u, int n) {
  const int m = prep.m();
  if (n < 1 || n > prep.n_T) throw std::invalid_argument("caputo_apply: n out of range");
  if (n <= m)
    throw std::invalid_argument("caputo_apply: n <= m is startup territory for this scheme");
  if (static_cast<int>(u.size()) < n + 1)
    throw std::invalid_argument("caputo_apply: need samples u^0..u^n");
  const std::size_t dof = u[0].size();
  std::vector<double> acc(dof, 0.0);
  for (int j = 1; j <= n; ++j) {
    const double c = prep.omega[n - j];
    for (std::size_t i = 0; i < dof; ++i)
      acc[i] += c * (u[static_cast<std::size_t>(j)][i] - u[0][i]);
  }
  for (int j = 1; j <= m; ++j) {
    const double c = prep.weights.at(n, j);
    for (std::size_t i = 0; i < dof; ++i)
      acc[i] += c * (u[static_cast<std::size_t>(j)][i] - u[0][i]);
  }
  const double tau_ma = std::pow(prep.tau, -prep.gf.alpha);
  for (double& v : acc) v *= tau_ma;
  return acc;
}

std::vector<double> implicit_step(const ProblemSpec& problem, const PreparedScheme& prep,
                                  const std::vector<std::vector<double>>& u, int n,
                                  int* iterations) {
  const int m = prep.m();
  if (n < m + 1) throw std::invalid_argument("implicit_step: n must be >= m+1");
  if (static_cast<int>(u.size()) < n)
    throw std::invalid_argument("implicit_step: need samples u^0..u^{n-1}");
  const std::size_t dof = u[0].size();
  const double tau_ma = std::pow(prep.tau, -prep.gf.alpha);

  std::vector<double> hist(dof, 0.0);
  for (int j = 1; j <= n - 1; ++j) {
    const double c = prep.omega[n - j];
    for (std::size_t i = 0; i < dof; ++i)
      hist[i] += c * (u[static_cast<std::size_t>(j)][i] - u[0][i]);
  }
  for (int j = 1; j <= m; ++j) {
    const double c = prep.weights.at(n, j);
    for (std::size_t i = 0; i < dof; ++i)
      hist[i] += c * (u[static_cast<std::size_t>(j)][i] - u[0][i]);
  }
  for (double& v : hist) v *= tau_ma;

  detail::Field out = u[static_cast<std::size_t>(n - 1)];
  const int iters =
      detail::solve_implicit_step(problem, prep.solver, tau_ma * prep.omega[0], hist, out, n);
  if (iterations) *iterations = iters;
  return out;
}

std::vector<double> m1_first_step(const ProblemSpec& problem, const PreparedScheme& prep,
                                  int* iterations) {
  if (prep.m() != 1) throw std::invalid_argument("m1_first_step requires exactly one correction");
  const std::size_t dof = problem.u0.size();
  const double tau_ma = std::pow(prep.tau, -prep.gf.alpha);
  std::vector<double> hist(dof, 0.0);
  detail::Field out = problem.u0;
  const int iters =
      detail::solve_implicit_step(problem, prep.solver, tau_ma * prep.gamma1, hist, out, 1);
  if (iterations) *iterations = iters;
  return out;
}

double bootstrap_fine_tau(double tau) {
  const long long r = 10LL * static_cast<long long>(std::ceil(1.0 / tau - 1e-12));
  return tau / static_cast<double>(r);
}

std::vector<std::vector<double>> bootstrap_start(const ProblemSpec& problem,
                                                 const SchemeConfig& scheme) {
  const int m = scheme.corr.m();
  if (m < 1) throw std::invalid_argument("bootstrap_start requires m >= 1");
  const double tau = scheme.tau;
  const long long r = 10LL * static_cast<long long>(std::ceil(1.0 / tau - 1e-12));
  if (static_cast<long long>(m) * r > (1LL << 30))
    throw std::invalid_argument("bootstrap grid too fine");

  SchemeConfig fine;
  fine.gf = scheme.gf;
  fine.corr.sigmas = {scheme.gf.alpha};
  fine.tau = tau / static_cast<double>(r);
  fine.n_T = static_cast<int>(m * r);
  fine.solver = scheme.solver;

  ProblemSpec fine_problem = problem;
  fine_problem.T = m * tau;

  std::vector<int> snaps(static_cast<std::size_t>(m));
  for (int j = 1; j <= m; ++j) snaps[static_cast<std::size_t>(j - 1)] = static_cast<int>(j * r);

  // the fine run has its own long history; compress it once it gets expensive
  const double dense_cost = 0.5 * static_cast<double>(fine.n_T) * fine.n_T *
                            static_cast<double>(problem.u0.size());
  const bool use_fast =
      scheme.gf.alpha < 1.0 && fine.n_T > 256 && (fine.n_T > 8192 || dense_cost > 5e8);
  const Trajectory t = use_fast ? run_fast(fine_problem, fine, 1e-10, snaps)
                                : run_direct(fine_problem, fine, snaps);

  std::vector<std::vector<double>> out;
  out.reserve(static_cast<std::size_t>(m));
  for (int j = 1; j <= m; ++j) out.push_back(t.at(static_cast<int>(j * r)));
  return out;
}

namespace {

// Shared dense-history driver; semi_order = 0 is the fully implicit scheme.
Trajectory run_dense(const ProblemSpec& problem, const SchemeConfig& scheme,
                     std::span<const int> snapshots, int semi_order) {
  scheme.validate(problem.T);
  const SpatialOperator& op = *problem.op;
  const std::size_t dof = static_cast<std::size_t>(op.dof());
  if (problem.u0.size() != dof) throw std::invalid_argument("u0 size does not match operator");
  const PreparedScheme prep = PreparedScheme::build(scheme);
  const int m = prep.m(), n_T = prep.n_T;
  const double tau_ma = std::pow(prep.tau, -prep.gf.alpha);
  const double gamma_imp = tau_ma * prep.omega[0];

  Trajectory out;
  out.tau = prep.tau;
  out.n_T = n_T;
  out.iterations.assign(static_cast<std::size_t>(n_T) + 1, 0);
  std::vector<int> want(snapshots.begin(), snapshots.end());
  std::sort(want.begin(), want.end());
  want.erase(std::unique(want.begin(), want.end()), want.end());

  // dense difference storage d^j = u^j - u^0
  std::vector<double> d(static_cast<std::size_t>(n_T + 1) * dof, 0.0);
  auto drow = [&](int j) {
    return std::span<double>(d.data() + static_cast<std::size_t>(j) * dof, dof);
  };
  auto record = [&](int n, const detail::Field& u) {
    if (std::binary_search(want.begin(), want.end(), n)) {
      out.snapshot_index.push_back(n);
      out.snapshots.push_back(u);
    }
  };
  auto value_of = [&](int j) {
    detail::Field u(dof);
    auto row = drow(j);
    for (std::size_t i = 0; i < dof; ++i) u[i] = problem.u0[i] + row[i];
    return u;
  };

  const auto t0 = std::chrono::steady_clock::now();
  record(0, problem.u0);

  detail::Field u = problem.u0;
  detail::Field fext;
  int first = 1;
  if (m == 1) {
    // coupled first step of the one-correction scheme
    if (semi_order == 0) {
      int iters = 0;
      u = m1_first_step(problem, prep, &iters);
      out.iterations[1] = iters;
    } else {
      if (problem.f) {
        fext.resize(dof);
        op.apply_pointwise(problem.f, problem.u0, fext);
      }
      detail::solve_linear_step(problem, tau_ma * prep.gamma1, detail::Field(dof, 0.0), fext, u);
      out.iterations[1] = 1;
    }
    auto row = drow(1);
    for (std::size_t i = 0; i < dof; ++i) row[i] = u[i] - problem.u0[i];
    record(1, u);
    first = 2;
  } else if (m >= 2) {
    const auto starts = scheme.startup == StartupMode::GivenValues
                            ? scheme.start_values
                            : bootstrap_start(problem, scheme);
    if (static_cast<int>(starts.size()) != m)
      throw std::invalid_argument("startup values must cover u^1..u^m");
    for (int j = 1; j <= m; ++j) {
      const auto& uj = starts[static_cast<std::size_t>(j - 1)];
      if (uj.size() != dof) throw std::invalid_argument("startup value size mismatch");
      auto row = drow(j);
      for (std::size_t i = 0; i < dof; ++i) row[i] = uj[i] - problem.u0[i];
      record(j, uj);
    }
    first = m + 1;
  }

  detail::Field hist(dof);
  out.step_madds_min = std::numeric_limits<std::uint64_t>::max();
  for (int n = first; n <= n_T; ++n) {
    std::fill(hist.begin(), hist.end(), 0.0);
    std::uint64_t madds = 0;
    for (int j = 1; j <= n - 1; ++j) {
      detail::axpy(hist, prep.omega[n - j], drow(j));
      madds += dof;
    }
    for (int j = 1; j <= m; ++j) {
      detail::axpy(hist, prep.weights.at(n, j), drow(j));
      madds += dof;
    }
    for (double& v : hist) v *= tau_ma;

    u = value_of(n - 1);
    if (semi_order == 0) {
      out.iterations[static_cast<std::size_t>(n)] =
          detail::solve_implicit_step(problem, prep.solver, gamma_imp, hist, u, n);
    } else {
      if (problem.f) {
        fext.resize(dof);
        op.apply_pointwise(problem.f, u, fext);  // u still holds u^{n-1}
        if (semi_order == 2 && n >= 2) {
          detail::Field f2(dof);
          const detail::Field um2 = value_of(n - 2);
          op.apply_pointwise(problem.f, um2, f2);
          for (std::size_t i = 0; i < dof; ++i) fext[i] = 2.0 * fext[i] - f2[i];
        }
      }
      detail::solve_linear_step(problem, gamma_imp, hist, fext, u);
      out.iterations[static_cast<std::size_t>(n)] = 1;
    }

    auto row = drow(n);
    for (std::size_t i = 0; i < dof; ++i) row[i] = u[i] - problem.u0[i];
    record(n, u);
    out.history_madds += madds;
    out.step_madds_min = std::min(out.step_madds_min, madds);
    out.step_madds_max = std::max(out.step_madds_max, madds);
  }
  if (out.step_madds_min == std::numeric_limits<std::uint64_t>::max()) out.step_madds_min = 0;
  out.history_peak_doubles = static_cast<std::uint64_t>(n_T + 1) * dof;
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace

Trajectory run_direct(const ProblemSpec& problem, const SchemeConfig& scheme,
                      std::span<const int> snapshots) {
  return run_dense(problem, scheme, snapshots, 0);
}

Trajectory run_semi_implicit(const ProblemSpec& problem, const SchemeConfig& scheme,
                             int extrapolation_order, std::span<const int> snapshots) {
  if (extrapolation_order != 1 && extrapolation_order != 2)
    throw std::invalid_argument("extrapolation order must be 1 or 2");
  return run_dense(problem, scheme, snapshots, extrapolation_order);
}

}  // namespace fracstep
