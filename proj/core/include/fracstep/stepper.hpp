#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "fracstep/corrections.hpp"
#include "fracstep/series.hpp"
#include "fracstep/spatial.hpp"

namespace fracstep {

// D_t^alpha u = L u + f(u), u(0) = u0, on (0, T].
struct ProblemSpec {
  const SpatialOperator* op = nullptr;
  std::function<double(double)> f;        // empty means f == 0
  std::function<double(double)> f_prime;  // required for Newton mode
  std::vector<double> u0;
  double T = 1.0;
};

enum class SolverMode { Auto, FixedPoint, Newton };
enum class StartupMode { Bootstrap, GivenValues };

struct SolverSettings {
  SolverMode mode = SolverMode::Auto;  // Auto: Newton where the operator supports it
  double tol = 1e-12;                  // step residual tolerance (relative)
  int max_iter = 50;
};

struct SchemeConfig {
  GeneratingFunction gf;
  CorrectionConfig corr;   // sigma_1 < ... < sigma_m
  double tau = 1.0 / 64.0;
  int n_T = 64;
  SolverSettings solver{};
  StartupMode startup = StartupMode::Bootstrap;
  std::vector<std::vector<double>> start_values;  // u^1..u^m when GivenValues

  void validate(double T) const;  // checks n_T * tau == T and member invariants
};

// Precomputed per-run tables: convolution weights to n_T, starting weights,
// and the coupled first-step coefficient gamma_1 (m = 1).
struct PreparedScheme {
  GeneratingFunction gf;
  CorrectionConfig corr;
  CoeffSeries omega;
  StartingWeightTable weights;
  double tau = 0.0;
  int n_T = 0;
  double gamma1 = 0.0;
  SolverSettings solver;

  int m() const { return corr.m(); }
  static PreparedScheme build(const SchemeConfig& scheme);
};

struct Trajectory {
  double tau = 0.0;
  int n_T = 0;
  std::vector<int> snapshot_index;              // sorted
  std::vector<std::vector<double>> snapshots;   // parallel to snapshot_index
  std::vector<int> iterations;                  // per step, index 0 unused
  double wall_seconds = 0.0;
  std::uint64_t history_madds = 0;              // multiply-adds spent on history sums
  std::uint64_t history_peak_doubles = 0;       // peak storage of history state
  std::uint64_t step_madds_min = 0;             // per-step history cost extremes
  std::uint64_t step_madds_max = 0;

  bool has(int n) const;
  const std::vector<double>& at(int n) const;  // throws if n was not recorded
};

// Corrected discrete Caputo operator applied to given samples u^0..u^n:
//   tau^{-alpha} [ sum_{j=0}^n omega_{n-j} (u^j - u^0)
//                  + sum_{j=1}^m w_{n,j} (u^j - u^0) ].
// n <= m is startup territory and rejected.
std::vector<double> caputo_apply(const PreparedScheme& prep,
                                 const std::vector<std::vector<double>>& u, int n);

// One implicit step: solves for u^n given u^0..u^{n-1}, n >= m+1.
std::vector<double> implicit_step(const ProblemSpec& problem, const PreparedScheme& prep,
                                  const std::vector<std::vector<double>>& u, int n,
                                  int* iterations = nullptr);

// Coupled first step of the m = 1 scheme:
//   tau^{-alpha} gamma_1 (u^1 - u^0) = L u^1 + f(u^1).
std::vector<double> m1_first_step(const ProblemSpec& problem, const PreparedScheme& prep,
                                  int* iterations = nullptr);

// Startup samples u^1..u^m computed by the one-correction scheme on the fine
// grid tau_s = tau / (10 ceil(1/tau)), sampled back at t_j = j tau.
std::vector<std::vector<double>> bootstrap_start(const ProblemSpec& problem,
                                                 const SchemeConfig& scheme);

// The bootstrap fine step 0.1 tau / ceil(1/tau), rounded down so that tau is
// an exact integer multiple of it.
double bootstrap_fine_tau(double tau);

// Fully implicit run with dense history: O(n_T^2) history work.
Trajectory run_direct(const ProblemSpec& problem, const SchemeConfig& scheme,
                      std::span<const int> snapshots);

// Linearized variant: the reaction term is extrapolated from previous steps
// (order 1: f(u^{n-1}); order 2: 2 f(u^{n-1}) - f(u^{n-2})); one shifted
// solve per step.
Trajectory run_semi_implicit(const ProblemSpec& problem, const SchemeConfig& scheme,
                             int extrapolation_order, std::span<const int> snapshots);

}  // namespace fracstep
