#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fracstep/config.hpp"
#include "fracstep/fast_history.hpp"
#include "fracstep/stepper.hpp"

namespace fracstep {

enum class Preset { Case1Scalar, Case1FD, Case1Spectral, Case2Spectral };
enum class NormSel { FinalL2, MaxL2 };
enum class RefPolicy { ExactML, FastFine };
enum class SigmaRule { KAlpha, Mixed, ExplicitList };

Preset preset_from_name(const std::string& name);
std::string preset_name(Preset p);

struct ExperimentConfig {
  Preset preset = Preset::Case1Scalar;
  double alpha = 0.5;
  Family family = Family::FBDF2;
  double theta = 0.0;
  std::vector<int> m_list = {0, 1, 2};
  SigmaRule sigma_rule = SigmaRule::KAlpha;
  std::vector<double> sigma_explicit;
  std::vector<int> j_list = {5, 6, 7, 8, 9};
  double T = 1.0;
  int spatial_res = 32;    // modal cutoff (spectral) or interior points (FD)
  NormSel norm = NormSel::FinalL2;
  RefPolicy reference = RefPolicy::ExactML;
  int tau_ref_j = 14;      // reference step 2^-tau_ref_j
  double eps_ref = 1e-10;
  int m_ref = 1;           // corrections used by the fast-fine reference
  bool self_check = false; // Richardson check of the fast-fine reference
  SolverSettings solver{};
  int threads = 1;

  static ExperimentConfig from_config(const Config& cfg, const std::string& section = "study");
  void validate() const;
  std::vector<double> sigmas_for(int m) const;      // first m exponents of the rule
  double sigma_next(int m) const;                   // sigma_{m+1}; NaN if unavailable
};

// A preset problem: owns the spatial operator the ProblemSpec points into.
struct PresetProblem {
  std::unique_ptr<SpatialOperator> op;
  ProblemSpec problem;
  bool has_exact = false;  // Case I: u = E_alpha(-t^alpha) * u0
  double scalar_norm_factor = 1.0;  // 0.5 for the scalar mode reproduction
};

PresetProblem make_preset(Preset preset, double alpha, int spatial_res, double T);

struct ConvergenceRow {
  int j = 0;
  int m = 0;
  double error = 0.0;
  double rate = 0.0;  // NaN on the first J of a column
};

struct ConvergenceReport {
  std::string preset;
  std::string family;
  double alpha = 0.0;
  std::string norm;
  std::string sigma_rule;
  std::vector<int> m_list;
  std::vector<int> j_list;
  std::vector<double> predicted;  // per m-column; NaN where sigma_{m+1} unknown
  std::vector<ConvergenceRow> rows;  // m-major, then J ascending
  double ref_self_check_drift = 0.0;  // NaN unless the Richardson check ran

  double error_at(int j, int m) const;
  double rate_at(int j, int m) const;
  void write_csv(std::ostream& os) const;
  void write_json(std::ostream& os) const;
};

ConvergenceReport convergence_study(const ExperimentConfig& cfg);

// Fast fine-grid reference for presets without an exact solution; snapshots
// recorded at every multiple of 2^-j_grid. Rejects presets with an exact
// reference.
Trajectory reference_solution(const ExperimentConfig& cfg, const PresetProblem& pp,
                              int j_grid);

// log2 ratios of successive errors; throws on nonpositive entries.
std::vector<double> observed_rate(std::span<const double> errors);

struct RatePrediction {
  double rate = 0.0;
  bool log_factor = false;  // sigma_{m+1} == p + alpha - 1/2 exactly
};
RatePrediction predicted_rate(double alpha, double sigma_next, int p);

// n^{max(alpha-1, 2 sigma - 2p - alpha)}, with the log factor on the
// boundary case.
double ell_n(double alpha, double sigma, int p, int n);

// ---- report commands ----

// Assumption checks over the full (family, theta, alpha) matrix.
std::vector<AssumptionReport> assumption_matrix(int n_max = 2000, double tol = 1e-12);
void write_assumption_csv(std::ostream& os, const std::vector<AssumptionReport>& reports);
void write_assumption_json(std::ostream& os, const std::vector<AssumptionReport>& reports);

struct CondRow {
  int m = 0;
  double alpha = 0.0;
  double condition = 0.0;
};
std::vector<CondRow> cond_report(const std::vector<double>& alphas, int m_max, double tau);
void write_cond_csv(std::ostream& os, const std::vector<CondRow>& rows);
void write_cond_json(std::ostream& os, const std::vector<CondRow>& rows);

struct FastCompareResult {
  std::vector<int> n;
  std::vector<double> deviation;  // ||u_F^n - u^n|| in the operator norm
  double max_deviation = 0.0;
  int q = 0;
  int n0 = 0;
};
FastCompareResult fast_compare(const ExperimentConfig& cfg, int j, int m, double eps_target);
void write_fast_compare_csv(std::ostream& os, const FastCompareResult& r);

struct BenchRow {
  std::string method;
  int n_T = 0;
  int q = 0;
  int n0 = 0;
  double wall_seconds = 0.0;
  std::uint64_t history_madds = 0;
  std::uint64_t history_peak_doubles = 0;
  double max_deviation = 0.0;  // fast vs direct
};
std::vector<BenchRow> bench_history(double alpha, int log2_n_t, double eps_target);
void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows);

struct SnapshotEntry {
  double alpha = 0.0;
  double t = 0.0;
  double l2 = 0.0;
  FieldSnapshot field;
};
std::vector<SnapshotEntry> snapshot_study(const std::vector<double>& alphas,
                                          const std::vector<double>& times, double tau,
                                          int spatial_res);
void write_snapshot_csv(std::ostream& os, const SnapshotEntry& e);
void write_snapshot_norms_csv(std::ostream& os, const std::vector<SnapshotEntry>& entries);

}  // namespace fracstep
