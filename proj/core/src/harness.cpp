#include "fracstep/harness.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "fracstep/mittag_leffler.hpp"

namespace fracstep {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

double dyadic_tau(int j) { return std::ldexp(1.0, -j); }

std::vector<double> diff_scaled(std::span<const double> a, std::span<const double> b) {
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

}  // namespace

Preset preset_from_name(const std::string& name) {
  if (name == "case1_scalar") return Preset::Case1Scalar;
  if (name == "case1_fd") return Preset::Case1FD;
  if (name == "case1_spectral") return Preset::Case1Spectral;
  if (name == "case2_spectral") return Preset::Case2Spectral;
  throw ConfigError("unknown preset '" + name + "'", -1, "preset");
}

std::string preset_name(Preset p) {
  switch (p) {
    case Preset::Case1Scalar: return "case1_scalar";
    case Preset::Case1FD: return "case1_fd";
    case Preset::Case1Spectral: return "case1_spectral";
    case Preset::Case2Spectral: return "case2_spectral";
  }
  return "?";
}

ExperimentConfig ExperimentConfig::from_config(const Config& cfg, const std::string& s) {
  ExperimentConfig e;
  e.preset = preset_from_name(cfg.get_string_or(s, "preset", "case1_scalar"));
  e.alpha = cfg.get_real_or(s, "alpha", 0.5);
  e.family = family_from_name(cfg.get_string_or(s, "family", "fbdf2"));
  e.theta = cfg.get_real_or(s, "theta", 0.0);
  e.m_list = cfg.get_int_list_or(s, "m", {0, 1, 2});
  const std::string rule = cfg.get_string_or(s, "sigma_rule", "k_alpha");
  if (rule == "k_alpha") e.sigma_rule = SigmaRule::KAlpha;
  else if (rule == "mixed") e.sigma_rule = SigmaRule::Mixed;
  else if (rule == "explicit") e.sigma_rule = SigmaRule::ExplicitList;
  else throw ConfigError("sigma_rule must be k_alpha | mixed | explicit", -1, "sigma_rule");
  e.sigma_explicit = cfg.get_real_list_or(s, "sigmas", {});
  e.j_list = cfg.get_int_list_or(s, "J", {5, 6, 7, 8, 9});
  e.T = cfg.get_real_or(s, "T", 1.0);
  e.spatial_res = cfg.get_int_or(s, "spatial_res", 32);
  const std::string norm = cfg.get_string_or(s, "norm", "final");
  if (norm == "final") e.norm = NormSel::FinalL2;
  else if (norm == "max") e.norm = NormSel::MaxL2;
  else throw ConfigError("norm must be final | max", -1, "norm");
  const std::string ref = cfg.get_string_or(
      s, "reference", e.preset == Preset::Case2Spectral ? "fast_fine" : "exact_ml");
  if (ref == "exact_ml") e.reference = RefPolicy::ExactML;
  else if (ref == "fast_fine") e.reference = RefPolicy::FastFine;
  else throw ConfigError("reference must be exact_ml | fast_fine", -1, "reference");
  e.tau_ref_j = cfg.get_int_or(s, "tau_ref_J", 14);
  e.eps_ref = cfg.get_real_or(s, "eps_ref", 1e-10);
  e.m_ref = cfg.get_int_or(s, "m_ref", 1);
  e.self_check = cfg.get_bool_or(s, "self_check", false);
  const std::string solver = cfg.get_string_or(s, "solver", "auto");
  if (solver == "auto") e.solver.mode = SolverMode::Auto;
  else if (solver == "fixed_point") e.solver.mode = SolverMode::FixedPoint;
  else if (solver == "newton") e.solver.mode = SolverMode::Newton;
  else throw ConfigError("solver must be auto | fixed_point | newton", -1, "solver");
  e.solver.tol = cfg.get_real_or(s, "tol", 1e-12);
  e.solver.max_iter = cfg.get_int_or(s, "max_iter", 50);
  e.threads = cfg.get_int_or(s, "threads", 1);
  e.validate();
  return e;
}

void ExperimentConfig::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("alpha must be in (0,1]", -1, "alpha");
  if (m_list.empty()) throw ConfigError("m list must not be empty", -1, "m");
  for (int m : m_list)
    if (m < 0 || m > 8) throw ConfigError("m must be in [0,8]", -1, "m");
  if (j_list.empty()) throw ConfigError("J list must not be empty", -1, "J");
  for (int j : j_list)
    if (j < 1 || j > 20) throw ConfigError("J must be in [1,20]", -1, "J");
  if (!(T > 0.0)) throw ConfigError("T must be positive", -1, "T");
  if (spatial_res < 1) throw ConfigError("spatial_res must be >= 1", -1, "spatial_res");
  if (sigma_rule == SigmaRule::ExplicitList) {
    const int m_max = *std::max_element(m_list.begin(), m_list.end());
    if (static_cast<int>(sigma_explicit.size()) < m_max)
      throw ConfigError("explicit sigma list shorter than the largest m", -1, "sigmas");
  }
  if (reference == RefPolicy::ExactML && preset == Preset::Case2Spectral)
    throw ConfigError("case2_spectral has no exact reference; use fast_fine", -1, "reference");
  if (threads < 1) throw ConfigError("threads must be >= 1", -1, "threads");
}

std::vector<double> ExperimentConfig::sigmas_for(int m) const {
  if (m == 0) return {};
  switch (sigma_rule) {
    case SigmaRule::KAlpha: return suggest_sigmas(alpha, m, true);
    case SigmaRule::Mixed: return suggest_sigmas(alpha, m, false);
    case SigmaRule::ExplicitList:
      return {sigma_explicit.begin(), sigma_explicit.begin() + m};
  }
  return {};
}

double ExperimentConfig::sigma_next(int m) const {
  switch (sigma_rule) {
    case SigmaRule::KAlpha: return (m + 1) * alpha;
    case SigmaRule::Mixed: return suggest_sigmas(alpha, m + 1, false).back();
    case SigmaRule::ExplicitList:
      return m < static_cast<int>(sigma_explicit.size()) ? sigma_explicit[static_cast<std::size_t>(m)]
                                                         : kNaN;
  }
  return kNaN;
}

PresetProblem make_preset(Preset preset, double alpha, int spatial_res, double T) {
  (void)alpha;
  PresetProblem pp;
  const Rect unit{0.0, 1.0, 0.0, 1.0};
  const double kappa = 1.0 / (2.0 * kPi * kPi);
  auto mode = [](double x, double y) { return std::sin(kPi * x) * std::sin(kPi * y); };
  switch (preset) {
    case Preset::Case1Scalar:
      pp.op = build_scalar(-1.0);
      pp.problem.u0 = {1.0};
      pp.has_exact = true;
      pp.scalar_norm_factor = 0.5;  // L2 norm of the excited sine mode
      break;
    case Preset::Case1FD:
      pp.op = build_fd2d(kappa, spatial_res, spatial_res, unit);
      pp.has_exact = true;
      break;
    case Preset::Case1Spectral:
      pp.op = build_sine_spectral(kappa, spatial_res, spatial_res, 2 * spatial_res,
                                  2 * spatial_res, unit);
      pp.has_exact = true;
      break;
    case Preset::Case2Spectral:
      pp.op = build_sine_spectral(kappa, spatial_res, spatial_res, 2 * spatial_res,
                                  2 * spatial_res, unit);
      pp.problem.f = [](double u) { return u * (1.0 - u * u); };
      pp.problem.f_prime = [](double u) { return 1.0 - 3.0 * u * u; };
      break;
  }
  pp.problem.op = pp.op.get();
  pp.problem.T = T;
  if (pp.problem.u0.empty()) {
    pp.problem.u0.resize(static_cast<std::size_t>(pp.op->dof()));
    pp.op->sample(mode, pp.problem.u0);
  }
  return pp;
}

Trajectory reference_solution(const ExperimentConfig& cfg, const PresetProblem& pp,
                              int j_grid) {
  if (pp.has_exact)
    throw std::invalid_argument("preset has an exact reference; the fast-fine reference is "
                                "for nonlinear presets only");
  if (cfg.tau_ref_j < j_grid)
    throw std::invalid_argument("reference grid must be finer than the coarse grids");
  const double tau_ref = dyadic_tau(cfg.tau_ref_j);
  const long long n_t = std::llround(cfg.T / tau_ref);
  const long long stride = 1LL << (cfg.tau_ref_j - j_grid);

  SchemeConfig scheme;
  scheme.gf = GeneratingFunction{cfg.family, cfg.alpha, cfg.theta};
  scheme.corr.sigmas = suggest_sigmas(cfg.alpha, std::max(1, cfg.m_ref), true);
  scheme.tau = tau_ref;
  scheme.n_T = static_cast<int>(n_t);
  scheme.solver = cfg.solver;

  std::vector<int> snaps;
  for (long long n = stride; n <= n_t; n += stride) snaps.push_back(static_cast<int>(n));
  return run_fast(pp.problem, scheme, cfg.eps_ref, snaps);
}

namespace {

// error of trajectory snapshot n against the reference, in the operator norm
struct ErrorEvaluator {
  const ExperimentConfig* cfg;
  const PresetProblem* pp;
  const Trajectory* ref = nullptr;  // FastFine only
  int ref_stride_log2 = 0;          // tau_ref_j - J of the evaluated run

  double at(const Trajectory& traj, int n, int j_run) const {
    const SpatialOperator& op = *pp->op;
    const auto& u = traj.at(n);
    std::vector<double> d;
    if (ref == nullptr) {
      const double t = n * traj.tau;
      const double ml = ml_neg(cfg->alpha, std::pow(t, cfg->alpha));
      d.resize(u.size());
      for (std::size_t i = 0; i < u.size(); ++i)
        d[i] = u[i] - ml * pp->problem.u0[i];
    } else {
      const long long stride = 1LL << (cfg->tau_ref_j - j_run);
      d = diff_scaled(u, ref->at(static_cast<int>(n * stride)));
    }
    return op.l2_norm(d) * pp->scalar_norm_factor;
  }
};

}  // namespace

ConvergenceReport convergence_study(const ExperimentConfig& cfg) {
  cfg.validate();
  const PresetProblem pp = make_preset(cfg.preset, cfg.alpha, cfg.spatial_res, cfg.T);
  const bool exact = cfg.reference == RefPolicy::ExactML;
  if (exact && !pp.has_exact)
    throw ConfigError("preset has no exact reference; set reference = fast_fine", -1,
                      "reference");

  ConvergenceReport rep;
  rep.preset = preset_name(cfg.preset);
  rep.family = family_name(cfg.family);
  rep.alpha = cfg.alpha;
  rep.norm = cfg.norm == NormSel::FinalL2 ? "final_l2" : "max_l2";
  rep.sigma_rule = cfg.sigma_rule == SigmaRule::KAlpha ? "k_alpha"
                   : cfg.sigma_rule == SigmaRule::Mixed ? "mixed" : "explicit";
  rep.m_list = cfg.m_list;
  rep.j_list = cfg.j_list;
  rep.ref_self_check_drift = kNaN;

  const int j_max = *std::max_element(cfg.j_list.begin(), cfg.j_list.end());
  Trajectory ref;
  if (!exact) {
    ref = reference_solution(cfg, pp, j_max);
    if (cfg.self_check) {
      ExperimentConfig finer = cfg;
      finer.tau_ref_j += 1;
      const Trajectory ref2 = reference_solution(finer, pp, j_max);
      const auto d = diff_scaled(ref.at(ref.n_T), ref2.at(ref2.n_T));
      rep.ref_self_check_drift = pp.op->l2_norm(d);
    }
  }

  const std::size_t n_m = cfg.m_list.size(), n_j = cfg.j_list.size();
  std::vector<double> errors(n_m * n_j, kNaN);

  struct Cell {
    std::size_t mi, ji;
  };
  std::vector<Cell> cells;
  for (std::size_t mi = 0; mi < n_m; ++mi)
    for (std::size_t ji = 0; ji < n_j; ++ji) cells.push_back({mi, ji});

  ErrorEvaluator ev{&cfg, &pp, exact ? nullptr : &ref, 0};

  auto run_cell = [&](const Cell& c) {
    const int m = cfg.m_list[c.mi];
    const int j = cfg.j_list[c.ji];
    SchemeConfig scheme;
    scheme.gf = GeneratingFunction{cfg.family, cfg.alpha, cfg.theta};
    scheme.corr.sigmas = cfg.sigmas_for(m);
    scheme.tau = dyadic_tau(j);
    scheme.n_T = static_cast<int>(std::llround(cfg.T / scheme.tau));
    scheme.solver = cfg.solver;

    std::vector<int> snaps;
    if (cfg.norm == NormSel::FinalL2) {
      snaps.push_back(scheme.n_T);
    } else {
      for (int n = 1; n <= scheme.n_T; ++n) snaps.push_back(n);
    }
    const Trajectory traj = run_direct(pp.problem, scheme, snaps);
    double err = 0.0;
    for (int n : snaps) err = std::max(err, ev.at(traj, n, j));
    errors[c.mi * n_j + c.ji] = err;
  };

  const int n_threads = std::max(1, std::min<int>(cfg.threads, static_cast<int>(cells.size())));
  if (n_threads == 1) {
    for (const Cell& c : cells) run_cell(c);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> thrown(static_cast<std::size_t>(n_threads));
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t)
      pool.emplace_back([&, t] {
        try {
          for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) break;
            run_cell(cells[i]);
          }
        } catch (...) {
          thrown[static_cast<std::size_t>(t)] = std::current_exception();
        }
      });
    for (auto& th : pool) th.join();
    for (const auto& ex : thrown)
      if (ex) std::rethrow_exception(ex);
  }

  for (std::size_t mi = 0; mi < n_m; ++mi) {
    const double sn = cfg.sigma_next(cfg.m_list[mi]);
    rep.predicted.push_back(std::isnan(sn)
                                ? kNaN
                                : predicted_rate(cfg.alpha, sn,
                                                 GeneratingFunction{cfg.family, cfg.alpha,
                                                                    cfg.theta}
                                                     .order())
                                      .rate);
    for (std::size_t ji = 0; ji < n_j; ++ji) {
      ConvergenceRow row;
      row.m = cfg.m_list[mi];
      row.j = cfg.j_list[ji];
      row.error = errors[mi * n_j + ji];
      row.rate = ji == 0 ? kNaN
                         : std::log2(errors[mi * n_j + ji - 1] / errors[mi * n_j + ji]);
      rep.rows.push_back(row);
    }
  }
  return rep;
}

double ConvergenceReport::error_at(int j, int m) const {
  for (const auto& r : rows)
    if (r.j == j && r.m == m) return r.error;
  throw std::out_of_range("no (J, m) cell in report");
}

double ConvergenceReport::rate_at(int j, int m) const {
  for (const auto& r : rows)
    if (r.j == j && r.m == m) return r.rate;
  throw std::out_of_range("no (J, m) cell in report");
}

void ConvergenceReport::write_csv(std::ostream& os) const {
  os << "J,m,error,rate\n";
  for (const auto& r : rows) {
    os << r.j << ',' << r.m << ',' << fmt("%.6e", r.error) << ',';
    if (!std::isnan(r.rate)) os << fmt("%.4f", r.rate);
    os << '\n';
  }
}

void ConvergenceReport::write_json(std::ostream& os) const {
  nlohmann::ordered_json j;
  j["preset"] = preset;
  j["family"] = family;
  j["alpha"] = alpha;
  j["norm"] = norm;
  j["sigma_rule"] = sigma_rule;
  j["m"] = m_list;
  j["J"] = j_list;
  nlohmann::ordered_json pred = nlohmann::ordered_json::array();
  for (double p : predicted)
    pred.push_back(std::isnan(p) ? nlohmann::ordered_json()
                                 : nlohmann::ordered_json(p));
  j["predicted_rate"] = pred;
  if (!std::isnan(ref_self_check_drift)) j["ref_self_check_drift"] = ref_self_check_drift;
  nlohmann::ordered_json rws = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json rj;
    rj["J"] = r.j;
    rj["m"] = r.m;
    rj["error"] = r.error;
    if (!std::isnan(r.rate)) rj["rate"] = r.rate;
    rws.push_back(rj);
  }
  j["rows"] = rws;
  os << j.dump(2) << '\n';
}

std::vector<double> observed_rate(std::span<const double> errors) {
  if (errors.size() < 2)
    throw std::invalid_argument("observed_rate needs at least two errors");
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
    if (!(errors[i] > 0.0) || !(errors[i + 1] > 0.0))
      throw std::invalid_argument("observed_rate needs positive errors");
    out.push_back(std::log2(errors[i] / errors[i + 1]));
  }
  return out;
}

RatePrediction predicted_rate(double alpha, double sigma_next, int p) {
  if (!(sigma_next > 0.0)) throw std::invalid_argument("sigma_{m+1} must be positive");
  RatePrediction rp;
  rp.rate = std::min(sigma_next - alpha + 0.5, static_cast<double>(p));
  rp.log_factor = std::fabs(sigma_next - (p + alpha - 0.5)) < 1e-12;
  return rp;
}

double ell_n(double alpha, double sigma, int p, int n) {
  if (n < 2) throw std::invalid_argument("ell_n needs n >= 2");
  const double dn = static_cast<double>(n);
  if (std::fabs(sigma - (p + alpha - 0.5)) < 1e-12)
    return std::pow(dn, alpha - 1.0) * std::log(dn);
  return std::pow(dn, std::max(alpha - 1.0, 2.0 * sigma - 2.0 * p - alpha));
}

// ---- report commands ----

std::vector<AssumptionReport> assumption_matrix(int n_max, double tol) {
  std::vector<AssumptionReport> out;
  const std::vector<double> alphas = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  const std::vector<Family> plain = {Family::FBDF1, Family::FBDF2, Family::GNGF2,
                                     Family::CNLinear, Family::CNBinom};
  for (Family f : plain)
    for (double a : alphas)
      out.push_back(check_assumptions(GeneratingFunction{f, a, 0.0}, n_max, tol));
  for (double th : {0.0, 0.1, 0.2, 0.3, 0.4, 0.5})
    for (double a : alphas)
      out.push_back(check_assumptions(GeneratingFunction::bn_theta(a, th), n_max, tol));
  return out;
}

void write_assumption_csv(std::ostream& os, const std::vector<AssumptionReport>& reports) {
  os << "family,theta,alpha,N,b0,tail_sum,c0,min_c,decay_exponent,pass_a,pass_c\n";
  for (const auto& r : reports) {
    os << r.family << ',' << fmt("%.2f", r.theta) << ',' << fmt("%.2f", r.alpha) << ','
       << r.n_checked << ',' << fmt("%.12e", r.b0) << ',' << fmt("%.12e", r.tail_sum) << ','
       << fmt("%.12e", r.c0) << ',' << fmt("%.12e", r.min_c) << ','
       << fmt("%.4f", r.decay_exponent) << ',' << (r.pass_a ? 1 : 0) << ','
       << (r.pass_c ? 1 : 0) << '\n';
  }
}

void write_assumption_json(std::ostream& os, const std::vector<AssumptionReport>& reports) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : reports) {
    nlohmann::ordered_json j;
    j["family"] = r.family;
    j["theta"] = r.theta;
    j["alpha"] = r.alpha;
    j["N"] = r.n_checked;
    j["b0"] = r.b0;
    j["tail_sum"] = r.tail_sum;
    j["c0"] = r.c0;
    j["min_c"] = r.min_c;
    j["decay_exponent"] = r.decay_exponent;
    j["pass_a"] = r.pass_a;
    j["pass_c"] = r.pass_c;
    arr.push_back(j);
  }
  os << arr.dump(2) << '\n';
}

std::vector<CondRow> cond_report(const std::vector<double>& alphas, int m_max, double tau) {
  std::vector<CondRow> out;
  for (double a : alphas)
    for (int m = 1; m <= m_max; ++m) {
      CorrectionConfig cc;
      for (int k = 1; k <= m; ++k) cc.sigmas.push_back(k * a);
      out.push_back({m, a, condition_number(cc, tau)});
    }
  return out;
}

void write_cond_csv(std::ostream& os, const std::vector<CondRow>& rows) {
  os << "m,alpha,condition\n";
  for (const auto& r : rows)
    os << r.m << ',' << fmt("%.2f", r.alpha) << ',' << fmt("%.6e", r.condition) << '\n';
}

void write_cond_json(std::ostream& os, const std::vector<CondRow>& rows) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json j;
    j["m"] = r.m;
    j["alpha"] = r.alpha;
    j["condition"] = r.condition;
    arr.push_back(j);
  }
  os << arr.dump(2) << '\n';
}

FastCompareResult fast_compare(const ExperimentConfig& cfg, int j, int m, double eps_target) {
  const PresetProblem pp = make_preset(cfg.preset, cfg.alpha, cfg.spatial_res, cfg.T);
  SchemeConfig scheme;
  scheme.gf = GeneratingFunction{cfg.family, cfg.alpha, cfg.theta};
  scheme.corr.sigmas = cfg.sigmas_for(m);
  scheme.tau = dyadic_tau(j);
  scheme.n_T = static_cast<int>(std::llround(cfg.T / scheme.tau));
  scheme.solver = cfg.solver;

  std::vector<int> snaps;
  for (int n = 1; n <= scheme.n_T; ++n) snaps.push_back(n);
  const Trajectory direct = run_direct(pp.problem, scheme, snaps);

  const int n0 = std::max(m + 2, 16);
  const double eps_build = default_build_eps(scheme.tau, cfg.alpha, scheme.n_T, eps_target);
  const ExpSumApprox approx =
      build_exp_sum(scheme.gf, scheme.tau, scheme.n_T, n0, eps_build);
  const Trajectory fast = run_fast(pp.problem, scheme, approx, snaps);

  FastCompareResult r;
  r.q = approx.Q;
  r.n0 = approx.n0;
  for (int n = 1; n <= scheme.n_T; ++n) {
    const auto d = diff_scaled(fast.at(n), direct.at(n));
    const double dev = pp.op->l2_norm(d);
    r.n.push_back(n);
    r.deviation.push_back(dev);
    r.max_deviation = std::max(r.max_deviation, dev);
  }
  return r;
}

void write_fast_compare_csv(std::ostream& os, const FastCompareResult& r) {
  os << "n,deviation\n";
  for (std::size_t i = 0; i < r.n.size(); ++i)
    os << r.n[i] << ',' << fmt("%.6e", r.deviation[i]) << '\n';
}

std::vector<BenchRow> bench_history(double alpha, int log2_n_t, double eps_target) {
  PresetProblem pp = make_preset(Preset::Case1Scalar, alpha, 1, 1.0);
  SchemeConfig scheme;
  scheme.gf = GeneratingFunction::fbdf2(alpha);
  scheme.tau = dyadic_tau(log2_n_t);
  scheme.n_T = 1 << log2_n_t;

  const std::vector<int> snaps = {scheme.n_T};
  const Trajectory direct = run_direct(pp.problem, scheme, snaps);

  const int n0 = 16;
  const double eps_build = default_build_eps(scheme.tau, alpha, scheme.n_T, eps_target);
  const ExpSumApprox approx =
      build_exp_sum(scheme.gf, scheme.tau, scheme.n_T, n0, eps_build);
  const Trajectory fast = run_fast(pp.problem, scheme, approx, snaps);

  const auto d = diff_scaled(fast.at(scheme.n_T), direct.at(scheme.n_T));
  const double dev = pp.op->l2_norm(d);

  std::vector<BenchRow> rows;
  rows.push_back({"direct", scheme.n_T, 0, 0, direct.wall_seconds, direct.history_madds,
                  direct.history_peak_doubles, 0.0});
  rows.push_back({"fast", scheme.n_T, approx.Q, approx.n0, fast.wall_seconds,
                  fast.history_madds, fast.history_peak_doubles, dev});
  return rows;
}

void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows) {
  os << "method,n_T,Q,n0,wall_seconds,history_madds,history_peak_doubles,max_deviation\n";
  for (const auto& r : rows)
    os << r.method << ',' << r.n_T << ',' << r.q << ',' << r.n0 << ','
       << fmt("%.6e", r.wall_seconds) << ',' << r.history_madds << ','
       << r.history_peak_doubles << ',' << fmt("%.6e", r.max_deviation) << '\n';
}

std::vector<SnapshotEntry> snapshot_study(const std::vector<double>& alphas,
                                          const std::vector<double>& times, double tau,
                                          int spatial_res) {
  if (times.empty()) throw std::invalid_argument("snapshot times must not be empty");
  const double t_final = *std::max_element(times.begin(), times.end());
  std::vector<SnapshotEntry> out;
  for (double a : alphas) {
    PresetProblem pp = make_preset(Preset::Case2Spectral, a, spatial_res, t_final);
    SchemeConfig scheme;
    scheme.gf = GeneratingFunction::fbdf2(a);
    scheme.corr.sigmas = {a};
    scheme.tau = tau;
    scheme.n_T = static_cast<int>(std::llround(t_final / tau));
    std::vector<int> snaps;
    for (double t : times) {
      const double idx = t / tau;
      const int n = static_cast<int>(std::llround(idx));
      if (std::fabs(idx - n) > 1e-9)
        throw std::invalid_argument("snapshot times must lie on the time grid");
      snaps.push_back(n);
    }
    const Trajectory traj = run_direct(pp.problem, scheme, snaps);
    for (double t : times) {
      const int n = static_cast<int>(std::llround(t / tau));
      const auto& u = traj.at(n);
      SnapshotEntry e;
      e.alpha = a;
      e.t = t;
      e.l2 = pp.op->l2_norm(u);
      e.field = pp.op->snapshot(u);
      out.push_back(std::move(e));
    }
  }
  return out;
}

void write_snapshot_csv(std::ostream& os, const SnapshotEntry& e) {
  os << "x,y,value\n";
  for (std::size_t i = 0; i < e.field.x.size(); ++i)
    os << fmt("%.8f", e.field.x[i]) << ',' << fmt("%.8f", e.field.y[i]) << ','
       << fmt("%.8e", e.field.value[i]) << '\n';
}

void write_snapshot_norms_csv(std::ostream& os, const std::vector<SnapshotEntry>& entries) {
  os << "alpha,t,l2_norm\n";
  for (const auto& e : entries)
    os << fmt("%.2f", e.alpha) << ',' << fmt("%.2f", e.t) << ',' << fmt("%.8e", e.l2) << '\n';
}

}  // namespace fracstep
