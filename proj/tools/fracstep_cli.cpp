// Command-line driver: coefficient tables, assumption and conditioning
// reports, convergence studies, fast-vs-direct comparisons, benchmarks and
// field snapshots. Exit codes: 0 ok, 2 bad config, 3 solver failure.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "fracstep/config.hpp"
#include "fracstep/errors.hpp"
#include "fracstep/fast_history.hpp"
#include "fracstep/harness.hpp"
#include "fracstep/mittag_leffler.hpp"

namespace {

using namespace fracstep;

struct CommonOpts {
  std::string config_path;
  std::string out_path;
  std::string format = "csv";
  int threads = 1;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path, "configuration file (key = value with sections)");
  cmd->add_option("--out", o.out_path, "output path (default: stdout)");
  cmd->add_option("--format", o.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--threads", o.threads, "worker threads for study cells")
      ->check(CLI::PositiveNumber);
}

Config load_config(const CommonOpts& o) {
  if (o.config_path.empty()) return Config::parse_string("");
  return Config::parse_file(o.config_path);
}

void emit(const CommonOpts& o, const std::string& text) {
  if (o.out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out_path);
  if (!f) throw ConfigError("cannot open output file '" + o.out_path + "'");
  f << text;
}

std::string tolower_copy(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"time-fractional subdiffusion solver toolkit"};
  app.require_subcommand(1);

  CommonOpts weights_o, assume_o, cond_o, conv_o, fastcmp_o, bench_o, ml_o, snap_o;

  // weights
  auto* w_cmd = app.add_subcommand("weights", "emit a coefficient series");
  std::string w_family = "fbdf2", w_kind = "omega";
  double w_alpha = 0.5, w_theta = 0.0;
  int w_n = 32;
  w_cmd->add_option("--family", w_family, "fbdf1|fbdf2|gngf2|bn_theta|cn_linear|cn_binom");
  w_cmd->add_option("--alpha", w_alpha, "fractional order")->required();
  w_cmd->add_option("--theta", w_theta, "BN-theta parameter");
  w_cmd->add_option("--n", w_n, "truncation index N");
  w_cmd->add_option("--kind", w_kind, "omega|a|b|bhat|c");
  add_common(w_cmd, weights_o);

  // check-assumptions
  auto* a_cmd = app.add_subcommand("check-assumptions",
                                   "summability/sign checks over the family matrix");
  int a_n = 2000;
  double a_tol = 1e-12;
  a_cmd->add_option("--n", a_n, "series length");
  a_cmd->add_option("--tol", a_tol, "tolerance");
  add_common(a_cmd, assume_o);

  // cond-report
  auto* c_cmd = app.add_subcommand("cond-report", "starting-weight system conditioning");
  std::vector<double> c_alphas = {0.1, 0.2, 0.5, 0.8, 1.0};
  int c_mmax = 8;
  double c_tau = 0.1;
  c_cmd->add_option("--alphas", c_alphas, "fractional orders");
  c_cmd->add_option("--m-max", c_mmax, "largest correction count");
  c_cmd->add_option("--tau", c_tau, "time step in the matrix entries");
  add_common(c_cmd, cond_o);

  // ml
  auto* m_cmd = app.add_subcommand("ml", "evaluate E_alpha(-x)");
  double m_alpha = 0.5, m_x = 1.0;
  m_cmd->add_option("--alpha", m_alpha)->required();
  m_cmd->add_option("--x", m_x)->required();
  add_common(m_cmd, ml_o);

  // converge
  auto* v_cmd = app.add_subcommand("converge", "convergence study (errors and rates)");
  add_common(v_cmd, conv_o);

  // fast-compare
  auto* f_cmd = app.add_subcommand("fast-compare", "fast-vs-direct trajectory deviation");
  add_common(f_cmd, fastcmp_o);

  // bench
  auto* b_cmd = app.add_subcommand("bench", "direct vs fast history timing/memory");
  double b_alpha = 0.5, b_eps = 1e-8;
  int b_log2 = 15;
  b_cmd->add_option("--alpha", b_alpha);
  b_cmd->add_option("--log2-nt", b_log2, "number of steps as a power of two");
  b_cmd->add_option("--eps", b_eps, "fast-vs-direct accuracy target");
  add_common(b_cmd, bench_o);

  // snapshot
  auto* s_cmd = app.add_subcommand("snapshot", "field snapshots and their norms");
  std::string s_grid_prefix;
  s_cmd->add_option("--grid-prefix", s_grid_prefix,
                    "write per-(alpha, t) grids to <prefix>_a<alpha>_t<t>.csv");
  add_common(s_cmd, snap_o);

  CLI11_PARSE(app, argc, argv);

  try {
    if (w_cmd->parsed()) {
      const GeneratingFunction gf{family_from_name(w_family), w_alpha, w_theta};
      CoeffSeries s;
      const std::string kind = tolower_copy(w_kind);
      if (kind == "omega") s = omega_weights(gf, w_n);
      else if (kind == "a") s = binomial_coeffs(w_alpha, w_n);
      else if (kind == "b") s = b_coeffs(gf, w_n);
      else if (kind == "bhat") s = bhat_coeffs(gf, w_n);
      else if (kind == "c") s = c_coeffs(gf, w_n);
      else throw ConfigError("kind must be omega|a|b|bhat|c", -1, "kind");
      std::ostringstream os;
      if (weights_o.format == "json") {
        os << "[";
        for (int n = 0; n <= s.max_index(); ++n)
          os << (n ? "," : "") << std::scientific << s[n];
        os << "]\n";
      } else {
        os << "n,value\n";
        char buf[48];
        for (int n = 0; n <= s.max_index(); ++n) {
          std::snprintf(buf, sizeof(buf), "%d,%.16e\n", n, s[n]);
          os << buf;
        }
      }
      emit(weights_o, os.str());
    } else if (a_cmd->parsed()) {
      const auto reports = assumption_matrix(a_n, a_tol);
      std::ostringstream os;
      if (assume_o.format == "json") write_assumption_json(os, reports);
      else write_assumption_csv(os, reports);
      emit(assume_o, os.str());
      for (const auto& r : reports)
        if (!r.pass_a || !r.pass_c) return 1;
    } else if (c_cmd->parsed()) {
      const auto rows = cond_report(c_alphas, c_mmax, c_tau);
      std::ostringstream os;
      if (cond_o.format == "json") write_cond_json(os, rows);
      else write_cond_csv(os, rows);
      emit(cond_o, os.str());
    } else if (m_cmd->parsed()) {
      char buf[48];
      std::snprintf(buf, sizeof(buf), "%.15e\n", ml_neg(m_alpha, m_x));
      emit(ml_o, buf);
    } else if (v_cmd->parsed()) {
      const Config cfg = load_config(conv_o);
      ExperimentConfig ec = ExperimentConfig::from_config(cfg);
      if (conv_o.threads > 1) ec.threads = conv_o.threads;
      const ConvergenceReport rep = convergence_study(ec);
      std::ostringstream os;
      if (conv_o.format == "json") rep.write_json(os);
      else rep.write_csv(os);
      emit(conv_o, os.str());
    } else if (f_cmd->parsed()) {
      const Config cfg = load_config(fastcmp_o);
      ExperimentConfig ec = ExperimentConfig::from_config(cfg);
      const int j = cfg.get_int_or("fast_compare", "J", 9);
      const int m = cfg.get_int_or("fast_compare", "m", 1);
      const double eps = cfg.get_real_or("fast_compare", "eps", 1e-10);
      const FastCompareResult r = fast_compare(ec, j, m, eps);
      std::ostringstream os;
      write_fast_compare_csv(os, r);
      emit(fastcmp_o, os.str());
    } else if (b_cmd->parsed()) {
      const auto rows = bench_history(b_alpha, b_log2, b_eps);
      std::ostringstream os;
      write_bench_csv(os, rows);
      emit(bench_o, os.str());
    } else if (s_cmd->parsed()) {
      const Config cfg = load_config(snap_o);
      const auto alphas = cfg.get_real_list_or("snapshot", "alphas", {0.2, 0.5, 0.8});
      const auto times = cfg.get_real_list_or("snapshot", "times", {1.0, 5.0, 10.0, 20.0});
      const double tau = cfg.get_real_or("snapshot", "tau", 0.01);
      const int res = cfg.get_int_or("snapshot", "spatial_res", 32);
      const auto entries = snapshot_study(alphas, times, tau, res);
      if (!s_grid_prefix.empty()) {
        for (const auto& e : entries) {
          char name[256];
          std::snprintf(name, sizeof(name), "%s_a%.2f_t%g.csv", s_grid_prefix.c_str(), e.alpha,
                        e.t);
          std::ofstream g(name);
          if (!g) throw ConfigError(std::string("cannot open grid file '") + name + "'");
          std::ostringstream os;
          write_snapshot_csv(os, e);
          g << os.str();
        }
      }
      std::ostringstream os;
      write_snapshot_norms_csv(os, entries);
      emit(snap_o, os.str());
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
