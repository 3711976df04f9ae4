#include "fracstep/corrections.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include "fftw_util.hpp"

namespace fracstep {

namespace {

constexpr int kHardCapM = 8;
constexpr double kCondLimit = 1e14;
// above this table length the right-hand-side convolutions go through FFT
constexpr int kFftConvThreshold = 16384;

// Linear convolution s(n) = sum_{j=0}^{n} a_j b_{n-j}, n = 0..n_max, via a
// zero-padded real FFT.
std::vector<double> fft_convolve(const std::vector<double>& a, const std::vector<double>& b,
                                 int n_max) {
  detail::ensure_planner_thread_safe();
  std::size_t len = 1;
  while (len < 2 * static_cast<std::size_t>(n_max) + 2) len <<= 1;
  detail::FftwBuf ra(len), rb(len);
  detail::FftwComplexBuf ca(len / 2 + 1), cb(len / 2 + 1);
  std::fill(ra.p, ra.p + len, 0.0);
  std::fill(rb.p, rb.p + len, 0.0);
  std::copy(a.begin(), a.begin() + n_max + 1, ra.p);
  std::copy(b.begin(), b.begin() + n_max + 1, rb.p);
  fftw_plan pf = fftw_plan_dft_r2c_1d(static_cast<int>(len), ra.p, ca.p, FFTW_ESTIMATE);
  fftw_execute(pf);
  fftw_execute_dft_r2c(pf, rb.p, cb.p);
  for (std::size_t i = 0; i < len / 2 + 1; ++i) {
    const double re = ca.p[i][0] * cb.p[i][0] - ca.p[i][1] * cb.p[i][1];
    const double im = ca.p[i][0] * cb.p[i][1] + ca.p[i][1] * cb.p[i][0];
    ca.p[i][0] = re;
    ca.p[i][1] = im;
  }
  fftw_plan pb = fftw_plan_dft_c2r_1d(static_cast<int>(len), ca.p, ra.p, FFTW_ESTIMATE);
  fftw_execute(pb);
  fftw_destroy_plan(pf);
  fftw_destroy_plan(pb);
  std::vector<double> out(static_cast<std::size_t>(n_max) + 1);
  for (int n = 0; n <= n_max; ++n) out[static_cast<std::size_t>(n)] = ra.p[n] / static_cast<double>(len);
  return out;
}

std::string sigma_list_str(const std::vector<double>& s) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
  os << "]";
  return os.str();
}

// Singular values by one-sided Jacobi column orthogonalization; accurate for
// small singular values where the normal-equations route is not.
std::vector<double> singular_values(std::vector<double> a, int n) {
  auto col = [&](int j, int i) -> double& { return a[static_cast<std::size_t>(i * n + j)]; };
  for (int sweep = 0; sweep < 60; ++sweep) {
    bool rotated = false;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double app = 0, aqq = 0, apq = 0;
        for (int i = 0; i < n; ++i) {
          app += col(p, i) * col(p, i);
          aqq += col(q, i) * col(q, i);
          apq += col(p, i) * col(q, i);
        }
        if (std::fabs(apq) <= 1e-30 * std::sqrt(app * aqq)) continue;
        rotated = true;
        const double zeta = (aqq - app) / (2.0 * apq);
        const double t = (zeta >= 0 ? 1.0 : -1.0) /
                         (std::fabs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t), s = c * t;
        for (int i = 0; i < n; ++i) {
          const double vp = col(p, i), vq = col(q, i);
          col(p, i) = c * vp - s * vq;
          col(q, i) = s * vp + c * vq;
        }
      }
    }
    if (!rotated) break;
  }
  std::vector<double> sv(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    double nrm = 0;
    for (int i = 0; i < n; ++i) nrm += col(j, i) * col(j, i);
    sv[static_cast<std::size_t>(j)] = std::sqrt(nrm);
  }
  std::sort(sv.begin(), sv.end(), std::greater<double>());
  return sv;
}

// Partial-pivot LU of an m x m matrix, kept with its pivot vector.
struct LuFactors {
  int n = 0;
  std::vector<double> lu;
  std::vector<int> piv;

  void factor(std::vector<double> a, int n_) {
    n = n_;
    lu = std::move(a);
    piv.resize(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
      int p = k;
      for (int i = k + 1; i < n; ++i)
        if (std::fabs(lu[static_cast<std::size_t>(i * n + k)]) >
            std::fabs(lu[static_cast<std::size_t>(p * n + k)]))
          p = i;
      piv[static_cast<std::size_t>(k)] = p;
      if (p != k)
        for (int j = 0; j < n; ++j)
          std::swap(lu[static_cast<std::size_t>(k * n + j)],
                    lu[static_cast<std::size_t>(p * n + j)]);
      const double d = lu[static_cast<std::size_t>(k * n + k)];
      if (d == 0.0) throw std::runtime_error("singular starting-weight matrix");
      for (int i = k + 1; i < n; ++i) {
        double& lik = lu[static_cast<std::size_t>(i * n + k)];
        lik /= d;
        for (int j = k + 1; j < n; ++j)
          lu[static_cast<std::size_t>(i * n + j)] -=
              lik * lu[static_cast<std::size_t>(k * n + j)];
      }
    }
  }

  void solve(std::vector<double>& x) const {
    for (int k = 0; k < n; ++k) {
      const int p = piv[static_cast<std::size_t>(k)];
      if (p != k) std::swap(x[static_cast<std::size_t>(k)], x[static_cast<std::size_t>(p)]);
      for (int i = k + 1; i < n; ++i)
        x[static_cast<std::size_t>(i)] -=
            lu[static_cast<std::size_t>(i * n + k)] * x[static_cast<std::size_t>(k)];
    }
    for (int i = n - 1; i >= 0; --i) {
      for (int j = i + 1; j < n; ++j)
        x[static_cast<std::size_t>(i)] -=
            lu[static_cast<std::size_t>(i * n + j)] * x[static_cast<std::size_t>(j)];
      x[static_cast<std::size_t>(i)] /= lu[static_cast<std::size_t>(i * n + i)];
    }
  }
};

}  // namespace

void CorrectionConfig::validate() const {
  double prev = 0.0;
  for (double s : sigmas) {
    if (!(s > prev) || !std::isfinite(s))
      throw std::invalid_argument("correction exponents must be strictly increasing and "
                                  "positive, got " + sigma_list_str(sigmas));
    prev = s;
  }
  if (m() > kHardCapM)
    throw std::invalid_argument("at most " + std::to_string(kHardCapM) +
                                " correction terms are supported, got " + std::to_string(m()));
}

std::vector<double> suggest_sigmas(double alpha, int m, bool f_vanishes_at_zero) {
  if (m < 1) throw std::invalid_argument("suggest_sigmas: m must be >= 1");
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("suggest_sigmas: 0 < alpha <= 1 required");
  std::vector<double> out;
  if (f_vanishes_at_zero) {
    for (int k = 1; k <= m; ++k) out.push_back(k * alpha);
    return out;
  }
  // m smallest positive values of l + j*alpha, deduplicated.
  std::set<double> vals;
  const int l_max = m + 1;
  const int j_max = static_cast<int>(std::ceil((m + 1) / alpha)) + 1;
  for (int l = 0; l <= l_max; ++l)
    for (int j = 0; j <= j_max; ++j) {
      const double v = l + j * alpha;
      if (v <= 0.0) continue;
      bool dup = false;
      for (double u : vals)
        if (std::fabs(u - v) < 1e-12) { dup = true; break; }
      if (!dup) vals.insert(v);
    }
  for (double v : vals) {
    out.push_back(v);
    if (static_cast<int>(out.size()) == m) break;
  }
  return out;
}

double gamma_ratio(double sigma, double alpha) {
  return std::tgamma(sigma + 1.0) / std::tgamma(sigma + 1.0 - alpha);
}

StartingWeightTable starting_weights(const CoeffSeries& omega, double alpha,
                                     const CorrectionConfig& cfg, int n_max) {
  cfg.validate();
  const int m = cfg.m();
  StartingWeightTable tab;
  tab.m = m;
  tab.n_max = n_max;
  if (m == 0) return tab;
  if (n_max < 1) throw std::invalid_argument("starting_weights: n_max must be >= 1");
  if (omega.max_index() < n_max)
    throw std::invalid_argument("starting_weights: omega series too short");

  // Dimensionless coefficient matrix V[k][j] = j^{sigma_k}.
  std::vector<double> v(static_cast<std::size_t>(m) * static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k)
    for (int j = 0; j < m; ++j)
      v[static_cast<std::size_t>(k * m + j)] =
          std::pow(static_cast<double>(j + 1), cfg.sigmas[static_cast<std::size_t>(k)]);

  const std::vector<double> sv = singular_values(v, m);
  const double cond = sv.front() / sv.back();
  if (!(cond < kCondLimit))
    throw std::runtime_error("starting-weight system too ill-conditioned (cond ~ " +
                             std::to_string(cond) + ") for m = " + std::to_string(m) +
                             ", sigma = " + sigma_list_str(cfg.sigmas));

  LuFactors lu;
  lu.factor(v, m);

  // j^{sigma_k} for j = 1..n_max, one row per k.
  std::vector<std::vector<double>> jpow(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) {
    auto& row = jpow[static_cast<std::size_t>(k)];
    row.resize(static_cast<std::size_t>(n_max) + 1, 0.0);
    for (int j = 1; j <= n_max; ++j)
      row[static_cast<std::size_t>(j)] =
          std::pow(static_cast<double>(j), cfg.sigmas[static_cast<std::size_t>(k)]);
  }
  std::vector<double> gam(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k)
    gam[static_cast<std::size_t>(k)] = gamma_ratio(cfg.sigmas[static_cast<std::size_t>(k)], alpha);

  tab.w.resize(static_cast<std::size_t>(n_max) * static_cast<std::size_t>(m));
  std::vector<double> rhs(static_cast<std::size_t>(m));
  if (n_max > kFftConvThreshold) {
    // long tables (fine bootstrap grids): one FFT convolution per exponent
    std::vector<std::vector<double>> conv(static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k)
      conv[static_cast<std::size_t>(k)] =
          fft_convolve(omega.values, jpow[static_cast<std::size_t>(k)], n_max);
    for (int n = 1; n <= n_max; ++n) {
      for (int k = 0; k < m; ++k)
        rhs[static_cast<std::size_t>(k)] =
            gam[static_cast<std::size_t>(k)] *
                std::pow(static_cast<double>(n),
                         cfg.sigmas[static_cast<std::size_t>(k)] - alpha) -
            conv[static_cast<std::size_t>(k)][static_cast<std::size_t>(n)];
      lu.solve(rhs);
      for (int j = 0; j < m; ++j)
        tab.w[static_cast<std::size_t>(n - 1) * static_cast<std::size_t>(m) +
              static_cast<std::size_t>(j)] = rhs[static_cast<std::size_t>(j)];
    }
    return tab;
  }
  for (int n = 1; n <= n_max; ++n) {
    for (int k = 0; k < m; ++k) {
      const auto& row = jpow[static_cast<std::size_t>(k)];
      double conv = 0.0;
      for (int j = 1; j <= n; ++j) conv += omega[n - j] * row[static_cast<std::size_t>(j)];
      rhs[static_cast<std::size_t>(k)] =
          gam[static_cast<std::size_t>(k)] *
              std::pow(static_cast<double>(n), cfg.sigmas[static_cast<std::size_t>(k)] - alpha) -
          conv;
    }
    lu.solve(rhs);
    for (int j = 0; j < m; ++j)
      tab.w[static_cast<std::size_t>(n - 1) * static_cast<std::size_t>(m) +
            static_cast<std::size_t>(j)] = rhs[static_cast<std::size_t>(j)];
  }
  return tab;
}

StartingWeightTable starting_weights(const GeneratingFunction& gf,
                                     const CorrectionConfig& cfg, int n_max) {
  if (cfg.m() == 0) {
    StartingWeightTable tab;
    tab.n_max = n_max;
    return tab;
  }
  const CoeffSeries omega = omega_weights(gf, n_max);
  return starting_weights(omega, gf.alpha, cfg, n_max);
}

double condition_number(const CorrectionConfig& cfg, double tau) {
  cfg.validate();
  const int m = cfg.m();
  if (m < 1) throw std::invalid_argument("condition_number: m must be >= 1");
  std::vector<double> a(static_cast<std::size_t>(m) * static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k)
    for (int j = 0; j < m; ++j)
      a[static_cast<std::size_t>(k * m + j)] =
          std::pow((j + 1) * tau, cfg.sigmas[static_cast<std::size_t>(k)]);
  const std::vector<double> sv = singular_values(a, m);
  if (sv.back() == 0.0) return std::numeric_limits<double>::infinity();
  return sv.front() / sv.back();
}

}  // namespace fracstep
