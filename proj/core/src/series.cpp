#include "fracstep/series.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fracstep {

std::string family_name(Family f) {
  switch (f) {
    case Family::FBDF1: return "FBDF1";
    case Family::FBDF2: return "FBDF2";
    case Family::GNGF2: return "GNGF2";
    case Family::BNTheta: return "BNTheta";
    case Family::CNLinear: return "CNLinear";
    case Family::CNBinom: return "CNBinom";
  }
  return "?";
}

Family family_from_name(const std::string& name) {
  std::string s;
  for (char c : name) {
    if (c == '-' || c == '_') continue;
    s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  if (s == "fbdf1") return Family::FBDF1;
  if (s == "fbdf2") return Family::FBDF2;
  if (s == "gngf2") return Family::GNGF2;
  if (s == "bntheta") return Family::BNTheta;
  if (s == "cnlinear") return Family::CNLinear;
  if (s == "cnbinom" || s == "cnbinomial") return Family::CNBinom;
  throw std::invalid_argument("unknown quadrature family '" + name + "'");
}

int GeneratingFunction::order() const {
  return family == Family::FBDF1 ? 1 : 2;
}

bool GeneratingFunction::has_omega() const {
  return family != Family::CNLinear && family != Family::CNBinom;
}

void GeneratingFunction::validate() const {
  if (!(alpha > 0.0) || !(alpha <= 1.0) || !std::isfinite(alpha))
    throw std::invalid_argument("fractional order must satisfy 0 < alpha <= 1, got " +
                                std::to_string(alpha));
  if (family == Family::BNTheta) {
    if (!(theta >= 0.0) || !(theta <= 0.5))
      throw std::invalid_argument("BN-theta requires 0 <= theta <= 1/2, got " +
                                  std::to_string(theta));
  } else if (theta != 0.0) {
    throw std::invalid_argument("theta is only meaningful for the BN-theta family");
  }
}

GeneratingFunction GeneratingFunction::fbdf1(double a) { return {Family::FBDF1, a, 0.0}; }
GeneratingFunction GeneratingFunction::fbdf2(double a) { return {Family::FBDF2, a, 0.0}; }
GeneratingFunction GeneratingFunction::gngf2(double a) { return {Family::GNGF2, a, 0.0}; }
GeneratingFunction GeneratingFunction::bn_theta(double a, double t) {
  return {Family::BNTheta, a, t};
}
GeneratingFunction GeneratingFunction::cn_linear(double a) { return {Family::CNLinear, a, 0.0}; }
GeneratingFunction GeneratingFunction::cn_binom(double a) { return {Family::CNBinom, a, 0.0}; }

namespace {

// Coefficients of (q_0 + q_1 z + ... + q_d z^d)^alpha, q_0 > 0, by the
// J.C.P. Miller recurrence: n q_0 w_n = sum_{k=1}^{min(n,d)} ((alpha+1)k - n) q_k w_{n-k}.
std::vector<double> poly_pow(std::span<const double> q, double alpha, int n_max) {
  const int d = static_cast<int>(q.size()) - 1;
  std::vector<double> w(static_cast<std::size_t>(n_max) + 1, 0.0);
  w[0] = std::pow(q[0], alpha);
  for (int n = 1; n <= n_max; ++n) {
    double acc = 0.0;
    const int kmax = std::min(n, d);
    for (int k = 1; k <= kmax; ++k)
      acc += ((alpha + 1.0) * k - n) * q[static_cast<std::size_t>(k)] *
             w[static_cast<std::size_t>(n - k)];
    w[static_cast<std::size_t>(n)] = acc / (n * q[0]);
  }
  return w;
}

// In-place multiply by (c0 + c1 z).
void mul_linear(std::vector<double>& s, double c0, double c1) {
  double prev = 0.0;
  for (double& v : s) {
    const double cur = v;
    v = c0 * cur + c1 * prev;
    prev = cur;
  }
}

}  // namespace

CoeffSeries binomial_coeffs(double beta, int n_max) {
  if (n_max < 0) throw std::invalid_argument("binomial_coeffs: n_max must be >= 0");
  CoeffSeries out;
  out.alpha = beta;
  out.kind = SeriesKind::ABeta;
  out.values.resize(static_cast<std::size_t>(n_max) + 1);
  out.values[0] = 1.0;
  for (int n = 1; n <= n_max; ++n)
    out.values[static_cast<std::size_t>(n)] =
        out.values[static_cast<std::size_t>(n - 1)] * ((n - 1 - beta) / n);
  return out;
}

CoeffSeries omega_weights(const GeneratingFunction& gf, int n_max) {
  gf.validate();
  if (n_max < 0) throw std::invalid_argument("omega_weights: n_max must be >= 0");
  if (!gf.has_omega())
    throw std::invalid_argument(family_name(gf.family) +
                                " defines b(z) only; it has no omega^(alpha)(z) series");
  const double a = gf.alpha;
  CoeffSeries out;
  out.alpha = a;
  out.kind = SeriesKind::Omega;
  switch (gf.family) {
    case Family::FBDF1:
      out.values = binomial_coeffs(a, n_max).values;
      break;
    case Family::FBDF2: {
      const double q[] = {1.5, -2.0, 0.5};
      out.values = poly_pow(q, a, n_max);
      break;
    }
    case Family::GNGF2: {
      out.values = binomial_coeffs(a, n_max).values;
      mul_linear(out.values, 1.0 + a / 2.0, -a / 2.0);
      break;
    }
    case Family::BNTheta: {
      // (1-z)^a (3/2 - z/2 - th(1-z))^a (1 + th a (1-z)); the first two
      // factors combine into ((1-z)(3/2-th + (th-1/2)z))^a, a quadratic power.
      const double th = gf.theta;
      const double q[] = {1.5 - th, 2.0 * th - 2.0, 0.5 - th};
      out.values = poly_pow(q, a, n_max);
      mul_linear(out.values, 1.0 + th * a, -th * a);
      break;
    }
    default:
      break;
  }
  return out;
}

CoeffSeries b_coeffs(const GeneratingFunction& gf, int n_max) {
  gf.validate();
  if (n_max < 0) throw std::invalid_argument("b_coeffs: n_max must be >= 0");
  const double a = gf.alpha;
  CoeffSeries out;
  out.alpha = a;
  out.kind = SeriesKind::B;
  out.values.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
  switch (gf.family) {
    case Family::FBDF1:
      out.values[0] = 1.0;
      break;
    case Family::FBDF2: {
      // b_n = (3/2)^{-a} 3^{-n} a_n^{(-a)}
      const CoeffSeries am = binomial_coeffs(-a, n_max);
      double scale = std::pow(1.5, -a);
      for (int n = 0; n <= n_max; ++n) {
        out.values[static_cast<std::size_t>(n)] = scale * am[n];
        scale /= 3.0;
      }
      break;
    }
    case Family::GNGF2: {
      // b_n = 2/(a+2) * (a/(a+2))^n
      const double rho = a / (2.0 + a);
      double v = 2.0 / (a + 2.0);
      for (int n = 0; n <= n_max; ++n) {
        out.values[static_cast<std::size_t>(n)] = v;
        v *= rho;
      }
      break;
    }
    case Family::BNTheta: {
      // b_n = b_0 sum_{j<=n} a_j^{(-a)} rho1^j rho2^{n-j}, via the O(N)
      // recurrence s_n = rho2 s_{n-1} + a_n^{(-a)} rho1^n.
      const double th = gf.theta;
      const double b0 = std::pow(1.5 - th, -a) / (1.0 + th * a);
      const double rho1 = (1.0 - 2.0 * th) / (3.0 - 2.0 * th);
      const double rho2 = th * a / (1.0 + th * a);
      const CoeffSeries am = binomial_coeffs(-a, n_max);
      double s = 1.0, rho1_pow = 1.0;
      out.values[0] = b0;
      for (int n = 1; n <= n_max; ++n) {
        rho1_pow *= rho1;
        s = rho2 * s + am[n] * rho1_pow;
        out.values[static_cast<std::size_t>(n)] = b0 * s;
      }
      break;
    }
    case Family::CNLinear:
      out.values[0] = 1.0 - a / 2.0;
      if (n_max >= 1) out.values[1] = a / 2.0;
      break;
    case Family::CNBinom: {
      // b_n = 2^{-a} (-1)^n a_n^{(a)}
      const CoeffSeries ap = binomial_coeffs(a, n_max);
      const double scale = std::pow(2.0, -a);
      double sign = 1.0;
      for (int n = 0; n <= n_max; ++n) {
        out.values[static_cast<std::size_t>(n)] = scale * sign * ap[n];
        sign = -sign;
      }
      break;
    }
  }
  return out;
}

CoeffSeries b_coeffs_by_division(const GeneratingFunction& gf, int n_max) {
  const CoeffSeries w = omega_weights(gf, n_max);
  const CoeffSeries num = binomial_coeffs(gf.alpha, n_max);
  CoeffSeries out;
  out.alpha = gf.alpha;
  out.kind = SeriesKind::B;
  out.values.resize(static_cast<std::size_t>(n_max) + 1);
  for (int n = 0; n <= n_max; ++n) {
    double acc = num[n];
    for (int k = 1; k <= n; ++k) acc -= w[k] * out.values[static_cast<std::size_t>(n - k)];
    out.values[static_cast<std::size_t>(n)] = acc / w[0];
  }
  return out;
}

CoeffSeries bhat_coeffs(const GeneratingFunction& gf, int n_max) {
  CoeffSeries out = b_coeffs(gf, n_max);
  out.kind = SeriesKind::BHat;
  for (double& v : out.values) v = std::fabs(v);
  return out;
}

CoeffSeries c_coeffs(const GeneratingFunction& gf, int n_max) {
  const CoeffSeries bh = bhat_coeffs(gf, n_max);
  const CoeffSeries am = binomial_coeffs(-gf.alpha, n_max);
  const double b0 = bh[0];
  CoeffSeries out;
  out.alpha = gf.alpha;
  out.kind = SeriesKind::C;
  out.values.resize(static_cast<std::size_t>(n_max) + 1);
  for (int n = 0; n <= n_max; ++n) {
    double acc = 2.0 * b0 * am[n];
    for (int j = 0; j <= n; ++j) acc -= bh[j] * am[n - j];
    out.values[static_cast<std::size_t>(n)] = acc;
  }
  return out;
}

CoeffSeries convolve(const CoeffSeries& a, const CoeffSeries& b, int n_max) {
  if (n_max < 0) throw std::invalid_argument("convolve: n_max must be >= 0");
  CoeffSeries out;
  out.alpha = a.alpha;
  out.kind = a.kind;
  out.values.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
  const int na = a.max_index(), nb = b.max_index();
  for (int n = 0; n <= n_max; ++n) {
    double acc = 0.0;
    const int jlo = std::max(0, n - nb), jhi = std::min(n, na);
    for (int j = jlo; j <= jhi; ++j) acc += a[j] * b[n - j];
    out.values[static_cast<std::size_t>(n)] = acc;
  }
  return out;
}

namespace {

// LS slope of log|v_n| against log n over [lo, hi], skipping zeros.
double fit_log_slope(const std::vector<double>& v, int lo, int hi) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (int n = std::max(1, lo); n <= hi; ++n) {
    const double a = std::fabs(v[static_cast<std::size_t>(n)]);
    if (a == 0.0) continue;
    const double x = std::log(static_cast<double>(n)), y = std::log(a);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
    ++cnt;
  }
  if (cnt < 2) return std::numeric_limits<double>::quiet_NaN();
  const double det = cnt * sxx - sx * sx;
  return (cnt * sxy - sx * sy) / det;
}

}  // namespace

AssumptionReport check_assumptions(const GeneratingFunction& gf, int n_max, double tol) {
  const CoeffSeries b = b_coeffs(gf, n_max);
  const CoeffSeries c = c_coeffs(gf, n_max);

  AssumptionReport rep;
  rep.family = family_name(gf.family);
  rep.theta = gf.theta;
  rep.alpha = gf.alpha;
  rep.n_checked = n_max;
  rep.b0 = b[0];
  rep.c0 = c[0];

  double tail = 0.0, comp = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    const double t = std::fabs(b[n]) - comp;
    const double s = tail + t;
    comp = (s - tail) - t;
    tail = s;
  }
  rep.tail_sum = tail;

  rep.min_c = std::numeric_limits<double>::infinity();
  for (int n = 1; n <= n_max; ++n) rep.min_c = std::min(rep.min_c, c[n]);
  if (n_max < 1) rep.min_c = 0.0;

  rep.decay_exponent = fit_log_slope(b.values, n_max / 2, n_max);
  if (std::isnan(rep.decay_exponent)) {
    // Geometric tails underflow to zero well before n_max; refit on the
    // last window that still carries nonzero entries.
    int last = 0;
    for (int n = n_max; n >= 1; --n)
      if (b[n] != 0.0) { last = n; break; }
    if (last >= 4) rep.decay_exponent = fit_log_slope(b.values, last / 2, last);
  }

  rep.pass_a = rep.b0 > 0.0 && rep.tail_sum <= rep.b0 + tol;
  rep.pass_c = rep.c0 > 0.0 && rep.min_c >= -tol;
  return rep;
}

}  // namespace fracstep
