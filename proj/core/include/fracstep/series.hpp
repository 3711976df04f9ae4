#pragma once

#include <span>
#include <string>
#include <vector>

namespace fracstep {

// Quadrature families. The first four define omega^(alpha)(z) and can drive
// the time stepper; the two Crank-Nicolson variants only define b(z) and are
// carried for the coefficient checks.
enum class Family { FBDF1, FBDF2, GNGF2, BNTheta, CNLinear, CNBinom };

std::string family_name(Family f);
Family family_from_name(const std::string& name);  // throws std::invalid_argument

struct GeneratingFunction {
  Family family = Family::FBDF2;
  double alpha = 0.5;  // fractional order, 0 < alpha <= 1
  double theta = 0.0;  // BN-theta only, 0 <= theta <= 1/2

  int order() const;       // nominal convergence order p
  bool has_omega() const;  // false for the CN variants
  void validate() const;   // throws std::invalid_argument

  static GeneratingFunction fbdf1(double alpha);
  static GeneratingFunction fbdf2(double alpha);
  static GeneratingFunction gngf2(double alpha);
  static GeneratingFunction bn_theta(double alpha, double theta);
  static GeneratingFunction cn_linear(double alpha);
  static GeneratingFunction cn_binom(double alpha);
};

enum class SeriesKind { Omega, ABeta, B, BHat, C };

// Truncated power series c_0..c_N of one of the coefficient families.
struct CoeffSeries {
  double alpha = 0.0;
  SeriesKind kind = SeriesKind::ABeta;
  std::vector<double> values;

  int max_index() const { return static_cast<int>(values.size()) - 1; }
  double operator[](int n) const { return values[static_cast<std::size_t>(n)]; }
};

// Coefficients of (1-z)^beta via a_0 = 1, a_n = a_{n-1} (n-1-beta)/n.
CoeffSeries binomial_coeffs(double beta, int n_max);

// Convolution weights: Taylor coefficients of omega^(alpha)(z).
// Rejects the CN variants (no omega series).
CoeffSeries omega_weights(const GeneratingFunction& gf, int n_max);

// b(z) = (1-z)^alpha / omega^(alpha)(z), by closed form per family.
CoeffSeries b_coeffs(const GeneratingFunction& gf, int n_max);

// Same series computed by long division of (1-z)^alpha by omega^(alpha)(z);
// cross-check route for the closed forms. Rejects the CN variants.
CoeffSeries b_coeffs_by_division(const GeneratingFunction& gf, int n_max);

// bhat_n = |b_n|.
CoeffSeries bhat_coeffs(const GeneratingFunction& gf, int n_max);

// c(z) = (2 b_0 - bhat(z)) (1-z)^{-alpha}.
CoeffSeries c_coeffs(const GeneratingFunction& gf, int n_max);

// Cauchy product truncated at n_max; inputs shorter than n_max+1 are
// zero-padded.
CoeffSeries convolve(const CoeffSeries& a, const CoeffSeries& b, int n_max);

struct AssumptionReport {
  std::string family;
  double theta = 0.0;
  double alpha = 0.0;
  int n_checked = 0;
  double b0 = 0.0;
  double tail_sum = 0.0;        // sum_{n=1}^{N} |b_n|
  double c0 = 0.0;
  double min_c = 0.0;           // min c_n over 0 < n <= N
  double decay_exponent = 0.0;  // LS slope of log|b_n| vs log n (NaN if < 2 points)
  bool pass_a = false;          // b0 > 0 and tail_sum <= b0 + tol
  bool pass_c = false;          // c0 > 0 and min_c >= -tol
};

// Numerical check of the summability/sign assumptions behind the convergence
// theory. Failure is a report state, not an error.
AssumptionReport check_assumptions(const GeneratingFunction& gf, int n_max, double tol);

}  // namespace fracstep
