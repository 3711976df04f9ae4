#pragma once

#include <vector>

#include "fracstep/series.hpp"

namespace fracstep {

// Correction exponents sigma_1 < ... < sigma_m targeted by the starting
// weights. m = 0 (empty) means no corrections.
struct CorrectionConfig {
  std::vector<double> sigmas;

  int m() const { return static_cast<int>(sigmas.size()); }
  void validate() const;  // throws std::invalid_argument
};

// Exponent choice heuristic: k*alpha when f vanishes at zero (or the problem
// is linear homogeneous), otherwise the m smallest positive elements of
// {l + j*alpha : l, j nonnegative integers}.
std::vector<double> suggest_sigmas(double alpha, int m, bool f_vanishes_at_zero);

// Gamma(sigma+1) / Gamma(sigma+1-alpha).
double gamma_ratio(double sigma, double alpha);

// Starting weights w_{n,j}, rows n = 1..n_max, columns j = 1..m.
struct StartingWeightTable {
  int m = 0;
  int n_max = 0;
  std::vector<double> w;  // row-major, (n-1)*m + (j-1)

  bool empty() const { return m == 0; }
  double at(int n, int j) const {
    return w[static_cast<std::size_t>(n - 1) * static_cast<std::size_t>(m) +
             static_cast<std::size_t>(j - 1)];
  }
};

// Solves, for every n, the dimensionless m x m system
//   sum_{j=1}^m j^{sigma_k} w_{n,j}
//     = Gamma(sigma_k+1)/Gamma(sigma_k+1-alpha) n^{sigma_k-alpha}
//       - sum_{j=0}^n omega_{n-j} j^{sigma_k},          k = 1..m.
// The coefficient matrix is factored once and reused across n. Throws if the
// system is ill-conditioned (estimate > 1e14) or m exceeds the hard cap 8.
StartingWeightTable starting_weights(const CoeffSeries& omega, double alpha,
                                     const CorrectionConfig& cfg, int n_max);
StartingWeightTable starting_weights(const GeneratingFunction& gf,
                                     const CorrectionConfig& cfg, int n_max);

// 2-norm condition number of the un-normalized matrix (t_j^{sigma_k}),
// t_j = j*tau, as used for the conditioning report.
double condition_number(const CorrectionConfig& cfg, double tau);

}  // namespace fracstep
