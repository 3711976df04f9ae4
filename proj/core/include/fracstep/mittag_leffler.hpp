#pragma once

namespace fracstep {

// Evaluation branch for E_alpha(-x). Auto picks per (alpha, x); the explicit
// values exist so the seam-consistency tests can force a branch.
enum class MlBranch { Auto, Taylor, Integral, Asymptotic };

// E_alpha(-x) for 0 < alpha <= 1, x >= 0, relative accuracy <= 1e-10 on
// x in [0, 50]. Throws std::invalid_argument outside the domain.
double ml_neg(double alpha, double x);
double ml_neg_branch(double alpha, double x, MlBranch branch);

// Branch switch points (x values): Taylor below the first, asymptotic above
// the second, spectral-integral quadrature in between.
double ml_switch_taylor(double alpha);
double ml_switch_asymptotic(double alpha);

}  // namespace fracstep
