#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "fracstep/corrections.hpp"

using namespace fracstep;

TEST_CASE("sigma suggestion heuristic") {
  const auto s1 = suggest_sigmas(0.2, 3, true);
  REQUIRE(s1.size() == 3);
  CHECK(s1[0] == doctest::Approx(0.2));
  CHECK(s1[1] == doctest::Approx(0.4));
  CHECK(s1[2] == doctest::Approx(0.6));

  const auto s2 = suggest_sigmas(0.8, 4, false);
  REQUIRE(s2.size() == 4);
  CHECK(s2[0] == doctest::Approx(0.8));
  CHECK(s2[1] == doctest::Approx(1.0));
  CHECK(s2[2] == doctest::Approx(1.6));
  CHECK(s2[3] == doctest::Approx(1.8));

  const auto s3 = suggest_sigmas(1.0, 2, true);
  REQUIRE(s3.size() == 2);
  CHECK(s3[0] == doctest::Approx(1.0));
  CHECK(s3[1] == doctest::Approx(2.0));

  // duplicates collapse (1 + 0*a == 0 + 2*a at alpha = 1/2)
  const auto s4 = suggest_sigmas(0.5, 3, false);
  REQUIRE(s4.size() == 3);
  CHECK(s4[0] == doctest::Approx(0.5));
  CHECK(s4[1] == doctest::Approx(1.0));
  CHECK(s4[2] == doctest::Approx(1.5));
}

TEST_CASE("correction config validation") {
  CorrectionConfig ok{{0.5, 1.0, 1.5}};
  CHECK_NOTHROW(ok.validate());
  CHECK(ok.m() == 3);

  CorrectionConfig unsorted{{1.0, 0.5}};
  CHECK_THROWS_AS(unsorted.validate(), std::invalid_argument);
  CorrectionConfig nonpos{{0.0, 0.5}};
  CHECK_THROWS_AS(nonpos.validate(), std::invalid_argument);
  CorrectionConfig toolong{{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}};
  CHECK_THROWS_AS(toolong.validate(), std::invalid_argument);
}

TEST_CASE("gamma ratio") {
  CHECK(gamma_ratio(0.5, 0.5) == doctest::Approx(0.88622692545275801365).epsilon(1e-14));
  CHECK(gamma_ratio(1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("starting weights for the Gruenwald family, one correction") {
  const GeneratingFunction gf = GeneratingFunction::fbdf1(0.5);
  const CorrectionConfig cfg{{0.5}};
  const StartingWeightTable tab = starting_weights(gf, cfg, 8);
  // normalized system by hand: w_{1,1} = Gamma(1.5) - 1,
  // w_{2,1} = Gamma(1.5) - (omega_1 + omega_0 sqrt(2))
  CHECK(tab.at(1, 1) == doctest::Approx(-0.11377307454724198635).epsilon(1e-13));
  CHECK(tab.at(2, 1) == doctest::Approx(-0.027986636920337035153).epsilon(1e-12));
}

TEST_CASE("empty table for m = 0") {
  const StartingWeightTable tab =
      starting_weights(GeneratingFunction::fbdf2(0.5), CorrectionConfig{}, 16);
  CHECK(tab.empty());
  CHECK(tab.m == 0);
}

TEST_CASE("FFT right-hand-side path agrees with the direct path") {
  // same rows computed with n_max below and above the FFT threshold
  const GeneratingFunction gf = GeneratingFunction::fbdf2(0.4);
  const CorrectionConfig cfg{{0.4, 0.8}};
  const StartingWeightTable small = starting_weights(gf, cfg, 4096);
  const StartingWeightTable big = starting_weights(gf, cfg, 20000);
  double worst = 0.0;
  for (int n = 1; n <= 4096; ++n)
    for (int j = 1; j <= 2; ++j)
      worst = std::max(worst, std::fabs(small.at(n, j) - big.at(n, j)));
  CHECK(worst <= 1e-10);
}

TEST_CASE("starting weight decay") {
  // |w_{n,k}| ~ n^{max(-alpha-1, sigma_m - p - alpha)}
  for (double alpha : {0.2, 0.5, 0.8}) {
    const GeneratingFunction gf = GeneratingFunction::fbdf2(alpha);
    CorrectionConfig cfg;
    cfg.sigmas = {alpha, 2 * alpha};
    const int n_max = 2048;
    const StartingWeightTable tab = starting_weights(gf, cfg, n_max);
    const double bound = std::max(-alpha - 1.0, 2 * alpha - 2.0 - alpha);
    for (int k = 1; k <= 2; ++k) {
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      int cnt = 0;
      for (int n = n_max / 2; n <= n_max; ++n) {
        const double w = std::fabs(tab.at(n, k));
        if (w == 0.0) continue;
        const double x = std::log(n), y = std::log(w);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++cnt;
      }
      REQUIRE(cnt > 100);
      const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
      CAPTURE(alpha);
      CAPTURE(k);
      CHECK(slope <= bound + 0.2);
    }
  }
}

TEST_CASE("condition number of the un-normalized system") {
  CHECK(condition_number(CorrectionConfig{{0.7}}, 0.1) == doctest::Approx(1.0));

  auto k_alpha = [](double alpha, int m) {
    CorrectionConfig c;
    for (int k = 1; k <= m; ++k) c.sigmas.push_back(k * alpha);
    return c;
  };
  const double c2 = condition_number(k_alpha(0.8, 2), 0.1);
  const double c4 = condition_number(k_alpha(0.8, 4), 0.1);
  CHECK(c4 > c2);

  const double c45 = condition_number(k_alpha(0.5, 4), 0.1);
  CHECK(std::isfinite(c45));
  CHECK(c45 < 1e14);
}

TEST_CASE("ill-conditioned exponent sets are rejected") {
  // nearly coincident exponents make the columns of j^{sigma_k} dependent
  CorrectionConfig bad;
  for (int k = 0; k < 6; ++k) bad.sigmas.push_back(1.0 + 1e-9 * k);
  CHECK_THROWS_AS((void)starting_weights(GeneratingFunction::fbdf2(0.5), bad, 4),
                  std::runtime_error);
}
