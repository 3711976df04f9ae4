#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fracstep/mittag_leffler.hpp"

using namespace fracstep;

#ifndef FRACSTEP_FIXTURE_DIR
#define FRACSTEP_FIXTURE_DIR "tests/fixtures"
#endif

namespace {

struct OracleRow {
  double alpha, x, value;
};

std::vector<OracleRow> load_oracle() {
  std::ifstream in(std::string(FRACSTEP_FIXTURE_DIR) + "/ml_oracle.csv");
  REQUIRE(in.good());
  std::vector<OracleRow> rows;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string tok;
    OracleRow r{};
    std::getline(ss, tok, ',');
    r.alpha = std::stod(tok);
    std::getline(ss, tok, ',');
    r.x = std::stod(tok);
    std::getline(ss, tok, ',');
    r.value = std::stod(tok);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace

TEST_CASE("values at the corners") {
  CHECK(ml_neg(0.7, 0.0) == 1.0);
  CHECK(ml_neg(1.0, 1.0) == doctest::Approx(0.3678794411714423216).epsilon(1e-14));
  // E_{1/2}(-x) = exp(x^2) erfc(x)
  CHECK(ml_neg(0.5, 1.0) == doctest::Approx(0.4275835761558070044).epsilon(1e-12));
  CHECK(ml_neg(0.5, 9.0) == doctest::Approx(0.06230772403777468415).epsilon(1e-12));
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS((void)ml_neg(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS((void)ml_neg(1.2, 1.0), std::invalid_argument);
  CHECK_THROWS_AS((void)ml_neg(0.5, -0.5), std::invalid_argument);
}

TEST_CASE("agrees with the precomputed oracle table to 1e-10") {
  const auto rows = load_oracle();
  REQUIRE(rows.size() > 200);
  for (const auto& r : rows) {
    const double v = ml_neg(r.alpha, r.x);
    CAPTURE(r.alpha);
    CAPTURE(r.x);
    CHECK(std::fabs(v - r.value) <= 1e-10 * std::fabs(r.value));
  }
}

TEST_CASE("positive and strictly decreasing in x") {
  for (double alpha : {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0}) {
    double prev = ml_neg(alpha, 0.0);
    CHECK(prev == 1.0);
    for (int i = 1; i <= 500; ++i) {
      const double x = 0.1 * i;
      const double v = ml_neg(alpha, x);
      CAPTURE(alpha);
      CAPTURE(x);
      CHECK(v > 0.0);
      CHECK(v <= 1.0);
      CHECK(v < prev);
      prev = v;
    }
  }
}

TEST_CASE("branch consistency across the switch points") {
  for (double alpha : {0.3, 0.5, 0.8, 0.9}) {
    const double xt = ml_switch_taylor(alpha);
    for (double f : {0.95, 1.0, 1.05}) {
      const double x = xt * f;
      const double a = ml_neg_branch(alpha, x, MlBranch::Taylor);
      const double b = ml_neg_branch(alpha, x, MlBranch::Integral);
      CAPTURE(alpha);
      CAPTURE(x);
      CHECK(std::fabs(a - b) <= 1e-9 * std::fabs(b));
    }
    const double xa = ml_switch_asymptotic(alpha);
    for (double f : {0.95, 1.0, 1.05}) {
      const double x = xa * f;
      const double a = ml_neg_branch(alpha, x, MlBranch::Asymptotic);
      const double b = ml_neg_branch(alpha, x, MlBranch::Integral);
      CAPTURE(alpha);
      CAPTURE(x);
      CHECK(std::fabs(a - b) <= 1e-9 * std::fabs(b));
    }
  }
}
