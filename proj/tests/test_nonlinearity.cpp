#include <cmath>
#include <vector>

#include "doctest.h"
#include "shl/errors.hpp"
#include "shl/nonlinearity.hpp"

using namespace shl;

namespace {
constexpr double kE = 2.718281828459045235360287;
// root of beta^4 - beta^2 - 1 = 0: sqrt((1+sqrt 5)/2)
constexpr double kBetaModel2 = 1.2720196495140690;
}  // namespace

TEST_CASE("catalog keys parse and round-trip") {
  for (const char* key : {"model:B=2", "smoothed:B=2", "power_exp:q=2,r=0",
                          "double_exp", "sum_exp:q=2,r=0.5", "model:B=1"}) {
    auto f = Nonlinearity::parse(key);
    CHECK(f.key().substr(0, 3) == std::string(key).substr(0, 3));
  }
  CHECK_THROWS_AS(Nonlinearity::parse("nosuch"), DomainError);
  CHECK_THROWS_AS(Nonlinearity::parse("model:B=0.5"), DomainError);
  CHECK_THROWS_AS(Nonlinearity::parse("sum_exp:q=1,r=0.5"), DomainError);
}

TEST_CASE("evaluate: closed forms of the B=2 model") {
  auto g = Nonlinearity::model(2.0);
  // g(s) = s^-3 e^{s^2}; at s=1 this is e
  CHECK(g.evaluate(1.0, 0) == doctest::Approx(kE).epsilon(1e-14));
  // logarithmic derivative g'/g = 2s - 3/s: check the ratio at s=10
  double ratio = g.evaluate(10.0, 1) / g.evaluate(10.0, 0);
  CHECK(ratio == doctest::Approx(19.7).epsilon(1e-13));
  // f unbounded at 0
  CHECK_THROWS_AS(g.evaluate(0.0, 0), DomainError);
}

TEST_CASE("evaluate: smoothed model constants and C^1 matching") {
  auto f = Nonlinearity::smoothed_model(2.0);
  CHECK(f.b_smooth() == doctest::Approx(std::sqrt(2.5)).epsilon(1e-14));
  double a_expected = std::exp(2.5) / std::pow(2.5, 2.5);
  CHECK(f.a_smooth() == doctest::Approx(a_expected).epsilon(1e-14));
  CHECK(f.evaluate(0.0, 0) == 0.0);
  // value and first-derivative continuity at b
  double b = f.b_smooth();
  double below = f.evaluate(b * (1 - 1e-9), 0), above = f.evaluate(b * (1 + 1e-9), 0);
  CHECK(below == doctest::Approx(above).epsilon(1e-7));
  double dbelow = f.evaluate(b * (1 - 1e-9), 1), dabove = f.evaluate(b * (1 + 1e-9), 1);
  CHECK(dbelow == doctest::Approx(dabove).epsilon(1e-6));
  // b solves b g'(b) = 2 g(b)
  auto g = Nonlinearity::model(2.0);
  CHECK(b * g.evaluate(b, 1) == doctest::Approx(2 * g.evaluate(b, 0)).epsilon(1e-12));
}

TEST_CASE("eval_F: closed forms and monotonicity") {
  auto g = Nonlinearity::model(2.0);
  // F(s) = ((s^2+1)/2) e^{-s^2}; F(1) = e^{-1}
  CHECK(g.eval_F(1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  auto f = Nonlinearity::smoothed_model(2.0);
  CHECK(f.eval_F(std::sqrt(2.5)) ==
        doctest::Approx(1.75 * std::exp(-2.5)).epsilon(1e-14));
  // strictly decreasing for every catalog entry
  for (const char* key : {"model:B=2", "smoothed:B=2", "power_exp:q=2,r=0",
                          "double_exp", "sum_exp:q=2,r=0.5"}) {
    auto spec = Nonlinearity::parse(key);
    double prev = spec.eval_F(0.5);
    for (double s : {1.0, 2.0, 5.0, 8.0}) {
      double cur = spec.eval_F(s);
      CHECK(cur < prev);
      prev = cur;
    }
  }
}

TEST_CASE("eval_F: quadrature route agrees with the closed forms") {
  for (double B : {1.5, 2.0, 3.0}) {
    auto g = Nonlinearity::model(B);
    for (double s : {1.0, 1.7, 3.0}) {
      double closed = g.eval_F(s);
      double quad = g.quadrature_F(s);
      CHECK(quad == doctest::Approx(closed).epsilon(1e-9));
    }
  }
  auto g1 = Nonlinearity::model(1.0);
  for (double s : {0.9, 1.5, 3.0})
    CHECK(g1.quadrature_F(s) == doctest::Approx(g1.eval_F(s)).epsilon(1e-9));
  auto sm = Nonlinearity::smoothed_model(2.0);
  for (double s : {0.5, 1.0, 2.0, 4.0})
    CHECK(sm.quadrature_F(s) == doctest::Approx(sm.eval_F(s)).epsilon(1e-9));
}

TEST_CASE("eval_F_inv: inverse round trip") {
  auto g = Nonlinearity::model(2.0);
  CHECK(g.eval_F_inv(0.36787944117144233) == doctest::Approx(1.0).epsilon(1e-10));
  for (const char* key : {"model:B=2", "smoothed:B=2", "power_exp:q=2,r=0",
                          "double_exp", "sum_exp:q=2,r=0.5"}) {
    auto spec = Nonlinearity::parse(key);
    for (double s : {1.0, 2.0, 5.0}) {
      double y = spec.eval_F(s);
      CHECK(spec.eval_F_inv(y) == doctest::Approx(s).epsilon(1e-9));
    }
  }
  // out-of-range y: the model's F(0+) = B/4 is finite
  CHECK_THROWS_AS(g.eval_F_inv(0.51), DomainError);
  CHECK_THROWS_AS(g.eval_F_inv(-1.0), DomainError);
}

TEST_CASE("round trip F(F_inv(y)) on a log-spaced grid of y") {
  for (const char* key : {"model:B=2", "smoothed:B=2", "power_exp:q=2,r=0"}) {
    auto spec = Nonlinearity::parse(key);
    for (double y = 1e-12; y < 0.2; y *= 100.0) {
      double s = spec.eval_F_inv(y);
      CHECK(spec.eval_F(s) == doctest::Approx(y).epsilon(1e-9));
    }
  }
}

TEST_CASE("f'F: closed-form value at s=10 for the B=2 family") {
  // (2 s^2 - 3)(s^2 + 1)/(2 s^4) at s=10 equals 19897/20000
  double expected = 19897.0 / 20000.0;
  auto g = Nonlinearity::model(2.0);
  CHECK(g.fprimeF(10.0) == doctest::Approx(expected).epsilon(1e-12));
  auto f = Nonlinearity::smoothed_model(2.0);
  CHECK(f.fprimeF(10.0) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("B1/B2: model values and the generic quadrature path") {
  auto g = Nonlinearity::model(2.0);
  // model's own B2 tends to B = 2; frozen desk value at s=5
  CHECK(g.eval_B2(5.0) == doctest::Approx(1.925754317).epsilon(1e-6));
  CHECK(std::abs(g.eval_B2(5.0) - 2.0) < 0.05 * 2.0);
  auto de = Nonlinearity::double_exp();
  CHECK(std::abs(de.eval_B2(4.0) - 1.0) < 0.1);
  // domain guard: needs F < 1
  auto sm = Nonlinearity::smoothed_model(2.0);
  CHECK_THROWS_AS(sm.eval_B1(0.1), DomainError);
}

TEST_CASE("B1 and B2 approach each other along the ladder") {
  for (const char* key : {"power_exp:q=2,r=0", "power_exp:q=3,r=0",
                          "double_exp", "smoothed:B=2"}) {
    auto spec = Nonlinearity::parse(key);
    double gap_small = std::abs(spec.eval_B1(8.0) - spec.eval_B2(8.0));
    double gap_large = std::abs(spec.eval_B1(64.0) - spec.eval_B2(64.0));
    CHECK(gap_large < gap_small);
    CHECK(gap_large < 10.0 * 0.02);  // within 10x the extrapolation tolerance
  }
}

TEST_CASE("estimate_B: extrapolated limits") {
  auto r1 = estimate_B(Nonlinearity::power_exp(2.0, 0.0));
  CHECK(r1.f2_ok);
  CHECK(r1.B_estimate == doctest::Approx(2.0).epsilon(0.025));
  auto r2 = estimate_B(Nonlinearity::power_exp(3.0, 0.0));
  CHECK(r2.f2_ok);
  CHECK(r2.B_estimate == doctest::Approx(1.5).epsilon(0.025));
  auto r3 = estimate_B(Nonlinearity::double_exp());
  CHECK(r3.f2_ok);
  CHECK(r3.B_estimate == doctest::Approx(1.0).epsilon(0.05));
  auto r4 = estimate_B(Nonlinearity::sum_exp(2.0, 0.5));
  CHECK(r4.f2_ok);
  CHECK(r4.B_estimate == doctest::Approx(2.0).epsilon(0.025));
  // |f'F - 1| decreasing along the ladder
  for (size_t j = 1; j < r1.fprimeF_samples.size(); ++j)
    CHECK(std::abs(1.0 - r1.fprimeF_samples[j].second) <
          std::abs(1.0 - r1.fprimeF_samples[j - 1].second));
}

TEST_CASE("estimate_B: degenerate entry is flagged, not thrown") {
  // e^s paired with a forced model: B2 degenerates; the scan reports
  // f2_ok = false with diagnostics instead of raising
  auto f = Nonlinearity::power_exp(1.0, 0.0, 2.0);
  auto rep = estimate_B(f);
  CHECK_FALSE(rep.f2_ok);
  CHECK_FALSE(rep.diagnostics.empty());
}

TEST_CASE("find_beta: pure model root of beta^4 - beta^2 - 1") {
  auto g = Nonlinearity::model(2.0);
  double beta = find_beta(g);
  CHECK(beta == doctest::Approx(kBetaModel2).epsilon(1e-7));
  // both displayed inequalities hold on a dense sample above beta
  for (int k = 0; k < 1000; ++k) {
    double s = beta * std::pow(1e3 / beta, k / 999.0);
    CHECK(g.fprimeF(s) <= 1.0 + 1e-11);
  }
  CHECK(beta - 2.0 * g.P(beta) >= -1e-9);
}

TEST_CASE("find_beta: smoothed model activates on the quadratic branch") {
  auto f = Nonlinearity::smoothed_model(2.0);
  double beta = find_beta(f);
  // both constraints must hold at beta ...
  CHECK(f.fprimeF(beta) <= 1.0 + 1e-9);
  CHECK(beta - 2.0 * f.P(beta) >= -1e-9);
  // ... and beta is minimal: slightly below, f'F exceeds 1
  CHECK(f.fprimeF(0.99 * beta) > 1.0);
  // frozen desk value (crossing of f'F = 1 on the quadratic branch)
  CHECK(beta == doctest::Approx(1.0980130764473539).epsilon(1e-6));
}

TEST_CASE("find_beta: power_exp has an admissible beta") {
  auto f = Nonlinearity::power_exp(2.0, 0.0);
  double beta = find_beta(f);
  CHECK(beta > 0.0);
  CHECK(f.fprimeF(beta) <= 1.0 + 1e-9);
  CHECK(beta - 2.0 * f.P(beta) >= -1e-8);
}

TEST_CASE("first derivative positivity beyond the per-variant threshold") {
  auto g = Nonlinearity::model(2.0);
  for (double s : {1.3, 2.0, 5.0, 20.0}) CHECK(g.evaluate(s, 1) > 0.0);
  auto f = Nonlinearity::smoothed_model(2.0);
  for (double s : {0.1, 1.0, f.b_smooth(), 3.0, 10.0}) CHECK(f.evaluate(s, 1) > 0.0);
  auto pe = Nonlinearity::power_exp(2.0, 0.0);
  for (double s : {0.1, 1.0, 10.0}) CHECK(pe.evaluate(s, 1) > 0.0);
}

TEST_CASE("Lemma 4.2 bound: t f(F_inv(t)) stays bounded and decays (model 2)") {
  auto g = Nonlinearity::model(2.0);
  double beta = find_beta(g);
  double t_hi = g.eval_F(beta);
  double prev = 1e300;
  // t f(F^{-1}(t)) ~ 1/(2s) with t = F(s): decreasing toward 0 as t -> 0
  for (double t = t_hi; t > 1e-14; t *= 1e-2) {
    double s = g.eval_F_inv(t);
    double val = t * g.evaluate(s, 0);
    CHECK(val < prev);
    CHECK(std::isfinite(val));
    prev = val;
  }
}

TEST_CASE("log-space evaluation survives arguments that overflow linearly") {
  auto pe = Nonlinearity::power_exp(2.0, 0.0);
  // e^{s^2} at s = 128 overflows double; the log forms must not
  CHECK(std::isfinite(pe.log_f(128.0)));
  CHECK(std::isfinite(pe.log_F(128.0)));
  CHECK(pe.log_F(128.0) < -16000.0);
  CHECK(std::isfinite(pe.B2_inv(128.0)));
  auto de = Nonlinearity::double_exp();
  CHECK(std::isfinite(de.log_F(128.0)));
  CHECK(std::isfinite(de.B2_inv(128.0)));
}
