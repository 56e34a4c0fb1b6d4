#include <cmath>

#include "doctest.h"
#include "shl/elliptic.hpp"
#include "shl/errors.hpp"
#include "shl/transform.hpp"

using namespace shl;

TEST_CASE("shooting reproduces the exact model solution with R = 1") {
  auto g = Nonlinearity::model(2.0);
  auto res = build_singular_profile(g, 1e-6, 1e-9, {2048, 12.0});
  CHECK(std::abs(res.R - 1.0) <= 1e-6);
  const auto& grid = *res.U.grid;
  double worst = 0.0;
  for (int i = 0; i < grid.n; ++i) {
    double r = grid.r[i];
    if (r < 1e-4 || r > 0.99) continue;
    double v = std::sqrt(-2.0 * std::log(r));
    worst = std::max(worst, std::abs(res.U.u[i] - v) / v);
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("shooting: smoothed model matches v on the deep region, R > 1") {
  auto f = Nonlinearity::smoothed_model(2.0);
  auto res = build_singular_profile(f, 1e-6, 1e-9, {2048, 12.0});
  // frozen desk value of the first zero crossing
  CHECK(res.R == doctest::Approx(1.5391095).epsilon(2e-6));
  const auto& grid = *res.U.grid;
  for (int i = 0; i < grid.n; ++i) {
    double r = grid.r[i];
    if (r > 0.2) continue;  // U = v exactly while U >= b
    double v = std::sqrt(-2.0 * std::log(r));
    CHECK(std::abs(res.U.u[i] - v) < 1e-8 * v);
  }
  // positivity and monotonic decrease in r
  for (int i = 1; i < grid.n; ++i) {
    CHECK(res.U.u[i] >= 0.0);
    CHECK(res.U.u[i] >= res.U.u[i - 1] - 1e-12);  // r decreases with i
  }
}

TEST_CASE("shooting: seed stability") {
  auto f = Nonlinearity::smoothed_model(2.0);
  auto a = build_singular_profile(f, 1e-6, 1e-9, {512, 10.0});
  auto b = build_singular_profile(f, 5e-7, 1e-9, {512, 10.0});
  CHECK(std::abs(a.R - b.R) < 1e-8);
  double worst = 0.0;
  for (int i = 0; i < a.U.grid->n; ++i)
    if (a.U.grid->r[i] >= 1e-3)
      worst = std::max(worst, std::abs(a.U.u[i] - b.U.u[i]));
  CHECK(worst <= 10.0 * 1e-9);
}

TEST_CASE("shooting rejects a seed that is not small enough") {
  auto f = Nonlinearity::smoothed_model(2.0);
  CHECK_THROWS_AS(build_singular_profile(f, 1e-3, 1e-9, {512, 10.0}),
                  DomainError);
}

TEST_CASE("fd_elliptic_residual: constant field gives -f(c)") {
  auto f = Nonlinearity::smoothed_model(2.0);
  auto grid = RadialGrid::make(1.0, 256, 8.0);
  RadialField U(grid, 1.5);
  auto res = fd_elliptic_residual(f, U);
  double expected = -f.evaluate(1.5, 0);
  for (int i = 1; i + 1 < grid->n; ++i)
    CHECK(res.residual.u[i] == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("fd_elliptic_residual: O(h^2) on the exact solution, smooth window") {
  auto g = Nonlinearity::model(2.0);
  auto mk = [&](int n) {
    auto grid = RadialGrid::make(1.0, n, 8.0);
    RadialField U(grid);
    for (int i = 0; i < n; ++i)
      U.u[i] = std::sqrt(-2.0 * std::log(std::min(grid->r[i], 1.0 - 1e-15)));
    U.u[0] = 0.0;
    auto res = fd_elliptic_residual(g, U, 1e-2);
    return res.linf_window;
  };
  double e1 = mk(1024), e2 = mk(2048);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.12));
}

TEST_CASE("fd_elliptic_residual: shooting output on the smooth window") {
  auto f = Nonlinearity::smoothed_model(2.0);
  auto shoot = build_singular_profile(f, 1e-6, 1e-9, {2048, 12.0});
  auto res = fd_elliptic_residual(f, shoot.U, 1e-3);
  // pure FD truncation of a profile that solves the ODE to 1e-9
  CHECK(res.linf_window < 1e-2);
  CHECK(res.l1 < 1.0);
}

TEST_CASE("distributional pairing: annulus bump, zero bump, origin bump") {
  auto f = Nonlinearity::smoothed_model(2.0);
  auto shoot = build_singular_profile(f, 1e-6, 1e-9, {4096, 14.0});
  // classical region: the pairing is pure quadrature error, vanishing under
  // grid refinement
  double ring = distributional_pairing(f, shoot.U, TestBump::ring(0.2, 0.8));
  auto fine = build_singular_profile(f, 1e-6, 1e-9, {8192, 14.0});
  double ring_fine =
      distributional_pairing(f, fine.U, TestBump::ring(0.2, 0.8));
  CHECK(std::abs(ring) < 1e-4);
  CHECK(std::abs(ring_fine) < 0.5 * std::abs(ring));
  CHECK(std::abs(ring_fine) < 1e-5);
  // zero test function pairs to exactly zero
  CHECK(distributional_pairing(f, shoot.U, TestBump::zero()) == 0.0);
  // bump carrying the origin: truncated pairing decreases as r_min -> 0
  // (the singular f(U) mass below the cutoff is integrable)
  double p4 = distributional_pairing(f, shoot.U, TestBump::center(0.5), 1e-4);
  double p6 = distributional_pairing(f, shoot.U, TestBump::center(0.5), 1e-6);
  CHECK(std::abs(p6) < std::abs(p4));
  // support violation
  CHECK_THROWS_AS(
      distributional_pairing(f, shoot.U, TestBump::ring(0.2, 2.0 * shoot.R)),
      DomainError);
}

TEST_CASE("integrability profile of the smoothed singular solution") {
  auto f = Nonlinearity::smoothed_model(2.0);
  auto shoot = build_singular_profile(f, 1e-7, 1e-9, {4096, 14.5});
  auto rep = integrability_report(f, shoot.U);
  REQUIRE(rep.cutoffs.size() == 4);
  CHECK(rep.I1_cauchy);
  CHECK(rep.I1_rel_change < 0.05);
  CHECK(rep.I2_divergent);
  CHECK(rep.I2[2] >= 10.0 * rep.I2[0]);  // 1e-5 vs 1e-3
  CHECK(rep.J_converged);
  // frozen desk values (independent adaptive-ODE quadrature)
  CHECK(rep.I1.back() == doctest::Approx(6.2179).epsilon(2e-3));
  CHECK(rep.J2.back() == doctest::Approx(3.6925).epsilon(2e-3));
}

TEST_CASE("J2 for the pure model: 2 pi int (-2 log r) r dr = pi") {
  auto g = Nonlinearity::model(2.0);
  auto shoot = build_singular_profile(g, 1e-7, 1e-9, {4096, 14.5});
  auto rep = integrability_report(g, shoot.U);
  CHECK(rep.J2.back() == doctest::Approx(M_PI).epsilon(0.01));
}

TEST_CASE("check_asymptotics on the smoothed profile") {
  auto f = Nonlinearity::smoothed_model(2.0);
  auto shoot = build_singular_profile(f, 1e-6, 1e-9, {2048, 12.0});
  for (double sigma : {0.05, 0.1, 0.2}) {
    auto rep = check_asymptotics(f, shoot.U, sigma);
    CHECK(rep.found);
    CHECK(rep.r_sigma >= 0.1);
    CHECK(rep.C_lower <= rep.C_upper);
  }
  // sigma = 0 control: the estimates genuinely need sigma > 0
  auto rep0 = check_asymptotics(f, shoot.U, 0.0);
  CHECK(!rep0.violations.empty());
}

TEST_CASE("F(U) ratio against the closed kernel approaches 1") {
  auto f = Nonlinearity::smoothed_model(2.0);
  auto shoot = build_singular_profile(f, 1e-6, 1e-9, {2048, 12.0});
  auto rep = check_asymptotics(f, shoot.U, 0.1);
  REQUIRE(rep.F_ratio.size() > 4);
  // innermost sampled ratio is the closest to 1 (U = v exactly there)
  double first = std::abs(rep.F_ratio.front() - 1.0);
  double last = std::abs(rep.F_ratio.back() - 1.0);
  CHECK(last < first);
  CHECK(last < 1e-6);
}
