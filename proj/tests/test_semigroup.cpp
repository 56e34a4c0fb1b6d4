#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "shl/bessel.hpp"
#include "shl/errors.hpp"
#include "shl/semigroup.hpp"

using namespace shl;

namespace {

// reference values computed with 25-digit arithmetic
struct ZeroRef {
  int k;
  double zero, j1_at_zero;
};
constexpr ZeroRef kZeros[] = {
    {1, 2.40482555769577277, 0.519147497289466788},
    {2, 5.52007811028631065, -0.340264806558368149},
    {3, 8.65372791291101222, 0.27145229992838192},
    {4, 11.7915344390142816, -0.232459831364724779},
    {5, 14.9309177084877859, 0.206546433077996027},
    {6, 18.0710639679109225, -0.187728803040439432},
    {7, 21.211636629879259, 0.17326589422922987},
    {8, 24.3524715307493027, -0.161701550689250004},
    {12, 36.917098353664044, -0.131324626668667931},
    {50, 156.295034268533524, -0.0638217315008148677},
    {100, 313.374266077527845, -0.0450721913033783499},
    {256, 803.462476732113441, -0.0281486326866766545},
    {320, 1004.52437542227245, -0.0251744417399544899}};

struct ValRef {
  double x, j0, j1;
};
constexpr ValRef kVals[] = {
    {0.1, 0.997501562066040032, 0.0499375260362419976},
    {1.0, 0.765197686557966551, 0.440050585744933516},
    {2.0, 0.223890779141235668, 0.576724807756873387},
    {5.0, -0.177596771314338304, -0.327579137591465222},
    {7.5, 0.266339657880378397, 0.135248427579705505},
    {10.0, -0.245935764451348335, 0.0434727461688614367},
    {12.5, 0.146884054700421102, -0.165483804614759718},
    {14.0, 0.171073476110458659, 0.133375154698793253},
    {15.9, -0.164970499485670571, 0.108027890063065089},
    {16.1, -0.183023692465310383, 0.071979418622450257},
    {25.0, 0.0962667832759581162, -0.125350249580289905},
    {100.25, 0.0384273024815013347, -0.0696202846796097138},
    {500.5, -0.0349457682849302547, -0.0071595351693904004},
    {1000.0, 0.0247866861524201746, 0.00472831190708952392}};

GridPtr unit_grid(int n = 2048, double rho_max = 12.0) {
  return RadialGrid::make(1.0, n, rho_max);
}

RadialField sample_mode(const GridPtr& g, double z) {
  RadialField u(g);
  for (int i = 0; i < g->n; ++i) u.u[i] = cyl_j0(z * g->r[i] / g->R);
  return u;
}

}  // namespace

TEST_CASE("cylinder functions: 1e-12 absolute accuracy on [0, 1e3]") {
  CHECK(cyl_j0(0.0) == 1.0);
  CHECK(cyl_j1(0.0) == 0.0);
  for (const auto& v : kVals) {
    CHECK(std::abs(cyl_j0(v.x) - v.j0) <= 1e-12);
    CHECK(std::abs(cyl_j1(v.x) - v.j1) <= 1e-12);
  }
  CHECK(std::abs(cyl_j0(2.404825557695773)) <= 1e-12);
}

TEST_CASE("j0 zeros: refined roots and J1 values") {
  auto z = j0_zeros(320);
  for (const auto& ref : kZeros) {
    CHECK(std::abs(z[ref.k - 1] - ref.zero) <= 1e-12 * ref.zero);
    CHECK(std::abs(cyl_j0(z[ref.k - 1])) <= 1e-12);
    CHECK(std::abs(cyl_j1(z[ref.k - 1]) - ref.j1_at_zero) <= 1e-11);
  }
  for (size_t k = 1; k < z.size(); ++k) CHECK(z[k] > z[k - 1]);
}

TEST_CASE("basis: eigenvalues, norms, prefix property, R scaling") {
  auto b16 = DiscEigenbasis::build(1.0, 16);
  auto b32 = DiscEigenbasis::build(1.0, 32);
  CHECK(b16->lambda[0] == doctest::Approx(5.783185962946785).epsilon(1e-12));
  for (int k = 0; k < 16; ++k) {
    CHECK(b16->zeros[k] == b32->zeros[k]);
    CHECK(b16->norm[k] > 0.0);
    if (k) CHECK(b16->lambda[k] > b16->lambda[k - 1]);
  }
  auto bR2 = DiscEigenbasis::build(2.0, 16);
  for (int k = 0; k < 16; ++k)
    CHECK(bR2->lambda[k] == doctest::Approx(b16->lambda[k] / 4.0).epsilon(1e-14));
}

TEST_CASE("project: orthogonality of a sampled mode") {
  // 1e-8 coefficient orthogonality needs ~8 nodes per wavelength of the
  // highest mode, i.e. n >= 32 K on the log grid; checked at two scales
  {
    auto g = unit_grid(4096, 12.0);
    auto basis = DiscEigenbasis::build(1.0, 32);
    DiscSemigroup sg(basis, g);
    auto p = sg.project(sample_mode(g, basis->zeros[0]));
    CHECK(p.c[0] == doctest::Approx(1.0).epsilon(1e-9));
    for (int k = 1; k < 32; ++k) CHECK(std::abs(p.c[k]) <= 1e-8);
    RadialField z(g);
    auto pz = sg.project(z, OriginPatch::none());
    for (double c : pz.c) CHECK(c == 0.0);
  }
  {
    auto g = unit_grid(8192, 12.0);
    auto basis = DiscEigenbasis::build(1.0, 256);
    DiscSemigroup sg(basis, g);
    auto p = sg.project(sample_mode(g, basis->zeros[0]));
    CHECK(p.c[0] == doctest::Approx(1.0).epsilon(1e-10));
    for (int k = 1; k < 256; ++k) CHECK(std::abs(p.c[k]) <= 1e-8);
  }
  // at the working resolution (n = 2048, K = 256) the top-of-band
  // coefficients are only ~5e-5 accurate; the evolution paths never see
  // this because e^{-lambda_k t} annihilates them at any stored time
  {
    auto g = unit_grid(2048, 12.0);
    auto basis = DiscEigenbasis::build(1.0, 256);
    DiscSemigroup sg(basis, g);
    auto p = sg.project(sample_mode(g, basis->zeros[0]));
    double worst = 0.0;
    for (int k = 1; k < 256; ++k) worst = std::max(worst, std::abs(p.c[k]));
    CHECK(worst <= 1e-4);
  }
}

TEST_CASE("project: Parseval defect small for a smooth field") {
  auto g = unit_grid();
  auto basis = DiscEigenbasis::build(1.0, 256);
  DiscSemigroup sg(basis, g);
  RadialField u(g);
  for (int i = 0; i < g->n; ++i) {
    double r = g->r[i];
    u.u[i] = (1.0 - r * r) * (1.0 + 0.3 * r);  // smooth, zero at the wall
  }
  auto p = sg.project(u);
  double l2 = lp_norm(u, 2.0);
  CHECK(p.parseval_defect <= 1e-8 * l2 * l2);
}

TEST_CASE("heat_apply: eigenmode decay at 1e-8 relative accuracy") {
  auto g = unit_grid();
  auto basis = DiscEigenbasis::build(1.0, 64);
  DiscSemigroup sg(basis, g);
  auto u = sample_mode(g, basis->zeros[0]);
  double t = 0.1;
  auto v = sg.heat_apply(u, t);
  double decay = std::exp(-basis->lambda[0] * t);
  for (int i = 0; i < g->n; ++i) {
    if (std::abs(u.u[i]) < 1e-3) continue;
    CHECK(v.u[i] / u.u[i] == doctest::Approx(decay).epsilon(1e-8));
  }
}

TEST_CASE("heat_apply at t = 0 returns the projection") {
  auto g = unit_grid(1024, 10.0);
  auto basis = DiscEigenbasis::build(1.0, 64);
  DiscSemigroup sg(basis, g);
  RadialField u(g);
  for (int i = 0; i < g->n; ++i) u.u[i] = (1.0 - g->r[i]) * g->r[i];
  auto back = sg.heat_apply(u, 0.0);
  auto direct = sg.synthesize(sg.project(u).c);
  for (int i = 0; i < g->n; ++i)
    CHECK(back.u[i] == doctest::Approx(direct.u[i]).epsilon(1e-14));
}

TEST_CASE("Jensen inequality for concave H with H(0) >= 0") {
  auto g = unit_grid(1024, 10.0);
  auto basis = DiscEigenbasis::build(1.0, 128);
  auto field_basis = DiscEigenbasis::build(1.0, 40);
  DiscSemigroup sg(basis, g);
  std::mt19937_64 rng(424242);
  std::normal_distribution<double> nd(0.0, 1.0);
  auto H = [](double t) { return std::sqrt(std::max(t, 0.0)); };
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    RadialField phi(g);
    for (int m = 0; m < 40; ++m) {
      double a = nd(rng) / ((m + 1.0) * (m + 1.0));
      for (int i = 0; i < g->n; ++i)
        phi.u[i] += a * cyl_j0(field_basis->zeros[m] * g->r[i]);
    }
    for (auto& x : phi.u) x = std::abs(x);
    RadialField Hphi(g);
    for (int i = 0; i < g->n; ++i) Hphi.u[i] = H(phi.u[i]);
    for (double t : {0.01, 0.1}) {
      auto lhs = sg.heat_apply(Hphi, t);
      auto rhs = sg.heat_apply(phi, t);
      for (int i = 0; i < g->n; ++i)
        worst = std::max(worst, lhs.u[i] - H(rhs.u[i]));
    }
  }
  CHECK(worst <= 1e-6);  // truncation-limited slack
}

TEST_CASE("semigroup property: e^{t2}e^{t1} = e^{t1+t2} on smooth data") {
  auto g = unit_grid();
  auto basis = DiscEigenbasis::build(1.0, 128);
  DiscSemigroup sg(basis, g);
  RadialField u(g);
  for (int i = 0; i < g->n; ++i) {
    double r = g->r[i];
    u.u[i] = (1.0 - r * r) * std::exp(-2.0 * r * r);
  }
  auto one = sg.heat_apply(sg.heat_apply(u, 0.03), 0.07);
  auto two = sg.heat_apply(u, 0.1);
  double worst = 0.0;
  for (int i = 0; i < g->n; ++i)
    worst = std::max(worst, std::abs(one.u[i] - two.u[i]));
  CHECK(worst <= 1e-8);
}

TEST_CASE("heat_apply: positivity and sup bound up to truncation") {
  auto g = unit_grid();
  auto basis320 = DiscEigenbasis::build(1.0, 320);
  std::mt19937_64 rng(20240817);
  std::normal_distribution<double> nd(0.0, 1.0);
  auto make_random = [&]() {
    RadialField u(g);
    for (int m = 0; m < 40; ++m) {
      double a = nd(rng) / ((m + 1.0) * (m + 1.0));
      for (int i = 0; i < g->n; ++i)
        u.u[i] += a * cyl_j0(basis320->zeros[m] * g->r[i]);
    }
    for (auto& x : u.u) x = std::abs(x);
    return u;
  };
  auto measure = [&](int K) {
    auto basis = DiscEigenbasis::build(1.0, K);
    DiscSemigroup sg(basis, g);
    double worst_neg = 0.0, worst_sup = 0.0;
    for (int trial = 0; trial < 12; ++trial) {
      auto u = make_random();
      double sup = lp_norm(u, std::numeric_limits<double>::infinity());
      auto v = sg.heat_apply(u, 0.01);
      for (double x : v.u) worst_neg = std::min(worst_neg, x);
      double sup_v = lp_norm(v, std::numeric_limits<double>::infinity());
      worst_sup = std::max(worst_sup, sup_v - sup);
    }
    return std::pair{-worst_neg, worst_sup};
  };
  rng.seed(20240817);
  auto [neg128, sup128] = measure(128);
  rng.seed(20240817);
  auto [neg256, sup256] = measure(256);
  CHECK(neg256 <= std::max(0.5 * neg128, 1e-12));
  CHECK(sup256 <= std::max(sup128, 1e-10));
  CHECK(neg128 < 1e-2);
}

TEST_CASE("duhamel: zero source, constant mode source, time refinement") {
  auto g = unit_grid();
  auto basis = DiscEigenbasis::build(1.0, 32);
  DiscSemigroup sg(basis, g);
  double t = 0.25;

  // zero source -> zero
  std::vector<double> times{0.0, t / 2, t};
  RadialField z(g);
  std::vector<Projection> zs(3, sg.project(z, OriginPatch::none()));
  auto r0 = sg.duhamel(times, zs, t);
  for (double x : r0.u) CHECK(x == 0.0);

  // constant source c * mode1: closed form c (1 - e^{-lambda t})/lambda
  auto mode = sample_mode(g, basis->zeros[0]);
  auto pm = sg.project(mode);
  std::vector<Projection> cs{pm, pm, pm};
  auto r1 = sg.duhamel(times, cs, t);
  double lam = basis->lambda[0];
  double expect = (1.0 - std::exp(-lam * t)) / lam;
  int mid = g->n / 2;
  CHECK(r1.u[mid] == doctest::Approx(expect * mode.u[mid]).epsilon(1e-8));

  // piecewise-linear product integration: smooth-in-time source converges
  // at second order under step refinement
  auto run = [&](int steps) {
    std::vector<double> ts(steps + 1);
    std::vector<Projection> ss(steps + 1, pm);
    for (int j = 0; j <= steps; ++j) {
      ts[j] = t * j / steps;
      ss[j] = pm;
      for (auto& c : ss[j].c) c *= std::cos(3.0 * ts[j]);
    }
    return sg.duhamel(ts, ss, t);
  };
  auto ref = run(512);
  auto e8 = run(8), e16 = run(16);
  double d8 = 0.0, d16 = 0.0;
  for (int i = 0; i < g->n; ++i) {
    d8 = std::max(d8, std::abs(e8.u[i] - ref.u[i]));
    d16 = std::max(d16, std::abs(e16.u[i] - ref.u[i]));
  }
  CHECK(d8 / d16 == doctest::Approx(4.0).epsilon(0.2));
}

TEST_CASE("kernel mass: e^{t Lap} 1 stays within [0 - eps, 1 + eps]") {
  auto g = unit_grid();
  auto basis = DiscEigenbasis::build(1.0, 256);
  DiscSemigroup sg(basis, g);
  RadialField one(g, 1.0);
  for (double t : {0.01, 0.1}) {
    auto v = sg.heat_apply(one, t);
    double lo = 0.0, hi = 0.0;
    for (double x : v.u) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    CHECK(lo >= -2e-3);
    CHECK(hi <= 1.0 + 2e-3);
  }
}

TEST_CASE("contraction of L^p norms under the semigroup") {
  auto g = unit_grid();
  auto basis = DiscEigenbasis::build(1.0, 256);
  DiscSemigroup sg(basis, g);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd(0.0, 1.0);
  RadialField u(g);
  for (int i = 0; i < g->n; ++i) u.u[i] = std::abs(nd(rng)) * (1.0 - g->r[i]);
  auto v = sg.heat_apply(u, 0.05);
  double inf = std::numeric_limits<double>::infinity();
  for (double p : {1.0, 2.0, inf})
    CHECK(lp_norm(v, p) <= lp_norm(u, p) * (1.0 + 1e-6) + 1e-6);
}

TEST_CASE("lp_norm: the model solution has L2 norm sqrt(pi) on the unit disc") {
  auto g = unit_grid(2048, 14.0);
  RadialField u(g);
  for (int i = 0; i < g->n; ++i)
    u.u[i] = std::sqrt(-2.0 * std::log(std::min(g->r[i], 1.0 - 1e-15)));
  u.u[0] = 0.0;
  CHECK(lp_norm(u, 2.0) == doctest::Approx(std::sqrt(M_PI)).epsilon(0.01));
}

TEST_CASE("grid mismatch guards") {
  auto g1 = unit_grid(256, 8.0);
  auto g2 = RadialGrid::make(2.0, 256, 8.0);
  auto basis = DiscEigenbasis::build(1.0, 8);
  DiscSemigroup sg(basis, g1);
  RadialField wrong(g2);
  CHECK_THROWS_AS(sg.project(wrong), DomainError);
  // duhamel needs one source per sample and increasing times
  RadialField z(g1);
  auto pz = sg.project(z, OriginPatch::none());
  CHECK_THROWS_AS(sg.duhamel({0.0, 0.1}, {pz}, 0.1), DomainError);
  Projection bad;
  bad.c.assign(3, 0.0);  // wrong mode count
  CHECK_THROWS_AS(sg.duhamel({0.0, 0.1}, {bad, bad}, 0.1), DomainError);
}

TEST_CASE("y_distance: metric basics") {
  auto g = unit_grid(256, 8.0);
  RadialField a(g, 0.7), b(g, 0.9);
  CHECK(y_distance(a, a) == 0.0);
  CHECK(y_distance(a, b) > 0.0);
  CHECK(y_distance(a, b) < 1.0);  // sum of 2^-k bounds it by 1
  RadialField c(g, 1e9);
  CHECK(y_distance(a, c) < 1.0);
}
