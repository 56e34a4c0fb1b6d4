#include "shl/elliptic.hpp"

#include <algorithm>
#include <cmath>

#include "shl/errors.hpp"
#include "shl/ode.hpp"
#include "shl/transform.hpp"

namespace shl {
namespace {

constexpr double kUStop = 1e-2;   // switch to the local crossing model
constexpr double kLMax = 1.0;     // integrate r up to e (no crossing -> fail)

// Frozen-coefficient crossing distance. From the state (l, u, u') the first
// integral of u'' = -A/u^3 with A = e^{2l} f(u) u^3 gives
//   u'^2 = C + A/u^2,  C = u'^2 - A/u^2,
// and the remaining log-radius to u = 0 is (sqrt(C u^2 + A) - sqrt(A))/C.
// For A -> 0 (regular crossing) this degenerates to u/|u'|.
double crossing_distance(double u, double up, double A) {
  double C = up * up - A / (u * u);
  double num = std::sqrt(C * u * u + A) - std::sqrt(A);
  if (std::abs(C) < 1e-12 * up * up) return 0.5 * u * u / std::sqrt(A);
  return num / C;
}

}  // namespace

ShootResult build_singular_profile(const Nonlinearity& f, double r_seed,
                                   double ode_tol, const GridParams& gp) {
  if (r_seed > 1e-6) throw DomainError("build_singular_profile: r_seed must be <= 1e-6");
  // keep the seed below the innermost node of any grid with R <= e
  double r_seed_eff = std::min(r_seed, std::exp(-(gp.rho_max + 2.0)));
  double l0 = std::log(r_seed_eff);
  double u0 = eval_tilde_u(f, r_seed_eff);
  double up0 = r_seed_eff * tilde_u_prime(f, r_seed_eff);

  auto rhs = [&](double l, const std::array<double, 2>& y) {
    double u = std::max(y[0], 0.0);
    double fu;
    if (u == 0.0) {
      // continuation for stages that peek past the root
      fu = (f.variant() == Variant::Model) ? 0.0 : f.evaluate(0.0, 0);
    } else {
      fu = std::exp(f.log_f(u));
    }
    return std::array<double, 2>{y[1], -std::exp(2.0 * l) * fu};
  };

  // pass 1: locate the zero crossing; the checkpoint stride shrinks with u
  // so that a square-root contact (pure model) is observed before the rhs
  // becomes untraversable.
  Dp45 ode(rhs, l0, {u0, up0}, ode_tol, ode_tol * 1e-2, 0.02);
  double l_star = 0.0;
  bool found = false;
  double l_prev = l0;
  std::array<double, 2> y_prev = {u0, up0};
  while (ode.x() < kLMax) {
    double u_here = std::max(ode.y()[0], 1e-3);
    double stride = std::min(0.02, 0.25 * u_here * u_here);
    double l_next = std::min(ode.x() + stride, kLMax);
    ode.integrate_to(l_next);
    double u = ode.y()[0], up = ode.y()[1];
    if (u <= 0.0) {
      // regular crossing inside (l_prev, l_next): bisect by re-integration
      double lo = l_prev, hi = ode.x();
      for (int it = 0; it < 60 && hi - lo > 1e-13; ++it) {
        double mid = 0.5 * (lo + hi);
        Dp45 probe(rhs, l_prev, y_prev, ode_tol, ode_tol * 1e-2, 0.02);
        probe.integrate_to(mid);
        (probe.y()[0] > 0.0 ? lo : hi) = mid;
      }
      l_star = 0.5 * (lo + hi);
      found = true;
      break;
    }
    if (u < kUStop && up < 0.0) {
      // fire the frozen-coefficient exit only for a singular contact
      // (u'^2 ~ A/u^2, i.e. the first-integral constant C nearly cancels)
      double A = std::exp(2.0 * ode.x() + f.log_f(u)) * u * u * u;
      double C = up * up - A / (u * u);
      if (C < 0.75 * up * up) {
        l_star = ode.x() + crossing_distance(u, up, A);
        found = true;
        break;
      }
    }
    l_prev = ode.x();
    y_prev = ode.y();
  }
  if (!found)
    throw ConstructionError(
        "build_singular_profile: no zero crossing below r = e (hypotheses?)");

  ShootResult out;
  out.R = std::exp(l_star);
  out.r_seed_used = r_seed_eff;
  out.ode_tol = ode_tol;

  auto grid = RadialGrid::make(out.R, gp.n, gp.rho_max);
  if (grid->r_min() <= r_seed_eff)
    throw ConstructionError("build_singular_profile: grid deeper than seed");

  // pass 2: land on every grid node (innermost first)
  out.U = RadialField(grid);
  out.U.du_dr = std::vector<double>(grid->n, 0.0);
  Dp45 fill(rhs, l0, {u0, up0}, ode_tol, ode_tol * 1e-2, 0.02);
  for (int i = grid->n - 1; i >= 1; --i) {
    fill.integrate_to(std::log(grid->r[i]));
    out.U.u[i] = std::max(fill.y()[0], 0.0);
    (*out.U.du_dr)[i] = fill.y()[1] / grid->r[i];
  }
  out.U.u[0] = 0.0;  // wall (r = R) by construction of R
  (*out.U.du_dr)[0] = (*out.U.du_dr)[1];  // wall slope may be unbounded; report the nearest state
  out.ode_steps = fill.steps();
  return out;
}

EllipticResidual fd_elliptic_residual(const Nonlinearity& f,
                                      const RadialField& U,
                                      double r_cut_frac) {
  const auto& g = *U.grid;
  EllipticResidual res;
  res.residual = RadialField(U.grid);
  res.r_cut = r_cut_frac * g.R;
  double h2 = g.h * g.h;
  auto w = annulus_weights(g);
  const double two_pi = 2.0 * M_PI;
  for (int i = 1; i + 1 < g.n; ++i) {
    double lap = (U.u[i - 1] - 2.0 * U.u[i] + U.u[i + 1]) / (h2 * g.r[i] * g.r[i]);
    double fu = U.u[i] > 0.0 ? std::exp(f.log_f(U.u[i])) : f.evaluate(0.0, 0);
    double v = -lap - fu;
    res.residual.u[i] = v;
    if (g.r[i] >= res.r_cut) {
      res.l1 += two_pi * w[i] * std::abs(v);
      res.linf = std::max(res.linf, std::abs(v));
      if (g.r[i] <= 0.9 * g.R)
        res.linf_window = std::max(res.linf_window, std::abs(v));
    }
  }
  return res;
}

double TestBump::value(double r) const {
  switch (kind) {
    case Kind::Zero:
      return 0.0;
    case Kind::Center: {
      if (r >= rho0) return 0.0;
      double x = r / rho0;
      double t = 1.0 - x * x;
      return t * t * t;
    }
    case Kind::Ring: {
      if (r <= a || r >= b) return 0.0;
      double c = 0.25 * (b - a) * (b - a);
      double s = (r - a) * (b - r) / c;
      return s * s * s * s;
    }
  }
  return 0.0;
}

double TestBump::laplacian(double r) const {
  switch (kind) {
    case Kind::Zero:
      return 0.0;
    case Kind::Center: {
      if (r >= rho0) return 0.0;
      double x = r / rho0;
      double t = 1.0 - x * x;
      // phi'' + phi'/r with phi = (1-x^2)^3
      return (12.0 / (rho0 * rho0)) * t * (3.0 * x * x - 1.0);
    }
    case Kind::Ring: {
      if (r <= a || r >= b) return 0.0;
      double c = 0.25 * (b - a) * (b - a);
      double s = (r - a) * (b - r) / c;
      double sp = (a + b - 2.0 * r) / c;
      double spp = -2.0 / c;
      double phi_rr = 12.0 * s * s * sp * sp + 4.0 * s * s * s * spp;
      double phi_r = 4.0 * s * s * s * sp;
      return phi_rr + phi_r / r;
    }
  }
  return 0.0;
}

double distributional_pairing(const Nonlinearity& f, const RadialField& U,
                              const TestBump& phi, double r_min_override) {
  const auto& g = *U.grid;
  double support_max = phi.kind == TestBump::Kind::Ring ? phi.b : phi.rho0;
  if (phi.kind != TestBump::Kind::Zero && support_max > g.R * (1.0 + 1e-12))
    throw DomainError("distributional_pairing: test function not supported in the disc");
  auto w = annulus_weights(g);
  double acc = 0.0;
  for (int i = 0; i < g.n; ++i) {
    if (g.r[i] < r_min_override) break;
    double p = phi.value(g.r[i]);
    double lp = phi.laplacian(g.r[i]);
    if (p == 0.0 && lp == 0.0) continue;
    double fu = U.u[i] > 0.0 ? std::exp(f.log_f(U.u[i])) : f.evaluate(0.0, 0);
    acc += w[i] * (U.u[i] * lp + fu * p);
  }
  return 2.0 * M_PI * acc;
}

IntegrabilityReport integrability_report(const Nonlinearity& f,
                                         const RadialField& U) {
  const auto& g = *U.grid;
  IntegrabilityReport rep;
  for (double c : {1e-3, 1e-4, 1e-5, 1e-6})
    if (c >= g.r_min()) rep.cutoffs.push_back(c);
  if (rep.cutoffs.size() < 2)
    throw DomainError("integrability_report: grid must reach r <= 1e-4");
  auto w = annulus_weights(g);
  const double two_pi = 2.0 * M_PI;
  for (double cut : rep.cutoffs) {
    double i1 = 0, i2 = 0, j2 = 0, j4 = 0;
    for (int i = 0; i < g.n; ++i) {
      if (g.r[i] < cut) break;
      double u = U.u[i];
      if (u <= 0.0) continue;  // support boundary carries no mass
      double fu = std::exp(f.log_f(u));
      i1 += w[i] * fu;
      i2 += w[i] * fu * fu;
      j2 += w[i] * u * u;
      j4 += w[i] * u * u * u * u;
    }
    rep.I1.push_back(two_pi * i1);
    rep.I2.push_back(two_pi * i2);
    rep.J2.push_back(two_pi * j2);
    rep.J4.push_back(two_pi * j4);
  }
  size_t m = rep.cutoffs.size();
  rep.I1_rel_change =
      std::abs(rep.I1[m - 1] - rep.I1[m - 2]) / std::abs(rep.I1[m - 1]);
  rep.I1_cauchy = true;
  for (size_t k = 2; k < m; ++k) {
    double d_prev = std::abs(rep.I1[k - 1] - rep.I1[k - 2]);
    double d_cur = std::abs(rep.I1[k] - rep.I1[k - 1]);
    if (d_cur > d_prev) rep.I1_cauchy = false;
  }
  rep.I2_growth_per_decade = rep.I2[m - 1] / rep.I2[m - 2];
  rep.I2_divergent = true;
  for (size_t k = 1; k < m; ++k)
    if (rep.I2[k] < 3.0 * rep.I2[k - 1]) rep.I2_divergent = false;
  rep.J_converged = true;
  for (size_t k = 2; k < m; ++k) {
    if (std::abs(rep.J2[k] - rep.J2[k - 1]) >
        std::abs(rep.J2[k - 1] - rep.J2[k - 2]))
      rep.J_converged = false;
    if (std::abs(rep.J4[k] - rep.J4[k - 1]) >
        std::abs(rep.J4[k - 1] - rep.J4[k - 2]))
      rep.J_converged = false;
  }
  return rep;
}

}  // namespace shl
