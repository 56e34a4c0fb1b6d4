#pragma once

#include <string>
#include <vector>

#include "shl/nonlinearity.hpp"
#include "shl/radial.hpp"

namespace shl {

struct ShootResult {
  double R = 0.0;          // first zero crossing of the profile
  RadialField U;           // resampled on a RadialGrid with that R
  double r_seed_used = 0.0;
  double ode_tol = 0.0;
  long ode_steps = 0;
};

struct GridParams {
  int n = 2048;
  double rho_max = 12.0;
};

// Integrates u'' + u'/r + f(u) = 0 outward from r_seed with data taken from
// the transform (u = tilde u, u' = tilde u' analytically), in the coordinate
// l = log r where the equation reads  u_ll = -e^{2l} f(u).  R is the first
// zero of u; the profile is re-integrated onto the returned grid node by
// node. The seed is deepened automatically so that it lies below the
// innermost node of the requested grid.
ShootResult build_singular_profile(const Nonlinearity& f, double r_seed,
                                   double ode_tol, const GridParams& gp = {});

struct EllipticResidual {
  RadialField residual;          // -(d^2_rho U)/r^2 - f(U), interior nodes
  double l1 = 0.0, linf = 0.0;   // over r >= r_cut
  double r_cut = 0.0;
  double linf_window = 0.0;      // over r in [r_cut, 0.9 R] (smooth region)
};

EllipticResidual fd_elliptic_residual(const Nonlinearity& f,
                                      const RadialField& U,
                                      double r_cut_frac = 1e-3);

// Compactly supported radial test functions with two continuous derivatives.
struct TestBump {
  enum class Kind { Center, Ring, Zero } kind = Kind::Center;
  double rho0 = 0.5;        // Center: support [0, rho0)
  double a = 0.2, b = 0.8;  // Ring: support (a, b)
  double value(double r) const;
  double laplacian(double r) const;
  static TestBump center(double rho0) { return {Kind::Center, rho0, 0, 0}; }
  static TestBump ring(double a, double b) { return {Kind::Ring, 0, a, b}; }
  static TestBump zero() { return {Kind::Zero, 0, 0, 0}; }
};

// 2*pi * int_{r_min}^{R} (U lap(phi) + f(U) phi) r dr  on the grid, truncated
// at max(grid r_min, r_min_override).
double distributional_pairing(const Nonlinearity& f, const RadialField& U,
                              const TestBump& phi, double r_min_override = 0.0);

struct IntegrabilityReport {
  std::vector<double> cutoffs;      // inner truncation radii
  std::vector<double> I1, I2;       // 2 pi int f(U)^p r dr, p = 1, 2
  std::vector<double> J2, J4;       // 2 pi int U^q r dr, q = 2, 4
  bool I1_cauchy = false;           // differences shrinking
  bool I2_divergent = false;        // growth >= 3x per decade
  bool J_converged = false;
  double I1_rel_change = 0.0;       // across the last two cutoffs
  double I2_growth_per_decade = 0.0;
};

IntegrabilityReport integrability_report(const Nonlinearity& f,
                                         const RadialField& U);

}  // namespace shl
