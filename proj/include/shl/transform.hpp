#pragma once

#include <vector>

#include "shl/nonlinearity.hpp"

namespace shl {

struct RadialField;  // radial.hpp

// Explicit model solution v and the closed form of G(v):
//   B > 1: v(r) = (-2 log r)^{1/B'},  B = 1: v(r) = log(-2 log r),
//   G(v(r)) = (B/4) r^2 (1 - 2 log r)  in both cases.
double eval_v(double B, double r);
double dv_dr(double B, double r);
double eval_G_closed(double B, double r);
double v_domain_max(double B);  // 1 for B > 1, 0.99 e^{-1/2} for B = 1

// tilde u = F^{-1}(G(v)) and its analytic radial derivative
// tilde u' = f(tilde u) v' / g(v)  (from F(tilde u) = G(v)).
double eval_tilde_u(const Nonlinearity& f, double r);
double tilde_u_prime(const Nonlinearity& f, double r);

// R1/R2 remainders between the entry and its model pair.
std::pair<double, double> eval_R1_R2(const Nonlinearity& f, double r);

// Residual of the transformed equation
//   -Lap u~ = f(u~) + (u~'^2 / (f F)(u~)) [g'G(v) - f'F(u~)],
// with the radial Laplacian by centered differences in log r (step h) and
// everything else analytic. Identically a finite-difference error when the
// transform is exact.
double transformed_residual(const Nonlinearity& f, double r, double h);

struct TransformDiagnostics {
  std::vector<double> radii;     // strictly decreasing
  std::vector<double> tilde_u;
  std::vector<double> R1, R2;
  std::vector<double> f3_indicator;  // (-log r)^{1/2} (R1+R2)
  std::vector<double> eq_residual;
  bool trend_ok = false;     // non-increasing over the last three decades
  bool terminal_ok = false;  // final indicator <= threshold
  bool pass = false;
  double terminal_value = 0.0;
  double threshold = 1e-2;
};

TransformDiagnostics check_f3(const Nonlinearity& f,
                              const std::vector<double>& radii,
                              double threshold = 1e-2);

struct AsymptoticsReport {
  double sigma = 0.0;
  double r_sigma = 0.0;  // largest sampled radius below which all bounds hold
  bool found = false;
  double C_lower = 0.0, C_upper = 0.0;  // band for the f(U) constant
  std::vector<double> sample_r;
  std::vector<double> F_ratio;          // F(U)/((B/4) r^2 (1-2log r))
  bool ratio_trend_to_one = false;
  std::vector<std::string> violations;  // human-readable notes
};

// Near-origin growth, gradient and kernel-ratio checks on a constructed
// singular profile.
// Needs the field's derivative values (as produced by the shooting module).
AsymptoticsReport check_asymptotics(const Nonlinearity& f, const RadialField& U,
                                    double sigma);

}  // namespace shl
