#pragma once

#include <string>
#include <utility>
#include <vector>

namespace shl {

// Catalog of exponential-type nonlinearities f with analytic log-derivatives.
//
// Everything is evaluated through phi = log f, so that the large-argument
// regime (where e^{s^q} overflows) stays representable. The three scaled
// functionals
//   P(s) = f(s) F(s),   D(s) = 1 - f'(s) F(s),   E(s) = phi'' P - phi' D
// are computed either from closed forms (model variants) or from scaled
// quadrature of  integral e^{phi(s)-phi(tau)} h(tau) dtau,  which avoids the
// catastrophic cancellation that direct use of F would cause in B1/B2.
enum class Variant { Model, SmoothedModel, PowerExp, SumExp, DoubleExp };

class Nonlinearity {
 public:
  // Keys: "model:B=2" (B=1 selects the doubly exponential model),
  // "smoothed:B=2", "power_exp:q=2,r=0", "sum_exp:q=2,r=0.5", "double_exp".
  static Nonlinearity parse(const std::string& key);
  static Nonlinearity model(double B);
  static Nonlinearity smoothed_model(double B);
  static Nonlinearity power_exp(double q, double r, double pair_B = 0.0);
  static Nonlinearity sum_exp(double q, double r);
  static Nonlinearity double_exp();

  Variant variant() const { return variant_; }
  const std::string& key() const { return key_; }
  double B() const { return B_; }        // model classification exponent
  double Bprime() const { return Bp_; }  // dual exponent B/(B-1)
  double q() const { return q_; }
  double r() const { return r_; }
  double b_smooth() const { return b_; }  // quadratic-branch matching point
  double a_smooth() const { return a_; }
  // The B the entry is classified with (model pair selector).
  double classification_B() const;

  double quad_tol = 1e-10;
  double tail_switch = 0.0;  // 0 = automatic decay window

  // f, f', f'' by analytic closed forms. Throws DomainError where the value
  // is unbounded (model variants at s=0) or undefined.
  double evaluate(double s, int order) const;

  // log f and its first three derivatives (s > 0).
  double log_f(double s) const;
  double phi1(double s) const;
  double phi2(double s) const;
  double phi3(double s) const;

  // F(s) = int_s^inf dtau/f(tau); strictly decreasing. eval_F may underflow
  // to 0 for very large s; log_F stays meaningful.
  double eval_F(double s) const;
  double log_F(double s) const;
  // Forced quadrature+tail evaluation (independent of the closed forms; used
  // as the cross-check oracle for the model variants).
  double quadrature_F(double s) const;

  // Inverse of F on its range, bracketing plus safeguarded Newton in log
  // space, relative tolerance quad_tol.
  double eval_F_inv(double y) const;
  double F_inv_from_log(double log_y) const;

  // Scaled functionals (no cancellation at large s).
  double P(double s) const;  // f F
  double D(double s) const;  // 1 - f'F
  double E(double s) const;  // phi2 P - phi1 D

  // Classification displays. B1_inv = (-log F)(1 - f'F); B2_inv is the
  // analytically expanded de l'Hospital form. Require F(s) < 1.
  double B1_inv(double s) const;
  double B2_inv(double s) const;
  double eval_B1(double s) const { return 1.0 / B1_inv(s); }
  double eval_B2(double s) const { return 1.0 / B2_inv(s); }

  double fprimeF(double s) const { return 1.0 - D(s); }

 private:
  Nonlinearity() = default;
  bool smoothed_lower(double s) const;  // on the quadratic branch?
  double phi_diff(double s, double delta) const;   // phi(s+delta)-phi(s)
  double phi1_diff(double s, double delta) const;  // phi'(s+delta)-phi'(s)
  double phi2_diff(double s, double delta) const;  // phi''(s+delta)-phi''(s)
  double delta_window(double s, double target) const;
  double P_generic(double s) const;
  double D_generic(double s) const;
  double E_generic(double s) const;
  double tail_series(double x) const;  // e^{phi(x)} * F(x) asymptotic

  Variant variant_ = Variant::Model;
  std::string key_;
  double B_ = 2.0, Bp_ = 2.0;
  double q_ = 2.0, r_ = 0.0;
  double pair_B_ = 0.0;
  double b_ = 0.0, a_ = 0.0, Fb_ = 0.0;  // smoothed-model constants
};

// Result of the (f1)/(f2) hypothesis scan.
struct HypothesisReport {
  bool f1_finite = false;
  double f1_probe_s = 1.0;
  double f1_probe_F = 0.0;
  std::vector<std::pair<double, double>> fprimeF_samples;  // (s, f'F)
  std::vector<std::pair<double, double>> B2_samples;       // (s, B2)
  double B_estimate = 0.0;
  bool f2_ok = false;
  double beta = 0.0;  // filled by callers that also run find_beta
  std::string diagnostics;
};

// Geometric ladder s_j = 4 * 2^j (6 points), Aitken-extrapolated B2 limit.
HypothesisReport estimate_B(const Nonlinearity& f);

// Smallest beta such that f'F <= 1 on the sampled suffix [beta, scan_max]
// and beta - 2 f(beta) F(beta) >= 0, refined by bisection.
double find_beta(const Nonlinearity& f);

}  // namespace shl
