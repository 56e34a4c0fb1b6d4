#include "shl/transform.hpp"

#include <cmath>
#include <sstream>

#include "shl/errors.hpp"
#include "shl/radial.hpp"

namespace shl {
namespace {

Nonlinearity model_pair(const Nonlinearity& f) {
  return Nonlinearity::model(f.classification_B());
}

void check_v_domain(double B, double r) {
  if (!(r > 0.0) || r >= v_domain_max(B))
    throw DomainError("v: radius outside the model-solution domain");
}

}  // namespace

double v_domain_max(double B) {
  // B = 1 needs -2 log r > 1 so that v = log(-2 log r) stays positive
  return B > 1.0 ? 1.0 : 0.99 * std::exp(-0.5);
}

double eval_v(double B, double r) {
  check_v_domain(B, r);
  double y = -2.0 * std::log(r);
  if (B > 1.0) return std::pow(y, (B - 1.0) / B);  // 1/B' = 1 - 1/B
  return std::log(y);
}

double dv_dr(double B, double r) {
  check_v_domain(B, r);
  double y = -2.0 * std::log(r);
  if (B > 1.0) {
    double inv_Bp = (B - 1.0) / B;
    return -2.0 * inv_Bp * std::pow(y, inv_Bp - 1.0) / r;
  }
  return -2.0 / (r * y);
}

double eval_G_closed(double B, double r) {
  if (!(r > 0.0 && r < 1.0)) throw DomainError("G_closed: need 0 < r < 1");
  return 0.25 * B * r * r * (1.0 - 2.0 * std::log(r));
}

double eval_tilde_u(const Nonlinearity& f, double r) {
  double B = f.classification_B();
  check_v_domain(B, r);
  double y = eval_G_closed(B, r);
  return f.eval_F_inv(y);
}

double tilde_u_prime(const Nonlinearity& f, double r) {
  double B = f.classification_B();
  Nonlinearity g = model_pair(f);
  double tu = eval_tilde_u(f, r);
  double v = eval_v(B, r);
  // F(tilde u) = G(v)  =>  tilde u' = f(tilde u) v' / g(v)
  return dv_dr(B, r) * std::exp(f.log_f(tu) - g.log_f(v));
}

std::pair<double, double> eval_R1_R2(const Nonlinearity& f, double r) {
  double B = f.classification_B();
  Nonlinearity g = model_pair(f);
  double tu = eval_tilde_u(f, r);
  double v = eval_v(B, r);
  double R1 = std::abs(f.B1_inv(tu) - g.B1_inv(v));
  double R2 = std::abs(f.B2_inv(tu) - g.B2_inv(v));
  return {R1, R2};
}

double transformed_residual(const Nonlinearity& f, double r, double h) {
  double B = f.classification_B();
  Nonlinearity g = model_pair(f);
  double rp = r * std::exp(h), rm = r * std::exp(-h);
  check_v_domain(B, rp);
  double u0 = eval_tilde_u(f, r);
  double up = eval_tilde_u(f, rp);
  double um = eval_tilde_u(f, rm);
  double lap = (up - 2.0 * u0 + um) / (h * h * r * r);
  double v = eval_v(B, r);
  double du = tilde_u_prime(f, r);
  double fu = std::exp(f.log_f(u0));
  // g'G - f'F = D_f(tilde u) - D_g(v): difference of the small quantities
  double corr = du * du / f.P(u0) * (f.D(u0) - g.D(v));
  return -lap - fu - corr;
}

TransformDiagnostics check_f3(const Nonlinearity& f,
                              const std::vector<double>& radii,
                              double threshold) {
  if (radii.size() < 2) throw DomainError("check_f3: need at least 2 radii");
  for (size_t i = 1; i < radii.size(); ++i)
    if (radii[i] >= radii[i - 1])
      throw DomainError("check_f3: radii must be strictly decreasing");
  TransformDiagnostics d;
  d.threshold = threshold;
  d.radii = radii;
  for (double r : radii) {
    auto [R1, R2] = eval_R1_R2(f, r);
    d.tilde_u.push_back(eval_tilde_u(f, r));
    d.R1.push_back(R1);
    d.R2.push_back(R2);
    d.f3_indicator.push_back(std::sqrt(-std::log(r)) * (R1 + R2));
    d.eq_residual.push_back(transformed_residual(f, r, 1e-3));
  }
  size_t n = d.f3_indicator.size();
  size_t first = n >= 4 ? n - 4 : 0;  // last three decade steps
  d.trend_ok = true;
  for (size_t i = first + 1; i < n; ++i)
    if (d.f3_indicator[i] > d.f3_indicator[i - 1] + 1e-12) d.trend_ok = false;
  d.terminal_value = d.f3_indicator.back();
  d.terminal_ok = d.terminal_value <= threshold;
  d.pass = d.trend_ok && d.terminal_ok;
  return d;
}

AsymptoticsReport check_asymptotics(const Nonlinearity& f, const RadialField& U,
                                    double sigma) {
  if (!U.du_dr)
    throw DomainError("check_asymptotics: field needs derivative values");
  double B = f.classification_B();
  AsymptoticsReport rep;
  rep.sigma = sigma;

  const auto& g = *U.grid;
  // near-origin samples only (the estimates are asymptotic statements)
  std::vector<int> idx;
  for (int i = 0; i < g.n; ++i)
    if (g.r[i] <= 0.35 && U.u[i] > 0.0) idx.push_back(i);
  if (idx.size() < 8)
    throw DomainError("check_asymptotics: grid does not reach small radii");

  // Bounds, outermost to innermost; find the largest radius from which
  // everything inward is admissible.
  int n_idx = static_cast<int>(idx.size());
  std::vector<bool> ok(n_idx, true);
  double inf_A = 1e300, sup_B = -1e300;  // running band for the f(U) constant
  std::ostringstream notes;
  for (int k = n_idx - 1; k >= 0; --k) {  // from innermost outward
    int i = idx[k];
    double r = g.r[i], u = U.u[i], du = (*U.du_dr)[i];
    double y = -2.0 * std::log(r);
    bool good = true;
    if (u > std::pow(y, 1.0 - 1.0 / B + sigma) * (1.0 + 1e-13)) {
      good = false;
      if (rep.violations.size() < 8) {
        std::ostringstream o;
        o << "U bound fails at r=" << r;
        rep.violations.push_back(o.str());
      }
    }
    if (std::abs(du) > 1.0 / (r * std::pow(y, 1.0 / B - sigma)) * (1.0 + 1e-13)) {
      good = false;
      if (rep.violations.size() < 8) {
        std::ostringstream o;
        o << "gradient bound fails at r=" << r;
        rep.violations.push_back(o.str());
      }
    }
    double m = std::exp(f.log_f(u)) * r * r;
    double A = m * std::pow(1.0 + y, 1.0 + 1.0 / B + sigma);
    double Bq = m * std::pow(1.0 + y, 1.0 + 1.0 / B - sigma);
    inf_A = std::min(inf_A, A);
    sup_B = std::max(sup_B, Bq);
    if (sup_B > inf_A * (1.0 + 1e-13)) {
      good = false;
      if (rep.violations.size() < 8) {
        std::ostringstream o;
        o << "no single constant C for the f(U) band up to r=" << r;
        rep.violations.push_back(o.str());
      }
    }
    ok[k] = good;
  }
  // the admissible region must be a suffix in k (an inner disc in r)
  int first_bad = -1;
  for (int k = 0; k < n_idx; ++k)
    if (!ok[k]) first_bad = k;
  if (first_bad + 1 < n_idx) {
    rep.found = true;
    rep.r_sigma = g.r[idx[first_bad + 1]];
    // constant band over the admissible suffix only
    double lo = -1e300, hi = 1e300;
    for (int k = first_bad + 1; k < n_idx; ++k) {
      int i = idx[k];
      double y = -2.0 * std::log(g.r[i]);
      double m = std::exp(f.log_f(U.u[i])) * g.r[i] * g.r[i];
      lo = std::max(lo, m * std::pow(1.0 + y, 1.0 + 1.0 / B - sigma));
      hi = std::min(hi, m * std::pow(1.0 + y, 1.0 + 1.0 / B + sigma));
    }
    rep.C_lower = lo;
    rep.C_upper = hi;
  }

  // F(U) / ((B/4) r^2 (1 - 2 log r)) -> 1 along decreasing r
  double prev_gap = -1.0;
  rep.ratio_trend_to_one = true;
  for (int k = 0; k < n_idx; k += std::max(1, n_idx / 12)) {
    int i = idx[k];
    double r = g.r[i];
    double ratio = f.eval_F(U.u[i]) / eval_G_closed(B, r);
    rep.sample_r.push_back(r);
    rep.F_ratio.push_back(ratio);
    double gap = std::abs(ratio - 1.0);
    if (prev_gap >= 0.0 && gap > prev_gap + 1e-10) rep.ratio_trend_to_one = false;
    prev_gap = gap;
  }
  return rep;
}

}  // namespace shl
