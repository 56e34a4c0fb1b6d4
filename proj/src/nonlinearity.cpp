#include "shl/nonlinearity.hpp"

#include <cmath>
#include <sstream>

#include "shl/errors.hpp"
#include "shl/quadrature.hpp"

namespace shl {
namespace {

constexpr double kWindow = 45.0;  // e^{-45} ~ 3e-20: scaled-integrand cutoff

double parse_num(const std::string& s) {
  try {
    return std::stod(s);
  } catch (...) {
    throw DomainError("bad numeric field in catalog key: " + s);
  }
}

// log(1+e^x) without overflow
double log1p_exp(double x) {
  return x > 36.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

}  // namespace

Nonlinearity Nonlinearity::model(double B) {
  if (B < 1.0) throw DomainError("model: B must be >= 1");
  Nonlinearity n;
  n.variant_ = Variant::Model;
  n.B_ = B;
  n.Bp_ = B > 1.0 ? B / (B - 1.0) : 0.0;  // Bp unused for B = 1
  std::ostringstream k;
  k << "model:B=" << B;
  n.key_ = k.str();
  return n;
}

Nonlinearity Nonlinearity::smoothed_model(double B) {
  if (B <= 1.0) throw DomainError("smoothed: B must be > 1");
  Nonlinearity n;
  n.variant_ = Variant::SmoothedModel;
  n.B_ = B;
  n.Bp_ = B / (B - 1.0);
  // C^1 matching of a s^2 to g forces b g'(b) = 2 g(b):
  // (1-2B') + B' b^{B'} = 2  =>  b^{B'} = (1+2B')/B'.
  n.b_ = std::pow((1.0 + 2.0 * n.Bp_) / n.Bp_, 1.0 / n.Bp_);
  double gb = 4.0 / (B * n.Bp_) * std::pow(n.b_, 1.0 - 2.0 * n.Bp_) *
              std::exp(std::pow(n.b_, n.Bp_));
  n.a_ = gb / (n.b_ * n.b_);
  double sig = std::pow(n.b_, n.Bp_);
  n.Fb_ = (B / 4.0) * (sig + 1.0) * std::exp(-sig);
  std::ostringstream k;
  k << "smoothed:B=" << B;
  n.key_ = k.str();
  return n;
}

Nonlinearity Nonlinearity::power_exp(double q, double r, double pair_B) {
  if (q < 1.0) throw DomainError("power_exp: q must be > 1");
  if (q == 1.0 && pair_B <= 1.0)
    throw DomainError("power_exp: q = 1 is degenerate; give an explicit pair_B");
  Nonlinearity n;
  n.variant_ = Variant::PowerExp;
  n.q_ = q;
  n.r_ = r;
  n.pair_B_ = pair_B;
  std::ostringstream k;
  k << "power_exp:q=" << q << ",r=" << r;
  n.key_ = k.str();
  return n;
}

Nonlinearity Nonlinearity::sum_exp(double q, double r) {
  if (q <= 1.0) throw DomainError("sum_exp: q must be > 1");
  if (r >= q) throw DomainError("sum_exp: need r < q");
  Nonlinearity n;
  n.variant_ = Variant::SumExp;
  n.q_ = q;
  n.r_ = r;
  std::ostringstream k;
  k << "sum_exp:q=" << q << ",r=" << r;
  n.key_ = k.str();
  return n;
}

Nonlinearity Nonlinearity::double_exp() {
  Nonlinearity n;
  n.variant_ = Variant::DoubleExp;
  n.key_ = "double_exp";
  return n;
}

Nonlinearity Nonlinearity::parse(const std::string& key) {
  std::string name = key;
  std::string args;
  if (auto pos = key.find(':'); pos != std::string::npos) {
    name = key.substr(0, pos);
    args = key.substr(pos + 1);
  }
  double B = 2.0, q = 2.0, r = 0.0, pairB = 0.0;
  std::stringstream ss(args);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos) throw DomainError("bad catalog key: " + key);
    std::string k = item.substr(0, eq);
    double v = parse_num(item.substr(eq + 1));
    if (k == "B") B = v;
    else if (k == "q") q = v;
    else if (k == "r") r = v;
    else if (k == "pairB") pairB = v;
    else throw DomainError("unknown field '" + k + "' in key " + key);
  }
  if (name == "model") return model(B);
  if (name == "smoothed") return smoothed_model(B);
  if (name == "power_exp") return power_exp(q, r, pairB);
  if (name == "sum_exp") return sum_exp(q, r);
  if (name == "double_exp") return double_exp();
  throw DomainError("unknown catalog key: " + key);
}

double Nonlinearity::classification_B() const {
  switch (variant_) {
    case Variant::Model:
    case Variant::SmoothedModel:
      return B_;
    case Variant::PowerExp:
      if (pair_B_ > 1.0) return pair_B_;
      return q_ / (q_ - 1.0);
    case Variant::SumExp:
      return q_ / (q_ - 1.0);
    case Variant::DoubleExp:
      return 1.0;
  }
  return 0.0;
}

bool Nonlinearity::smoothed_lower(double s) const {
  return variant_ == Variant::SmoothedModel && s < b_;
}

double Nonlinearity::log_f(double s) const {
  switch (variant_) {
    case Variant::Model:
      if (s <= 0.0) throw DomainError("model: log f needs s > 0");
      if (B_ == 1.0) return std::log(4.0) + std::exp(s) - 2.0 * s;
      return std::log(4.0 / (B_ * Bp_)) + (1.0 - 2.0 * Bp_) * std::log(s) +
             std::pow(s, Bp_);
    case Variant::SmoothedModel:
      if (s <= 0.0) throw DomainError("smoothed: log f needs s > 0");
      if (s < b_) return std::log(a_) + 2.0 * std::log(s);
      return std::log(4.0 / (B_ * Bp_)) + (1.0 - 2.0 * Bp_) * std::log(s) +
             std::pow(s, Bp_);
    case Variant::PowerExp:
      if (s <= 0.0) throw DomainError("power_exp: log f needs s > 0");
      return r_ * std::log(s) + std::pow(s, q_);
    case Variant::SumExp:
      if (s <= 0.0) throw DomainError("sum_exp: log f needs s > 0");
      return std::pow(s, q_) + std::pow(s, r_);
    case Variant::DoubleExp:
      return std::exp(s);
  }
  return 0.0;
}

double Nonlinearity::phi1(double s) const {
  switch (variant_) {
    case Variant::Model:
      if (B_ == 1.0) return std::exp(s) - 2.0;
      return (1.0 - 2.0 * Bp_) / s + Bp_ * std::pow(s, Bp_ - 1.0);
    case Variant::SmoothedModel:
      if (s < b_) return 2.0 / s;
      return (1.0 - 2.0 * Bp_) / s + Bp_ * std::pow(s, Bp_ - 1.0);
    case Variant::PowerExp:
      return r_ / s + q_ * std::pow(s, q_ - 1.0);
    case Variant::SumExp:
      return q_ * std::pow(s, q_ - 1.0) + r_ * std::pow(s, r_ - 1.0);
    case Variant::DoubleExp:
      return std::exp(s);
  }
  return 0.0;
}

double Nonlinearity::phi2(double s) const {
  switch (variant_) {
    case Variant::Model:
      if (B_ == 1.0) return std::exp(s);
      return (2.0 * Bp_ - 1.0) / (s * s) +
             Bp_ * (Bp_ - 1.0) * std::pow(s, Bp_ - 2.0);
    case Variant::SmoothedModel:
      if (s < b_) return -2.0 / (s * s);
      return (2.0 * Bp_ - 1.0) / (s * s) +
             Bp_ * (Bp_ - 1.0) * std::pow(s, Bp_ - 2.0);
    case Variant::PowerExp:
      return -r_ / (s * s) + q_ * (q_ - 1.0) * std::pow(s, q_ - 2.0);
    case Variant::SumExp:
      return q_ * (q_ - 1.0) * std::pow(s, q_ - 2.0) +
             r_ * (r_ - 1.0) * std::pow(s, r_ - 2.0);
    case Variant::DoubleExp:
      return std::exp(s);
  }
  return 0.0;
}

double Nonlinearity::phi3(double s) const {
  switch (variant_) {
    case Variant::Model:
      if (B_ == 1.0) return std::exp(s);
      return -2.0 * (2.0 * Bp_ - 1.0) / (s * s * s) +
             Bp_ * (Bp_ - 1.0) * (Bp_ - 2.0) * std::pow(s, Bp_ - 3.0);
    case Variant::SmoothedModel:
      if (s < b_) return 4.0 / (s * s * s);
      return -2.0 * (2.0 * Bp_ - 1.0) / (s * s * s) +
             Bp_ * (Bp_ - 1.0) * (Bp_ - 2.0) * std::pow(s, Bp_ - 3.0);
    case Variant::PowerExp:
      return 2.0 * r_ / (s * s * s) +
             q_ * (q_ - 1.0) * (q_ - 2.0) * std::pow(s, q_ - 3.0);
    case Variant::SumExp:
      return q_ * (q_ - 1.0) * (q_ - 2.0) * std::pow(s, q_ - 3.0) +
             r_ * (r_ - 1.0) * (r_ - 2.0) * std::pow(s, r_ - 3.0);
    case Variant::DoubleExp:
      return std::exp(s);
  }
  return 0.0;
}

double Nonlinearity::evaluate(double s, int order) const {
  if (order < 0 || order > 2) throw DomainError("evaluate: order must be 0..2");
  if (s < 0.0) throw DomainError("evaluate: s must be >= 0");
  if (s == 0.0) {
    switch (variant_) {
      case Variant::Model:
        throw DomainError("model: f unbounded at s = 0");
      case Variant::SmoothedModel:
        return order == 0 ? 0.0 : (order == 1 ? 0.0 : 2.0 * a_);
      case Variant::PowerExp: {
        if (r_ == 0.0) {
          if (order == 0) return 1.0;
          if (order == 1) return 0.0;  // q > 1
          if (q_ == 2.0) return 2.0;
          if (q_ > 2.0) return 0.0;
          throw DomainError("power_exp: f'' unbounded at 0 for q < 2");
        }
        if (order == 0 && r_ > 0.0) return 0.0;
        throw DomainError("power_exp: value/derivative at 0 undefined for this r");
      }
      case Variant::SumExp:
        if (order == 0) return 1.0;
        throw DomainError("sum_exp: derivative at 0 not available");
      case Variant::DoubleExp: {
        double e = std::exp(1.0);
        return order == 0 ? e : (order == 1 ? e : 2.0 * e);
      }
    }
  }
  double f = std::exp(log_f(s));
  if (order == 0) return f;
  double p1 = phi1(s);
  if (order == 1) return p1 * f;
  return (phi2(s) + p1 * p1) * f;
}

// ---- phi(s+delta)-phi(s), stable for tiny windows -------------------------

double Nonlinearity::phi_diff(double s, double d) const {
  auto pow_diff = [&](double expo) {
    // s^expo * ((1+d/s)^expo - 1)
    return std::pow(s, expo) * std::expm1(expo * std::log1p(d / s));
  };
  switch (variant_) {
    case Variant::Model:
      if (B_ == 1.0) return std::exp(s) * std::expm1(d) - 2.0 * d;
      return (1.0 - 2.0 * Bp_) * std::log1p(d / s) + pow_diff(Bp_);
    case Variant::SmoothedModel:
      // only used on the model branch (s >= b); quadratic branch is explicit
      return (1.0 - 2.0 * Bp_) * std::log1p(d / s) + pow_diff(Bp_);
    case Variant::PowerExp:
      return r_ * std::log1p(d / s) + pow_diff(q_);
    case Variant::SumExp:
      return pow_diff(q_) + pow_diff(r_);
    case Variant::DoubleExp:
      return std::exp(s) * std::expm1(d);
  }
  return 0.0;
}

namespace {
// c p x^{p-1} evaluated as a difference: c ((x+d)^p - x^p), stable for small d
double pow_term_diff(double c, double p, double x, double d) {
  if (c == 0.0 || p == 0.0) return 0.0;
  return c * std::pow(x, p) * std::expm1(p * std::log1p(d / x));
}
}  // namespace

double Nonlinearity::phi1_diff(double s, double d) const {
  switch (variant_) {
    case Variant::Model:
      if (B_ == 1.0) return std::exp(s) * std::expm1(d);
      return pow_term_diff(1.0 - 2.0 * Bp_, -1.0, s, d) +
             pow_term_diff(Bp_, Bp_ - 1.0, s, d);
    case Variant::SmoothedModel:
      return pow_term_diff(1.0 - 2.0 * Bp_, -1.0, s, d) +
             pow_term_diff(Bp_, Bp_ - 1.0, s, d);
    case Variant::PowerExp:
      return pow_term_diff(r_, -1.0, s, d) + pow_term_diff(q_, q_ - 1.0, s, d);
    case Variant::SumExp:
      return pow_term_diff(q_, q_ - 1.0, s, d) + pow_term_diff(r_, r_ - 1.0, s, d);
    case Variant::DoubleExp:
      return std::exp(s) * std::expm1(d);
  }
  return 0.0;
}

double Nonlinearity::phi2_diff(double s, double d) const {
  switch (variant_) {
    case Variant::Model:
      if (B_ == 1.0) return std::exp(s) * std::expm1(d);
      return pow_term_diff(2.0 * Bp_ - 1.0, -2.0, s, d) +
             pow_term_diff(Bp_ * (Bp_ - 1.0), Bp_ - 2.0, s, d);
    case Variant::SmoothedModel:
      return pow_term_diff(2.0 * Bp_ - 1.0, -2.0, s, d) +
             pow_term_diff(Bp_ * (Bp_ - 1.0), Bp_ - 2.0, s, d);
    case Variant::PowerExp:
      return pow_term_diff(-r_, -2.0, s, d) +
             pow_term_diff(q_ * (q_ - 1.0), q_ - 2.0, s, d);
    case Variant::SumExp:
      return pow_term_diff(q_ * (q_ - 1.0), q_ - 2.0, s, d) +
             pow_term_diff(r_ * (r_ - 1.0), r_ - 2.0, s, d);
    case Variant::DoubleExp:
      return std::exp(s) * std::expm1(d);
  }
  return 0.0;
}

double Nonlinearity::delta_window(double s, double target) const {
  // smallest delta with phi(s+delta)-phi(s) = target (phi eventually increasing)
  double d_lo = 0.0;
  if (phi1(s) <= 0.0) {
    // start past the minimum of phi
    double step = std::max(1e-3 * s, 1e-6);
    while (phi1(s + step) <= 0.0) {
      step *= 2.0;
      if (step > 1e6) throw ConstructionError("delta_window: f never increases");
    }
    d_lo = step;
  }
  double d = d_lo + target / phi1(s + d_lo);
  for (int it = 0; it < 200; ++it) {
    double g = phi_diff(s, d) - target;
    if (std::abs(g) < 1e-9 * target) return d;
    double dn = d - g / phi1(s + d);
    if (dn <= d_lo) dn = 0.5 * (d + d_lo);
    d = dn;
  }
  return d;  // close enough; only sets the quadrature cutoff
}

double Nonlinearity::tail_series(double x) const {
  // e^{phi(x)} F(x) ~ 1/phi' - phi''/phi'^3 + (3 phi''^2 - phi' phi''')/phi'^5
  double p1 = phi1(x), p2 = phi2(x), p3 = phi3(x);
  double ip = 1.0 / p1;
  return ip - p2 * ip * ip * ip + (3.0 * p2 * p2 - p1 * p3) * std::pow(ip, 5);
}

double Nonlinearity::P_generic(double s) const {
  double cut = delta_window(s, kWindow);
  if (tail_switch > s && tail_switch - s < cut) cut = tail_switch - s;
  double core = integrate_gk([&](double d) { return std::exp(-phi_diff(s, d)); },
                             0.0, cut, 0.3 * quad_tol, 0.0);
  double x = s + cut;
  return core + std::exp(-phi_diff(s, cut)) * tail_series(x);
}

namespace {
// Signed integrand with a possibly cancelling integral: fix the absolute
// tolerance from a cheap pass over |h| first.
double integrate_signed(const std::function<double(double)>& h, double a,
                        double b, double rel_tol) {
  double mass = integrate_gk([&](double x) { return std::abs(h(x)); }, a, b,
                             1e-4, 1e-300);
  if (mass == 0.0) return 0.0;
  return integrate_gk(h, a, b, rel_tol, rel_tol * mass);
}
}  // namespace

double Nonlinearity::D_generic(double s) const {
  double cut = delta_window(s, kWindow);
  if (tail_switch > s && tail_switch - s < cut) cut = tail_switch - s;
  auto psi = [&](double x) {
    double p1x = phi1(x);
    return phi2(x) / (p1x * p1x);
  };
  double core = integrate_signed(
      [&](double d) { return std::exp(-phi_diff(s, d)) * psi(s + d); }, 0.0,
      cut, 0.3 * quad_tol);
  double x = s + cut;
  double tail = std::exp(-phi_diff(s, cut)) * psi(x) / phi1(x);
  return phi1(s) * (core + tail);
}

double Nonlinearity::E_generic(double s) const {
  double cut = delta_window(s, kWindow);
  if (tail_switch > s && tail_switch - s < cut) cut = tail_switch - s;
  double p1s = phi1(s), p2s = phi2(s);
  // phi2(s) - phi1(s)^2 psi(s+d) reorganized through the stable increments
  // D1 = phi'(s+d)-phi'(s), D2 = phi''(s+d)-phi''(s):
  //   bracket = (2 phi2 phi1 D1 + phi2 D1^2 - phi1^2 D2) / phi'(s+d)^2,
  // which avoids the e^{s} - e^{s-d} style cancellation at tiny d.
  auto bracket = [&](double d) {
    double D1 = phi1_diff(s, d), D2 = phi2_diff(s, d);
    double p1x = p1s + D1;
    return (2.0 * p2s * p1s * D1 + p2s * D1 * D1 - p1s * p1s * D2) /
           (p1x * p1x);
  };
  double core = integrate_signed(
      [&](double d) { return std::exp(-phi_diff(s, d)) * bracket(d); }, 0.0,
      cut, 0.3 * quad_tol);
  double tail = std::exp(-phi_diff(s, cut)) * bracket(cut) / phi1(s + cut);
  return core + tail;
}

// ---- P, D, E dispatch ------------------------------------------------------

double Nonlinearity::P(double s) const {
  if (s <= 0.0) throw DomainError("P: s must be > 0");
  switch (variant_) {
    case Variant::Model: {
      if (B_ == 1.0) {
        double em = std::exp(-s);
        return (1.0 + em) * em;  // (e^s+1) e^{-2s}
      }
      double sig = std::pow(s, Bp_);
      return (sig + 1.0) * s / (Bp_ * sig * sig);
    }
    case Variant::SmoothedModel: {
      if (s >= b_) {
        double sig = std::pow(s, Bp_);
        return (sig + 1.0) * s / (Bp_ * sig * sig);
      }
      return s - s * s / b_ + a_ * s * s * Fb_;
    }
    default:
      return P_generic(s);
  }
}

double Nonlinearity::D(double s) const {
  if (s <= 0.0) throw DomainError("D: s must be > 0");
  switch (variant_) {
    case Variant::Model: {
      if (B_ == 1.0) {
        double em = std::exp(-s);
        return (1.0 + 2.0 * em) * em;  // (e^s+2) e^{-2s}
      }
      double sig = std::pow(s, Bp_);
      return ((Bp_ - 1.0) * sig + 2.0 * Bp_ - 1.0) / (Bp_ * sig * sig);
    }
    case Variant::SmoothedModel: {
      if (s >= b_) {
        double sig = std::pow(s, Bp_);
        return ((Bp_ - 1.0) * sig + 2.0 * Bp_ - 1.0) / (Bp_ * sig * sig);
      }
      return 1.0 - 2.0 * P(s) / s;
    }
    default:
      return D_generic(s);
  }
}

double Nonlinearity::E(double s) const {
  if (s <= 0.0) throw DomainError("E: s must be > 0");
  switch (variant_) {
    case Variant::Model: {
      if (B_ == 1.0) {
        double em = std::exp(-s);
        return (1.0 + 4.0 * em) * em;  // (e^s+4) e^{-2s}
      }
      double sig = std::pow(s, Bp_);
      return ((Bp_ - 1.0) * sig + 2.0 * (2.0 * Bp_ - 1.0)) / (sig * sig * s);
    }
    case Variant::SmoothedModel: {
      if (s >= b_) {
        double sig = std::pow(s, Bp_);
        return ((Bp_ - 1.0) * sig + 2.0 * (2.0 * Bp_ - 1.0)) / (sig * sig * s);
      }
      return -2.0 * P(s) / (s * s) - 2.0 * D(s) / s;
    }
    default:
      return E_generic(s);
  }
}

// ---- F, log F, inverse -----------------------------------------------------

double Nonlinearity::log_F(double s) const {
  if (s <= 0.0) throw DomainError("log_F: s must be > 0");
  switch (variant_) {
    case Variant::Model: {
      if (B_ == 1.0) {
        double es = std::exp(s);
        return std::log(0.25) + log1p_exp(s) - es;
      }
      double sig = std::pow(s, Bp_);
      return std::log(B_ / 4.0) + std::log1p(sig) - sig;
    }
    case Variant::SmoothedModel: {
      if (s >= b_) {
        double sig = std::pow(s, Bp_);
        return std::log(B_ / 4.0) + std::log1p(sig) - sig;
      }
      return std::log((1.0 / a_) * (1.0 / s - 1.0 / b_) + Fb_);
    }
    default:
      return std::log(P_generic(s)) - log_f(s);
  }
}

double Nonlinearity::eval_F(double s) const { return std::exp(log_F(s)); }

double Nonlinearity::quadrature_F(double s) const {
  if (s <= 0.0) throw DomainError("quadrature_F: s must be > 0");
  if (variant_ == Variant::SmoothedModel && s < b_) {
    // quadratic branch up to b, then the scaled tail machinery
    double head = integrate_gk(
        [&](double t) { return 1.0 / (a_ * t * t); }, s, b_, 0.3 * quad_tol);
    return head + quadrature_F(b_);
  }
  double lf = log_f(s);
  if (lf > 650.0)
    return std::exp(std::log(P_generic(s)) - lf);  // underflows honestly
  return P_generic(s) * std::exp(-lf);
}

double Nonlinearity::F_inv_from_log(double Ly) const {
  // explicit range bound for the model variants (finite F(0+))
  if (variant_ == Variant::Model) {
    double sup_log = B_ == 1.0 ? std::log(0.5 / std::exp(1.0))
                               : std::log(B_ / 4.0);
    if (Ly >= sup_log)
      throw DomainError("eval_F_inv: y >= lim_{s->0} F(s) for this variant");
  }
  // bracket: F decreasing in s, so log_F(s_lo) > Ly > log_F(s_hi)
  double s_lo = 1.0, s_hi = 1.0;
  int guard = 0;
  while (log_F(s_lo) <= Ly) {
    s_lo *= 0.5;
    if (++guard > 120) throw DomainError("eval_F_inv: y above range of F");
  }
  guard = 0;
  while (log_F(s_hi) >= Ly) {
    s_hi *= 2.0;
    if (++guard > 60) throw DomainError("eval_F_inv: y below range of F");
  }
  double s = std::sqrt(s_lo * s_hi);
  for (int it = 0; it < 200; ++it) {
    double g = log_F(s) - Ly;
    if (g > 0.0) s_lo = s;
    else s_hi = s;
    if (std::abs(g) < 1e-14) return s;
    double step = g * P(s);  // Newton: d(logF)/ds = -1/P
    double sn = s + step;
    if (!(sn > s_lo && sn < s_hi)) sn = 0.5 * (s_lo + s_hi);
    if (sn == s) return s;
    s = sn;
  }
  throw AccuracyError("eval_F_inv: no convergence");
}

double Nonlinearity::eval_F_inv(double y) const {
  if (!(y > 0.0)) throw DomainError("eval_F_inv: y must be > 0");
  return F_inv_from_log(std::log(y));
}

// ---- classification functionals -------------------------------------------

double Nonlinearity::B1_inv(double s) const {
  double lF = log_F(s);
  if (lF >= 0.0) throw DomainError("B1: needs F(s) < 1");
  return (-lF) * D(s);
}

double Nonlinearity::B2_inv(double s) const {
  double lF = log_F(s);
  if (lF >= 0.0) throw DomainError("B2: needs F(s) < 1");
  return P(s) * lF * lF * E(s);
}

// ---- hypothesis scan -------------------------------------------------------

HypothesisReport estimate_B(const Nonlinearity& f) {
  HypothesisReport rep;
  rep.f1_probe_s = 1.0;
  rep.f1_probe_F = f.eval_F(1.0);
  rep.f1_finite = std::isfinite(rep.f1_probe_F);

  const int n = 6;
  double s = 4.0;
  std::vector<double> b2(n), dev(n);
  for (int j = 0; j < n; ++j, s *= 2.0) {
    double Dj = f.D(s);
    rep.fprimeF_samples.emplace_back(s, 1.0 - Dj);
    b2[j] = 1.0 / f.B2_inv(s);
    rep.B2_samples.emplace_back(s, b2[j]);
    dev[j] = std::abs(Dj);
  }
  // Aitken acceleration on the last three ladder points
  double a0 = b2[n - 3], a1 = b2[n - 2], a2 = b2[n - 1];
  double d1 = a1 - a0, d2 = a2 - a1;
  double denom = d2 - d1;
  rep.B_estimate = std::abs(denom) > 1e-14 * std::abs(a2)
                       ? a2 - d2 * d2 / denom
                       : a2;
  bool dev_decreasing = true;
  for (int j = 1; j < n; ++j)
    if (dev[j] > dev[j - 1] * (1.0 + 1e-12)) dev_decreasing = false;
  bool finite = true;
  for (double v : b2)
    if (!std::isfinite(v)) finite = false;
  rep.f2_ok = rep.f1_finite && dev_decreasing && finite &&
              rep.B_estimate >= 1.0 - 0.02;
  std::ostringstream diag;
  diag << "ladder B2:";
  for (double v : b2) diag << " " << v;
  diag << "; |f'F-1| " << (dev_decreasing ? "decreasing" : "NOT decreasing")
       << "; extrapolated B=" << rep.B_estimate;
  rep.diagnostics = diag.str();
  return rep;
}

double find_beta(const Nonlinearity& f) {
  const int n_scan = 10000;
  const double s_min = 1e-3, s_max = 1e3;
  const double lr = std::log(s_max / s_min) / (n_scan - 1);
  std::vector<double> s(n_scan), c1(n_scan), c2(n_scan);
  for (int i = 0; i < n_scan; ++i) {
    s[i] = s_min * std::exp(lr * i);
    c1[i] = f.D(s[i]);            // >= 0 iff f'F <= 1
    c2[i] = s[i] - 2.0 * f.P(s[i]);  // (beta2) display
  }
  // smallest index from which both constraints hold on the whole suffix
  int i1 = n_scan, i2 = n_scan;
  for (int i = n_scan - 1; i >= 0; --i) {
    if (c1[i] >= -1e-12) i1 = i;
    else break;
  }
  for (int i = n_scan - 1; i >= 0; --i) {
    if (c2[i] >= 0.0) i2 = i;
    else break;
  }
  int i0 = std::max(i1, i2);
  if (i0 >= n_scan)
    throw ConstructionError("find_beta: no admissible beta below scan cap");
  if (i0 == 0) return s[0];
  // bisection on the binding constraint inside (s[i0-1], s[i0])
  auto h = [&](double x) { return std::min(f.D(x), x - 2.0 * f.P(x)); };
  double lo = s[i0 - 1], hi = s[i0];
  for (int it = 0; it < 200 && hi - lo > 1e-9; ++it) {
    double mid = 0.5 * (lo + hi);
    if (h(mid) >= 0.0) hi = mid;
    else lo = mid;
  }
  return hi;  // constraints hold at the returned point
}

}  // namespace shl
