#include "shl/bessel.hpp"

#include <cmath>
#include <cstdlib>

#include "shl/errors.hpp"

namespace shl {
namespace {

constexpr double kSeriesCut = 16.0;
constexpr double kPi = 3.14159265358979323846264338327950288;

double j0_series(double x) {
  long double q = (long double)x * x / 4.0L;  // x^2/4
  long double term = 1.0L, sum = 1.0L;
  for (int m = 1; m <= 80; ++m) {
    term *= -q / ((long double)m * m);
    sum += term;
    if (std::abs((double)term) < 1e-22) break;
  }
  return (double)sum;
}

double j1_series(double x) {
  long double q = (long double)x * x / 4.0L;
  long double term = 1.0L, sum = 1.0L;  // sum of q^m/(m!(m+1)!) * (-1)^m
  for (int m = 1; m <= 80; ++m) {
    term *= -q / ((long double)m * (m + 1));
    sum += term;
    if (std::abs((double)term) < 1e-22) break;
  }
  return (double)(0.5L * x * sum);
}

// Hankel asymptotic P/Q sums for order nu (mu = 4 nu^2), adaptively truncated.
void hankel_pq(double mu, double x, double& P, double& Q) {
  const double ax8 = 8.0 * x;
  double t = 1.0;  // t_0
  P = 1.0;
  Q = 0.0;
  double prev = std::abs(t);
  int sign_p = -1, sign_q = 1;  // sign of next contribution per parity
  for (int m = 0; m < 40; ++m) {
    double odd = 2.0 * m + 1.0;
    t *= (mu - odd * odd) / ((m + 1.0) * ax8);
    double at = std::abs(t);
    if (at > prev) break;  // asymptotic series started diverging
    if (m % 2 == 0) {      // lands in Q (odd index term)
      Q += sign_q * t;
      sign_q = -sign_q;
    } else {  // lands in P
      P += sign_p * t;
      sign_p = -sign_p;
    }
    prev = at;
    if (at < 1e-19) break;
  }
}

double j_asymptotic(int nu, double x) {
  double P, Q;
  hankel_pq(4.0 * nu * nu, x, P, Q);
  double chi = x - (0.5 * nu + 0.25) * kPi;
  return std::sqrt(2.0 / (kPi * x)) * (P * std::cos(chi) - Q * std::sin(chi));
}

}  // namespace

double cyl_j0(double x) {
  x = std::abs(x);
  return x <= kSeriesCut ? j0_series(x) : j_asymptotic(0, x);
}

double cyl_j1(double x) {
  double ax = std::abs(x);
  double v = ax <= kSeriesCut ? j1_series(ax) : j_asymptotic(1, ax);
  return x < 0 ? -v : v;
}

std::vector<double> j0_zeros(int k_max) {
  std::vector<double> z(k_max);
  for (int k = 1; k <= k_max; ++k) {
    double beta = (k - 0.25) * kPi;
    double b8 = 8.0 * beta;
    // McMahon expansion
    double x = beta + 1.0 / b8 - 124.0 / (3.0 * b8 * b8 * b8) +
               120928.0 / (15.0 * std::pow(b8, 5));
    // Newton: J0' = -J1
    bool ok = false;
    for (int it = 0; it < 12; ++it) {
      double f = cyl_j0(x);
      double d = -cyl_j1(x);
      double step = f / d;
      x -= step;
      if (std::abs(step) < 1e-14 * x) {
        ok = true;
        break;
      }
    }
    if (!ok || std::abs(cyl_j0(x)) > 1e-12)
      throw ConstructionError("j0_zeros: Newton refinement failed at k=" +
                              std::to_string(k));
    z[k - 1] = x;
  }
  return z;
}

}  // namespace shl
