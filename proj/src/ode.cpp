#include "shl/ode.hpp"

#include <algorithm>
#include <cmath>

#include "shl/errors.hpp"

namespace shl {
namespace {

// Dormand-Prince coefficients
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace

Dp45::Dp45(Rhs rhs, double x0, std::array<double, 2> y0, double rtol,
           double atol, double h_max)
    : rhs_(std::move(rhs)), x_(x0), y_(y0), rtol_(rtol), atol_(atol),
      h_max_(h_max), h_(std::min(1e-4, h_max)) {}

bool Dp45::try_step(double h, std::array<double, 2>& y_new, double& err) {
  auto& y = y_;
  if (!have_k1_) {
    k1_ = rhs_(x_, y);
    have_k1_ = true;
  }
  auto add = [&](double w1, const std::array<double, 2>& k_1, double w2,
                 const std::array<double, 2>& k_2, double w3,
                 const std::array<double, 2>& k_3, double w4,
                 const std::array<double, 2>& k_4, double w5,
                 const std::array<double, 2>& k_5, double w6,
                 const std::array<double, 2>& k_6) {
    std::array<double, 2> out;
    for (int i = 0; i < 2; ++i)
      out[i] = y[i] + h * (w1 * k_1[i] + w2 * k_2[i] + w3 * k_3[i] +
                           w4 * k_4[i] + w5 * k_5[i] + w6 * k_6[i]);
    return out;
  };
  std::array<double, 2> z{0, 0};
  auto k2 = rhs_(x_ + c2 * h, add(a21, k1_, 0, z, 0, z, 0, z, 0, z, 0, z));
  auto k3 = rhs_(x_ + c3 * h, add(a31, k1_, a32, k2, 0, z, 0, z, 0, z, 0, z));
  auto k4 = rhs_(x_ + c4 * h, add(a41, k1_, a42, k2, a43, k3, 0, z, 0, z, 0, z));
  auto k5 =
      rhs_(x_ + c5 * h, add(a51, k1_, a52, k2, a53, k3, a54, k4, 0, z, 0, z));
  auto k6 =
      rhs_(x_ + h, add(a61, k1_, a62, k2, a63, k3, a64, k4, a65, k5, 0, z));
  y_new = add(b1, k1_, 0, z, b3, k3, b4, k4, b5, k5, b6, k6);
  auto k7 = rhs_(x_ + h, y_new);
  err = 0.0;
  for (int i = 0; i < 2; ++i) {
    double ei = h * (e1 * k1_[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                     e6 * k6[i] + e7 * k7[i]);
    double sc = atol_ + rtol_ * std::max(std::abs(y[i]), std::abs(y_new[i]));
    err = std::max(err, std::abs(ei) / sc);
  }
  if (err <= 1.0) {
    k1_ = k7;  // FSAL
    return true;
  }
  return false;
}

void Dp45::integrate_to(double x_target) {
  while (x_ < x_target) {
    double h = std::min({h_, h_max_, x_target - x_});
    std::array<double, 2> y_new;
    double err;
    bool hit_target = (x_ + h >= x_target);
    if (try_step(h, y_new, err)) {
      x_ = hit_target ? x_target : x_ + h;
      y_ = y_new;
      ++n_steps_;
      double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
      h_ = h * std::clamp(fac, 0.2, 5.0);
    } else {
      double fac = 0.9 * std::pow(err, -0.2);
      h_ = h * std::clamp(fac, 0.1, 0.5);
      if (h_ < 1e-15 * std::max(1.0, std::abs(x_)))
        throw AccuracyError("Dp45: step size underflow");
    }
    if (n_steps_ > 50'000'000) throw AccuracyError("Dp45: step budget exhausted");
  }
}

}  // namespace shl
