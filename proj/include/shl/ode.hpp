#pragma once

#include <array>
#include <functional>

namespace shl {

// Adaptive Dormand-Prince 5(4) for a 2-component system, stepping exactly
// onto requested target abscissae. State is (u, u').
class Dp45 {
 public:
  using Rhs = std::function<std::array<double, 2>(double, const std::array<double, 2>&)>;

  Dp45(Rhs rhs, double x0, std::array<double, 2> y0, double rtol, double atol,
       double h_max = 0.05);

  // Advance to exactly x_target (x_target >= current x).
  void integrate_to(double x_target);

  double x() const { return x_; }
  const std::array<double, 2>& y() const { return y_; }
  long steps() const { return n_steps_; }

 private:
  bool try_step(double h, std::array<double, 2>& y_new, double& err);

  Rhs rhs_;
  double x_;
  std::array<double, 2> y_;
  std::array<double, 2> k1_;  // FSAL stage
  bool have_k1_ = false;
  double rtol_, atol_, h_max_, h_;
  long n_steps_ = 0;
};

}  // namespace shl
