#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

namespace shl {

// Log-radial discretization of the disc of radius R: nodes
//   r_i = R e^{-rho_i},  rho_i = i * h  uniform on [0, rho_max],
// so r_0 = R is the wall and r_{n-1} = R e^{-rho_max} the innermost node.
// In rho the radial Laplacian is exactly (d^2/drho^2) / r^2.
struct RadialGrid {
  double R = 1.0;
  int n = 0;
  double rho_max = 12.0;
  double h = 0.0;
  std::vector<double> r;

  static std::shared_ptr<const RadialGrid> make(double R, int n,
                                                double rho_max);
  double r_min() const { return r.back(); }
};

using GridPtr = std::shared_ptr<const RadialGrid>;

struct RadialField {
  GridPtr grid;
  std::vector<double> u;
  std::optional<std::vector<double>> du_dr;

  RadialField() = default;
  explicit RadialField(GridPtr g, double fill = 0.0)
      : grid(std::move(g)), u(grid->n, fill) {}
  int size() const { return static_cast<int>(u.size()); }
  double& operator[](int i) { return u[i]; }
  double operator[](int i) const { return u[i]; }
};

bool same_grid(const RadialField& a, const RadialField& b);

// Trapezoid weights in rho for integrals  int_{r_min}^{R} X(r) r dr
// (without the angular 2*pi): sum_i w_i X(r_i).
std::vector<double> annulus_weights(const RadialGrid& g);

// Thomas solve of a tridiagonal system (lower, diag, upper), in place on rhs.
void solve_tridiag(const std::vector<double>& lower, std::vector<double> diag,
                   const std::vector<double>& upper, std::vector<double>& rhs);

}  // namespace shl
