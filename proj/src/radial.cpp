#include "shl/radial.hpp"

#include <cmath>

#include "shl/errors.hpp"

namespace shl {

std::shared_ptr<const RadialGrid> RadialGrid::make(double R, int n,
                                                   double rho_max) {
  if (!(R > 0.0) || n < 3 || !(rho_max > 0.0))
    throw DomainError("RadialGrid: need R > 0, n >= 3, rho_max > 0");
  auto g = std::make_shared<RadialGrid>();
  g->R = R;
  g->n = n;
  g->rho_max = rho_max;
  g->h = rho_max / (n - 1);
  g->r.resize(n);
  for (int i = 0; i < n; ++i) g->r[i] = R * std::exp(-g->h * i);
  return g;
}

bool same_grid(const RadialField& a, const RadialField& b) {
  if (a.grid == b.grid) return true;
  if (!a.grid || !b.grid) return false;
  return a.grid->n == b.grid->n && a.grid->R == b.grid->R &&
         a.grid->rho_max == b.grid->rho_max;
}

std::vector<double> annulus_weights(const RadialGrid& g) {
  std::vector<double> w(g.n);
  for (int i = 0; i < g.n; ++i) {
    double c = (i == 0 || i == g.n - 1) ? 0.5 : 1.0;
    w[i] = c * g.h * g.r[i] * g.r[i];  // dr r = -r^2 drho
  }
  return w;
}

void solve_tridiag(const std::vector<double>& lower, std::vector<double> diag,
                   const std::vector<double>& upper, std::vector<double>& rhs) {
  const int n = static_cast<int>(diag.size());
  for (int i = 1; i < n; ++i) {
    double m = lower[i] / diag[i - 1];
    diag[i] -= m * upper[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  rhs[n - 1] /= diag[n - 1];
  for (int i = n - 2; i >= 0; --i)
    rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
}

}  // namespace shl
