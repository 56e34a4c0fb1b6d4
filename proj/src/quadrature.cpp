#include "shl/quadrature.hpp"

#include <cmath>
#include <vector>

#include "shl/errors.hpp"

namespace shl {
namespace {

// Gauss-Kronrod 7-15 nodes/weights on [-1, 1] (positive half; symmetric).
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct PanelResult {
  double integral;
  double error;
};

PanelResult gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fc = f(c);
  double result_g = fc * kWg[3];
  double result_k = fc * kWgk[7];
  for (int j = 0; j < 7; ++j) {
    double x = h * kXgk[j];
    double fsum = f(c - x) + f(c + x);
    result_k += kWgk[j] * fsum;
    if (j % 2 == 1) result_g += kWg[j / 2] * fsum;
  }
  result_k *= h;
  result_g *= h;
  double err = std::abs(result_k - result_g);
  return {result_k, err};
}

}  // namespace

double integrate_gk(const std::function<double(double)>& f, double a, double b,
                    double rel_tol, double abs_tol, int max_depth) {
  if (a == b) return 0.0;
  struct Panel {
    double a, b, integral, error;
    int depth;
  };
  PanelResult first = gk15(f, a, b);
  std::vector<Panel> panels{{a, b, first.integral, first.error, 0}};
  double total = first.integral;
  double total_err = first.error;
  for (int iter = 0; iter < 20000; ++iter) {
    double tol = std::max(abs_tol, rel_tol * std::abs(total));
    if (total_err <= tol) return total;
    // split the worst panel
    size_t worst = 0;
    for (size_t i = 1; i < panels.size(); ++i)
      if (panels[i].error > panels[worst].error) worst = i;
    Panel p = panels[worst];
    if (p.depth >= max_depth)
      throw AccuracyError("integrate_gk: max depth reached, error " +
                          std::to_string(total_err) + " > tol " +
                          std::to_string(tol));
    double m = 0.5 * (p.a + p.b);
    PanelResult left = gk15(f, p.a, m);
    PanelResult right = gk15(f, m, p.b);
    total += left.integral + right.integral - p.integral;
    total_err += left.error + right.error - p.error;
    panels[worst] = {p.a, m, left.integral, left.error, p.depth + 1};
    panels.push_back({m, p.b, right.integral, right.error, p.depth + 1});
  }
  throw AccuracyError("integrate_gk: panel budget exhausted");
}

}  // namespace shl
