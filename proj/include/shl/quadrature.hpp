#pragma once

#include <functional>

namespace shl {

// Adaptive Gauss-Kronrod 7/15 integration of f on the finite interval [a, b].
// Subdivides until the per-panel Kronrod error estimate satisfies
//   err <= max(abs_tol, rel_tol * |integral|)
// distributed over the panels. Throws AccuracyError if the depth limit is
// reached with the tolerance still unmet.
double integrate_gk(const std::function<double(double)>& f, double a, double b,
                    double rel_tol, double abs_tol = 0.0, int max_depth = 60);

}  // namespace shl
