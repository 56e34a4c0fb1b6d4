#pragma once

#include <vector>

namespace shl {

// Order-zero / order-one cylinder functions on [0, ~1e3], absolute error
// below 1e-12: long-double power series for x <= 16, Hankel asymptotic
// expansion beyond.
double cyl_j0(double x);
double cyl_j1(double x);

// First k_max positive zeros of J0, refined by Newton from McMahon guesses
// until |J0(z)| <= 1e-12 (in practice ~1e-15).
std::vector<double> j0_zeros(int k_max);

}  // namespace shl
