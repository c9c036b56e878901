#pragma once

#include <functional>

namespace drsd {

struct QuadratureOptions {
  double rel_tol = 1e-8;
  double abs_tol = 1e-14;
  int max_depth = 48;
};

// Adaptive Simpson quadrature of f over [a, b] with Richardson correction.
// Recursion stops when the local error estimate is below
// max(rel_tol * |estimate|, abs_tol) scaled to the subinterval.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        const QuadratureOptions& opts = {});

}  // namespace drsd
