#pragma once

#include <functional>

namespace gdnls {

/// Adaptive Gauss-Kronrod (G7/K15) quadrature on [a, b]. Worst-panel-first
/// bisection until the summed K15-G7 error estimate drops below the
/// absolute tolerance (with a small relative floor against roundoff).
/// Throws when the panel budget is exhausted while the estimate is still
/// far from the goal.
double adaptive_integrate(const std::function<double(double)>& f, double a,
                          double b, double abs_tol = 1e-13,
                          int max_panels = 20000);

}  // namespace gdnls
