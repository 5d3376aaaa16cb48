#pragma once

#include <functional>

namespace adiabat::numeric {

struct RootOptions {
  double x_tol = 1e-12;  // target interval width, relative to max(1, |root|)
  int max_iter = 200;
};

/// Bracketed 1-D root finding: bisection with secant acceleration.
/// `r_lo` and `r_hi` are the residuals at `lo` and `hi`; they must have
/// opposite signs (or one of them is exactly zero).
double solve_bracketed(const std::function<double(double)>& r, double lo,
                       double hi, double r_lo, double r_hi,
                       const RootOptions& opts = {});

/// Convenience overload that evaluates the endpoints itself.
double solve_bracketed(const std::function<double(double)>& r, double lo,
                       double hi, const RootOptions& opts = {});

/// Adaptive Simpson quadrature with a combined absolute/relative tolerance.
/// Function values at shared nodes are passed down the recursion, so the
/// integrand is evaluated once per node along the sweep. Throws
/// QuadratureError when `max_depth` subdivisions cannot reach the target.
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol, int max_depth = 40);

}  // namespace adiabat::numeric
