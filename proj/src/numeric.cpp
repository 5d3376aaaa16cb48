#include "adiabat/numeric.hpp"

#include <algorithm>
#include <cmath>

#include "adiabat/errors.hpp"

namespace adiabat::numeric {

namespace {

bool same_sign(double a, double b) { return (a > 0.0) == (b > 0.0); }

}  // namespace

double solve_bracketed(const std::function<double(double)>& r, double lo,
                       double hi, double r_lo, double r_hi,
                       const RootOptions& opts) {
  if (lo > hi) {
    std::swap(lo, hi);
    std::swap(r_lo, r_hi);
  }
  if (r_lo == 0.0) return lo;
  if (r_hi == 0.0) return hi;
  if (same_sign(r_lo, r_hi))
    throw InversionError("root not bracketed on [" + std::to_string(lo) +
                         ", " + std::to_string(hi) + "]");

  double a = lo, b = hi, ra = r_lo, rb = r_hi;
  // previous iterate, for the secant step
  double prev = a, r_prev = ra;
  double cur = b, r_cur = rb;

  for (int it = 0; it < opts.max_iter; ++it) {
    const double width = b - a;
    const double scale = std::max({1.0, std::abs(a), std::abs(b)});
    if (width <= opts.x_tol * scale) break;

    double cand;
    if (r_cur != r_prev)
      cand = cur - r_cur * (cur - prev) / (r_cur - r_prev);
    else
      cand = 0.5 * (a + b);

    // keep the candidate strictly inside and force a bisection step
    // periodically so the bracket width provably shrinks
    const double guard = 0.01 * width;
    if (!(cand > a + guard) || !(cand < b - guard) || it % 4 == 3)
      cand = 0.5 * (a + b);

    const double r_cand = r(cand);
    prev = cur;
    r_prev = r_cur;
    cur = cand;
    r_cur = r_cand;

    if (r_cand == 0.0) return cand;
    if (same_sign(r_cand, ra)) {
      a = cand;
      ra = r_cand;
    } else {
      b = cand;
      rb = r_cand;
    }
  }
  return std::abs(ra) <= std::abs(rb) ? a : b;
}

double solve_bracketed(const std::function<double(double)>& r, double lo,
                       double hi, const RootOptions& opts) {
  return solve_bracketed(r, lo, hi, r(lo), r(hi), opts);
}

namespace {

double simpson_rec(const std::function<double(double)>& f, double a, double b,
                   double fa, double fm, double fb, double whole, double eps,
                   int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * eps) return left + right + delta / 15.0;
  if (depth <= 0)
    throw QuadratureError(
        "quadrature tolerance not reached at max refinement depth near [" +
        std::to_string(a) + ", " + std::to_string(b) + "]");
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol, int max_depth) {
  if (a == b) return 0.0;
  const double fa = f(a);
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  const double fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double eps = tol * std::max(1.0, std::abs(whole));
  return simpson_rec(f, a, b, fa, fm, fb, whole, eps, max_depth);
}

}  // namespace adiabat::numeric
