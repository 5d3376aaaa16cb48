#include "adiabat/transform.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "adiabat/errors.hpp"
#include "adiabat/numeric.hpp"

namespace adiabat {

namespace {

// brackets may grow to this many domain widths before the target value is
// declared unattainable
constexpr double kMaxBracketGrowth = 64.0;

std::string point_str(double x, double y) {
  return "(" + std::to_string(x) + ", " + std::to_string(y) + ")";
}

}  // namespace

TransformContext::TransformContext(Expression f, DomainRect domain,
                                   TransformSettings settings)
    : f_(std::move(f)), domain_(domain), settings_(settings) {
  if (!(domain_.x_min < domain_.x_max) || !(domain_.y_min < domain_.y_max))
    throw DomainError("domain rectangle must have positive area");
  if (!f_.valid()) throw ConfigError("equation of state expression is empty");

  const char* partial_name = solve_is_y() ? "f_y" : "f_x";
  df_ = f_.derivative(solve_is_y() ? Var::Y : Var::X);

  const int n = std::max(settings_.sign_scan, 2);
  int sign = 0;
  for (int j = 0; j < n; ++j) {
    const double y =
        domain_.y_min + domain_.height() * static_cast<double>(j) / (n - 1);
    for (int i = 0; i < n; ++i) {
      const double x =
          domain_.x_min + domain_.width() * static_cast<double>(i) / (n - 1);
      double d;
      try {
        d = df_.eval(x, y);
      } catch (const Error& e) {
        throw SignScanError(std::string(partial_name) +
                            " not evaluable at " + point_str(x, y) + ": " +
                            e.what());
      }
      if (d == 0.0)
        throw SignScanError(
            std::string(partial_name) + " vanishes at " + point_str(x, y) +
            "; trim the domain rectangle" +
            (solve_is_y() ? " or use the x-solve orientation" : ""));
      const int sg = d > 0.0 ? 1 : -1;
      if (sign == 0) sign = sg;
      if (sg != sign)
        throw SignScanError(
            std::string(partial_name) + " changes sign near " +
            point_str(x, y) + "; trim the domain rectangle" +
            (solve_is_y() ? " or use the x-solve orientation" : ""));
    }
  }
  df_sign_ = sign;

  anchor_ = std::isfinite(settings_.anchor) ? settings_.anchor : keep_min();
  if (anchor_ < keep_min() || anchor_ > keep_max())
    throw DomainError("quadrature anchor " + std::to_string(anchor_) +
                      " lies outside [" + std::to_string(keep_min()) + ", " +
                      std::to_string(keep_max()) + "]");
}

void TransformContext::check_keep_range(double Y, const char* what) const {
  const double slack = 1e-9 * (keep_max() - keep_min());
  if (Y < keep_min() - slack || Y > keep_max() + slack)
    throw DomainError(std::string(what) + ": coordinate " + std::to_string(Y) +
                      " outside [" + std::to_string(keep_min()) + ", " +
                      std::to_string(keep_max()) + "]");
}

std::pair<double, double> TransformContext::forward_xy(double x,
                                                       double y) const {
  if (!domain_.contains(x, y))
    throw DomainError("point " + point_str(x, y) + " outside domain");
  return {f_.eval(x, y), keep_of(x, y)};
}

double TransformContext::invert_solve(double X, double keep,
                                      double hint) const {
  auto residual = [&](double sv) {
    auto [x, y] = state_of(keep, sv);
    return f_.eval(x, y) - X;
  };
  // valid = f and its inversion partial evaluate, and the partial keeps the
  // sign established by the construction scan (same monotone branch)
  auto valid = [&](double sv) -> bool {
    auto [x, y] = state_of(keep, sv);
    try {
      const double d = df_.eval(x, y);
      if (d == 0.0 || (d > 0.0) != (df_sign_ > 0)) return false;
      (void)f_.eval(x, y);
    } catch (const Error&) {
      return false;
    }
    return true;
  };

  numeric::RootOptions opts;
  opts.x_tol = settings_.root_tol;

  // warm start: plain secant from the previous quadrature node, accepted on
  // the residual itself
  if (std::isfinite(hint)) {
    const double accept = settings_.root_tol * std::max(1.0, std::abs(X));
    double x0 = hint;
    double x1 = hint + std::max(1e-9, 1e-7 * std::abs(hint));
    if (valid(x0) && valid(x1)) {
      double r0 = residual(x0);
      double r1 = residual(x1);
      for (int it = 0; it < 20; ++it) {
        if (std::abs(r1) <= accept) return x1;
        if (r1 == r0) break;
        const double x2 = x1 - r1 * (x1 - x0) / (r1 - r0);
        if (!std::isfinite(x2) || !valid(x2)) break;
        x0 = x1;
        r0 = r1;
        x1 = x2;
        r1 = residual(x1);
      }
    }
  }

  // bracketed path: start from the rectangle's solve-range, expand outward
  // while the monotone branch persists
  double lo = solve_min();
  double hi = solve_max();
  double r_lo, r_hi;
  try {
    r_lo = residual(lo);
    r_hi = residual(hi);
  } catch (const Error& e) {
    throw InversionError("inversion failed at keep=" + std::to_string(keep) +
                         ": " + e.what());
  }

  const bool increasing = df_sign_ > 0;
  auto bracketed = [&] { return (r_lo > 0.0) != (r_hi > 0.0) ||
                                r_lo == 0.0 || r_hi == 0.0; };

  if (!bracketed()) {
    const double width = hi - lo;
    const double cap = kMaxBracketGrowth * width;
    // the root lies below lo when an increasing residual is already positive
    // there (mirrored for decreasing)
    const bool below = increasing ? (r_lo > 0.0) : (r_lo < 0.0);
    double cur = below ? lo : hi;
    double r_cur = below ? r_lo : r_hi;
    double step = width;
    double moved = 0.0;
    bool found = false;
    for (int it = 0; it < 200 && !found; ++it) {
      if (step < 1e-14 * (1.0 + std::abs(cur))) break;  // hit a barrier
      if (moved + step > cap) step = cap - moved;
      if (step <= 0.0) break;
      const double trial = below ? cur - step : cur + step;
      if (!valid(trial)) {
        step *= 0.5;
        continue;
      }
      const double r_trial = residual(trial);
      if (!std::isfinite(r_trial)) {
        step *= 0.5;
        continue;
      }
      if (r_trial == 0.0 || (r_trial > 0.0) != (r_cur > 0.0)) {
        if (below) {
          lo = trial;
          r_lo = r_trial;
          hi = cur;
          r_hi = r_cur;
        } else {
          lo = cur;
          r_lo = r_cur;
          hi = trial;
          r_hi = r_trial;
        }
        found = true;
        break;
      }
      moved += step;
      cur = trial;
      r_cur = r_trial;
      step *= 2.0;
    }
    if (!found)
      throw InversionError(
          "X=" + std::to_string(X) + " unattainable along the segment at " +
          (solve_is_y() ? "x=" : "y=") + std::to_string(keep) +
          " (searched [" + std::to_string(std::min(lo, cur)) + ", " +
          std::to_string(std::max(hi, cur)) + "])");
  }

  return numeric::solve_bracketed(residual, lo, hi, r_lo, r_hi, opts);
}

std::pair<double, double> TransformContext::invert_xy(double X,
                                                      double Y) const {
  check_keep_range(Y, "invert_xy");
  const double sv =
      invert_solve(X, Y, std::numeric_limits<double>::quiet_NaN());
  return state_of(Y, sv);
}

double TransformContext::psi_increment(double X, double from, double to,
                                       double* hint) const {
  auto integrand = [&](double Yp) {
    const double sv = invert_solve(X, Yp, *hint);
    *hint = sv;
    auto [x, y] = state_of(Yp, sv);
    return 1.0 / df_.eval(x, y);
  };
  return -numeric::adaptive_simpson(integrand, from, to, settings_.quad_tol);
}

double TransformContext::psi(double X, double Y) const {
  check_keep_range(Y, "psi");
  double hint = std::numeric_limits<double>::quiet_NaN();
  return psi_increment(X, anchor_, Y, &hint);
}

TildePoint TransformContext::forward_tilde(double x, double y) const {
  if (!domain_.contains(x, y))
    throw DomainError("point " + point_str(x, y) + " outside domain");
  const double X = f_.eval(x, y);
  return {X, psi(X, keep_of(x, y))};
}

std::pair<double, double> TransformContext::invert_tilde(TildePoint p) const {
  // psi is strictly monotone in Y (its Y-derivative -1/f_y has constant
  // sign), so track it incrementally between solver iterates instead of
  // re-integrating from the anchor each time
  double last_Y = anchor_;
  double last_psi = 0.0;
  double hint = std::numeric_limits<double>::quiet_NaN();
  auto psi_at = [&](double Y) {
    last_psi += psi_increment(p.Xt, last_Y, Y, &hint);
    last_Y = Y;
    return last_psi;
  };
  auto residual = [&](double Y) { return psi_at(Y) - p.Yt; };

  const double lo = keep_min();
  const double hi = keep_max();
  const double r_lo = residual(lo);
  const double r_hi = residual(hi);
  if ((r_lo > 0.0) == (r_hi > 0.0) && r_lo != 0.0 && r_hi != 0.0)
    throw InversionError(
        "tilde point (" + std::to_string(p.Xt) + ", " + std::to_string(p.Yt) +
        ") is outside the band attainable from the domain");

  numeric::RootOptions opts;
  opts.x_tol = settings_.root_tol;
  const double Y = numeric::solve_bracketed(residual, lo, hi, r_lo, r_hi, opts);
  return invert_xy(p.Xt, Y);
}

double TransformContext::jacobian_det(double x, double y, double h) const {
  if (!(h > 0.0)) throw DomainError("stencil width must be positive");
  if (!domain_.contains(x - h, y - h) || !domain_.contains(x + h, y + h))
    throw DomainError("central-difference stencil around " + point_str(x, y) +
                      " leaves the domain");
  const TildePoint xp = forward_tilde(x + h, y);
  const TildePoint xm = forward_tilde(x - h, y);
  const TildePoint yp = forward_tilde(x, y + h);
  const TildePoint ym = forward_tilde(x, y - h);
  const double inv2h = 1.0 / (2.0 * h);
  const double Xx = (xp.Xt - xm.Xt) * inv2h;
  const double Yx = (xp.Yt - xm.Yt) * inv2h;
  const double Xy = (yp.Xt - ym.Xt) * inv2h;
  const double Yy = (yp.Yt - ym.Yt) * inv2h;
  return Xx * Yy - Xy * Yx;
}

}  // namespace adiabat
