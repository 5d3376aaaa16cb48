#pragma once

#include <limits>
#include <memory>
#include <utility>

#include "adiabat/expr.hpp"
#include "adiabat/geometry.hpp"

namespace adiabat {

/// Which variable the Step-2 inversion eliminates. The default keeps Y = x
/// and solves f(Y, y) = X for y; SolveForX is the fallback for equations of
/// state whose y-partial vanishes somewhere (it keeps Y = y and solves for x).
enum class Orientation { SolveForY, SolveForX };

/// Point in the straightened plane: Xt carries the units of f (temperature),
/// Yt is the conjugate coordinate produced by the psi quadrature.
struct TildePoint {
  double Xt = 0.0;
  double Yt = 0.0;
};

struct TransformSettings {
  double root_tol = 1e-12;
  double quad_tol = 1e-10;
  /// Quadrature anchor Y_ref with psi(X, Y_ref) = 0; defaults to the lower
  /// end of the kept variable's range.
  double anchor = std::numeric_limits<double>::quiet_NaN();
  Orientation orientation = Orientation::SolveForY;
  int sign_scan = 33;  // per-axis resolution of the constructor's sign scan
};

/// The two coordinate changes (x,y) -> (X,Y) -> (Xt,Yt), their numerical
/// inverses, and the psi quadrature. Immutable after construction; all
/// operations are reentrant.
class TransformContext {
 public:
  /// Validates the domain and scans the inversion partial (f_y, or f_x under
  /// SolveForX) for a zero or sign change; throws SignScanError on failure.
  TransformContext(Expression f, DomainRect domain,
                   TransformSettings settings = {});

  /// Step 1: X = f(x,y), Y = x (Y = y under SolveForX).
  std::pair<double, double> forward_xy(double x, double y) const;

  /// Step 2: recover (x,y) from (X,Y) by bracketed root solving in the
  /// eliminated variable. The bracket starts at the domain rectangle and is
  /// widened geometrically while the inversion partial keeps its sign, so
  /// isotherm segments that leave the rectangle remain invertible.
  std::pair<double, double> invert_xy(double X, double Y) const;

  /// Step 3: psi(X, Y) = -integral from anchor to Y of dY'/f_y along the
  /// isotherm f = X, by adaptive Simpson quadrature.
  double psi(double X, double Y) const;

  /// Step 4 forward: Xt = f(x,y), Yt = psi(Xt, Y).
  TildePoint forward_tilde(double x, double y) const;

  /// Step 4 inverse: solves psi(Xt, Y) = Yt for Y (psi is strictly monotone
  /// in Y), then applies invert_xy.
  std::pair<double, double> invert_tilde(TildePoint p) const;

  /// Central-difference determinant of d(Xt,Yt)/d(x,y) with stencil width h.
  /// Expected value: +1 under SolveForY, -1 under SolveForX.
  double jacobian_det(double x, double y, double h) const;

  const Expression& f() const { return f_; }
  /// The partial derivative used for inversion (f_y or f_x).
  const Expression& inversion_partial() const { return df_; }
  const DomainRect& domain() const { return domain_; }
  const TransformSettings& settings() const { return settings_; }
  double anchor() const { return anchor_; }
  Orientation orientation() const { return settings_.orientation; }
  int partial_sign() const { return df_sign_; }
  double expected_jacobian_sign() const {
    return settings_.orientation == Orientation::SolveForY ? 1.0 : -1.0;
  }

 private:
  bool solve_is_y() const {
    return settings_.orientation == Orientation::SolveForY;
  }
  double keep_min() const {
    return solve_is_y() ? domain_.x_min : domain_.y_min;
  }
  double keep_max() const {
    return solve_is_y() ? domain_.x_max : domain_.y_max;
  }
  double solve_min() const {
    return solve_is_y() ? domain_.y_min : domain_.x_min;
  }
  double solve_max() const {
    return solve_is_y() ? domain_.y_max : domain_.x_max;
  }
  double keep_of(double x, double y) const { return solve_is_y() ? x : y; }
  std::pair<double, double> state_of(double keep, double solve) const {
    return solve_is_y() ? std::pair{keep, solve} : std::pair{solve, keep};
  }

  void check_keep_range(double Y, const char* what) const;
  /// Solves f = X at fixed kept coordinate; `hint`, when finite, warm-starts
  /// a secant iteration before falling back to the bracketed solver.
  double invert_solve(double X, double keep, double hint) const;
  double psi_increment(double X, double from, double to, double* hint) const;

  Expression f_;
  Expression df_;
  DomainRect domain_;
  TransformSettings settings_;
  double anchor_ = 0.0;
  int df_sign_ = 0;
};

}  // namespace adiabat
