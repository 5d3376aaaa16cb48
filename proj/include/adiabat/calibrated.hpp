#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "adiabat/contour.hpp"
#include "adiabat/expr.hpp"
#include "adiabat/geometry.hpp"
#include "adiabat/transform.hpp"

namespace adiabat {

/// An adiabat supplied implicitly ({g = 0}), explicitly (y = h(x) over an
/// x-interval), or as an ordered point list.
class CurveSpec {
 public:
  enum class Kind { Implicit, Explicit, Points };

  static CurveSpec implicit(Expression g);
  /// y = h(x) over [x_lo, x_hi]; NaN bounds default to the domain x-range.
  static CurveSpec explicit_graph(Expression h,
                                  double x_lo = std::numeric_limits<double>::quiet_NaN(),
                                  double x_hi = std::numeric_limits<double>::quiet_NaN());
  /// Point lists need >= 4 points with strictly monotone x after sorting.
  static CurveSpec points(std::vector<Point> pts);

  Kind kind() const { return kind_; }
  const Expression& expression() const { return expr_; }
  double x_lo() const { return x_lo_; }
  double x_hi() const { return x_hi_; }
  const std::vector<Point>& point_list() const { return points_; }

 private:
  CurveSpec() = default;
  Kind kind_ = Kind::Implicit;
  Expression expr_;
  double x_lo_ = 0.0, x_hi_ = 0.0;
  std::vector<Point> points_;
};

/// n points on the curve inside the domain. Implicit curves are traced on n
/// x-stations by bracketed root solving in y (falling back to y-stations
/// solving for x when some station has no y-bracket); a station with several
/// roots is an ambiguous-branch error.
std::vector<Point> sample_curve(const CurveSpec& spec,
                                const TransformContext& ctx, int n);

/// Monotone-cubic (shape-preserving) interpolant through strictly increasing
/// breakpoints. Passes through all breakpoints exactly; between breakpoints
/// it stays within the local data envelope. Evaluation outside the breakpoint
/// range is refused.
class GraphFunction {
 public:
  GraphFunction() = default;
  static GraphFunction fit(std::vector<double> xs, std::vector<double> ys);

  double value(double x) const;
  double slope(double x) const;
  double operator()(double x) const { return value(x); }

  double x_min() const { return x_.front(); }
  double x_max() const { return x_.back(); }
  bool contains(double x) const {
    return !x_.empty() && x >= x_.front() && x <= x_.back();
  }
  std::size_t size() const { return x_.size(); }
  const std::vector<double>& breakpoints() const { return x_; }
  const std::vector<double>& values() const { return y_; }

 private:
  std::size_t interval(double x) const;
  std::vector<double> x_, y_, m_;
};

/// Step 5: map the sampled adiabat into the straightened plane and express it
/// as the graph Yt = F(Xt).
GraphFunction build_graph(const std::vector<Point>& pts,
                          const TransformContext& ctx);

struct LevelCurves {
  double level = 0.0;
  std::vector<Polyline> polylines;
};

/// Step 6: S(x,y) = Yt(x,y) - F(Xt(x,y)), gauged so S = 0 on the input
/// adiabat. Immutable and reentrant.
class EntropyField {
 public:
  EntropyField(std::shared_ptr<const TransformContext> ctx, GraphFunction F);

  /// Refuses evaluation when Xt(x,y) leaves F's breakpoint range: entropy
  /// values there would be extrapolation fabrications.
  double entropy_at(double x, double y) const;

  /// Masked variant for grid evaluation: nullopt where entropy_at would
  /// refuse or the inversion fails.
  std::optional<double> try_entropy_at(double x, double y) const;

  /// Evaluates S on a grid (failed cells masked) and extracts the requested
  /// levels by marching squares.
  std::vector<LevelCurves> level_curves(const std::vector<double>& levels,
                                        int nx, int ny) const;
  GridField entropy_grid(int nx, int ny) const;

  const TransformContext& ctx() const { return *ctx_; }
  std::shared_ptr<const TransformContext> ctx_ptr() const { return ctx_; }
  const GraphFunction& graph() const { return F_; }
  /// Valid temperature band [Xt_min, Xt_max].
  std::pair<double, double> valid_band() const {
    return {F_.x_min(), F_.x_max()};
  }
  const std::string& gauge_note() const { return gauge_note_; }
  const char* mode() const { return "calibrated"; }

 private:
  std::shared_ptr<const TransformContext> ctx_;
  GraphFunction F_;
  std::string gauge_note_;
};

/// Full Steps 5-6 pipeline: sample the adiabat, build F, return the field.
EntropyField reconstruct_calibrated(std::shared_ptr<const TransformContext> ctx,
                                    const CurveSpec& adiabat,
                                    int samples = 129);

}  // namespace adiabat
