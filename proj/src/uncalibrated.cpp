#include "adiabat/uncalibrated.hpp"

#include <algorithm>
#include <cmath>

#include "adiabat/errors.hpp"
#include "adiabat/numeric.hpp"

namespace adiabat {

RecalibrationResult::RecalibrationResult(
    std::shared_ptr<const TransformContext> ctx, GraphFunction f0,
    GraphFunction f1, GraphFunction phi)
    : ctx_(std::move(ctx)),
      f0_(std::move(f0)),
      f1_(std::move(f1)),
      phi_(std::move(phi)) {}

double RecalibrationResult::normalized_entropy_at(double x, double y) const {
  const DomainRect& dom = ctx_->domain();
  if (!dom.contains(x, y))
    throw DomainError("point (" + std::to_string(x) + ", " +
                      std::to_string(y) + ") outside domain");
  const double X = ctx_->f().eval(x, y);
  if (!phi_.contains(X))
    throw RangeError("X=" + std::to_string(X) +
                     " outside the adiabat overlap [" +
                     std::to_string(overlap_min()) + ", " +
                     std::to_string(overlap_max()) + "]");
  const double keep =
      ctx_->orientation() == Orientation::SolveForY ? x : y;
  const double Yt = ctx_->psi(X, keep);
  return (Yt - f0_.value(X)) / (f1_.value(X) - f0_.value(X));
}

std::optional<double> RecalibrationResult::try_normalized_entropy_at(
    double x, double y) const {
  if (!ctx_->domain().contains(x, y)) return std::nullopt;
  try {
    const double X = ctx_->f().eval(x, y);
    if (!phi_.contains(X)) return std::nullopt;
    const double keep =
        ctx_->orientation() == Orientation::SolveForY ? x : y;
    const double Yt = ctx_->psi(X, keep);
    return (Yt - f0_.value(X)) / (f1_.value(X) - f0_.value(X));
  } catch (const Error&) {
    return std::nullopt;
  }
}

double RecalibrationResult::recalibrated_temperature_at(double x,
                                                        double y) const {
  const DomainRect& dom = ctx_->domain();
  if (!dom.contains(x, y))
    throw DomainError("point (" + std::to_string(x) + ", " +
                      std::to_string(y) + ") outside domain");
  const double X = ctx_->f().eval(x, y);
  if (!phi_.contains(X))
    throw RangeError("X=" + std::to_string(X) +
                     " outside the recalibration range [" +
                     std::to_string(overlap_min()) + ", " +
                     std::to_string(overlap_max()) + "]");
  return phi_.value(X);
}

std::optional<double> RecalibrationResult::try_recalibrated_temperature_at(
    double x, double y) const {
  if (!ctx_->domain().contains(x, y)) return std::nullopt;
  try {
    const double X = ctx_->f().eval(x, y);
    if (!phi_.contains(X)) return std::nullopt;
    return phi_.value(X);
  } catch (const Error&) {
    return std::nullopt;
  }
}

std::vector<LevelCurves> RecalibrationResult::level_curves(
    const std::vector<double>& levels, int nx, int ny) const {
  if (nx < 16 || ny < 16) throw DomainError("contour grid must be >= 16x16");
  const GridField grid =
      evaluate_grid(ctx_->domain(), nx, ny, [this](double x, double y) {
        return try_normalized_entropy_at(x, y);
      });
  std::vector<LevelCurves> out;
  out.reserve(levels.size());
  for (double level : levels) {
    if (!std::isfinite(level)) throw DomainError("levels must be finite");
    out.push_back({level, extract_level(grid, level)});
  }
  return out;
}

RecalibrationResult reconstruct_uncalibrated(
    std::shared_ptr<const TransformContext> ctx, const CurveSpec& a0,
    const CurveSpec& a1, int samples) {
  const GraphFunction f0 = build_graph(sample_curve(a0, *ctx, samples), *ctx);
  const GraphFunction f1 = build_graph(sample_curve(a1, *ctx, samples), *ctx);

  const double lo = std::max(f0.x_min(), f1.x_min());
  const double hi = std::min(f0.x_max(), f1.x_max());
  const double span = std::max(f0.x_max() - f0.x_min(),
                               f1.x_max() - f1.x_min());
  if (!(hi - lo > 1e-6 * span))
    throw GraphError(
        "the transformed adiabats have no usable X overlap (f0 on [" +
        std::to_string(f0.x_min()) + ", " + std::to_string(f0.x_max()) +
        "], f1 on [" + std::to_string(f1.x_min()) + ", " +
        std::to_string(f1.x_max()) + "])");

  auto difference = [&](double X) { return f1.value(X) - f0.value(X); };
  // last node pinned exactly to hi so rounding cannot leave the overlap
  auto station = [lo, hi](int k, int count) {
    return k == count - 1
               ? hi
               : lo + (hi - lo) * static_cast<double>(k) / (count - 1);
  };

  // the adiabats must not cross inside the overlap
  constexpr int kScan = 257;
  int sign = 0;
  for (int k = 0; k < kScan; ++k) {
    const double X = station(k, kScan);
    const double d = difference(X);
    if (d == 0.0)
      throw GraphError("adiabats cross at X=" + std::to_string(X));
    const int sg = d > 0.0 ? 1 : -1;
    if (sign == 0) sign = sg;
    if (sg != sign)
      throw GraphError("adiabats cross near X=" + std::to_string(X) +
                       " (f1 - f0 changes sign)");
  }

  // phi = primitive of (f1 - f0), anchored to 0 at the left overlap endpoint
  constexpr int kPhiNodes = 129;
  std::vector<double> xs(kPhiNodes), ys(kPhiNodes);
  const double quad_tol = ctx->settings().quad_tol;
  double acc = 0.0;
  xs[0] = lo;
  ys[0] = 0.0;
  for (int k = 1; k < kPhiNodes; ++k) {
    const double a = station(k - 1, kPhiNodes);
    const double b = station(k, kPhiNodes);
    acc += numeric::adaptive_simpson(difference, a, b, quad_tol);
    xs[k] = b;
    ys[k] = acc;
  }
  GraphFunction phi = GraphFunction::fit(std::move(xs), std::move(ys));

  return RecalibrationResult(std::move(ctx), f0, f1, std::move(phi));
}

double fit_power_law_exponent(const GraphFunction& f0, const GraphFunction& f1,
                              int n_samples) {
  const double lo = std::max(f0.x_min(), f1.x_min());
  const double hi = std::min(f0.x_max(), f1.x_max());
  if (!(lo < hi)) throw GraphError("no overlap to fit");
  if (!(lo > 0.0))
    throw GraphError("power-law fit needs a positive X range, got X_min=" +
                     std::to_string(lo));
  if (n_samples < 2) throw GraphError("power-law fit needs >= 2 samples");

  double sum_u = 0.0, sum_v = 0.0, sum_uu = 0.0, sum_uv = 0.0;
  for (int k = 0; k < n_samples; ++k) {
    const double X = k == n_samples - 1
                         ? hi
                         : lo + (hi - lo) * static_cast<double>(k) /
                                   (n_samples - 1);
    const double d = f1.value(X) - f0.value(X);
    if (d == 0.0) throw GraphError("f1 - f0 vanishes at X=" + std::to_string(X));
    const double u = std::log(X);
    const double v = std::log(std::abs(d));
    sum_u += u;
    sum_v += v;
    sum_uu += u * u;
    sum_uv += u * v;
  }
  const double n = static_cast<double>(n_samples);
  const double denom = n * sum_uu - sum_u * sum_u;
  if (denom == 0.0) throw GraphError("degenerate abscissa in power-law fit");
  return (n * sum_uv - sum_u * sum_v) / denom;
}

}  // namespace adiabat
