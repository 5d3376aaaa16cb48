#include "adiabat/calibrated.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "adiabat/errors.hpp"
#include "adiabat/numeric.hpp"

namespace adiabat {

// ---------------------------------------------------------------------------
// CurveSpec

CurveSpec CurveSpec::implicit(Expression g) {
  CurveSpec c;
  c.kind_ = Kind::Implicit;
  c.expr_ = std::move(g);
  return c;
}

CurveSpec CurveSpec::explicit_graph(Expression h, double x_lo, double x_hi) {
  CurveSpec c;
  c.kind_ = Kind::Explicit;
  c.expr_ = std::move(h);
  if (c.expr_.uses(Var::Y))
    throw ConfigError("explicit curve y = h(x) must not reference y");
  c.x_lo_ = x_lo;
  c.x_hi_ = x_hi;
  return c;
}

CurveSpec CurveSpec::points(std::vector<Point> pts) {
  CurveSpec c;
  c.kind_ = Kind::Points;
  c.points_ = std::move(pts);
  return c;
}

// ---------------------------------------------------------------------------
// sampling

namespace {

// Finds the single root of `value` on [lo, hi] at a fixed station, scanning
// for sign changes first. Returns nullopt when there is no root; throws on
// ambiguity. Samples where `value` is not evaluable are treated as gaps.
std::optional<double> single_root(const std::function<double(double)>& value,
                                  double lo, double hi, double tol,
                                  const std::string& station) {
  constexpr int kScan = 64;
  double prev_t = lo;
  double prev_v = std::numeric_limits<double>::quiet_NaN();
  try {
    prev_v = value(lo);
  } catch (const Error&) {
  }

  double bracket_lo = 0.0, bracket_hi = 0.0;
  bool have_bracket = false;
  std::optional<double> exact;
  int roots = 0;

  auto note_root = [&](std::optional<double> at, double br_lo, double br_hi,
                       bool bracketed) {
    ++roots;
    if (roots > 1)
      throw CurveError("ambiguous branch at " + station +
                       ": several roots found; restrict the domain to "
                       "isolate one branch");
    exact = at;
    bracket_lo = br_lo;
    bracket_hi = br_hi;
    have_bracket = bracketed;
  };

  if (!std::isnan(prev_v) && prev_v == 0.0) note_root(lo, 0.0, 0.0, false);
  for (int k = 1; k <= kScan; ++k) {
    const double t = lo + (hi - lo) * static_cast<double>(k) / kScan;
    double v = std::numeric_limits<double>::quiet_NaN();
    try {
      v = value(t);
    } catch (const Error&) {
    }
    if (!std::isnan(v)) {
      if (v == 0.0)
        note_root(t, 0.0, 0.0, false);
      else if (!std::isnan(prev_v) && prev_v != 0.0 &&
               (v > 0.0) != (prev_v > 0.0))
        note_root(std::nullopt, prev_t, t, true);
    }
    prev_t = t;
    prev_v = v;
  }

  if (roots == 0) return std::nullopt;
  if (exact) return exact;
  if (!have_bracket) return std::nullopt;

  numeric::RootOptions opts;
  opts.x_tol = tol;
  return numeric::solve_bracketed(value, bracket_lo, bracket_hi, opts);
}

std::vector<Point> sample_implicit(const Expression& g,
                                   const TransformContext& ctx, int n) {
  const DomainRect& dom = ctx.domain();
  const double tol = ctx.settings().root_tol;

  // pass 1: x-stations, solve for y
  std::vector<Point> pts;
  bool all_found = true;
  for (int i = 0; i < n; ++i) {
    const double x = dom.x_min + dom.width() * static_cast<double>(i) / (n - 1);
    auto root = single_root([&](double y) { return g.eval(x, y); }, dom.y_min,
                            dom.y_max, tol, "x-station " + std::to_string(x));
    if (!root) {
      all_found = false;
      break;
    }
    pts.push_back({x, *root});
  }
  if (all_found) return pts;

  // pass 2 fallback: y-stations, solve for x
  pts.clear();
  bool any_found = false;
  bool all_y_found = true;
  for (int j = 0; j < n; ++j) {
    const double y =
        dom.y_min + dom.height() * static_cast<double>(j) / (n - 1);
    auto root = single_root([&](double x) { return g.eval(x, y); }, dom.x_min,
                            dom.x_max, tol, "y-station " + std::to_string(y));
    if (!root) {
      all_y_found = false;
      continue;
    }
    any_found = true;
    pts.push_back({*root, y});
  }
  if (all_y_found) return pts;
  if (!any_found)
    throw CurveError("implicit curve does not intersect the domain");
  throw CurveError(
      "implicit curve spans neither the full x-range nor the full y-range "
      "of the domain; restrict the domain to the curve");
}

}  // namespace

std::vector<Point> sample_curve(const CurveSpec& spec,
                                const TransformContext& ctx, int n) {
  const DomainRect& dom = ctx.domain();

  if (spec.kind() == CurveSpec::Kind::Points) {
    std::vector<Point> pts = spec.point_list();
    if (pts.size() < 4)
      throw CurveError("point list needs at least 4 points, got " +
                       std::to_string(pts.size()));
    std::sort(pts.begin(), pts.end(),
              [](const Point& a, const Point& b) { return a.x < b.x; });
    for (size_t k = 0; k + 1 < pts.size(); ++k)
      if (!(pts[k].x < pts[k + 1].x))
        throw CurveError("point list is not strictly monotone in x near x=" +
                         std::to_string(pts[k].x));
    for (const Point& p : pts)
      if (!dom.contains(p.x, p.y))
        throw CurveError("point (" + std::to_string(p.x) + ", " +
                         std::to_string(p.y) + ") lies outside the domain");
    return pts;
  }

  if (n < 4) throw CurveError("need at least 4 samples");

  if (spec.kind() == CurveSpec::Kind::Explicit) {
    double lo = std::isnan(spec.x_lo()) ? dom.x_min : spec.x_lo();
    double hi = std::isnan(spec.x_hi()) ? dom.x_max : spec.x_hi();
    lo = std::max(lo, dom.x_min);
    hi = std::min(hi, dom.x_max);
    if (!(lo < hi))
      throw CurveError("explicit curve interval does not intersect the domain");
    std::vector<Point> pts;
    pts.reserve(n);
    for (int i = 0; i < n; ++i) {
      const double x = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
      const double y = spec.expression().eval(x, 0.0);
      if (y < dom.y_min || y > dom.y_max)
        throw CurveError("explicit curve leaves the domain at x=" +
                         std::to_string(x) + " (y=" + std::to_string(y) + ")");
      pts.push_back({x, y});
    }
    return pts;
  }

  return sample_implicit(spec.expression(), ctx, n);
}

// ---------------------------------------------------------------------------
// GraphFunction: Fritsch-Carlson monotone cubic

namespace {

double sign_of(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

double end_slope(double h0, double h1, double d0, double d1) {
  double m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
  if (sign_of(m) != sign_of(d0))
    m = 0.0;
  else if (sign_of(d0) != sign_of(d1) && std::abs(m) > 3.0 * std::abs(d0))
    m = 3.0 * d0;
  return m;
}

}  // namespace

GraphFunction GraphFunction::fit(std::vector<double> xs,
                                 std::vector<double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw GraphError("interpolant needs at least 2 breakpoints");
  for (size_t k = 0; k + 1 < xs.size(); ++k)
    if (!(xs[k] < xs[k + 1]))
      throw GraphError("breakpoints must be strictly increasing");

  const size_t n = xs.size();
  std::vector<double> h(n - 1), d(n - 1), m(n);
  for (size_t k = 0; k + 1 < n; ++k) {
    h[k] = xs[k + 1] - xs[k];
    d[k] = (ys[k + 1] - ys[k]) / h[k];
  }
  if (n == 2) {
    m[0] = m[1] = d[0];
  } else {
    for (size_t k = 1; k + 1 < n; ++k) {
      if (d[k - 1] == 0.0 || d[k] == 0.0 ||
          sign_of(d[k - 1]) != sign_of(d[k])) {
        m[k] = 0.0;
      } else {
        // weighted harmonic mean; keeps |m| <= 3 min(|d-|, |d+|), which
        // bounds the cubic inside the local data envelope
        const double w1 = 2.0 * h[k] + h[k - 1];
        const double w2 = h[k] + 2.0 * h[k - 1];
        m[k] = (w1 + w2) / (w1 / d[k - 1] + w2 / d[k]);
      }
    }
    m[0] = end_slope(h[0], h[1], d[0], d[1]);
    m[n - 1] = end_slope(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
  }

  GraphFunction g;
  g.x_ = std::move(xs);
  g.y_ = std::move(ys);
  g.m_ = std::move(m);
  return g;
}

std::size_t GraphFunction::interval(double x) const {
  if (x_.empty()) throw RangeError("empty graph function");
  if (!contains(x))
    throw RangeError("X=" + std::to_string(x) +
                     " outside the graph range [" + std::to_string(x_min()) +
                     ", " + std::to_string(x_max()) + "]");
  auto it = std::upper_bound(x_.begin(), x_.end(), x);
  std::size_t i = static_cast<std::size_t>(it - x_.begin());
  if (i > 0) --i;
  if (i + 1 >= x_.size()) i = x_.size() - 2;
  return i;
}

double GraphFunction::value(double x) const {
  const std::size_t i = interval(x);
  const double h = x_[i + 1] - x_[i];
  const double u = (x - x_[i]) / h;
  const double u2 = u * u;
  const double u3 = u2 * u;
  const double h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
  const double h10 = u3 - 2.0 * u2 + u;
  const double h01 = -2.0 * u3 + 3.0 * u2;
  const double h11 = u3 - u2;
  return h00 * y_[i] + h * h10 * m_[i] + h01 * y_[i + 1] + h * h11 * m_[i + 1];
}

double GraphFunction::slope(double x) const {
  const std::size_t i = interval(x);
  const double h = x_[i + 1] - x_[i];
  const double u = (x - x_[i]) / h;
  const double u2 = u * u;
  const double g00 = (6.0 * u2 - 6.0 * u) / h;
  const double g10 = 3.0 * u2 - 4.0 * u + 1.0;
  const double g01 = (-6.0 * u2 + 6.0 * u) / h;
  const double g11 = 3.0 * u2 - 2.0 * u;
  return g00 * y_[i] + g10 * m_[i] + g01 * y_[i + 1] + g11 * m_[i + 1];
}

// ---------------------------------------------------------------------------
// build_graph

GraphFunction build_graph(const std::vector<Point>& pts,
                          const TransformContext& ctx) {
  if (pts.size() < 4)
    throw GraphError("need at least 4 curve samples, got " +
                     std::to_string(pts.size()));

  std::vector<std::pair<double, double>> tp;
  tp.reserve(pts.size());
  for (const Point& p : pts) {
    const TildePoint t = ctx.forward_tilde(p.x, p.y);
    tp.emplace_back(t.Xt, t.Yt);
  }
  std::sort(tp.begin(), tp.end());

  double x_scale = 1.0, y_scale = 1.0;
  for (const auto& [X, Y] : tp) {
    x_scale = std::max(x_scale, std::abs(X));
    y_scale = std::max(y_scale, std::abs(Y));
  }
  const double x_tol = 1e-9 * x_scale;
  const double y_tol = 1e-6 * y_scale;

  std::vector<double> xs, ys;
  xs.reserve(tp.size());
  ys.reserve(tp.size());
  for (const auto& [X, Y] : tp) {
    if (!xs.empty() && X - xs.back() <= x_tol) {
      if (std::abs(Y - ys.back()) > y_tol)
        throw GraphError(
            "transformed adiabat is not a graph over X: two samples share "
            "X=" + std::to_string(X) +
            " with different Y (the adiabat meets one isotherm twice)");
      continue;  // duplicate sample
    }
    xs.push_back(X);
    ys.push_back(Y);
  }
  if (xs.size() < 4)
    throw GraphError("fewer than 4 distinct X values after transformation");
  return GraphFunction::fit(std::move(xs), std::move(ys));
}

// ---------------------------------------------------------------------------
// EntropyField

EntropyField::EntropyField(std::shared_ptr<const TransformContext> ctx,
                           GraphFunction F)
    : ctx_(std::move(ctx)),
      F_(std::move(F)),
      gauge_note_("S = 0 on the input adiabat") {}

double EntropyField::entropy_at(double x, double y) const {
  const DomainRect& dom = ctx_->domain();
  if (!dom.contains(x, y))
    throw DomainError("point (" + std::to_string(x) + ", " +
                      std::to_string(y) + ") outside domain");
  const double X = ctx_->f().eval(x, y);
  if (!F_.contains(X))
    throw RangeError("temperature X=" + std::to_string(X) +
                     " outside the reconstructed band [" +
                     std::to_string(F_.x_min()) + ", " +
                     std::to_string(F_.x_max()) + "]");
  const double keep =
      ctx_->orientation() == Orientation::SolveForY ? x : y;
  return ctx_->psi(X, keep) - F_.value(X);
}

std::optional<double> EntropyField::try_entropy_at(double x, double y) const {
  if (!ctx_->domain().contains(x, y)) return std::nullopt;
  try {
    const double X = ctx_->f().eval(x, y);
    if (!F_.contains(X)) return std::nullopt;
    const double keep =
        ctx_->orientation() == Orientation::SolveForY ? x : y;
    return ctx_->psi(X, keep) - F_.value(X);
  } catch (const Error&) {
    return std::nullopt;
  }
}

GridField EntropyField::entropy_grid(int nx, int ny) const {
  return evaluate_grid(ctx_->domain(), nx, ny,
                       [this](double x, double y) {
                         return try_entropy_at(x, y);
                       });
}

std::vector<LevelCurves> EntropyField::level_curves(
    const std::vector<double>& levels, int nx, int ny) const {
  if (nx < 16 || ny < 16) throw DomainError("contour grid must be >= 16x16");
  const GridField grid = entropy_grid(nx, ny);
  std::vector<LevelCurves> out;
  out.reserve(levels.size());
  for (double level : levels) {
    if (!std::isfinite(level)) throw DomainError("levels must be finite");
    out.push_back({level, extract_level(grid, level)});
  }
  return out;
}

EntropyField reconstruct_calibrated(
    std::shared_ptr<const TransformContext> ctx, const CurveSpec& adiabat,
    int samples) {
  const std::vector<Point> pts = sample_curve(adiabat, *ctx, samples);
  GraphFunction F = build_graph(pts, *ctx);
  return EntropyField(std::move(ctx), std::move(F));
}

}  // namespace adiabat
