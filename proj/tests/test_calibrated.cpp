#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "adiabat/calibrated.hpp"
#include "adiabat/oracles.hpp"
#include "test_util.hpp"

using namespace adiabat;

namespace {

std::shared_ptr<TransformContext> ideal_ctx() {
  return oracles::ideal_gas_fixture().make_context();
}

double stddev(const std::vector<double>& v) {
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return std::sqrt(acc / v.size());
}

}  // namespace

TEST_CASE("sample_curve: explicit graphs are evaluated exactly") {
  auto ctx = ideal_ctx();
  const CurveSpec spec =
      CurveSpec::explicit_graph(Expression::parse("x^(-0.6)"), 0.5, 2.0);
  const auto pts = sample_curve(spec, *ctx, 5);
  REQUIRE(pts.size() == 5);
  for (const Point& p : pts) CHECK(p.y == std::pow(p.x, -0.6));
  CHECK(pts.front().x == 0.5);
  CHECK(pts.back().x == 2.0);
}

TEST_CASE("sample_curve: implicit curves satisfy the residual") {
  auto ctx = ideal_ctx();
  const Expression g = Expression::parse("x*y^(5/3) - 1");
  const auto pts = sample_curve(CurveSpec::implicit(g), *ctx, 33);
  REQUIRE(pts.size() == 33);
  for (const Point& p : pts) {
    CHECK(std::abs(g.eval(p.x, p.y)) <= 1e-10);
    CHECK(ctx->domain().contains(p.x, p.y));
  }
}

TEST_CASE("sample_curve: error cases") {
  auto ctx = ideal_ctx();
  // x*y = -1 has no solution in the positive quadrant
  CHECK_THROWS_AS(
      sample_curve(CurveSpec::implicit(Expression::parse("x*y + 1")), *ctx, 9),
      CurveError);
  // two branches (y = x and y = 1/x) cross every x-station
  CHECK_THROWS_AS(
      sample_curve(CurveSpec::implicit(Expression::parse("(y - x)*(y - 1/x)")),
                   *ctx, 9),
      CurveError);
  // explicit curve that leaves the y-range
  TransformSettings s;
  s.anchor = 1.0;
  auto narrow = std::make_shared<TransformContext>(
      Expression::parse("x*y"), DomainRect{0.5, 2.0, 0.7, 1.2}, s);
  CHECK_THROWS_AS(
      sample_curve(CurveSpec::explicit_graph(Expression::parse("x^(-0.6)")),
                   *narrow, 9),
      CurveError);
  CHECK_THROWS_AS(
      sample_curve(CurveSpec::explicit_graph(Expression::parse("x")), *ctx, 3),
      CurveError);  // too few samples
}

TEST_CASE("sample_curve: point lists validate and sort") {
  auto ctx = ideal_ctx();
  const std::vector<Point> unsorted = {
      {1.5, 1.0}, {0.6, 1.2}, {1.0, 1.1}, {1.9, 0.9}};
  const auto pts = sample_curve(CurveSpec::points(unsorted), *ctx, 4);
  REQUIRE(pts.size() == 4);
  CHECK(std::is_sorted(pts.begin(), pts.end(),
                       [](auto a, auto b) { return a.x < b.x; }));
  CHECK_THROWS_AS(
      sample_curve(CurveSpec::points({{0.6, 1.0}, {0.7, 1.0}, {0.8, 1.0}}),
                   *ctx, 4),
      CurveError);  // fewer than 4 points
  CHECK_THROWS_AS(
      sample_curve(
          CurveSpec::points({{0.6, 1.0}, {0.6, 1.2}, {0.8, 1.0}, {0.9, 1.0}}),
          *ctx, 4),
      CurveError);  // duplicate x
  CHECK_THROWS_AS(
      sample_curve(
          CurveSpec::points({{0.6, 1.0}, {0.7, 5.0}, {0.8, 1.0}, {0.9, 1.0}}),
          *ctx, 4),
      CurveError);  // outside the domain
}

TEST_CASE("build_graph: ideal-gas adiabat maps onto -gamma/(gamma-1) ln X") {
  auto ctx = ideal_ctx();
  const double gamma = 5.0 / 3.0;
  const double coef = -gamma / (gamma - 1.0);  // -2.5
  const CurveSpec adiabat =
      CurveSpec::explicit_graph(Expression::parse("x^(-3/5)"));
  const auto pts = sample_curve(adiabat, *ctx, 129);
  // pointwise: the transformed samples land on the closed-form graph
  for (const Point& p : pts) {
    const TildePoint t = ctx->forward_tilde(p.x, p.y);
    CHECK(t.Yt == doctest::Approx(coef * std::log(t.Xt)).epsilon(1e-9));
  }
  // and the fitted interpolant reproduces it between breakpoints
  const GraphFunction F = build_graph(pts, *ctx);
  for (int k = 0; k < 50; ++k) {
    const double X = F.x_min() + (F.x_max() - F.x_min()) * (k + 0.5) / 50.0;
    CHECK(std::abs(F.value(X) - coef * std::log(X)) <= 1e-6);
  }
}

TEST_CASE("build_graph: error cases") {
  TransformSettings s;
  s.anchor = 1.0;
  auto ctx = std::make_shared<TransformContext>(
      Expression::parse("x*y"), DomainRect{0.25, 8.0, 0.25, 8.0}, s);
  // (1,2) and (2,1) share X = 2 with different Y: not a graph over X
  const std::vector<Point> non_graph = {
      {0.6, 2.0}, {1.0, 2.0}, {2.0, 1.0}, {3.0, 1.5}};
  CHECK_THROWS_AS(build_graph(non_graph, *ctx), GraphError);
  // too few samples
  const std::vector<Point> three = {{0.6, 2.0}, {1.0, 2.0}, {2.0, 1.3}};
  CHECK_THROWS_AS(build_graph(three, *ctx), GraphError);
}

TEST_CASE("GraphFunction: interpolation and refusal outside the range") {
  const std::vector<double> xs = {0.0, 1.0, 2.0, 3.0, 4.0};
  const std::vector<double> ys = {0.0, 1.0, 0.5, 2.0, 1.5};
  const GraphFunction g = GraphFunction::fit(xs, ys);
  for (size_t k = 0; k < xs.size(); ++k)
    CHECK(g.value(xs[k]) == ys[k]);  // exact at breakpoints
  // no overshoot: stays within the local data envelope
  for (size_t k = 0; k + 1 < xs.size(); ++k) {
    const double lo = std::min(ys[k], ys[k + 1]);
    const double hi = std::max(ys[k], ys[k + 1]);
    for (int m = 1; m < 20; ++m) {
      const double v = g.value(xs[k] + 0.05 * m);
      CHECK(v >= lo - 1e-12);
      CHECK(v <= hi + 1e-12);
    }
  }
  CHECK_THROWS_AS(g.value(-0.1), RangeError);
  CHECK_THROWS_AS(g.value(4.1), RangeError);
  CHECK_THROWS_AS(GraphFunction::fit({0.0, 0.0, 1.0}, {0.0, 1.0, 2.0}),
                  GraphError);
}

TEST_CASE("entropy_at: gauge, closed form, and extrapolation refusal") {
  auto ctx = ideal_ctx();
  const CurveSpec adiabat =
      CurveSpec::explicit_graph(Expression::parse("x^(-3/5)"));
  const EntropyField field = reconstruct_calibrated(ctx, adiabat, 129);

  // gauge: S = 0 on fresh samples of the input adiabat
  const auto samples = sample_curve(adiabat, *ctx, 57);
  for (const Point& p : samples)
    CHECK(std::abs(field.entropy_at(p.x, p.y)) <= 1e-7);

  // the reconstruction equals 1.5 ln(x y^(5/3)) up to an additive constant
  std::vector<double> diffs;
  for (int j = 0; j < 30; ++j)
    for (int i = 0; i < 30; ++i) {
      const double x = 0.5 + 1.5 * i / 29.0;
      const double y = 0.5 + 1.5 * j / 29.0;
      if (auto s = field.try_entropy_at(x, y))
        diffs.push_back(*s - oracles::ideal_gas_entropy(5.0 / 3.0, x, y));
    }
  CHECK(diffs.size() > 100);
  CHECK(stddev(diffs) <= 1e-6);

  // extrapolation beyond the adiabat's temperature band is refused
  CHECK_THROWS_AS(field.entropy_at(2.0, 2.0), RangeError);
  CHECK(!field.try_entropy_at(2.0, 2.0));
  const auto band = field.valid_band();
  CHECK(band.first > 0.7);
  CHECK(band.second < 1.4);
}

TEST_CASE("translate structure: S is affine in Yt with slope exactly one") {
  auto ctx = ideal_ctx();
  const EntropyField field = reconstruct_calibrated(
      ctx, CurveSpec::explicit_graph(Expression::parse("x^(-3/5)")), 129);
  const double X = 1.0;  // inside the valid band
  double base = std::numeric_limits<double>::quiet_NaN();
  int checked = 0;
  for (int k = 0; k < 7; ++k) {
    const double Yt = -0.5 + k / 7.0;
    const auto [x, y] = ctx->invert_tilde({X, Yt});
    if (!ctx->domain().contains(x, y)) continue;
    const double s = field.entropy_at(x, y);
    if (std::isnan(base)) base = s - Yt;
    CHECK(s - Yt == doctest::Approx(base).epsilon(1e-9));
    ++checked;
  }
  CHECK(checked >= 3);
}

TEST_CASE("Maxwell check: det d(T,S)/d(x,y) = 1") {
  auto ctx = ideal_ctx();
  const EntropyField field = reconstruct_calibrated(
      ctx, CurveSpec::explicit_graph(Expression::parse("x^(-3/5)")), 129);
  const double h = 1e-4 * 2.0;
  int checked = 0;
  for (const Point& p :
       testutil::random_points(ctx->domain(), 120, 2222, 0.01)) {
    const auto sxp = field.try_entropy_at(p.x + h, p.y);
    const auto sxm = field.try_entropy_at(p.x - h, p.y);
    const auto syp = field.try_entropy_at(p.x, p.y + h);
    const auto sym = field.try_entropy_at(p.x, p.y - h);
    if (!sxp || !sxm || !syp || !sym) continue;
    const double Sx = (*sxp - *sxm) / (2.0 * h);
    const double Sy = (*syp - *sym) / (2.0 * h);
    const double Tx =
        (ctx->f().eval(p.x + h, p.y) - ctx->f().eval(p.x - h, p.y)) / (2 * h);
    const double Ty =
        (ctx->f().eval(p.x, p.y + h) - ctx->f().eval(p.x, p.y - h)) / (2 * h);
    CHECK(std::abs(Tx * Sy - Ty * Sx - 1.0) <= 1e-4);
    if (++checked >= 25) break;
  }
  CHECK(checked >= 25);
}

TEST_CASE("level_curves: the zero level reproduces the input adiabat") {
  auto ctx = ideal_ctx();
  const CurveSpec adiabat =
      CurveSpec::explicit_graph(Expression::parse("x^(-3/5)"));
  const EntropyField field = reconstruct_calibrated(ctx, adiabat, 129);

  const int nx = 48, ny = 48;
  const auto levels = field.level_curves({0.0, 1e9}, nx, ny);
  REQUIRE(levels.size() == 2);

  // a level far above the attained range is empty, not an error
  CHECK(levels[1].polylines.empty());

  REQUIRE(!levels[0].polylines.empty());
  const double cell = std::hypot(ctx->domain().width() / (nx - 1),
                                 ctx->domain().height() / (ny - 1));
  const Polyline truth = [&] {
    Polyline line;
    for (const Point& p : sample_curve(adiabat, *ctx, 200)) line.push_back(p);
    return line;
  }();
  // every traced vertex lies on the adiabat
  for (const auto& line : levels[0].polylines)
    for (const Point& v : line)
      CHECK(distance_to_polylines(v, {truth}) <= cell);
  // and the trace covers the adiabat except for a short stub at each end,
  // where cells straddle the valid-band boundary and are masked
  const double margin = 4.0 * ctx->domain().width() / (nx - 1);
  for (const Point& p : sample_curve(adiabat, *ctx, 40)) {
    if (p.x < ctx->domain().x_min + margin ||
        p.x > ctx->domain().x_max - margin)
      continue;
    CHECK(distance_to_polylines(p, levels[0].polylines) <= cell);
  }
}

TEST_CASE("level_curves: levels coincide with x y^gamma = const") {
  auto ctx = ideal_ctx();
  const EntropyField field = reconstruct_calibrated(
      ctx, CurveSpec::explicit_graph(Expression::parse("x^(-3/5)")), 129);
  const auto levels = field.level_curves({-0.4, 0.3}, 48, 48);
  for (const auto& lc : levels) {
    REQUIRE(!lc.polylines.empty());
    int vertices = 0;
    for (const auto& line : lc.polylines)
      for (const Point& p : line) {
        // closed form along the extracted polyline, within grid resolution
        const double s = oracles::ideal_gas_entropy(5.0 / 3.0, p.x, p.y);
        CHECK(std::abs(s - lc.level) <= 0.02);
        ++vertices;
      }
    CHECK(vertices > 10);
  }
}

TEST_CASE("level-set consistency: entropy is constant along traced levels") {
  auto ctx = ideal_ctx();
  const EntropyField field = reconstruct_calibrated(
      ctx, CurveSpec::explicit_graph(Expression::parse("x^(-3/5)")), 129);
  const GridField grid = field.entropy_grid(40, 40);
  double s_min = 1e300, s_max = -1e300;
  for (double v : grid.values)
    if (!std::isnan(v)) {
      s_min = std::min(s_min, v);
      s_max = std::max(s_max, v);
    }
  const double range = s_max - s_min;

  int traced = 0;
  for (const Point& p :
       testutil::random_points(ctx->domain(), 60, 3333, 0.05)) {
    const auto s0 = field.try_entropy_at(p.x, p.y);
    if (!s0) continue;
    if (*s0 < s_min + 0.05 * range || *s0 > s_max - 0.05 * range) continue;
    const auto curves = extract_level(grid, *s0);
    if (curves.empty()) continue;
    for (const auto& line : curves)
      for (size_t k = 0; k < line.size(); k += 4) {
        const auto sv = field.try_entropy_at(line[k].x, line[k].y);
        if (!sv) continue;
        CHECK(std::abs(*sv - *s0) <= 2e-3 * range);
      }
    if (++traced >= 5) break;
  }
  CHECK(traced >= 5);
}
