#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "adiabat/oracles.hpp"
#include "adiabat/uncalibrated.hpp"
#include "test_util.hpp"

using namespace adiabat;

namespace {

RecalibrationResult make_section4_result(int samples = 129) {
  const oracles::Fixture fx = oracles::squared_calibration_fixture();
  auto ctx = fx.make_context();
  return reconstruct_uncalibrated(ctx, fx.adiabats[0], fx.adiabats[1],
                                  samples);
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const size_t n = a.size();
  double ma = 0, mb = 0;
  for (size_t k = 0; k < n; ++k) {
    ma += a[k];
    mb += b[k];
  }
  ma /= n;
  mb /= n;
  double saa = 0, sbb = 0, sab = 0;
  for (size_t k = 0; k < n; ++k) {
    saa += (a[k] - ma) * (a[k] - ma);
    sbb += (b[k] - mb) * (b[k] - mb);
    sab += (a[k] - ma) * (b[k] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

TEST_CASE("normalized entropy is 0 on the first adiabat and 1 on the second") {
  const oracles::Fixture fx = oracles::ideal_gas_two_adiabats_fixture();
  auto ctx = fx.make_context();
  const RecalibrationResult res =
      reconstruct_uncalibrated(ctx, fx.adiabats[0], fx.adiabats[1], 129);

  for (const Point& p : sample_curve(fx.adiabats[0], *ctx, 41)) {
    if (auto v = res.try_normalized_entropy_at(p.x, p.y))
      CHECK(std::abs(*v) <= 1e-6);
  }
  for (const Point& p : sample_curve(fx.adiabats[1], *ctx, 41)) {
    if (auto v = res.try_normalized_entropy_at(p.x, p.y))
      CHECK(std::abs(*v - 1.0) <= 1e-6);
  }
  // and crucially, some points of each curve lie in the overlap
  int hits = 0;
  for (const Point& p : sample_curve(fx.adiabats[0], *ctx, 41))
    if (res.try_normalized_entropy_at(p.x, p.y)) ++hits;
  CHECK(hits >= 5);
}

TEST_CASE("normalized-entropy level curves follow x y^gamma = const") {
  const oracles::Fixture fx = oracles::ideal_gas_two_adiabats_fixture();
  auto ctx = fx.make_context();
  const RecalibrationResult res =
      reconstruct_uncalibrated(ctx, fx.adiabats[0], fx.adiabats[1], 129);
  const auto levels = res.level_curves({0.25, 0.75}, 48, 48);
  for (const auto& lc : levels) {
    REQUIRE(!lc.polylines.empty());
    // each polyline keeps x y^gamma constant within grid resolution
    for (const auto& line : lc.polylines) {
      REQUIRE(line.size() >= 2);
      const double ref =
          line.front().x * std::pow(line.front().y, 5.0 / 3.0);
      for (const Point& p : line) {
        const double v = p.x * std::pow(p.y, 5.0 / 3.0);
        CHECK(std::abs(v - ref) <= 0.05 * ref);
      }
    }
  }
}

TEST_CASE("section-4 fixture: f1 - f0 is a power law with exponent -1/2") {
  const RecalibrationResult res = make_section4_result();
  const double p = fit_power_law_exponent(res.f0(), res.f1());
  CHECK(std::abs(p - (-0.5)) <= 1e-3);
  // the difference keeps one sign and phi is strictly monotone
  const GraphFunction& phi = res.phi();
  for (size_t k = 0; k + 1 < phi.size(); ++k)
    CHECK(phi.values()[k] < phi.values()[k + 1]);
  CHECK(phi.value(res.overlap_min()) == 0.0);  // anchored at the left end
}

TEST_CASE("section-4 fixture: recalibrated temperature is affine in x y") {
  const RecalibrationResult res = make_section4_result();
  std::vector<double> t_star, xy;
  for (int j = 0; j < 20; ++j)
    for (int i = 0; i < 20; ++i) {
      const double x = 0.4 + 3.6 * i / 19.0;
      const double y = 0.42 + 2.78 * j / 19.0;
      if (auto v = res.try_recalibrated_temperature_at(x, y)) {
        t_star.push_back(*v);
        xy.push_back(x * y);
      }
    }
  REQUIRE(t_star.size() >= 30);
  CHECK(pearson(t_star, xy) >= 1.0 - 1e-6);
}

TEST_CASE("correctly calibrated gas: recalibrated temperature affine in x y") {
  const oracles::Fixture fx = oracles::ideal_gas_two_adiabats_fixture();
  auto ctx = fx.make_context();
  const RecalibrationResult res =
      reconstruct_uncalibrated(ctx, fx.adiabats[0], fx.adiabats[1], 129);
  // f1 - f0 is constant in X here, so phi is affine in X = x y; the overlap
  // band is thin, so sample densely and keep the hits
  std::vector<double> t_star, xy;
  for (const Point& p :
       testutil::random_points(ctx->domain(), 3000, 515)) {
    if (auto v = res.try_recalibrated_temperature_at(p.x, p.y)) {
      t_star.push_back(*v);
      xy.push_back(p.x * p.y);
    }
  }
  REQUIRE(t_star.size() >= 30);
  CHECK(pearson(t_star, xy) >= 1.0 - 1e-6);
  // anchor convention: T* -> 0 at the left end of the overlap
  CHECK(res.phi().value(res.overlap_min()) == 0.0);
}

TEST_CASE("errors: crossing adiabats and empty overlap") {
  const oracles::Fixture fx = oracles::ideal_gas_two_adiabats_fixture();
  auto ctx = fx.make_context();
  // the horizontal line y = 1 crosses a0 inside the domain
  const CurveSpec crossing =
      CurveSpec::explicit_graph(Expression::parse("1"));
  CHECK_THROWS_AS(
      reconstruct_uncalibrated(ctx, fx.adiabats[0], crossing, 65), GraphError);
  // the same adiabat twice has zero difference everywhere
  CHECK_THROWS_AS(
      reconstruct_uncalibrated(ctx, fx.adiabats[0], fx.adiabats[0], 65),
      GraphError);

  // both adiabats fit this narrower domain, but their transformed X ranges
  // are disjoint (the x-span is too short for the e-separated pair)
  TransformSettings s;
  s.anchor = 1.0;
  auto narrow = std::make_shared<TransformContext>(
      Expression::parse("x*y"), DomainRect{0.5, 2.0, 0.5, 2.8}, s);
  CHECK_THROWS_AS(
      reconstruct_uncalibrated(narrow, fx.adiabats[0], fx.adiabats[1], 65),
      GraphError);
  try {
    reconstruct_uncalibrated(narrow, fx.adiabats[0], fx.adiabats[1], 65);
  } catch (const GraphError& e) {
    CHECK(std::string(e.what()).find("overlap") != std::string::npos);
  }
}

TEST_CASE("agreement of the two modes on the calibrated ideal gas") {
  const oracles::Fixture fx = oracles::ideal_gas_two_adiabats_fixture();
  auto ctx = fx.make_context();
  const RecalibrationResult res =
      reconstruct_uncalibrated(ctx, fx.adiabats[0], fx.adiabats[1], 129);
  const EntropyField field =
      reconstruct_calibrated(ctx, fx.adiabats[0], 129);

  const int nx = 60, ny = 60;
  const GridField norm_grid =
      evaluate_grid(ctx->domain(), nx, ny, [&](double x, double y) {
        return res.try_normalized_entropy_at(x, y);
      });
  const GridField cal_grid = field.entropy_grid(nx, ny);
  const double cell = std::hypot(ctx->domain().width() / (nx - 1),
                                 ctx->domain().height() / (ny - 1));

  // draw the probe points inside the (thin) overlap band by picking an
  // isotherm in the overlap and a normalized level, then inverting
  std::mt19937 rng(777);
  std::uniform_real_distribution<double> u01(0.1, 0.9);
  const double pad = 0.05 * (res.overlap_max() - res.overlap_min());
  std::uniform_real_distribution<double> uX(res.overlap_min() + pad,
                                            res.overlap_max() - pad);
  int compared = 0;
  for (int attempt = 0; attempt < 200 && compared < 20; ++attempt) {
    const double X = uX(rng);
    const double level = u01(rng);
    const double Yt =
        res.f0().value(X) + level * (res.f1().value(X) - res.f0().value(X));
    std::pair<double, double> st;
    try {
      st = ctx->invert_tilde({X, Yt});
    } catch (const Error&) {
      continue;
    }
    const Point p{st.first, st.second};
    if (!ctx->domain().contains(p.x, p.y)) continue;
    const auto nv = res.try_normalized_entropy_at(p.x, p.y);
    const auto cv = field.try_entropy_at(p.x, p.y);
    if (!nv || !cv) continue;
    const auto a = extract_level(norm_grid, *nv);
    const auto b = extract_level(cal_grid, *cv);
    if (a.empty() || b.empty()) continue;
    // the normalized-entropy curves are clipped to the overlap band, so
    // measure the one-sided distance from their vertices to the calibrated
    // family
    double worst = 0.0;
    for (const auto& line : a)
      for (const Point& q : line)
        worst = std::max(worst, distance_to_polylines(q, b));
    CHECK(worst <= 2.0 * cell);
    ++compared;
  }
  CHECK(compared >= 20);
}

TEST_CASE("monotone relabeling along straightened isotherm columns") {
  const oracles::Fixture fx = oracles::ideal_gas_two_adiabats_fixture();
  auto ctx = fx.make_context();
  const RecalibrationResult res =
      reconstruct_uncalibrated(ctx, fx.adiabats[0], fx.adiabats[1], 129);
  const double X = 0.5 * (res.overlap_min() + res.overlap_max());
  double prev = std::numeric_limits<double>::quiet_NaN();
  int seen = 0;
  for (int k = 0; k < 12; ++k) {
    const double Yt = -1.2 + 0.2 * k;
    std::pair<double, double> st;
    try {
      st = ctx->invert_tilde({X, Yt});
    } catch (const Error&) {
      continue;
    }
    if (!ctx->domain().contains(st.first, st.second)) continue;
    const auto v = res.try_normalized_entropy_at(st.first, st.second);
    if (!v) continue;
    if (!std::isnan(prev)) CHECK(*v > prev);
    prev = *v;
    ++seen;
  }
  CHECK(seen >= 4);
}

TEST_CASE("out-of-overlap evaluation is refused") {
  const RecalibrationResult res = make_section4_result();
  // (0.5, 0.5): X = 0.0625, far below the overlap
  CHECK_THROWS_AS(res.normalized_entropy_at(0.5, 0.5), RangeError);
  CHECK_THROWS_AS(res.recalibrated_temperature_at(0.5, 0.5), RangeError);
  CHECK(!res.try_normalized_entropy_at(0.5, 0.5));
  CHECK(!res.try_recalibrated_temperature_at(0.5, 0.5));
}
