#pragma once

#include <random>
#include <vector>

#include "adiabat/geometry.hpp"

namespace testutil {

// deterministic interior points of a rectangle, margin as a fraction of the
// side length
inline std::vector<adiabat::Point> random_points(const adiabat::DomainRect& d,
                                                 int count, unsigned seed,
                                                 double margin_frac = 0.0) {
  std::mt19937 rng(seed);
  const double mx = margin_frac * d.width();
  const double my = margin_frac * d.height();
  std::uniform_real_distribution<double> ux(d.x_min + mx, d.x_max - mx);
  std::uniform_real_distribution<double> uy(d.y_min + my, d.y_max - my);
  std::vector<adiabat::Point> pts;
  pts.reserve(count);
  for (int i = 0; i < count; ++i) pts.push_back({ux(rng), uy(rng)});
  return pts;
}

}  // namespace testutil
