#include "adiabat/contour.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <thread>

#include "adiabat/errors.hpp"

namespace adiabat {

GridField evaluate_grid(
    const DomainRect& domain, int nx, int ny,
    const std::function<std::optional<double>(double, double)>& fn) {
  if (nx < 2 || ny < 2) throw DomainError("grid must be at least 2x2");
  GridField g;
  g.domain = domain;
  g.nx = nx;
  g.ny = ny;
  g.values.assign(static_cast<size_t>(nx) * ny,
                  std::numeric_limits<double>::quiet_NaN());

  auto run_rows = [&](int j_begin, int j_end, std::exception_ptr& err) {
    try {
      for (int j = j_begin; j < j_end; ++j) {
        const double y = g.y_at(j);
        for (int i = 0; i < nx; ++i) {
          const double x = g.x_at(i);
          if (auto v = fn(x, y))
            g.values[static_cast<size_t>(j) * nx + i] = *v;
        }
      }
    } catch (...) {
      err = std::current_exception();
    }
  };

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const int workers = static_cast<int>(std::min<unsigned>(hw, 8));
  if (workers <= 1 || ny < 2 * workers) {
    std::exception_ptr err;
    run_rows(0, ny, err);
    if (err) std::rethrow_exception(err);
    return g;
  }

  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(workers);
  const int chunk = (ny + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const int j0 = w * chunk;
    const int j1 = std::min(ny, j0 + chunk);
    if (j0 >= j1) break;
    threads.emplace_back(run_rows, j0, j1, std::ref(errors[w]));
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return g;
}

namespace {

// Edge identifiers: horizontal edge from (i,j) to (i+1,j), then vertical edge
// from (i,j) to (i,j+1). Shared cell borders map to the same id, so chained
// segments share bit-identical endpoints.
struct EdgeIds {
  int nx, ny;
  long horizontal(int i, int j) const {
    return static_cast<long>(j) * (nx - 1) + i;
  }
  long vertical(int i, int j) const {
    return static_cast<long>(nx - 1) * ny + static_cast<long>(j) * nx + i;
  }
};

struct Segment {
  long e0, e1;
};

}  // namespace

std::vector<Polyline> extract_level(const GridField& g, double level) {
  const int nx = g.nx;
  const int ny = g.ny;
  EdgeIds ids{nx, ny};

  std::map<long, Point> edge_points;
  std::vector<Segment> segments;

  auto edge_point = [&](long id, double xa, double ya, double va, double xb,
                        double yb, double vb) {
    auto it = edge_points.find(id);
    if (it != edge_points.end()) return;
    const double t = (level - va) / (vb - va);
    edge_points.emplace(id, Point{xa + t * (xb - xa), ya + t * (yb - ya)});
  };

  for (int j = 0; j + 1 < ny; ++j) {
    for (int i = 0; i + 1 < nx; ++i) {
      const double v00 = g.at(i, j);
      const double v10 = g.at(i + 1, j);
      const double v11 = g.at(i + 1, j + 1);
      const double v01 = g.at(i, j + 1);
      if (std::isnan(v00) || std::isnan(v10) || std::isnan(v11) ||
          std::isnan(v01))
        continue;

      const int b00 = v00 >= level ? 1 : 0;
      const int b10 = v10 >= level ? 1 : 0;
      const int b11 = v11 >= level ? 1 : 0;
      const int b01 = v01 >= level ? 1 : 0;
      const int code = b00 | (b10 << 1) | (b11 << 2) | (b01 << 3);
      if (code == 0 || code == 15) continue;

      const double x0 = g.x_at(i), x1 = g.x_at(i + 1);
      const double y0 = g.y_at(j), y1 = g.y_at(j + 1);

      const long eb = ids.horizontal(i, j);      // bottom, c00-c10
      const long er = ids.vertical(i + 1, j);    // right,  c10-c11
      const long et = ids.horizontal(i, j + 1);  // top,    c01-c11
      const long el = ids.vertical(i, j);        // left,   c00-c01

      auto pb = [&] { edge_point(eb, x0, y0, v00, x1, y0, v10); };
      auto pr = [&] { edge_point(er, x1, y0, v10, x1, y1, v11); };
      auto pt = [&] { edge_point(et, x0, y1, v01, x1, y1, v11); };
      auto pl = [&] { edge_point(el, x0, y0, v00, x0, y1, v01); };

      auto emit = [&](long a, long b) { segments.push_back({a, b}); };

      switch (code) {
        case 1:  case 14: pl(); pb(); emit(el, eb); break;
        case 2:  case 13: pb(); pr(); emit(eb, er); break;
        case 3:  case 12: pl(); pr(); emit(el, er); break;
        case 4:  case 11: pr(); pt(); emit(er, et); break;
        case 6:  case 9:  pb(); pt(); emit(eb, et); break;
        case 7:  case 8:  pl(); pt(); emit(el, et); break;
        case 5: {
          // saddle: corners c00 and c11 are above; split by the cell mean
          pl(); pb(); pr(); pt();
          const double center = 0.25 * (v00 + v10 + v11 + v01);
          if (center >= level) {
            emit(el, et);
            emit(eb, er);
          } else {
            emit(el, eb);
            emit(er, et);
          }
          break;
        }
        case 10: {
          pl(); pb(); pr(); pt();
          const double center = 0.25 * (v00 + v10 + v11 + v01);
          if (center >= level) {
            emit(el, eb);
            emit(er, et);
          } else {
            emit(el, et);
            emit(eb, er);
          }
          break;
        }
        default: break;
      }
    }
  }

  // chain segments into polylines through shared edge ids
  std::map<long, std::vector<size_t>> incident;
  for (size_t s = 0; s < segments.size(); ++s) {
    incident[segments[s].e0].push_back(s);
    incident[segments[s].e1].push_back(s);
  }

  std::vector<bool> used(segments.size(), false);
  std::vector<Polyline> out;

  auto walk = [&](long start_edge, size_t start_seg) {
    Polyline line;
    line.push_back(edge_points.at(start_edge));
    long edge = start_edge;
    size_t seg = start_seg;
    for (;;) {
      used[seg] = true;
      const long next = segments[seg].e0 == edge ? segments[seg].e1
                                                 : segments[seg].e0;
      line.push_back(edge_points.at(next));
      edge = next;
      size_t cont = segments.size();
      for (size_t cand : incident.at(edge))
        if (!used[cand]) {
          cont = cand;
          break;
        }
      if (cont == segments.size()) break;
      seg = cont;
    }
    out.push_back(std::move(line));
  };

  // open chains first, seeded at edges of degree one (ascending id)
  for (const auto& [edge, segs] : incident) {
    if (segs.size() != 1) continue;
    const size_t s = segs.front();
    if (!used[s]) walk(edge, s);
  }
  // remaining cycles
  for (size_t s = 0; s < segments.size(); ++s)
    if (!used[s]) walk(std::min(segments[s].e0, segments[s].e1), s);

  return out;
}

double point_segment_distance(Point p, Point a, Point b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = 0.0;
  if (len2 > 0.0)
    t = std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len2, 0.0, 1.0);
  const double px = a.x + t * dx - p.x;
  const double py = a.y + t * dy - p.y;
  return std::hypot(px, py);
}

double distance_to_polylines(Point p, const std::vector<Polyline>& lines) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& line : lines) {
    if (line.size() == 1)
      best = std::min(best, std::hypot(p.x - line[0].x, p.y - line[0].y));
    for (size_t k = 0; k + 1 < line.size(); ++k)
      best = std::min(best, point_segment_distance(p, line[k], line[k + 1]));
  }
  return best;
}

double hausdorff_distance(const std::vector<Polyline>& a,
                          const std::vector<Polyline>& b) {
  double worst = 0.0;
  for (const auto& line : a)
    for (const auto& p : line)
      worst = std::max(worst, distance_to_polylines(p, b));
  for (const auto& line : b)
    for (const auto& p : line)
      worst = std::max(worst, distance_to_polylines(p, a));
  return worst;
}

}  // namespace adiabat
