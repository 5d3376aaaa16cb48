#include "adiabat/svg.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <string>

#include "adiabat/errors.hpp"

namespace adiabat {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 540.0;
constexpr double kMarginLeft = 64.0;
constexpr double kMarginRight = 16.0;
constexpr double kMarginTop = 16.0;
constexpr double kMarginBottom = 48.0;

constexpr std::array<const char*, 7> kPalette = {
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd",
    "#ff7f0e", "#8c564b", "#17becf"};

std::string fixed2(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v,
                           std::chars_format::fixed, 2);
  return std::string(buf, res.ptr);
}

std::string shortest(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string render_adiabats_svg(const nlohmann::json& doc) {
  if (!doc.contains("domain") || !doc.contains("levels"))
    throw ConfigError("adiabats document needs 'domain' and 'levels'");
  const auto& d = doc["domain"];
  const double x_min = d.at("x_min").get<double>();
  const double x_max = d.at("x_max").get<double>();
  const double y_min = d.at("y_min").get<double>();
  const double y_max = d.at("y_max").get<double>();
  if (!(x_min < x_max) || !(y_min < y_max))
    throw ConfigError("adiabats document has a degenerate domain");

  const double plot_w = kWidth - kMarginLeft - kMarginRight;
  const double plot_h = kHeight - kMarginTop - kMarginBottom;
  auto px = [&](double x) {
    return kMarginLeft + (x - x_min) / (x_max - x_min) * plot_w;
  };
  auto py = [&](double y) {
    return kHeight - kMarginBottom - (y - y_min) / (y_max - y_min) * plot_h;
  };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         shortest(kWidth) + "\" height=\"" + shortest(kHeight) +
         "\" viewBox=\"0 0 " + shortest(kWidth) + " " + shortest(kHeight) +
         "\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"" + shortest(kWidth) + "\" height=\"" +
         shortest(kHeight) + "\" fill=\"white\"/>\n";

  // frame
  svg += "<rect x=\"" + fixed2(kMarginLeft) + "\" y=\"" + fixed2(kMarginTop) +
         "\" width=\"" + fixed2(plot_w) + "\" height=\"" + fixed2(plot_h) +
         "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";

  // ticks
  constexpr int kTicks = 6;
  for (int k = 0; k < kTicks; ++k) {
    const double fx = x_min + (x_max - x_min) * k / (kTicks - 1);
    const double gx = px(fx);
    svg += "<line x1=\"" + fixed2(gx) + "\" y1=\"" +
           fixed2(kHeight - kMarginBottom) + "\" x2=\"" + fixed2(gx) +
           "\" y2=\"" + fixed2(kHeight - kMarginBottom + 5.0) +
           "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    svg += "<text x=\"" + fixed2(gx) + "\" y=\"" +
           fixed2(kHeight - kMarginBottom + 18.0) +
           "\" font-family=\"monospace\" font-size=\"11\" "
           "text-anchor=\"middle\">" +
           shortest(fx) + "</text>\n";

    const double fy = y_min + (y_max - y_min) * k / (kTicks - 1);
    const double gy = py(fy);
    svg += "<line x1=\"" + fixed2(kMarginLeft - 5.0) + "\" y1=\"" + fixed2(gy) +
           "\" x2=\"" + fixed2(kMarginLeft) + "\" y2=\"" + fixed2(gy) +
           "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    svg += "<text x=\"" + fixed2(kMarginLeft - 8.0) + "\" y=\"" +
           fixed2(gy + 4.0) +
           "\" font-family=\"monospace\" font-size=\"11\" "
           "text-anchor=\"end\">" +
           shortest(fy) + "</text>\n";
  }

  // axis labels
  svg += "<text x=\"" + fixed2(kMarginLeft + plot_w / 2.0) + "\" y=\"" +
         fixed2(kHeight - 12.0) +
         "\" font-family=\"monospace\" font-size=\"13\" "
         "text-anchor=\"middle\">x</text>\n";
  svg += "<text x=\"" + fixed2(16.0) + "\" y=\"" +
         fixed2(kMarginTop + plot_h / 2.0) +
         "\" font-family=\"monospace\" font-size=\"13\" "
         "text-anchor=\"middle\">y</text>\n";

  // one path element per nonempty level
  std::size_t color_index = 0;
  for (const auto& level_entry : doc["levels"]) {
    const double level = level_entry.at("level").get<double>();
    const auto& polylines = level_entry.at("polylines");
    if (!polylines.is_array() || polylines.empty()) {
      ++color_index;
      continue;
    }
    bool has_points = false;
    std::string path;
    for (const auto& line : polylines) {
      bool first = true;
      for (const auto& pt : line) {
        const double gx = px(pt[0].get<double>());
        const double gy = py(pt[1].get<double>());
        path += first ? "M " : "L ";
        path += fixed2(gx) + " " + fixed2(gy) + " ";
        first = false;
        has_points = true;
      }
    }
    if (!has_points) {
      ++color_index;
      continue;
    }
    const char* color = kPalette[color_index % kPalette.size()];
    svg += "<path d=\"" + path + "\" fill=\"none\" stroke=\"" + color +
           "\" stroke-width=\"1.5\"/>\n";

    const auto& first_line = polylines[0];
    if (first_line.is_array() && !first_line.empty()) {
      const double gx = px(first_line[0][0].get<double>());
      const double gy = py(first_line[0][1].get<double>());
      svg += "<text x=\"" + fixed2(gx + 4.0) + "\" y=\"" + fixed2(gy - 4.0) +
             "\" font-family=\"monospace\" font-size=\"11\" fill=\"" + color +
             "\">S=" + shortest(level) + "</text>\n";
    }
    ++color_index;
  }

  svg += "</svg>\n";
  return svg;
}

}  // namespace adiabat
