#include "adiabat/commands.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include "adiabat/calibrated.hpp"
#include "adiabat/contour.hpp"
#include "adiabat/errors.hpp"
#include "adiabat/svg.hpp"
#include "adiabat/uncalibrated.hpp"

namespace adiabat {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string shortest(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string sci(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.3e", v);
  return buf;
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << contents;
}

std::string grid_csv(const GridField& grid, const char* value_column) {
  std::string csv = std::string("x,y,") + value_column + "\n";
  for (int j = 0; j < grid.ny; ++j) {
    const double y = grid.y_at(j);
    for (int i = 0; i < grid.nx; ++i) {
      const double v = grid.at(i, j);
      csv += shortest(grid.x_at(i));
      csv += ',';
      csv += shortest(y);
      csv += ',';
      if (!std::isnan(v)) csv += shortest(v);
      csv += '\n';
    }
  }
  return csv;
}

ordered_json adiabats_doc(const DomainRect& dom,
                          const std::vector<LevelCurves>& levels) {
  ordered_json doc;
  doc["domain"] = {{"x_min", dom.x_min},
                   {"x_max", dom.x_max},
                   {"y_min", dom.y_min},
                   {"y_max", dom.y_max}};
  ordered_json out_levels = ordered_json::array();
  for (const LevelCurves& lc : levels) {
    ordered_json entry;
    entry["level"] = lc.level;
    ordered_json lines = ordered_json::array();
    for (const Polyline& line : lc.polylines) {
      ordered_json pts = ordered_json::array();
      for (const Point& p : line) pts.push_back({p.x, p.y});
      lines.push_back(std::move(pts));
    }
    entry["polylines"] = std::move(lines);
    out_levels.push_back(std::move(entry));
  }
  doc["levels"] = std::move(out_levels);
  return doc;
}

std::pair<int, int> grid_stats(const GridField& grid) {
  int evaluated = 0, masked = 0;
  for (double v : grid.values) (std::isnan(v) ? masked : evaluated)++;
  return {evaluated, masked};
}

std::vector<LevelCurves> levels_from_grid(const GridField& grid,
                                          const std::vector<double>& levels) {
  std::vector<LevelCurves> out;
  out.reserve(levels.size());
  for (double level : levels) out.push_back({level, extract_level(grid, level)});
  return out;
}

}  // namespace

void apply_overrides(ModelConfig& cfg, const CliOverrides& ov) {
  if (ov.tol) {
    if (!(*ov.tol > 0.0)) throw ConfigError("--tol must be positive");
    cfg.root_tol = *ov.tol;
    cfg.quad_tol = *ov.tol;
  }
  if (ov.grid) {
    cfg.grid_nx = ov.grid->first;
    cfg.grid_ny = ov.grid->second;
    if (cfg.grid_nx < 2 || cfg.grid_ny < 2)
      throw ConfigError("--grid must be at least 2x2");
  }
  if (ov.levels) cfg.levels = *ov.levels;
}

int cmd_reconstruct(const ModelConfig& cfg, const std::string& out_dir) {
  if (cfg.mode != "calibrated")
    throw ConfigError("reconstruct requires mode 'calibrated' (got '" +
                      cfg.mode + "'); use the recalibrate command instead");
  const FunctionRegistry registry = cfg.build_registry();
  auto ctx = cfg.build_context(registry);
  const CurveSpec adiabat = cfg.build_adiabat(0, registry);
  const EntropyField field =
      reconstruct_calibrated(ctx, adiabat, cfg.samples);

  const GridField grid = field.entropy_grid(cfg.grid_nx, cfg.grid_ny);
  const std::vector<LevelCurves> levels = levels_from_grid(grid, cfg.levels);

  fs::create_directories(out_dir);
  write_file(fs::path(out_dir) / "entropy_grid.csv", grid_csv(grid, "S"));

  const ordered_json doc = adiabats_doc(ctx->domain(), levels);
  write_file(fs::path(out_dir) / "adiabats.json", doc.dump(2) + "\n");

  const auto [evaluated, masked] = grid_stats(grid);
  ordered_json report;
  report["name"] = cfg.name;
  report["mode"] = cfg.mode;
  report["valid_band"] = {{"X_min", field.valid_band().first},
                          {"X_max", field.valid_band().second}};
  report["gauge"] = field.gauge_note();
  report["grid_cells"] = {{"evaluated", evaluated}, {"masked", masked}};
  report["effective_config"] = cfg.echo();
  write_file(fs::path(out_dir) / "report.json", report.dump(2) + "\n");

  std::cout << "reconstruct: wrote entropy_grid.csv, adiabats.json, "
               "report.json to "
            << out_dir << "\n"
            << "valid temperature band: [" << field.valid_band().first << ", "
            << field.valid_band().second << "]\n";
  return kExitOk;
}

int cmd_recalibrate(const ModelConfig& cfg, const std::string& out_dir) {
  if (cfg.mode != "uncalibrated")
    throw ConfigError("recalibrate requires mode 'uncalibrated' (got '" +
                      cfg.mode + "')");
  const FunctionRegistry registry = cfg.build_registry();
  auto ctx = cfg.build_context(registry);
  const CurveSpec a0 = cfg.build_adiabat(0, registry);
  const CurveSpec a1 = cfg.build_adiabat(1, registry);
  const RecalibrationResult res =
      reconstruct_uncalibrated(ctx, a0, a1, cfg.samples);

  const GridField norm_grid =
      evaluate_grid(ctx->domain(), cfg.grid_nx, cfg.grid_ny,
                    [&](double x, double y) {
                      return res.try_normalized_entropy_at(x, y);
                    });
  const std::vector<LevelCurves> levels =
      levels_from_grid(norm_grid, cfg.levels);
  const GridField temp_grid =
      evaluate_grid(ctx->domain(), cfg.grid_nx, cfg.grid_ny,
                    [&](double x, double y) {
                      return res.try_recalibrated_temperature_at(x, y);
                    });

  fs::create_directories(out_dir);
  write_file(fs::path(out_dir) / "entropy_grid.csv",
             grid_csv(norm_grid, "S"));
  write_file(fs::path(out_dir) / "temperature_grid.csv",
             grid_csv(temp_grid, "T"));

  std::string recal = "X,phi\n";
  const GraphFunction& phi = res.phi();
  for (std::size_t k = 0; k < phi.size(); ++k) {
    recal += shortest(phi.breakpoints()[k]);
    recal += ',';
    recal += shortest(phi.values()[k]);
    recal += '\n';
  }
  write_file(fs::path(out_dir) / "recalibration.csv", recal);

  const ordered_json doc = adiabats_doc(ctx->domain(), levels);
  write_file(fs::path(out_dir) / "adiabats.json", doc.dump(2) + "\n");

  bool phi_monotone = true;
  for (std::size_t k = 0; k + 1 < phi.size(); ++k)
    if (!(phi.values()[k] < phi.values()[k + 1])) phi_monotone = false;

  ordered_json report;
  report["name"] = cfg.name;
  report["mode"] = cfg.mode;
  report["overlap"] = {{"X_min", res.overlap_min()},
                       {"X_max", res.overlap_max()}};
  try {
    report["difference_exponent"] =
        fit_power_law_exponent(res.f0(), res.f1());
  } catch (const Error&) {
    report["difference_exponent"] = nullptr;
  }
  report["phi_monotone_increasing"] = phi_monotone;
  report["gauge"] =
      "normalized entropy is 0 on the first adiabat and 1 on the second; "
      "T* is anchored to 0 at the left overlap endpoint";
  const auto [evaluated, masked] = grid_stats(norm_grid);
  report["grid_cells"] = {{"evaluated", evaluated}, {"masked", masked}};
  report["effective_config"] = cfg.echo();
  write_file(fs::path(out_dir) / "report.json", report.dump(2) + "\n");

  std::cout << "recalibrate: wrote entropy_grid.csv, temperature_grid.csv, "
               "recalibration.csv, adiabats.json, report.json to "
            << out_dir << "\n"
            << "X overlap: [" << res.overlap_min() << ", "
            << res.overlap_max() << "]\n";
  return kExitOk;
}

int cmd_check(const ModelConfig& cfg) {
  std::cout << "check: " << cfg.name << "\n";
  const FunctionRegistry registry = cfg.build_registry();

  std::shared_ptr<TransformContext> ctx;
  try {
    ctx = cfg.build_context(registry);
  } catch (const SignScanError& e) {
    std::cout << "  sign scan            : FAIL  " << e.what() << "\n";
    std::cout << "result: FAIL (sign scan)\n";
    return kExitNumeric;
  }
  const char* partial = cfg.orientation == "x-solve" ? "f_x" : "f_y";
  std::cout << "  sign scan (" << partial << ")      : PASS  (constant sign "
            << (ctx->partial_sign() > 0 ? "+" : "-") << " on "
            << ctx->settings().sign_scan << "x" << ctx->settings().sign_scan
            << " grid)\n";

  const DomainRect& dom = ctx->domain();
  const double scale = std::max(
      {1.0, std::abs(dom.x_min), std::abs(dom.x_max), std::abs(dom.y_min),
       std::abs(dom.y_max)});
  const double h = cfg.check.stencil_h * scale;
  const double expected = ctx->expected_jacobian_sign();
  if (dom.x_min + 2.0 * h >= dom.x_max - 2.0 * h ||
      dom.y_min + 2.0 * h >= dom.y_max - 2.0 * h)
    throw ConfigError("check.stencil_h too large for this domain");

  std::mt19937 rng(cfg.check.seed);
  std::uniform_real_distribution<double> ux(dom.x_min + 2.0 * h,
                                            dom.x_max - 2.0 * h);
  std::uniform_real_distribution<double> uy(dom.y_min + 2.0 * h,
                                            dom.y_max - 2.0 * h);

  double max_jac = 0.0;
  double max_rt = 0.0;
  for (int k = 0; k < cfg.check.points; ++k) {
    const double x = ux(rng);
    const double y = uy(rng);
    max_jac = std::max(max_jac,
                       std::abs(ctx->jacobian_det(x, y, h) - expected));
    const TildePoint t = ctx->forward_tilde(x, y);
    const auto [xr, yr] = ctx->invert_tilde(t);
    max_rt = std::max({max_rt, std::abs(xr - x), std::abs(yr - y)});
  }

  const bool jac_ok = max_jac <= cfg.check.jacobian_tol;
  const bool rt_ok = max_rt <= cfg.check.roundtrip_tol;
  std::cout << "  max |jacobian - (" << (expected > 0 ? "+1" : "-1")
            << ")| : " << sci(max_jac) << "  (tol "
            << sci(cfg.check.jacobian_tol) << ")  "
            << (jac_ok ? "PASS" : "FAIL") << "\n";
  std::cout << "  max round-trip error : " << sci(max_rt) << "  (tol "
            << sci(cfg.check.roundtrip_tol) << ")  "
            << (rt_ok ? "PASS" : "FAIL") << "\n";

  if (!jac_ok) {
    std::cout << "result: FAIL (jacobian deviation above tolerance)\n";
    return kExitNumeric;
  }
  if (!rt_ok) {
    std::cout << "result: FAIL (round-trip error above tolerance)\n";
    return kExitNumeric;
  }
  std::cout << "result: PASS\n";
  return kExitOk;
}

namespace {

int run_guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const ParseError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DomainError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericError& e) {
    std::cerr << "numerical failure in step '" << e.step() << "': " << e.what()
              << "\n";
    return kExitNumeric;
  } catch (const Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumeric;
  }
}

}  // namespace

int cmd_reconstruct(const std::string& config_path,
                    const std::string& out_dir) {
  return run_guarded([&] {
    return cmd_reconstruct(ModelConfig::load(config_path), out_dir);
  });
}

int cmd_recalibrate(const std::string& config_path,
                    const std::string& out_dir) {
  return run_guarded([&] {
    return cmd_recalibrate(ModelConfig::load(config_path), out_dir);
  });
}

int cmd_check(const std::string& config_path) {
  return run_guarded([&] { return cmd_check(ModelConfig::load(config_path)); });
}

int cmd_plot(const std::string& out_dir) {
  return run_guarded([&]() -> int {
    const fs::path in = fs::path(out_dir) / "adiabats.json";
    std::ifstream file(in);
    if (!file)
      throw ConfigError("missing input file '" + in.string() +
                        "'; run reconstruct or recalibrate first");
    json doc;
    try {
      file >> doc;
    } catch (const json::exception& e) {
      throw ConfigError("'" + in.string() + "' is not valid JSON: " + e.what());
    }
    write_file(fs::path(out_dir) / "adiabats.svg", render_adiabats_svg(doc));
    std::cout << "plot: wrote adiabats.svg to " << out_dir << "\n";
    return kExitOk;
  });
}

}  // namespace adiabat
