#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "adiabat/commands.hpp"
#include "adiabat/errors.hpp"

namespace {

// "48x64" -> (48, 64)
std::pair<int, int> parse_grid(const std::string& text) {
  const auto x = text.find('x');
  if (x == std::string::npos || x == 0 || x + 1 >= text.size())
    throw adiabat::ConfigError("--grid expects NxM, got '" + text + "'");
  try {
    return {std::stoi(text.substr(0, x)), std::stoi(text.substr(x + 1))};
  } catch (const std::exception&) {
    throw adiabat::ConfigError("--grid expects NxM, got '" + text + "'");
  }
}

std::vector<double> parse_levels(const std::string& text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    const std::string item = text.substr(pos, comma - pos);
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw adiabat::ConfigError("--levels expects a,b,c, got '" + text + "'");
    }
    pos = comma + 1;
  }
  return out;
}

struct CommonArgs {
  std::string config;
  std::string out_dir = "out";
  std::string tol_text;
  std::string grid_text;
  std::string levels_text;
};

adiabat::CliOverrides make_overrides(const CommonArgs& args) {
  adiabat::CliOverrides ov;
  if (!args.tol_text.empty()) ov.tol = std::stod(args.tol_text);
  if (!args.grid_text.empty()) ov.grid = parse_grid(args.grid_text);
  if (!args.levels_text.empty()) ov.levels = parse_levels(args.levels_text);
  return ov;
}

int run_with_config(const CommonArgs& args,
                    int (*command)(const adiabat::ModelConfig&,
                                   const std::string&)) {
  try {
    adiabat::ModelConfig cfg = adiabat::ModelConfig::load(args.config);
    adiabat::apply_overrides(cfg, make_overrides(args));
    return command(cfg, args.out_dir);
  } catch (const adiabat::ParseError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return adiabat::kExitConfig;
  } catch (const adiabat::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return adiabat::kExitConfig;
  } catch (const adiabat::DomainError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return adiabat::kExitConfig;
  } catch (const adiabat::NumericError& e) {
    std::cerr << "numerical failure in step '" << e.step() << "': " << e.what()
              << "\n";
    return adiabat::kExitNumeric;
  } catch (const adiabat::Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return adiabat::kExitNumeric;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "adiabat: reconstruct a substance's entropy function and adiabat "
      "family from its isotherms plus one adiabat (calibrated) or two "
      "(uncalibrated)"};
  app.require_subcommand(1);

  CommonArgs rec_args;
  auto* rec = app.add_subcommand(
      "reconstruct", "Calibrated case: one adiabat, absolute temperature");
  rec->add_option("config", rec_args.config, "Model config JSON")->required();
  rec->add_option("-o,--out", rec_args.out_dir, "Output directory");
  rec->add_option("--tol", rec_args.tol_text,
                  "Override root and quadrature tolerances");
  rec->add_option("--grid", rec_args.grid_text, "Override output grid (NxM)");
  rec->add_option("--levels", rec_args.levels_text,
                  "Override requested S levels (a,b,c)");

  CommonArgs cal_args;
  auto* cal = app.add_subcommand(
      "recalibrate",
      "Uncalibrated case: two adiabats, recover the temperature scale");
  cal->add_option("config", cal_args.config, "Model config JSON")->required();
  cal->add_option("-o,--out", cal_args.out_dir, "Output directory");
  cal->add_option("--tol", cal_args.tol_text,
                  "Override root and quadrature tolerances");
  cal->add_option("--grid", cal_args.grid_text, "Override output grid (NxM)");
  cal->add_option("--levels", cal_args.levels_text,
                  "Override requested levels (a,b,c)");

  CommonArgs chk_args;
  auto* chk = app.add_subcommand(
      "check", "Audit the transform invariants (sign scan, area "
               "preservation, round-trip)");
  chk->add_option("config", chk_args.config, "Model config JSON")->required();
  chk->add_option("--tol", chk_args.tol_text,
                  "Override root and quadrature tolerances");

  std::string plot_dir;
  auto* plt = app.add_subcommand(
      "plot", "Render <dir>/adiabats.json to <dir>/adiabats.svg");
  plt->add_option("dir", plot_dir, "Directory containing adiabats.json")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  if (rec->parsed()) return run_with_config(rec_args, adiabat::cmd_reconstruct);
  if (cal->parsed()) return run_with_config(cal_args, adiabat::cmd_recalibrate);
  if (chk->parsed()) {
    auto check_cmd = [](const adiabat::ModelConfig& cfg,
                        const std::string&) { return adiabat::cmd_check(cfg); };
    return run_with_config(chk_args, check_cmd);
  }
  if (plt->parsed()) return adiabat::cmd_plot(plot_dir);
  return adiabat::kExitConfig;
}
