#include <cstdio>
#include <fstream>
#include <iostream>
#include <regex>
#include <string>

#include "CLI11.hpp"
#include "hetcache/deployment.hpp"
#include "hetcache/montecarlo.hpp"
#include "hetcache/scenario.hpp"

namespace {

std::optional<hetcache::GridSize> parse_grid_flag(const std::string& text) {
  static const std::regex shape(R"((\d+)[xX](\d+))");
  std::smatch m;
  if (!std::regex_match(text, m, shape)) {
    throw hetcache::ParseError("--grid expects NxM, got '" + text + "'");
  }
  return hetcache::GridSize{std::stoi(m[1]), std::stoi(m[2])};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cache and backhaul capacity planner for two-tier cellular networks"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  std::string grid;
  int trials = 0;
  auto* run = app.add_subcommand("run", "Run a scenario file and write its CSV sweeps");
  run->add_option("scenario", scenario_path, "Scenario JSON file")->required();
  auto* out_opt = run->add_option("--out", out_dir, "Output directory");
  auto* seed_opt = run->add_option("--seed", seed, "Override the simulation seed");
  auto* grid_opt = run->add_option("--grid", grid, "Override the grid size, e.g. 200x200");
  auto* trials_opt = run->add_option("--trials", trials, "Override the Monte Carlo trial count");

  std::string calib_scenario;
  double target = 900.0;
  auto* calibrate = app.add_subcommand(
      "calibrate", "Find the SBS backhaul capacity centring the cache thresholds on a target");
  calibrate->add_option("scenario", calib_scenario, "Scenario JSON file (network and popularity)")
      ->required();
  calibrate->add_option("--target", target, "Target (C_min + C_max)/2 in files/km2");

  std::string real_scenario;
  std::string real_out = "realization.csv";
  double load = 500.0;
  std::uint64_t trial = 0;
  auto* realization =
      app.add_subcommand("realization", "Dump one simulated realization as CSV");
  realization->add_option("scenario", real_scenario, "Scenario JSON file")->required();
  realization->add_option("--load", load, "Total user density per km2");
  realization->add_option("--trial", trial, "Trial index");
  realization->add_option("--out", real_out, "Output CSV path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      hetcache::RunOptions options;
      (void)out_opt;
      options.out_dir = out_dir;
      if (*seed_opt) options.seed = seed;
      if (*grid_opt) options.grid = parse_grid_flag(grid);
      if (*trials_opt) options.trials = trials;
      hetcache::run_scenario(hetcache::load_scenario(scenario_path), options, std::cout);
    } else if (*calibrate) {
      const hetcache::Scenario sc = hetcache::load_scenario(calib_scenario);
      sc.params.validate();
      const auto model = hetcache::PopularityModel::zipf(sc.files, sc.skewness);
      const auto c = hetcache::calibrate_sbs_backhaul(sc.params, model, target);
      std::cout << "U_SBH=" << hetcache::csv_number(c.sbs_backhaul_bps) << " bit/s"
                << " C_min=" << hetcache::csv_number(c.c_min)
                << " C_max=" << hetcache::csv_number(c.c_max) << '\n';
    } else if (*realization) {
      const hetcache::Scenario sc = hetcache::load_scenario(real_scenario);
      const auto r = hetcache::sample_realization(sc.params, load, sc.sim, trial);
      std::ofstream out(real_out);
      if (!out) {
        throw hetcache::Error("cannot write " + real_out);
      }
      hetcache::write_realization_csv(out, r);
      std::cout << r.sbs_sites.size() << " SBSs, " << r.users.size() << " users -> " << real_out
                << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return hetcache::exit_code_for(e);
  }
  return 0;
}
