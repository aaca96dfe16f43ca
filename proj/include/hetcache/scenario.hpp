#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hetcache/deployment.hpp"
#include "hetcache/montecarlo.hpp"
#include "hetcache/optimizer.hpp"
#include "hetcache/rates.hpp"

namespace hetcache {

enum class SweepKind {
  kBudgetSweep,
  kPhiCsSurface,
  kBackhaulTrade,
  kDensityBackhaul,
  kDensityCache,
  kValidateRates,
};

std::string_view to_string(SweepKind kind);

/// Inclusive range of `points` values, linear or log-spaced.
struct Range {
  double start = 0.0;
  double stop = 0.0;
  int points = 1;
  bool log = false;

  std::vector<double> values() const;
};

struct Scenario {
  std::string name;
  NetworkParams params = NetworkParams::reference();
  std::size_t files = 1000;
  double skewness = 0.56;
  std::vector<SweepKind> sweeps;

  double budget = 50.0;  // files/km², for budget-specific sweeps and the summary plan
  GridSize grid;
  Range budgets{10.0, 2000.0, 200};
  Range backhaul_gbps{0.05, 1.3, 126};
  CostModel cost;
  std::vector<double> densities = default_density_grid();
  Range loads{100.0, 3000.0, 30};
  SimConfig sim;

  void validate() const;
};

/// Parses scenario JSON. Malformed text, wrong types and unknown keys throw
/// ParseError; out-of-range values throw ConfigError or InvalidParameter.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::filesystem::path& path);

struct RunOptions {
  std::filesystem::path out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<GridSize> grid;
  std::optional<int> trials;
};

/// Writes `<name>__<SWEEP>.csv` per sweep into options.out_dir and a summary
/// to `summary`. Returns the files written.
std::vector<std::filesystem::path> run_scenario(Scenario scenario, const RunOptions& options,
                                                std::ostream& summary);

/// 2 parse, 3 validation, 4 infeasible or regime, 1 anything else.
int exit_code_for(const std::exception& e);

/// Number in CSV form: 12 significant digits, "inf"/"-inf"/"nan" otherwise.
std::string csv_number(double v);

}  // namespace hetcache
