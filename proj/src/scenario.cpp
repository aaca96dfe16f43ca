#include "hetcache/scenario.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace hetcache {

namespace {

using nlohmann::json;

// Object reader that remembers which keys were consumed, so leftovers can be
// rejected.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) {
      throw ParseError(path_ + " must be an object");
    }
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  std::optional<double> number(const std::string& key) {
    const json* v = find(key);
    if (!v) {
      return std::nullopt;
    }
    if (!v->is_number()) {
      throw ParseError(where(key) + " must be a number");
    }
    return v->get<double>();
  }

  std::optional<std::int64_t> integer(const std::string& key) {
    const json* v = find(key);
    if (!v) {
      return std::nullopt;
    }
    if (!v->is_number_integer()) {
      throw ParseError(where(key) + " must be an integer");
    }
    return v->get<std::int64_t>();
  }

  std::optional<bool> boolean(const std::string& key) {
    const json* v = find(key);
    if (!v) {
      return std::nullopt;
    }
    if (!v->is_boolean()) {
      throw ParseError(where(key) + " must be true or false");
    }
    return v->get<bool>();
  }

  std::optional<std::string> string(const std::string& key) {
    const json* v = find(key);
    if (!v) {
      return std::nullopt;
    }
    if (!v->is_string()) {
      throw ParseError(where(key) + " must be a string");
    }
    return v->get<std::string>();
  }

  const json* raw(const std::string& key) { return find(key); }

  std::optional<Section> section(const std::string& key) {
    const json* v = find(key);
    if (!v) {
      return std::nullopt;
    }
    return Section(*v, where(key));
  }

  std::string where(const std::string& key) const { return path_ + "." + key; }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) {
        throw ParseError("unknown key " + where(key));
      }
    }
  }

 private:
  const json* find(const std::string& key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

SweepKind parse_sweep(const std::string& name) {
  static const std::map<std::string, SweepKind> kinds{
      {"BUDGET_SWEEP", SweepKind::kBudgetSweep},       {"PHI_CS_SURFACE", SweepKind::kPhiCsSurface},
      {"BACKHAUL_TRADE", SweepKind::kBackhaulTrade},   {"DENSITY_BACKHAUL", SweepKind::kDensityBackhaul},
      {"DENSITY_CACHE", SweepKind::kDensityCache},     {"VALIDATE_RATES", SweepKind::kValidateRates},
  };
  const auto it = kinds.find(name);
  if (it == kinds.end()) {
    throw ParseError("unknown sweep '" + name + "'");
  }
  return it->second;
}

Range parse_range(Section s, Range r, const std::string& start_key = "start",
                  const std::string& stop_key = "stop") {
  if (auto v = s.number(start_key)) r.start = *v;
  if (auto v = s.number(stop_key)) r.stop = *v;
  if (auto v = s.integer("points")) r.points = static_cast<int>(*v);
  if (auto v = s.boolean("log")) r.log = *v;
  s.finish();
  return r;
}

void parse_network(Section s, NetworkParams& p) {
  if (auto v = s.number("mbs_side_km")) p.mbs_side_km = *v;
  if (auto v = s.number("sbs_density_per_km2")) p.sbs_density = *v;
  if (auto v = s.number("mbs_bandwidth_mhz")) p.mbs_bandwidth_hz = *v * 1e6;
  if (auto v = s.number("sbs_bandwidth_mhz")) p.sbs_bandwidth_hz = *v * 1e6;
  if (auto v = s.number("mbs_power_w")) p.mbs_power_w = *v;
  if (auto v = s.number("sbs_power_w")) p.sbs_power_w = *v;
  if (auto v = s.number("pathloss_mbs")) p.pathloss_mbs = *v;
  if (auto v = s.number("pathloss_sbs")) p.pathloss_sbs = *v;
  const double density = s.number("noise_dbm_per_mhz").value_or(-105.0);
  const double bandwidth = s.number("noise_bandwidth_mhz").value_or(1.0);
  p.noise_w = noise_power_w(density, bandwidth * 1e6);
  if (auto v = s.number("interference_ratio_mbs")) p.interference_ratio_mbs = *v;
  if (auto v = s.number("interference_ratio_sbs")) p.interference_ratio_sbs = *v;
  const auto cap_db = s.number("sinr_cap_db");
  const auto cap = s.number("sinr_cap");
  if (cap_db && cap) {
    throw ParseError(s.where("sinr_cap") + " and sinr_cap_db are mutually exclusive");
  }
  if (cap_db) p.sinr_cap = std::pow(10.0, *cap_db / 10.0);
  if (cap) p.sinr_cap = *cap;
  if (auto v = s.number("mbs_backhaul_gbps")) p.mbs_backhaul_bps = *v * 1e9;
  if (auto v = s.number("sbs_backhaul_gbps")) p.sbs_backhaul_bps = *v * 1e9;
  if (auto v = s.number("rate_req_ran_mbps")) p.rate_req_ran_bps = *v * 1e6;
  if (auto v = s.number("rate_req_bh_mbps")) p.rate_req_bh_bps = *v * 1e6;
  if (auto v = s.number("gamma_shape")) p.gamma_shape = *v;
  s.finish();
}

void parse_sim(Section s, SimConfig& c) {
  if (auto v = s.number("window_km")) c.window_km = *v;
  if (auto v = s.integer("trials")) c.trials = static_cast<int>(*v);
  if (auto v = s.integer("seed")) {
    if (*v < 0) {
      throw ParseError(s.where("seed") + " must be nonnegative");
    }
    c.seed = static_cast<std::uint64_t>(*v);
  }
  if (auto v = s.number("mbs_fraction")) c.mbs_fraction = *v;
  if (auto v = s.string("interference")) {
    if (*v == "MEAN_FIELD") {
      c.interference = InterferenceMode::kMeanField;
    } else if (*v == "SAMPLED") {
      c.interference = InterferenceMode::kSampled;
    } else {
      throw ParseError(s.where("interference") + " must be MEAN_FIELD or SAMPLED");
    }
  }
  if (auto v = s.string("sbs_load_cell")) {
    if (*v == "TYPICAL") {
      c.sbs_load_cell = SbsLoadCell::kTypical;
    } else if (*v == "PROBE") {
      c.sbs_load_cell = SbsLoadCell::kProbe;
    } else {
      throw ParseError(s.where("sbs_load_cell") + " must be TYPICAL or PROBE");
    }
  }
  if (auto v = s.integer("threads")) c.threads = static_cast<unsigned>(std::max<std::int64_t>(0, *v));
  s.finish();
}

GridSize parse_grid(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer()) {
    throw ParseError(where + " must be [cs_points, phi_points]");
  }
  return {j[0].get<int>(), j[1].get<int>()};
}

bool is_safe_name(const std::string& name) {
  for (char c : name) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
    if (!ok) {
      return false;
    }
  }
  return !name.empty() && name != "." && name != "..";
}

void check_range(const Range& r, const std::string& what) {
  if (r.points < 1 || !std::isfinite(r.start) || !std::isfinite(r.stop) || r.start > r.stop) {
    throw ConfigError(what + " range must be nonempty and ordered");
  }
  if (r.log && !(r.start > 0.0)) {
    throw ConfigError(what + " log range must start above 0");
  }
}

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::string& header) : out_(path) {
    if (!out_) {
      throw Error("cannot write " + path.string());
    }
    out_ << header << '\n';
  }

  template <class... Fields>
  void row(const Fields&... fields) {
    bool first = true;
    ((out_ << (first ? "" : ",") << field(fields), first = false), ...);
    out_ << '\n';
    ++rows_;
  }

  std::size_t rows() const { return rows_; }

 private:
  static std::string field(double v) { return csv_number(v); }
  static std::string field(int v) { return std::to_string(v); }
  static std::string field(bool v) { return v ? "1" : "0"; }
  static std::string field(std::string_view v) { return std::string(v); }
  static std::string field(const char* v) { return v; }

  std::ofstream out_;
  std::size_t rows_ = 0;
};

struct Context {
  const Scenario& sc;
  const PopularityModel& model;
  std::ostream& summary;
};

std::size_t sweep_budget(const Context& ctx, const std::filesystem::path& path) {
  const NetworkParams& p = ctx.sc.params;
  const LoadCaps caps = cap_loads(p);
  const Densities rho = Densities::of(p);
  const double mu0 = solve(caps, rho, ctx.model, 0.0, ctx.sc.grid).mu;
  CsvWriter csv(path, "C,xi_c_star,mu_star_normalized,mu_star,regime,cs_star,cm_star,phi_star,total_hit");
  for (double c : ctx.sc.budgets.values()) {
    const OptimalPlan plan = solve(caps, rho, ctx.model, c, ctx.sc.grid);
    csv.row(c, plan.xi_c(rho.sbs), plan.mu / mu0, plan.mu, to_string(plan.regime), plan.sbs_cache,
            plan.mbs_cache, plan.steering, plan.hits.total);
  }
  return csv.rows();
}

std::size_t sweep_surface(const Context& ctx, const std::filesystem::path& path) {
  const NetworkParams& p = ctx.sc.params;
  const Densities rho = Densities::of(p);
  const double c = ctx.sc.budget;
  const auto surface = grid_surface(cap_loads(p), rho, ctx.model, c, ctx.sc.grid);
  CsvWriter csv(path, "xi_c,phi,mu,sbs_cache,mbs_cache,total_hit");
  for (const GridPoint& pt : surface) {
    const double xi = c > 0.0 ? rho.sbs * pt.sbs_cache / c : std::nan("");
    csv.row(xi, pt.steering, pt.mu, pt.sbs_cache, pt.mbs_cache, pt.total_hit);
  }
  return csv.rows();
}

std::size_t sweep_backhaul(const Context& ctx, const std::filesystem::path& path) {
  CsvWriter csv(path, "u_sbh_gbps,required_cache_budget,backhaul_class");
  for (double u : ctx.sc.backhaul_gbps.values()) {
    NetworkParams p = ctx.sc.params;
    p.sbs_backhaul_bps = u * 1e9;
    const BackhaulClass cls = classify_regime(cap_loads(p, CapMode::kLenient));
    csv.row(u, required_cache_budget(p, ctx.model, p.sbs_backhaul_bps), to_string(cls));
  }
  return csv.rows();
}

void summarize_curve(const Context& ctx, const DensityCurve& curve, const char* control) {
  const DensityPoint& best = curve.points[curve.best];
  ctx.summary << "  best SBS density " << csv_number(best.sbs_density) << " /km2, " << control << ' '
              << csv_number(best.control) << ", mu " << csv_number(best.mu) << " /km2"
              << (curve.unimodal ? ", unimodal" : ", not unimodal")
              << (curve.interior ? ", interior maximum\n" : ", maximum at grid edge\n");
}

std::size_t sweep_density_backhaul(const Context& ctx, const std::filesystem::path& path) {
  const DensityCurve curve = optimize_sbs_density_backhaul(ctx.sc.params, ctx.model, ctx.sc.cost,
                                                           ctx.sc.budget, ctx.sc.densities);
  CsvWriter csv(path, "sbs_density,u_sbh_gbps,feasible,mu,is_best");
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    const DensityPoint& pt = curve.points[i];
    csv.row(pt.sbs_density, pt.control / 1e9, pt.feasible, pt.mu, i == curve.best);
  }
  summarize_curve(ctx, curve, "U_SBH (bit/s)");
  return csv.rows();
}

std::size_t sweep_density_cache(const Context& ctx, const std::filesystem::path& path) {
  const DensityCurve curve =
      optimize_sbs_density_caching_station(ctx.sc.params, ctx.model, ctx.sc.cost, ctx.sc.densities);
  CsvWriter csv(path, "sbs_density,sbs_cache,feasible,mu,is_best");
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    const DensityPoint& pt = curve.points[i];
    csv.row(pt.sbs_density, pt.control, pt.feasible, pt.mu, i == curve.best);
  }
  summarize_curve(ctx, curve, "C_s (files)");
  return csv.rows();
}

std::size_t sweep_rates(const Context& ctx, const std::filesystem::path& path) {
  const NetworkParams& p = ctx.sc.params;
  const double f = ctx.sc.sim.mbs_fraction;
  CsvWriter csv(path, "part,load,analytic,empirical_mean,stderr");
  for (double total : ctx.sc.loads.values()) {
    const TierLoadProfile loads = load_profile(HitRates{}, 1.0 - f, total);
    const EmpiricalRates emp = empirical_rates(p, loads, ctx.sc.sim);
    csv.row("MR", loads.mr, mean_rate_mbs_radio(p, loads.mr), emp.mr.mean, emp.mr.std_error);
    csv.row("MBH", loads.mbh, mean_rate_mbs_backhaul(p, loads.mbh), emp.mbh.mean, emp.mbh.std_error);
    csv.row("SR", loads.sr, mean_rate_sbs_radio(p, loads.sr), emp.sr.mean, emp.sr.std_error);
    csv.row("SBH", loads.sbh, mean_rate_sbs_backhaul(p, loads.sbh), emp.sbh.mean, emp.sbh.std_error);
  }
  return csv.rows();
}

void print_header(const Context& ctx) {
  const NetworkParams& p = ctx.sc.params;
  std::ostream& out = ctx.summary;
  out << "scenario " << ctx.sc.name << '\n';
  out << "  catalog F=" << ctx.model.file_count() << " skewness=" << csv_number(ctx.model.skewness())
      << ", U_SBH=" << csv_number(p.sbs_backhaul_bps / 1e9) << " Gbps\n";
  const LoadCaps caps = cap_loads(p, CapMode::kLenient);
  out << "  load caps /km2: MR=" << csv_number(caps.mr) << " MBH=" << csv_number(caps.mbh)
      << " SR=" << csv_number(caps.sr) << " SBH=" << csv_number(caps.sbh)
      << (caps.feasible[3] ? "" : " (SBS backhaul below requirement)") << '\n';
  const BackhaulClass cls = classify_regime(caps);
  out << "  backhaul class: " << to_string(cls) << '\n';
  if (cls == BackhaulClass::kIdealMbhConstrainedSbh) {
    try {
      const Thresholds t = thresholds(caps, Densities::of(p), ctx.model);
      out << "  thresholds files/km2: C_min=" << csv_number(t.c_min) << " C_max=" << csv_number(t.c_max)
          << '\n';
    } catch (const CatalogTooSmall& e) {
      out << "  thresholds: " << e.what() << '\n';
    }
  }
  if (caps.feasible[3]) {
    const Densities rho = Densities::of(p);
    const OptimalPlan plan = solve(caps, rho, ctx.model, ctx.sc.budget, ctx.sc.grid);
    out << "  plan at C=" << csv_number(ctx.sc.budget) << ": " << to_string(plan.regime)
        << " mu=" << csv_number(plan.mu) << " C_s=" << csv_number(plan.sbs_cache)
        << " C_m=" << csv_number(plan.mbs_cache) << " phi=" << csv_number(plan.steering)
        << " xi_c=" << csv_number(plan.xi_c(rho.sbs)) << " hit=" << csv_number(plan.hits.total)
        << " bottleneck=" << to_string(plan.breakdown.bottleneck) << '\n';
  }
}

}  // namespace

std::string_view to_string(SweepKind kind) {
  switch (kind) {
    case SweepKind::kBudgetSweep:
      return "BUDGET_SWEEP";
    case SweepKind::kPhiCsSurface:
      return "PHI_CS_SURFACE";
    case SweepKind::kBackhaulTrade:
      return "BACKHAUL_TRADE";
    case SweepKind::kDensityBackhaul:
      return "DENSITY_BACKHAUL";
    case SweepKind::kDensityCache:
      return "DENSITY_CACHE";
    case SweepKind::kValidateRates:
      return "VALIDATE_RATES";
  }
  return "?";
}

std::vector<double> Range::values() const {
  std::vector<double> out(static_cast<std::size_t>(std::max(points, 0)));
  for (int i = 0; i < points; ++i) {
    const double t = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
    out[i] = log ? start * std::pow(stop / start, t) : start + t * (stop - start);
  }
  if (points > 1) {
    out.back() = stop;
  }
  return out;
}

void Scenario::validate() const {
  if (!is_safe_name(name)) {
    throw ConfigError("scenario name must be nonempty and use only letters, digits, '_', '-', '.'");
  }
  if (sweeps.empty()) {
    throw ConfigError("scenario lists no sweep");
  }
  if (files == 0) {
    throw ConfigError("catalog must hold at least one file");
  }
  params.validate();
  if (!(budget >= 0.0) || !std::isfinite(budget)) {
    throw ConfigError("budget must be finite and nonnegative");
  }
  if (grid.cs_points < 2 || grid.phi_points < 2) {
    throw ConfigError("grid sizes must be at least 2");
  }
  check_range(budgets, "budget_sweep");
  if (budgets.start < 0.0) {
    throw ConfigError("budget_sweep must start at or above 0");
  }
  check_range(backhaul_gbps, "backhaul_trade");
  if (backhaul_gbps.start < 0.0) {
    throw ConfigError("backhaul_trade must start at or above 0");
  }
  check_range(loads, "validate_rates.loads");
  if (loads.start < 0.0) {
    throw ConfigError("validate_rates loads must be nonnegative");
  }
  cost.validate();
  if (densities.empty()) {
    throw ConfigError("density grid is empty");
  }
  for (std::size_t i = 0; i < densities.size(); ++i) {
    if (!(densities[i] > 0.0) || (i > 0 && densities[i] <= densities[i - 1])) {
      throw ConfigError("densities must be positive and strictly increasing");
    }
  }
  sim.validate();
}

Scenario parse_scenario(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed scenario: ") + e.what());
  }
  Section root(doc, "scenario");
  Scenario sc;
  sc.name = root.string("name").value_or("");

  const json* sweep = root.raw("sweep");
  if (!sweep) {
    throw ParseError("scenario.sweep is required");
  }
  if (sweep->is_string()) {
    sc.sweeps.push_back(parse_sweep(sweep->get<std::string>()));
  } else if (sweep->is_array()) {
    for (const json& s : *sweep) {
      if (!s.is_string()) {
        throw ParseError("scenario.sweep entries must be strings");
      }
      sc.sweeps.push_back(parse_sweep(s.get<std::string>()));
    }
  } else {
    throw ParseError("scenario.sweep must be a string or a list of strings");
  }

  if (auto s = root.section("network")) parse_network(*s, sc.params);
  if (auto s = root.section("popularity")) {
    if (auto v = s->integer("files")) {
      if (*v < 1) {
        throw ConfigError("popularity.files must be at least 1");
      }
      sc.files = static_cast<std::size_t>(*v);
    }
    if (auto v = s->number("skewness")) sc.skewness = *v;
    s->finish();
  }
  if (auto s = root.section("optimizer")) {
    if (auto v = s->number("budget")) sc.budget = *v;
    if (const json* g = s->raw("grid")) sc.grid = parse_grid(*g, s->where("grid"));
    s->finish();
  }
  if (auto s = root.section("budget_sweep")) sc.budgets = parse_range(*s, sc.budgets);
  if (auto s = root.section("backhaul_trade")) {
    sc.backhaul_gbps = parse_range(*s, sc.backhaul_gbps, "start_gbps", "stop_gbps");
  }
  if (auto s = root.section("deployment")) {
    if (auto c = s->section("cost")) {
      if (auto v = c->number("k_bh")) sc.cost.k_bh = *v;
      if (auto v = c->number("zeta_bh")) sc.cost.zeta_bh = *v;
      if (auto v = c->number("k_c")) sc.cost.k_c = *v;
      if (auto v = c->number("zeta_c")) sc.cost.zeta_c = *v;
      if (auto v = c->number("budget")) sc.cost.budget = *v;
      c->finish();
    }
    if (const json* d = s->raw("densities")) {
      if (d->is_array()) {
        sc.densities.clear();
        for (const json& x : *d) {
          if (!x.is_number()) {
            throw ParseError(s->where("densities") + " entries must be numbers");
          }
          sc.densities.push_back(x.get<double>());
        }
      } else {
        const Range r = parse_range(Section(*d, s->where("densities")), Range{20.0, 200.0, 40, true});
        check_range(r, "deployment.densities");
        sc.densities = r.values();
      }
    }
    s->finish();
  }
  if (auto s = root.section("validate_rates")) {
    if (auto l = s->section("loads")) sc.loads = parse_range(*l, sc.loads);
    s->finish();
  }
  if (auto s = root.section("sim")) parse_sim(*s, sc.sim);
  root.finish();
  sc.validate();
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot read scenario file " + path.string());
  }
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scenario(text.str());
}

std::vector<std::filesystem::path> run_scenario(Scenario sc, const RunOptions& options,
                                                std::ostream& summary) {
  if (options.seed) sc.sim.seed = *options.seed;
  if (options.grid) sc.grid = *options.grid;
  if (options.trials) sc.sim.trials = *options.trials;
  sc.validate();

  std::filesystem::create_directories(options.out_dir);
  const PopularityModel model = PopularityModel::zipf(sc.files, sc.skewness);
  const Context ctx{sc, model, summary};
  print_header(ctx);

  std::vector<std::filesystem::path> written;
  for (SweepKind kind : sc.sweeps) {
    const std::filesystem::path path =
        options.out_dir / (sc.name + "__" + std::string(to_string(kind)) + ".csv");
    std::size_t rows = 0;
    switch (kind) {
      case SweepKind::kBudgetSweep:
        rows = sweep_budget(ctx, path);
        break;
      case SweepKind::kPhiCsSurface:
        rows = sweep_surface(ctx, path);
        break;
      case SweepKind::kBackhaulTrade:
        rows = sweep_backhaul(ctx, path);
        break;
      case SweepKind::kDensityBackhaul:
        rows = sweep_density_backhaul(ctx, path);
        break;
      case SweepKind::kDensityCache:
        rows = sweep_density_cache(ctx, path);
        break;
      case SweepKind::kValidateRates:
        rows = sweep_rates(ctx, path);
        break;
    }
    summary << "  " << to_string(kind) << ": " << rows << " rows -> " << path.string() << '\n';
    written.push_back(path);
  }
  return written;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ParseError*>(&e)) {
    return 2;
  }
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const InvalidParameter*>(&e) ||
      dynamic_cast<const DomainError*>(&e)) {
    return 3;
  }
  if (dynamic_cast<const InfeasiblePart*>(&e) || dynamic_cast<const RegimeError*>(&e) ||
      dynamic_cast<const CatalogTooSmall*>(&e) || dynamic_cast<const LowSnrError*>(&e)) {
    return 4;
  }
  return 1;
}

std::string csv_number(double v) {
  if (std::isnan(v)) {
    return "nan";
  }
  if (std::isinf(v)) {
    return v > 0 ? "inf" : "-inf";
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace hetcache
