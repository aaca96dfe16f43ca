#include "hetcache/montecarlo.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <random>
#include <string>

#include "hetcache/parallel.hpp"
#include "hetcache/random.hpp"

namespace hetcache {

namespace {

// Random streams within one trial.
enum Stream : std::uint32_t {
  kSbsStream = 0,
  kProbeStream = 1,
  kFadingStream = 2,
  kMbsCellUsers = 3,
  kSbsCellUsers = 4,
  kCellPick = 5,
  kUserStream = 6,
};

constexpr double kMetresPerKm = 1000.0;

double squared(Point p) { return p.x * p.x + p.y * p.y; }

std::vector<Point> sample_ppp(KeyedStream& rng, double density, const TorusWindow& window) {
  std::poisson_distribution<long> count(density * window.area());
  const long n = density > 0.0 ? count(rng) : 0;
  std::vector<Point> pts(static_cast<std::size_t>(n));
  for (auto& pt : pts) {
    pt.x = rng.uniform() * window.width();
    pt.y = rng.uniform() * window.height();
  }
  return pts;
}

// SBS positions for a trial; redrawn from the same stream on an empty draw.
std::vector<Point> sample_sbs(const NetworkParams& p, const TorusWindow& window, KeyedStream& rng) {
  std::vector<Point> sites;
  while (sites.empty()) {
    sites = sample_ppp(rng, p.sbs_density, window);
  }
  return sites;
}

struct Nearest {
  std::size_t index = 0;
  double distance = 0.0;  // km
};

Nearest nearest_site(const TorusWindow& window, std::span<const Point> sites, Point at) {
  Nearest best{0, std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < sites.size(); ++i) {
    const double d2 = squared(window.displacement(at, sites[i]));
    if (d2 < best.distance) {
      best = {i, d2};
    }
  }
  best.distance = std::sqrt(best.distance);
  return best;
}

// Sutherland–Hodgman clip of a convex polygon by {q : q·n <= c}.
std::vector<Point> clip(const std::vector<Point>& poly, Point n, double c) {
  std::vector<Point> out;
  out.reserve(poly.size() + 1);
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point a = poly[i];
    const Point b = poly[(i + 1) % poly.size()];
    const double fa = a.x * n.x + a.y * n.y - c;
    const double fb = b.x * n.x + b.y * n.y - c;
    if (fa <= 0.0) {
      out.push_back(a);
    }
    if ((fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0)) {
      const double t = fa / (fa - fb);
      out.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
    }
  }
  return out;
}

double max_radius(const std::vector<Point>& poly) {
  double r2 = 0.0;
  for (const Point& v : poly) {
    r2 = std::max(r2, squared(v));
  }
  return std::sqrt(r2);
}

double received(double power_w, double distance_km, double pathloss) {
  return power_w * std::pow(distance_km * kMetresPerKm, -pathloss);
}

// Number of PPP points of the given density inside `inside`, drawn over the
// box [x0, x1] × [y0, y1].
template <class Inside>
long count_in_cell(KeyedStream& rng, double density, double x0, double x1, double y0, double y1,
                   Inside&& inside) {
  if (density <= 0.0) {
    return 0;
  }
  const double w = x1 - x0;
  const double h = y1 - y0;
  std::poisson_distribution<long> count(density * w * h);
  const long n = count(rng);
  long hits = 0;
  for (long i = 0; i < n; ++i) {
    const Point q{x0 + rng.uniform() * w, y0 + rng.uniform() * h};
    if (inside(q)) {
      ++hits;
    }
  }
  return hits;
}

struct TrialRates {
  double mr, mbh, sr, sbh;
};

TrialRates run_trial(const NetworkParams& p, const TierLoadProfile& loads, const SimConfig& cfg,
                     const TorusWindow& window, const std::vector<Point>& mbs,
                     std::uint64_t trial) {
  KeyedStream sbs_rng(cfg.seed, trial, kSbsStream);
  const std::vector<Point> sbs = sample_sbs(p, window, sbs_rng);

  KeyedStream probe_rng(cfg.seed, trial, kProbeStream);
  const Point probe{probe_rng.uniform() * window.width(), probe_rng.uniform() * window.height()};
  const Nearest serving_m = nearest_site(window, mbs, probe);
  const Nearest serving_s = nearest_site(window, sbs, probe);

  KeyedStream fading_rng(cfg.seed, trial, kFadingStream);
  std::exponential_distribution<double> exp1(1.0);
  double sinr_m = 0.0;
  double sinr_s = 0.0;
  if (cfg.interference == InterferenceMode::kMeanField) {
    sinr_m = received(p.mbs_power_w, serving_m.distance, p.pathloss_mbs) /
             ((1.0 + p.interference_ratio_mbs) * p.noise_w);
    sinr_s = received(p.sbs_power_w, serving_s.distance, p.pathloss_sbs) /
             ((1.0 + p.interference_ratio_sbs) * p.noise_w);
  } else {
    auto sampled = [&](const std::vector<Point>& sites, const Nearest& serving, double power,
                       double pathloss) {
      const double signal = exp1(fading_rng) * received(power, serving.distance, pathloss);
      double interference = 0.0;
      for (std::size_t i = 0; i < sites.size(); ++i) {
        if (i == serving.index) {
          continue;
        }
        const double d = std::sqrt(squared(window.displacement(probe, sites[i])));
        interference += exp1(fading_rng) * received(power, d, pathloss);
      }
      return signal / (p.noise_w + interference);
    };
    sinr_m = sampled(mbs, serving_m, p.mbs_power_w, p.pathloss_mbs);
    sinr_s = sampled(sbs, serving_s, p.sbs_power_w, p.pathloss_sbs);
  }
  sinr_m = std::min(sinr_m, p.sinr_cap);
  sinr_s = std::min(sinr_s, p.sinr_cap);

  // MBS cell: hexagon around the serving site; users drawn over its bounding box.
  KeyedStream mbs_users(cfg.seed, trial, kMbsCellUsers);
  const double side = window.mbs_side();
  const double half_w = 0.5 * std::numbers::sqrt3 * side;
  auto in_hex = [side](Point q) { return hex_contains(side, q); };
  const long n_mmu = count_in_cell(mbs_users, loads.mbh, -half_w, half_w, -side, side, in_hex);
  const long n_mhu =
      count_in_cell(mbs_users, std::max(0.0, loads.mr - loads.mbh), -half_w, half_w, -side, side, in_hex);

  // SBS cell used for load counting.
  std::size_t load_site = serving_s.index;
  if (cfg.sbs_load_cell == SbsLoadCell::kTypical) {
    KeyedStream pick(cfg.seed, trial, kCellPick);
    std::uniform_int_distribution<std::size_t> any(0, sbs.size() - 1);
    load_site = any(pick);
  }
  const std::vector<Point> cell = voronoi_cell(window, sbs, load_site);
  double x0 = 0.0, x1 = 0.0, y0 = 0.0, y1 = 0.0;
  for (const Point& v : cell) {
    x0 = std::min(x0, v.x);
    x1 = std::max(x1, v.x);
    y0 = std::min(y0, v.y);
    y1 = std::max(y1, v.y);
  }
  KeyedStream sbs_users(cfg.seed, trial, kSbsCellUsers);
  auto in_cell = [&cell](Point q) { return polygon_contains(cell, q); };
  const long n_smu = count_in_cell(sbs_users, loads.sbh, x0, x1, y0, y1, in_cell);
  const long n_shu =
      count_in_cell(sbs_users, std::max(0.0, loads.sr - loads.sbh), x0, x1, y0, y1, in_cell);

  TrialRates r;
  r.mr = p.mbs_bandwidth_hz / static_cast<double>(n_mhu + n_mmu + 1) * std::log2(1.0 + sinr_m);
  r.mbh = p.mbs_backhaul_bps / static_cast<double>(n_mmu + 1);
  r.sr = p.sbs_bandwidth_hz / static_cast<double>(n_shu + n_smu + 1) * std::log2(1.0 + sinr_s);
  r.sbh = p.sbs_backhaul_bps / static_cast<double>(n_smu + 1);
  return r;
}

}  // namespace

void SimConfig::validate() const {
  if (trials < 1) {
    throw ConfigError("simulation needs at least one trial");
  }
  if (!(window_km > 0.0) || !std::isfinite(window_km)) {
    throw ConfigError("simulation window must be positive");
  }
  if (!(mbs_fraction >= 0.0 && mbs_fraction <= 1.0)) {
    throw ConfigError("mbs_fraction must lie in [0, 1]");
  }
}

TorusWindow::TorusWindow(double window_km, double mbs_side_km) : side_(mbs_side_km) {
  if (!(window_km > 0.0) || !(mbs_side_km > 0.0)) {
    throw ConfigError("window and MBS cell side must be positive");
  }
  const double pitch = std::numbers::sqrt3 * side_;
  nx_ = std::max(1, static_cast<int>(std::lround(window_km / pitch)));
  ny_ = std::max(1, static_cast<int>(std::lround(window_km / (3.0 * side_))));
  if (2 * nx_ * ny_ < 9) {
    throw ConfigError("window of " + std::to_string(window_km) + " km holds " +
                      std::to_string(2 * nx_ * ny_) + " MBS cells, need at least 9");
  }
  width_ = nx_ * pitch;
  height_ = ny_ * 3.0 * side_;
}

std::vector<Point> TorusWindow::mbs_sites() const {
  const double pitch = std::numbers::sqrt3 * side_;
  std::vector<Point> sites;
  sites.reserve(static_cast<std::size_t>(2 * nx_ * ny_));
  for (int row = 0; row < 2 * ny_; ++row) {
    const double shift = (row % 2) * 0.5 * pitch;
    for (int col = 0; col < nx_; ++col) {
      sites.push_back({col * pitch + shift, row * 1.5 * side_});
    }
  }
  return sites;
}

Point TorusWindow::displacement(Point from, Point to) const {
  double dx = to.x - from.x;
  double dy = to.y - from.y;
  dx -= width_ * std::round(dx / width_);
  dy -= height_ * std::round(dy / height_);
  return {dx, dy};
}

Point TorusWindow::wrap(Point p) const {
  p.x -= width_ * std::floor(p.x / width_);
  p.y -= height_ * std::floor(p.y / height_);
  return p;
}

std::vector<Point> voronoi_cell(const TorusWindow& window, std::span<const Point> sites,
                                std::size_t index) {
  const Point origin = sites[index];
  std::vector<std::pair<double, Point>> neighbours;
  neighbours.reserve(sites.size());
  for (std::size_t i = 0; i < sites.size(); ++i) {
    if (i != index) {
      const Point d = window.displacement(origin, sites[i]);
      neighbours.emplace_back(squared(d), d);
    }
  }
  std::sort(neighbours.begin(), neighbours.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  const double h = 0.5 * std::min(window.width(), window.height());
  std::vector<Point> poly{{-h, -h}, {h, -h}, {h, h}, {-h, h}};
  for (const auto& [d2, d] : neighbours) {
    // Sites farther than twice the cell radius cannot cut the cell.
    if (std::sqrt(d2) > 2.0 * max_radius(poly)) {
      break;
    }
    poly = clip(poly, d, 0.5 * d2);
  }
  return poly;
}

double polygon_area(std::span<const Point> polygon) {
  double twice = 0.0;
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    const Point a = polygon[i];
    const Point b = polygon[(i + 1) % polygon.size()];
    twice += a.x * b.y - b.x * a.y;
  }
  return 0.5 * twice;
}

bool polygon_contains(std::span<const Point> polygon, Point p) {
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    const Point a = polygon[i];
    const Point b = polygon[(i + 1) % polygon.size()];
    if ((b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x) < 0.0) {
      return false;
    }
  }
  return true;
}

bool hex_contains(double side, Point p) {
  const double ax = std::abs(p.x);
  return ax <= 0.5 * std::numbers::sqrt3 * side && std::abs(p.y) + ax / std::numbers::sqrt3 <= side;
}

Realization sample_realization(const NetworkParams& p, double load, const SimConfig& cfg,
                               std::uint64_t trial) {
  cfg.validate();
  if (!(load >= 0.0)) {
    throw DomainError("user density must be nonnegative");
  }
  const TorusWindow window(cfg.window_km, p.mbs_side_km);
  Realization r;
  r.mbs_sites = window.mbs_sites();
  KeyedStream sbs_rng(cfg.seed, trial, kSbsStream);
  r.sbs_sites = sample_sbs(p, window, sbs_rng);

  KeyedStream user_rng(cfg.seed, trial, kUserStream);
  KeyedStream fading_rng(cfg.seed, trial, kFadingStream);
  std::exponential_distribution<double> exp1(1.0);
  for (const Point& pos : sample_ppp(user_rng, load, window)) {
    UserRecord u;
    u.position = pos;
    u.tier = user_rng.uniform() < cfg.mbs_fraction ? Tier::kMbs : Tier::kSbs;
    const auto& sites = u.tier == Tier::kMbs ? r.mbs_sites : r.sbs_sites;
    u.serving = static_cast<int>(nearest_site(window, sites, pos).index);
    u.fading = exp1(fading_rng);
    r.users.push_back(u);
  }
  return r;
}

void write_realization_csv(std::ostream& out, const Realization& r) {
  char line[128];
  out << "entity_type,x_km,y_km,serving_index\n";
  for (const Point& s : r.mbs_sites) {
    std::snprintf(line, sizeof line, "mbs,%.12g,%.12g,-1\n", s.x, s.y);
    out << line;
  }
  for (const Point& s : r.sbs_sites) {
    std::snprintf(line, sizeof line, "sbs,%.12g,%.12g,-1\n", s.x, s.y);
    out << line;
  }
  for (const UserRecord& u : r.users) {
    std::snprintf(line, sizeof line, "%s,%.12g,%.12g,%d\n",
                  u.tier == Tier::kMbs ? "user_mbs" : "user_sbs", u.position.x, u.position.y,
                  u.serving);
    out << line;
  }
}

const MeanEstimate& EmpiricalRates::get(Part part) const {
  switch (part) {
    case Part::MR:
      return mr;
    case Part::MBH:
      return mbh;
    case Part::SR:
      return sr;
    case Part::SBH:
      return sbh;
  }
  return mr;
}

EmpiricalRates empirical_rates(const NetworkParams& p, const TierLoadProfile& loads,
                               const SimConfig& cfg) {
  cfg.validate();
  p.validate();
  if (!(loads.mr >= 0.0 && loads.sr >= 0.0 && loads.mbh >= 0.0 && loads.sbh >= 0.0 &&
        loads.mbh <= loads.mr * (1.0 + 1e-12) && loads.sbh <= loads.sr * (1.0 + 1e-12))) {
    throw DomainError("per-part densities must be nonnegative with mbh <= mr and sbh <= sr");
  }
  const TorusWindow window(cfg.window_km, p.mbs_side_km);
  const std::vector<Point> mbs = window.mbs_sites();
  const auto n = static_cast<std::size_t>(cfg.trials);
  std::vector<double> mr(n), mbh(n), sr(n), sbh(n);
  parallel_for(
      n,
      [&](std::size_t t) {
        const TrialRates r = run_trial(p, loads, cfg, window, mbs, t);
        mr[t] = r.mr;
        mbh[t] = r.mbh;
        sr[t] = r.sr;
        sbh[t] = r.sbh;
      },
      cfg.threads);
  return {mean_and_stderr(mr), mean_and_stderr(mbh), mean_and_stderr(sr), mean_and_stderr(sbh)};
}

EmpiricalCapacity empirical_capacity(const NetworkParams& p, const PopularityModel& model,
                                     const CacheAllocation& alloc, const SimConfig& cfg) {
  const HitRates hits = hit_rates(model, alloc);
  const TierLoadProfile unit = load_profile(hits, alloc.steering, 1.0);
  const std::array<double, 4> coeff{unit.mr, unit.mbh, unit.sr, unit.sbh};
  const std::array<double, 4> req{p.rate_req_ran_bps, p.rate_req_bh_bps, p.rate_req_ran_bps,
                                  p.rate_req_bh_bps};
  const std::array<Part, 4> parts{Part::MR, Part::MBH, Part::SR, Part::SBH};

  bool constrained = false;
  for (std::size_t k = 0; k < 4; ++k) {
    constrained = constrained || (coeff[k] > 0.0 && req[k] > 0.0);
  }
  if (!constrained) {
    return {kUnbounded, true};
  }

  // Which loaded part misses its requirement at density λ, if any.
  auto failing = [&](double load) -> int {
    const EmpiricalRates r = empirical_rates(p, load_profile(hits, alloc.steering, load), cfg);
    for (std::size_t k = 0; k < 4; ++k) {
      if (coeff[k] > 0.0 && r.get(parts[k]).mean < req[k]) {
        return static_cast<int>(k);
      }
    }
    return -1;
  };

  const int at_zero = failing(0.0);
  if (at_zero >= 0) {
    throw InfeasiblePart(parts[at_zero], std::string("requirement of part ") +
                                             std::string(to_string(parts[at_zero])) +
                                             " is not met even by a lone user");
  }
  constexpr double kMaxDensity = 1e7;
  double lo = 0.0;
  double hi = 16.0;
  while (failing(hi) < 0) {
    lo = hi;
    hi *= 2.0;
    if (hi > kMaxDensity) {
      return {lo, true};
    }
  }
  while (hi - lo > 0.01 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (failing(mid) < 0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {lo, false};
}

}  // namespace hetcache
