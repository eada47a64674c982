#include "hfsense/context.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

namespace hfsense::context {

namespace {

double population_std(const std::vector<double>& v) {
  if (v.size() <= 1) return 0.0;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size()));
}

constexpr double kDegToRad = M_PI / 180.0;
// Meridian arc length of one degree of latitude on the R=6371 km sphere.
constexpr double kMetersPerDegLat = kEarthRadiusKm * 1000.0 * kDegToRad;

}  // namespace

GeoGrid make_grid(double cell_m, double ref_lat_deg) {
  GeoGrid g;
  g.dlat_deg = cell_m / kMetersPerDegLat;
  const double c = std::cos(ref_lat_deg * kDegToRad);
  g.dlon_deg = cell_m / (kMetersPerDegLat * std::max(c, 0.01));
  return g;
}

GridCell cell_of(const GeoGrid& grid, double lat, double lon) {
  return GridCell{static_cast<std::int64_t>(std::floor(lat / grid.dlat_deg)),
                  static_cast<std::int64_t>(std::floor(lon / grid.dlon_deg))};
}

double haversine_km(double lat1, double lon1, double lat2, double lon2) {
  const double phi1 = lat1 * kDegToRad;
  const double phi2 = lat2 * kDegToRad;
  const double dphi = (lat2 - lat1) * kDegToRad;
  const double dlam = (lon2 - lon1) * kDegToRad;
  const double s1 = std::sin(dphi / 2.0);
  const double s2 = std::sin(dlam / 2.0);
  double a = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
  a = std::clamp(a, 0.0, 1.0);
  return kEarthRadiusKm * 2.0 * std::asin(std::sqrt(a));
}

std::optional<SocialFeatures> social_features(std::span<const CallRecord> calls,
                                              TimeMs win_start, TimeMs win_end,
                                              bool participant_has_any_calls) {
  if (!participant_has_any_calls) return std::nullopt;

  SocialFeatures f;
  f.num_calls = static_cast<double>(calls.size());

  std::vector<double> durations;
  durations.reserve(calls.size());
  for (const auto& c : calls) {
    f.dur_calls += c.duration_s;
    durations.push_back(c.duration_s);
  }
  f.dur_calls_std = population_std(durations);

  // Gap computation works on merged call intervals clipped to the window, so
  // overlapping calls never produce negative gaps.
  std::vector<std::pair<double, double>> intervals;
  intervals.reserve(calls.size());
  const double a = 0.0;
  const double b = static_cast<double>(win_end - win_start) / 1000.0;
  for (const auto& c : calls) {
    double s = static_cast<double>(c.t_start - win_start) / 1000.0;
    double e = s + c.duration_s;
    s = std::clamp(s, a, b);
    e = std::clamp(e, a, b);
    if (e > s) intervals.emplace_back(s, e);
  }
  std::sort(intervals.begin(), intervals.end());
  std::vector<std::pair<double, double>> merged;
  for (const auto& iv : intervals) {
    if (!merged.empty() && iv.first <= merged.back().second) {
      merged.back().second = std::max(merged.back().second, iv.second);
    } else {
      merged.push_back(iv);
    }
  }

  std::vector<double> gaps;
  double cursor = a;
  for (const auto& iv : merged) {
    if (iv.first > cursor) gaps.push_back(iv.first - cursor);
    cursor = iv.second;
  }
  if (b > cursor) gaps.push_back(b - cursor);
  for (double g : gaps) f.dur_no_calls += g;
  f.dur_no_calls_std = population_std(gaps);
  return f;
}

std::optional<HomeLocation> find_home(std::span<const LocationPing> all_pings, double cell_m) {
  if (all_pings.empty()) return std::nullopt;
  const GeoGrid grid = make_grid(cell_m, all_pings.front().lat);

  struct CellStat {
    std::size_t count = 0;
    std::size_t first_seen = 0;
  };
  std::map<std::pair<std::int64_t, std::int64_t>, CellStat> cells;
  for (std::size_t k = 0; k < all_pings.size(); ++k) {
    const GridCell c = cell_of(grid, all_pings[k].lat, all_pings[k].lon);
    auto [it, inserted] = cells.try_emplace({c.i, c.j}, CellStat{0, k});
    ++it->second.count;
  }

  auto best = cells.begin();
  for (auto it = std::next(cells.begin()); it != cells.end(); ++it) {
    if (it->second.count > best->second.count ||
        (it->second.count == best->second.count &&
         it->second.first_seen < best->second.first_seen)) {
      best = it;
    }
  }

  HomeLocation home;
  home.cell = GridCell{best->first.first, best->first.second};
  home.lat = (static_cast<double>(home.cell.i) + 0.5) * grid.dlat_deg;
  home.lon = (static_cast<double>(home.cell.j) + 0.5) * grid.dlon_deg;
  home.grid = grid;
  return home;
}

std::optional<GeoFeatures> geo_features(std::span<const LocationPing> pings,
                                        const HomeLocation& home) {
  if (pings.empty()) return std::nullopt;
  GeoFeatures f;
  for (const auto& p : pings) {
    if (cell_of(home.grid, p.lat, p.lon) == home.cell) f.at_home += 1.0;
    const double d = haversine_km(p.lat, p.lon, home.lat, home.lon);
    f.dist_to_home += d;
    if (d <= kZone1RadiusKm) {
      f.zone1 += 1.0;
    } else {
      f.zone2 += 1.0;
    }
  }
  return f;
}

}  // namespace hfsense::context
