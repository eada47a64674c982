#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "hfsense/types.hpp"

namespace hfsense::context {

constexpr double kEarthRadiusKm = 6371.0;
constexpr double kZone1RadiusKm = 2.0;
constexpr double kDefaultCellM = 100.0;

struct SocialFeatures {
  double num_calls = 0.0;
  double dur_calls = 0.0;          // seconds
  double dur_calls_std = 0.0;      // population std of call durations
  double dur_no_calls = 0.0;       // total uncovered window time, seconds
  double dur_no_calls_std = 0.0;   // population std of gap lengths
};

struct GeoFeatures {
  double at_home = 0.0;       // pings in the exact home cell
  double dist_to_home = 0.0;  // summed haversine distance, km
  double zone1 = 0.0;         // pings within 2 km of home
  double zone2 = 0.0;         // pings beyond 2 km
};

// Quantization grid used for home detection. Longitude cell width is scaled
// by the participant's reference latitude so cells are roughly square.
struct GeoGrid {
  double dlat_deg = 0.0;
  double dlon_deg = 0.0;
};

struct GridCell {
  std::int64_t i = 0, j = 0;
  bool operator==(const GridCell&) const = default;
};

struct HomeLocation {
  GridCell cell;
  double lat = 0.0, lon = 0.0;  // cell center
  GeoGrid grid;
};

GeoGrid make_grid(double cell_m, double ref_lat_deg);
GridCell cell_of(const GeoGrid& grid, double lat, double lon);

double haversine_km(double lat1, double lon1, double lat2, double lon2);

// Social-contact features over [win_start, win_end). Returns nullopt only
// when the participant shared no call data at all during enrollment; an empty
// window is a valid observation.
std::optional<SocialFeatures> social_features(std::span<const CallRecord> calls_in_window,
                                              TimeMs win_start, TimeMs win_end,
                                              bool participant_has_any_calls);

// Most frequently visited cell over the participant's full location history;
// frequency ties go to the earliest-visited cell.
std::optional<HomeLocation> find_home(std::span<const LocationPing> all_pings,
                                      double cell_m = kDefaultCellM);

std::optional<GeoFeatures> geo_features(std::span<const LocationPing> pings_in_window,
                                        const HomeLocation& home);

}  // namespace hfsense::context
