#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hfsense/actigraphy.hpp"
#include "hfsense/context.hpp"
#include "hfsense/kccq.hpp"
#include "hfsense/meta.hpp"
#include "hfsense/types.hpp"

namespace hfsense::cohort {

struct WindowSpec {
  int n_days = 14;     // window length
  int shift_days = 0;  // 0 = window ends the instant before the event
};

// One event-anchored analysis window: [t - (n+shift) days, t - shift days).
struct EventWindow {
  std::string participant_id;
  std::string event_id;
  ClinicalEvent event;
  TimeMs start = 0, end = 0;
  bool overlaps_prior_event = false;
  bool short_lookback = false;  // window begins before the first observed data

  std::vector<AccelSample> accel;
  std::vector<CallRecord> calls;
  std::vector<LocationPing> locations;
  std::vector<KccqResponse> surveys;

  // Participant-level context needed by the feature extractors.
  bool participant_has_any_calls = false;
  std::optional<context::HomeLocation> home;
};

std::vector<EventWindow> build_windows(const Cohort& cohort, const WindowSpec& spec);

enum class Modality { Motion, Social, Location, Kccq };
Modality modality_from_string(const std::string& s);
std::string to_string(Modality m);

struct FeatureRow {
  std::string participant_id;
  std::string event_id;
  int label = 0;  // 1 = decompensated
  bool overlaps_prior_event = false;
  bool short_lookback = false;
  std::optional<actigraphy::MotionFeatures> motion;
  std::optional<context::SocialFeatures> social;
  std::optional<context::GeoFeatures> geo;
  std::optional<kccq::KccqFeatures> kccq;

  bool has(Modality m) const;
};

struct FeatureTable {
  std::vector<std::string> kccq_names;  // {kccq_sum} or the four domain columns
  std::vector<FeatureRow> rows;

  static const std::vector<std::string>& motion_feature_names();
  static const std::vector<std::string>& social_feature_names();
  static const std::vector<std::string>& geo_feature_names();
  std::vector<std::string> feature_names(Modality m) const;
  std::vector<std::string> all_feature_names() const;

  // Value of a named feature, nullopt when the owning modality is missing
  // for that row. Throws on unknown names.
  std::optional<double> value(const FeatureRow& row, const std::string& feature) const;
};

struct ExtractSpec {
  WindowSpec window;
  double accel_fs = 5.0;
  double bp_low = actigraphy::kDefaultLowHz;
  double bp_high = actigraphy::kDefaultHighHz;
  kccq::Variant variant = kccq::Variant::SumRecent;
  double home_cell_m = context::kDefaultCellM;
};

// Delegates to the per-modality extractors; rows come out ordered by
// (participant_id, event time). epochs_out, when given, receives each
// window's epoch grid (same order as the returned rows).
FeatureTable extract_features(std::span<const EventWindow> windows, const ExtractSpec& spec,
                              std::vector<std::vector<actigraphy::ActivityEpoch>>* epochs_out =
                                  nullptr);

void write_features_csv(const std::filesystem::path& path, const FeatureTable& table,
                        const ArtifactMeta& meta);
FeatureTable read_features_csv(const std::filesystem::path& path);

void write_epochs_csv(const std::filesystem::path& path,
                      std::span<const EventWindow> windows,
                      std::span<const std::vector<actigraphy::ActivityEpoch>> epochs,
                      const ArtifactMeta& meta);

}  // namespace hfsense::cohort
