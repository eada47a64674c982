#include "hfsense/cohort.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <stdexcept>

#include "hfsense/csv.hpp"
#include "hfsense/parallel.hpp"

namespace hfsense::cohort {

namespace {

template <typename T, typename GetT>
std::vector<T> slice(const std::vector<T>& v, TimeMs start, TimeMs end, GetT&& t_of) {
  std::vector<T> out;
  for (const auto& x : v) {
    const TimeMs t = t_of(x);
    if (t >= start && t < end) out.push_back(x);
  }
  return out;
}

std::string make_event_id(const std::string& pid, std::size_t k) {
  std::string n = std::to_string(k);
  if (n.size() < 2) n.insert(n.begin(), '0');
  return pid + "_e" + n;
}

}  // namespace

std::vector<EventWindow> build_windows(const Cohort& cohort, const WindowSpec& spec) {
  if (spec.n_days < 1) throw std::invalid_argument("window n_days must be >= 1");
  if (spec.shift_days < 0) throw std::invalid_argument("shift_days must be >= 0");

  std::vector<EventWindow> windows;
  for (const auto& d : cohort) {
    TimeMs enrollment_start = std::numeric_limits<TimeMs>::max();
    if (!d.accel.empty()) enrollment_start = std::min(enrollment_start, d.accel.front().t);
    if (!d.calls.empty()) enrollment_start = std::min(enrollment_start, d.calls.front().t_start);
    if (!d.locations.empty()) enrollment_start = std::min(enrollment_start, d.locations.front().t);
    if (!d.surveys.empty()) enrollment_start = std::min(enrollment_start, d.surveys.front().t);
    if (!d.events.empty()) enrollment_start = std::min(enrollment_start, d.events.front().t);

    const auto home = context::find_home(d.locations);

    for (std::size_t k = 0; k < d.events.size(); ++k) {
      const auto& ev = d.events[k];
      EventWindow w;
      w.participant_id = d.participant_id;
      w.event_id = make_event_id(d.participant_id, k);
      w.event = ev;
      w.end = ev.t - static_cast<TimeMs>(spec.shift_days) * kMsPerDay;
      w.start = w.end - static_cast<TimeMs>(spec.n_days) * kMsPerDay;
      for (std::size_t j = 0; j < k; ++j) {
        if (d.events[j].t >= w.start && d.events[j].t < w.end) {
          w.overlaps_prior_event = true;
          break;
        }
      }
      w.short_lookback = w.start < enrollment_start;
      w.accel = slice(d.accel, w.start, w.end, [](const auto& s) { return s.t; });
      w.calls = slice(d.calls, w.start, w.end, [](const auto& c) { return c.t_start; });
      w.locations = slice(d.locations, w.start, w.end, [](const auto& p) { return p.t; });
      w.surveys = slice(d.surveys, w.start, w.end, [](const auto& s) { return s.t; });
      w.participant_has_any_calls = !d.calls.empty();
      w.home = home;
      windows.push_back(std::move(w));
    }
  }
  return windows;
}

Modality modality_from_string(const std::string& s) {
  if (s == "motion") return Modality::Motion;
  if (s == "social") return Modality::Social;
  if (s == "location") return Modality::Location;
  if (s == "kccq") return Modality::Kccq;
  throw std::invalid_argument("unknown modality: " + s);
}

std::string to_string(Modality m) {
  switch (m) {
    case Modality::Motion: return "motion";
    case Modality::Social: return "social";
    case Modality::Location: return "location";
    case Modality::Kccq: return "kccq";
  }
  return "?";
}

bool FeatureRow::has(Modality m) const {
  switch (m) {
    case Modality::Motion: return motion.has_value();
    case Modality::Social: return social.has_value();
    case Modality::Location: return geo.has_value();
    case Modality::Kccq: return kccq.has_value();
  }
  return false;
}

const std::vector<std::string>& FeatureTable::motion_feature_names() {
  static const std::vector<std::string> names = {"act_mean", "act_std",  "act_mode",
                                                 "act_skew", "act_kurt", "act_comp"};
  return names;
}

const std::vector<std::string>& FeatureTable::social_feature_names() {
  static const std::vector<std::string> names = {"numCalls", "durCalls", "durCalls_std",
                                                 "durNoCalls", "durNoCalls_std"};
  return names;
}

const std::vector<std::string>& FeatureTable::geo_feature_names() {
  static const std::vector<std::string> names = {"atHome", "distToHome", "zone1", "zone2"};
  return names;
}

std::vector<std::string> FeatureTable::feature_names(Modality m) const {
  switch (m) {
    case Modality::Motion: return motion_feature_names();
    case Modality::Social: return social_feature_names();
    case Modality::Location: return geo_feature_names();
    case Modality::Kccq: return kccq_names;
  }
  return {};
}

std::vector<std::string> FeatureTable::all_feature_names() const {
  std::vector<std::string> names;
  for (Modality m : {Modality::Motion, Modality::Social, Modality::Location, Modality::Kccq}) {
    const auto f = feature_names(m);
    names.insert(names.end(), f.begin(), f.end());
  }
  return names;
}

std::optional<double> FeatureTable::value(const FeatureRow& row, const std::string& f) const {
  if (f == "act_mean") return row.motion ? std::optional(row.motion->mean) : std::nullopt;
  if (f == "act_std") return row.motion ? std::optional(row.motion->std) : std::nullopt;
  if (f == "act_mode") return row.motion ? std::optional(row.motion->mode) : std::nullopt;
  if (f == "act_skew") return row.motion ? std::optional(row.motion->skew) : std::nullopt;
  if (f == "act_kurt") return row.motion ? std::optional(row.motion->kurt) : std::nullopt;
  if (f == "act_comp") return row.motion ? std::optional(row.motion->comp) : std::nullopt;
  if (f == "numCalls") return row.social ? std::optional(row.social->num_calls) : std::nullopt;
  if (f == "durCalls") return row.social ? std::optional(row.social->dur_calls) : std::nullopt;
  if (f == "durCalls_std")
    return row.social ? std::optional(row.social->dur_calls_std) : std::nullopt;
  if (f == "durNoCalls")
    return row.social ? std::optional(row.social->dur_no_calls) : std::nullopt;
  if (f == "durNoCalls_std")
    return row.social ? std::optional(row.social->dur_no_calls_std) : std::nullopt;
  if (f == "atHome") return row.geo ? std::optional(row.geo->at_home) : std::nullopt;
  if (f == "distToHome") return row.geo ? std::optional(row.geo->dist_to_home) : std::nullopt;
  if (f == "zone1") return row.geo ? std::optional(row.geo->zone1) : std::nullopt;
  if (f == "zone2") return row.geo ? std::optional(row.geo->zone2) : std::nullopt;
  for (std::size_t i = 0; i < kccq_names.size(); ++i) {
    if (f == kccq_names[i]) {
      if (!row.kccq) return std::nullopt;
      return row.kccq->values.at(i);
    }
  }
  throw std::invalid_argument("unknown feature: " + f);
}

FeatureTable extract_features(std::span<const EventWindow> windows, const ExtractSpec& spec,
                              std::vector<std::vector<actigraphy::ActivityEpoch>>* epochs_out) {
  FeatureTable table;
  table.kccq_names = kccq::feature_names(spec.variant);
  table.rows.resize(windows.size());
  if (epochs_out) epochs_out->resize(windows.size());

  parallel_for(windows.size(), [&](std::size_t i) {
    const EventWindow& w = windows[i];
    FeatureRow row;
    row.participant_id = w.participant_id;
    row.event_id = w.event_id;
    row.label = static_cast<int>(w.event.label);
    row.overlaps_prior_event = w.overlaps_prior_event;
    row.short_lookback = w.short_lookback;

    auto epochs = actigraphy::window_epochs(w.accel, w.start, w.end, spec.accel_fs,
                                            spec.bp_low, spec.bp_high);
    row.motion = actigraphy::motion_features(epochs);
    row.social = context::social_features(w.calls, w.start, w.end, w.participant_has_any_calls);
    if (w.home) {
      row.geo = context::geo_features(w.locations, *w.home);
    }
    row.kccq = kccq::kccq_features(w.surveys, spec.variant);

    table.rows[i] = std::move(row);
    if (epochs_out) (*epochs_out)[i] = std::move(epochs);
  });
  return table;
}

void write_features_csv(const std::filesystem::path& path, const FeatureTable& table,
                        const ArtifactMeta& meta) {
  csv::Writer w(path);
  w.comment(meta.line());

  std::vector<std::string> header = {"participant_id", "event_id", "label",
                                     "overlaps_prior_event", "short_lookback"};
  const auto features = table.all_feature_names();
  header.insert(header.end(), features.begin(), features.end());
  w.row(header);

  for (const auto& row : table.rows) {
    std::vector<std::string> fields = {row.participant_id, row.event_id,
                                       csv::fmt(static_cast<std::int64_t>(row.label)),
                                       row.overlaps_prior_event ? "1" : "0",
                                       row.short_lookback ? "1" : "0"};
    for (const auto& f : features) {
      const auto v = table.value(row, f);
      fields.push_back(v ? csv::fmt(*v) : "");
    }
    w.row(fields);
  }
}

FeatureTable read_features_csv(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw std::runtime_error("missing file: " + path.string());
  }
  csv::Reader reader(path);
  std::string line;
  std::size_t line_no = 0;
  if (!reader.next(line, line_no)) {
    throw std::runtime_error("features: malformed header (empty file)");
  }
  const auto header = csv::split(line);
  const std::vector<std::string> fixed = {"participant_id", "event_id", "label",
                                          "overlaps_prior_event", "short_lookback"};
  if (header.size() < fixed.size()) throw std::runtime_error("features: malformed header");
  for (std::size_t i = 0; i < fixed.size(); ++i) {
    if (header[i] != fixed[i]) throw std::runtime_error("features: malformed header");
  }

  FeatureTable table;
  // Feature columns follow the fixed block; kccq columns are whatever the
  // extraction variant produced.
  std::vector<std::string> feature_cols(header.begin() + fixed.size(), header.end());
  for (const auto& c : feature_cols) {
    if (c.rfind("kccq_", 0) == 0) table.kccq_names.push_back(c);
  }

  const auto& motion_names = FeatureTable::motion_feature_names();
  const auto& social_names = FeatureTable::social_feature_names();
  const auto& geo_names = FeatureTable::geo_feature_names();

  while (reader.next(line, line_no)) {
    if (csv::trim(line).empty()) continue;
    const auto fields = csv::split(line);
    if (fields.size() != header.size()) {
      throw std::runtime_error("features: wrong field count at line " + std::to_string(line_no));
    }
    FeatureRow row;
    row.participant_id = fields[0];
    row.event_id = fields[1];
    std::int64_t label = 0;
    if (!csv::parse_i64(fields[2], label) || (label != 0 && label != 1)) {
      throw std::runtime_error("features: bad label at line " + std::to_string(line_no));
    }
    row.label = static_cast<int>(label);
    row.overlaps_prior_event = fields[3] == "1";
    row.short_lookback = fields[4] == "1";

    std::map<std::string, std::optional<double>> values;
    for (std::size_t i = 0; i < feature_cols.size(); ++i) {
      const std::string& cell = fields[fixed.size() + i];
      if (cell.empty()) {
        values[feature_cols[i]] = std::nullopt;
      } else {
        double v = 0.0;
        if (!csv::parse_double(cell, v)) {
          throw std::runtime_error("features: bad value at line " + std::to_string(line_no));
        }
        values[feature_cols[i]] = v;
      }
    }

    auto all_present = [&](const std::vector<std::string>& names) {
      for (const auto& n : names) {
        auto it = values.find(n);
        if (it == values.end() || !it->second) return false;
      }
      return !names.empty();
    };

    if (all_present(motion_names)) {
      actigraphy::MotionFeatures m;
      m.mean = *values["act_mean"];
      m.std = *values["act_std"];
      m.mode = *values["act_mode"];
      m.skew = *values["act_skew"];
      m.kurt = *values["act_kurt"];
      m.comp = *values["act_comp"];
      row.motion = m;
    }
    if (all_present(social_names)) {
      context::SocialFeatures s;
      s.num_calls = *values["numCalls"];
      s.dur_calls = *values["durCalls"];
      s.dur_calls_std = *values["durCalls_std"];
      s.dur_no_calls = *values["durNoCalls"];
      s.dur_no_calls_std = *values["durNoCalls_std"];
      row.social = s;
    }
    if (all_present(geo_names)) {
      context::GeoFeatures g;
      g.at_home = *values["atHome"];
      g.dist_to_home = *values["distToHome"];
      g.zone1 = *values["zone1"];
      g.zone2 = *values["zone2"];
      row.geo = g;
    }
    if (all_present(table.kccq_names)) {
      kccq::KccqFeatures kf;
      kf.variant = table.kccq_names.size() == 1 ? kccq::Variant::SumRecent
                                                : kccq::Variant::AllRecent;
      for (const auto& n : table.kccq_names) kf.values.push_back(*values[n]);
      row.kccq = kf;
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

void write_epochs_csv(const std::filesystem::path& path,
                      std::span<const EventWindow> windows,
                      std::span<const std::vector<actigraphy::ActivityEpoch>> epochs,
                      const ArtifactMeta& meta) {
  csv::Writer w(path);
  w.comment(meta.line());
  w.row({"participant_id", "t_start_ms", "count", "present"});
  for (std::size_t i = 0; i < windows.size(); ++i) {
    for (const auto& e : epochs[i]) {
      w.row({windows[i].participant_id, csv::fmt(e.t_start), csv::fmt(e.count),
             e.present ? "1" : "0"});
    }
  }
}

}  // namespace hfsense::cohort
