#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hfsense {

// All timestamps are UTC milliseconds since the Unix epoch.
using TimeMs = std::int64_t;

constexpr TimeMs kMsPerSecond = 1000;
constexpr TimeMs kMsPerMinute = 60 * kMsPerSecond;
constexpr TimeMs kMsPerHour = 60 * kMsPerMinute;
constexpr TimeMs kMsPerDay = 24 * kMsPerHour;
constexpr TimeMs kEpochMs = 30 * kMsPerSecond;  // actigraphy epoch length
constexpr int kEpochsPerDay = 2880;

struct AccelSample {
  TimeMs t = 0;
  double x = 0.0, y = 0.0, z = 0.0;  // acceleration in g
};

struct CallRecord {
  TimeMs t_start = 0;
  double duration_s = 0.0;
  std::uint64_t contact_id = 0;  // salted hash after de-identification
};

struct LocationPing {
  TimeMs t = 0;
  double lat = 0.0;  // degrees, [-90, 90]
  double lon = 0.0;  // degrees, [-180, 180]
};

struct KccqResponse {
  TimeMs t = 0;
  double phys = 0.0, symp = 0.0, qol = 0.0, soc = 0.0;  // domain scores, 0-100
  double summary = 0.0;                                 // mean of the four domains
};

enum class EventLabel : int {
  Compensated = 0,   // negative class
  Decompensated = 1  // positive class
};

struct ClinicalEvent {
  TimeMs t = 0;
  EventLabel label = EventLabel::Compensated;
};

// Per-participant streams. Each stream is independently time-ordered and may
// be empty (participants can stop sharing any data type).
struct ParticipantDataset {
  std::string participant_id;
  std::vector<AccelSample> accel;
  std::vector<CallRecord> calls;
  std::vector<LocationPing> locations;
  std::vector<KccqResponse> surveys;
  std::vector<ClinicalEvent> events;
};

using Cohort = std::vector<ParticipantDataset>;

}  // namespace hfsense
