#pragma once

#include <optional>
#include <span>
#include <vector>

#include "hfsense/types.hpp"

namespace hfsense::actigraphy {

// Window fraction below which the motion modality is treated as missing.
constexpr double kMissingThreshold = 0.001;
// Segments shorter than 3x this settling length are unusable for filtering.
constexpr int kSettleSamples = 50;
constexpr double kDefaultLowHz = 0.25;
constexpr double kDefaultHighHz = 11.0;

struct ActivityEpoch {
  TimeMs t_start = 0;
  double count = 0.0;
  bool present = false;  // at least one usable sample fell inside the epoch
};

struct MotionFeatures {
  double mean = 0.0;
  double std = 0.0;
  double mode = 0.0;
  double skew = 0.0;
  double kurt = 0.0;
  double comp = 0.0;  // fraction of present epochs
};

// One second-order section, a0 normalized to 1.
struct Biquad {
  double b0 = 0.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;
};

struct Sos {
  std::vector<Biquad> sections;
  double gain = 1.0;       // applied once per pass
  double center_hz = 0.0;  // geometric passband center (digital), unit gain here
};

// 3rd-order Butterworth band-pass via bilinear transform. The upper cutoff is
// clamped to 0.45*fs when the requested value is not realizable at fs; the
// clamp is reported through the optional flag.
Sos design_bandpass(double fs, double low_hz, double high_hz, bool* clamped = nullptr);

// Single forward pass, zero initial state.
std::vector<double> sosfilt(const Sos& sos, std::span<const double> x);
// Forward-backward pass (zero phase); output length equals input length.
std::vector<double> filtfilt(const Sos& sos, std::span<const double> x);

// Convenience wrapper over design + filtfilt for one gap-free segment.
std::vector<double> bandpass_filter(std::span<const double> x, double fs, double low_hz,
                                    double high_hz);

struct FilteredSample {
  TimeMs t = 0;
  double value = 0.0;
};

// Splits the stream into contiguous segments (gap > 2/fs breaks a segment),
// drops segments shorter than 3x the settling length, and band-passes the
// z-axis of each remaining segment.
std::vector<FilteredSample> filter_stream(std::span<const AccelSample> accel, double fs,
                                          double low_hz = kDefaultLowHz,
                                          double high_hz = kDefaultHighHz);

// Activity counts on a 30 s grid anchored at grid_origin: per epoch, the sum
// over its 30 one-second bins of the bin's max |value|. Samples outside the
// grid are ignored.
std::vector<ActivityEpoch> epochize(std::span<const FilteredSample> samples,
                                    TimeMs grid_origin, std::size_t n_epochs);

// Contiguous-sequence overload: sample i is at t0 + i/fs.
std::vector<ActivityEpoch> epochize(std::span<const double> filtered, double fs, TimeMs t0);

// Moment features over present-epoch counts; nullopt when the window is
// missing per kMissingThreshold or empty.
std::optional<MotionFeatures> motion_features(std::span<const ActivityEpoch> epochs);

// Full per-window chain: segment, filter, epochize onto the window grid.
std::vector<ActivityEpoch> window_epochs(std::span<const AccelSample> accel_in_window,
                                         TimeMs win_start, TimeMs win_end, double fs,
                                         double low_hz = kDefaultLowHz,
                                         double high_hz = kDefaultHighHz);

}  // namespace hfsense::actigraphy
