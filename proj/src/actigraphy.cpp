#include "hfsense/actigraphy.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <stdexcept>

namespace hfsense::actigraphy {

namespace {

using cplx = std::complex<double>;

// Cascade response at normalized angular frequency w (rad/sample), gain
// excluded.
cplx response_at(const std::vector<Biquad>& sections, double w) {
  const cplx z1 = std::exp(cplx(0.0, -w));
  const cplx z2 = z1 * z1;
  cplx h(1.0, 0.0);
  for (const auto& s : sections) {
    h *= (s.b0 + s.b1 * z1 + s.b2 * z2) / (1.0 + s.a1 * z1 + s.a2 * z2);
  }
  return h;
}

}  // namespace

Sos design_bandpass(double fs, double low_hz, double high_hz, bool* clamped) {
  if (fs <= 0.0) throw std::invalid_argument("fs must be positive");
  const double nyq_cap = 0.45 * fs;
  bool did_clamp = false;
  if (high_hz > nyq_cap) {
    high_hz = nyq_cap;
    did_clamp = true;
  }
  if (clamped) *clamped = did_clamp;
  if (!(low_hz > 0.0 && low_hz < high_hz)) {
    throw std::invalid_argument("invalid band edges after clamping");
  }

  // Bilinear prewarp.
  const double k = 2.0 * fs;
  const double w1 = k * std::tan(M_PI * low_hz / fs);
  const double w2 = k * std::tan(M_PI * high_hz / fs);
  const double w0 = std::sqrt(w1 * w2);
  const double bw = w2 - w1;

  // Order-3 Butterworth prototype poles, then low-pass -> band-pass.
  constexpr int N = 3;
  std::vector<cplx> apoles;
  for (int i = 1; i <= N; ++i) {
    const double theta = M_PI * (2.0 * i + N - 1.0) / (2.0 * N);
    const cplx p(std::cos(theta), std::sin(theta));
    const cplx q = p * (bw / 2.0);
    const cplx disc = std::sqrt(q * q - w0 * w0);
    apoles.push_back(q + disc);
    apoles.push_back(q - disc);
  }

  // Bilinear transform of the poles; zeros map to +1 (x3) and -1 (x3).
  std::vector<cplx> zpoles;
  zpoles.reserve(apoles.size());
  for (const auto& s : apoles) {
    zpoles.push_back((k + s) / (k - s));
  }

  // Group into conjugate pairs. Poles arrive as conjugate pairs by
  // construction; real poles (wide relative bands) are paired together.
  constexpr double tol = 1e-10;
  std::vector<cplx> upper;
  std::vector<double> reals;
  for (const auto& p : zpoles) {
    if (p.imag() > tol) {
      upper.push_back(p);
    } else if (p.imag() >= -tol) {
      reals.push_back(p.real());
    }
  }
  std::sort(upper.begin(), upper.end(),
            [](const cplx& a, const cplx& b) {
              return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
            });
  std::sort(reals.begin(), reals.end());
  if (upper.size() * 2 + reals.size() != zpoles.size() || reals.size() % 2 != 0) {
    throw std::runtime_error("butterworth pole pairing failed");
  }

  Sos sos;
  for (const auto& p : upper) {
    Biquad s;
    s.b0 = 1.0;
    s.b1 = 0.0;
    s.b2 = -1.0;  // one (1 - z^-2) factor: zeros at +1 and -1
    s.a1 = -2.0 * p.real();
    s.a2 = std::norm(p);
    sos.sections.push_back(s);
  }
  for (std::size_t i = 0; i + 1 < reals.size(); i += 2) {
    Biquad s;
    s.b0 = 1.0;
    s.b1 = 0.0;
    s.b2 = -1.0;
    s.a1 = -(reals[i] + reals[i + 1]);
    s.a2 = reals[i] * reals[i + 1];
    sos.sections.push_back(s);
  }

  // Unit gain at the digital center frequency.
  const double fc = fs / M_PI * std::atan(w0 / k);
  const double wc = 2.0 * M_PI * fc / fs;
  const double mag = std::abs(response_at(sos.sections, wc));
  sos.gain = 1.0 / mag;
  sos.center_hz = fc;
  return sos;
}

std::vector<double> sosfilt(const Sos& sos, std::span<const double> x) {
  std::vector<double> y(x.begin(), x.end());
  for (const auto& s : sos.sections) {
    double d1 = 0.0, d2 = 0.0;  // direct form II transposed state
    for (double& v : y) {
      const double in = v;
      const double out = s.b0 * in + d1;
      d1 = s.b1 * in - s.a1 * out + d2;
      d2 = s.b2 * in - s.a2 * out;
      v = out;
    }
  }
  for (double& v : y) v *= sos.gain;
  return y;
}

std::vector<double> filtfilt(const Sos& sos, std::span<const double> x) {
  std::vector<double> y = sosfilt(sos, x);
  std::reverse(y.begin(), y.end());
  y = sosfilt(sos, y);
  std::reverse(y.begin(), y.end());
  return y;
}

std::vector<double> bandpass_filter(std::span<const double> x, double fs, double low_hz,
                                    double high_hz) {
  const Sos sos = design_bandpass(fs, low_hz, high_hz);
  return filtfilt(sos, x);
}

std::vector<FilteredSample> filter_stream(std::span<const AccelSample> accel, double fs,
                                          double low_hz, double high_hz) {
  std::vector<FilteredSample> out;
  if (accel.empty()) return out;
  const Sos sos = design_bandpass(fs, low_hz, high_hz);
  const double gap_ms = 2.0 * 1000.0 / fs;

  std::size_t seg_start = 0;
  auto flush = [&](std::size_t begin, std::size_t end) {
    const std::size_t n = end - begin;
    if (n < static_cast<std::size_t>(3 * kSettleSamples)) return;  // unusable
    std::vector<double> z(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = accel[begin + i].z;
    const std::vector<double> f = filtfilt(sos, z);
    for (std::size_t i = 0; i < n; ++i) {
      out.push_back(FilteredSample{accel[begin + i].t, f[i]});
    }
  };

  for (std::size_t i = 1; i < accel.size(); ++i) {
    if (static_cast<double>(accel[i].t - accel[i - 1].t) > gap_ms) {
      flush(seg_start, i);
      seg_start = i;
    }
  }
  flush(seg_start, accel.size());
  return out;
}

std::vector<ActivityEpoch> epochize(std::span<const FilteredSample> samples,
                                    TimeMs grid_origin, std::size_t n_epochs) {
  std::vector<ActivityEpoch> epochs(n_epochs);
  for (std::size_t k = 0; k < n_epochs; ++k) {
    epochs[k].t_start = grid_origin + static_cast<TimeMs>(k) * kEpochMs;
  }
  if (n_epochs == 0) return epochs;

  // Per-second bin maxima of |value|; empty bins contribute 0.
  const std::size_t n_bins = n_epochs * 30;
  std::vector<double> bin_max(n_bins, 0.0);
  std::vector<bool> bin_used(n_bins, false);
  for (const auto& s : samples) {
    if (s.t < grid_origin) continue;
    const std::size_t bin = static_cast<std::size_t>((s.t - grid_origin) / kMsPerSecond);
    if (bin >= n_bins) continue;
    const double a = std::abs(s.value);
    if (!bin_used[bin] || a > bin_max[bin]) {
      bin_max[bin] = a;
      bin_used[bin] = true;
    }
    epochs[bin / 30].present = true;
  }
  for (std::size_t bin = 0; bin < n_bins; ++bin) {
    if (bin_used[bin]) epochs[bin / 30].count += bin_max[bin];
  }
  return epochs;
}

std::vector<ActivityEpoch> epochize(std::span<const double> filtered, double fs, TimeMs t0) {
  std::vector<FilteredSample> samples(filtered.size());
  for (std::size_t i = 0; i < filtered.size(); ++i) {
    samples[i].t = t0 + static_cast<TimeMs>(std::llround(static_cast<double>(i) * 1000.0 / fs));
    samples[i].value = filtered[i];
  }
  const std::size_t n_epochs =
      filtered.empty()
          ? 0
          : static_cast<std::size_t>((samples.back().t - t0) / kEpochMs) + 1;
  return epochize(samples, t0, n_epochs);
}

std::optional<MotionFeatures> motion_features(std::span<const ActivityEpoch> epochs) {
  if (epochs.empty()) return std::nullopt;

  std::vector<double> counts;
  counts.reserve(epochs.size());
  for (const auto& e : epochs) {
    if (e.present) counts.push_back(e.count);
  }

  MotionFeatures f;
  f.comp = static_cast<double>(counts.size()) / static_cast<double>(epochs.size());
  if (f.comp < kMissingThreshold) return std::nullopt;

  const double n = static_cast<double>(counts.size());
  double mean = 0.0;
  for (double c : counts) mean += c;
  mean /= n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double c : counts) {
    const double d = c - mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;

  f.mean = mean;
  f.std = std::sqrt(m2);
  if (m2 > 0.0) {
    f.skew = m3 / std::pow(m2, 1.5);
    f.kurt = m4 / (m2 * m2);
  }

  // Mode on integer-rounded counts; frequency ties go to the smaller value.
  std::map<long long, std::size_t> freq;
  for (double c : counts) ++freq[std::llround(c)];
  long long mode = freq.begin()->first;
  std::size_t best = freq.begin()->second;
  for (const auto& [value, count] : freq) {
    if (count > best) {
      best = count;
      mode = value;
    }
  }
  f.mode = static_cast<double>(mode);
  return f;
}

std::vector<ActivityEpoch> window_epochs(std::span<const AccelSample> accel_in_window,
                                         TimeMs win_start, TimeMs win_end, double fs,
                                         double low_hz, double high_hz) {
  const std::size_t n_epochs = static_cast<std::size_t>((win_end - win_start) / kEpochMs);
  const auto filtered = filter_stream(accel_in_window, fs, low_hz, high_hz);
  return epochize(filtered, win_start, n_epochs);
}

}  // namespace hfsense::actigraphy
