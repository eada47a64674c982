#include "hfsense/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "hfsense/ingest.hpp"
#include "hfsense/meta.hpp"
#include "hfsense/rng.hpp"

namespace hfsense::synth {

namespace {

double quantize(double v, double step) { return std::round(v / step) * step; }

std::string participant_name(int i) {
  std::string n = std::to_string(i + 1);
  while (n.size() < 3) n.insert(n.begin(), '0');
  return "P" + n;
}

struct EffectSpans {
  // [start, end) spans of decompensated pre-event periods, ms
  std::vector<std::pair<TimeMs, TimeMs>> spans;
  bool active(TimeMs t) const {
    for (const auto& [a, b] : spans) {
      if (t >= a && t < b) return true;
    }
    return false;
  }
};

struct ParticipantPlan {
  int n_events = 0;
  std::vector<int> labels;  // dealt in time order
};

}  // namespace

std::string spec_to_json(const CohortSpec& s) {
  nlohmann::ordered_json j;
  j["n_participants"] = s.n_participants;
  j["n_comp_events"] = s.n_comp_events;
  j["n_decomp_events"] = s.n_decomp_events;
  j["enrollment_days"] = s.enrollment_days;
  j["min_event_gap_days"] = s.min_event_gap_days;
  j["first_event_day"] = s.first_event_day;
  j["accel_fs"] = s.accel_fs;
  j["runs_per_day"] = s.runs_per_day;
  j["run_len_epochs"] = s.run_len_epochs;
  j["accel_days_before_event"] = s.accel_days_before_event;
  j["calls_per_day"] = s.calls_per_day;
  j["call_dur_log_mu"] = s.call_dur_log_mu;
  j["call_dur_log_sigma"] = s.call_dur_log_sigma;
  j["n_contacts"] = s.n_contacts;
  j["home_pings_per_hour"] = s.home_pings_per_hour;
  j["excursions_per_day"] = s.excursions_per_day;
  j["survey_interval_days"] = s.survey_interval_days;
  j["delta_motion"] = s.delta_motion;
  j["delta_social"] = s.delta_social;
  j["delta_kccq"] = s.delta_kccq;
  j["delta_location"] = s.delta_location;
  j["effect_days"] = s.effect_days;
  j["miss_accel"] = s.miss_accel;
  j["miss_calls"] = s.miss_calls;
  j["miss_location"] = s.miss_location;
  j["miss_kccq"] = s.miss_kccq;
  j["seed"] = s.seed;
  return j.dump(1);
}

Cohort generate_cohort(const CohortSpec& spec) {
  if (spec.n_participants < 1) throw std::invalid_argument("n_participants must be >= 1");
  const int n_events_total = spec.n_comp_events + spec.n_decomp_events;
  if (n_events_total < 1) throw std::invalid_argument("no events requested");

  // Feasibility of event placement within the enrollment.
  const int per_participant_max =
      n_events_total / spec.n_participants + (n_events_total % spec.n_participants ? 1 : 0);
  const int needed_days =
      spec.first_event_day + (per_participant_max - 1) * spec.min_event_gap_days;
  if (needed_days > spec.enrollment_days - 2) {
    throw std::invalid_argument(
        "infeasible cohort spec: " + std::to_string(per_participant_max) +
        " events per participant at a " + std::to_string(spec.min_event_gap_days) +
        "-day minimum gap do not fit in " + std::to_string(spec.enrollment_days) +
        " enrollment days");
  }

  // Deal event counts and labels across participants up front so the label
  // sequence is independent of every generative parameter.
  std::vector<ParticipantPlan> plans(static_cast<std::size_t>(spec.n_participants));
  {
    Rng rng(mix_seed(spec.seed, 0xA11));
    std::vector<std::size_t> order(static_cast<std::size_t>(spec.n_participants));
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order);
    for (int e = 0; e < n_events_total; ++e) {
      plans[order[static_cast<std::size_t>(e) % order.size()]].n_events += 1;
    }

    std::vector<int> labels(static_cast<std::size_t>(spec.n_comp_events), 0);
    labels.insert(labels.end(), static_cast<std::size_t>(spec.n_decomp_events), 1);
    rng.shuffle(labels);
    std::size_t next = 0;
    for (auto& plan : plans) {
      for (int k = 0; k < plan.n_events; ++k) plan.labels.push_back(labels[next++]);
    }
  }

  const TimeMs t0 = 1704067200000;  // 2024-01-01T00:00:00Z
  const TimeMs enrollment_end = t0 + static_cast<TimeMs>(spec.enrollment_days) * kMsPerDay;

  Cohort cohort;
  for (int pi = 0; pi < spec.n_participants; ++pi) {
    Rng rng(mix_seed(spec.seed, 0xB00 + static_cast<std::uint64_t>(pi)));
    ParticipantDataset d;
    d.participant_id = participant_name(pi);

    // Participant-level draws, fixed order for determinism.
    const bool shares_accel = rng.real() >= spec.miss_accel;
    const bool shares_calls = rng.real() >= spec.miss_calls;
    const bool shares_location = rng.real() >= spec.miss_location;
    const bool shares_kccq = rng.real() >= spec.miss_kccq;

    const double home_lat = rng.uniform(25.0, 48.0);
    const double home_lon = rng.uniform(-122.0, -70.0);
    const double amp = rng.uniform(0.10, 0.35);           // z oscillation, g
    const double gait_hz = rng.uniform(1.1, 1.7);
    const double runs_rate = spec.runs_per_day * rng.uniform(0.8, 1.2);
    const double calls_rate = spec.calls_per_day * rng.uniform(0.7, 1.3);
    const double kccq_base = std::clamp(rng.normal(65.0, 10.0), 10.0, 95.0);
    std::vector<std::uint64_t> contacts(static_cast<std::size_t>(spec.n_contacts));
    for (auto& c : contacts) c = rng.u64() | 1u;

    // Event times: sorted uniform days with a minimum gap.
    const auto& plan = plans[static_cast<std::size_t>(pi)];
    std::vector<double> event_days;
    if (plan.n_events > 0) {
      const double lo = spec.first_event_day;
      const double hi = spec.enrollment_days - 2.0;
      bool placed = false;
      for (int attempt = 0; attempt < 1000 && !placed; ++attempt) {
        std::vector<double> days;
        for (int k = 0; k < plan.n_events; ++k) days.push_back(rng.uniform(lo, hi));
        std::sort(days.begin(), days.end());
        placed = true;
        for (std::size_t k = 1; k < days.size(); ++k) {
          if (days[k] - days[k - 1] < spec.min_event_gap_days) placed = false;
        }
        if (placed) event_days = std::move(days);
      }
      if (!placed) {
        throw std::runtime_error("infeasible cohort spec: could not place " +
                                 std::to_string(plan.n_events) +
                                 " events with the requested gap for " + d.participant_id);
      }
    }

    EffectSpans decomp_spans;
    std::vector<std::pair<TimeMs, TimeMs>> accel_spans;
    for (std::size_t k = 0; k < event_days.size(); ++k) {
      ClinicalEvent ev;
      ev.t = t0 + static_cast<TimeMs>(std::llround(
                     (event_days[k] + rng.uniform(10.0, 16.0) / 24.0) * kMsPerDay));
      ev.label = plan.labels[k] ? EventLabel::Decompensated : EventLabel::Compensated;
      d.events.push_back(ev);
      if (plan.labels[k]) {
        decomp_spans.spans.emplace_back(
            ev.t - static_cast<TimeMs>(spec.effect_days) * kMsPerDay, ev.t);
      }
      accel_spans.emplace_back(
          ev.t - static_cast<TimeMs>(spec.accel_days_before_event) * kMsPerDay, ev.t);
    }
    std::sort(d.events.begin(), d.events.end(),
              [](const auto& a, const auto& b) { return a.t < b.t; });

    // Accelerometer: bursts of contiguous 5 Hz sampling on days ahead of
    // events (merged across overlapping spans).
    if (shares_accel && !accel_spans.empty()) {
      std::vector<TimeMs> days;
      for (const auto& [a, b] : accel_spans) {
        for (TimeMs day = a - a % kMsPerDay; day < b; day += kMsPerDay) {
          if (day >= t0 && day < enrollment_end) days.push_back(day);
        }
      }
      std::sort(days.begin(), days.end());
      days.erase(std::unique(days.begin(), days.end()), days.end());

      const TimeMs dt = static_cast<TimeMs>(std::llround(1000.0 / spec.accel_fs));
      const int run_samples =
          static_cast<int>(std::llround(spec.run_len_epochs * 30.0 * spec.accel_fs));
      for (TimeMs day : days) {
        const bool in_effect = decomp_spans.active(day + kMsPerDay / 2);
        const double rate = runs_rate * (in_effect ? 1.0 - 0.25 * spec.delta_motion : 1.0);
        const double amp_mult = in_effect ? 1.0 + 0.35 * spec.delta_motion : 1.0;
        const int n_runs = rng.poisson(std::max(0.05, rate));
        std::vector<TimeMs> starts;
        for (int r = 0; r < n_runs; ++r) {
          starts.push_back(day + static_cast<TimeMs>(std::llround(
                                    rng.uniform(8.0, 21.0) * kMsPerHour)));
        }
        std::sort(starts.begin(), starts.end());
        const TimeMs run_ms = static_cast<TimeMs>(spec.run_len_epochs) * kEpochMs;
        TimeMs prev_end = std::numeric_limits<TimeMs>::min();
        for (TimeMs start : starts) {
          if (start < prev_end) continue;  // keep runs disjoint
          prev_end = start + run_ms;
          const double phase = rng.uniform(0.0, 2.0 * M_PI);
          for (int i = 0; i < run_samples; ++i) {
            AccelSample s;
            s.t = start + static_cast<TimeMs>(i) * dt;
            const double ts = static_cast<double>(i) / spec.accel_fs;
            const double osc = amp * amp_mult * std::sin(2.0 * M_PI * gait_hz * ts + phase);
            s.x = quantize(0.02 * rng.normal(), 1e-4);
            s.y = quantize(0.02 * rng.normal(), 1e-4);
            s.z = quantize(0.95 + osc + 0.03 * rng.normal(), 1e-4);
            d.accel.push_back(s);
          }
        }
      }
    }

    // Calls over the whole enrollment.
    if (shares_calls) {
      for (int day = 0; day < spec.enrollment_days; ++day) {
        const TimeMs day_start = t0 + static_cast<TimeMs>(day) * kMsPerDay;
        const bool in_effect = decomp_spans.active(day_start + kMsPerDay / 2);
        const double rate =
            std::max(0.2, calls_rate * (in_effect ? 1.0 - 0.30 * spec.delta_social : 1.0));
        const double mu =
            spec.call_dur_log_mu + (in_effect ? 0.40 * spec.delta_social : 0.0);
        const int n_calls = rng.poisson(rate);
        for (int c = 0; c < n_calls; ++c) {
          CallRecord call;
          call.t_start = day_start + static_cast<TimeMs>(std::llround(
                                        rng.uniform(7.0, 23.0) * kMsPerHour));
          call.duration_s = quantize(
              std::min(rng.lognormal(mu, spec.call_dur_log_sigma), 4.0 * 3600.0), 0.1);
          call.contact_id = contacts[rng.below(contacts.size())];
          d.calls.push_back(call);
        }
      }
      std::stable_sort(d.calls.begin(), d.calls.end(),
                       [](const auto& a, const auto& b) { return a.t_start < b.t_start; });
    }

    // Location pings: home dwell plus excursions; consecutive pings at least
    // five minutes apart.
    if (shares_location) {
      std::vector<LocationPing> pings;
      for (int day = 0; day < spec.enrollment_days; ++day) {
        const TimeMs day_start = t0 + static_cast<TimeMs>(day) * kMsPerDay;
        const bool in_effect = decomp_spans.active(day_start + kMsPerDay / 2);

        const int n_home = rng.poisson(spec.home_pings_per_hour * 16.0);
        for (int i = 0; i < n_home; ++i) {
          LocationPing p;
          p.t = day_start +
                static_cast<TimeMs>(std::llround(rng.uniform(6.0, 23.0) * kMsPerHour));
          p.lat = quantize(home_lat + rng.uniform(-3e-4, 3e-4), 1e-6);
          p.lon = quantize(home_lon + rng.uniform(-3e-4, 3e-4), 1e-6);
          pings.push_back(p);
        }

        const double exc_rate = std::max(
            0.1, spec.excursions_per_day * (in_effect ? 1.0 - 0.30 * spec.delta_location : 1.0));
        const int n_exc = rng.poisson(exc_rate);
        for (int e = 0; e < n_exc; ++e) {
          const bool near = rng.real() < 0.6;
          const double dist_km = near ? rng.uniform(0.3, 1.8) : rng.uniform(2.5, 15.0);
          const double bearing = rng.uniform(0.0, 2.0 * M_PI);
          const double dlat = dist_km / 111.195 * std::cos(bearing);
          const double dlon =
              dist_km / (111.195 * std::cos(home_lat * M_PI / 180.0)) * std::sin(bearing);
          const TimeMs start = day_start + static_cast<TimeMs>(std::llround(
                                              rng.uniform(8.0, 20.0) * kMsPerHour));
          const int n_pings = 2 + static_cast<int>(rng.below(4));
          for (int i = 0; i < n_pings; ++i) {
            LocationPing p;
            p.t = start + static_cast<TimeMs>(i) * (6 * kMsPerMinute);
            p.lat = quantize(home_lat + dlat + rng.uniform(-2e-4, 2e-4), 1e-6);
            p.lon = quantize(home_lon + dlon + rng.uniform(-2e-4, 2e-4), 1e-6);
            pings.push_back(p);
          }
        }
      }
      std::stable_sort(pings.begin(), pings.end(),
                       [](const auto& a, const auto& b) { return a.t < b.t; });
      // Enforce the minimum update interval.
      TimeMs last = std::numeric_limits<TimeMs>::min();
      for (const auto& p : pings) {
        if (p.t - last >= 5 * kMsPerMinute) {
          d.locations.push_back(p);
          last = p.t;
        }
      }
    }

    // Weekly-ish surveys.
    if (shares_kccq) {
      double day = 2.0 + rng.uniform(0.0, 2.0);
      while (day < spec.enrollment_days) {
        KccqResponse s;
        s.t = t0 + static_cast<TimeMs>(std::llround(day * kMsPerDay)) +
              static_cast<TimeMs>(std::llround(rng.uniform(9.0, 20.0) * kMsPerHour));
        const bool in_effect = decomp_spans.active(s.t);
        const double shift = in_effect ? 12.0 * spec.delta_kccq : 0.0;
        s.phys = quantize(std::clamp(kccq_base - shift + rng.normal(0.0, 8.0), 0.0, 100.0), 0.1);
        s.symp = quantize(std::clamp(kccq_base - shift + rng.normal(0.0, 8.0), 0.0, 100.0), 0.1);
        s.qol = quantize(std::clamp(kccq_base - shift + rng.normal(0.0, 8.0), 0.0, 100.0), 0.1);
        s.soc = quantize(std::clamp(kccq_base - shift + rng.normal(0.0, 8.0), 0.0, 100.0), 0.1);
        s.summary = (s.phys + s.symp + s.qol + s.soc) / 4.0;
        d.surveys.push_back(s);
        day += std::max(1.0, spec.survey_interval_days + rng.uniform(-1.5, 1.5));
      }
    }

    std::stable_sort(d.accel.begin(), d.accel.end(),
                     [](const auto& a, const auto& b) { return a.t < b.t; });
    cohort.push_back(std::move(d));
  }

  std::sort(cohort.begin(), cohort.end(),
            [](const auto& a, const auto& b) { return a.participant_id < b.participant_id; });
  return cohort;
}

void generate(const CohortSpec& spec, const std::filesystem::path& out_dir) {
  const Cohort cohort = generate_cohort(spec);
  const std::string spec_json = spec_to_json(spec);
  ArtifactMeta meta;
  meta.config_hash = fnv1a64(spec_json);
  meta.seed = spec.seed;
  std::filesystem::create_directories(out_dir);
  ingest::write_cohort_csvs(out_dir, cohort, meta);
  std::ofstream out(out_dir / "cohort_spec.json", std::ios::binary);
  if (!out) throw std::runtime_error("cannot write cohort_spec.json");
  out << spec_json << "\n";
}

}  // namespace hfsense::synth
