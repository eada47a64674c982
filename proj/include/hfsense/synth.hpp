#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "hfsense/types.hpp"

namespace hfsense::synth {

// Synthetic-cohort parameters. Effect sizes shift the targeted generative
// parameters for decompensated pre-event spans; delta = 0 makes the classes
// exchangeable by construction.
struct CohortSpec {
  int n_participants = 28;
  int n_comp_events = 62;
  int n_decomp_events = 48;
  int enrollment_days = 330;
  int min_event_gap_days = 16;
  int first_event_day = 40;

  double accel_fs = 5.0;
  double runs_per_day = 1.0;   // sampled activity bursts per day
  int run_len_epochs = 10;     // contiguous 30 s epochs per burst
  int accel_days_before_event = 21;  // generation span ahead of each event

  double calls_per_day = 5.0;
  double call_dur_log_mu = 4.5;     // lognormal, ~90 s median
  double call_dur_log_sigma = 0.8;
  int n_contacts = 12;

  double home_pings_per_hour = 1.0;
  double excursions_per_day = 1.5;

  double survey_interval_days = 7.0;

  // Standardized-scale shifts applied inside decompensated effect spans.
  // Directions: higher motion amplitude, lower completeness, fewer but longer
  // calls, lower survey scores, fewer excursions.
  double delta_motion = 1.0;
  double delta_social = 1.0;
  double delta_kccq = 1.0;
  double delta_location = 0.5;
  int effect_days = 14;

  // Probability that a participant does not share a modality at all.
  double miss_accel = 0.10;
  double miss_calls = 0.15;
  double miss_location = 0.20;
  double miss_kccq = 0.15;

  std::uint64_t seed = 0;
};

// Serialized parameter record (cohort_spec.json payload and config hash
// input).
std::string spec_to_json(const CohortSpec& spec);

// Deterministic in-memory generation; writing then re-ingesting the files
// reproduces these streams exactly.
Cohort generate_cohort(const CohortSpec& spec);

// Writes the five ingest schemas plus cohort_spec.json.
void generate(const CohortSpec& spec, const std::filesystem::path& out_dir);

}  // namespace hfsense::synth
