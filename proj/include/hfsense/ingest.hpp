#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "hfsense/meta.hpp"
#include "hfsense/types.hpp"

namespace hfsense::ingest {

struct StreamPaths {
  std::filesystem::path accel;
  std::filesystem::path calls;
  std::filesystem::path locations;
  std::filesystem::path kccq;
  std::filesystem::path events;
  static StreamPaths in_dir(const std::filesystem::path& dir);
};

struct Reject {
  std::string stream;
  std::size_t line_number = 0;  // 1-based, counting all physical lines
  std::string reason;
};

struct StreamCounts {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
};

struct IngestResult {
  Cohort cohort;  // sorted by participant_id; streams sorted by timestamp
  std::vector<Reject> rejects;
  std::map<std::string, StreamCounts> counts;
};

// Parses and validates the five stream files. Missing files and malformed
// headers are fatal; malformed rows go to the rejects report.
IngestResult parse_streams(const StreamPaths& paths);

std::uint64_t keyed_hash64(std::string_view salt, std::string_view data);

// Replaces participant and contact identifiers with keyed hashes and applies
// one rigid per-participant geographic offset (magnitude uniform in
// [5, 50] km) drawn deterministically from geo_seed. Timestamps, durations
// and within-participant location geometry are unchanged.
ParticipantDataset deidentify(const ParticipantDataset& d, std::string_view salt,
                              std::uint64_t geo_seed);
Cohort deidentify(const Cohort& cohort, std::string_view salt, std::uint64_t geo_seed);

void write_rejects_csv(const std::filesystem::path& path, const std::vector<Reject>& rejects,
                       const ArtifactMeta& meta);

// Canonical re-emission of the five stream schemas; shared by the synthetic
// generator and the ingest command.
void write_cohort_csvs(const std::filesystem::path& dir, const Cohort& cohort,
                       const ArtifactMeta& meta);

}  // namespace hfsense::ingest
