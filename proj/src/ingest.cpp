#include "hfsense/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hfsense/csv.hpp"
#include "hfsense/rng.hpp"

namespace hfsense::ingest {

namespace fs = std::filesystem;

namespace {

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// Opens a stream file and validates its header. Throws on missing file or
// header mismatch.
csv::Reader open_stream(const fs::path& path, const std::string& stream,
                        const std::vector<std::string>& expected_cols) {
  if (!fs::exists(path)) {
    throw std::runtime_error("missing file: " + path.string());
  }
  csv::Reader reader(path);
  std::string line;
  std::size_t line_no = 0;
  if (!reader.next(line, line_no)) {
    throw std::runtime_error(stream + ": malformed header (empty file)");
  }
  const auto cols = csv::split(line);
  bool ok = cols.size() == expected_cols.size();
  for (std::size_t i = 0; ok && i < cols.size(); ++i) {
    ok = lower(cols[i]) == expected_cols[i];
  }
  if (!ok) {
    throw std::runtime_error(stream + ": malformed header in " + path.string());
  }
  return reader;
}

struct StreamParser {
  std::map<std::string, ParticipantDataset>& by_id;
  IngestResult& result;

  ParticipantDataset& dataset_for(const std::string& pid) {
    auto [it, inserted] = by_id.try_emplace(pid);
    if (inserted) it->second.participant_id = pid;
    return it->second;
  }

  // fn(fields) parses one row, appending to the owning dataset only on
  // success; it returns an empty string on success, a reject reason otherwise.
  template <typename RowFn>
  void run(csv::Reader& reader, const std::string& stream, std::size_t n_cols, RowFn&& fn) {
    StreamCounts& counts = result.counts[stream];
    std::string line;
    std::size_t line_no = 0;
    while (reader.next(line, line_no)) {
      if (csv::trim(line).empty()) continue;
      const auto fields = csv::split(line);
      std::string reason;
      if (fields.size() != n_cols) {
        reason = "wrong field count";
      } else if (fields[0].empty()) {
        reason = "empty participant_id";
      } else {
        reason = fn(fields);
      }
      if (reason.empty()) {
        ++counts.accepted;
      } else {
        result.rejects.push_back({stream, line_no, reason});
        ++counts.rejected;
      }
    }
  }
};

// Unit-sphere geometry for the rigid location offset.
struct Vec3 {
  double x, y, z;
};

Vec3 to_unit(double lat_deg, double lon_deg) {
  const double phi = lat_deg * M_PI / 180.0;
  const double lam = lon_deg * M_PI / 180.0;
  return {std::cos(phi) * std::cos(lam), std::cos(phi) * std::sin(lam), std::sin(phi)};
}

Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

Vec3 normalize(const Vec3& v) {
  const double n = std::sqrt(dot(v, v));
  return {v.x / n, v.y / n, v.z / n};
}

Vec3 rotate(const Vec3& v, const Vec3& axis, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  const Vec3 kxv = cross(axis, v);
  const double kv = dot(axis, v);
  return {v.x * c + kxv.x * s + axis.x * kv * (1.0 - c),
          v.y * c + kxv.y * s + axis.y * kv * (1.0 - c),
          v.z * c + kxv.z * s + axis.z * kv * (1.0 - c)};
}

}  // namespace

IngestResult parse_streams(const StreamPaths& paths) {
  IngestResult result;
  std::map<std::string, ParticipantDataset> by_id;
  StreamParser p{by_id, result};

  {
    auto r = open_stream(paths.accel, "accel", {"participant_id", "t_ms", "x_g", "y_g", "z_g"});
    p.run(r, "accel", 5, [&p](const std::vector<std::string>& f) {
      AccelSample s;
      if (!csv::parse_i64(f[1], s.t)) return "bad t_ms";
      if (!csv::parse_double(f[2], s.x)) return "bad x_g";
      if (!csv::parse_double(f[3], s.y)) return "bad y_g";
      if (!csv::parse_double(f[4], s.z)) return "bad z_g";
      p.dataset_for(f[0]).accel.push_back(s);
      return "";
    });
  }
  {
    auto r = open_stream(paths.calls, "calls",
                         {"participant_id", "t_ms", "duration_s", "contact_id"});
    p.run(r, "calls", 4, [&p](const std::vector<std::string>& f) {
      CallRecord c;
      if (!csv::parse_i64(f[1], c.t_start)) return "bad t_ms";
      if (!csv::parse_double(f[2], c.duration_s)) return "bad duration_s";
      if (c.duration_s < 0.0) return "duration negative";
      if (!csv::parse_u64(f[3], c.contact_id)) return "bad contact_id";
      p.dataset_for(f[0]).calls.push_back(c);
      return "";
    });
  }
  {
    auto r = open_stream(paths.locations, "locations",
                         {"participant_id", "t_ms", "lat_deg", "lon_deg"});
    p.run(r, "locations", 4, [&p](const std::vector<std::string>& f) {
      LocationPing ping;
      if (!csv::parse_i64(f[1], ping.t)) return "bad t_ms";
      if (!csv::parse_double(f[2], ping.lat)) return "bad lat_deg";
      if (!csv::parse_double(f[3], ping.lon)) return "bad lon_deg";
      if (ping.lat < -90.0 || ping.lat > 90.0) return "lat out of range";
      if (ping.lon < -180.0 || ping.lon > 180.0) return "lon out of range";
      p.dataset_for(f[0]).locations.push_back(ping);
      return "";
    });
  }
  {
    auto r = open_stream(paths.kccq, "kccq",
                         {"participant_id", "t_ms", "phys", "symp", "qol", "soc"});
    p.run(r, "kccq", 6,
          [&p](const std::vector<std::string>& f) -> std::string {
            KccqResponse s;
            if (!csv::parse_i64(f[1], s.t)) return "bad t_ms";
            const char* names[] = {"phys", "symp", "qol", "soc"};
            double* dest[] = {&s.phys, &s.symp, &s.qol, &s.soc};
            for (int i = 0; i < 4; ++i) {
              if (!csv::parse_double(f[static_cast<std::size_t>(i) + 2], *dest[i])) {
                return std::string("bad ") + names[i];
              }
            }
            for (int i = 0; i < 4; ++i) {
              if (*dest[i] < 0.0 || *dest[i] > 100.0) {
                return std::string(names[i]) + " out of range";
              }
            }
            s.summary = (s.phys + s.symp + s.qol + s.soc) / 4.0;
            p.dataset_for(f[0]).surveys.push_back(s);
            return "";
          });
  }
  {
    auto r = open_stream(paths.events, "events", {"participant_id", "t_ms", "label"});
    p.run(r, "events", 3, [&p](const std::vector<std::string>& f) {
      ClinicalEvent e;
      if (!csv::parse_i64(f[1], e.t)) return "bad t_ms";
      const std::string label = lower(f[2]);
      if (label == "compensated") {
        e.label = EventLabel::Compensated;
      } else if (label == "decompensated") {
        e.label = EventLabel::Decompensated;
      } else {
        return "unknown label";
      }
      p.dataset_for(f[0]).events.push_back(e);
      return "";
    });
  }

  for (auto& [pid, d] : by_id) {
    std::stable_sort(d.accel.begin(), d.accel.end(),
                     [](const auto& a, const auto& b) { return a.t < b.t; });
    std::stable_sort(d.calls.begin(), d.calls.end(),
                     [](const auto& a, const auto& b) { return a.t_start < b.t_start; });
    std::stable_sort(d.locations.begin(), d.locations.end(),
                     [](const auto& a, const auto& b) { return a.t < b.t; });
    std::stable_sort(d.surveys.begin(), d.surveys.end(),
                     [](const auto& a, const auto& b) { return a.t < b.t; });
    std::stable_sort(d.events.begin(), d.events.end(),
                     [](const auto& a, const auto& b) { return a.t < b.t; });
    result.cohort.push_back(std::move(d));
  }
  return result;
}

std::uint64_t keyed_hash64(std::string_view salt, std::string_view data) {
  std::uint64_t h = fnv1a64(salt);
  h = fnv1a64(data, h);
  return splitmix64(h);  // avalanche
}

ParticipantDataset deidentify(const ParticipantDataset& d, std::string_view salt,
                              std::uint64_t geo_seed) {
  if (salt.empty()) throw std::invalid_argument("deidentify: salt must be non-empty");

  ParticipantDataset out = d;
  out.participant_id = to_hex16(keyed_hash64(salt, d.participant_id));
  for (auto& c : out.calls) {
    c.contact_id = keyed_hash64(salt, csv::fmt(c.contact_id));
  }

  if (!out.locations.empty()) {
    // One rigid rotation of the sphere per participant: an isometry, so all
    // within-participant distances are preserved exactly.
    Rng rng(mix_seed(geo_seed, fnv1a64(d.participant_id)));
    const double bearing = rng.uniform(0.0, 2.0 * M_PI);
    const double dist_km = rng.uniform(5.0, 50.0);
    const double angle = dist_km / 6371.0;

    const auto& p0 = out.locations.front();
    const Vec3 u = to_unit(p0.lat, p0.lon);
    const double phi = p0.lat * M_PI / 180.0;
    const double lam = p0.lon * M_PI / 180.0;
    const Vec3 north{-std::sin(phi) * std::cos(lam), -std::sin(phi) * std::sin(lam),
                     std::cos(phi)};
    const Vec3 east{-std::sin(lam), std::cos(lam), 0.0};
    const Vec3 dir{std::cos(bearing) * north.x + std::sin(bearing) * east.x,
                   std::cos(bearing) * north.y + std::sin(bearing) * east.y,
                   std::cos(bearing) * north.z + std::sin(bearing) * east.z};
    const Vec3 axis = normalize(cross(u, dir));

    for (auto& ping : out.locations) {
      const Vec3 v = rotate(to_unit(ping.lat, ping.lon), axis, angle);
      ping.lat = std::asin(std::clamp(v.z, -1.0, 1.0)) * 180.0 / M_PI;
      ping.lon = std::atan2(v.y, v.x) * 180.0 / M_PI;
    }
  }
  return out;
}

Cohort deidentify(const Cohort& cohort, std::string_view salt, std::uint64_t geo_seed) {
  Cohort out;
  out.reserve(cohort.size());
  for (const auto& d : cohort) out.push_back(deidentify(d, salt, geo_seed));
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.participant_id < b.participant_id; });
  return out;
}

void write_rejects_csv(const fs::path& path, const std::vector<Reject>& rejects,
                       const ArtifactMeta& meta) {
  csv::Writer w(path);
  w.comment(meta.line());
  w.row({"stream", "line_number", "reason"});
  for (const auto& r : rejects) {
    w.row({r.stream, csv::fmt(static_cast<std::uint64_t>(r.line_number)), r.reason});
  }
}

void write_cohort_csvs(const fs::path& dir, const Cohort& cohort, const ArtifactMeta& meta) {
  fs::create_directories(dir);

  csv::Writer accel(dir / "accel.csv");
  accel.comment(meta.line());
  accel.row({"participant_id", "t_ms", "x_g", "y_g", "z_g"});
  csv::Writer calls(dir / "calls.csv");
  calls.comment(meta.line());
  calls.row({"participant_id", "t_ms", "duration_s", "contact_id"});
  csv::Writer locations(dir / "locations.csv");
  locations.comment(meta.line());
  locations.row({"participant_id", "t_ms", "lat_deg", "lon_deg"});
  csv::Writer kccq(dir / "kccq.csv");
  kccq.comment(meta.line());
  kccq.row({"participant_id", "t_ms", "phys", "symp", "qol", "soc"});
  csv::Writer events(dir / "events.csv");
  events.comment(meta.line());
  events.row({"participant_id", "t_ms", "label"});

  for (const auto& d : cohort) {
    for (const auto& s : d.accel) {
      accel.row({d.participant_id, csv::fmt(s.t), csv::fmt(s.x), csv::fmt(s.y), csv::fmt(s.z)});
    }
    for (const auto& c : d.calls) {
      calls.row({d.participant_id, csv::fmt(c.t_start), csv::fmt(c.duration_s),
                 csv::fmt(c.contact_id)});
    }
    for (const auto& ping : d.locations) {
      locations.row({d.participant_id, csv::fmt(ping.t), csv::fmt(ping.lat), csv::fmt(ping.lon)});
    }
    for (const auto& s : d.surveys) {
      kccq.row({d.participant_id, csv::fmt(s.t), csv::fmt(s.phys), csv::fmt(s.symp),
                csv::fmt(s.qol), csv::fmt(s.soc)});
    }
    for (const auto& e : d.events) {
      events.row({d.participant_id, csv::fmt(e.t),
                  e.label == EventLabel::Decompensated ? "decompensated" : "compensated"});
    }
  }
}

}  // namespace hfsense::ingest
