#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hfsense/types.hpp"

namespace hfsense::kccq {

enum class Variant {
  SumRecent,  // summary score of the most recent in-window survey
  SumMean,    // mean of in-window summary scores
  AllRecent,  // four domain scores of the most recent survey
  AllMean,    // per-domain means over in-window surveys
};

Variant variant_from_string(const std::string& s);
std::string to_string(Variant v);

// Column names contributed to the feature table: {kccq_sum} or
// {kccq_phys, kccq_symp, kccq_qol, kccq_soc}.
std::vector<std::string> feature_names(Variant v);

struct KccqFeatures {
  Variant variant = Variant::SumRecent;
  std::vector<double> values;  // arity 1 or 4, aligned with feature_names()
};

// Arithmetic mean of the four domain scores; throws if any score is outside
// [0, 100].
double summary_score(double phys, double symp, double qol, double soc);

// nullopt when no survey falls inside the window. Surveys must be
// time-ordered; the most recent survey is the one with the latest timestamp.
std::optional<KccqFeatures> kccq_features(std::span<const KccqResponse> surveys_in_window,
                                          Variant v);

}  // namespace hfsense::kccq
