#pragma once

#include <span>
#include <string>
#include <vector>

#include "hfsense/learn.hpp"

namespace hfsense::explain {

// Hard cap for exact coalition enumeration (2^n value-function entries).
constexpr std::size_t kMaxExactFeatures = 20;

enum class Target {
  Probability,  // post-sigmoid model output
  LinearScore,  // pre-sigmoid score; closed form w_i * (x_i - mean_i)
};

struct ShapRow {
  std::string event_id;
  std::vector<double> phi;   // per-feature attribution
  double base_value = 0.0;   // mean model output over the background
  double model_output = 0.0;
};

// Exact interventional Shapley values: v(S) averages the model output over
// background rows with the features in S taken from x. Inputs are in the
// model's standardized space.
ShapRow shap_exact(const learn::LogisticModel& model, std::span<const double> x_std,
                   const learn::Matrix& background_std,
                   Target target = Target::Probability);

struct SummaryEntry {
  std::string feature;
  double mean_abs_phi = 0.0;
};

// Features ranked by mean |phi| descending; ties in stable name order.
std::vector<SummaryEntry> shap_summary(std::span<const ShapRow> rows,
                                       const std::vector<std::string>& feature_names);

}  // namespace hfsense::explain
