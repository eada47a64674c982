#include "hfsense/explain.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace hfsense::explain {

namespace {

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) {
    r *= static_cast<double>(n - k + i) / static_cast<double>(i);
  }
  return r;
}

}  // namespace

ShapRow shap_exact(const learn::LogisticModel& model, std::span<const double> x_std,
                   const learn::Matrix& background, Target target) {
  const std::size_t n = model.weights.size();
  if (x_std.size() != n) throw std::invalid_argument("shap: feature count mismatch");
  if (n > kMaxExactFeatures) {
    throw std::invalid_argument("shap: exact mode supports at most 20 features");
  }
  if (background.empty()) throw std::invalid_argument("shap: empty background");

  const std::size_t n_masks = std::size_t{1} << n;
  const double inv_b = 1.0 / static_cast<double>(background.size());

  auto link = [&](double z) {
    return target == Target::Probability ? learn::sigmoid(z) : z;
  };

  // v[mask] = mean over background of the model output with coalition
  // features taken from x. Computed per background row via the lowest-bit
  // recurrence z[mask] = z[mask \ lowbit] + w_i (x_i - b_i).
  std::vector<double> v(n_masks, 0.0);
  std::vector<double> z(n_masks, 0.0);
  for (const auto& b : background) {
    double z0 = model.bias;
    for (std::size_t j = 0; j < n; ++j) z0 += model.weights[j] * b[j];
    z[0] = z0;
    v[0] += link(z0) * inv_b;
    std::vector<double> delta(n);
    for (std::size_t j = 0; j < n; ++j) delta[j] = model.weights[j] * (x_std[j] - b[j]);
    for (std::size_t mask = 1; mask < n_masks; ++mask) {
      const unsigned low = static_cast<unsigned>(std::countr_zero(mask));
      z[mask] = z[mask & (mask - 1)] + delta[low];
      v[mask] += link(z[mask]) * inv_b;
    }
  }

  // phi_i = sum over S not containing i of |S|!(n-|S|-1)!/n! (v(S+i) - v(S)).
  std::vector<double> weight_by_size(n);
  for (std::size_t s = 0; s < n; ++s) {
    weight_by_size[s] =
        1.0 / (static_cast<double>(n) * binom(static_cast<int>(n) - 1, static_cast<int>(s)));
  }

  ShapRow row;
  row.phi.assign(n, 0.0);
  for (std::size_t mask = 0; mask < n_masks; ++mask) {
    const int size = std::popcount(mask);
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (std::size_t{1} << i)) continue;
      row.phi[i] += weight_by_size[static_cast<std::size_t>(size)] *
                    (v[mask | (std::size_t{1} << i)] - v[mask]);
    }
  }
  row.base_value = v[0];
  row.model_output = v[n_masks - 1];
  return row;
}

std::vector<SummaryEntry> shap_summary(std::span<const ShapRow> rows,
                                       const std::vector<std::string>& feature_names) {
  if (rows.empty()) throw std::invalid_argument("shap_summary: no rows");
  const std::size_t n = feature_names.size();
  std::vector<SummaryEntry> entries(n);
  for (std::size_t j = 0; j < n; ++j) {
    entries[j].feature = feature_names[j];
    for (const auto& r : rows) entries[j].mean_abs_phi += std::abs(r.phi[j]);
    entries[j].mean_abs_phi /= static_cast<double>(rows.size());
  }
  std::stable_sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    if (a.mean_abs_phi != b.mean_abs_phi) return a.mean_abs_phi > b.mean_abs_phi;
    return a.feature < b.feature;
  });
  return entries;
}

}  // namespace hfsense::explain
