#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hfsense/actigraphy.hpp"
#include "hfsense/rng.hpp"
#include "hfsense/types.hpp"

namespace hfsense::har {

constexpr double kWindowSeconds = 2.56;
constexpr int kMinWindowSamples = 6;
constexpr std::size_t kSubwindowEpochs = 600;  // 5 hours of 30 s epochs

// 1..6 raw activity codes -> 1 (ambulatory) / 0 (sedentary). Throws on
// anything else.
int merge_har_labels(int raw_label);

using Features = std::array<double, 6>;  // mean x/y/z then std x/y/z

struct HarData {
  std::vector<Features> X;
  std::vector<int> y;        // binary after merge
  std::vector<int> subject;
};

// Reads the public HAR dataset layout: raw inertial signal files (128
// samples per row), y_<split>.txt and subject_<split>.txt.
// channel_prefix is "body_acc" or "total_acc".
HarData load_har_split(const std::filesystem::path& root, const std::string& split,
                       const std::string& channel_prefix = "body_acc");

Features window_features(std::span<const double> x, std::span<const double> y,
                         std::span<const double> z);

struct TreeNode {
  int feature = -1;       // -1 marks a leaf
  double threshold = 0.0;
  int left = -1, right = -1;
  double p1 = 0.0;  // leaf fraction of class 1
};

struct Tree {
  std::vector<TreeNode> nodes;
  double predict_proba(const Features& x) const;
};

struct ForestOptions {
  int n_trees = 100;
  int mtry = 2;       // features considered per split (floor sqrt 6)
  int min_leaf = 2;
  bool bootstrap = true;
  std::uint64_t seed = 0;
};

struct ForestModel {
  std::vector<Tree> trees;
  ForestOptions options;
  double predict_proba(const Features& x) const;  // mean of leaf fractions
  int predict(const Features& x) const;           // proba >= 0.5
};

ForestModel train_forest(std::span<const Features> X, std::span<const int> y,
                         const ForestOptions& options);

enum class ModelKind { Forest, Logistic, DecisionTree };
std::string to_string(ModelKind k);

// Plain (ungrouped) k-fold accuracy over seeded shuffled rows.
double cross_val_accuracy(std::span<const Features> X, std::span<const int> y, int k_folds,
                          ModelKind kind, std::uint64_t seed);

// Strides 2.56 s windows with 50% overlap over contiguous sample runs and
// counts windows classified ambulatory. Windows shorter than
// kMinWindowSamples are skipped.
std::size_t walk_epochs(std::span<const AccelSample> accel, const ForestModel& model, double fs);

// Uniformly random contiguous 5-hour epoch span whose missingness does not
// exceed max_missing; nullopt after max_tries failures. Returns the start
// epoch index.
std::optional<std::size_t> sample_5h_subwindow(std::span<const actigraphy::ActivityEpoch> epochs,
                                               double max_missing, Rng& rng, int max_tries = 100);

struct UTestResult {
  double u = 0.0;
  double p = 1.0;
  std::size_t n1 = 0, n2 = 0;
};

// Two-sided Mann-Whitney U, normal approximation with tie correction and
// continuity correction. p is NaN when either group has fewer than 3 values.
UTestResult compare_groups(std::span<const double> a, std::span<const double> b);

void save_forest_json(const std::filesystem::path& path, const ForestModel& model,
                      std::uint64_t config_hash);
ForestModel load_forest_json(const std::filesystem::path& path);

}  // namespace hfsense::har
