#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hfsense/cohort.hpp"

namespace hfsense::learn {

using Matrix = std::vector<std::vector<double>>;

double sigmoid(double z);

// Per-feature standardization fitted on training rows only. Constant columns
// get std := 1 so centering maps them to all-zero inputs.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> std;
  void fit(const Matrix& X);
  std::vector<double> apply(std::span<const double> x) const;
  Matrix apply(const Matrix& X) const;
};

struct FitOptions {
  double l2 = 1.0;        // penalty on weights, bias unpenalized
  double grad_tol = 1e-8;  // max-norm convergence threshold
  int max_iter = 100;
};

struct LogisticModel {
  std::vector<std::string> feature_names;
  std::vector<double> weights;  // in standardized space
  double bias = 0.0;
  Standardizer scaler;

  double linear_score_std(std::span<const double> x_std) const;
  double predict_std(std::span<const double> x_std) const;
  double predict(std::span<const double> x_raw) const;  // standardizes first
};

// L2-regularized logistic NLL and its gradient; wb packs [weights..., bias].
// Exposed so the optimum and the gradient can be checked independently.
double logistic_loss(const Matrix& X, std::span<const int> y, std::span<const double> wb,
                     double l2);
std::vector<double> logistic_grad(const Matrix& X, std::span<const int> y,
                                  std::span<const double> wb, double l2);

// Damped Newton on an already-standardized design matrix (identity scaler).
LogisticModel fit_logistic_std(const Matrix& X_std, std::span<const int> y,
                               const FitOptions& opts = {},
                               std::vector<std::string> feature_names = {});
// Fits the scaler on X_raw, then optimizes in standardized space.
LogisticModel fit_logistic(const Matrix& X_raw, std::span<const int> y,
                           const FitOptions& opts = {},
                           std::vector<std::string> feature_names = {});

struct Metrics {
  double acc = 0.0;
  double auc = 0.0;
  double aucpr = 0.0;
  double ppv = 0.0;
  double tpr = 0.0;
};

// Pairwise concordance with ties counted 1/2 (computed via average ranks).
double auc_score(std::span<const double> probs, std::span<const int> labels);
// Average precision: rightward step interpolation over descending thresholds.
double aucpr_score(std::span<const double> probs, std::span<const int> labels);
Metrics compute_metrics(std::span<const double> probs, std::span<const int> labels,
                        double threshold = 0.5);

// Keeps every minority row and a seeded uniform sample of majority rows of
// the same size; returns sorted kept indices.
std::vector<std::size_t> undersample_majority(std::span<const int> labels, std::uint64_t seed);

// Greedy forward selection maximizing mean AUC over a participant-grouped
// inner cross-validation; ties go to the lexicographically first name.
std::vector<std::string> sffs_select(const cohort::FeatureTable& table,
                                     std::span<const std::size_t> train_rows,
                                     const std::vector<std::string>& candidates, int k,
                                     std::uint64_t seed, double l2 = 1.0);

enum class Fusion { None, Early, Late };
Fusion fusion_from_string(const std::string& s);
std::string to_string(Fusion f);

struct ExperimentSpec {
  std::vector<cohort::Modality> modalities;
  Fusion fusion = Fusion::Early;
  int sffs_k = 3;
  double l2 = 1.0;
  std::uint64_t seed = 0;
  int resample_repeats = 1;
  double threshold = 0.5;
};

struct Prediction {
  std::string event_id;
  double prob = 0.0;
  int label = 0;
};

struct FoldResult {
  std::string participant;
  bool skipped = false;
  std::string skip_reason;
  std::vector<Prediction> preds;
  // modality name -> features chosen by SFFS on this fold's training set
  std::map<std::string, std::vector<std::string>> selected;
  // scaler snapshot of the early/single-modality model (leakage checks)
  std::vector<std::string> scaler_features;
  std::vector<double> scaler_mean, scaler_std;
};

struct RepeatResult {
  Metrics pooled;
  std::vector<FoldResult> folds;
};

struct EvaluationReport {
  ExperimentSpec spec;
  Metrics pooled;  // mean over resample repeats (single repeat: that repeat)
  std::vector<RepeatResult> repeats;
  std::size_t n_rows = 0;
  std::size_t n_participants = 0;
  std::vector<std::string> warnings;
};

EvaluationReport loso_evaluate(const cohort::FeatureTable& table, const ExperimentSpec& spec);

// Per-fold early-fusion models (first resample repeat), for explanation
// workflows that need the trained model, its training rows and test rows.
struct FoldModel {
  std::string participant;
  bool skipped = false;
  LogisticModel model;
  std::vector<std::string> features;
  std::vector<std::size_t> train_rows;  // undersampled training rows
  std::vector<std::size_t> test_rows;
};
std::vector<FoldModel> loso_fold_models(const cohort::FeatureTable& table,
                                        const ExperimentSpec& spec);

struct SweepPoint {
  int shift_days = 0;
  Metrics metrics;
  EvaluationReport report;
};

// Rebuilds windows and re-evaluates per shift; extract.window.shift_days is
// overridden by each entry of shifts.
std::vector<SweepPoint> time_to_event_sweep(const Cohort& cohort, std::span<const int> shifts,
                                            const cohort::ExtractSpec& extract,
                                            const ExperimentSpec& spec);

}  // namespace hfsense::learn
