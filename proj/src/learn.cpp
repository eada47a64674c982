#include "hfsense/learn.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

#include "hfsense/parallel.hpp"
#include "hfsense/rng.hpp"

namespace hfsense::learn {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// log(1 + exp(z)) without overflow.
double log1pexp(double z) {
  if (z > 0.0) return z + std::log1p(std::exp(-z));
  return std::log1p(std::exp(z));
}

}  // namespace

double sigmoid(double z) {
  if (z >= 0.0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void Standardizer::fit(const Matrix& X) {
  if (X.empty()) throw std::invalid_argument("standardizer: empty matrix");
  const std::size_t n = X.size(), p = X[0].size();
  mean.assign(p, 0.0);
  std.assign(p, 0.0);
  for (const auto& row : X) {
    for (std::size_t j = 0; j < p; ++j) mean[j] += row[j];
  }
  for (std::size_t j = 0; j < p; ++j) mean[j] /= static_cast<double>(n);
  for (const auto& row : X) {
    for (std::size_t j = 0; j < p; ++j) {
      const double d = row[j] - mean[j];
      std[j] += d * d;
    }
  }
  for (std::size_t j = 0; j < p; ++j) {
    std[j] = std::sqrt(std[j] / static_cast<double>(n));
    if (std[j] == 0.0) std[j] = 1.0;  // constant feature: centered input stays 0
  }
}

std::vector<double> Standardizer::apply(std::span<const double> x) const {
  std::vector<double> out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) out[j] = (x[j] - mean[j]) / std[j];
  return out;
}

Matrix Standardizer::apply(const Matrix& X) const {
  Matrix out;
  out.reserve(X.size());
  for (const auto& row : X) out.push_back(apply(row));
  return out;
}

double LogisticModel::linear_score_std(std::span<const double> x_std) const {
  double z = bias;
  for (std::size_t j = 0; j < weights.size(); ++j) z += weights[j] * x_std[j];
  return z;
}

double LogisticModel::predict_std(std::span<const double> x_std) const {
  return sigmoid(linear_score_std(x_std));
}

double LogisticModel::predict(std::span<const double> x_raw) const {
  const auto x = scaler.apply(x_raw);
  return predict_std(x);
}

double logistic_loss(const Matrix& X, std::span<const int> y, std::span<const double> wb,
                     double l2) {
  const std::size_t p = wb.size() - 1;
  double loss = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    double z = wb[p];
    for (std::size_t j = 0; j < p; ++j) z += wb[j] * X[i][j];
    loss += log1pexp(z) - static_cast<double>(y[i]) * z;
  }
  for (std::size_t j = 0; j < p; ++j) loss += 0.5 * l2 * wb[j] * wb[j];
  return loss;
}

std::vector<double> logistic_grad(const Matrix& X, std::span<const int> y,
                                  std::span<const double> wb, double l2) {
  const std::size_t p = wb.size() - 1;
  std::vector<double> g(p + 1, 0.0);
  for (std::size_t i = 0; i < X.size(); ++i) {
    double z = wb[p];
    for (std::size_t j = 0; j < p; ++j) z += wb[j] * X[i][j];
    const double r = sigmoid(z) - static_cast<double>(y[i]);
    for (std::size_t j = 0; j < p; ++j) g[j] += r * X[i][j];
    g[p] += r;
  }
  for (std::size_t j = 0; j < p; ++j) g[j] += l2 * wb[j];
  return g;
}

LogisticModel fit_logistic_std(const Matrix& X, std::span<const int> y, const FitOptions& opts,
                               std::vector<std::string> feature_names) {
  if (X.empty() || X.size() != y.size()) {
    throw std::invalid_argument("fit_logistic: shape mismatch");
  }
  const std::size_t p = X[0].size();
  bool pos = false, neg = false;
  for (int label : y) (label ? pos : neg) = true;
  if (!pos || !neg) throw std::runtime_error("fit_logistic: single-class labels");
  for (const auto& row : X) {
    for (double v : row) {
      if (!std::isfinite(v)) throw std::runtime_error("fit_logistic: non-finite feature value");
    }
  }

  std::vector<double> wb(p + 1, 0.0);
  double loss = logistic_loss(X, y, wb, opts.l2);

  for (int iter = 0; iter < opts.max_iter; ++iter) {
    const auto g = logistic_grad(X, y, wb, opts.l2);
    double gmax = 0.0;
    for (double v : g) gmax = std::max(gmax, std::abs(v));
    if (gmax < opts.grad_tol) break;

    // Hessian: X^T S X with the bias column appended; l2 on weights only.
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p + 1),
                                              static_cast<Eigen::Index>(p + 1));
    for (std::size_t i = 0; i < X.size(); ++i) {
      double z = wb[p];
      for (std::size_t j = 0; j < p; ++j) z += wb[j] * X[i][j];
      const double mu = sigmoid(z);
      const double s = std::max(mu * (1.0 - mu), 1e-12);
      for (std::size_t a = 0; a <= p; ++a) {
        const double xa = a < p ? X[i][a] : 1.0;
        for (std::size_t b = a; b <= p; ++b) {
          const double xb = b < p ? X[i][b] : 1.0;
          H(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) += s * xa * xb;
        }
      }
    }
    for (std::size_t j = 0; j < p; ++j) {
      H(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) += opts.l2;
    }
    H = H.selfadjointView<Eigen::Upper>();

    Eigen::VectorXd gv(static_cast<Eigen::Index>(p + 1));
    for (std::size_t j = 0; j <= p; ++j) gv(static_cast<Eigen::Index>(j)) = g[j];
    const Eigen::VectorXd step = H.ldlt().solve(gv);

    // Damping: halve the step until the loss decreases.
    double t = 1.0;
    std::vector<double> trial(p + 1);
    for (int halvings = 0; halvings < 60; ++halvings) {
      for (std::size_t j = 0; j <= p; ++j) {
        trial[j] = wb[j] - t * step(static_cast<Eigen::Index>(j));
      }
      const double trial_loss = logistic_loss(X, y, trial, opts.l2);
      if (trial_loss <= loss) {
        wb = trial;
        loss = trial_loss;
        break;
      }
      t *= 0.5;
    }
  }

  LogisticModel model;
  model.weights.assign(wb.begin(), wb.end() - 1);
  model.bias = wb.back();
  model.feature_names = std::move(feature_names);
  model.scaler.mean.assign(p, 0.0);
  model.scaler.std.assign(p, 1.0);
  return model;
}

LogisticModel fit_logistic(const Matrix& X_raw, std::span<const int> y, const FitOptions& opts,
                           std::vector<std::string> feature_names) {
  Standardizer scaler;
  scaler.fit(X_raw);
  LogisticModel model = fit_logistic_std(scaler.apply(X_raw), y, opts, std::move(feature_names));
  model.scaler = std::move(scaler);
  return model;
}

double auc_score(std::span<const double> probs, std::span<const int> labels) {
  std::size_t n_pos = 0, n_neg = 0;
  for (int label : labels) (label ? n_pos : n_neg) += 1;
  if (n_pos == 0 || n_neg == 0) return kNaN;

  std::vector<std::size_t> order(probs.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return probs[a] < probs[b]; });

  // Average ranks over ties, then the Mann-Whitney identity.
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && probs[order[j + 1]] == probs[order[i]]) ++j;
    const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) {
      if (labels[order[k]]) rank_sum_pos += avg_rank;
    }
    i = j + 1;
  }
  const double np = static_cast<double>(n_pos);
  const double nn = static_cast<double>(n_neg);
  return (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * nn);
}

double aucpr_score(std::span<const double> probs, std::span<const int> labels) {
  std::size_t n_pos = 0;
  for (int label : labels) n_pos += static_cast<std::size_t>(label);
  if (n_pos == 0 || n_pos == labels.size()) return kNaN;

  std::vector<std::size_t> order(probs.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return probs[a] > probs[b]; });

  double ap = 0.0;
  std::size_t tp = 0, fp = 0, tp_prev = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && probs[order[j + 1]] == probs[order[i]]) ++j;
    for (std::size_t k = i; k <= j; ++k) {
      if (labels[order[k]]) ++tp; else ++fp;
    }
    const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    ap += (static_cast<double>(tp) - static_cast<double>(tp_prev)) /
          static_cast<double>(n_pos) * precision;
    tp_prev = tp;
    i = j + 1;
  }
  return ap;
}

Metrics compute_metrics(std::span<const double> probs, std::span<const int> labels,
                        double threshold) {
  if (probs.size() != labels.size() || probs.empty()) {
    throw std::invalid_argument("metrics: shape mismatch or empty input");
  }
  std::size_t tp = 0, tn = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const bool pred = probs[i] >= threshold;
    if (pred && labels[i]) ++tp;
    else if (pred && !labels[i]) ++fp;
    else if (!pred && labels[i]) ++fn;
    else ++tn;
  }
  Metrics m;
  m.acc = static_cast<double>(tp + tn) / static_cast<double>(probs.size());
  m.ppv = (tp + fp) ? static_cast<double>(tp) / static_cast<double>(tp + fp) : kNaN;
  m.tpr = (tp + fn) ? static_cast<double>(tp) / static_cast<double>(tp + fn) : kNaN;
  m.auc = auc_score(probs, labels);
  m.aucpr = aucpr_score(probs, labels);
  return m;
}

std::vector<std::size_t> undersample_majority(std::span<const int> labels, std::uint64_t seed) {
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    (labels[i] ? pos : neg).push_back(i);
  }
  if (pos.empty() || neg.empty()) {
    throw std::runtime_error("undersample: both classes required");
  }
  auto& minority = pos.size() <= neg.size() ? pos : neg;
  auto& majority = pos.size() <= neg.size() ? neg : pos;

  Rng rng(seed);
  const auto picks = rng.sample_indices(majority.size(), minority.size());
  std::vector<std::size_t> kept = minority;
  for (std::size_t k : picks) kept.push_back(majority[k]);
  std::sort(kept.begin(), kept.end());
  return kept;
}

namespace {

// Design-matrix assembly from feature-table rows; all requested features must
// be present (callers filter rows by modality first).
Matrix build_design(const cohort::FeatureTable& table, std::span<const std::size_t> rows,
                    const std::vector<std::string>& features) {
  Matrix X;
  X.reserve(rows.size());
  for (std::size_t r : rows) {
    std::vector<double> x;
    x.reserve(features.size());
    for (const auto& f : features) {
      const auto v = table.value(table.rows[r], f);
      if (!v) throw std::runtime_error("design: missing value for feature " + f);
      x.push_back(*v);
    }
    X.push_back(std::move(x));
  }
  return X;
}

std::vector<int> build_labels(const cohort::FeatureTable& table,
                              std::span<const std::size_t> rows) {
  std::vector<int> y;
  y.reserve(rows.size());
  for (std::size_t r : rows) y.push_back(table.rows[r].label);
  return y;
}

bool has_both_classes(std::span<const int> y) {
  bool pos = false, neg = false;
  for (int v : y) (v ? pos : neg) = true;
  return pos && neg;
}

// Participant-grouped fold assignment: shuffled participants dealt
// round-robin into n_folds groups.
std::vector<std::vector<std::size_t>> grouped_folds(const cohort::FeatureTable& table,
                                                    std::span<const std::size_t> rows,
                                                    std::size_t n_folds, std::uint64_t seed) {
  std::vector<std::string> participants;
  for (std::size_t r : rows) {
    const auto& pid = table.rows[r].participant_id;
    if (std::find(participants.begin(), participants.end(), pid) == participants.end()) {
      participants.push_back(pid);
    }
  }
  std::sort(participants.begin(), participants.end());
  Rng rng(seed);
  rng.shuffle(participants);

  n_folds = std::min<std::size_t>(n_folds, participants.size());
  std::map<std::string, std::size_t> fold_of;
  for (std::size_t i = 0; i < participants.size(); ++i) fold_of[participants[i]] = i % n_folds;

  std::vector<std::vector<std::size_t>> folds(n_folds);
  for (std::size_t r : rows) {
    folds[fold_of[table.rows[r].participant_id]].push_back(r);
  }
  return folds;
}

}  // namespace

std::vector<std::string> sffs_select(const cohort::FeatureTable& table,
                                     std::span<const std::size_t> train_rows,
                                     const std::vector<std::string>& candidates, int k,
                                     std::uint64_t seed, double l2) {
  if (static_cast<int>(candidates.size()) <= k) return candidates;

  const auto folds = grouped_folds(table, train_rows, 5, seed);
  FitOptions opts;
  opts.l2 = l2;

  std::vector<std::string> remaining = candidates;
  std::sort(remaining.begin(), remaining.end());
  std::vector<std::string> selected;

  while (static_cast<int>(selected.size()) < k && !remaining.empty()) {
    std::string best_feature;
    double best_score = -std::numeric_limits<double>::infinity();

    for (const auto& feature : remaining) {
      std::vector<std::string> feats = selected;
      feats.push_back(feature);

      double score_sum = 0.0;
      std::size_t n_scores = 0;
      for (std::size_t f = 0; f < folds.size(); ++f) {
        std::vector<std::size_t> inner_train;
        for (std::size_t g = 0; g < folds.size(); ++g) {
          if (g != f) inner_train.insert(inner_train.end(), folds[g].begin(), folds[g].end());
        }
        const auto& inner_test = folds[f];
        if (inner_train.empty() || inner_test.empty()) continue;
        const auto y_train = build_labels(table, inner_train);
        const auto y_test = build_labels(table, inner_test);
        if (!has_both_classes(y_train) || !has_both_classes(y_test)) continue;

        const auto model = fit_logistic(build_design(table, inner_train, feats), y_train, opts);
        std::vector<double> probs;
        probs.reserve(inner_test.size());
        const auto X_test = build_design(table, inner_test, feats);
        for (const auto& x : X_test) probs.push_back(model.predict(x));
        const double a = auc_score(probs, y_test);
        if (std::isfinite(a)) {
          score_sum += a;
          ++n_scores;
        }
      }
      if (n_scores == 0) continue;
      const double score = score_sum / static_cast<double>(n_scores);
      if (score > best_score) {
        best_score = score;
        best_feature = feature;
      }
    }

    if (best_feature.empty()) best_feature = remaining.front();  // no scorable fold
    selected.push_back(best_feature);
    remaining.erase(std::find(remaining.begin(), remaining.end(), best_feature));
  }
  return selected;
}

Fusion fusion_from_string(const std::string& s) {
  if (s == "none") return Fusion::None;
  if (s == "early") return Fusion::Early;
  if (s == "late") return Fusion::Late;
  throw std::invalid_argument("unknown fusion mode: " + s);
}

std::string to_string(Fusion f) {
  switch (f) {
    case Fusion::None: return "none";
    case Fusion::Early: return "early";
    case Fusion::Late: return "late";
  }
  return "?";
}

namespace {

struct FoldContext {
  const cohort::FeatureTable& table;
  const ExperimentSpec& spec;
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> test_rows;
  std::uint64_t fold_seed = 0;
};

// Nested out-of-fold base-model probabilities within the training set; the
// meta model never sees in-sample base outputs.
void run_late_fusion(const FoldContext& ctx, FoldResult& fold,
                     const std::vector<std::vector<std::string>>& selected_per_modality) {
  const auto& table = ctx.table;
  const auto& spec = ctx.spec;
  FitOptions opts;
  opts.l2 = spec.l2;
  const std::size_t n_mod = spec.modalities.size();

  const auto y_train = build_labels(table, ctx.train_rows);

  // Base models on the full (undersampled) training set.
  std::vector<LogisticModel> base;
  for (std::size_t m = 0; m < n_mod; ++m) {
    base.push_back(fit_logistic(build_design(table, ctx.train_rows, selected_per_modality[m]),
                                y_train, opts, selected_per_modality[m]));
  }

  // Nested OOF probabilities for meta training.
  const auto nested = grouped_folds(table, ctx.train_rows, 5, mix_seed(ctx.fold_seed, 101));
  Matrix meta_X;
  std::vector<int> meta_y;
  for (std::size_t f = 0; f < nested.size(); ++f) {
    std::vector<std::size_t> nested_train;
    for (std::size_t g = 0; g < nested.size(); ++g) {
      if (g != f) nested_train.insert(nested_train.end(), nested[g].begin(), nested[g].end());
    }
    if (nested_train.empty() || nested[f].empty()) continue;
    const auto y_nested = build_labels(table, nested_train);
    if (!has_both_classes(y_nested)) continue;

    std::vector<LogisticModel> nested_models;
    for (std::size_t m = 0; m < n_mod; ++m) {
      nested_models.push_back(
          fit_logistic(build_design(table, nested_train, selected_per_modality[m]), y_nested,
                       opts));
    }
    for (std::size_t r : nested[f]) {
      std::vector<double> probs(n_mod);
      for (std::size_t m = 0; m < n_mod; ++m) {
        const auto X = build_design(table, std::vector<std::size_t>{r},
                                    selected_per_modality[m]);
        probs[m] = nested_models[m].predict(X[0]);
      }
      meta_X.push_back(std::move(probs));
      meta_y.push_back(table.rows[r].label);
    }
  }

  std::optional<LogisticModel> meta;
  if (!meta_X.empty() && has_both_classes(meta_y)) {
    std::vector<std::string> meta_names;
    for (auto m : spec.modalities) meta_names.push_back("p_" + cohort::to_string(m));
    meta = fit_logistic(meta_X, meta_y, opts, meta_names);
  }

  for (std::size_t r : ctx.test_rows) {
    std::vector<double> probs(n_mod);
    for (std::size_t m = 0; m < n_mod; ++m) {
      const auto X = build_design(table, std::vector<std::size_t>{r}, selected_per_modality[m]);
      probs[m] = base[m].predict(X[0]);
    }
    double p;
    if (meta) {
      p = meta->predict(probs);
    } else {
      // Degenerate nested split; fall back to the mean base probability.
      p = std::accumulate(probs.begin(), probs.end(), 0.0) / static_cast<double>(n_mod);
    }
    fold.preds.push_back({table.rows[r].event_id, p, table.rows[r].label});
  }
  if (!meta) fold.skip_reason = "meta fallback: nested folds single-class";
}

FoldResult run_fold(const FoldContext& ctx) {
  const auto& table = ctx.table;
  const auto& spec = ctx.spec;
  FoldResult fold;

  auto y_full = build_labels(table, ctx.train_rows);
  if (!has_both_classes(y_full)) {
    fold.skipped = true;
    fold.skip_reason = "training set single-class";
    return fold;
  }

  // Majority undersampling on this fold's training rows.
  const auto kept = undersample_majority(y_full, mix_seed(ctx.fold_seed, 1));
  std::vector<std::size_t> train;
  train.reserve(kept.size());
  for (std::size_t k : kept) train.push_back(ctx.train_rows[k]);

  FoldContext us_ctx{ctx.table, ctx.spec, train, ctx.test_rows, ctx.fold_seed};

  // Per-modality forward selection.
  std::vector<std::vector<std::string>> selected_per_modality;
  for (std::size_t m = 0; m < spec.modalities.size(); ++m) {
    const auto candidates = table.feature_names(spec.modalities[m]);
    auto sel = sffs_select(table, train, candidates, spec.sffs_k,
                           mix_seed(ctx.fold_seed, 2 + m), spec.l2);
    fold.selected[cohort::to_string(spec.modalities[m])] = sel;
    selected_per_modality.push_back(std::move(sel));
  }

  if (spec.fusion == Fusion::Late) {
    run_late_fusion(us_ctx, fold, selected_per_modality);
    return fold;
  }

  // Early fusion / single modality: one model over the concatenation.
  std::vector<std::string> features;
  for (const auto& sel : selected_per_modality) {
    features.insert(features.end(), sel.begin(), sel.end());
  }
  FitOptions opts;
  opts.l2 = spec.l2;
  const auto y_train = build_labels(table, train);
  const auto model = fit_logistic(build_design(table, train, features), y_train, opts, features);
  fold.scaler_features = features;
  fold.scaler_mean = model.scaler.mean;
  fold.scaler_std = model.scaler.std;

  for (std::size_t r : ctx.test_rows) {
    const auto X = build_design(table, std::vector<std::size_t>{r}, features);
    fold.preds.push_back({table.rows[r].event_id, model.predict(X[0]), table.rows[r].label});
  }
  return fold;
}

}  // namespace

EvaluationReport loso_evaluate(const cohort::FeatureTable& table, const ExperimentSpec& spec) {
  if (spec.modalities.empty()) throw std::invalid_argument("no modalities given");
  if (spec.fusion == Fusion::None && spec.modalities.size() != 1) {
    throw std::invalid_argument("fusion 'none' requires exactly one modality");
  }
  if (spec.resample_repeats < 1) throw std::invalid_argument("resample_repeats must be >= 1");

  // Rows eligible for this experiment: all required modalities present.
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    bool ok = true;
    for (auto m : spec.modalities) ok = ok && table.rows[i].has(m);
    if (ok) rows.push_back(i);
  }

  std::vector<std::string> participants;
  for (std::size_t r : rows) {
    const auto& pid = table.rows[r].participant_id;
    if (std::find(participants.begin(), participants.end(), pid) == participants.end()) {
      participants.push_back(pid);
    }
  }
  std::sort(participants.begin(), participants.end());
  if (participants.size() < 2) {
    throw std::runtime_error("loso: need at least two participants with complete modalities");
  }

  EvaluationReport report;
  report.spec = spec;
  report.n_rows = rows.size();
  report.n_participants = participants.size();

  for (int rep = 0; rep < spec.resample_repeats; ++rep) {
    RepeatResult rr;
    rr.folds.resize(participants.size());

    parallel_for(participants.size(), [&](std::size_t f) {
      FoldContext ctx{table, spec, {}, {}, mix_seed(spec.seed, static_cast<std::uint64_t>(rep),
                                                    static_cast<std::uint64_t>(f))};
      for (std::size_t r : rows) {
        if (table.rows[r].participant_id == participants[f]) {
          ctx.test_rows.push_back(r);
        } else {
          ctx.train_rows.push_back(r);
        }
      }
      FoldResult fold = run_fold(ctx);
      fold.participant = participants[f];
      rr.folds[f] = std::move(fold);
    });

    std::vector<double> probs;
    std::vector<int> labels;
    for (const auto& fold : rr.folds) {
      if (fold.skipped) {
        report.warnings.push_back("fold " + fold.participant + " skipped: " + fold.skip_reason);
        continue;
      }
      if (!fold.skip_reason.empty() && rep == 0) {
        report.warnings.push_back("fold " + fold.participant + ": " + fold.skip_reason);
      }
      for (const auto& pred : fold.preds) {
        probs.push_back(pred.prob);
        labels.push_back(pred.label);
      }
    }
    if (probs.empty()) throw std::runtime_error("loso: no out-of-fold predictions");
    rr.pooled = compute_metrics(probs, labels, spec.threshold);
    report.repeats.push_back(std::move(rr));
  }

  // Metrics averaged over resample repeats.
  Metrics sum;
  for (const auto& rr : report.repeats) {
    sum.acc += rr.pooled.acc;
    sum.auc += rr.pooled.auc;
    sum.aucpr += rr.pooled.aucpr;
    sum.ppv += rr.pooled.ppv;
    sum.tpr += rr.pooled.tpr;
  }
  const double n = static_cast<double>(report.repeats.size());
  report.pooled = {sum.acc / n, sum.auc / n, sum.aucpr / n, sum.ppv / n, sum.tpr / n};
  return report;
}

std::vector<SweepPoint> time_to_event_sweep(const Cohort& cohort, std::span<const int> shifts,
                                            const cohort::ExtractSpec& extract,
                                            const ExperimentSpec& spec) {
  std::vector<SweepPoint> points;
  for (int shift : shifts) {
    if (shift < 0) throw std::invalid_argument("shift_days must be >= 0");
    cohort::ExtractSpec ex = extract;
    ex.window.shift_days = shift;
    const auto windows = cohort::build_windows(cohort, ex.window);
    const auto table = cohort::extract_features(windows, ex);
    SweepPoint p;
    p.shift_days = shift;
    p.report = loso_evaluate(table, spec);
    p.metrics = p.report.pooled;
    points.push_back(std::move(p));
  }
  return points;
}

}  // namespace hfsense::learn
