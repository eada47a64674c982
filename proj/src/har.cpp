#include "hfsense/har.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "hfsense/learn.hpp"
#include "hfsense/meta.hpp"
#include "hfsense/parallel.hpp"
#include "hfsense/version.hpp"

namespace hfsense::har {

namespace fs = std::filesystem;

int merge_har_labels(int raw_label) {
  switch (raw_label) {
    case 1:  // walking
    case 2:  // walking upstairs
    case 3:  // walking downstairs
      return 1;
    case 4:  // sitting
    case 5:  // standing
    case 6:  // laying
      return 0;
    default:
      throw std::invalid_argument("unknown activity label: " + std::to_string(raw_label));
  }
}

namespace {

std::vector<std::vector<double>> read_signal_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("missing file: " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::vector<double> row;
    double v;
    while (ss >> v) row.push_back(v);
    if (!row.empty()) rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<int> read_int_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("missing file: " + path.string());
  std::vector<int> values;
  int v;
  while (in >> v) values.push_back(v);
  return values;
}

void mean_std(std::span<const double> v, double& mean, double& sd) {
  mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  sd = std::sqrt(ss / static_cast<double>(v.size()));
}

}  // namespace

HarData load_har_split(const fs::path& root, const std::string& split,
                       const std::string& channel_prefix) {
  const fs::path dir = root / split;
  const fs::path signals = dir / "Inertial Signals";
  const auto x = read_signal_file(signals / (channel_prefix + "_x_" + split + ".txt"));
  const auto y = read_signal_file(signals / (channel_prefix + "_y_" + split + ".txt"));
  const auto z = read_signal_file(signals / (channel_prefix + "_z_" + split + ".txt"));
  const auto labels = read_int_file(dir / ("y_" + split + ".txt"));
  const auto subjects = read_int_file(dir / ("subject_" + split + ".txt"));

  if (x.size() != labels.size() || y.size() != labels.size() || z.size() != labels.size() ||
      subjects.size() != labels.size()) {
    throw std::runtime_error("har: inconsistent row counts in " + dir.string());
  }

  HarData data;
  data.X.reserve(labels.size());
  data.y.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    data.X.push_back(window_features(x[i], y[i], z[i]));
    data.y.push_back(merge_har_labels(labels[i]));
    data.subject.push_back(subjects[i]);
  }
  return data;
}

Features window_features(std::span<const double> x, std::span<const double> y,
                         std::span<const double> z) {
  Features f{};
  mean_std(x, f[0], f[3]);
  mean_std(y, f[1], f[4]);
  mean_std(z, f[2], f[5]);
  return f;
}

double Tree::predict_proba(const Features& x) const {
  int node = 0;
  while (nodes[static_cast<std::size_t>(node)].feature >= 0) {
    const auto& nd = nodes[static_cast<std::size_t>(node)];
    node = x[static_cast<std::size_t>(nd.feature)] <= nd.threshold ? nd.left : nd.right;
  }
  return nodes[static_cast<std::size_t>(node)].p1;
}

double ForestModel::predict_proba(const Features& x) const {
  double p = 0.0;
  for (const auto& t : trees) p += t.predict_proba(x);
  return p / static_cast<double>(trees.size());
}

int ForestModel::predict(const Features& x) const { return predict_proba(x) >= 0.5 ? 1 : 0; }

namespace {

struct TreeBuilder {
  std::span<const Features> X;
  std::span<const int> y;
  const ForestOptions& opt;
  Rng rng;
  Tree tree;

  int build(std::vector<std::size_t>& idx, std::size_t begin, std::size_t end) {
    const std::size_t n = end - begin;
    std::size_t n1 = 0;
    for (std::size_t k = begin; k < end; ++k) n1 += static_cast<std::size_t>(y[idx[k]]);

    const bool pure = n1 == 0 || n1 == n;
    if (pure || n < 2 * static_cast<std::size_t>(opt.min_leaf)) {
      return make_leaf(n1, n);
    }

    // mtry features without replacement, then the best Gini split among them.
    std::vector<int> features(6);
    std::iota(features.begin(), features.end(), 0);
    for (int i = 0; i < opt.mtry; ++i) {
      const std::size_t j = static_cast<std::size_t>(i) +
                            rng.below(features.size() - static_cast<std::size_t>(i));
      std::swap(features[static_cast<std::size_t>(i)], features[j]);
    }

    int best_feature = -1;
    double best_threshold = 0.0;
    double best_score = std::numeric_limits<double>::infinity();
    std::vector<std::pair<double, int>> vals(n);

    for (int fi = 0; fi < opt.mtry; ++fi) {
      const int f = features[static_cast<std::size_t>(fi)];
      for (std::size_t k = 0; k < n; ++k) {
        vals[k] = {X[idx[begin + k]][static_cast<std::size_t>(f)], y[idx[begin + k]]};
      }
      std::sort(vals.begin(), vals.end());

      std::size_t left_n = 0, left_1 = 0;
      for (std::size_t k = 0; k + 1 < n; ++k) {
        ++left_n;
        left_1 += static_cast<std::size_t>(vals[k].second);
        if (vals[k].first == vals[k + 1].first) continue;  // no cut between ties
        const std::size_t right_n = n - left_n;
        if (left_n < static_cast<std::size_t>(opt.min_leaf) ||
            right_n < static_cast<std::size_t>(opt.min_leaf)) {
          continue;
        }
        const double l1 = static_cast<double>(left_1) / static_cast<double>(left_n);
        const double r1 = static_cast<double>(n1 - left_1) / static_cast<double>(right_n);
        const double gini = static_cast<double>(left_n) * 2.0 * l1 * (1.0 - l1) +
                            static_cast<double>(right_n) * 2.0 * r1 * (1.0 - r1);
        if (gini < best_score) {
          best_score = gini;
          best_feature = f;
          best_threshold = (vals[k].first + vals[k + 1].first) / 2.0;
        }
      }
    }

    if (best_feature < 0) return make_leaf(n1, n);

    // Partition in place, stable order within halves.
    std::vector<std::size_t> left, right;
    left.reserve(n);
    right.reserve(n);
    for (std::size_t k = begin; k < end; ++k) {
      if (X[idx[k]][static_cast<std::size_t>(best_feature)] <= best_threshold) {
        left.push_back(idx[k]);
      } else {
        right.push_back(idx[k]);
      }
    }
    if (left.empty() || right.empty()) return make_leaf(n1, n);
    std::copy(left.begin(), left.end(), idx.begin() + static_cast<std::ptrdiff_t>(begin));
    std::copy(right.begin(), right.end(),
              idx.begin() + static_cast<std::ptrdiff_t>(begin + left.size()));

    const int node_id = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back(TreeNode{best_feature, best_threshold, -1, -1, 0.0});
    const int l = build(idx, begin, begin + left.size());
    const int r = build(idx, begin + left.size(), end);
    tree.nodes[static_cast<std::size_t>(node_id)].left = l;
    tree.nodes[static_cast<std::size_t>(node_id)].right = r;
    return node_id;
  }

  int make_leaf(std::size_t n1, std::size_t n) {
    const int node_id = static_cast<int>(tree.nodes.size());
    TreeNode leaf;
    leaf.feature = -1;
    leaf.p1 = static_cast<double>(n1) / static_cast<double>(n);
    tree.nodes.push_back(leaf);
    return node_id;
  }
};

}  // namespace

ForestModel train_forest(std::span<const Features> X, std::span<const int> y,
                         const ForestOptions& options) {
  if (X.empty() || X.size() != y.size()) throw std::invalid_argument("train_forest: bad input");
  ForestModel model;
  model.options = options;
  model.trees.resize(static_cast<std::size_t>(options.n_trees));

  parallel_for(static_cast<std::size_t>(options.n_trees), [&](std::size_t t) {
    TreeBuilder builder{X, y, options, Rng(mix_seed(options.seed, t)), Tree{}};
    std::vector<std::size_t> idx;
    idx.reserve(X.size());
    if (options.bootstrap) {
      for (std::size_t i = 0; i < X.size(); ++i) idx.push_back(builder.rng.below(X.size()));
    } else {
      idx.resize(X.size());
      std::iota(idx.begin(), idx.end(), 0);
    }
    builder.build(idx, 0, idx.size());
    model.trees[t] = std::move(builder.tree);
  });
  return model;
}

std::string to_string(ModelKind k) {
  switch (k) {
    case ModelKind::Forest: return "random_forest";
    case ModelKind::Logistic: return "logistic_regression";
    case ModelKind::DecisionTree: return "decision_tree";
  }
  return "?";
}

double cross_val_accuracy(std::span<const Features> X, std::span<const int> y, int k_folds,
                          ModelKind kind, std::uint64_t seed) {
  if (k_folds < 2) throw std::invalid_argument("k_folds must be >= 2");
  std::vector<std::size_t> order(X.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(mix_seed(seed, 0xC5));
  rng.shuffle(order);

  std::vector<double> fold_acc(static_cast<std::size_t>(k_folds), 0.0);
  parallel_for(static_cast<std::size_t>(k_folds), [&](std::size_t f) {
    std::vector<std::size_t> train, test;
    for (std::size_t i = 0; i < order.size(); ++i) {
      (i % static_cast<std::size_t>(k_folds) == f ? test : train).push_back(order[i]);
    }

    std::size_t correct = 0;
    if (kind == ModelKind::Logistic) {
      learn::Matrix Xt;
      std::vector<int> yt;
      for (std::size_t i : train) {
        Xt.emplace_back(X[i].begin(), X[i].end());
        yt.push_back(y[i]);
      }
      const auto model = learn::fit_logistic(Xt, yt);
      for (std::size_t i : test) {
        const std::vector<double> x(X[i].begin(), X[i].end());
        correct += static_cast<std::size_t>((model.predict(x) >= 0.5 ? 1 : 0) == y[i]);
      }
    } else {
      ForestOptions opt;
      opt.seed = mix_seed(seed, f + 1);
      if (kind == ModelKind::DecisionTree) {
        opt.n_trees = 1;
        opt.mtry = 6;
        opt.bootstrap = false;
      }
      std::vector<Features> Xt;
      std::vector<int> yt;
      for (std::size_t i : train) {
        Xt.push_back(X[i]);
        yt.push_back(y[i]);
      }
      const auto model = train_forest(Xt, yt, opt);
      for (std::size_t i : test) {
        correct += static_cast<std::size_t>(model.predict(X[i]) == y[i]);
      }
    }
    fold_acc[f] = static_cast<double>(correct) / static_cast<double>(test.size());
  });

  double mean = 0.0;
  for (double a : fold_acc) mean += a;
  return mean / static_cast<double>(k_folds);
}

std::size_t walk_epochs(std::span<const AccelSample> accel, const ForestModel& model, double fs) {
  if (accel.empty()) return 0;
  const int w = std::max(1, static_cast<int>(std::llround(kWindowSeconds * fs)));
  if (w < kMinWindowSamples) return 0;
  const double step = static_cast<double>(w) / 2.0;
  const double gap_ms = 2.0 * 1000.0 / fs;

  std::size_t count = 0;
  auto scan_segment = [&](std::size_t begin, std::size_t end) {
    const std::size_t s = end - begin;
    if (s < static_cast<std::size_t>(w)) return;
    for (std::size_t k = 0;; ++k) {
      const double offset = static_cast<double>(k) * step;
      if (offset > static_cast<double>(s - static_cast<std::size_t>(w))) break;
      const std::size_t start = begin + static_cast<std::size_t>(offset);
      std::vector<double> xs(static_cast<std::size_t>(w)), ys(static_cast<std::size_t>(w)),
          zs(static_cast<std::size_t>(w));
      for (int i = 0; i < w; ++i) {
        const auto& smp = accel[start + static_cast<std::size_t>(i)];
        xs[static_cast<std::size_t>(i)] = smp.x;
        ys[static_cast<std::size_t>(i)] = smp.y;
        zs[static_cast<std::size_t>(i)] = smp.z;
      }
      count += static_cast<std::size_t>(model.predict(window_features(xs, ys, zs)));
    }
  };

  std::size_t seg_start = 0;
  for (std::size_t i = 1; i < accel.size(); ++i) {
    if (static_cast<double>(accel[i].t - accel[i - 1].t) > gap_ms) {
      scan_segment(seg_start, i);
      seg_start = i;
    }
  }
  scan_segment(seg_start, accel.size());
  return count;
}

std::optional<std::size_t> sample_5h_subwindow(std::span<const actigraphy::ActivityEpoch> epochs,
                                               double max_missing, Rng& rng, int max_tries) {
  if (epochs.size() < kSubwindowEpochs) return std::nullopt;
  const std::size_t max_start = epochs.size() - kSubwindowEpochs;
  for (int attempt = 0; attempt < max_tries; ++attempt) {
    const std::size_t start = rng.below(max_start + 1);
    std::size_t present = 0;
    for (std::size_t i = start; i < start + kSubwindowEpochs; ++i) {
      present += static_cast<std::size_t>(epochs[i].present);
    }
    const double missing =
        1.0 - static_cast<double>(present) / static_cast<double>(kSubwindowEpochs);
    if (missing <= max_missing) return start;
  }
  return std::nullopt;
}

UTestResult compare_groups(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("compare_groups: empty group");
  UTestResult res;
  res.n1 = a.size();
  res.n2 = b.size();

  std::vector<std::pair<double, int>> all;
  all.reserve(a.size() + b.size());
  for (double v : a) all.emplace_back(v, 0);
  for (double v : b) all.emplace_back(v, 1);
  std::sort(all.begin(), all.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });

  // Average ranks with tie bookkeeping for the variance correction.
  const double n = static_cast<double>(all.size());
  double rank_sum_a = 0.0;
  double tie_term = 0.0;
  std::size_t i = 0;
  while (i < all.size()) {
    std::size_t j = i;
    while (j + 1 < all.size() && all[j + 1].first == all[i].first) ++j;
    const double t = static_cast<double>(j - i + 1);
    tie_term += t * t * t - t;
    const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) {
      if (all[k].second == 0) rank_sum_a += avg_rank;
    }
    i = j + 1;
  }

  const double n1 = static_cast<double>(res.n1);
  const double n2 = static_cast<double>(res.n2);
  const double u1 = rank_sum_a - n1 * (n1 + 1.0) / 2.0;
  res.u = std::max(u1, n1 * n2 - u1);

  if (res.n1 < 3 || res.n2 < 3) {
    res.p = std::numeric_limits<double>::quiet_NaN();
    return res;
  }

  const double mu = n1 * n2 / 2.0;
  const double var = n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
  if (var <= 0.0) {
    res.p = 1.0;  // all values tied
    return res;
  }
  const double z = (res.u - mu - 0.5) / std::sqrt(var);  // continuity correction
  const double zz = std::max(z, 0.0);
  res.p = std::min(1.0, std::erfc(zz / std::sqrt(2.0)));
  return res;
}

void save_forest_json(const fs::path& path, const ForestModel& model,
                      std::uint64_t config_hash) {
  nlohmann::ordered_json j;
  j["tool"] = std::string("hfsense ") + kVersion;
  j["config"] = to_hex16(config_hash);
  j["seed"] = model.options.seed;
  j["n_trees"] = model.options.n_trees;
  j["mtry"] = model.options.mtry;
  j["min_leaf"] = model.options.min_leaf;
  j["bootstrap"] = model.options.bootstrap;
  auto& trees = j["trees"] = nlohmann::ordered_json::array();
  for (const auto& t : model.trees) {
    nlohmann::ordered_json jt = nlohmann::ordered_json::array();
    for (const auto& nd : t.nodes) {
      jt.push_back({nd.feature, nd.threshold, nd.left, nd.right, nd.p1});
    }
    trees.push_back(std::move(jt));
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << j.dump(1) << "\n";
}

ForestModel load_forest_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("missing file: " + path.string());
  nlohmann::json j;
  in >> j;
  ForestModel model;
  model.options.seed = j["seed"].get<std::uint64_t>();
  model.options.n_trees = j["n_trees"].get<int>();
  model.options.mtry = j["mtry"].get<int>();
  model.options.min_leaf = j["min_leaf"].get<int>();
  model.options.bootstrap = j["bootstrap"].get<bool>();
  for (const auto& jt : j["trees"]) {
    Tree t;
    for (const auto& jn : jt) {
      TreeNode nd;
      nd.feature = jn[0].get<int>();
      nd.threshold = jn[1].get<double>();
      nd.left = jn[2].get<int>();
      nd.right = jn[3].get<int>();
      nd.p1 = jn[4].get<double>();
      t.nodes.push_back(nd);
    }
    model.trees.push_back(std::move(t));
  }
  return model;
}

}  // namespace hfsense::har
