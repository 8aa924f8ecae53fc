#include "auvnav/ensemble.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "auvnav/rng.hpp"
#include "json.hpp"

namespace auvnav {
namespace {

constexpr int kF = static_cast<int>(kFeatureCount);

// Per-node example ids, one array per feature, each sorted by that feature's
// value (ties by example id), plus the same ids in ascending order. All stay
// sorted through partitioning so split search never re-sorts.
struct NodeArrays {
  std::array<std::vector<std::uint32_t>, kFeatureCount> order;
  std::vector<std::uint32_t> ids;
};

struct BuildTask {
  std::int32_t node_id;
  NodeArrays arrays;
};

double feature_at(std::span<const TrainingExample> data, std::uint32_t id,
                  int f) {
  return data[id].features[static_cast<std::size_t>(f)];
}

// Mean label over the node's members, summed in ascending example-id order so
// the result does not depend on which feature ordering reached the leaf.
// Equal labels return the label itself, exactly.
double leaf_mean(std::span<const TrainingExample> data,
                 const std::vector<std::uint32_t>& weight,
                 const std::vector<std::uint32_t>& ids) {
  const double first = data[ids.front()].label;
  bool constant = true;
  for (std::uint32_t id : ids) {
    if (data[id].label != first) {
      constant = false;
      break;
    }
  }
  if (constant) return first;
  double sum = 0.0;
  double count = 0.0;
  for (std::uint32_t id : ids) {
    const double w = static_cast<double>(weight[id]);
    sum += w * data[id].label;
    count += w;
  }
  return sum / count;
}

// SSE of a proposed partition, each side accumulated in ascending example-id
// order so the score depends only on the two member sets, never on the
// feature ordering that proposed them. A constant-label side scores exactly
// zero.
double split_sse(std::span<const TrainingExample> data,
                 const std::vector<std::uint32_t>& weight,
                 const std::vector<std::uint32_t>& ids,
                 const std::vector<std::uint8_t>& left) {
  double w_l = 0.0, sum_l = 0.0, first_l = 0.0;
  double w_r = 0.0, sum_r = 0.0, first_r = 0.0;
  bool const_l = true, const_r = true;
  bool seen_l = false, seen_r = false;
  for (std::uint32_t id : ids) {
    const double w = static_cast<double>(weight[id]);
    const double y = data[id].label;
    if (left[id]) {
      if (!seen_l) {
        first_l = y;
        seen_l = true;
      }
      const_l = const_l && y == first_l;
      w_l += w;
      sum_l += w * y;
    } else {
      if (!seen_r) {
        first_r = y;
        seen_r = true;
      }
      const_r = const_r && y == first_r;
      w_r += w;
      sum_r += w * y;
    }
  }
  const double mean_l = const_l ? first_l : sum_l / w_l;
  const double mean_r = const_r ? first_r : sum_r / w_r;
  double sse_l = 0.0;
  double sse_r = 0.0;
  for (std::uint32_t id : ids) {
    const double w = static_cast<double>(weight[id]);
    const double d = data[id].label - (left[id] ? mean_l : mean_r);
    (left[id] ? sse_l : sse_r) += w * (d * d);
  }
  return sse_l + sse_r;
}

RegressionTree build_tree(std::span<const TrainingExample> data,
                          const std::vector<std::uint32_t>& weight,
                          NodeArrays root, int min_leaf) {
  RegressionTree tree;
  auto new_node = [&tree]() {
    tree.feature.push_back(-1);
    tree.threshold.push_back(0.0);
    tree.left.push_back(-1);
    tree.right.push_back(-1);
    tree.value.push_back(0.0);
    return static_cast<std::int32_t>(tree.feature.size()) - 1;
  };

  std::vector<std::uint8_t> goes_left(data.size(), 0);
  std::vector<BuildTask> stack;
  stack.push_back({new_node(), std::move(root)});

  while (!stack.empty()) {
    BuildTask task = std::move(stack.back());
    stack.pop_back();
    const std::vector<std::uint32_t>& members = task.arrays.ids;

    double total_w = 0.0;
    double y_min = std::numeric_limits<double>::infinity();
    double y_max = -std::numeric_limits<double>::infinity();
    for (std::uint32_t id : members) {
      total_w += static_cast<double>(weight[id]);
      y_min = std::min(y_min, data[id].label);
      y_max = std::max(y_max, data[id].label);
    }
    const bool pure = y_min == y_max;

    int best_feature = -1;
    double best_score = std::numeric_limits<double>::infinity();
    double best_threshold = 0.0;
    std::size_t best_boundary = 0;

    if (!pure && total_w >= 2.0 * min_leaf) {
      // One champion boundary per feature, found with running prefix sums.
      std::array<bool, kFeatureCount> cand_ok{};
      std::array<std::size_t, kFeatureCount> cand_pos{};
      std::array<double, kFeatureCount> cand_thr{};
      for (int f = 0; f < kF; ++f) {
        const std::vector<std::uint32_t>& ord = task.arrays.order[f];
        double w_l = 0.0;
        double sum_l = 0.0;
        double sumsq_l = 0.0;
        double sum_all = 0.0;
        double sumsq_all = 0.0;
        for (std::uint32_t id : ord) {
          const double w = static_cast<double>(weight[id]);
          const double y = data[id].label;
          sum_all += w * y;
          sumsq_all += w * y * y;
        }
        double f_score = std::numeric_limits<double>::infinity();
        for (std::size_t pos = 0; pos + 1 < ord.size(); ++pos) {
          const std::uint32_t id = ord[pos];
          const double w = static_cast<double>(weight[id]);
          const double y = data[id].label;
          w_l += w;
          sum_l += w * y;
          sumsq_l += w * y * y;
          const double v = feature_at(data, id, f);
          const double v_next = feature_at(data, ord[pos + 1], f);
          if (!(v < v_next)) continue;
          const double w_r = total_w - w_l;
          if (w_l < min_leaf || w_r < min_leaf) continue;
          const double sse_l = std::max(0.0, sumsq_l - sum_l * sum_l / w_l);
          const double sum_r = sum_all - sum_l;
          const double sumsq_r = sumsq_all - sumsq_l;
          const double sse_r = std::max(0.0, sumsq_r - sum_r * sum_r / w_r);
          const double score = sse_l + sse_r;
          if (score < f_score) {
            f_score = score;
            cand_ok[f] = true;
            cand_pos[f] = pos;
            cand_thr[f] = 0.5 * (v + v_next);
          }
        }
      }

      // Champions are re-scored with the partition-only split_sse so features
      // inducing the same partition get bit-identical scores and the tie
      // breaks to the lowest feature.
      for (std::uint32_t id : members) goes_left[id] = 0;
      for (int f = 0; f < kF; ++f) {
        if (!cand_ok[f]) continue;
        const std::vector<std::uint32_t>& ord = task.arrays.order[f];
        for (std::size_t pos = 0; pos <= cand_pos[f]; ++pos) {
          goes_left[ord[pos]] = 1;
        }
        const double score = split_sse(data, weight, members, goes_left);
        for (std::size_t pos = 0; pos <= cand_pos[f]; ++pos) {
          goes_left[ord[pos]] = 0;
        }
        if (score < best_score) {
          best_score = score;
          best_feature = f;
          best_threshold = cand_thr[f];
          best_boundary = cand_pos[f];
        }
      }
    }

    if (best_feature < 0) {
      tree.value[task.node_id] = leaf_mean(data, weight, members);
      continue;
    }

    const std::vector<std::uint32_t>& split_ord =
        task.arrays.order[best_feature];
    for (std::size_t pos = 0; pos < split_ord.size(); ++pos) {
      goes_left[split_ord[pos]] = pos <= best_boundary ? 1 : 0;
    }

    NodeArrays left_arrays;
    NodeArrays right_arrays;
    const std::size_t n_left = best_boundary + 1;
    const std::size_t n_right = members.size() - n_left;
    for (int f = 0; f < kF; ++f) {
      left_arrays.order[f].reserve(n_left);
      right_arrays.order[f].reserve(n_right);
      for (std::uint32_t id : task.arrays.order[f]) {
        (goes_left[id] ? left_arrays.order[f] : right_arrays.order[f])
            .push_back(id);
      }
    }
    left_arrays.ids.reserve(n_left);
    right_arrays.ids.reserve(n_right);
    for (std::uint32_t id : members) {
      (goes_left[id] ? left_arrays.ids : right_arrays.ids).push_back(id);
    }

    const std::int32_t left_id = new_node();
    const std::int32_t right_id = new_node();
    tree.feature[task.node_id] = best_feature;
    tree.threshold[task.node_id] = best_threshold;
    tree.left[task.node_id] = left_id;
    tree.right[task.node_id] = right_id;
    stack.push_back({right_id, std::move(right_arrays)});
    stack.push_back({left_id, std::move(left_arrays)});
  }
  return tree;
}

NodeArrays presort(std::span<const TrainingExample> data) {
  NodeArrays base;
  base.ids.resize(data.size());
  for (std::uint32_t i = 0; i < data.size(); ++i) base.ids[i] = i;
  for (int f = 0; f < kF; ++f) {
    std::vector<std::uint32_t>& ord = base.order[f];
    ord.resize(data.size());
    for (std::uint32_t i = 0; i < data.size(); ++i) ord[i] = i;
    std::sort(ord.begin(), ord.end(),
              [&data, f](std::uint32_t a, std::uint32_t b) {
                const double va = feature_at(data, a, f);
                const double vb = feature_at(data, b, f);
                if (va != vb) return va < vb;
                return a < b;
              });
  }
  return base;
}

void check_fit_args(std::span<const TrainingExample> data, int min_leaf) {
  if (data.empty()) throw std::invalid_argument("fit: empty training data");
  if (min_leaf < 1) throw std::invalid_argument("fit: min_leaf must be >= 1");
  for (const TrainingExample& ex : data) {
    if (!std::isfinite(ex.label)) {
      throw std::invalid_argument("fit: non-finite label");
    }
    for (double v : ex.features) {
      if (!std::isfinite(v)) {
        throw std::invalid_argument("fit: non-finite feature");
      }
    }
  }
}

}  // namespace

double RegressionTree::predict(std::span<const double> x) const {
  std::int32_t id = 0;
  while (feature[id] >= 0) {
    id = x[feature[id]] <= threshold[id] ? left[id] : right[id];
  }
  return value[id];
}

RegressionTree fit_tree(std::span<const TrainingExample> data, int min_leaf) {
  check_fit_args(data, min_leaf);
  std::vector<std::uint32_t> weight(data.size(), 1);
  return build_tree(data, weight, presort(data), min_leaf);
}

std::vector<std::uint32_t> bootstrap_indices(std::uint64_t seed,
                                             int tree_index, std::size_t n) {
  if (n == 0) throw std::invalid_argument("bootstrap: empty dataset");
  Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(tree_index));
  std::vector<std::uint32_t> draws(n);
  for (std::uint32_t& d : draws) {
    d = static_cast<std::uint32_t>(rng.bounded(n));
  }
  return draws;
}

TreeEnsemble fit_ensemble(std::span<const TrainingExample> data, int n_trees,
                          int min_leaf, std::uint64_t seed) {
  if (n_trees < 1) throw std::invalid_argument("fit_ensemble: n_trees < 1");
  check_fit_args(data, min_leaf);

  const NodeArrays base = presort(data);
  TreeEnsemble ens;
  ens.seed = seed;
  ens.min_leaf = min_leaf;
  double lo = data[0].label;
  double hi = data[0].label;
  for (const TrainingExample& ex : data) {
    lo = std::min(lo, ex.label);
    hi = std::max(hi, ex.label);
  }
  ens.label_range = {lo, hi};
  ens.trees.reserve(static_cast<std::size_t>(n_trees));

  std::vector<std::uint32_t> weight(data.size());
  for (int t = 0; t < n_trees; ++t) {
    std::fill(weight.begin(), weight.end(), 0);
    for (std::uint32_t d : bootstrap_indices(seed, t, data.size())) {
      ++weight[d];
    }
    NodeArrays root;
    for (int f = 0; f < kF; ++f) {
      root.order[f].reserve(data.size());
      for (std::uint32_t id : base.order[f]) {
        if (weight[id] > 0) root.order[f].push_back(id);
      }
    }
    root.ids.reserve(data.size());
    for (std::uint32_t id : base.ids) {
      if (weight[id] > 0) root.ids.push_back(id);
    }
    ens.trees.push_back(build_tree(data, weight, std::move(root), min_leaf));
  }
  return ens;
}

double predict(const TreeEnsemble& ens, const FeatureVector& f) {
  if (ens.trees.empty()) throw std::invalid_argument("predict: empty ensemble");
  double sum = 0.0;
  for (const RegressionTree& tree : ens.trees) {
    sum += tree.predict(std::span<const double>(f.data(), f.size()));
  }
  const double mean = sum / static_cast<double>(ens.trees.size());
  return std::clamp(mean, ens.label_range.first, ens.label_range.second);
}

double evaluate_mse(const TreeEnsemble& ens,
                    std::span<const TrainingExample> test) {
  if (test.empty()) throw std::invalid_argument("evaluate_mse: empty test set");
  double sum = 0.0;
  for (const TrainingExample& ex : test) {
    const double r = ex.label - predict(ens, ex.features);
    sum += r * r;
  }
  return sum / static_cast<double>(test.size());
}

void save_ensemble(const TreeEnsemble& ens, const std::string& path) {
  nlohmann::json j;
  j["format_version"] = 1;
  j["model"] = "bagged-regression-trees";
  j["n_trees"] = ens.trees.size();
  j["min_leaf"] = ens.min_leaf;
  j["seed"] = ens.seed;
  j["label_range"] = {ens.label_range.first, ens.label_range.second};
  j["window_length"] = ens.window_length;
  j["feature_count"] = kFeatureCount;
  nlohmann::json trees = nlohmann::json::array();
  for (const RegressionTree& t : ens.trees) {
    nlohmann::json jt;
    jt["feature"] = t.feature;
    jt["threshold"] = t.threshold;
    jt["left"] = t.left;
    jt["right"] = t.right;
    jt["value"] = t.value;
    trees.push_back(std::move(jt));
  }
  j["trees"] = std::move(trees);

  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_ensemble: cannot open " + path);
  out << j.dump(2) << "\n";
  if (!out) throw std::runtime_error("save_ensemble: write failed: " + path);
}

TreeEnsemble load_ensemble(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_ensemble: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("load_ensemble: bad JSON in " + path + ": " +
                             e.what());
  }
  if (!j.contains("format_version") || j["format_version"].get<int>() != 1) {
    throw std::runtime_error("load_ensemble: unsupported format_version");
  }
  TreeEnsemble ens;
  ens.seed = j.at("seed").get<std::uint64_t>();
  ens.min_leaf = j.at("min_leaf").get<int>();
  const auto range = j.at("label_range");
  if (!range.is_array() || range.size() != 2) {
    throw std::runtime_error("load_ensemble: label_range must be [lo, hi]");
  }
  ens.label_range = {range[0].get<double>(), range[1].get<double>()};
  ens.window_length = j.at("window_length").get<std::size_t>();
  for (const nlohmann::json& jt : j.at("trees")) {
    RegressionTree t;
    t.feature = jt.at("feature").get<std::vector<std::int32_t>>();
    t.threshold = jt.at("threshold").get<std::vector<double>>();
    t.left = jt.at("left").get<std::vector<std::int32_t>>();
    t.right = jt.at("right").get<std::vector<std::int32_t>>();
    t.value = jt.at("value").get<std::vector<double>>();
    const std::size_t n = t.feature.size();
    if (n == 0 || t.threshold.size() != n || t.left.size() != n ||
        t.right.size() != n || t.value.size() != n) {
      throw std::runtime_error("load_ensemble: inconsistent tree arrays");
    }
    for (std::size_t i = 0; i < n; ++i) {
      const bool leaf = t.feature[i] < 0;
      if (leaf) continue;
      if (t.feature[i] >= static_cast<std::int32_t>(kFeatureCount) ||
          t.left[i] < 0 || t.left[i] >= static_cast<std::int32_t>(n) ||
          t.right[i] < 0 || t.right[i] >= static_cast<std::int32_t>(n)) {
        throw std::runtime_error("load_ensemble: invalid node links");
      }
    }
    ens.trees.push_back(std::move(t));
  }
  if (ens.trees.empty()) throw std::runtime_error("load_ensemble: no trees");
  if (j.at("n_trees").get<std::size_t>() != ens.trees.size()) {
    throw std::runtime_error("load_ensemble: n_trees mismatch");
  }
  return ens;
}

}  // namespace auvnav
