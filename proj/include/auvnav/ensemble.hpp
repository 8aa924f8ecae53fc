#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "auvnav/features.hpp"

namespace auvnav {

struct TrainingExample {
  FeatureVector features{};
  double label = 0.0;
};

// Flattened binary regression tree. Internal nodes test
// x[feature] <= threshold (left on true); leaves have feature == -1 and carry
// the mean label of their training examples.
struct RegressionTree {
  std::vector<std::int32_t> feature;
  std::vector<double> threshold;
  std::vector<std::int32_t> left;
  std::vector<std::int32_t> right;
  std::vector<double> value;

  double predict(std::span<const double> x) const;
  std::size_t node_count() const { return feature.size(); }
};

struct TreeEnsemble {
  std::vector<RegressionTree> trees;
  std::uint64_t seed = 0;
  int min_leaf = 8;
  std::pair<double, double> label_range{0.001, 0.05};
  std::size_t window_length = kWindowLength;
};

/// Greedy CART with variance-reduction splits: exact search over all
/// features, thresholds at midpoints between consecutive distinct sorted
/// values; a split is legal only if both children keep at least min_leaf
/// examples. Ties break to the lowest feature index, then lowest threshold.
RegressionTree fit_tree(std::span<const TrainingExample> data, int min_leaf);

/// Bootstrap index multiset (n draws with replacement) for one tree, derived
/// deterministically from the ensemble seed and the tree index.
std::vector<std::uint32_t> bootstrap_indices(std::uint64_t seed, int tree_index,
                                             std::size_t n);

/// Trains n_trees bagged CART regressors. label_range is stamped with the
/// min/max training label so predictions stay inside the observed domain.
TreeEnsemble fit_ensemble(std::span<const TrainingExample> data,
                          int n_trees = 30, int min_leaf = 8,
                          std::uint64_t seed = 0);

/// Mean of the tree predictions, clamped to the training label range.
double predict(const TreeEnsemble& ens, const FeatureVector& f);

/// Mean squared label-prediction residual.
double evaluate_mse(const TreeEnsemble& ens,
                    std::span<const TrainingExample> test);

void save_ensemble(const TreeEnsemble& ens, const std::string& path);
TreeEnsemble load_ensemble(const std::string& path);

}  // namespace auvnav
