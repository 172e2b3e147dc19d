#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "airwaycl/metrics.hpp"

namespace airwaycl::scoring {

/// CS_B = 1 - IoU. iou must lie in [0, 1].
double bootstrap_score(double iou);

/// Standardization + PCA weights for the composite quality target y.
/// Columns are first oriented so larger means better (orientation -1 flips),
/// then standardized; weights are the absolute first-principal-component
/// loadings normalized to sum 1. Zero-variance columns carry weight 0.
struct CompositeTargetModel {
  std::vector<std::string> metric_names;
  std::vector<int> orientation;  // +1 larger-is-better, -1 smaller-is-better
  std::vector<double> means;     // of the oriented columns
  std::vector<double> stdevs;    // 1 for zero-variance columns
  std::vector<double> weights;   // >= 0, sum to 1
};

/// metric_matrix is row-major (one row per scan). Requires >= 2 rows and at
/// least one non-constant column.
CompositeTargetModel fit_composite_target(const std::vector<std::vector<double>>& metric_matrix,
                                          const std::vector<std::string>& metric_names,
                                          const std::vector<int>& orientation);

/// Weighted standardized quality of one row (ordered as metric_names).
double composite_quality(const CompositeTargetModel& model, const std::vector<double>& row);

/// Complexity score y = -quality (higher = more complex). Unknown metric
/// names throw; a metric that is flagged undefined in the report yields an
/// empty result.
std::optional<double> composite_score(const CompositeTargetModel& model,
                                      const metrics::MetricReport& report);

/// Built-in larger-is-better map for MetricReport field names.
int default_orientation(const std::string& metric_name);

// ---------------------------------------------------------------------------
// Random-forest regressor
// ---------------------------------------------------------------------------

struct ForestParams {
  int tree_count = 200;
  int max_depth = 16;  // <= 0 means unlimited
  int min_leaf = 2;
  int features_per_split = 0;  // 0 means ceil(p / 3)
  bool bootstrap = true;
  std::uint64_t seed = 0;
  int threads = 0;  // 0 means hardware concurrency
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1, right = -1;
  double value = 0.0;  // leaf mean
};

struct RegressionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
};

struct ForestModel {
  int n_features = 0;
  ForestParams params;
  std::vector<RegressionTree> trees;
  std::optional<double> oob_r2;
  bool constant_target = false;
  std::optional<CompositeTargetModel> composite;  // training provenance
};

/// Bagged CART regression trees with variance-reduction splits and per-split
/// random feature subsets. Tree t draws all randomness from CounterRng
/// stream (forest_tree, t), so parallel and serial training give identical
/// forests. Requires >= 5 samples.
ForestModel fit_forest(const std::vector<std::vector<double>>& X, const std::vector<double>& y,
                       ForestParams params);

double predict_tree(const RegressionTree& tree, const std::vector<double>& x);

/// Mean over trees of leaf values. Throws on feature-count mismatch.
double predict_score(const ForestModel& model, const std::vector<double>& x);

std::string forest_to_json(const ForestModel& model);
ForestModel forest_from_json(const std::string& text);
void save_forest(const ForestModel& model, const std::string& path);
ForestModel load_forest(const std::string& path);

// ---------------------------------------------------------------------------
// Ranking and score histograms
// ---------------------------------------------------------------------------

struct ScoreRow {
  std::string id;
  double score = 0.0;
  int rank = 0;  // 1-based, ascending score
};

struct ScoreTable {
  std::vector<ScoreRow> rows;  // sorted ascending by (score, id)
};

/// Ascending score order (easy to hard); ties broken by id. Throws on
/// duplicate ids or non-finite scores.
ScoreTable rank(const std::vector<std::pair<std::string, double>>& scores);

std::string score_table_to_csv(const ScoreTable& table);
ScoreTable score_table_from_csv(const std::string& text);
void save_score_table(const ScoreTable& table, const std::string& path);
ScoreTable load_score_table(const std::string& path);

struct ScoreHistogram {
  double lo = 0.0, hi = 0.0;
  std::vector<std::int64_t> counts;  // uniform bins over [lo, hi], last inclusive
  double mean = 0.0;
  double stdev = 0.0;  // population standard deviation
};

ScoreHistogram score_histogram(const ScoreTable& table, int bins);
std::string histogram_to_csv(const ScoreHistogram& h);

}  // namespace airwaycl::scoring
