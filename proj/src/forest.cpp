#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "airwaycl/csv.hpp"
#include "airwaycl/rng.hpp"
#include "airwaycl/scoring.hpp"

namespace airwaycl::scoring {
namespace {

using Matrix = std::vector<std::vector<double>>;

struct TreeBuilder {
  const Matrix& X;
  const std::vector<double>& y;
  const ForestParams& params;
  int n_features;
  int mtry;
  CounterRng rng;
  RegressionTree tree;

  TreeBuilder(const Matrix& X_, const std::vector<double>& y_, const ForestParams& p_,
              int n_features_, int mtry_, std::uint64_t tree_index)
      : X(X_), y(y_), params(p_), n_features(n_features_), mtry(mtry_),
        rng(p_.seed, rng_stream::with_index(rng_stream::forest_tree, tree_index)) {}

  std::vector<int> draw_bag(int n, std::vector<std::uint8_t>& in_bag) {
    std::vector<int> bag;
    bag.reserve(std::size_t(n));
    in_bag.assign(std::size_t(n), 0);
    if (params.bootstrap) {
      for (int i = 0; i < n; ++i) {
        const int k = int(rng.next_below(std::uint64_t(n)));
        bag.push_back(k);
        in_bag[std::size_t(k)] = 1;
      }
    } else {
      for (int i = 0; i < n; ++i) {
        bag.push_back(i);
        in_bag[std::size_t(i)] = 1;
      }
    }
    return bag;
  }

  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double objective = -1.0;  // sumL^2/nL + sumR^2/nR, larger is better
  };

  // Best variance-reduction split for one feature; requires min_leaf on both
  // sides and distinct values across the cut.
  bool best_split_on(const std::vector<int>& samples, int f, Split& best) const {
    const std::size_t m = samples.size();
    std::vector<std::pair<double, std::size_t>> order(m);
    for (std::size_t k = 0; k < m; ++k) order[k] = {X[std::size_t(samples[k])][std::size_t(f)], k};
    std::sort(order.begin(), order.end());

    std::vector<double> prefix(m + 1, 0.0);
    for (std::size_t k = 0; k < m; ++k)
      prefix[k + 1] = prefix[k] + y[std::size_t(samples[order[k].second])];
    const double total = prefix[m];

    bool found = false;
    const std::size_t lo = std::size_t(params.min_leaf);
    for (std::size_t k = lo; k + lo <= m; ++k) {
      const double vl = order[k - 1].first, vr = order[k].first;
      if (!(vl < vr)) continue;
      const double sl = prefix[k], sr = total - sl;
      const double obj = sl * sl / double(k) + sr * sr / double(m - k);
      if (obj > best.objective) {
        double thr = vl + (vr - vl) * 0.5;
        if (!(thr < vr)) thr = vl;  // adjacent floats: keep the cut below vr
        best = {f, thr, obj};
        found = true;
      }
    }
    return found;
  }

  int build(std::vector<int> samples, int depth) {
    const auto leaf = [&](const std::vector<int>& s) {
      // pure leaves keep the exact value, mixed leaves take the mean
      double mean = y[std::size_t(s[0])];
      bool all_equal = true;
      for (const int i : s) all_equal = all_equal && y[std::size_t(i)] == mean;
      if (!all_equal) {
        mean = 0.0;
        for (const int i : s) mean += y[std::size_t(i)];
        mean /= double(s.size());
      }
      tree.nodes.push_back({-1, 0.0, -1, -1, mean});
      return int(tree.nodes.size() - 1);
    };

    bool pure = true;
    for (std::size_t k = 1; k < samples.size(); ++k)
      if (y[std::size_t(samples[k])] != y[std::size_t(samples[0])]) {
        pure = false;
        break;
      }
    if (pure || int(samples.size()) < 2 * params.min_leaf ||
        (params.max_depth > 0 && depth >= params.max_depth))
      return leaf(samples);

    // Features are tried in a freshly drawn order; if none of the first mtry
    // admit a valid split, keep going until one does.
    std::vector<int> all(static_cast<std::size_t>(n_features), 0);
    for (int f = 0; f < n_features; ++f) all[std::size_t(f)] = f;
    const std::vector<int> order = rng.sample_without_replacement(all, all.size());

    Split best;
    int tried = 0;
    for (const int f : order) {
      best_split_on(samples, f, best);
      ++tried;
      if (tried >= mtry && best.feature >= 0) break;
    }
    if (best.feature < 0) return leaf(samples);

    std::vector<int> left, right;
    for (const int i : samples) {
      if (X[std::size_t(i)][std::size_t(best.feature)] <= best.threshold)
        left.push_back(i);
      else
        right.push_back(i);
    }
    samples.clear();
    samples.shrink_to_fit();

    tree.nodes.push_back({best.feature, best.threshold, -1, -1, 0.0});
    const int node = int(tree.nodes.size() - 1);
    const int l = build(std::move(left), depth + 1);
    const int r = build(std::move(right), depth + 1);
    tree.nodes[std::size_t(node)].left = l;
    tree.nodes[std::size_t(node)].right = r;
    return node;
  }
};

nlohmann::ordered_json composite_to_json(const CompositeTargetModel& c) {
  return {{"metric_names", c.metric_names},
          {"orientation", c.orientation},
          {"means", c.means},
          {"stdevs", c.stdevs},
          {"weights", c.weights}};
}

CompositeTargetModel composite_from_json(const nlohmann::json& j) {
  CompositeTargetModel c;
  c.metric_names = j.at("metric_names").get<std::vector<std::string>>();
  c.orientation = j.at("orientation").get<std::vector<int>>();
  c.means = j.at("means").get<std::vector<double>>();
  c.stdevs = j.at("stdevs").get<std::vector<double>>();
  c.weights = j.at("weights").get<std::vector<double>>();
  return c;
}

}  // namespace

ForestModel fit_forest(const Matrix& X, const std::vector<double>& y, ForestParams params) {
  const int n = int(X.size());
  if (n < 5) throw std::invalid_argument("fit_forest: need at least 5 samples");
  if (y.size() != X.size()) throw std::invalid_argument("fit_forest: X/y row count mismatch");
  const int p = int(X[0].size());
  if (p < 1) throw std::invalid_argument("fit_forest: need at least one feature");
  for (const auto& row : X)
    if (int(row.size()) != p) throw std::invalid_argument("fit_forest: ragged feature matrix");
  if (params.tree_count < 1) throw std::invalid_argument("fit_forest: tree_count must be >= 1");
  if (params.min_leaf < 1) throw std::invalid_argument("fit_forest: min_leaf must be >= 1");

  ForestModel model;
  model.n_features = p;
  model.params = params;
  model.trees.resize(std::size_t(params.tree_count));
  model.constant_target =
      std::all_of(y.begin(), y.end(), [&](double v) { return v == y[0]; });

  const int mtry = params.features_per_split > 0 ? std::min(params.features_per_split, p)
                                                 : (p + 2) / 3;

  std::vector<std::vector<std::uint8_t>> in_bag(std::size_t(params.tree_count));

  const auto train_tree = [&](int t) {
    TreeBuilder tb(X, y, params, p, mtry, std::uint64_t(t));
    const std::vector<int> bag = tb.draw_bag(n, in_bag[std::size_t(t)]);
    tb.build(bag, 0);
    model.trees[std::size_t(t)] = std::move(tb.tree);
  };

  int threads = params.threads > 0 ? params.threads : int(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, params.tree_count));
  if (threads == 1) {
    for (int t = 0; t < params.tree_count; ++t) train_tree(t);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(std::size_t(threads));
    for (int w = 0; w < threads; ++w)
      pool.emplace_back([&] {
        for (int t = next.fetch_add(1); t < params.tree_count; t = next.fetch_add(1))
          train_tree(t);
      });
    for (auto& th : pool) th.join();
  }

  // out-of-bag R^2 over samples left out of at least one bag
  std::vector<double> oob_sum(std::size_t(n), 0.0);
  std::vector<int> oob_count(std::size_t(n), 0);
  for (int t = 0; t < params.tree_count; ++t)
    for (int i = 0; i < n; ++i)
      if (!in_bag[std::size_t(t)][std::size_t(i)]) {
        oob_sum[std::size_t(i)] += predict_tree(model.trees[std::size_t(t)], X[std::size_t(i)]);
        ++oob_count[std::size_t(i)];
      }
  double mean = 0.0;
  int covered = 0;
  for (int i = 0; i < n; ++i)
    if (oob_count[std::size_t(i)] > 0) {
      mean += y[std::size_t(i)];
      ++covered;
    }
  if (covered > 0) {
    mean /= double(covered);
    double sse = 0.0, sst = 0.0;
    for (int i = 0; i < n; ++i)
      if (oob_count[std::size_t(i)] > 0) {
        const double pred = oob_sum[std::size_t(i)] / double(oob_count[std::size_t(i)]);
        sse += (y[std::size_t(i)] - pred) * (y[std::size_t(i)] - pred);
        sst += (y[std::size_t(i)] - mean) * (y[std::size_t(i)] - mean);
      }
    if (sst > 0.0 && !model.constant_target) model.oob_r2 = 1.0 - sse / sst;
  }
  return model;
}

double predict_tree(const RegressionTree& tree, const std::vector<double>& x) {
  int k = 0;
  while (tree.nodes[std::size_t(k)].feature >= 0) {
    const auto& nd = tree.nodes[std::size_t(k)];
    k = x[std::size_t(nd.feature)] <= nd.threshold ? nd.left : nd.right;
  }
  return tree.nodes[std::size_t(k)].value;
}

double predict_score(const ForestModel& model, const std::vector<double>& x) {
  if (int(x.size()) != model.n_features)
    throw std::invalid_argument("predict_score: feature dimension mismatch (got " +
                                std::to_string(x.size()) + ", model wants " +
                                std::to_string(model.n_features) + ")");
  double sum = 0.0;
  const double first = predict_tree(model.trees[0], x);
  bool all_equal = true;
  for (const auto& t : model.trees) {
    const double p = predict_tree(t, x);
    all_equal = all_equal && p == first;
    sum += p;
  }
  if (all_equal) return first;  // keep unanimous predictions exact
  return sum / double(model.trees.size());
}

std::string forest_to_json(const ForestModel& model) {
  nlohmann::ordered_json j;
  j["format"] = "airwaycl-forest";
  j["version"] = 1;
  j["n_features"] = model.n_features;
  j["params"] = {{"tree_count", model.params.tree_count},
                 {"max_depth", model.params.max_depth},
                 {"min_leaf", model.params.min_leaf},
                 {"features_per_split", model.params.features_per_split},
                 {"bootstrap", model.params.bootstrap},
                 {"seed", model.params.seed}};
  if (model.oob_r2)
    j["oob_r2"] = *model.oob_r2;
  else
    j["oob_r2"] = nullptr;
  j["constant_target"] = model.constant_target;
  if (model.composite)
    j["composite"] = composite_to_json(*model.composite);
  else
    j["composite"] = nullptr;
  j["trees"] = nlohmann::ordered_json::array();
  for (const auto& t : model.trees) {
    nlohmann::ordered_json jt;
    std::vector<int> feature, left, right;
    std::vector<double> threshold, value;
    for (const auto& nd : t.nodes) {
      feature.push_back(nd.feature);
      threshold.push_back(nd.threshold);
      left.push_back(nd.left);
      right.push_back(nd.right);
      value.push_back(nd.value);
    }
    jt["feature"] = feature;
    jt["threshold"] = threshold;
    jt["left"] = left;
    jt["right"] = right;
    jt["value"] = value;
    j["trees"].push_back(std::move(jt));
  }
  return j.dump();
}

ForestModel forest_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  if (j.at("format") != "airwaycl-forest")
    throw std::invalid_argument("forest_from_json: not a forest model file");
  if (j.at("version") != 1)
    throw std::invalid_argument("forest_from_json: unsupported version");
  ForestModel m;
  m.n_features = j.at("n_features").get<int>();
  const auto& p = j.at("params");
  m.params.tree_count = p.at("tree_count").get<int>();
  m.params.max_depth = p.at("max_depth").get<int>();
  m.params.min_leaf = p.at("min_leaf").get<int>();
  m.params.features_per_split = p.at("features_per_split").get<int>();
  m.params.bootstrap = p.at("bootstrap").get<bool>();
  m.params.seed = p.at("seed").get<std::uint64_t>();
  if (!j.at("oob_r2").is_null()) m.oob_r2 = j.at("oob_r2").get<double>();
  m.constant_target = j.at("constant_target").get<bool>();
  if (!j.at("composite").is_null()) m.composite = composite_from_json(j.at("composite"));
  for (const auto& jt : j.at("trees")) {
    RegressionTree t;
    const auto feature = jt.at("feature").get<std::vector<int>>();
    const auto threshold = jt.at("threshold").get<std::vector<double>>();
    const auto left = jt.at("left").get<std::vector<int>>();
    const auto right = jt.at("right").get<std::vector<int>>();
    const auto value = jt.at("value").get<std::vector<double>>();
    for (std::size_t k = 0; k < feature.size(); ++k)
      t.nodes.push_back({feature[k], threshold[k], left[k], right[k], value[k]});
    m.trees.push_back(std::move(t));
  }
  if (m.trees.empty()) throw std::invalid_argument("forest_from_json: no trees");
  return m;
}

void save_forest(const ForestModel& model, const std::string& path) {
  csv::write_text_file(path, forest_to_json(model));
}

ForestModel load_forest(const std::string& path) {
  return forest_from_json(csv::read_text_file(path));
}

}  // namespace airwaycl::scoring
