#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include <nlohmann/json.hpp>

#include "gpncast/common.hpp"
#include "gpncast/rng.hpp"

namespace gpncast {

struct ForestConfig {
    int n_estimators = 400;
    int max_depth = 0;        // 0 = grow to purity
    int min_samples_leaf = 1;
    int mtry = 0;             // features tried per split; 0 = max(1, n/3)
    std::uint64_t seed = 0;
};

/// One CART regression tree stored as flat node arrays. Internal nodes send
/// x[feature] <= threshold left; leaves carry the mean target.
struct Tree {
    std::vector<int> feature;       // -1 for leaves
    std::vector<double> threshold;
    std::vector<int> left;
    std::vector<int> right;
    std::vector<double> value;

    double predict_row(const std::vector<double>& row) const {
        int node = 0;
        while (feature[static_cast<std::size_t>(node)] >= 0) {
            const auto f = static_cast<std::size_t>(feature[static_cast<std::size_t>(node)]);
            node = row[f] <= threshold[static_cast<std::size_t>(node)]
                       ? left[static_cast<std::size_t>(node)]
                       : right[static_cast<std::size_t>(node)];
        }
        return value[static_cast<std::size_t>(node)];
    }

    int add_node() {
        feature.push_back(-1);
        threshold.push_back(0.0);
        left.push_back(-1);
        right.push_back(-1);
        value.push_back(0.0);
        return static_cast<int>(feature.size()) - 1;
    }
};

namespace forest_detail {

struct BuildItem {
    int node;
    std::vector<std::size_t> samples;  // indices into the bootstrap view
    int depth;
};

struct SplitChoice {
    bool found = false;
    std::size_t feature = 0;
    double threshold = 0.0;
    double score = 0.0;  // sum_l^2/n_l + sum_r^2/n_r, to be maximized
};

/// Best variance-reduction split over a feature subset. Features are scanned
/// in ascending index order and thresholds in ascending value order with a
/// strictly-greater acceptance test, so ties resolve to the lowest feature
/// index and then the lowest threshold.
inline SplitChoice best_split(const std::vector<std::vector<double>>& rows,
                              const std::vector<double>& y,
                              const std::vector<std::size_t>& samples,
                              std::vector<std::size_t> features,
                              int min_samples_leaf) {
    std::sort(features.begin(), features.end());
    const std::size_t n = samples.size();
    double total = 0.0;
    for (std::size_t s : samples) total += y[s];
    const double parent_score = total * total / static_cast<double>(n);

    SplitChoice best;
    std::vector<std::size_t> order(samples);
    std::vector<double> prefix(n + 1, 0.0);
    for (std::size_t f : features) {
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return rows[a][f] < rows[b][f];
        });
        for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + y[order[i]];
        const auto leaf = static_cast<std::size_t>(min_samples_leaf);
        for (std::size_t k = leaf; k + leaf <= n; ++k) {
            const double xl = rows[order[k - 1]][f];
            const double xr = rows[order[k]][f];
            if (!(xl < xr)) continue;
            const double sum_l = prefix[k];
            const double sum_r = total - sum_l;
            const double score = sum_l * sum_l / static_cast<double>(k) +
                                 sum_r * sum_r / static_cast<double>(n - k);
            if (score - parent_score >
                    1e-12 * std::max(1.0, std::abs(parent_score)) &&
                (!best.found || score > best.score)) {
                best.found = true;
                best.feature = f;
                // midpoint can round up to xr when xl and xr are adjacent
                // doubles; fall back to xl so the <= test keeps both sides
                // non-empty
                double thr = xl + (xr - xl) / 2.0;
                if (!(thr < xr)) thr = xl;
                best.threshold = thr;
                best.score = score;
            }
        }
    }
    return best;
}

inline Tree build_tree(const std::vector<std::vector<double>>& rows,
                       const std::vector<double>& y,
                       const std::vector<std::size_t>& bootstrap,
                       const ForestConfig& cfg, std::size_t n_features,
                       Rng& rng) {
    const int mtry =
        cfg.mtry > 0 ? cfg.mtry
                     : std::max(1, static_cast<int>(n_features) / 3);
    Tree tree;
    std::vector<BuildItem> stack;
    stack.push_back({tree.add_node(), bootstrap, 0});

    while (!stack.empty()) {
        BuildItem item = std::move(stack.back());
        stack.pop_back();
        const auto node = static_cast<std::size_t>(item.node);
        const auto& samples = item.samples;

        double sum = 0.0;
        for (std::size_t s : samples) sum += y[s];
        const double mean = sum / static_cast<double>(samples.size());
        tree.value[node] = mean;

        bool pure = true;
        for (std::size_t s : samples)
            if (y[s] != y[samples[0]]) {
                pure = false;
                break;
            }
        const bool depth_ok = cfg.max_depth <= 0 || item.depth < cfg.max_depth;
        if (pure || !depth_ok ||
            samples.size() < 2 * static_cast<std::size_t>(cfg.min_samples_leaf))
            continue;  // leaf

        const auto features = rng.sample_indices(
            n_features, static_cast<std::size_t>(mtry));
        const SplitChoice split = forest_detail::best_split(
            rows, y, samples, features, cfg.min_samples_leaf);
        if (!split.found) continue;  // no improving split in this subset

        std::vector<std::size_t> left_samples, right_samples;
        for (std::size_t s : samples) {
            if (rows[s][split.feature] <= split.threshold)
                left_samples.push_back(s);
            else
                right_samples.push_back(s);
        }
        tree.feature[node] = static_cast<int>(split.feature);
        tree.threshold[node] = split.threshold;
        const int l = tree.add_node();
        const int r = tree.add_node();
        tree.left[node] = l;
        tree.right[node] = r;
        stack.push_back({r, std::move(right_samples), item.depth + 1});
        stack.push_back({l, std::move(left_samples), item.depth + 1});
    }
    return tree;
}

}  // namespace forest_detail

/// Random forest regressor: n_estimators CART trees on bootstrap resamples
/// of size N, per-split feature subsampling, prediction = mean over trees.
/// Per-tree seeds derive from the master seed, so tree t is reproducible
/// independently of how the loop is scheduled.
class RandomForest {
public:
    ForestConfig config;
    std::vector<Tree> trees;

    static RandomForest fit(const std::vector<std::vector<double>>& rows,
                            const std::vector<double>& y,
                            const ForestConfig& cfg = {}) {
        if (rows.empty()) throw ValidationError("random forest: empty training set");
        if (rows.size() != y.size())
            throw ValidationError("random forest: row/target length mismatch");
        if (cfg.n_estimators <= 0)
            throw ValidationError("random forest: n_estimators must be positive");
        const std::size_t n = rows.size();
        const std::size_t n_features = rows[0].size();

        RandomForest forest;
        forest.config = cfg;
        forest.trees.reserve(static_cast<std::size_t>(cfg.n_estimators));
        for (int t = 0; t < cfg.n_estimators; ++t) {
            Rng rng(Rng::derive(cfg.seed, static_cast<std::uint64_t>(t)));
            std::vector<std::size_t> bootstrap(n);
            for (std::size_t i = 0; i < n; ++i)
                bootstrap[i] = static_cast<std::size_t>(rng.below(n));
            forest.trees.push_back(
                forest_detail::build_tree(rows, y, bootstrap, cfg, n_features, rng));
        }
        return forest;
    }

    double predict_row(const std::vector<double>& row) const {
        double sum = 0.0;
        for (const auto& t : trees) sum += t.predict_row(row);
        return sum / static_cast<double>(trees.size());
    }

    std::vector<double> predict(const std::vector<std::vector<double>>& rows) const {
        std::vector<double> out;
        out.reserve(rows.size());
        for (const auto& r : rows) out.push_back(predict_row(r));
        return out;
    }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["n_estimators"] = config.n_estimators;
        j["max_depth"] = config.max_depth;
        j["min_samples_leaf"] = config.min_samples_leaf;
        j["mtry"] = config.mtry;
        j["seed"] = config.seed;
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto& t : trees) {
            nlohmann::ordered_json tj;
            tj["feature"] = t.feature;
            tj["threshold"] = t.threshold;
            tj["left"] = t.left;
            tj["right"] = t.right;
            tj["value"] = t.value;
            arr.push_back(std::move(tj));
        }
        j["trees"] = std::move(arr);
        return j;
    }

    static RandomForest from_json(const nlohmann::json& j) {
        RandomForest f;
        f.config.n_estimators = j.at("n_estimators").get<int>();
        f.config.max_depth = j.at("max_depth").get<int>();
        f.config.min_samples_leaf = j.at("min_samples_leaf").get<int>();
        f.config.mtry = j.at("mtry").get<int>();
        f.config.seed = j.at("seed").get<std::uint64_t>();
        for (const auto& tj : j.at("trees")) {
            Tree t;
            t.feature = tj.at("feature").get<std::vector<int>>();
            t.threshold = tj.at("threshold").get<std::vector<double>>();
            t.left = tj.at("left").get<std::vector<int>>();
            t.right = tj.at("right").get<std::vector<int>>();
            t.value = tj.at("value").get<std::vector<double>>();
            f.trees.push_back(std::move(t));
        }
        return f;
    }
};

}  // namespace gpncast
