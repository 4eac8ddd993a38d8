#include <algorithm>
#include <cmath>
#include <numeric>

#include "ecgbeat/errors.hpp"
#include "ecgbeat/model.hpp"
#include "ecgbeat/rng.hpp"
#include "model_internal.hpp"

namespace ecgbeat {

namespace {

struct PendingNode {
    std::size_t id;
    std::size_t depth;
    std::vector<std::size_t> rows;  // bootstrap sample, duplicates allowed
};

// Sum of squared class counts over n; larger means purer (Gini = 1 - this / n).
double purity(std::span<const double> counts, double n) {
    double s = 0.0;
    for (double c : counts) s += c * c;
    return s / n;
}

class ForestTreeBuilder {
public:
    ForestTreeBuilder(const Matrix& rows, std::span<const ClassId> labels, std::size_t n_classes,
                      const RfParams& params, Rng& rng)
        : rows_(rows), labels_(labels), k_(n_classes), params_(params), rng_(rng) {}

    Tree build(std::vector<std::size_t> sample) {
        Tree tree;
        tree.nodes.emplace_back();
        std::vector<PendingNode> queue;
        queue.push_back({0, 0, std::move(sample)});
        for (std::size_t q = 0; q < queue.size(); ++q) {
            PendingNode current = std::move(queue[q]);
            std::vector<double> counts(k_, 0.0);
            for (std::size_t i : current.rows) counts[static_cast<std::size_t>(labels_[i])] += 1.0;

            const bool depth_capped = params_.max_depth > 0 && current.depth >= params_.max_depth;
            const bool pure = std::count_if(counts.begin(), counts.end(), [](double c) { return c > 0.0; }) <= 1;
            const bool too_small = current.rows.size() < 2 * params_.min_samples_leaf;
            Split split;
            if (!depth_capped && !pure && !too_small) split = best_split(current.rows, counts);
            if (!split.found) {
                tree.nodes[current.id].value = std::move(counts);
                continue;
            }

            std::vector<std::size_t> left, right;
            for (std::size_t i : current.rows)
                (rows_(i, split.feature) <= split.threshold ? left : right).push_back(i);
            const auto left_id = static_cast<std::int32_t>(tree.nodes.size());
            tree.nodes.emplace_back();
            tree.nodes.emplace_back();
            auto& node = tree.nodes[current.id];
            node.feature = static_cast<std::int32_t>(split.feature);
            node.threshold = split.threshold;
            node.left = left_id;
            node.right = left_id + 1;
            queue.push_back({static_cast<std::size_t>(left_id), current.depth + 1, std::move(left)});
            queue.push_back({static_cast<std::size_t>(left_id) + 1, current.depth + 1, std::move(right)});
        }
        return tree;
    }

private:
    struct Split {
        bool found = false;
        double gain = 0.0;
        std::size_t feature = 0;
        double threshold = 0.0;
    };

    std::vector<std::size_t> draw_features() {
        const std::size_t n_features = rows_.cols();
        std::vector<std::size_t> features(n_features);
        std::iota(features.begin(), features.end(), std::size_t{0});
        const std::size_t take = std::min(params_.features_per_split, n_features);
        for (std::size_t i = 0; i < take; ++i)
            std::swap(features[i], features[i + static_cast<std::size_t>(rng_.below(n_features - i))]);
        features.resize(take);
        std::sort(features.begin(), features.end());
        return features;
    }

    Split best_split(const std::vector<std::size_t>& node_rows, const std::vector<double>& counts) {
        const auto n = static_cast<double>(node_rows.size());
        const double parent = purity(counts, n);
        const std::size_t min_leaf = params_.min_samples_leaf;
        Split best;
        std::vector<std::size_t> order = node_rows;
        std::vector<double> left(k_), right(k_);

        for (std::size_t f : draw_features()) {
            std::stable_sort(order.begin(), order.end(),
                             [&](std::size_t a, std::size_t b) { return rows_(a, f) < rows_(b, f); });
            std::fill(left.begin(), left.end(), 0.0);
            right = counts;
            for (std::size_t pos = 1; pos < order.size(); ++pos) {
                const auto cls = static_cast<std::size_t>(labels_[order[pos - 1]]);
                left[cls] += 1.0;
                right[cls] -= 1.0;
                const double lo = rows_(order[pos - 1], f);
                const double hi = rows_(order[pos], f);
                if (lo == hi || pos < min_leaf || order.size() - pos < min_leaf) continue;
                const auto nl = static_cast<double>(pos);
                const double gain = purity(left, nl) + purity(right, n - nl) - parent;
                if (gain > best.gain + 1e-12) {
                    best = {true, gain, f, detail::split_point(lo, hi)};
                }
            }
        }
        return best;
    }

    const Matrix& rows_;
    std::span<const ClassId> labels_;
    std::size_t k_;
    const RfParams& params_;
    Rng& rng_;
};

}  // namespace

EnsembleModel fit_random_forest(const Matrix& rows, std::span<const ClassId> labels, const RfParams& params,
                                std::size_t n_classes) {
    params.validate();
    const std::size_t k = detail::check_training_input(rows, labels, n_classes);
    const std::size_t n = rows.rows();

    EnsembleModel model;
    model.kind = ModelKind::forest;
    model.n_classes = k;
    model.n_features = rows.cols();

    Rng rng(params.seed);
    ForestTreeBuilder builder(rows, labels, k, params, rng);
    for (std::size_t t = 0; t < params.n_trees; ++t) {
        std::vector<std::size_t> sample(n);
        if (params.bootstrap) {
            for (auto& s : sample) s = static_cast<std::size_t>(rng.below(n));
            std::sort(sample.begin(), sample.end());
        } else {
            std::iota(sample.begin(), sample.end(), std::size_t{0});
        }
        model.trees.push_back(builder.build(std::move(sample)));
    }
    return model;
}

}  // namespace ecgbeat
