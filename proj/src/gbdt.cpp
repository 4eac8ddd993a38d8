#include <algorithm>
#include <cmath>

#include "ecgbeat/errors.hpp"
#include "ecgbeat/model.hpp"
#include "model_internal.hpp"

namespace ecgbeat {

namespace {

struct GradStats {
    double g = 0.0;
    double h = 0.0;
    std::size_t n = 0;

    void add(double gi, double hi) {
        g += gi;
        h += hi;
        ++n;
    }
};

double soft_threshold(double g, double alpha) {
    const double mag = std::abs(g) - alpha;
    if (mag <= 0.0) return 0.0;
    return g > 0.0 ? mag : -mag;
}

class LeafScorer {
public:
    LeafScorer(double alpha, double lambda) : alpha_(alpha), lambda_(lambda) {}

    /// Objective reduction of a leaf holding (G, H).
    double score(const GradStats& s) const {
        const double denom = s.h + lambda_;
        if (!(denom > 0.0)) return 0.0;
        const double t = soft_threshold(s.g, alpha_);
        return t * t / denom;
    }

    /// Unscaled optimal leaf weight -T(G) / (H + lambda).
    double weight(const GradStats& s) const {
        const double denom = s.h + lambda_;
        if (!(denom > 0.0)) return 0.0;
        return -soft_threshold(s.g, alpha_) / denom;
    }

private:
    double alpha_;
    double lambda_;
};

struct SplitChoice {
    bool found = false;
    double gain = 0.0;
    std::size_t feature = 0;
    double threshold = 0.0;
};

// Level-wise exact greedy regression tree on (gradient, hessian) pairs.
class TreeGrower {
public:
    TreeGrower(const detail::SortedColumns& cols, const GbdtParams& params)
        : cols_(cols), params_(params), scorer_(params.l1_alpha, params.l2_lambda) {}

    Tree grow(const std::vector<double>& grad, const std::vector<double>& hess) {
        const std::size_t n = cols_.n_rows;
        Tree tree;
        tree.nodes.emplace_back();
        std::vector<GradStats> stats(1);
        for (std::size_t i = 0; i < n; ++i) stats[0].add(grad[i], hess[i]);

        std::vector<std::int32_t> node_of(n, 0);
        std::vector<std::size_t> level{0};

        for (std::size_t depth = 0; depth < params_.max_depth && !level.empty(); ++depth) {
            // slot_of[node] indexes into this level's per-node arrays.
            std::vector<std::int32_t> slot_of(tree.nodes.size(), -1);
            for (std::size_t s = 0; s < level.size(); ++s) slot_of[level[s]] = static_cast<std::int32_t>(s);

            std::vector<SplitChoice> best(level.size());
            std::vector<GradStats> running(level.size());
            std::vector<double> last_value(level.size());

            for (std::size_t f = 0; f < cols_.values.size(); ++f) {
                const auto& col = cols_.values[f];
                std::fill(running.begin(), running.end(), GradStats{});
                for (std::size_t i : cols_.order[f]) {
                    const std::int32_t nd = node_of[i];
                    if (nd < 0) continue;
                    const std::int32_t slot = slot_of[static_cast<std::size_t>(nd)];
                    if (slot < 0) continue;
                    auto& left = running[static_cast<std::size_t>(slot)];
                    const double v = col[i];
                    if (left.n > 0 && v != last_value[static_cast<std::size_t>(slot)])
                        consider(stats[static_cast<std::size_t>(nd)], left, f,
                                 last_value[static_cast<std::size_t>(slot)], v, best[static_cast<std::size_t>(slot)]);
                    left.add(grad[i], hess[i]);
                    last_value[static_cast<std::size_t>(slot)] = v;
                }
            }

            std::vector<std::size_t> next_level;
            for (std::size_t s = 0; s < level.size(); ++s) {
                if (!best[s].found) continue;
                const std::size_t id = level[s];
                const auto left_id = static_cast<std::int32_t>(tree.nodes.size());
                tree.nodes.emplace_back();
                tree.nodes.emplace_back();
                stats.emplace_back();
                stats.emplace_back();
                auto& node = tree.nodes[id];
                node.feature = static_cast<std::int32_t>(best[s].feature);
                node.threshold = best[s].threshold;
                node.left = left_id;
                node.right = left_id + 1;
                next_level.push_back(static_cast<std::size_t>(left_id));
                next_level.push_back(static_cast<std::size_t>(left_id) + 1);
            }
            if (next_level.empty()) break;

            // Route rows of split nodes to children; rows in nodes that did
            // not split are settled.
            for (std::size_t i = 0; i < n; ++i) {
                const std::int32_t nd = node_of[i];
                if (nd < 0) continue;
                const auto& node = tree.nodes[static_cast<std::size_t>(nd)];
                if (node.is_leaf()) {
                    node_of[i] = -1;
                    continue;
                }
                const bool go_left = cols_.values[static_cast<std::size_t>(node.feature)][i] <= node.threshold;
                node_of[i] = go_left ? node.left : node.right;
                stats[static_cast<std::size_t>(node_of[i])].add(grad[i], hess[i]);
            }
            level = std::move(next_level);
        }

        for (std::size_t id = 0; id < tree.nodes.size(); ++id)
            if (tree.nodes[id].is_leaf())
                // + 0.0 turns a -0 leaf into +0 for a tidier model file.
                tree.nodes[id].value = {params_.learning_rate * scorer_.weight(stats[id]) + 0.0};
        return tree;
    }

private:
    void consider(const GradStats& parent, const GradStats& left, std::size_t feature, double lo, double hi,
                  SplitChoice& best) const {
        const std::size_t min_leaf = params_.min_data_in_leaf;
        if (left.n < min_leaf || parent.n - left.n < min_leaf) return;
        const GradStats right{parent.g - left.g, parent.h - left.h, parent.n - left.n};
        const double gain = scorer_.score(left) + scorer_.score(right) - scorer_.score(parent);
        // Strict comparison: the earliest feature, then the lowest threshold, wins ties.
        if (gain > best.gain) {
            best.found = true;
            best.gain = gain;
            best.feature = feature;
            best.threshold = detail::split_point(lo, hi);
        }
    }

    const detail::SortedColumns& cols_;
    const GbdtParams& params_;
    LeafScorer scorer_;
};

}  // namespace

EnsembleModel fit_gbdt(const Matrix& rows, std::span<const ClassId> labels, const GbdtParams& params,
                       std::size_t n_classes, std::vector<double>* train_logloss) {
    params.validate();
    const std::size_t k = detail::check_training_input(rows, labels, n_classes);
    const std::size_t n = rows.rows();

    EnsembleModel model;
    model.kind = ModelKind::gbdt;
    model.n_classes = k;
    model.n_features = rows.cols();
    model.n_rounds = params.n_estimators;
    model.base_score.assign(k, 0.0);
    model.trees.reserve(params.n_estimators * k);

    const detail::SortedColumns cols(rows);
    TreeGrower grower(cols, params);

    std::vector<double> scores(n * k, 0.0);
    std::vector<double> prob(n * k);
    std::vector<double> grad(n), hess(n);

    auto refresh_probabilities = [&] {
        double loss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto p = softmax(std::span<const double>(scores.data() + i * k, k));
            std::copy(p.begin(), p.end(), prob.begin() + static_cast<std::ptrdiff_t>(i * k));
            loss -= std::log(std::max(p[static_cast<std::size_t>(labels[i])], 1e-300));
        }
        return loss / static_cast<double>(n);
    };

    double loss = refresh_probabilities();
    if (train_logloss) train_logloss->assign(1, loss);

    for (std::size_t round = 0; round < params.n_estimators; ++round) {
        // Every class tree in a round sees the probabilities from the previous round.
        for (std::size_t c = 0; c < k; ++c) {
            for (std::size_t i = 0; i < n; ++i) {
                const double p = prob[i * k + c];
                grad[i] = p - (static_cast<std::size_t>(labels[i]) == c ? 1.0 : 0.0);
                hess[i] = p * (1.0 - p);
            }
            model.trees.push_back(grower.grow(grad, hess));
        }
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t c = 0; c < k; ++c)
                scores[i * k + c] += model.trees[round * k + c].leaf_for(rows.row(i)).value[0];
        loss = refresh_probabilities();
        if (train_logloss) train_logloss->push_back(loss);
    }
    return model;
}

}  // namespace ecgbeat
