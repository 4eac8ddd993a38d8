#include "ecgbeat/cv.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "ecgbeat/errors.hpp"
#include "ecgbeat/metrics.hpp"
#include "ecgbeat/rng.hpp"

namespace ecgbeat {

EnsembleModel fit_model(const ModelSpec& spec, const Matrix& rows, std::span<const ClassId> labels,
                        std::size_t n_classes) {
    if (const auto* g = std::get_if<GbdtParams>(&spec)) return fit_gbdt(rows, labels, *g, n_classes);
    return fit_random_forest(rows, labels, std::get<RfParams>(spec), n_classes);
}

std::string describe(const ModelSpec& spec) {
    std::ostringstream s;
    if (const auto* g = std::get_if<GbdtParams>(&spec)) {
        s << "gbdt lr=" << g->learning_rate << " depth=" << g->max_depth << " rounds=" << g->n_estimators
          << " min_leaf=" << g->min_data_in_leaf << " alpha=" << g->l1_alpha << " lambda=" << g->l2_lambda;
    } else {
        const auto& r = std::get<RfParams>(spec);
        s << "rf trees=" << r.n_trees << " depth=" << r.max_depth << " min_leaf=" << r.min_samples_leaf
          << " mtry=" << r.features_per_split;
    }
    return s.str();
}

namespace {

std::map<ClassId, std::vector<std::size_t>> shuffled_members(std::span<const ClassId> labels, Rng& rng) {
    std::map<ClassId, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < labels.size(); ++i) members[labels[i]].push_back(i);
    for (auto& [cls, idx] : members)
        for (std::size_t i = idx.size(); i > 1; --i)
            std::swap(idx[i - 1], idx[static_cast<std::size_t>(rng.below(i))]);
    return members;
}

}  // namespace

std::vector<std::size_t> stratified_folds(std::span<const ClassId> labels, std::size_t folds,
                                          std::uint64_t seed) {
    if (folds < 2) throw ValidationError("cross-validation needs at least 2 folds");
    Rng rng(seed);
    const auto members = shuffled_members(labels, rng);
    for (const auto& [cls, idx] : members)
        if (idx.size() < folds)
            throw ValidationError("class " + std::to_string(cls) + " has " + std::to_string(idx.size()) +
                                  " rows, fewer than " + std::to_string(folds) + " folds");
    std::vector<std::size_t> fold(labels.size());
    std::size_t dealer = 0;
    for (const auto& [cls, idx] : members)
        for (std::size_t i : idx) fold[i] = dealer++ % folds;
    return fold;
}

TrainTestSplit stratified_split(std::span<const ClassId> labels, double test_fraction, std::uint64_t seed) {
    if (!(test_fraction >= 0.0 && test_fraction < 1.0))
        throw ValidationError("test fraction must be in [0, 1)");
    Rng rng(seed);
    TrainTestSplit split;
    for (const auto& [cls, idx] : shuffled_members(labels, rng)) {
        const auto n_test = static_cast<std::size_t>(std::llround(static_cast<double>(idx.size()) * test_fraction));
        split.test.insert(split.test.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_test));
        split.train.insert(split.train.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_test), idx.end());
    }
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.test.begin(), split.test.end());
    return split;
}

LabeledRows select_rows(const Matrix& rows, std::span<const ClassId> labels, std::span<const std::size_t> which) {
    LabeledRows out;
    out.rows = Matrix(which.size(), rows.cols());
    for (std::size_t r = 0; r < which.size(); ++r) {
        std::copy_n(rows.row(which[r]).begin(), rows.cols(), out.rows.row(r).begin());
        out.labels.push_back(labels[which[r]]);
    }
    return out;
}

GridSearchResult grid_search(const Matrix& rows, std::span<const ClassId> labels,
                             const std::vector<ModelSpec>& grid, std::size_t folds, std::uint64_t seed,
                             const std::optional<BalancePlan>& balance_plan, std::size_t n_classes) {
    if (grid.empty()) throw ValidationError("grid search: empty parameter grid");
    if (rows.rows() != labels.size()) throw ValidationError("grid search: row/label count mismatch");
    std::size_t k = n_classes;
    for (ClassId y : labels) k = std::max(k, static_cast<std::size_t>(y) + 1);

    const auto fold_of = stratified_folds(labels, folds, seed);
    std::vector<LabeledRows> train_sets, valid_sets;
    for (std::size_t f = 0; f < folds; ++f) {
        std::vector<std::size_t> train_idx, valid_idx;
        for (std::size_t i = 0; i < labels.size(); ++i) (fold_of[i] == f ? valid_idx : train_idx).push_back(i);
        auto train = select_rows(rows, labels, train_idx);
        if (balance_plan) {
            BalancePlan plan = *balance_plan;
            plan.seed = balance_plan->seed + f;
            train = balance(train.rows, train.labels, plan);
        }
        train_sets.push_back(std::move(train));
        valid_sets.push_back(select_rows(rows, labels, valid_idx));
    }

    GridSearchResult result;
    result.grid = grid;
    for (const auto& spec : grid) {
        std::vector<double> scores;
        for (std::size_t f = 0; f < folds; ++f) {
            const auto model = fit_model(spec, train_sets[f].rows, train_sets[f].labels, k);
            const auto predicted = predict_labels(model, valid_sets[f].rows);
            scores.push_back(macro_metrics(confusion_matrix(valid_sets[f].labels, predicted, k)).f1);
        }
        double mean = 0.0;
        for (double s : scores) mean += s;
        mean /= static_cast<double>(folds);
        result.fold_f1.push_back(std::move(scores));
        result.mean_f1.push_back(mean);
        if (mean > result.mean_f1[result.best]) result.best = result.mean_f1.size() - 1;
    }
    return result;
}

}  // namespace ecgbeat
