#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ecgbeat/balance.hpp"
#include "ecgbeat/model.hpp"

namespace ecgbeat {

using ModelSpec = std::variant<GbdtParams, RfParams>;

EnsembleModel fit_model(const ModelSpec& spec, const Matrix& rows, std::span<const ClassId> labels,
                        std::size_t n_classes = 0);

/// Short human-readable parameter summary, e.g. "gbdt lr=0.5 depth=10 ...".
std::string describe(const ModelSpec& spec);

/// Fold id (0..folds-1) for every row. Each class is shuffled with a seeded
/// stream and dealt round-robin, the dealer position carrying over between
/// classes, so per-class fold sizes differ by at most one.
std::vector<std::size_t> stratified_folds(std::span<const ClassId> labels, std::size_t folds,
                                          std::uint64_t seed);

struct TrainTestSplit {
    std::vector<std::size_t> train;  // ascending row indices
    std::vector<std::size_t> test;
};

/// Per class, round(n * test_fraction) seeded-random rows go to the test side.
TrainTestSplit stratified_split(std::span<const ClassId> labels, double test_fraction, std::uint64_t seed);

LabeledRows select_rows(const Matrix& rows, std::span<const ClassId> labels, std::span<const std::size_t> which);

struct GridSearchResult {
    std::vector<ModelSpec> grid;
    std::vector<std::vector<double>> fold_f1;  // [combination][fold]
    std::vector<double> mean_f1;
    std::size_t best = 0;
};

/// Mean macro F1 over stratified folds for every grid point; the first grid
/// point with the highest mean wins. When `balance_plan` is set, the training
/// split of every fold is balanced before fitting; validation splits never are.
GridSearchResult grid_search(const Matrix& rows, std::span<const ClassId> labels,
                             const std::vector<ModelSpec>& grid, std::size_t folds, std::uint64_t seed,
                             const std::optional<BalancePlan>& balance_plan = std::nullopt,
                             std::size_t n_classes = 0);

}  // namespace ecgbeat
