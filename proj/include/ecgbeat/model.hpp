#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "ecgbeat/types.hpp"

namespace ecgbeat {

/// Internal nodes route a row left iff row[feature] <= threshold.
struct TreeNode {
    std::int32_t feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    /// Leaf payload: one raw score (gbdt) or a class-count histogram (forest).
    std::vector<double> value;

    bool is_leaf() const noexcept { return feature < 0; }
};

struct Tree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root

    const TreeNode& leaf_for(std::span<const double> row) const;
    std::size_t n_leaves() const;
};

/// Defaults are the reference configuration for beat classification.
struct GbdtParams {
    double learning_rate = 0.5;
    std::size_t max_depth = 10;
    std::size_t n_estimators = 1000;  // boosting rounds
    std::size_t min_data_in_leaf = 10;
    double l1_alpha = 0.5;
    double l2_lambda = 0.7327;
    std::uint64_t seed = 0;

    void validate() const;
};

struct RfParams {
    std::size_t n_trees = 100;
    std::size_t max_depth = 0;  // 0 = unlimited
    std::size_t min_samples_leaf = 1;
    std::size_t features_per_split = 9;  // round(sqrt(76))
    bool bootstrap = true;
    std::uint64_t seed = 0;

    void validate() const;
};

enum class ModelKind { forest, gbdt };

struct Prediction {
    ClassId label = 0;
    std::vector<double> probabilities;
};

struct EnsembleModel {
    ModelKind kind = ModelKind::gbdt;
    std::size_t n_classes = 0;
    std::size_t n_features = 0;
    /// gbdt: trees[round * n_classes + k] is round `round`'s tree for class k.
    std::size_t n_rounds = 0;
    std::vector<double> base_score;
    std::vector<Tree> trees;

    /// Summed gbdt leaf values per class, optionally using only the first `rounds` rounds.
    std::vector<double> raw_scores(std::span<const double> row, std::size_t rounds) const;
    std::vector<double> raw_scores(std::span<const double> row) const { return raw_scores(row, n_rounds); }

    /// Class probabilities and argmax (ties go to the lowest class id).
    Prediction predict(std::span<const double> row) const;

    /// Throws ValidationError when structural invariants do not hold.
    void validate() const;
};

/// Softmax with max subtraction.
std::vector<double> softmax(std::span<const double> scores);

/// Index of the largest value; the first one wins ties.
ClassId argmax(std::span<const double> values);

/// Multiclass softmax boosting. n_classes = 0 infers max(label) + 1.
/// When `train_logloss` is given it receives the training logloss before
/// the first round and after every round.
EnsembleModel fit_gbdt(const Matrix& rows, std::span<const ClassId> labels, const GbdtParams& params,
                       std::size_t n_classes = 0, std::vector<double>* train_logloss = nullptr);

EnsembleModel fit_random_forest(const Matrix& rows, std::span<const ClassId> labels,
                                const RfParams& params, std::size_t n_classes = 0);

/// Mean negative log-likelihood of a gbdt model truncated to `rounds` rounds.
double multiclass_logloss(const EnsembleModel& model, const Matrix& rows, std::span<const ClassId> labels,
                          std::size_t rounds);

std::vector<ClassId> predict_labels(const EnsembleModel& model, const Matrix& rows);

/// Versioned plain-text tree dump; see docs/model_format.md.
void write_model(const EnsembleModel& model, std::ostream& out);
EnsembleModel read_model(std::istream& in);
void save_model(const EnsembleModel& model, const std::filesystem::path& path);
EnsembleModel load_model(const std::filesystem::path& path);

}  // namespace ecgbeat
