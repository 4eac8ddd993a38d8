#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "ecgbeat/types.hpp"

namespace ecgbeat {

/// K x K counts; row = true class, column = predicted class.
class ConfusionMatrix {
public:
    explicit ConfusionMatrix(std::size_t n_classes)
        : k_(n_classes), counts_(n_classes * n_classes, 0) {}

    std::size_t n_classes() const noexcept { return k_; }
    std::uint64_t& at(std::size_t truth, std::size_t predicted) { return counts_[truth * k_ + predicted]; }
    std::uint64_t at(std::size_t truth, std::size_t predicted) const { return counts_[truth * k_ + predicted]; }
    std::uint64_t total() const;

private:
    std::size_t k_;
    std::vector<std::uint64_t> counts_;
};

ConfusionMatrix confusion_matrix(std::span<const ClassId> y_true, std::span<const ClassId> y_pred,
                                 std::size_t n_classes);

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Macro-averaged precision, recall, accuracy and F1.
struct MacroMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double accuracy = 0.0;
    double f1 = 0.0;
    std::vector<ClassMetrics> per_class;
};

/// Undefined per-class ratios (0/0) count as 0. Throws on an all-zero matrix.
MacroMetrics macro_metrics(const ConfusionMatrix& cm);

struct ReportRow {
    std::string model;
    MacroMetrics metrics;
};

/// `model,precision,recall,accuracy,f1`
void write_metrics_csv(std::span<const ReportRow> rows, std::ostream& out);
std::vector<ReportRow> read_metrics_csv(std::istream& in);
/// Aligned text table with columns Model | Precision | Recall | Accuracy | F1 score.
void write_metrics_table(std::span<const ReportRow> rows, std::ostream& out);

}  // namespace ecgbeat
