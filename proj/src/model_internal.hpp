#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ecgbeat/types.hpp"

namespace ecgbeat::detail {

/// Validates a training set and returns the class count to use.
std::size_t check_training_input(const Matrix& rows, std::span<const ClassId> labels, std::size_t n_classes);

/// Column-major copy plus, per feature, row indices sorted by (value, row).
struct SortedColumns {
    std::size_t n_rows = 0;
    std::vector<std::vector<double>> values;
    std::vector<std::vector<std::size_t>> order;

    explicit SortedColumns(const Matrix& rows);
};

/// Threshold strictly between two distinct sorted values, lo <= t < hi.
double split_point(double lo, double hi);

}  // namespace ecgbeat::detail
