#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "ecgbeat/record_io.hpp"
#include "ecgbeat/types.hpp"

namespace ecgbeat {

/// Per-class row counts after balancing. Classes absent from `targets` are
/// passed through untouched.
struct BalancePlan {
    std::map<ClassId, std::size_t> targets{{0, 300000}, {1, 100000}, {2, 100000}};
    std::size_t k_neighbors = 5;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Reduces each class above its target to exactly the target by seeded
/// sampling without replacement. Retained rows keep their relative order.
LabeledRows undersample(const Matrix& rows, std::span<const ClassId> labels,
                        const std::map<ClassId, std::size_t>& targets, std::uint64_t seed);

/// Grows each class below its target with SMOTE samples x + u (z - x), z one
/// of the k nearest same-class neighbours of x (Euclidean, ties by row order).
/// Original rows come first in input order, then synthetic rows grouped by
/// ascending class id.
LabeledRows smote(const Matrix& rows, std::span<const ClassId> labels,
                  const std::map<ClassId, std::size_t>& targets, std::size_t k_neighbors,
                  std::uint64_t seed);

/// undersample followed by smote; the two stages use independent streams
/// derived from plan.seed.
LabeledRows balance(const Matrix& rows, std::span<const ClassId> labels, const BalancePlan& plan);

}  // namespace ecgbeat
