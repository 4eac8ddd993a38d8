#include "ecgbeat/balance.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <utility>

#include "ecgbeat/errors.hpp"
#include "ecgbeat/rng.hpp"

namespace ecgbeat {

namespace {

void check_shape(const Matrix& rows, std::span<const ClassId> labels) {
    if (rows.rows() != labels.size())
        throw ValidationError("balance: " + std::to_string(rows.rows()) + " rows but " +
                              std::to_string(labels.size()) + " labels");
}

std::map<ClassId, std::vector<std::size_t>> members_by_class(std::span<const ClassId> labels) {
    std::map<ClassId, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < labels.size(); ++i) members[labels[i]].push_back(i);
    return members;
}

LabeledRows gather(const Matrix& rows, std::span<const ClassId> labels,
                   std::span<const std::size_t> keep, std::size_t extra_rows = 0) {
    LabeledRows out;
    out.rows = Matrix(keep.size() + extra_rows, rows.cols());
    out.labels.reserve(keep.size() + extra_rows);
    for (std::size_t r = 0; r < keep.size(); ++r) {
        std::copy_n(rows.row(keep[r]).begin(), rows.cols(), out.rows.row(r).begin());
        out.labels.push_back(labels[keep[r]]);
    }
    return out;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] - b[i]) * (a[i] - b[i]);
    return d;
}

// Derived stream seeds so undersample and smote inside balance() do not share draws.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

void BalancePlan::validate() const {
    if (k_neighbors < 1) throw ValidationError("balance: k_neighbors must be >= 1");
    for (const auto& [cls, target] : targets)
        if (target == 0) throw ValidationError("balance: target for class " + std::to_string(cls) + " must be positive");
}

LabeledRows undersample(const Matrix& rows, std::span<const ClassId> labels,
                        const std::map<ClassId, std::size_t>& targets, std::uint64_t seed) {
    check_shape(rows, labels);
    Rng rng(seed);
    std::vector<std::size_t> keep;
    keep.reserve(labels.size());
    for (auto& [cls, members] : members_by_class(labels)) {
        const auto it = targets.find(cls);
        if (it == targets.end() || members.size() <= it->second) {
            keep.insert(keep.end(), members.begin(), members.end());
            continue;
        }
        // Partial Fisher-Yates: the first `target` slots become a uniform subset.
        const std::size_t target = it->second;
        for (std::size_t i = 0; i < target; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng.below(members.size() - i));
            std::swap(members[i], members[j]);
        }
        keep.insert(keep.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(target));
    }
    std::sort(keep.begin(), keep.end());
    return gather(rows, labels, keep);
}

LabeledRows smote(const Matrix& rows, std::span<const ClassId> labels,
                  const std::map<ClassId, std::size_t>& targets, std::size_t k_neighbors,
                  std::uint64_t seed) {
    check_shape(rows, labels);
    if (k_neighbors < 1) throw ValidationError("smote: k_neighbors must be >= 1");

    const auto members = members_by_class(labels);
    std::size_t n_synthetic = 0;
    for (const auto& [cls, target] : targets) {
        const auto it = members.find(cls);
        const std::size_t have = it == members.end() ? 0 : it->second.size();
        if (have >= target) continue;
        if (have < 2)
            throw ValidationError("smote: class " + std::to_string(cls) + " has " + std::to_string(have) +
                                  " member(s); at least 2 are needed to synthesize samples");
        n_synthetic += target - have;
    }

    std::vector<std::size_t> all(labels.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    LabeledRows out = gather(rows, labels, all, n_synthetic);

    Rng rng(seed);
    const std::size_t dim = rows.cols();
    std::size_t next_row = labels.size();
    for (const auto& [cls, target] : targets) {
        const auto it = members.find(cls);
        if (it == members.end() || it->second.size() >= target) continue;
        const auto& idx = it->second;
        const std::size_t k_eff = std::min(k_neighbors, idx.size() - 1);

        // Neighbour lists are computed on first use of each member.
        std::vector<std::vector<std::size_t>> neighbours(idx.size());
        auto neighbours_of = [&](std::size_t local) -> const std::vector<std::size_t>& {
            auto& nb = neighbours[local];
            if (!nb.empty()) return nb;
            std::vector<std::pair<double, std::size_t>> dist;
            dist.reserve(idx.size() - 1);
            for (std::size_t o = 0; o < idx.size(); ++o)
                if (o != local) dist.emplace_back(squared_distance(rows.row(idx[local]), rows.row(idx[o])), o);
            std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k_eff), dist.end());
            for (std::size_t q = 0; q < k_eff; ++q) nb.push_back(dist[q].second);
            return nb;
        };

        for (std::size_t s = idx.size(); s < target; ++s) {
            const auto local = static_cast<std::size_t>(rng.below(idx.size()));
            const auto& nb = neighbours_of(local);
            const std::size_t other = nb[static_cast<std::size_t>(rng.below(nb.size()))];
            const double u = rng.uniform_closed();
            const auto x = rows.row(idx[local]);
            const auto z = rows.row(idx[other]);
            auto dst = out.rows.row(next_row);
            for (std::size_t d = 0; d < dim; ++d) dst[d] = x[d] + u * (z[d] - x[d]);
            out.labels.push_back(cls);
            ++next_row;
        }
    }
    return out;
}

LabeledRows balance(const Matrix& rows, std::span<const ClassId> labels, const BalancePlan& plan) {
    plan.validate();
    const auto reduced = undersample(rows, labels, plan.targets, mix_seed(plan.seed, 0));
    return smote(reduced.rows, reduced.labels, plan.targets, plan.k_neighbors, mix_seed(plan.seed, 1));
}

}  // namespace ecgbeat
