#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ecgbeat {

inline constexpr std::size_t kBeatHalfWidth = 35;
inline constexpr std::size_t kBeatLength = 2 * kBeatHalfWidth;
inline constexpr std::size_t kFeatureDim = kBeatLength + 6;
inline constexpr std::size_t kImageSide = 32;
inline constexpr double kTargetFs = 180.0;

using ClassId = int;

/// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::vector<double>& data() noexcept { return data_; }
    const std::vector<double>& data() const noexcept { return data_; }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Ordered class symbols; position in the list is the class id.
class LabelSet {
public:
    LabelSet() : LabelSet(std::vector<std::string>{"N", "S", "V"}) {}
    explicit LabelSet(std::vector<std::string> symbols);

    std::size_t size() const noexcept { return symbols_.size(); }
    const std::vector<std::string>& symbols() const noexcept { return symbols_; }
    const std::string& symbol(ClassId id) const { return symbols_.at(static_cast<std::size_t>(id)); }
    std::optional<ClassId> find(const std::string& symbol) const;

private:
    std::vector<std::string> symbols_;
};

struct EcgRecord {
    std::vector<std::vector<double>> leads;  // millivolts
    double fs = 0.0;
    std::vector<std::size_t> rpeaks;
    std::vector<ClassId> labels;

    std::size_t length() const { return leads.empty() ? 0 : leads.front().size(); }
    /// Throws ValidationError when any record invariant is broken.
    void validate() const;
};

struct Beat {
    std::vector<double> samples;  // kBeatLength values; normalized after preprocess
    std::size_t rpeak_index = 0;
    ClassId label = 0;
    double rr_prev = 0.0;  // seconds
    double rr_next = 0.0;  // seconds
    double raw_mean_abs_amplitude = 0.0;
};

/// Three kImageSide x kImageSide channels in fixed order: GASF, MTF, RP.
struct BeatImage {
    Matrix gasf;
    Matrix mtf;
    Matrix rp;

    bool operator==(const BeatImage&) const = default;
};

}  // namespace ecgbeat
