#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ecgbeat/types.hpp"

namespace ecgbeat {

/// Feature vector layout: [0, 70) normalized beat, then the slots below.
namespace feature_slot {
inline constexpr std::size_t kHrvMean = 70;
inline constexpr std::size_t kHrvMedian = 71;
inline constexpr std::size_t kHrvVariance = 72;
inline constexpr std::size_t kMeanAbsAmplitude = 73;
inline constexpr std::size_t kLogRrPrev = 74;
inline constexpr std::size_t kLogRrNext = 75;
}  // namespace feature_slot

struct HrvStats {
    double mean = 0.0;
    double median = 0.0;
    double variance = 0.0;  // population variance
};

/// Successive R-peak spacing in seconds; empty for fewer than two peaks.
std::vector<double> rr_intervals(std::span<const std::size_t> rpeaks, double fs);

HrvStats hrv_stats(std::span<const double> rr);

/// Builds the 76-value row for a normalized beat. The amplitude slot comes
/// from Beat::raw_mean_abs_amplitude, measured before normalization.
std::vector<double> beat_features(const Beat& beat, const HrvStats& record_hrv);

}  // namespace ecgbeat
