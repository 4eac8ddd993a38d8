#include "ecgbeat/features.hpp"

#include <algorithm>
#include <cmath>

#include "ecgbeat/errors.hpp"

namespace ecgbeat {

std::vector<double> rr_intervals(std::span<const std::size_t> rpeaks, double fs) {
    if (!(fs > 0.0)) throw ValidationError("rr_intervals: fs must be positive");
    std::vector<double> rr;
    if (rpeaks.size() < 2) return rr;
    rr.reserve(rpeaks.size() - 1);
    for (std::size_t i = 1; i < rpeaks.size(); ++i) {
        if (rpeaks[i] <= rpeaks[i - 1]) throw ValidationError("rr_intervals: R-peaks not increasing");
        rr.push_back(static_cast<double>(rpeaks[i] - rpeaks[i - 1]) / fs);
    }
    return rr;
}

HrvStats hrv_stats(std::span<const double> rr) {
    if (rr.empty()) throw ValidationError("hrv_stats: empty RR sequence");
    const double n = static_cast<double>(rr.size());

    // Sorted copy makes every statistic independent of input order.
    std::vector<double> sorted(rr.begin(), rr.end());
    std::sort(sorted.begin(), sorted.end());

    HrvStats s;
    double sum = 0.0;
    for (double v : sorted) sum += v;
    s.mean = sum / n;
    // One refinement pass, then clamp: the true mean lies in [min, max].
    double resid = 0.0;
    for (double v : sorted) resid += v - s.mean;
    s.mean = std::clamp(s.mean + resid / n, sorted.front(), sorted.back());

    const std::size_t mid = sorted.size() / 2;
    s.median = sorted.size() % 2 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);

    double ss = 0.0;
    for (double v : sorted) ss += (v - s.mean) * (v - s.mean);
    s.variance = ss / n;
    return s;
}

std::vector<double> beat_features(const Beat& beat, const HrvStats& record_hrv) {
    if (beat.samples.size() != kBeatLength)
        throw ValidationError("beat_features: beat must have " + std::to_string(kBeatLength) + " samples");
    if (!(beat.rr_prev > 0.0) || !(beat.rr_next > 0.0) || !std::isfinite(beat.rr_prev) ||
        !std::isfinite(beat.rr_next))
        throw ValidationError("beat_features: RR intervals must be finite and positive");

    std::vector<double> f(kFeatureDim);
    std::copy(beat.samples.begin(), beat.samples.end(), f.begin());
    f[feature_slot::kHrvMean] = record_hrv.mean;
    f[feature_slot::kHrvMedian] = record_hrv.median;
    f[feature_slot::kHrvVariance] = record_hrv.variance;
    f[feature_slot::kMeanAbsAmplitude] = beat.raw_mean_abs_amplitude;
    f[feature_slot::kLogRrPrev] = std::log(beat.rr_prev);
    f[feature_slot::kLogRrNext] = std::log(beat.rr_next);
    for (double v : f)
        if (!std::isfinite(v)) throw ValidationError("beat_features: non-finite feature value");
    return f;
}

}  // namespace ecgbeat
