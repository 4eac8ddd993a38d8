#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include "ecgbeat/features.hpp"
#include "ecgbeat/record_io.hpp"
#include "ecgbeat/types.hpp"

namespace ecgbeat {

struct PreprocessConfig {
    double target_fs = kTargetFs;
    double low_hz = 0.5;
    double high_hz = 35.0;
    std::size_t lead = 0;
};

/// Normalized beats of one record plus the record-level HRV statistics.
struct ProcessedRecord {
    std::vector<Beat> beats;
    HrvStats hrv;
    std::size_t dropped = 0;
};

/// resample -> band-pass -> segment -> per-beat normalize.
ProcessedRecord preprocess_record(const EcgRecord& record, const PreprocessConfig& cfg = {});

/// One 76-value row per beat.
LabeledRows featurize(const ProcessedRecord& processed);

/// Beat table CSV: `rpeak_index,label,rr_prev,rr_next,mean_abs_amplitude,
/// hrv_mean,hrv_median,hrv_variance,s0..s69`.
void save_beats(const ProcessedRecord& processed, const std::filesystem::path& path);
ProcessedRecord load_beats(const std::filesystem::path& path);

}  // namespace ecgbeat
