#include "ecgbeat/pipeline.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <string>

#include "ecgbeat/errors.hpp"
#include "ecgbeat/preprocess.hpp"

namespace ecgbeat {

ProcessedRecord preprocess_record(const EcgRecord& record, const PreprocessConfig& cfg) {
    const auto filtered = filter_record(resample_record(record, cfg.target_fs), cfg.low_hz, cfg.high_hz);
    auto segmented = segment_beats(filtered, cfg.lead);

    ProcessedRecord out;
    out.dropped = segmented.dropped;
    const auto rr = rr_intervals(filtered.rpeaks, filtered.fs);
    if (!rr.empty()) out.hrv = hrv_stats(rr);
    for (auto& beat : segmented.beats) {
        beat.samples = normalize_beat(beat.samples);
        out.beats.push_back(std::move(beat));
    }
    return out;
}

LabeledRows featurize(const ProcessedRecord& processed) {
    LabeledRows out;
    out.rows = Matrix(processed.beats.size(), kFeatureDim);
    for (std::size_t b = 0; b < processed.beats.size(); ++b) {
        const auto f = beat_features(processed.beats[b], processed.hrv);
        std::copy(f.begin(), f.end(), out.rows.row(b).begin());
        out.labels.push_back(processed.beats[b].label);
    }
    return out;
}

namespace {
constexpr const char* kBeatHeaderPrefix =
    "rpeak_index,label,rr_prev,rr_next,mean_abs_amplitude,hrv_mean,hrv_median,hrv_variance";

std::string beat_header() {
    std::string h = kBeatHeaderPrefix;
    for (std::size_t i = 0; i < kBeatLength; ++i) h += ",s" + std::to_string(i);
    return h;
}
}  // namespace

void save_beats(const ProcessedRecord& processed, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << beat_header() << '\n';
    for (const auto& b : processed.beats) {
        out << b.rpeak_index << ',' << b.label << ',' << format_double(b.rr_prev) << ','
            << format_double(b.rr_next) << ',' << format_double(b.raw_mean_abs_amplitude) << ','
            << format_double(processed.hrv.mean) << ',' << format_double(processed.hrv.median) << ','
            << format_double(processed.hrv.variance);
        for (double v : b.samples) out << ',' << format_double(v);
        out << '\n';
    }
}

ProcessedRecord load_beats(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    ProcessedRecord out;
    std::string line;
    std::size_t line_no = 0;
    const std::size_t n_fields = 8 + kBeatLength;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line_no == 1) {
            if (line != beat_header()) throw ParseError(path.string(), line_no, "unexpected beat table header");
            continue;
        }
        std::vector<double> v;
        std::size_t start = 0;
        while (true) {
            const auto comma = line.find(',', start);
            const auto field = std::string_view(line).substr(start, comma == std::string::npos ? std::string::npos
                                                                                               : comma - start);
            const auto parsed = parse_double(field);
            if (!parsed || !std::isfinite(*parsed))
                throw ParseError(path.string(), line_no, "bad number '" + std::string(field) + "'");
            v.push_back(*parsed);
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (v.size() != n_fields)
            throw ParseError(path.string(), line_no, "expected " + std::to_string(n_fields) + " columns");
        Beat b;
        b.rpeak_index = static_cast<std::size_t>(v[0]);
        b.label = static_cast<ClassId>(v[1]);
        b.rr_prev = v[2];
        b.rr_next = v[3];
        b.raw_mean_abs_amplitude = v[4];
        out.hrv = {v[5], v[6], v[7]};
        b.samples.assign(v.begin() + 8, v.end());
        out.beats.push_back(std::move(b));
    }
    if (line_no == 0) throw ParseError(path.string(), 1, "empty beat table");
    return out;
}

}  // namespace ecgbeat
