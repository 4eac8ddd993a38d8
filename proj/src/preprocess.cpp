#include "ecgbeat/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ecgbeat/errors.hpp"

namespace ecgbeat {

std::vector<double> resample(std::span<const double> signal, double from_hz, double to_hz) {
    if (!(from_hz > 0.0) || !(to_hz > 0.0)) throw ValidationError("resample: rates must be positive");
    if (signal.size() < 2) throw ValidationError("resample: signal needs at least 2 samples");
    if (from_hz == to_hz) return {signal.begin(), signal.end()};

    const double n_in = static_cast<double>(signal.size());
    const auto n_out = static_cast<std::size_t>(std::llround(n_in * to_hz / from_hz));
    const double step = from_hz / to_hz;
    const std::size_t last = signal.size() - 1;

    std::vector<double> out(n_out);
    for (std::size_t k = 0; k < n_out; ++k) {
        const double pos = static_cast<double>(k) * step;
        const auto i = static_cast<std::size_t>(pos);
        if (i >= last) {
            out[k] = signal[last];
            continue;
        }
        const double frac = pos - static_cast<double>(i);
        out[k] = signal[i] + frac * (signal[i + 1] - signal[i]);
    }
    return out;
}

std::vector<Biquad> design_butterworth_bandpass(int order, double low_hz, double high_hz, double fs) {
    if (order < 2 || order % 2 != 0) throw ValidationError("filter order must be even and >= 2");
    if (!(fs > 0.0)) throw ValidationError("sampling rate must be positive");
    if (!(low_hz > 0.0 && low_hz < high_hz && high_hz < fs / 2.0))
        throw ValidationError("band-pass edges must satisfy 0 < low < high < fs/2 (low=" +
                              std::to_string(low_hz) + ", high=" + std::to_string(high_hz) +
                              ", fs=" + std::to_string(fs) + ")");

    using cd = std::complex<double>;
    const double pi = std::numbers::pi;
    const double k2fs = 2.0 * fs;
    const double w_lo = k2fs * std::tan(pi * low_hz / fs);
    const double w_hi = k2fs * std::tan(pi * high_hz / fs);
    const double bw = w_hi - w_lo;
    const double w0sq = w_lo * w_hi;

    // Each upper-half-plane prototype pole gives two band-pass poles; each of
    // those pairs with its conjugate into one section with zeros at z = +1, -1.
    std::vector<Biquad> sections;
    auto add_section = [&](cd s) {
        const cd z = (k2fs + s) / (k2fs - s);
        sections.push_back({1.0, 0.0, -1.0, -2.0 * z.real(), std::norm(z)});
    };
    for (int k = 0; k < order; ++k) {
        const cd p = std::polar(1.0, pi * (2.0 * k + order + 1) / (2.0 * order));
        if (p.imag() <= 0.0) continue;
        const cd pb = p * bw / 2.0;
        const cd root = std::sqrt(pb * pb - w0sq);
        add_section(pb + root);
        add_section(pb - root);
    }

    const double centre = 2.0 * std::atan(std::sqrt(w0sq) / k2fs) * fs / (2.0 * pi);
    const double gain = std::abs(frequency_response(sections, centre, fs));
    sections.front().b0 /= gain;
    sections.front().b1 /= gain;
    sections.front().b2 /= gain;
    return sections;
}

std::complex<double> frequency_response(std::span<const Biquad> sections, double f_hz, double fs) {
    const std::complex<double> zinv = std::polar(1.0, -2.0 * std::numbers::pi * f_hz / fs);
    std::complex<double> h = 1.0;
    for (const auto& s : sections)
        h *= (s.b0 + zinv * (s.b1 + zinv * s.b2)) / (1.0 + zinv * (s.a1 + zinv * s.a2));
    return h;
}

namespace {

struct SectionState {
    double z1 = 0.0, z2 = 0.0;
};

// Transposed direct form II, in place.
void run_cascade(std::span<const Biquad> sections, std::vector<SectionState> state,
                 std::vector<double>& x) {
    for (std::size_t s = 0; s < sections.size(); ++s) {
        const auto& c = sections[s];
        auto [z1, z2] = state[s];
        for (double& v : x) {
            const double y = c.b0 * v + z1;
            z1 = c.b1 * v - c.a1 * y + z2;
            z2 = c.b2 * v - c.a2 * y;
            v = y;
        }
    }
}

// State each section holds after a long constant input of `level`.
std::vector<SectionState> steady_state(std::span<const Biquad> sections, double level) {
    std::vector<SectionState> state(sections.size());
    double in = level;
    for (std::size_t s = 0; s < sections.size(); ++s) {
        const auto& c = sections[s];
        const double out = in * (c.b0 + c.b1 + c.b2) / (1.0 + c.a1 + c.a2);
        state[s].z2 = c.b2 * in - c.a2 * out;
        state[s].z1 = out - c.b0 * in;
        in = out;
    }
    return state;
}

}  // namespace

std::vector<double> sosfilt(std::span<const Biquad> sections, std::span<const double> signal) {
    std::vector<double> x(signal.begin(), signal.end());
    run_cascade(sections, std::vector<SectionState>(sections.size()), x);
    return x;
}

std::vector<double> bandpass_filter(std::span<const double> signal, double fs, double low_hz,
                                    double high_hz) {
    const auto sections = design_butterworth_bandpass(4, low_hz, high_hz, fs);
    const std::size_t n = signal.size();
    if (n == 0) return {};

    const std::size_t pad = std::min(static_cast<std::size_t>(std::llround(fs)), n - 1);
    std::vector<double> x;
    x.reserve(n + 2 * pad);
    for (std::size_t i = pad; i >= 1; --i) x.push_back(2.0 * signal[0] - signal[i]);
    x.insert(x.end(), signal.begin(), signal.end());
    for (std::size_t j = 0; j < pad; ++j) x.push_back(2.0 * signal[n - 1] - signal[n - 2 - j]);

    run_cascade(sections, steady_state(sections, x.front()), x);
    std::reverse(x.begin(), x.end());
    run_cascade(sections, steady_state(sections, x.front()), x);
    std::reverse(x.begin(), x.end());

    return {x.begin() + static_cast<std::ptrdiff_t>(pad),
            x.begin() + static_cast<std::ptrdiff_t>(pad + n)};
}

SegmentedBeats segment_beats(const EcgRecord& record, std::size_t lead) {
    record.validate();
    if (lead >= record.leads.size()) throw ValidationError("segment_beats: lead out of range");
    const auto& x = record.leads[lead];
    const std::size_t n = x.size();
    const auto& peaks = record.rpeaks;

    SegmentedBeats out;
    for (std::size_t i = 0; i < peaks.size(); ++i) {
        const std::size_t r = peaks[i];
        const bool fits = r >= kBeatHalfWidth && r + kBeatHalfWidth <= n;
        if (!fits || i == 0 || i + 1 == peaks.size()) {
            ++out.dropped;
            continue;
        }
        Beat beat;
        beat.samples.assign(x.begin() + static_cast<std::ptrdiff_t>(r - kBeatHalfWidth),
                            x.begin() + static_cast<std::ptrdiff_t>(r + kBeatHalfWidth));
        beat.rpeak_index = r;
        beat.label = record.labels[i];
        beat.rr_prev = static_cast<double>(r - peaks[i - 1]) / record.fs;
        beat.rr_next = static_cast<double>(peaks[i + 1] - r) / record.fs;
        double sum = 0.0;
        for (double v : beat.samples) sum += std::abs(v);
        beat.raw_mean_abs_amplitude = sum / static_cast<double>(kBeatLength);
        out.beats.push_back(std::move(beat));
    }
    return out;
}

std::vector<double> normalize_beat(std::span<const double> samples) {
    std::vector<double> out(samples.size(), 0.0);
    if (samples.empty()) return out;
    const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
    if (*lo == *hi) return out;
    const double min = *lo;
    const double max = *hi;
    // (2x - (max + min)) / (max - min) leaves an already normalized beat unchanged.
    const double mid2 = max + min;
    const double range = max - min;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (samples[i] == min)
            out[i] = -1.0;
        else if (samples[i] == max)
            out[i] = 1.0;
        else
            out[i] = std::clamp((2.0 * samples[i] - mid2) / range, -1.0, 1.0);
    }
    return out;
}

EcgRecord resample_record(const EcgRecord& record, double to_hz) {
    record.validate();
    if (record.fs == to_hz) return record;
    EcgRecord out;
    out.fs = to_hz;
    out.labels = record.labels;
    for (const auto& lead : record.leads) out.leads.push_back(resample(lead, record.fs, to_hz));
    const std::size_t n = out.length();
    for (std::size_t r : record.rpeaks) {
        auto mapped = static_cast<std::size_t>(
            std::llround(static_cast<double>(r) * to_hz / record.fs));
        mapped = std::min(mapped, n - 1);
        if (!out.rpeaks.empty() && mapped <= out.rpeaks.back())
            throw ValidationError("R-peaks " + std::to_string(out.rpeaks.back()) + " and " +
                                  std::to_string(mapped) + " collide after resampling");
        out.rpeaks.push_back(mapped);
    }
    return out;
}

EcgRecord filter_record(EcgRecord record, double low_hz, double high_hz) {
    for (auto& lead : record.leads) lead = bandpass_filter(lead, record.fs, low_hz, high_hz);
    return record;
}

}  // namespace ecgbeat
