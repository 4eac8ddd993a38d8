#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "ecgbeat/types.hpp"

namespace ecgbeat {

/// Linear-interpolation resampler. Output length is round(N * to_hz / from_hz)
/// and output sample k is the input evaluated at time k / to_hz.
std::vector<double> resample(std::span<const double> signal, double from_hz, double to_hz);

/// One second-order section, a0 normalized to 1.
struct Biquad {
    double b0 = 1.0, b1 = 0.0, b2 = 0.0;
    double a1 = 0.0, a2 = 0.0;
};

/// Digital Butterworth band-pass from an analog prototype of the given order
/// (bilinear transform with prewarped edges). `order` must be even. Returns
/// `order` sections; overall gain is 1 at the prewarped geometric centre.
std::vector<Biquad> design_butterworth_bandpass(int order, double low_hz, double high_hz, double fs);

/// H(e^{j 2 pi f / fs}) of a section cascade.
std::complex<double> frequency_response(std::span<const Biquad> sections, double f_hz, double fs);

/// Single causal pass through a section cascade, zero initial state.
std::vector<double> sosfilt(std::span<const Biquad> sections, std::span<const double> signal);

/// Zero-phase band-pass: 4th-order Butterworth applied forward then backward.
/// The signal is extended at both ends by odd reflection of min(fs, N-1)
/// samples and each pass starts from the step-response steady state.
std::vector<double> bandpass_filter(std::span<const double> signal, double fs, double low_hz = 0.5,
                                    double high_hz = 35.0);

struct SegmentedBeats {
    std::vector<Beat> beats;  // samples not yet normalized
    std::size_t dropped = 0;
};

/// Cuts [r-35, r+35) around every R-peak that has a previous and a next
/// R-peak and whose window fits inside the record.
SegmentedBeats segment_beats(const EcgRecord& record, std::size_t lead = 0);

/// Per-beat min-max scaling to [-1, 1]; a flat beat maps to zeros.
std::vector<double> normalize_beat(std::span<const double> samples);

/// Resamples every lead and maps R-peaks to round(r * to_hz / from_hz).
EcgRecord resample_record(const EcgRecord& record, double to_hz);

/// Band-pass filters every lead in place.
EcgRecord filter_record(EcgRecord record, double low_hz = 0.5, double high_hz = 35.0);

}  // namespace ecgbeat
