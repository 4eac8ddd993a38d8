#pragma once

#include <cstddef>
#include <cstdint>

#include "ecgbeat/types.hpp"

namespace ecgbeat {

/// Synthetic single-lead record with classes N (0), S (1), V (2).
/// Beat shapes are sums of Gaussians: N and S share a narrow tall QRS,
/// V has a wide inverted-then-tall complex with an inverted T wave, and S
/// arrives early (RR scaled by 0.6). One extra N beat is placed at each end
/// so every labelled beat of interest has both neighbours.
struct SynthConfig {
    std::size_t beats_per_class = 30;
    double fs = 250.0;
    double noise_std = 0.05;  // mV, white Gaussian
    std::uint64_t seed = 0;
    double base_rr = 0.8;     // seconds
    double rr_jitter = 0.05;  // relative, uniform
    double premature_factor = 0.6;

    void validate() const;
};

EcgRecord generate(const SynthConfig& cfg);

}  // namespace ecgbeat
