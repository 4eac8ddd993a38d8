#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "ecgbeat/types.hpp"

namespace ecgbeat {

struct MtfConfig {
    std::size_t n_bins = 8;
};

/// Piecewise aggregate approximation to `m` values. Window j covers
/// [j*n/m, (j+1)*n/m) with samples cut by a window boundary weighted by overlap.
std::vector<double> paa(std::span<const double> series, std::size_t m);

/// Gramian angular summation field: G[i][j] = cos(phi_i + phi_j), phi = arccos(x).
/// Values within 1e-12 outside [-1, 1] are clamped; anything further is rejected.
Matrix gasf(std::span<const double> series);

struct MarkovTransition {
    std::vector<std::size_t> bins;  // quantile bin per time step
    Matrix transition;              // n_bins x n_bins, row-stochastic
    Matrix field;                   // m x m, field[i][j] = transition[bins[i]][bins[j]]
};

/// Quantile bin of every value: edges at the k/N empirical quantiles
/// (linear interpolation between order statistics); a value equal to an
/// edge goes to the lower bin.
std::vector<std::size_t> quantile_bins(std::span<const double> series, std::size_t n_bins);

MarkovTransition markov_transition(std::span<const double> series, const MtfConfig& cfg = {});

/// Markov transition field only.
Matrix mtf(std::span<const double> series, const MtfConfig& cfg = {});

/// Without epsilon: |x_i - x_j| scaled by its maximum into [0, 1] (flat series
/// gives zeros). With epsilon: Heaviside(epsilon - |x_i - x_j|), theta(0) = 1.
Matrix recurrence(std::span<const double> series, std::optional<double> epsilon = std::nullopt);

/// PAA to 32 values, then GASF, MTF and RP channels.
BeatImage encode_beat(std::span<const double> normalized_beat, const MtfConfig& cfg = {});

}  // namespace ecgbeat
