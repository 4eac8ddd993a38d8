#include "ecgbeat/encode.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ecgbeat/errors.hpp"

namespace ecgbeat {

std::vector<double> paa(std::span<const double> series, std::size_t m) {
    const std::size_t n = series.size();
    if (m == 0 || m > n)
        throw ValidationError("paa: need 1 <= m <= n (m=" + std::to_string(m) + ", n=" + std::to_string(n) + ")");
    if (m == n) return {series.begin(), series.end()};

    // Scale time by m*n: sample i spans [i*m, (i+1)*m), window j spans [j*n, (j+1)*n).
    std::vector<double> out(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
        const std::size_t w_begin = j * n;
        const std::size_t w_end = w_begin + n;
        double acc = 0.0;
        for (std::size_t i = w_begin / m; i < n && i * m < w_end; ++i) {
            const std::size_t s_begin = i * m;
            const std::size_t overlap = std::min(w_end, s_begin + m) - std::max(w_begin, s_begin);
            acc += static_cast<double>(overlap) * series[i];
        }
        out[j] = acc / static_cast<double>(n);
    }
    return out;
}

Matrix gasf(std::span<const double> series) {
    constexpr double tol = 1e-12;
    const std::size_t m = series.size();
    std::vector<double> cosv(m), sinv(m);
    for (std::size_t i = 0; i < m; ++i) {
        double x = series[i];
        if (!(x >= -1.0 - tol && x <= 1.0 + tol))
            throw ValidationError("gasf: value " + std::to_string(x) + " at index " + std::to_string(i) +
                                  " outside [-1, 1]");
        x = std::clamp(x, -1.0, 1.0);
        cosv[i] = x;
        sinv[i] = std::sqrt(1.0 - x * x);
    }
    Matrix g(m, m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i; j < m; ++j) {
            const double v = std::clamp(cosv[i] * cosv[j] - sinv[i] * sinv[j], -1.0, 1.0);
            g(i, j) = v;
            g(j, i) = v;
        }
    }
    return g;
}

std::vector<std::size_t> quantile_bins(std::span<const double> series, std::size_t n_bins) {
    if (n_bins < 2) throw ValidationError("mtf: n_bins must be >= 2");
    if (series.size() < n_bins)
        throw ValidationError("mtf: n_bins (" + std::to_string(n_bins) + ") exceeds series length (" +
                              std::to_string(series.size()) + ")");

    std::vector<double> sorted(series.begin(), series.end());
    std::sort(sorted.begin(), sorted.end());
    const double last = static_cast<double>(sorted.size() - 1);

    std::vector<double> edges(n_bins - 1);
    for (std::size_t k = 1; k < n_bins; ++k) {
        const double pos = last * static_cast<double>(k) / static_cast<double>(n_bins);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
        const double frac = pos - static_cast<double>(lo);
        edges[k - 1] = sorted[lo] + frac * (sorted[hi] - sorted[lo]);
    }

    std::vector<std::size_t> bins(series.size());
    for (std::size_t i = 0; i < series.size(); ++i)
        bins[i] = static_cast<std::size_t>(std::lower_bound(edges.begin(), edges.end(), series[i]) -
                                           edges.begin());
    return bins;
}

MarkovTransition markov_transition(std::span<const double> series, const MtfConfig& cfg) {
    if (series.size() < 2) throw ValidationError("mtf: series needs at least 2 values");
    MarkovTransition out;
    out.bins = quantile_bins(series, cfg.n_bins);
    const std::size_t q = cfg.n_bins;

    Matrix counts(q, q);
    for (std::size_t t = 0; t + 1 < out.bins.size(); ++t) counts(out.bins[t], out.bins[t + 1]) += 1.0;

    out.transition = Matrix(q, q);
    for (std::size_t a = 0; a < q; ++a) {
        double row_sum = 0.0;
        for (std::size_t b = 0; b < q; ++b) row_sum += counts(a, b);
        for (std::size_t b = 0; b < q; ++b)
            out.transition(a, b) = row_sum > 0.0 ? counts(a, b) / row_sum : 1.0 / static_cast<double>(q);
    }

    const std::size_t m = series.size();
    out.field = Matrix(m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) out.field(i, j) = out.transition(out.bins[i], out.bins[j]);
    return out;
}

Matrix mtf(std::span<const double> series, const MtfConfig& cfg) {
    return markov_transition(series, cfg).field;
}

Matrix recurrence(std::span<const double> series, std::optional<double> epsilon) {
    if (series.empty()) throw ValidationError("recurrence: empty series");
    if (epsilon && !(*epsilon >= 0.0)) throw ValidationError("recurrence: epsilon must be >= 0");
    const std::size_t m = series.size();
    Matrix r(m, m);
    double max_dist = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            const double d = std::abs(series[i] - series[j]);
            r(i, j) = d;
            r(j, i) = d;
            max_dist = std::max(max_dist, d);
        }
    }
    if (epsilon) {
        for (double& v : r.data()) v = v <= *epsilon ? 1.0 : 0.0;
        return r;
    }
    if (max_dist > 0.0)
        for (double& v : r.data()) v /= max_dist;
    return r;
}

BeatImage encode_beat(std::span<const double> normalized_beat, const MtfConfig& cfg) {
    const auto reduced = paa(normalized_beat, kImageSide);
    return {gasf(reduced), mtf(reduced, cfg), recurrence(reduced)};
}

}  // namespace ecgbeat
