#include "ecgbeat/synth.hpp"

#include <array>
#include <cmath>

#include "ecgbeat/errors.hpp"
#include "ecgbeat/rng.hpp"

namespace ecgbeat {

namespace {

struct Wave {
    double offset;  // seconds from the R-peak annotation
    double amplitude;
    double width;
};

constexpr std::array<Wave, 5> kNormal{{
    {-0.20, 0.15, 0.025},
    {-0.03, -0.12, 0.010},
    {0.00, 1.20, 0.010},
    {0.03, -0.25, 0.010},
    {0.25, 0.30, 0.040},
}};

constexpr std::array<Wave, 3> kVentricular{{
    {-0.05, -0.50, 0.025},
    {0.03, 1.40, 0.030},
    {0.28, -0.45, 0.060},
}};

constexpr ClassId kN = 0, kS = 1, kV = 2;

template <std::size_t M>
void add_beat(std::vector<double>& x, double fs, double t_peak, double scale, const std::array<Wave, M>& waves) {
    const double reach = 0.5;
    const auto first = static_cast<std::ptrdiff_t>(std::ceil((t_peak - reach) * fs));
    const auto last = static_cast<std::ptrdiff_t>(std::floor((t_peak + reach) * fs));
    for (std::ptrdiff_t i = std::max<std::ptrdiff_t>(first, 0);
         i <= last && i < static_cast<std::ptrdiff_t>(x.size()); ++i) {
        const double t = static_cast<double>(i) / fs - t_peak;
        double v = 0.0;
        for (const auto& w : waves) {
            const double z = (t - w.offset) / w.width;
            v += w.amplitude * std::exp(-0.5 * z * z);
        }
        x[static_cast<std::size_t>(i)] += scale * v;
    }
}

}  // namespace

void SynthConfig::validate() const {
    if (beats_per_class < 1) throw ValidationError("synth: beats_per_class must be >= 1");
    if (!(noise_std >= 0.0)) throw ValidationError("synth: noise_std must be >= 0");
    if (!(fs >= 100.0)) throw ValidationError("synth: fs must be >= 100 Hz");
    if (!(base_rr > 0.4)) throw ValidationError("synth: base_rr must exceed 0.4 s");
    if (!(rr_jitter >= 0.0 && rr_jitter < 0.14)) throw ValidationError("synth: rr_jitter must be in [0, 0.14)");
    if (!(premature_factor > 0.3 && premature_factor < 0.75))
        throw ValidationError("synth: premature_factor must be in (0.3, 0.75)");
}

EcgRecord generate(const SynthConfig& cfg) {
    cfg.validate();
    Rng rng(cfg.seed);

    std::vector<ClassId> sequence;
    for (ClassId c : {kN, kS, kV}) sequence.insert(sequence.end(), cfg.beats_per_class, c);
    for (std::size_t i = sequence.size(); i > 1; --i)
        std::swap(sequence[i - 1], sequence[static_cast<std::size_t>(rng.below(i))]);
    sequence.insert(sequence.begin(), kN);
    sequence.push_back(kN);

    std::vector<double> times;
    double t = 0.6;
    for (std::size_t b = 0; b < sequence.size(); ++b) {
        if (b > 0) {
            double rr = cfg.base_rr * (1.0 + cfg.rr_jitter * (2.0 * rng.uniform() - 1.0));
            if (sequence[b] == kS) rr *= cfg.premature_factor;
            t += rr;
        }
        times.push_back(t);
    }

    EcgRecord rec;
    rec.fs = cfg.fs;
    const auto n = static_cast<std::size_t>(std::ceil((times.back() + 0.6) * cfg.fs));
    std::vector<double> x(n, 0.0);
    for (std::size_t b = 0; b < sequence.size(); ++b) {
        const double scale = 1.0 + 0.05 * (2.0 * rng.uniform() - 1.0);
        if (sequence[b] == kV)
            add_beat(x, cfg.fs, times[b], scale, kVentricular);
        else
            add_beat(x, cfg.fs, times[b], scale, kNormal);
        rec.rpeaks.push_back(static_cast<std::size_t>(std::llround(times[b] * cfg.fs)));
        rec.labels.push_back(sequence[b]);
    }
    if (cfg.noise_std > 0.0)
        for (double& v : x) v += cfg.noise_std * rng.normal();
    rec.leads.push_back(std::move(x));
    rec.validate();
    return rec;
}

}  // namespace ecgbeat
