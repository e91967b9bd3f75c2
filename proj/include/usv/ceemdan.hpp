#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "usv/emd.hpp"
#include "usv/random.hpp"
#include "usv/time_series.hpp"

namespace usv::decomp {

struct CeemdanConfig {
    double noise_scale = 0.2;   // noise std as a fraction of the signal std
    int ensemble_size = 100;    // realizations averaged per stage
    std::uint64_t seed = 42;
    SiftConfig sift;

    void validate() const {
        if (!(noise_scale > 0.0))
            throw std::invalid_argument("noise scale must be positive");
        if (ensemble_size < 2)
            throw std::invalid_argument("ensemble size must be at least 2");
        sift.validate();
    }
};

namespace detail {

// First IMF of y, or all zeros when y is not siftable (the convention of
// extract_kth_mode: missing modes are zero). Adds into `accum` and reports
// whether a real mode was extracted.
inline bool accumulate_first_imf(const TimeSeries& y, const SiftConfig& sift,
                                 std::vector<double>& accum) {
    try {
        auto [imf, residue] = sift_one_imf(y, sift);
        (void)residue;
        for (std::size_t j = 0; j < accum.size(); ++j) accum[j] += imf.values[j];
        return true;
    } catch (const not_siftable_error&) {
        return false;
    }
}

}  // namespace detail

// Complete ensemble empirical mode decomposition with adaptive noise
// (Torres et al. 2011). Stage 1 averages the first EMD mode of the signal
// plus scaled white noise over the ensemble; stage k adds the (k-1)-th EMD
// mode of each noise realization to the running residual before extracting.
// The residual recursion r_k = r_{k-1} - C_k makes reconstruction exact.
inline IMFDecomposition ceemdan(const TimeSeries& signal, const CeemdanConfig& cfg) {
    signal.validate();
    cfg.validate();
    const int n = static_cast<int>(signal.size());
    if (n < 4) throw std::invalid_argument("CEEMDAN requires at least 4 samples");

    const int ensemble = cfg.ensemble_size;
    // Noise amplitude is relative to the signal spread; a zero-variance signal
    // falls back to the absolute scale so the ensemble still perturbs it.
    double ref_std = stddev(signal.values);
    if (ref_std == 0.0) ref_std = 1.0;
    const double amp = cfg.noise_scale * ref_std;

    // Unit-variance noise realizations, one derived sub-stream per member so
    // evaluation order cannot change results; each realization is decomposed
    // once up front and its modes reused across stages.
    std::vector<std::vector<double>> noise(ensemble);
    std::vector<IMFDecomposition> noise_modes(ensemble);
    for (int i = 0; i < ensemble; ++i) {
        Rng rng = Rng::substream(cfg.seed,
                                 {fnv1a64("ceemdan-member"), static_cast<std::uint64_t>(i)});
        noise[i].resize(n);
        for (int j = 0; j < n; ++j) noise[i][j] = rng.gaussian();
        TimeSeries v{noise[i], signal.dt, std::nullopt};
        noise_modes[i] = emd(v, cfg.sift);
    }

    IMFDecomposition d;
    d.method = DecompMethod::ceemdan;
    d.sift = cfg.sift;
    d.ceemdan = CeemdanInfo{cfg.noise_scale, cfg.ensemble_size, cfg.seed};

    TimeSeries residual = signal;
    residual.seed = std::nullopt;

    TimeSeries perturbed;
    perturbed.dt = signal.dt;
    perturbed.values.resize(n);

    for (int stage = 1; d.modes.size() < 64; ++stage) {
        if (stage > 1 && detail::find_extrema(residual.values).total() < 3) break;

        std::vector<double> accum(n, 0.0);
        int extracted = 0;
        for (int i = 0; i < ensemble; ++i) {
            if (stage == 1) {
                for (int j = 0; j < n; ++j)
                    perturbed.values[j] = residual.values[j] + amp * noise[i][j];
            } else if (static_cast<std::size_t>(stage - 1) <= noise_modes[i].modes.size()) {
                const std::vector<double>& e = noise_modes[i].modes[stage - 2].values;
                for (int j = 0; j < n; ++j)
                    perturbed.values[j] = residual.values[j] + amp * e[j];
            } else {
                perturbed.values = residual.values;  // this member's noise modes ran out
            }
            if (detail::accumulate_first_imf(perturbed, cfg.sift, accum)) ++extracted;
        }
        if (extracted == 0) break;

        TimeSeries mode;
        mode.dt = signal.dt;
        mode.values.resize(n);
        for (int j = 0; j < n; ++j) {
            mode.values[j] = accum[j] / static_cast<double>(ensemble);
            residual.values[j] -= mode.values[j];
        }
        d.modes.push_back(std::move(mode));
    }

    d.residual = std::move(residual);
    return d;
}

}  // namespace usv::decomp
