#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace usv {

// Uniformly sampled signal. `seed` records the generator seed when the series
// was synthesized; series loaded from disk have no seed.
struct TimeSeries {
    std::vector<double> values;
    double dt = 0.1;
    std::optional<std::uint64_t> seed;

    std::size_t size() const { return values.size(); }
    double time_at(std::size_t j) const { return static_cast<double>(j) * dt; }

    void validate() const {
        if (values.empty())
            throw std::invalid_argument("time series must contain at least one sample");
        if (!(dt > 0.0))
            throw std::invalid_argument("time series sample interval must be positive, got " +
                                        std::to_string(dt));
        for (std::size_t j = 0; j < values.size(); ++j)
            if (!std::isfinite(values[j]))
                throw std::invalid_argument("time series sample " + std::to_string(j) +
                                            " is not finite");
    }
};

inline double mean(std::span<const double> x) {
    if (x.empty()) throw std::invalid_argument("mean of empty range");
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

// Population variance (divide by n); matches the spectral-moment convention
// where the series variance estimates the area under the spectrum.
inline double variance(std::span<const double> x) {
    double m = mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size());
}

inline double stddev(std::span<const double> x) { return std::sqrt(variance(x)); }

inline double correlation(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.empty())
        throw std::invalid_argument("correlation requires equal-length non-empty ranges");
    double ma = mean(a), mb = mean(b);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    if (saa == 0.0 || sbb == 0.0)
        throw std::invalid_argument("correlation undefined for constant input");
    return sab / std::sqrt(saa * sbb);
}

inline double max_abs(std::span<const double> x) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace usv
