#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "usv/time_series.hpp"

namespace usv::decomp {

struct SiftConfig {
    double sd_threshold = 0.2;    // Cauchy-style stop criterion
    int max_sift_iterations = 100;
    int boundary_extrema = 2;     // extrema mirrored past each end for envelopes

    void validate() const {
        if (!(sd_threshold > 0.0))
            throw std::invalid_argument("sift SD threshold must be positive");
        if (max_sift_iterations < 1)
            throw std::invalid_argument("max sift iterations must be at least 1");
        if (boundary_extrema < 1)
            throw std::invalid_argument("boundary extrema count must be at least 1");
    }
};

// Raised when a signal has too few extrema to build both envelopes; callers
// treat such a signal as a final residual.
class not_siftable_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class DecompMethod { emd, ceemdan };

// CEEMDAN settings recorded on a decomposition (the sift settings are stored
// alongside regardless of method).
struct CeemdanInfo {
    double noise_scale = 0.0;
    int ensemble_size = 0;
    std::uint64_t seed = 0;
};

struct IMFDecomposition {
    std::vector<TimeSeries> modes;  // high-frequency first
    TimeSeries residual;
    DecompMethod method = DecompMethod::emd;
    SiftConfig sift;
    std::optional<CeemdanInfo> ceemdan;
};

namespace detail {

struct Extrema {
    std::vector<int> maxima;  // interior strict maxima, ascending
    std::vector<int> minima;  // interior strict minima, ascending
    std::size_t total() const { return maxima.size() + minima.size(); }
};

inline Extrema find_extrema(const std::vector<double>& v) {
    Extrema e;
    for (int i = 1; i + 1 < static_cast<int>(v.size()); ++i) {
        if (v[i] > v[i - 1] && v[i] > v[i + 1]) e.maxima.push_back(i);
        else if (v[i] < v[i - 1] && v[i] < v[i + 1]) e.minima.push_back(i);
    }
    return e;
}

// Natural cubic spline through (xs, ys), evaluated at the integer sample
// positions 0..n-1. xs must be strictly increasing and bracket [0, n-1].
inline std::vector<double> natural_spline_at_samples(const std::vector<double>& xs,
                                                     const std::vector<double>& ys, int n) {
    const int m = static_cast<int>(xs.size());
    std::vector<double> out(n);

    if (m == 2) {  // a natural spline through two knots is the straight line
        const double slope = (ys[1] - ys[0]) / (xs[1] - xs[0]);
        for (int j = 0; j < n; ++j) out[j] = ys[0] + slope * (j - xs[0]);
        return out;
    }

    // Second derivatives M_i with natural boundary conditions, via the
    // tridiagonal (Thomas) solve.
    std::vector<double> h(m - 1);
    for (int i = 0; i + 1 < m; ++i) h[i] = xs[i + 1] - xs[i];

    std::vector<double> diag(m, 0.0), rhs(m, 0.0), upper(m, 0.0);
    std::vector<double> M(m, 0.0);
    for (int i = 1; i + 1 < m; ++i) {
        diag[i] = 2.0 * (h[i - 1] + h[i]);
        upper[i] = h[i];
        rhs[i] = 6.0 * ((ys[i + 1] - ys[i]) / h[i] - (ys[i] - ys[i - 1]) / h[i - 1]);
    }
    for (int i = 2; i + 1 < m; ++i) {  // forward elimination (lower diag = h[i-1])
        const double f = h[i - 1] / diag[i - 1];
        diag[i] -= f * upper[i - 1];
        rhs[i] -= f * rhs[i - 1];
    }
    for (int i = m - 2; i >= 1; --i)
        M[i] = (rhs[i] - upper[i] * M[i + 1]) / diag[i];

    int seg = 0;
    for (int j = 0; j < n; ++j) {
        const double x = static_cast<double>(j);
        while (seg + 2 < m && x > xs[seg + 1]) ++seg;
        const double a = xs[seg + 1] - x, b = x - xs[seg], hi = h[seg];
        out[j] = M[seg] * a * a * a / (6.0 * hi) + M[seg + 1] * b * b * b / (6.0 * hi) +
                 (ys[seg] / hi - M[seg] * hi / 6.0) * a +
                 (ys[seg + 1] / hi - M[seg + 1] * hi / 6.0) * b;
    }
    return out;
}

// Spline envelope through the given extrema of v, with `boundary` extrema
// mirrored about each end so the spline stays anchored beyond the data.
inline std::vector<double> envelope(const std::vector<double>& v, const std::vector<int>& idx,
                                    int boundary) {
    const int n = static_cast<int>(v.size());
    const int m = static_cast<int>(idx.size());
    const int pad = std::min(boundary, m);

    std::vector<double> xs, ys;
    xs.reserve(m + 2 * pad);
    ys.reserve(m + 2 * pad);
    for (int i = pad - 1; i >= 0; --i) {  // mirror about sample 0
        xs.push_back(-static_cast<double>(idx[i]));
        ys.push_back(v[idx[i]]);
    }
    for (int i = 0; i < m; ++i) {
        xs.push_back(static_cast<double>(idx[i]));
        ys.push_back(v[idx[i]]);
    }
    for (int i = m - 1; i >= m - pad; --i) {  // mirror about sample n-1
        xs.push_back(static_cast<double>(2 * (n - 1) - idx[i]));
        ys.push_back(v[idx[i]]);
    }
    return natural_spline_at_samples(xs, ys, n);
}

}  // namespace detail

// Extracts one intrinsic mode function by iterative envelope-mean subtraction.
// Returns (imf, residue) with residue = signal - imf element-wise.
inline std::pair<TimeSeries, TimeSeries> sift_one_imf(const TimeSeries& signal,
                                                      const SiftConfig& cfg) {
    signal.validate();
    cfg.validate();
    const int n = static_cast<int>(signal.size());
    if (n < 4) throw std::invalid_argument("sifting requires at least 4 samples");

    std::vector<double> h = signal.values;
    detail::Extrema ext = detail::find_extrema(h);
    if (ext.maxima.size() < 2 || ext.minima.size() < 2)
        throw not_siftable_error("signal has fewer than 2 maxima or 2 minima");

    for (int iter = 1;; ++iter) {
        const std::vector<double> upper = detail::envelope(h, ext.maxima, cfg.boundary_extrema);
        const std::vector<double> lower = detail::envelope(h, ext.minima, cfg.boundary_extrema);

        double num = 0.0, den = 0.0;
        for (int j = 0; j < n; ++j) {
            const double mean = 0.5 * (upper[j] + lower[j]);
            num += mean * mean;
            den += h[j] * h[j];
            h[j] -= mean;
        }
        const double sd = den > 0.0 ? num / den : 0.0;
        if (sd < cfg.sd_threshold || iter >= cfg.max_sift_iterations) break;

        ext = detail::find_extrema(h);
        if (ext.maxima.size() < 2 || ext.minima.size() < 2) break;  // oscillation exhausted
    }

    TimeSeries imf{std::move(h), signal.dt, std::nullopt};
    TimeSeries residue;
    residue.dt = signal.dt;
    residue.values.resize(n);
    for (int j = 0; j < n; ++j) residue.values[j] = signal.values[j] - imf.values[j];
    return {std::move(imf), std::move(residue)};
}

// Full empirical mode decomposition: peel IMFs until the residue has fewer
// than 3 interior extrema (covers the monotonic case) or stops being siftable.
inline IMFDecomposition emd(const TimeSeries& signal, const SiftConfig& cfg = {}) {
    signal.validate();
    cfg.validate();
    if (signal.size() < 4) throw std::invalid_argument("EMD requires at least 4 samples");

    IMFDecomposition d;
    d.method = DecompMethod::emd;
    d.sift = cfg;
    TimeSeries residue = signal;
    residue.seed = std::nullopt;
    while (d.modes.size() < 64) {
        if (detail::find_extrema(residue.values).total() < 3) break;
        try {
            auto [imf, rem] = sift_one_imf(residue, cfg);
            d.modes.push_back(std::move(imf));
            residue = std::move(rem);
        } catch (const not_siftable_error&) {
            break;
        }
    }
    d.residual = std::move(residue);
    return d;
}

// Element-wise sum of all modes and the residual.
inline TimeSeries reconstruct(const IMFDecomposition& d) {
    const std::size_t n = d.residual.size();
    if (n == 0) throw std::invalid_argument("decomposition has an empty residual");
    TimeSeries out = d.residual;
    for (const TimeSeries& mode : d.modes) {
        if (mode.size() != n || mode.dt != d.residual.dt)
            throw std::invalid_argument(
                "decomposition integrity violated: component length or dt mismatch");
        for (std::size_t j = 0; j < n; ++j) out.values[j] += mode.values[j];
    }
    return out;
}

// k-th EMD mode of the signal (1-based), or a zero series when the
// decomposition yields fewer than k modes.
inline TimeSeries extract_kth_mode(const TimeSeries& signal, int k, const SiftConfig& cfg = {}) {
    if (k < 1) throw std::invalid_argument("mode index must be at least 1");
    IMFDecomposition d = emd(signal, cfg);
    if (static_cast<std::size_t>(k) <= d.modes.size()) return d.modes[k - 1];
    TimeSeries zero;
    zero.dt = signal.dt;
    zero.values.assign(signal.size(), 0.0);
    return zero;
}

}  // namespace usv::decomp
