#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>

#include "usv/time_series.hpp"

namespace usv::forecast {

struct MetricsReport {
    double mae = 0.0;
    double mape = 0.0;   // percent
    double mse = 0.0;
    double rmse = 0.0;
    double smape = 0.0;  // percent
    int mape_excluded = 0;   // |actual| below threshold
    int smape_excluded = 0;  // |actual| + |predicted| below threshold
};

// Error metrics between aligned series. Percentage metrics skip terms whose
// denominator vanishes (|y| < 1e-12, respectively |y| + |yhat| < 1e-12) and
// report how many were skipped; if every term is skipped the metric is NaN.
inline MetricsReport metrics(std::span<const double> actual, std::span<const double> predicted) {
    if (actual.size() != predicted.size())
        throw std::invalid_argument("metric series must have the same length");
    if (actual.empty()) throw std::invalid_argument("metric series must be non-empty");
    const double n = static_cast<double>(actual.size());

    MetricsReport r;
    double abs_sum = 0.0, sq_sum = 0.0, mape_sum = 0.0, smape_sum = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double y = actual[i];
        const double yhat = predicted[i];
        if (!std::isfinite(y) || !std::isfinite(yhat))
            throw std::invalid_argument("metric series must be finite");
        const double err = y - yhat;
        abs_sum += std::abs(err);
        sq_sum += err * err;
        if (std::abs(y) < 1e-12)
            ++r.mape_excluded;
        else
            mape_sum += std::abs(err / y);
        if (std::abs(y) + std::abs(yhat) < 1e-12)
            ++r.smape_excluded;
        else
            smape_sum += std::abs(err) / ((std::abs(y) + std::abs(yhat)) / 2.0);
    }

    r.mae = abs_sum / n;
    r.mse = sq_sum / n;
    r.rmse = std::sqrt(r.mse);
    const double mape_n = n - r.mape_excluded;
    r.mape = mape_n > 0 ? 100.0 / mape_n * mape_sum : std::numeric_limits<double>::quiet_NaN();
    const double smape_n = n - r.smape_excluded;
    r.smape = smape_n > 0 ? 100.0 / smape_n * smape_sum : std::numeric_limits<double>::quiet_NaN();
    return r;
}

inline MetricsReport metrics(const TimeSeries& actual, const TimeSeries& predicted) {
    return metrics(std::span<const double>(actual.values),
                   std::span<const double>(predicted.values));
}

// Relative MAE improvement of `ours` against a baseline, in percent.
inline double mae_improvement(double baseline_mae, double ours_mae) {
    if (!(baseline_mae > 0.0))
        throw std::invalid_argument("baseline MAE must be positive to compute an improvement");
    return (baseline_mae - ours_mae) / baseline_mae * 100.0;
}

}  // namespace usv::forecast
