#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "usv/ceemdan.hpp"
#include "usv/emd.hpp"
#include "usv/metrics.hpp"
#include "usv/pso.hpp"
#include "usv/random.hpp"
#include "usv/svr.hpp"
#include "usv/time_series.hpp"

namespace usv::forecast {

enum class Method { ceemdan_pso_svm, emd_pso_svm, ceemdan_svm };

inline constexpr std::string_view method_name(Method m) {
    switch (m) {
        case Method::ceemdan_pso_svm: return "ceemdan-pso-svm";
        case Method::emd_pso_svm: return "emd-pso-svm";
        case Method::ceemdan_svm: return "ceemdan-svm";
    }
    throw std::invalid_argument("unknown forecasting method");
}

inline Method parse_method(std::string_view name) {
    if (name == "ceemdan-pso-svm") return Method::ceemdan_pso_svm;
    if (name == "emd-pso-svm") return Method::emd_pso_svm;
    if (name == "ceemdan-svm") return Method::ceemdan_svm;
    throw std::invalid_argument("unknown method '" + std::string(name) +
                                "' (expected ceemdan-pso-svm, emd-pso-svm, or ceemdan-svm)");
}

struct WindowSpec {
    int embedding = 10;  // lagged values per input row
    int horizon = 1;     // steps ahead

    void validate() const {
        if (embedding < 1) throw std::invalid_argument("window embedding must be at least 1");
        if (horizon < 1) throw std::invalid_argument("forecast horizon must be at least 1");
    }
};

struct NormalizationParams {
    double min = 0.0;
    double max = 1.0;
};

inline std::pair<TimeSeries, NormalizationParams> normalize(const TimeSeries& series) {
    series.validate();
    if (series.size() < 2) throw std::domain_error("normalization requires at least 2 samples");
    NormalizationParams p{series.values.front(), series.values.front()};
    for (double v : series.values) {
        p.min = std::min(p.min, v);
        p.max = std::max(p.max, v);
    }
    if (p.max == p.min)
        throw std::domain_error("cannot normalize a constant series (degenerate range)");
    TimeSeries out = series;
    const double span = p.max - p.min;
    for (double& v : out.values) v = (v - p.min) / span;
    return {std::move(out), p};
}

inline TimeSeries denormalize(const TimeSeries& series, const NormalizationParams& p) {
    series.validate();
    if (!(p.max > p.min))
        throw std::domain_error("normalization parameters have a degenerate range");
    TimeSeries out = series;
    const double span = p.max - p.min;
    for (double& v : out.values) v = p.min + v * span;
    return out;
}

struct WindowSet {
    std::vector<std::vector<double>> inputs;
    std::vector<double> targets;
};

// Supervised framing: row j holds values[j .. j+embedding), its target is
// values[j+embedding+horizon-1], strictly chronological.
inline WindowSet make_windows(const TimeSeries& series, const WindowSpec& spec) {
    series.validate();
    spec.validate();
    const int len = static_cast<int>(series.size());
    const int count = len - spec.embedding - spec.horizon + 1;
    if (count < 1)
        throw std::domain_error("series of length " + std::to_string(len) +
                                " is too short to window (needs more than " +
                                std::to_string(spec.embedding + spec.horizon - 1) + " samples)");
    WindowSet w;
    w.inputs.reserve(count);
    w.targets.reserve(count);
    for (int j = 0; j < count; ++j) {
        w.inputs.emplace_back(series.values.begin() + j,
                              series.values.begin() + j + spec.embedding);
        w.targets.push_back(series.values[j + spec.embedding + spec.horizon - 1]);
    }
    return w;
}

inline std::pair<TimeSeries, TimeSeries> split_train_test(const TimeSeries& series,
                                                          int train_count) {
    series.validate();
    if (train_count < 1) throw std::domain_error("training split must keep at least 1 sample");
    if (train_count >= static_cast<int>(series.size()))
        throw std::domain_error("training split of " + std::to_string(train_count) +
                                " samples leaves no test data in a series of length " +
                                std::to_string(series.size()));
    TimeSeries train, test;
    train.dt = test.dt = series.dt;
    train.seed = test.seed = series.seed;
    train.values.assign(series.values.begin(), series.values.begin() + train_count);
    test.values.assign(series.values.begin() + train_count, series.values.end());
    return {std::move(train), std::move(test)};
}

struct ComponentModel {
    NormalizationParams norm;
    bool constant_bypass = false;  // train split was constant; no SVR behind it
    double constant_value = 0.0;
    svr::SVRModel model;
    bool pso_tuned = false;
    std::vector<double> tuned_position;  // log2-space (C, sigma) chosen by the swarm
};

struct HybridModel {
    Method method = Method::ceemdan_pso_svm;
    WindowSpec window;
    int train_count = 0;
    std::uint64_t master_seed = 0;
    decomp::IMFDecomposition decomposition;  // of the full series, per the method
    std::vector<ComponentModel> components;  // one per mode plus the residual
};

struct TrainSettings {
    WindowSpec window;
    int train_count = 661;
    decomp::SiftConfig sift;
    decomp::CeemdanConfig ceemdan;  // seed is derived from master_seed at use
    pso::SwarmConfig swarm;         // seed is derived per component at use
    int cv_folds = 3;
    double tube = 0.01;
    svr::SVRHyperparams untuned{16.0, 1.0, 0.01};  // fixed (C, sigma) of the untuned variant
    // The cross-validation search visits thousands of hyperparameter points,
    // so its dual solves run under a reduced update budget; the final
    // per-component fits get the full default budget.
    svr::SVRTrainOptions cv_options{1e-3, 500, false};
    svr::SVRTrainOptions final_options{};
    std::uint64_t master_seed = 42;

    void validate() const {
        window.validate();
        if (train_count < 2) throw std::invalid_argument("training split is too small");
        sift.validate();
        ceemdan.validate();
        swarm.validate();
        if (cv_folds < 2) throw std::invalid_argument("cross-validation needs at least 2 folds");
        if (!(tube >= 0.0)) throw std::invalid_argument("tube width must be non-negative");
        untuned.validate();
    }
};

namespace detail {

inline decomp::IMFDecomposition decompose_for(Method method, const TimeSeries& series,
                                              const TrainSettings& ts) {
    if (method == Method::emd_pso_svm) return decomp::emd(series, ts.sift);
    decomp::CeemdanConfig cc = ts.ceemdan;
    cc.sift = ts.sift;
    cc.seed = derive_seed(ts.master_seed, {fnv1a64("ceemdan")});
    return decomp::ceemdan(series, cc);
}

inline std::vector<const TimeSeries*> component_views(const decomp::IMFDecomposition& d) {
    std::vector<const TimeSeries*> views;
    views.reserve(d.modes.size() + 1);
    for (const TimeSeries& m : d.modes) views.push_back(&m);
    views.push_back(&d.residual);
    return views;
}

// Trains the per-component models against an already computed decomposition.
// Normalization bounds come from the training split alone; the swarm search,
// when the method asks for one, scores candidates by chronological
// cross-validation over the training windows only.
inline HybridModel train_with_decomposition(const TimeSeries& series, Method method,
                                            const TrainSettings& ts,
                                            decomp::IMFDecomposition decomposition) {
    ts.validate();
    series.validate();
    if (ts.train_count >= static_cast<int>(series.size()))
        throw std::domain_error("training split exceeds the series length");

    HybridModel model;
    model.method = method;
    model.window = ts.window;
    model.train_count = ts.train_count;
    model.master_seed = ts.master_seed;
    model.decomposition = std::move(decomposition);

    const auto views = component_views(model.decomposition);
    for (std::size_t c = 0; c < views.size(); ++c) {
        const TimeSeries& comp = *views[c];
        ComponentModel cm;

        double lo = comp.values.front(), hi = comp.values.front();
        for (int i = 0; i < ts.train_count; ++i) {
            lo = std::min(lo, comp.values[i]);
            hi = std::max(hi, comp.values[i]);
        }
        if (hi == lo) {
            cm.constant_bypass = true;
            cm.constant_value = lo;
            cm.norm = {lo, lo + 1.0};  // placeholder; never applied
            model.components.push_back(std::move(cm));
            continue;
        }
        cm.norm = {lo, hi};

        TimeSeries train_part;
        train_part.dt = comp.dt;
        train_part.values.reserve(ts.train_count);
        for (int i = 0; i < ts.train_count; ++i)
            train_part.values.push_back((comp.values[i] - lo) / (hi - lo));
        const WindowSet windows = make_windows(train_part, ts.window);

        svr::SVRHyperparams hp = ts.untuned;
        hp.tube = ts.tube;
        if (method != Method::ceemdan_svm) {
            pso::CvEvaluator evaluator(windows.inputs, windows.targets, ts.cv_folds, ts.tube,
                                       ts.cv_options);
            pso::SwarmConfig swarm = ts.swarm;
            swarm.seed = derive_seed(ts.master_seed,
                                     {fnv1a64("pso"), static_cast<std::uint64_t>(c)});
            const auto best = pso::optimize(
                swarm, [&](std::span<const double> p) { return evaluator.evaluate(p); });
            hp = pso::decode_position(best.best_position, ts.tube);
            cm.pso_tuned = true;
            cm.tuned_position = best.best_position;
        }

        cm.model = svr::train(windows.inputs, windows.targets, hp, ts.final_options);
        model.components.push_back(std::move(cm));
    }
    return model;
}

}  // namespace detail

inline HybridModel train_hybrid(const TimeSeries& series, Method method,
                                const TrainSettings& ts) {
    ts.validate();
    series.validate();
    return detail::train_with_decomposition(series, method, ts,
                                            detail::decompose_for(method, series, ts));
}

// The decomposition a given method trains against: EMD for the EMD variant,
// seeded CEEMDAN for the rest. Exposed so tools can reproduce the exact
// component set a model saw.
inline decomp::IMFDecomposition decompose_for_method(Method method, const TimeSeries& series,
                                                     const TrainSettings& ts) {
    series.validate();
    return detail::decompose_for(method, series, ts);
}

// Half-open index range [begin, end) into a series.
struct EvalRange {
    int begin = 0;
    int end = 0;
};

namespace detail {

inline void check_eval_range(const HybridModel& model, const TimeSeries& series,
                             const EvalRange& range) {
    const int len = static_cast<int>(series.size());
    const int first_predictable = model.window.embedding + model.window.horizon - 1;
    if (range.begin < first_predictable || range.end > len || range.begin >= range.end)
        throw std::domain_error(
            "evaluation range [" + std::to_string(range.begin) + ", " +
            std::to_string(range.end) + ") is outside the predictable span [" +
            std::to_string(first_predictable) + ", " + std::to_string(len) + ")");
    const std::size_t n = model.decomposition.residual.size();
    if (n != series.size() || model.decomposition.residual.dt != series.dt)
        throw std::domain_error("series does not match the model's decomposition");
    if (model.components.size() != model.decomposition.modes.size() + 1)
        throw std::domain_error("model component count does not match its decomposition");
}

}  // namespace detail

// One-step-ahead predictions of each component over [range.begin, range.end),
// denormalized to physical units. Inputs are the true lagged component values.
inline std::vector<TimeSeries> forecast_components(const HybridModel& model,
                                                   const TimeSeries& series,
                                                   const EvalRange& range) {
    detail::check_eval_range(model, series, range);
    const auto views = detail::component_views(model.decomposition);
    const int e = model.window.embedding;
    const int h = model.window.horizon;

    std::vector<TimeSeries> outputs;
    outputs.reserve(views.size());
    for (std::size_t c = 0; c < views.size(); ++c) {
        const TimeSeries& comp = *views[c];
        const ComponentModel& cm = model.components[c];
        TimeSeries out;
        out.dt = series.dt;
        out.values.reserve(range.end - range.begin);
        std::vector<double> row(e);
        for (int i = range.begin; i < range.end; ++i) {
            if (cm.constant_bypass) {
                out.values.push_back(cm.constant_value);
                continue;
            }
            const double span = cm.norm.max - cm.norm.min;
            for (int k = 0; k < e; ++k)
                row[k] = (comp.values[i - h - e + 1 + k] - cm.norm.min) / span;
            const double predicted = svr::predict(cm.model, row);
            out.values.push_back(cm.norm.min + predicted * span);
        }
        outputs.push_back(std::move(out));
    }
    return outputs;
}

// Final attitude prediction: the sum of the per-component forecasts.
inline TimeSeries forecast(const HybridModel& model, const TimeSeries& series,
                           const EvalRange& range) {
    const auto parts = forecast_components(model, series, range);
    TimeSeries out;
    out.dt = series.dt;
    out.values.assign(range.end - range.begin, 0.0);
    for (const TimeSeries& part : parts)
        for (std::size_t j = 0; j < out.values.size(); ++j) out.values[j] += part.values[j];
    return out;
}

struct MethodResult {
    Method method = Method::ceemdan_pso_svm;
    MetricsReport report;
    TimeSeries predicted;  // test-range predictions, physical units
};

struct ComparisonResult {
    std::vector<MethodResult> results;  // ceemdan-pso-svm, emd-pso-svm, ceemdan-svm
    TimeSeries actual;                  // test-range actuals
    double improvement_vs_emd_pso_svm = 0.0;  // MAE gain of the hybrid, percent
    double improvement_vs_ceemdan_svm = 0.0;

    const MethodResult& result_for(Method m) const {
        for (const MethodResult& r : results)
            if (r.method == m) return r;
        throw std::invalid_argument("comparison lacks the requested method");
    }
};

// Trains all three methods on identical splits and seeds and evaluates them
// on the held-out test range. The two CEEMDAN-based methods share one
// decomposition: its seed derivation does not depend on the method, so this
// is purely a cost optimization.
inline ComparisonResult compare(const TimeSeries& series, const TrainSettings& ts) {
    ts.validate();
    series.validate();

    const EvalRange range{ts.train_count, static_cast<int>(series.size())};
    ComparisonResult out;
    out.actual.dt = series.dt;
    out.actual.values.assign(series.values.begin() + range.begin,
                             series.values.begin() + range.end);

    decomp::IMFDecomposition ceemdan_dec =
        detail::decompose_for(Method::ceemdan_pso_svm, series, ts);

    for (Method method :
         {Method::ceemdan_pso_svm, Method::emd_pso_svm, Method::ceemdan_svm}) {
        decomp::IMFDecomposition dec =
            method == Method::emd_pso_svm ? detail::decompose_for(method, series, ts)
            : method == Method::ceemdan_svm ? std::move(ceemdan_dec)
                                            : ceemdan_dec;
        HybridModel model = detail::train_with_decomposition(series, method, ts, std::move(dec));
        MethodResult r;
        r.method = method;
        r.predicted = forecast(model, series, range);
        r.report = metrics(out.actual, r.predicted);
        out.results.push_back(std::move(r));
    }

    const double ours = out.result_for(Method::ceemdan_pso_svm).report.mae;
    out.improvement_vs_emd_pso_svm =
        mae_improvement(out.result_for(Method::emd_pso_svm).report.mae, ours);
    out.improvement_vs_ceemdan_svm =
        mae_improvement(out.result_for(Method::ceemdan_svm).report.mae, ours);
    return out;
}

}  // namespace usv::forecast
