// usvmotion: simulate vessel roll from ocean-wave spectra, decompose it into
// intrinsic modes, and train/evaluate the hybrid decomposition+SVR
// forecasters. Every command is deterministic under a fixed seed.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "usv/config.hpp"
#include "usv/csv.hpp"
#include "usv/forecast.hpp"
#include "usv/model_io.hpp"
#include "usv/wave.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::vector<std::string> overrides;  // repeatable --set key=value
    std::optional<std::uint64_t> seed;
    std::optional<std::string> method;
    std::string data_path;
    bool simulate_input = false;
};

// Attaches the flags shared by every subcommand. Precedence, lowest to
// highest: built-in defaults, --config file, --set overrides, dedicated
// flags (--seed, --method).
void add_common_flags(CLI::App* cmd, CommonOpts& opts, bool takes_input) {
    cmd->add_option("--config", opts.config_path, "key = value settings file");
    cmd->add_option("--set", opts.overrides,
                    "override one config key, e.g. --set ceemdan.ensemble_size=50")
        ->type_name("KEY=VALUE");
    cmd->add_option("--seed", opts.seed, "master random seed (overrides config)");
    cmd->add_option("--method", opts.method,
                    "forecasting method: ceemdan-pso-svm | emd-pso-svm | ceemdan-svm");
    if (takes_input) {
        cmd->add_option("--data", opts.data_path, "input series CSV (header t,value)");
        cmd->add_flag("--simulate", opts.simulate_input,
                      "simulate the input series from the config instead of reading a file");
    }
}

usv::io::RunConfig resolve_config(const CommonOpts& opts) {
    usv::io::RunConfig cfg;
    if (!opts.config_path.empty()) cfg = usv::io::load_config(opts.config_path);
    for (const std::string& kv : opts.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw usv::io::config_error("--set expects KEY=VALUE, got '" + kv + "'");
        usv::io::apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (opts.seed) cfg.seed = *opts.seed;
    if (opts.method) {
        usv::forecast::parse_method(*opts.method);
        cfg.method = *opts.method;
    }
    cfg.validate();
    return cfg;
}

usv::TimeSeries input_series(const CommonOpts& opts, const usv::io::RunConfig& cfg) {
    if (!opts.data_path.empty() && opts.simulate_input)
        throw usv::io::config_error("choose either --data or --simulate, not both");
    if (!opts.data_path.empty()) return usv::io::read_series(opts.data_path);
    if (opts.simulate_input)
        return usv::wave::simulate_roll(cfg.sea, cfg.vessel, cfg.samples, cfg.dt, cfg.seed);
    throw usv::io::config_error("no input series: pass --data <csv> or --simulate");
}

std::string join_path(const std::string& dir, const std::string& name) {
    if (dir.empty() || dir == ".") return name;
    std::filesystem::create_directories(dir);
    return dir.back() == '/' ? dir + name : dir + "/" + name;
}

int run_simulate(const CommonOpts& common, const std::string& out_path) {
    const auto cfg = resolve_config(common);
    const auto roll =
        usv::wave::simulate_roll(cfg.sea, cfg.vessel, cfg.samples, cfg.dt, cfg.seed);
    usv::io::write_series(out_path, roll);
    std::cout << "wrote " << roll.size() << " samples to " << out_path << "\n";
    return 0;
}

int run_decompose(const CommonOpts& common, const std::string& out_dir) {
    const auto cfg = resolve_config(common);
    const auto series = input_series(common, cfg);
    const auto ts = cfg.to_train_settings();
    const auto dec =
        usv::forecast::decompose_for_method(cfg.parsed_method(), series, ts);
    for (std::size_t m = 0; m < dec.modes.size(); ++m)
        usv::io::write_series(join_path(out_dir, "mode_" + std::to_string(m + 1) + ".csv"),
                              dec.modes[m]);
    usv::io::write_series(join_path(out_dir, "residual.csv"), dec.residual);
    std::cout << "wrote " << dec.modes.size() << " modes and residual to " << out_dir
              << "\n";
    return 0;
}

int run_train(const CommonOpts& common, const std::string& out_path) {
    const auto cfg = resolve_config(common);
    const auto series = input_series(common, cfg);
    const auto ts = cfg.to_train_settings();
    const auto model = usv::forecast::train_hybrid(series, cfg.parsed_method(), ts);
    usv::io::save_model(out_path, usv::io::to_saved(model, ts));
    std::cout << "trained " << usv::forecast::method_name(model.method) << " with "
              << model.components.size() << " component models; saved to " << out_path
              << "\n";
    return 0;
}

int run_predict(const CommonOpts& common, const std::string& model_path,
                const std::string& out_path) {
    const auto cfg = resolve_config(common);
    const auto series = input_series(common, cfg);
    const auto saved = usv::io::load_model(model_path);
    const auto model = saved.rebuild(series);

    const int first_predictable = model.window.embedding + model.window.horizon - 1;
    const usv::forecast::EvalRange range{std::max(model.train_count, first_predictable),
                                         static_cast<int>(series.size())};
    const auto predicted = usv::forecast::forecast(model, series, range);

    usv::TimeSeries actual;
    actual.dt = series.dt;
    actual.values.assign(series.values.begin() + range.begin,
                         series.values.begin() + range.end);
    usv::io::write_predictions(out_path, series.time_at(range.begin), actual, predicted);
    std::cout << "wrote " << predicted.size() << " predictions to " << out_path << "\n";
    return 0;
}

int run_evaluate(const std::string& data_path, const std::string& out_path) {
    const auto table = usv::io::read_predictions(data_path);
    const auto report = usv::forecast::metrics(table.actual, table.predicted);
    std::cout << "mae " << usv::io::format_double(report.mae) << "\n"
              << "mape " << usv::io::format_double(report.mape) << "\n"
              << "mse " << usv::io::format_double(report.mse) << "\n"
              << "rmse " << usv::io::format_double(report.rmse) << "\n"
              << "smape " << usv::io::format_double(report.smape) << "\n";
    if (!out_path.empty())
        usv::io::write_metrics_table(out_path, {{"evaluate", report}});
    return 0;
}

int run_compare(const CommonOpts& common, const std::string& out_dir) {
    const auto cfg = resolve_config(common);
    const auto series = input_series(common, cfg);
    const auto ts = cfg.to_train_settings();
    const auto comparison = usv::forecast::compare(series, ts);

    std::vector<std::pair<std::string, usv::forecast::MetricsReport>> rows;
    for (const auto& result : comparison.results) {
        rows.emplace_back(std::string(usv::forecast::method_name(result.method)),
                          result.report);
        usv::io::write_predictions(
            join_path(out_dir,
                      "pred_" + std::string(usv::forecast::method_name(result.method)) +
                          ".csv"),
            series.time_at(ts.train_count), comparison.actual, result.predicted);
    }
    const std::string table_path = join_path(out_dir, "metrics.csv");
    usv::io::write_metrics_table(table_path, rows);

    std::cout << "wrote " << table_path << " and " << comparison.results.size()
              << " prediction files to " << out_dir << "\n";
    std::cout << "MAE improvement over emd-pso-svm: "
              << usv::io::format_double(comparison.improvement_vs_emd_pso_svm) << "%\n";
    std::cout << "MAE improvement over ceemdan-svm: "
              << usv::io::format_double(comparison.improvement_vs_ceemdan_svm) << "%\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "usvmotion: vessel roll simulation and hybrid mode-decomposition forecasting"};
    app.require_subcommand(1);

    CommonOpts sim_opts, dec_opts, train_opts, pred_opts, cmp_opts;
    std::string sim_out = "roll.csv";
    std::string dec_dir = ".";
    std::string train_out = "model.txt";
    std::string pred_model, pred_out = "predictions.csv";
    std::string eval_data, eval_out;
    std::string cmp_dir = ".";

    auto* simulate = app.add_subcommand("simulate", "synthesize a roll-angle series");
    add_common_flags(simulate, sim_opts, false);
    simulate->add_option("--out", sim_out, "output series CSV");

    auto* decompose =
        app.add_subcommand("decompose", "split a series into intrinsic modes");
    add_common_flags(decompose, dec_opts, true);
    decompose->add_option("--out-dir", dec_dir, "directory for mode_k.csv and residual.csv");

    auto* train = app.add_subcommand("train", "fit the configured forecasting method");
    add_common_flags(train, train_opts, true);
    train->add_option("--out", train_out, "model artifact path");

    auto* predict =
        app.add_subcommand("predict", "one-step-ahead forecasts from a saved model");
    add_common_flags(predict, pred_opts, true);
    predict->add_option("--model", pred_model, "model artifact from `train`")->required();
    predict->add_option("--out", pred_out, "output CSV (t,actual,predicted)");

    auto* evaluate =
        app.add_subcommand("evaluate", "score a prediction file against its actuals");
    evaluate->add_option("--data", eval_data, "prediction CSV from `predict`")->required();
    evaluate->add_option("--out", eval_out, "optional metrics CSV");

    auto* compare =
        app.add_subcommand("compare", "train and score all three methods side by side");
    add_common_flags(compare, cmp_opts, true);
    compare->add_option("--out-dir", cmp_dir,
                        "directory for metrics.csv and per-method prediction files");

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) return run_simulate(sim_opts, sim_out);
        if (decompose->parsed()) return run_decompose(dec_opts, dec_dir);
        if (train->parsed()) return run_train(train_opts, train_out);
        if (predict->parsed()) return run_predict(pred_opts, pred_model, pred_out);
        if (evaluate->parsed()) return run_evaluate(eval_data, eval_out);
        if (compare->parsed()) return run_compare(cmp_opts, cmp_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
