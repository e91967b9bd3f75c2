#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "usv/config.hpp"
#include "usv/csv.hpp"
#include "usv/forecast.hpp"
#include "usv/model_io.hpp"
#include "usv/random.hpp"

using Catch::Matchers::ContainsSubstring;
using namespace usv;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "usvmotion-io-tests";
    std::filesystem::create_directories(dir);
    return dir / name;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

TimeSeries random_series(std::uint64_t seed, int count, double dt) {
    Rng rng(seed);
    TimeSeries s;
    s.dt = dt;
    for (int i = 0; i < count; ++i) s.values.push_back(rng.uniform(-3.0, 3.0));
    return s;
}

TimeSeries two_tone(int count = 160, double dt = 0.05) {
    TimeSeries s;
    s.dt = dt;
    for (int i = 0; i < count; ++i) {
        const double t = i * dt;
        s.values.push_back(std::sin(2.0 * std::numbers::pi * 0.8 * t) +
                           0.3 * std::sin(2.0 * std::numbers::pi * 0.15 * t));
    }
    return s;
}

forecast::TrainSettings tiny_settings() {
    forecast::TrainSettings ts;
    ts.window.embedding = 6;
    ts.train_count = 110;
    ts.ceemdan.ensemble_size = 12;
    ts.swarm.particle_count = 4;
    ts.swarm.max_iterations = 8;
    ts.cv_folds = 2;
    ts.cv_options.max_pair_updates = 200;
    ts.final_options.max_pair_updates = 2000;
    ts.master_seed = 7;
    return ts;
}

}  // namespace

TEST_CASE("decimal rendering round-trips doubles exactly", "[io]") {
    Rng rng(2025);
    for (int i = 0; i < 200; ++i) {
        const double v = rng.uniform(-1.0, 1.0) * std::pow(10.0, rng.uniform(-12.0, 12.0));
        const std::string text = io::format_double(v);
        CHECK(std::stod(text) == v);
    }
    CHECK(std::stod(io::format_double(0.1)) == 0.1);
    CHECK(std::stod(io::format_double(-0.0)) == 0.0);
}

TEST_CASE("series CSV files round-trip bit-exactly", "[io]") {
    const TimeSeries original = random_series(11, 57, 0.1);
    const auto path = temp_file("series_roundtrip.csv");
    io::write_series(path.string(), original);

    const TimeSeries loaded = io::read_series(path.string());
    REQUIRE(loaded.size() == original.size());
    CHECK(loaded.values == original.values);  // exact, not approximate
    CHECK(loaded.dt == original.dt);
}

TEST_CASE("series CSV parsing reports precise error locations", "[io]") {
    SECTION("wrong header") {
        const auto path = temp_file("bad_header.csv");
        write_text(path, "time,roll\n0,1\n");
        CHECK_THROWS_MATCHES(io::read_series(path.string()), io::csv_error,
                             Catch::Matchers::MessageMatches(
                                 ContainsSubstring("line 1") &&
                                 ContainsSubstring("t,value")));
    }
    SECTION("unparsable value names its line") {
        const auto path = temp_file("bad_value.csv");
        write_text(path, "t,value\n0,1.5\n0.1,oops\n");
        CHECK_THROWS_MATCHES(
            io::read_series(path.string()), io::csv_error,
            Catch::Matchers::MessageMatches(ContainsSubstring("line 3") &&
                                            ContainsSubstring("oops")));
    }
    SECTION("wrong field count names its line") {
        const auto path = temp_file("bad_fields.csv");
        write_text(path, "t,value\n0,1.5\n0.1\n");
        CHECK_THROWS_MATCHES(
            io::read_series(path.string()), io::csv_error,
            Catch::Matchers::MessageMatches(ContainsSubstring("line 3") &&
                                            ContainsSubstring("expected 2")));
    }
    SECTION("non-uniform sampling is rejected") {
        const auto path = temp_file("bad_grid.csv");
        write_text(path, "t,value\n0,1\n0.1,2\n0.35,3\n");
        CHECK_THROWS_MATCHES(
            io::read_series(path.string()), io::csv_error,
            Catch::Matchers::MessageMatches(ContainsSubstring("non-uniform")));
    }
    SECTION("empty and headerless files are rejected") {
        const auto path = temp_file("empty.csv");
        write_text(path, "");
        CHECK_THROWS_AS(io::read_series(path.string()), io::csv_error);
        write_text(path, "t,value\n");
        CHECK_THROWS_MATCHES(
            io::read_series(path.string()), io::csv_error,
            Catch::Matchers::MessageMatches(ContainsSubstring("no data rows")));
    }
    SECTION("missing file is reported by name") {
        CHECK_THROWS_MATCHES(io::read_series("/nonexistent/nowhere.csv"), io::csv_error,
                             Catch::Matchers::MessageMatches(
                                 ContainsSubstring("/nonexistent/nowhere.csv")));
    }
}

TEST_CASE("prediction files round-trip with their time origin", "[io]") {
    TimeSeries actual = random_series(21, 40, 0.1);
    TimeSeries predicted = random_series(22, 40, 0.1);
    const auto path = temp_file("pred_roundtrip.csv");
    io::write_predictions(path.string(), 66.1, actual, predicted);

    const auto table = io::read_predictions(path.string());
    REQUIRE(table.t.size() == 40);
    CHECK(table.t.front() == 66.1);
    CHECK(table.actual.values == actual.values);
    CHECK(table.predicted.values == predicted.values);
    CHECK_THAT(table.actual.dt, Catch::Matchers::WithinRel(0.1, 1e-12));

    TimeSeries shorter = actual;
    shorter.values.pop_back();
    CHECK_THROWS_AS(io::write_predictions(path.string(), 0.0, shorter, predicted),
                    io::csv_error);

    write_text(temp_file("pred_bad.csv"), "t,actual,predicted\n0,1\n");
    CHECK_THROWS_MATCHES(
        io::read_predictions(temp_file("pred_bad.csv").string()), io::csv_error,
        Catch::Matchers::MessageMatches(ContainsSubstring("line 2") &&
                                        ContainsSubstring("expected 3")));
}

TEST_CASE("metrics tables list one labeled row per method", "[io]") {
    forecast::MetricsReport r1{0.5, 10.0, 0.3, std::sqrt(0.3), 9.0, 0, 0};
    forecast::MetricsReport r2{0.7, 12.0, 0.6, std::sqrt(0.6), 11.0, 0, 0};
    std::ostringstream out;
    io::write_metrics_table(out, {{"ceemdan-pso-svm", r1}, {"emd-pso-svm", r2}});
    const std::string text = out.str();
    CHECK_THAT(text, ContainsSubstring("method,mae,mape,mse,rmse,smape\n"));
    CHECK_THAT(text, ContainsSubstring("ceemdan-pso-svm,0.5,"));
    CHECK_THAT(text, ContainsSubstring("emd-pso-svm,0.69999999999999996,"));
    int lines = 0;
    for (char c : text) lines += c == '\n';
    CHECK(lines == 3);
}

TEST_CASE("config defaults echo and re-parse losslessly", "[io]") {
    const io::RunConfig defaults;
    const std::string echoed = io::echo_config(defaults);

    std::istringstream in(echoed);
    const io::RunConfig reparsed = io::parse_config(in);
    CHECK(io::echo_config(reparsed) == echoed);  // parse∘echo is a fixpoint

    // defaults mirror the library defaults
    CHECK_THAT(echoed, ContainsSubstring("sea.significant_wave_height = 5\n"));
    CHECK_THAT(echoed, ContainsSubstring("vessel.natural_frequency = 1.5700000000000001\n"));
    CHECK_THAT(echoed, ContainsSubstring("sim.samples = 943\n"));
    CHECK_THAT(echoed, ContainsSubstring("ceemdan.noise_scale = 0.20000000000000001\n"));
    CHECK_THAT(echoed, ContainsSubstring("ceemdan.ensemble_size = 100\n"));
    CHECK_THAT(echoed, ContainsSubstring("swarm.particles = 10\n"));
    CHECK_THAT(echoed, ContainsSubstring("swarm.iterations = 200\n"));
    CHECK_THAT(echoed, ContainsSubstring("svr.penalty = 16\n"));
    CHECK_THAT(echoed, ContainsSubstring("cv.folds = 3\n"));
    CHECK_THAT(echoed, ContainsSubstring("window.embedding = 10\n"));
    CHECK_THAT(echoed, ContainsSubstring("split.train_count = 661\n"));
    CHECK_THAT(echoed, ContainsSubstring("seed = 42\n"));
    CHECK_THAT(echoed, ContainsSubstring("method = ceemdan-pso-svm\n"));
}

TEST_CASE("config parsing accepts comments and rejects unknown keys", "[io]") {
    std::istringstream in(
        "# experiment tweak\n"
        "sea.significant_wave_height = 2.0   # calmer sea\n"
        "\n"
        "swarm.particles = 6\n"
        "method = emd-pso-svm\n");
    const io::RunConfig cfg = io::parse_config(in, "inline.cfg");
    CHECK(cfg.sea.significant_wave_height == 2.0);
    CHECK(cfg.swarm_particles == 6);
    CHECK(cfg.method == "emd-pso-svm");
    CHECK(cfg.samples == 943);  // untouched keys keep defaults

    SECTION("unknown key is named") {
        std::istringstream bad("sea.depth = 100\n");
        CHECK_THROWS_MATCHES(io::parse_config(bad, "bad.cfg"), io::config_error,
                             Catch::Matchers::MessageMatches(
                                 ContainsSubstring("sea.depth") &&
                                 ContainsSubstring("bad.cfg line 1")));
    }
    SECTION("bad value names key and line") {
        std::istringstream bad("\nswarm.particles = many\n");
        CHECK_THROWS_MATCHES(io::parse_config(bad, "bad.cfg"), io::config_error,
                             Catch::Matchers::MessageMatches(
                                 ContainsSubstring("swarm.particles") &&
                                 ContainsSubstring("line 2")));
    }
    SECTION("missing equals sign is rejected") {
        std::istringstream bad("seed 42\n");
        CHECK_THROWS_MATCHES(
            io::parse_config(bad, "bad.cfg"), io::config_error,
            Catch::Matchers::MessageMatches(ContainsSubstring("key = value")));
    }
    SECTION("unknown method name is rejected at parse time") {
        std::istringstream bad("method = arima\n");
        CHECK_THROWS_AS(io::parse_config(bad, "bad.cfg"), std::exception);
    }
    SECTION("missing config file is reported") {
        CHECK_THROWS_MATCHES(io::load_config("/nonexistent/run.cfg"), io::config_error,
                             Catch::Matchers::MessageMatches(
                                 ContainsSubstring("/nonexistent/run.cfg")));
    }
}

TEST_CASE("config wires through to training settings", "[io]") {
    io::RunConfig cfg;
    io::apply_setting(cfg, "swarm.c1", "2.5");
    io::apply_setting(cfg, "svr.tube", "0.02");
    io::apply_setting(cfg, "ceemdan.ensemble_size", "25");
    io::apply_setting(cfg, "window.embedding", "7");
    io::apply_setting(cfg, "split.train_count", "500");
    io::apply_setting(cfg, "seed", "1234");

    const auto ts = cfg.to_train_settings();
    CHECK(ts.swarm.c1 == 2.5);
    CHECK(ts.tube == 0.02);
    CHECK(ts.untuned.tube == 0.02);
    CHECK(ts.ceemdan.ensemble_size == 25);
    CHECK(ts.window.embedding == 7);
    CHECK(ts.train_count == 500);
    CHECK(ts.master_seed == 1234);
    CHECK(cfg.parsed_method() == forecast::Method::ceemdan_pso_svm);
}

TEST_CASE("model artifacts round-trip and rebuild bit-identical forecasts", "[io]") {
    const TimeSeries series = two_tone();
    const auto ts = tiny_settings();
    const auto model = forecast::train_hybrid(series, forecast::Method::emd_pso_svm, ts);

    const io::SavedModel saved = io::to_saved(model, ts);
    std::ostringstream sink;
    io::write_model(sink, saved);
    std::istringstream source(sink.str());
    const io::SavedModel loaded = io::read_model(source, "roundtrip");

    REQUIRE(loaded.components.size() == model.components.size());
    CHECK(loaded.method == model.method);
    CHECK(loaded.window.embedding == model.window.embedding);
    CHECK(loaded.train_count == model.train_count);
    CHECK(loaded.master_seed == model.master_seed);
    for (std::size_t c = 0; c < loaded.components.size(); ++c) {
        const auto& a = model.components[c];
        const auto& b = loaded.components[c];
        CHECK(a.norm.min == b.norm.min);
        CHECK(a.norm.max == b.norm.max);
        CHECK(a.constant_bypass == b.constant_bypass);
        CHECK(a.pso_tuned == b.pso_tuned);
        CHECK(a.tuned_position == b.tuned_position);
        if (a.constant_bypass) continue;
        CHECK(a.model.bias == b.model.bias);
        CHECK(a.model.hyperparams.penalty == b.model.hyperparams.penalty);
        CHECK(a.model.hyperparams.kernel_width == b.model.hyperparams.kernel_width);
        CHECK(a.model.dual_coeffs == b.model.dual_coeffs);
        CHECK(a.model.support_inputs == b.model.support_inputs);
        CHECK(a.model.support_indexes == b.model.support_indexes);

        // dual feasibility is inspectable from the artifact alone
        double coeff_sum = 0.0;
        for (double beta : b.model.dual_coeffs) {
            coeff_sum += beta;
            CHECK(std::abs(beta) <= b.model.hyperparams.penalty + 1e-9);
        }
        CHECK(std::abs(coeff_sum) <= 1e-6);
    }

    // reattaching to the training series reproduces the original forecasts
    const auto rebuilt = loaded.rebuild(series);
    const forecast::EvalRange range{ts.train_count, int(series.size())};
    const auto original_forecast = forecast::forecast(model, series, range);
    const auto rebuilt_forecast = forecast::forecast(rebuilt, series, range);
    CHECK(original_forecast.values == rebuilt_forecast.values);  // bit-exact
}

TEST_CASE("model artifacts refuse foreign versions and shapes", "[io]") {
    const TimeSeries series = two_tone();
    const auto ts = tiny_settings();
    const auto model =
        forecast::train_hybrid(series, forecast::Method::ceemdan_svm, ts);
    std::ostringstream sink;
    io::write_model(sink, io::to_saved(model, ts));
    const std::string text = sink.str();

    SECTION("future format version is refused") {
        std::string tampered = text;
        tampered.replace(tampered.find(" v1"), 3, " v9");
        std::istringstream in(tampered);
        CHECK_THROWS_MATCHES(io::read_model(in, "tampered"), io::model_io_error,
                             Catch::Matchers::MessageMatches(
                                 ContainsSubstring("version") &&
                                 ContainsSubstring("v9")));
    }
    SECTION("wrong magic is refused") {
        std::istringstream in("some-other-format v1\n");
        CHECK_THROWS_AS(io::read_model(in, "tampered"), io::model_io_error);
    }
    SECTION("support rows must match the window embedding") {
        std::string tampered = text;
        const auto pos = tampered.find("window 6 1");
        REQUIRE(pos != std::string::npos);
        tampered.replace(pos, 10, "window 7 1");
        std::istringstream in(tampered);
        CHECK_THROWS_MATCHES(io::read_model(in, "tampered"), io::model_io_error,
                             Catch::Matchers::MessageMatches(
                                 ContainsSubstring("dimension") &&
                                 ContainsSubstring("window embedding")));
    }
    SECTION("truncated file names the missing record") {
        const auto cut = text.find("components");
        std::istringstream in(text.substr(0, cut));
        CHECK_THROWS_MATCHES(
            io::read_model(in, "tampered"), io::model_io_error,
            Catch::Matchers::MessageMatches(ContainsSubstring("end of file")));
    }
    SECTION("rebuilding against a mismatched series is refused") {
        const io::SavedModel loaded = [&] {
            std::istringstream in(text);
            return io::read_model(in, "roundtrip");
        }();
        // far shorter series decomposes into fewer components
        CHECK_THROWS_MATCHES(loaded.rebuild(two_tone(24)), io::model_io_error,
                             Catch::Matchers::MessageMatches(
                                 ContainsSubstring("dimension mismatch")));
    }
}
