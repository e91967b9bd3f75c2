#pragma once

#include <charconv>
#include <cstdint>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "usv/csv.hpp"
#include "usv/forecast.hpp"
#include "usv/wave.hpp"

namespace usv::io {

class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Every tunable knob of the toolkit as a flat key=value record. Defaults
// equal the library defaults, so an empty config reproduces the standard
// sea-state-6 experiment.
struct RunConfig {
    wave::SeaStateConfig sea;
    wave::VesselConfig vessel;
    int samples = 943;
    double dt = 0.1;
    decomp::SiftConfig sift;
    double ceemdan_noise_scale = 0.2;
    int ceemdan_ensemble_size = 100;
    int swarm_particles = 10;
    double swarm_c1 = 1.5;
    double swarm_c2 = 1.7;
    int swarm_iterations = 200;
    double swarm_inertia = 0.8;
    double svr_penalty = 16.0;       // untuned baseline C
    double svr_kernel_width = 1.0;   // untuned baseline sigma
    double svr_tube = 0.01;
    int cv_folds = 3;
    forecast::WindowSpec window;
    int train_count = 661;
    std::uint64_t seed = 42;
    std::string method = "ceemdan-pso-svm";

    void validate() const {
        sea.validate();
        vessel.validate();
        if (samples < 1) throw config_error("sim.samples must be at least 1");
        if (!(dt > 0.0)) throw config_error("sim.dt must be positive");
        to_train_settings().validate();
        forecast::parse_method(method);
    }

    forecast::TrainSettings to_train_settings() const {
        forecast::TrainSettings ts;
        ts.window = window;
        ts.train_count = train_count;
        ts.sift = sift;
        ts.ceemdan.noise_scale = ceemdan_noise_scale;
        ts.ceemdan.ensemble_size = ceemdan_ensemble_size;
        ts.ceemdan.sift = sift;
        ts.swarm.particle_count = swarm_particles;
        ts.swarm.c1 = swarm_c1;
        ts.swarm.c2 = swarm_c2;
        ts.swarm.max_iterations = swarm_iterations;
        ts.swarm.inertia = swarm_inertia;
        ts.cv_folds = cv_folds;
        ts.tube = svr_tube;
        ts.untuned = {svr_penalty, svr_kernel_width, svr_tube};
        ts.master_seed = seed;
        return ts;
    }

    forecast::Method parsed_method() const { return forecast::parse_method(method); }
};

namespace detail {

struct ConfigField {
    const char* key;
    std::function<std::string(const RunConfig&)> get;
    std::function<void(RunConfig&, std::string_view)> set;
};

template <typename T>
T parse_number(std::string_view text, const char* key) {
    T out{};
    const char* first = text.data();
    const char* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last)
        throw config_error(std::string("config key '") + key + "': cannot parse value '" +
                           std::string(text) + "'");
    return out;
}

inline const std::vector<ConfigField>& field_table() {
    static const std::vector<ConfigField> table = [] {
        std::vector<ConfigField> t;
        auto real = [&t](const char* key, auto member) {
            t.push_back({key,
                         [member](const RunConfig& c) { return format_double(c.*member); },
                         [member, key](RunConfig& c, std::string_view v) {
                             c.*member = parse_number<double>(v, key);
                         }});
        };
        auto integer = [&t](const char* key, auto member) {
            t.push_back({key,
                         [member](const RunConfig& c) { return std::to_string(c.*member); },
                         [member, key](RunConfig& c, std::string_view v) {
                             c.*member = parse_number<int>(v, key);
                         }});
        };

        t.push_back({"sea.significant_wave_height",
                     [](const RunConfig& c) {
                         return format_double(c.sea.significant_wave_height);
                     },
                     [](RunConfig& c, std::string_view v) {
                         c.sea.significant_wave_height =
                             parse_number<double>(v, "sea.significant_wave_height");
                     }});
        t.push_back({"sea.wind_speed",
                     [](const RunConfig& c) { return format_double(c.sea.wind_speed); },
                     [](RunConfig& c, std::string_view v) {
                         c.sea.wind_speed = parse_number<double>(v, "sea.wind_speed");
                     }});
        t.push_back({"vessel.natural_frequency",
                     [](const RunConfig& c) {
                         return format_double(c.vessel.natural_frequency);
                     },
                     [](RunConfig& c, std::string_view v) {
                         c.vessel.natural_frequency =
                             parse_number<double>(v, "vessel.natural_frequency");
                     }});
        t.push_back({"vessel.damping_ratio",
                     [](const RunConfig& c) { return format_double(c.vessel.damping_ratio); },
                     [](RunConfig& c, std::string_view v) {
                         c.vessel.damping_ratio =
                             parse_number<double>(v, "vessel.damping_ratio");
                     }});
        t.push_back({"vessel.correction",
                     [](const RunConfig& c) { return format_double(c.vessel.correction); },
                     [](RunConfig& c, std::string_view v) {
                         c.vessel.correction = parse_number<double>(v, "vessel.correction");
                     }});
        t.push_back({"vessel.speed",
                     [](const RunConfig& c) { return format_double(c.vessel.speed); },
                     [](RunConfig& c, std::string_view v) {
                         c.vessel.speed = parse_number<double>(v, "vessel.speed");
                     }});
        t.push_back({"vessel.heading_angle",
                     [](const RunConfig& c) { return format_double(c.vessel.heading_angle); },
                     [](RunConfig& c, std::string_view v) {
                         c.vessel.heading_angle =
                             parse_number<double>(v, "vessel.heading_angle");
                     }});
        integer("sim.samples", &RunConfig::samples);
        real("sim.dt", &RunConfig::dt);
        t.push_back({"sift.sd_threshold",
                     [](const RunConfig& c) { return format_double(c.sift.sd_threshold); },
                     [](RunConfig& c, std::string_view v) {
                         c.sift.sd_threshold = parse_number<double>(v, "sift.sd_threshold");
                     }});
        t.push_back({"sift.max_iterations",
                     [](const RunConfig& c) {
                         return std::to_string(c.sift.max_sift_iterations);
                     },
                     [](RunConfig& c, std::string_view v) {
                         c.sift.max_sift_iterations =
                             parse_number<int>(v, "sift.max_iterations");
                     }});
        t.push_back({"sift.boundary_extrema",
                     [](const RunConfig& c) { return std::to_string(c.sift.boundary_extrema); },
                     [](RunConfig& c, std::string_view v) {
                         c.sift.boundary_extrema =
                             parse_number<int>(v, "sift.boundary_extrema");
                     }});
        real("ceemdan.noise_scale", &RunConfig::ceemdan_noise_scale);
        integer("ceemdan.ensemble_size", &RunConfig::ceemdan_ensemble_size);
        integer("swarm.particles", &RunConfig::swarm_particles);
        real("swarm.c1", &RunConfig::swarm_c1);
        real("swarm.c2", &RunConfig::swarm_c2);
        integer("swarm.iterations", &RunConfig::swarm_iterations);
        real("swarm.inertia", &RunConfig::swarm_inertia);
        real("svr.penalty", &RunConfig::svr_penalty);
        real("svr.kernel_width", &RunConfig::svr_kernel_width);
        real("svr.tube", &RunConfig::svr_tube);
        integer("cv.folds", &RunConfig::cv_folds);
        t.push_back({"window.embedding",
                     [](const RunConfig& c) { return std::to_string(c.window.embedding); },
                     [](RunConfig& c, std::string_view v) {
                         c.window.embedding = parse_number<int>(v, "window.embedding");
                     }});
        t.push_back({"window.horizon",
                     [](const RunConfig& c) { return std::to_string(c.window.horizon); },
                     [](RunConfig& c, std::string_view v) {
                         c.window.horizon = parse_number<int>(v, "window.horizon");
                     }});
        integer("split.train_count", &RunConfig::train_count);
        t.push_back({"seed",
                     [](const RunConfig& c) { return std::to_string(c.seed); },
                     [](RunConfig& c, std::string_view v) {
                         c.seed = parse_number<std::uint64_t>(v, "seed");
                     }});
        t.push_back({"method", [](const RunConfig& c) { return c.method; },
                     [](RunConfig& c, std::string_view v) {
                         forecast::parse_method(v);  // reject unknown names at parse time
                         c.method = std::string(v);
                     }});
        return t;
    }();
    return table;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

}  // namespace detail

// Applies one `key = value` assignment; unknown keys are rejected by name.
inline void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value) {
    key = detail::trim(key);
    value = detail::trim(value);
    for (const auto& field : detail::field_table()) {
        if (key == field.key) {
            field.set(cfg, value);
            return;
        }
    }
    throw config_error("unknown config key '" + std::string(key) + "'");
}

// Parses `key = value` text with `#` comments. Starts from defaults; later
// assignments override earlier ones.
inline RunConfig parse_config(std::istream& in, const std::string& source = "<config>") {
    RunConfig cfg;
    std::string row;
    int line = 0;
    while (std::getline(in, row)) {
        ++line;
        std::string_view text = detail::trim(row);
        if (const auto hash = text.find('#'); hash != std::string_view::npos)
            text = detail::trim(text.substr(0, hash));
        if (text.empty()) continue;
        const auto eq = text.find('=');
        if (eq == std::string_view::npos)
            throw config_error(source + " line " + std::to_string(line) +
                               ": expected 'key = value', got '" + std::string(text) + "'");
        try {
            apply_setting(cfg, text.substr(0, eq), text.substr(eq + 1));
        } catch (const config_error& e) {
            throw config_error(source + " line " + std::to_string(line) + ": " + e.what());
        }
    }
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file '" + path + "'");
    return parse_config(in, path);
}

// Writes every key in table order; parse(echo(cfg)) == cfg field-for-field.
inline std::string echo_config(const RunConfig& cfg) {
    std::ostringstream out;
    for (const auto& field : detail::field_table())
        out << field.key << " = " << field.get(cfg) << '\n';
    return out.str();
}

}  // namespace usv::io
