#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "usv/csv.hpp"
#include "usv/forecast.hpp"

namespace usv::io {

class model_io_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::string_view kModelMagic = "usvmotion-model";
inline constexpr int kModelVersion = 1;

// A trained hybrid model as persisted on disk: everything except the
// decomposition snapshot, which is recomputed from the series on load (the
// noise streams are seeded from the stored master seed, so the rebuild is
// bit-identical to the training run).
struct SavedModel {
    forecast::Method method = forecast::Method::ceemdan_pso_svm;
    forecast::WindowSpec window;
    int train_count = 0;
    std::uint64_t master_seed = 0;
    double tube = 0.01;
    decomp::SiftConfig sift;
    double ceemdan_noise_scale = 0.2;
    int ceemdan_ensemble_size = 100;
    std::vector<forecast::ComponentModel> components;

    // Reattaches the model to its series by re-running the deterministic
    // decomposition, yielding a model ready for forecasting.
    forecast::HybridModel rebuild(const TimeSeries& series) const {
        forecast::TrainSettings ts;
        ts.window = window;
        ts.train_count = train_count;
        ts.sift = sift;
        ts.ceemdan.noise_scale = ceemdan_noise_scale;
        ts.ceemdan.ensemble_size = ceemdan_ensemble_size;
        ts.master_seed = master_seed;

        forecast::HybridModel model;
        model.method = method;
        model.window = window;
        model.train_count = train_count;
        model.master_seed = master_seed;
        model.decomposition = forecast::decompose_for_method(method, series, ts);
        model.components = components;
        if (model.components.size() != model.decomposition.modes.size() + 1)
            throw model_io_error(
                "model/series dimension mismatch: the stored model has " +
                std::to_string(components.size()) +
                " component models but decomposing this series yields " +
                std::to_string(model.decomposition.modes.size() + 1) +
                " components; was the model trained on a different series?");
        return model;
    }
};

inline SavedModel to_saved(const forecast::HybridModel& model,
                           const forecast::TrainSettings& ts) {
    SavedModel s;
    s.method = model.method;
    s.window = model.window;
    s.train_count = model.train_count;
    s.master_seed = model.master_seed;
    s.tube = ts.tube;
    s.sift = ts.sift;
    s.ceemdan_noise_scale = ts.ceemdan.noise_scale;
    s.ceemdan_ensemble_size = ts.ceemdan.ensemble_size;
    s.components = model.components;
    return s;
}

inline void write_model(std::ostream& out, const SavedModel& model) {
    out << kModelMagic << " v" << kModelVersion << '\n';
    out << "method " << forecast::method_name(model.method) << '\n';
    out << "window " << model.window.embedding << ' ' << model.window.horizon << '\n';
    out << "train_count " << model.train_count << '\n';
    out << "master_seed " << model.master_seed << '\n';
    out << "tube " << format_double(model.tube) << '\n';
    out << "sift " << format_double(model.sift.sd_threshold) << ' '
        << model.sift.max_sift_iterations << ' ' << model.sift.boundary_extrema << '\n';
    out << "ceemdan " << format_double(model.ceemdan_noise_scale) << ' '
        << model.ceemdan_ensemble_size << '\n';
    out << "components " << model.components.size() << '\n';
    for (std::size_t c = 0; c < model.components.size(); ++c) {
        const auto& cm = model.components[c];
        out << "component " << c << '\n';
        out << "norm " << format_double(cm.norm.min) << ' ' << format_double(cm.norm.max)
            << '\n';
        out << "bypass " << int(cm.constant_bypass) << ' '
            << format_double(cm.constant_value) << '\n';
        out << "tuned " << int(cm.pso_tuned);
        for (double p : cm.tuned_position) out << ' ' << format_double(p);
        out << '\n';
        if (cm.constant_bypass) continue;
        const auto& m = cm.model;
        out << "hyperparams " << format_double(m.hyperparams.penalty) << ' '
            << format_double(m.hyperparams.kernel_width) << ' '
            << format_double(m.hyperparams.tube) << '\n';
        out << "bias " << format_double(m.bias) << '\n';
        out << "fit " << int(m.converged) << ' ' << m.pair_updates << ' '
            << format_double(m.final_violation) << '\n';
        const std::size_t dim = m.support_inputs.empty() ? 0 : m.support_inputs[0].size();
        out << "supports " << m.support_inputs.size() << ' ' << dim << '\n';
        for (std::size_t r = 0; r < m.support_inputs.size(); ++r) {
            out << m.support_indexes[r] << ' ' << format_double(m.dual_coeffs[r]);
            for (double x : m.support_inputs[r]) out << ' ' << format_double(x);
            out << '\n';
        }
    }
    out << "end\n";
}

inline void save_model(const std::string& path, const SavedModel& model) {
    std::ofstream out(path);
    if (!out) throw model_io_error("cannot open '" + path + "' for writing");
    write_model(out, model);
    if (!out) throw model_io_error("failed while writing '" + path + "'");
}

namespace detail {

class LineReader {
public:
    LineReader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

    // Reads the next line as a token stream.
    std::istringstream next(const char* what) {
        std::string row;
        if (!std::getline(in_, row))
            throw model_io_error(source_ + ": unexpected end of file, expected " +
                                 std::string(what) + " (line " + std::to_string(line_ + 1) +
                                 ")");
        ++line_;
        return std::istringstream(row);
    }

    // Reads the next line and checks its first token.
    std::istringstream expect(const std::string& tag) {
        std::istringstream stream = next(tag.c_str());
        std::string head;
        stream >> head;
        if (head != tag)
            throw model_io_error(source_ + " line " + std::to_string(line_) +
                                 ": expected '" + tag + "', got '" + head + "'");
        return stream;
    }

    template <typename T>
    T value(std::istringstream& stream, const char* what) {
        T out{};
        if (!(stream >> out))
            throw model_io_error(source_ + " line " + std::to_string(line_) +
                                 ": cannot parse " + what);
        return out;
    }

    int line() const { return line_; }
    const std::string& source() const { return source_; }

private:
    std::istream& in_;
    std::string source_;
    int line_ = 0;
};

}  // namespace detail

inline SavedModel read_model(std::istream& in, const std::string& source = "<model>") {
    detail::LineReader reader(in, source);

    auto header = reader.expect(std::string(kModelMagic));
    const auto version = reader.value<std::string>(header, "format version");
    if (version != "v" + std::to_string(kModelVersion))
        throw model_io_error(source + ": unsupported model format version '" + version +
                             "' (this build reads v" + std::to_string(kModelVersion) + ")");

    SavedModel model;
    auto method = reader.expect("method");
    model.method = forecast::parse_method(reader.value<std::string>(method, "method name"));

    auto window = reader.expect("window");
    model.window.embedding = reader.value<int>(window, "window embedding");
    model.window.horizon = reader.value<int>(window, "window horizon");

    auto train = reader.expect("train_count");
    model.train_count = reader.value<int>(train, "train count");

    auto seed = reader.expect("master_seed");
    model.master_seed = reader.value<std::uint64_t>(seed, "master seed");

    auto tube = reader.expect("tube");
    model.tube = reader.value<double>(tube, "tube width");

    auto sift = reader.expect("sift");
    model.sift.sd_threshold = reader.value<double>(sift, "sift SD threshold");
    model.sift.max_sift_iterations = reader.value<int>(sift, "sift iteration cap");
    model.sift.boundary_extrema = reader.value<int>(sift, "sift boundary extrema");

    auto ceemdan = reader.expect("ceemdan");
    model.ceemdan_noise_scale = reader.value<double>(ceemdan, "noise scale");
    model.ceemdan_ensemble_size = reader.value<int>(ceemdan, "ensemble size");

    auto count_line = reader.expect("components");
    const int count = reader.value<int>(count_line, "component count");
    if (count < 1)
        throw model_io_error(source + ": component count must be positive, got " +
                             std::to_string(count));

    for (int c = 0; c < count; ++c) {
        auto comp = reader.expect("component");
        const int index = reader.value<int>(comp, "component index");
        if (index != c)
            throw model_io_error(source + " line " + std::to_string(reader.line()) +
                                 ": component index " + std::to_string(index) +
                                 " out of order (expected " + std::to_string(c) + ")");
        forecast::ComponentModel cm;

        auto norm = reader.expect("norm");
        cm.norm.min = reader.value<double>(norm, "normalization min");
        cm.norm.max = reader.value<double>(norm, "normalization max");

        auto bypass = reader.expect("bypass");
        cm.constant_bypass = reader.value<int>(bypass, "bypass flag") != 0;
        cm.constant_value = reader.value<double>(bypass, "bypass value");

        auto tuned = reader.expect("tuned");
        cm.pso_tuned = reader.value<int>(tuned, "tuned flag") != 0;
        double p = 0.0;
        while (tuned >> p) cm.tuned_position.push_back(p);

        if (!cm.constant_bypass) {
            auto hp = reader.expect("hyperparams");
            cm.model.hyperparams.penalty = reader.value<double>(hp, "penalty");
            cm.model.hyperparams.kernel_width = reader.value<double>(hp, "kernel width");
            cm.model.hyperparams.tube = reader.value<double>(hp, "tube");

            auto bias = reader.expect("bias");
            cm.model.bias = reader.value<double>(bias, "bias");

            auto fit = reader.expect("fit");
            cm.model.converged = reader.value<int>(fit, "convergence flag") != 0;
            cm.model.pair_updates = reader.value<int>(fit, "pair update count");
            cm.model.final_violation = reader.value<double>(fit, "final violation");

            auto supports = reader.expect("supports");
            const int rows = reader.value<int>(supports, "support row count");
            const int dim = reader.value<int>(supports, "support dimension");
            if (rows < 0 || dim < 0)
                throw model_io_error(source + " line " + std::to_string(reader.line()) +
                                     ": negative support dimensions");
            if (rows > 0 && dim != model.window.embedding)
                throw model_io_error(
                    source + ": support row dimension " + std::to_string(dim) +
                    " does not match the window embedding " +
                    std::to_string(model.window.embedding));
            cm.model.support_indexes.reserve(rows);
            cm.model.dual_coeffs.reserve(rows);
            cm.model.support_inputs.reserve(rows);
            for (int r = 0; r < rows; ++r) {
                auto row = reader.next("support row");
                cm.model.support_indexes.push_back(
                    reader.value<int>(row, "support index"));
                cm.model.dual_coeffs.push_back(
                    reader.value<double>(row, "dual coefficient"));
                std::vector<double> x(dim);
                for (int k = 0; k < dim; ++k)
                    x[k] = reader.value<double>(row, "support coordinate");
                cm.model.support_inputs.push_back(std::move(x));
            }
        }
        model.components.push_back(std::move(cm));
    }
    reader.expect("end");
    return model;
}

inline SavedModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw model_io_error("cannot open model file '" + path + "'");
    return read_model(in, path);
}

}  // namespace usv::io
