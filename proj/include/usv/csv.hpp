#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "usv/metrics.hpp"
#include "usv/time_series.hpp"

namespace usv::io {

// Round-trippable decimal rendering: 17 significant digits reproduce any
// double exactly on re-parse.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class csv_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline double parse_field(std::string_view field, const std::string& path, int line,
                          const char* what) {
    double out = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    while (first != last && (*first == ' ' || *first == '\t')) ++first;
    while (last != first && (*(last - 1) == ' ' || *(last - 1) == '\t' || *(last - 1) == '\r'))
        --last;
    const auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last)
        throw csv_error(path + " line " + std::to_string(line) + ": cannot parse " + what +
                        " from '" + std::string(field) + "'");
    return out;
}

inline std::vector<std::string_view> split_fields(std::string_view row) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = row.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(row.substr(start));
            return fields;
        }
        fields.push_back(row.substr(start, comma - start));
        start = comma + 1;
    }
}

inline void expect_fields(const std::vector<std::string_view>& fields, std::size_t count,
                          const std::string& path, int line) {
    if (fields.size() != count)
        throw csv_error(path + " line " + std::to_string(line) + ": expected " +
                        std::to_string(count) + " comma-separated fields, got " +
                        std::to_string(fields.size()));
}

inline std::string strip_eol(std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == '\n')) s.pop_back();
    return s;
}

inline std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw csv_error("cannot open '" + path + "' for writing");
    return out;
}

inline std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw csv_error("cannot open '" + path + "' for reading");
    return in;
}

}  // namespace detail

// --- series files: header `t,value`, one sample per row ---

inline void write_series(std::ostream& out, const TimeSeries& series) {
    series.validate();
    out << "t,value\n";
    for (std::size_t j = 0; j < series.size(); ++j)
        out << format_double(series.time_at(j)) << ',' << format_double(series.values[j])
            << '\n';
}

inline void write_series(const std::string& path, const TimeSeries& series) {
    auto out = detail::open_out(path);
    write_series(out, series);
    if (!out) throw csv_error("failed while writing '" + path + "'");
}

inline TimeSeries read_series(const std::string& path) {
    auto in = detail::open_in(path);
    std::string row;
    if (!std::getline(in, row))
        throw csv_error(path + " line 1: empty file, expected header 't,value'");
    if (detail::strip_eol(row) != "t,value")
        throw csv_error(path + " line 1: expected header 't,value', got '" +
                        detail::strip_eol(row) + "'");

    TimeSeries series;
    std::vector<double> times;
    int line = 1;
    while (std::getline(in, row)) {
        ++line;
        const std::string stripped = detail::strip_eol(row);
        if (stripped.empty()) continue;
        const auto fields = detail::split_fields(stripped);
        detail::expect_fields(fields, 2, path, line);
        times.push_back(detail::parse_field(fields[0], path, line, "time"));
        series.values.push_back(detail::parse_field(fields[1], path, line, "value"));
    }
    if (series.values.empty()) throw csv_error(path + ": no data rows");

    if (times.size() >= 2) {
        const double dt = times[1] - times[0];
        if (!(dt > 0.0))
            throw csv_error(path + " line 3: time column must be strictly increasing");
        for (std::size_t j = 2; j < times.size(); ++j) {
            const double step = times[j] - times[j - 1];
            if (std::abs(step - dt) > 1e-6 * std::max(1.0, std::abs(dt)))
                throw csv_error(path + " line " + std::to_string(int(j) + 2) +
                                ": non-uniform time step (" + format_double(step) +
                                " vs " + format_double(dt) + ")");
        }
        series.dt = dt;
    }
    return series;
}

// --- prediction files: header `t,actual,predicted` ---

struct PredictionTable {
    std::vector<double> t;
    TimeSeries actual;
    TimeSeries predicted;
};

inline void write_predictions(std::ostream& out, double t0, const TimeSeries& actual,
                              const TimeSeries& predicted) {
    actual.validate();
    predicted.validate();
    if (actual.size() != predicted.size())
        throw csv_error("actual and predicted series differ in length: " +
                        std::to_string(actual.size()) + " vs " +
                        std::to_string(predicted.size()));
    out << "t,actual,predicted\n";
    for (std::size_t j = 0; j < actual.size(); ++j)
        out << format_double(t0 + double(j) * actual.dt) << ','
            << format_double(actual.values[j]) << ',' << format_double(predicted.values[j])
            << '\n';
}

inline void write_predictions(const std::string& path, double t0, const TimeSeries& actual,
                              const TimeSeries& predicted) {
    auto out = detail::open_out(path);
    write_predictions(out, t0, actual, predicted);
    if (!out) throw csv_error("failed while writing '" + path + "'");
}

inline PredictionTable read_predictions(const std::string& path) {
    auto in = detail::open_in(path);
    std::string row;
    if (!std::getline(in, row))
        throw csv_error(path + " line 1: empty file, expected header 't,actual,predicted'");
    if (detail::strip_eol(row) != "t,actual,predicted")
        throw csv_error(path + " line 1: expected header 't,actual,predicted', got '" +
                        detail::strip_eol(row) + "'");

    PredictionTable table;
    int line = 1;
    while (std::getline(in, row)) {
        ++line;
        const std::string stripped = detail::strip_eol(row);
        if (stripped.empty()) continue;
        const auto fields = detail::split_fields(stripped);
        detail::expect_fields(fields, 3, path, line);
        table.t.push_back(detail::parse_field(fields[0], path, line, "time"));
        table.actual.values.push_back(detail::parse_field(fields[1], path, line, "actual"));
        table.predicted.values.push_back(
            detail::parse_field(fields[2], path, line, "predicted"));
    }
    if (table.t.empty()) throw csv_error(path + ": no data rows");
    if (table.t.size() >= 2) {
        const double dt = table.t[1] - table.t[0];
        if (dt > 0.0) table.actual.dt = table.predicted.dt = dt;
    }
    return table;
}

// --- metrics tables: one row per labeled forecasting run ---

inline void write_metrics_table(
    std::ostream& out,
    const std::vector<std::pair<std::string, forecast::MetricsReport>>& rows) {
    out << "method,mae,mape,mse,rmse,smape\n";
    for (const auto& [name, r] : rows)
        out << name << ',' << format_double(r.mae) << ',' << format_double(r.mape) << ','
            << format_double(r.mse) << ',' << format_double(r.rmse) << ','
            << format_double(r.smape) << '\n';
}

inline void write_metrics_table(
    const std::string& path,
    const std::vector<std::pair<std::string, forecast::MetricsReport>>& rows) {
    auto out = detail::open_out(path);
    write_metrics_table(out, rows);
    if (!out) throw csv_error("failed while writing '" + path + "'");
}

}  // namespace usv::io
