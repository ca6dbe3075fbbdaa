#pragma once

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "ciotsim/csv.hpp"
#include "ciotsim/svg.hpp"

namespace ciot {

// Builds seed-averaged chart series from result CSVs. Two schemas are
// understood: per-episode training curves (x = episode, one file per
// strategy and seed, grouped by the strategy embedded in the file name) and
// sweep summaries (x = axis_value, grouped by the strategy column).
struct PlotInput {
    ChartSpec spec;
    std::vector<Series> series;
};

namespace plot_detail {

inline std::string file_stem(const std::string& path) {
    size_t slash = path.find_last_of("/\\");
    std::string name = slash == std::string::npos ? path : path.substr(slash + 1);
    size_t dot = name.find_last_of('.');
    return dot == std::string::npos ? name : name.substr(0, dot);
}

// "train_<strategy>_seed<k>" -> "<strategy>", otherwise the whole stem
inline std::string series_label_from_name(const std::string& path) {
    std::string stem = file_stem(path);
    if (stem.rfind("train_", 0) == 0) {
        size_t seed_pos = stem.rfind("_seed");
        if (seed_pos != std::string::npos && seed_pos > 6)
            return stem.substr(6, seed_pos - 6);
    }
    return stem;
}

struct Agg {
    double sum = 0.0, lo = 0.0, hi = 0.0;
    int n = 0;
    void add(double v) {
        if (n == 0) { lo = hi = v; }
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        sum += v;
        ++n;
    }
};

}  // namespace plot_detail

inline PlotInput build_plot(const std::vector<std::string>& csv_paths, const std::string& metric,
                            bool band, const std::string& title) {
    using namespace plot_detail;
    if (csv_paths.empty()) throw std::invalid_argument("plot: no input files");

    std::vector<CsvTable> tables;
    tables.reserve(csv_paths.size());
    for (const auto& p : csv_paths) tables.push_back(read_csv(p));
    for (size_t i = 1; i < tables.size(); ++i)
        if (tables[i].header != tables[0].header)
            throw std::invalid_argument("plot: csv schema mismatch between inputs");

    const CsvTable& first = tables[0];
    bool training = first.column("episode") == 0 && first.column("asr_ema") >= 0;
    bool summary = first.column("axis_value") == 0 && first.column("strategy") >= 0;
    if (!training && !summary)
        throw std::invalid_argument("plot: unrecognized csv schema");

    std::string want = metric;
    if (want.empty()) want = training ? "asr_ema" : "final_asr";
    int metric_col = first.column(want);
    if (metric_col < 0) throw std::invalid_argument("plot: no such metric column: " + want);

    // label -> x -> aggregate over seeds/files
    std::map<std::string, std::map<double, Agg>> groups;
    if (training) {
        int x_col = first.column("episode");
        for (size_t t = 0; t < tables.size(); ++t) {
            std::string label = series_label_from_name(csv_paths[t]);
            for (const auto& row : tables[t].rows)
                groups[label][parse_double(row[static_cast<size_t>(x_col)])].add(
                    parse_double(row[static_cast<size_t>(metric_col)]));
        }
    } else {
        int x_col = first.column("axis_value");
        int strat_col = first.column("strategy");
        for (const auto& table : tables)
            for (const auto& row : table.rows)
                groups[row[static_cast<size_t>(strat_col)]]
                      [parse_double(row[static_cast<size_t>(x_col)])].add(
                          parse_double(row[static_cast<size_t>(metric_col)]));
    }

    PlotInput out;
    out.spec.title = title;
    out.spec.xlabel = training ? "episode" : "axis value";
    out.spec.ylabel = want;
    for (const auto& [label, points] : groups) {
        Series s;
        s.label = label;
        for (const auto& [x, agg] : points) {
            s.x.push_back(x);
            s.y.push_back(agg.sum / agg.n);
            if (band) {
                s.ylo.push_back(agg.lo);
                s.yhi.push_back(agg.hi);
            }
        }
        out.series.push_back(std::move(s));
    }
    return out;
}

}  // namespace ciot
