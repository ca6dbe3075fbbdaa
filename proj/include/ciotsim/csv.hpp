#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include "ciotsim/metrics.hpp"

namespace ciot {

// Locale-independent shortest round-trip formatting.
inline std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::string format_double_fixed(double v, int precision) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, precision);
    return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw std::invalid_argument("not a number: '" + s + "'");
    return v;
}

inline long parse_long(const std::string& s) {
    long v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw std::invalid_argument("not an integer: '" + s + "'");
    return v;
}

inline constexpr const char* kTrainingHeader = "episode,asr_ema,delay_ema,su_hit_rate,pu_hit_rate";
inline constexpr const char* kSweepHeader =
    "axis_value,strategy,seed,final_asr,final_delay,final_su_hit_rate,final_pu_hit_rate";

inline void write_training_csv(const std::string& path, const std::vector<MetricsRecord>& records) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << kTrainingHeader << '\n';
    for (const MetricsRecord& r : records) {
        f << r.episode << ',' << format_double(r.asr_ema) << ',' << format_double(r.delay_ema)
          << ',' << format_double(r.su_hit_rate) << ',' << format_double(r.pu_hit_rate) << '\n';
    }
    if (!f) throw std::runtime_error("write failed: " + path);
}

struct SweepRow {
    double axis_value = 0.0;
    std::string strategy;
    std::uint64_t seed = 0;
    double final_asr = 0.0;
    double final_delay = 0.0;
    double final_su_hit_rate = 0.0;
    double final_pu_hit_rate = 0.0;
};

inline void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << kSweepHeader << '\n';
    for (const SweepRow& r : rows) {
        f << format_double(r.axis_value) << ',' << r.strategy << ',' << r.seed << ','
          << format_double(r.final_asr) << ',' << format_double(r.final_delay) << ','
          << format_double(r.final_su_hit_rate) << ',' << format_double(r.final_pu_hit_rate)
          << '\n';
    }
    if (!f) throw std::runtime_error("write failed: " + path);
}

// Minimal CSV table; our files never quote fields.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const {
        for (size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<int>(i);
        return -1;
    }
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

inline CsvTable read_csv(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for reading: " + path);
    CsvTable t;
    std::string line;
    if (!std::getline(f, line)) throw std::runtime_error("empty csv: " + path);
    t.header = split_csv_line(line);
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        auto row = split_csv_line(line);
        if (row.size() != t.header.size())
            throw std::runtime_error("ragged csv row in " + path);
        t.rows.push_back(std::move(row));
    }
    return t;
}

}  // namespace ciot
