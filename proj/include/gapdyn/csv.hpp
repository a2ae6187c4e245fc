#pragma once

// Deterministic CSV output: comma separators, '.' decimal point, scientific
// notation with 17 significant digits, LF line endings, header always present.

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "gapdyn/errors.hpp"

namespace gapdyn {

struct CsvTrace {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

inline std::string format_csv_value(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.16e", x);
    return buf;
}

inline void write_csv(const std::string& path, const CsvTrace& trace) {
    std::ofstream out(path, std::ios::binary);  // binary keeps LF on every platform
    if (!out) throw ConfigError("write_csv: cannot open " + path);
    for (std::size_t k = 0; k < trace.header.size(); ++k) {
        if (k) out << ',';
        out << trace.header[k];
    }
    out << '\n';
    for (const auto& row : trace.rows) {
        if (row.size() != trace.header.size())
            throw ConfigError("write_csv: row width does not match header");
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (k) out << ',';
            out << format_csv_value(row[k]);
        }
        out << '\n';
    }
    if (!out) throw ConfigError("write_csv: write failed for " + path);
}

}  // namespace gapdyn
