#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "dnlfront/error.hpp"

namespace dnlfront::csv {

/// 17 significant digits, so that doubles round-trip exactly.
inline std::string format(double v) {
    if (v == 0.0) v = 0.0;  // no negative zero
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Writes one header row and equally long columns. Throws Error("io") on failure.
inline void write(const std::filesystem::path& path, const std::vector<std::string>& header,
                  const std::vector<std::vector<double>>& columns) {
    if (header.size() != columns.size()) throw Error("io", "csv header and column count differ for " + path.string());
    std::size_t rows = columns.empty() ? 0 : columns.front().size();
    for (const auto& c : columns)
        if (c.size() != rows) throw Error("io", "csv columns differ in length for " + path.string());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("io", "cannot open " + path.string() + " for writing");
    for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
    out << '\n';
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < columns.size(); ++j) out << (j ? "," : "") << format(columns[j][i]);
        out << '\n';
    }
    if (!out) throw Error("io", "write failed for " + path.string());
}

/// Rows of mixed text cells, written verbatim.
inline void write_rows(const std::filesystem::path& path, const std::vector<std::string>& header,
                       const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("io", "cannot open " + path.string() + " for writing");
    for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
    out << '\n';
    for (const auto& r : rows) {
        for (std::size_t j = 0; j < r.size(); ++j) out << (j ? "," : "") << r[j];
        out << '\n';
    }
    if (!out) throw Error("io", "write failed for " + path.string());
}

}  // namespace dnlfront::csv
