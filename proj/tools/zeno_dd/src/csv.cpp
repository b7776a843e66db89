#include "zeno_dd/csv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "zeno_dd/config.hpp"

namespace zeno_dd {

void CsvSeries::add_row(std::vector<double> row) {
    if (row.size() != columns.size()) {
        throw std::invalid_argument(filename + ": row has " + std::to_string(row.size()) +
                                    " cells, header has " + std::to_string(columns.size()));
    }
    rows.push_back(std::move(row));
}

double CsvSeries::at(std::size_t row, const std::string& name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw std::out_of_range(filename + ": no column '" + name + "'");
    return rows.at(row).at(static_cast<std::size_t>(it - columns.begin()));
}

std::vector<double> CsvSeries::column(const std::string& name) const {
    std::vector<double> out;
    out.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) out.push_back(at(r, name));
    return out;
}

std::string format_cell(double x) {
    if (std::isnan(x)) return {};
    if (x == 0.0) return "0";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

std::string render_csv(const CsvSeries& series) {
    std::string out;
    for (std::size_t c = 0; c < series.columns.size(); ++c) {
        if (c) out += ',';
        out += series.columns[c];
    }
    out += '\n';
    for (const auto& row : series.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out += ',';
            out += format_cell(row[c]);
        }
        out += '\n';
    }
    return out;
}

void write_text(const std::string& dir, const std::string& filename, const std::string& text) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory '" + dir + "': " + ec.message());
    const fs::path path = fs::path(dir) / filename;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << text;
    out.flush();
    if (!out) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace zeno_dd
