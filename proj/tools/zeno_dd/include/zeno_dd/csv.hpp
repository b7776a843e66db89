#pragma once

#include <string>
#include <vector>

namespace zeno_dd {

/// Numeric table. NaN cells are written empty.
struct CsvSeries {
    std::string filename;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    /// Throws std::invalid_argument when the row width differs from the header.
    void add_row(std::vector<double> row);
    double at(std::size_t row, const std::string& column) const;
    std::vector<double> column(const std::string& name) const;
};

/// printf "%.12g"; negative zero prints as 0.
std::string format_cell(double x);

/// Header line then one line per row, LF endings.
std::string render_csv(const CsvSeries& series);

/// Writes dir/filename, creating dir. Throws IoError.
void write_text(const std::string& dir, const std::string& filename, const std::string& text);

}  // namespace zeno_dd
