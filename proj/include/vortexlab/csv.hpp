#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace vortexlab {

/// %.12g, with "nan" / "inf" / "-inf" for non-finite values.
std::string format_number(double v);

using CsvCell = std::variant<double, long long, std::string>;

/// Comma-delimited, '.' decimal point, header row, LF line endings.
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header);

    void row(const std::vector<CsvCell>& cells);
    std::string str() const { return text_; }
    std::size_t rows() const { return rows_; }

private:
    std::size_t columns_;
    std::size_t rows_ = 0;
    std::string text_;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<int> lines;  // source line of every row

    std::optional<std::size_t> find(std::string_view column) const;
    /// Throws InvalidArgument when the column is absent.
    std::size_t column(std::string_view name) const;
    /// Throws InvalidArgument when the cell is not a finite number.
    double number(std::size_t row, std::size_t col) const;
};

/// Blank lines and lines starting with '#' are skipped; a trailing CR is
/// dropped. Ragged rows are an error.
CsvTable parse_csv(std::string_view text, std::string_view origin = "<csv>");
CsvTable read_csv(const std::string& path);

}  // namespace vortexlab
