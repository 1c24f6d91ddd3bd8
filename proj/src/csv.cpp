#include "vortexlab/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <type_traits>

#include "vortexlab/errors.hpp"

namespace vortexlab {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) text_ += ',';
        text_ += header[i];
    }
    text_ += '\n';
}

void CsvWriter::row(const std::vector<CsvCell>& cells) {
    if (cells.size() != columns_) throw InvalidArgument("csv row has the wrong number of cells");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) text_ += ',';
        std::visit(
            [this](const auto& v) {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, double>) {
                    text_ += format_number(v);
                } else if constexpr (std::is_same_v<T, long long>) {
                    text_ += std::to_string(v);
                } else {
                    if (v.find_first_of(",\n\"") != std::string::npos) {
                        throw InvalidArgument("csv text cell contains a delimiter");
                    }
                    text_ += v;
                }
            },
            cells[i]);
    }
    text_ += '\n';
    ++rows_;
}

std::optional<std::size_t> CsvTable::find(std::string_view column) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == column) return i;
    }
    return std::nullopt;
}

std::size_t CsvTable::column(std::string_view name) const {
    const auto c = find(name);
    if (!c) throw InvalidArgument("csv: missing column '" + std::string(name) + "'");
    return *c;
}

double CsvTable::number(std::size_t row, std::size_t col) const {
    const std::string& s = rows.at(row).at(col);
    double v = 0.0;
    const char* b = s.data();
    if (!s.empty() && s.front() == '+') ++b;
    const auto [ptr, ec] = std::from_chars(b, s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
        throw InvalidArgument("csv line " + std::to_string(lines.at(row)) + ": '" + s +
                              "' is not a finite number");
    }
    return v;
}

CsvTable parse_csv(std::string_view text, std::string_view origin) {
    CsvTable t;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        std::vector<std::string> cells;
        std::size_t pos = 0;
        for (;;) {
            const auto comma = line.find(',', pos);
            std::string cell = line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
            const auto b = cell.find_first_not_of(" \t");
            const auto e = cell.find_last_not_of(" \t");
            cells.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (!have_header) {
            t.header = std::move(cells);
            have_header = true;
            continue;
        }
        if (cells.size() != t.header.size()) {
            throw InvalidArgument(std::string(origin) + ":" + std::to_string(lineno) +
                                  ": expected " + std::to_string(t.header.size()) + " cells");
        }
        t.rows.push_back(std::move(cells));
        t.lines.push_back(lineno);
    }
    if (!have_header) throw InvalidArgument(std::string(origin) + ": no header row");
    return t;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw InvalidArgument("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_csv(ss.str(), path);
}

}  // namespace vortexlab
