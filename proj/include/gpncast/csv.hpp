#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "gpncast/common.hpp"

namespace gpncast {

/// In-memory CSV file: one header row plus data rows, all cells as strings.
/// Dialect: comma separated, double quotes with "" escaping, no embedded
/// newlines inside cells, first row is always the header.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Index of a column by case-insensitive name, or nullopt.
    std::optional<std::size_t> find_column(std::string_view name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (iequals(header[i], name)) return i;
        return std::nullopt;
    }

    std::size_t require_column(std::string_view name) const {
        if (auto i = find_column(name)) return *i;
        throw ValidationError("missing column '" + std::string(name) + "'");
    }
};

namespace csv_detail {

inline std::vector<std::string> split_line(const std::string& line, std::size_t lineno) {
    std::vector<std::string> cells;
    std::string cur;
    bool in_quotes = false;
    std::size_t i = 0;
    const std::size_t n = line.size();
    while (i < n) {
        const char c = line[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < n && line[i + 1] == '"') {
                    cur.push_back('"');
                    i += 2;
                } else {
                    in_quotes = false;
                    ++i;
                }
            } else {
                cur.push_back(c);
                ++i;
            }
        } else {
            if (c == '"' && cur.empty()) {
                in_quotes = true;
                ++i;
            } else if (c == ',') {
                cells.push_back(cur);
                cur.clear();
                ++i;
            } else {
                cur.push_back(c);
                ++i;
            }
        }
    }
    if (in_quotes)
        throw ValidationError("unterminated quote at line " + std::to_string(lineno));
    cells.push_back(cur);
    return cells;
}

inline bool needs_quoting(std::string_view cell) {
    return cell.find_first_of(",\"\n\r") != std::string_view::npos;
}

inline void write_cell(std::ostream& os, std::string_view cell) {
    if (!needs_quoting(cell)) {
        os << cell;
        return;
    }
    os << '"';
    for (char c : cell) {
        if (c == '"') os << "\"\"";
        else os << c;
    }
    os << '"';
}

}  // namespace csv_detail

inline CsvTable read_csv_stream(std::istream& is, std::string_view what = "csv") {
    CsvTable table;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (lineno == 1 && line.empty())
            throw ValidationError(std::string(what) + ": empty header row");
        if (line.empty()) continue;  // tolerate trailing blank lines
        auto cells = csv_detail::split_line(line, lineno);
        if (lineno == 1) {
            table.header = std::move(cells);
        } else {
            if (cells.size() != table.header.size())
                throw ValidationError(std::string(what) + ": line " +
                                      std::to_string(lineno) + " has " +
                                      std::to_string(cells.size()) +
                                      " cells, expected " +
                                      std::to_string(table.header.size()));
            table.rows.push_back(std::move(cells));
        }
    }
    if (table.header.empty())
        throw ValidationError(std::string(what) + ": no header row");
    return table;
}

inline CsvTable read_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open '" + path + "'");
    return read_csv_stream(f, path);
}

inline void write_csv_stream(std::ostream& os, const CsvTable& table) {
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        if (i) os << ',';
        csv_detail::write_cell(os, table.header[i]);
    }
    os << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) os << ',';
            csv_detail::write_cell(os, row[i]);
        }
        os << '\n';
    }
}

inline void write_csv(const std::string& path, const CsvTable& table) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot write '" + path + "'");
    write_csv_stream(f, table);
    if (!f) throw IoError("write failed for '" + path + "'");
}

}  // namespace gpncast
