#pragma once

// Minimal CSV support for the experiment artifacts: numeric cells are written
// with %.17g so a rerun reproduces files byte-for-byte.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace nbspec {

inline std::string format_cell(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        throw std::invalid_argument("csv: no column named '" + name + "'");
    }

    bool has_column(const std::string& name) const {
        for (const auto& h : header)
            if (h == name) return true;
        return false;
    }

    double number(std::size_t row, std::size_t col) const {
        const std::string& cell = rows.at(row).at(col);
        if (cell.empty()) throw std::invalid_argument("csv: empty cell where number expected");
        return std::stod(cell);
    }

    std::vector<double> numbers(const std::string& name) const {
        const std::size_t c = column(name);
        std::vector<double> out;
        out.reserve(rows.size());
        for (std::size_t r = 0; r < rows.size(); ++r) out.push_back(number(r, c));
        return out;
    }
};

inline std::string to_csv(const CsvTable& t) {
    std::ostringstream os;
    for (std::size_t i = 0; i < t.header.size(); ++i)
        os << t.header[i] << (i + 1 < t.header.size() ? "," : "\n");
    for (const auto& row : t.rows) {
        if (row.size() != t.header.size())
            throw std::invalid_argument("csv: row width does not match header");
        for (std::size_t i = 0; i < row.size(); ++i)
            os << row[i] << (i + 1 < row.size() ? "," : "\n");
    }
    return os.str();
}

inline CsvTable parse_csv(std::istream& in) {
    CsvTable t;
    std::string line;
    auto split = [](const std::string& s) {
        std::vector<std::string> cells;
        std::string cur;
        for (char c : s) {
            if (c == ',') {
                cells.push_back(cur);
                cur.clear();
            } else if (c != '\r') {
                cur += c;
            }
        }
        cells.push_back(cur);
        return cells;
    };
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (first) {
            t.header = split(line);
            first = false;
        } else {
            t.rows.push_back(split(line));
        }
    }
    if (first) throw std::invalid_argument("csv: empty input");
    return t;
}

inline CsvTable load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return parse_csv(in);
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

}  // namespace nbspec
