#include "gcml/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <sstream>

#include "gcml/errors.hpp"

namespace gcml {

int CsvTable::column(const std::string& name) const {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return -1;
    return static_cast<int>(it - header.begin());
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

} // namespace

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());

    CsvTable table;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = split_line(line);
        if (first) {
            table.header = std::move(cells);
            first = false;
            continue;
        }
        if (cells.size() != table.header.size())
            throw DataError(path.string() + ": row with " + std::to_string(cells.size()) +
                            " cells, expected " + std::to_string(table.header.size()));
        table.rows.push_back(std::move(cells));
    }
    if (first) throw DataError(path.string() + ": empty file");
    return table;
}

std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc{}) throw NumericError("to_chars failed");
    return std::string(buf, ptr);
}

double parse_double(const std::string& cell) {
    const char* begin = cell.c_str();
    char* end = nullptr;
    errno = 0;
    double value = std::strtod(begin, &end);
    if (end == begin || errno == ERANGE)
        throw DataError("not a number: '" + cell + "'");
    while (*end == ' ' || *end == '\t') ++end;
    if (*end != '\0') throw DataError("not a number: '" + cell + "'");
    return value;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : out_(path), n_columns_(header.size()) {
    if (!out_) throw DataError("cannot open " + path.string() + " for writing");
    write_row(header);
}

void CsvWriter::write_row(const std::vector<std::string>& cells) {
    if (cells.size() != n_columns_)
        throw DataError("csv row has " + std::to_string(cells.size()) + " cells, expected " +
                        std::to_string(n_columns_));
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out_ << ',';
        out_ << cells[i];
    }
    out_ << '\n';
}

} // namespace gcml
