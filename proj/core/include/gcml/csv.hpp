#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace gcml {

/// A parsed CSV file: header plus string cells, no quoting rules beyond
/// stripping an optional trailing '\r'. Every file this project emits is
/// plain comma-separated with no embedded commas.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const; // -1 when absent
};

CsvTable read_csv(const std::filesystem::path& path);

/// Shortest decimal string that round-trips to the same double. Used for all
/// numeric output so files are byte-identical across runs and worker counts.
std::string format_double(double value);

double parse_double(const std::string& cell);

/// Row-at-a-time CSV writer.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

    void write_row(const std::vector<std::string>& cells);

private:
    std::ofstream out_;
    std::size_t n_columns_;
};

} // namespace gcml
