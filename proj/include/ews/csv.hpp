#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace ews {

using CsvRow = std::vector<std::string>;

// A delimited table: optional "#key=value" metadata lines, one header row,
// then data rows. Quoted fields follow RFC 4180.
struct Table {
    std::map<std::string, std::string> meta;
    CsvRow header;
    std::vector<CsvRow> rows;

    // Column index by header name; throws Error when absent.
    std::size_t column(std::string_view name) const;
    std::optional<std::size_t> find_column(std::string_view name) const;
};

std::vector<CsvRow> parse_csv(std::string_view text);
Table parse_table(std::string_view text);
Table read_table(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

// Shortest round-trip decimal representation; NaN becomes the empty string.
std::string format_double(double v);
double parse_double(std::string_view s);
long long parse_int(std::string_view s);

class CsvWriter {
public:
    explicit CsvWriter(std::ostream& out) : out_(out) {}

    void meta(std::string_view key, std::string_view value);
    void row(const CsvRow& fields);

private:
    std::ostream& out_;
};

}  // namespace ews
