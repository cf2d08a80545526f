#pragma once

#include <charconv>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hubshift::csv {

// Plain comma splitting; none of our formats use quoting.
std::vector<std::string_view> split_fields(std::string_view line);

std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_int(std::string_view s);

// Shortest round-trip representation (std::to_chars).
std::string fmt_double(double v);

struct Writer {
    explicit Writer(const std::string& path);
    void row(const std::vector<std::string>& fields);
    void raw_line(const std::string& line);
    void close();

    std::ofstream out;
    std::string path;
};

// Reads all lines (handles trailing newline / CRLF).
std::vector<std::string> read_lines(const std::string& path);

}  // namespace hubshift::csv
