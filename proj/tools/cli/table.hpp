// table.hpp — CSV tables with deterministic shortest-round-trip formatting

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace hierenv::cli {

struct Table {
    std::vector<std::string> comments;  // emitted as leading "# ..." lines
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    bool operator==(const Table&) const = default;
};

// Shortest representation that parses back to the same bits.
std::string format_double(double value);

// UTF-8, comma separated, LF endings, header row first after comments.
std::string serialize_csv(const Table& table);

// Inverse of serialize_csv for our own files; throws std::runtime_error on
// structural problems (ragged rows, missing header).
Table parse_csv(std::string_view text);

double cell_as_double(const std::string& cell);  // NaN for empty cells

}  // namespace hierenv::cli
