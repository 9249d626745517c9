#include "cli/table.hpp"

#include <array>
#include <charconv>
#include <cstdlib>
#include <limits>
#include <stdexcept>

namespace hierenv::cli {

std::string format_double(double value) {
    std::array<char, 32> buf;
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc{}) throw std::runtime_error("format_double failed");
    return std::string(buf.data(), ptr);
}

std::string serialize_csv(const Table& table) {
    std::string out;
    for (const std::string& comment : table.comments) {
        out += "# ";
        out += comment;
        out += '\n';
    }
    auto append_row = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    append_row(table.header);
    for (const auto& row : table.rows) append_row(row);
    return out;
}

Table parse_csv(std::string_view text) {
    Table table;
    std::size_t pos = 0;
    bool header_seen = false;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        if (line.empty()) continue;
        if (line.front() == '#') {
            std::string_view body = line.substr(1);
            if (!body.empty() && body.front() == ' ') body.remove_prefix(1);
            table.comments.emplace_back(body);
            continue;
        }
        std::vector<std::string> cells;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = line.find(',', start);
            if (comma == std::string_view::npos) {
                cells.emplace_back(line.substr(start));
                break;
            }
            cells.emplace_back(line.substr(start, comma - start));
            start = comma + 1;
        }
        if (!header_seen) {
            table.header = std::move(cells);
            header_seen = true;
        } else {
            if (cells.size() != table.header.size()) {
                throw std::runtime_error("parse_csv: ragged row");
            }
            table.rows.push_back(std::move(cells));
        }
    }
    if (!header_seen) throw std::runtime_error("parse_csv: missing header row");
    return table;
}

double cell_as_double(const std::string& cell) {
    if (cell.empty()) return std::numeric_limits<double>::quiet_NaN();
    double value{};
    const auto [ptr, ec] =
        std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
        throw std::runtime_error("parse_csv: bad numeric cell '" + cell + "'");
    }
    return value;
}

}  // namespace hierenv::cli
