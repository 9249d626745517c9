#include "cli/svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "hierenv/measures.hpp"

namespace hierenv::cli {

namespace {

constexpr double kSpeedupEdge = 1.0 - 1e-9;

std::string escape(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::size_t column_index(const Table& table, const std::string& name) {
    const auto it = std::find(table.header.begin(), table.header.end(), name);
    if (it == table.header.end()) {
        throw std::runtime_error("svg: table lacks column '" + name + "'");
    }
    return static_cast<std::size_t>(it - table.header.begin());
}

std::string num(double v) { return format_double(v); }

// Three-stop colormap, dark violet -> teal -> yellow.
std::string color_for(double t) {
    struct Stop {
        double pos;
        int r, g, b;
    };
    static constexpr Stop stops[] = {
        {0.0, 0x44, 0x01, 0x54}, {0.5, 0x21, 0x91, 0x8c}, {1.0, 0xfd, 0xe7, 0x25}};
    t = std::clamp(t, 0.0, 1.0);
    const Stop* lo = &stops[0];
    const Stop* hi = &stops[2];
    if (t <= 0.5) {
        hi = &stops[1];
    } else {
        lo = &stops[1];
    }
    const double f = (t - lo->pos) / (hi->pos - lo->pos);
    const auto mix = [f](int a, int b) {
        return static_cast<int>(std::lround(a + f * (b - a)));
    };
    std::ostringstream out;
    out << "rgb(" << mix(lo->r, hi->r) << ',' << mix(lo->g, hi->g) << ','
        << mix(lo->b, hi->b) << ')';
    return out.str();
}

struct Frame {
    double width = 760, height = 520;
    double left = 80, right = 120, top = 50, bottom = 60;
    double plot_w() const { return width - left - right; }
    double plot_h() const { return height - top - bottom; }
};

void open_svg(std::ostringstream& out, const Frame& frame, const std::string& title) {
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << frame.width
        << "\" height=\"" << frame.height << "\" viewBox=\"0 0 " << frame.width
        << ' ' << frame.height << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << frame.width / 2 << "\" y=\"28\" font-size=\"16\" "
           "text-anchor=\"middle\" font-family=\"sans-serif\">"
        << escape(title) << "</text>\n";
}

void axis_label(std::ostringstream& out, const Frame& frame, const std::string& x_label,
                const std::string& y_label) {
    out << "<text x=\"" << frame.left + frame.plot_w() / 2 << "\" y=\""
        << frame.height - 14
        << "\" font-size=\"13\" text-anchor=\"middle\" font-family=\"sans-serif\">"
        << escape(x_label) << "</text>\n"
        << "<text x=\"20\" y=\"" << frame.top + frame.plot_h() / 2
        << "\" font-size=\"13\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "transform=\"rotate(-90 20 "
        << frame.top + frame.plot_h() / 2 << ")\">" << escape(y_label)
        << "</text>\n";
}

}  // namespace

std::string svg_line_plot(const Table& table, const std::string& x_column,
                          const std::string& y_column, const std::string& title) {
    const std::size_t xi = column_index(table, x_column);
    const std::size_t yi = column_index(table, y_column);
    std::vector<std::pair<double, double>> points;
    points.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        points.emplace_back(cell_as_double(row[xi]), cell_as_double(row[yi]));
    }
    if (points.empty()) throw std::runtime_error("svg_line_plot: empty table");

    double x0 = points.front().first, x1 = points.front().first;
    double y0 = points.front().second, y1 = points.front().second;
    for (const auto& [x, y] : points) {
        x0 = std::min(x0, x);
        x1 = std::max(x1, x);
        y0 = std::min(y0, y);
        y1 = std::max(y1, y);
    }
    if (x1 == x0) x1 = x0 + 1.0;
    const double pad = (y1 - y0 == 0.0) ? 0.5 : 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;

    Frame frame;
    frame.right = 30;
    const auto map_x = [&](double x) {
        return frame.left + (x - x0) / (x1 - x0) * frame.plot_w();
    };
    const auto map_y = [&](double y) {
        return frame.top + (y1 - y) / (y1 - y0) * frame.plot_h();
    };

    std::ostringstream out;
    open_svg(out, frame, title);
    axis_label(out, frame, x_column, y_column);

    out << "<rect x=\"" << frame.left << "\" y=\"" << frame.top << "\" width=\""
        << frame.plot_w() << "\" height=\"" << frame.plot_h()
        << "\" fill=\"none\" stroke=\"#333\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double fx = x0 + (x1 - x0) * i / 5.0;
        const double fy = y0 + (y1 - y0) * i / 5.0;
        out << "<text x=\"" << map_x(fx) << "\" y=\""
            << frame.top + frame.plot_h() + 18
            << "\" font-size=\"11\" text-anchor=\"middle\" "
               "font-family=\"sans-serif\">"
            << num(fx) << "</text>\n"
            << "<text x=\"" << frame.left - 8 << "\" y=\"" << map_y(fy) + 4
            << "\" font-size=\"11\" text-anchor=\"end\" font-family=\"sans-serif\">"
            << num(fy) << "</text>\n";
    }

    out << "<polyline fill=\"none\" stroke=\"#1f6feb\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : points) out << num(map_x(x)) << ',' << num(map_y(y)) << ' ';
    out << "\"/>\n</svg>\n";
    return out.str();
}

std::string svg_heat_map(const Table& table, const std::string& metric,
                         const std::string& title) {
    const std::size_t oi = column_index(table, "omega");
    const std::size_t ni = column_index(table, "n");
    const std::size_t mi = column_index(table, metric);
    const std::size_t status_i = column_index(table, "status");

    std::set<double> omega_set;
    std::set<int> n_set;
    std::map<std::pair<int, double>, std::pair<double, bool>> cells;
    for (const auto& row : table.rows) {
        const double omega = cell_as_double(row[oi]);
        const int n = static_cast<int>(std::lround(cell_as_double(row[ni])));
        const bool ok = row[status_i] == "ok";
        omega_set.insert(omega);
        n_set.insert(n);
        cells[{n, omega}] = {ok ? cell_as_double(row[mi])
                                : std::numeric_limits<double>::quiet_NaN(),
                             ok};
    }
    if (cells.empty()) throw std::runtime_error("svg_heat_map: empty table");
    const std::vector<double> omegas(omega_set.begin(), omega_set.end());
    const std::vector<int> ns(n_set.begin(), n_set.end());

    double vmin = std::numeric_limits<double>::infinity();
    double vmax = -vmin;
    for (const auto& [key, cell] : cells) {
        if (!cell.second) continue;
        vmin = std::min(vmin, cell.first);
        vmax = std::max(vmax, cell.first);
    }
    if (!(vmax > vmin)) vmax = vmin + 1.0;

    Frame frame;
    const double cw = frame.plot_w() / static_cast<double>(omegas.size());
    const double ch = frame.plot_h() / static_cast<double>(ns.size());

    std::ostringstream out;
    open_svg(out, frame, title);
    axis_label(out, frame, "omega", "n");

    for (std::size_t r = 0; r < ns.size(); ++r) {
        for (std::size_t c = 0; c < omegas.size(); ++c) {
            const auto it = cells.find({ns[r], omegas[c]});
            std::string fill = "rgb(160,160,160)";
            if (it != cells.end() && it->second.second) {
                fill = color_for((it->second.first - vmin) / (vmax - vmin));
            }
            const double x = frame.left + static_cast<double>(c) * cw;
            const double y =
                frame.top + frame.plot_h() - static_cast<double>(r + 1) * ch;
            out << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\""
                << num(cw) << "\" height=\"" << num(ch) << "\" fill=\"" << fill
                << "\"/>\n";
        }
    }

    // Phase boundary: first classification flip along each n row.
    const bool use_speedup = metric == "qsl_ratio";
    auto is_active = [&](int n, double omega) {
        const auto it = cells.find({n, omega});
        if (it == cells.end() || !it->second.second) return false;
        return use_speedup ? it->second.first < kSpeedupEdge
                           : it->second.first > kNonMarkovianOnset;
    };
    std::vector<std::pair<double, double>> boundary;  // (omega, n)
    for (std::size_t r = 0; r < ns.size(); ++r) {
        for (std::size_t c = 1; c < omegas.size(); ++c) {
            if (is_active(ns[r], omegas[c - 1]) != is_active(ns[r], omegas[c])) {
                boundary.emplace_back(0.5 * (omegas[c - 1] + omegas[c]),
                                      static_cast<double>(r));
                break;
            }
        }
    }
    if (!boundary.empty()) {
        out << "<polyline fill=\"none\" stroke=\"#ff3333\" stroke-width=\"2.5\" "
               "points=\"";
        for (const auto& [omega, row] : boundary) {
            const double frac =
                (omega - omegas.front()) /
                std::max(omegas.back() - omegas.front(), 1e-12);
            const double x = frame.left + frac * frame.plot_w();
            const double y = frame.top + frame.plot_h() - (row + 0.5) * ch;
            out << num(x) << ',' << num(y) << ' ';
        }
        out << "\"/>\n";
    }

    // Ticks.
    const std::size_t omega_stride = std::max<std::size_t>(1, omegas.size() / 6);
    for (std::size_t c = 0; c < omegas.size(); c += omega_stride) {
        const double x = frame.left + (static_cast<double>(c) + 0.5) * cw;
        out << "<text x=\"" << num(x) << "\" y=\"" << frame.top + frame.plot_h() + 18
            << "\" font-size=\"11\" text-anchor=\"middle\" "
               "font-family=\"sans-serif\">"
            << num(omegas[c]) << "</text>\n";
    }
    for (std::size_t r = 0; r < ns.size(); ++r) {
        const double y = frame.top + frame.plot_h() - (static_cast<double>(r) + 0.5) * ch;
        out << "<text x=\"" << frame.left - 8 << "\" y=\"" << num(y + 4)
            << "\" font-size=\"11\" text-anchor=\"end\" font-family=\"sans-serif\">"
            << ns[r] << "</text>\n";
    }

    // Color bar.
    const double bar_x = frame.left + frame.plot_w() + 24;
    out << "<defs><linearGradient id=\"scale\" x1=\"0\" y1=\"1\" x2=\"0\" y2=\"0\">"
           "<stop offset=\"0\" stop-color=\""
        << color_for(0.0) << "\"/><stop offset=\"0.5\" stop-color=\"" << color_for(0.5)
        << "\"/><stop offset=\"1\" stop-color=\"" << color_for(1.0)
        << "\"/></linearGradient></defs>\n"
        << "<rect x=\"" << bar_x << "\" y=\"" << frame.top
        << "\" width=\"16\" height=\"" << frame.plot_h()
        << "\" fill=\"url(#scale)\" stroke=\"#333\"/>\n"
        << "<text x=\"" << bar_x + 22 << "\" y=\"" << frame.top + 10
        << "\" font-size=\"11\" font-family=\"sans-serif\">" << num(vmax)
        << "</text>\n"
        << "<text x=\"" << bar_x + 22 << "\" y=\"" << frame.top + frame.plot_h()
        << "\" font-size=\"11\" font-family=\"sans-serif\">" << num(vmin)
        << "</text>\n"
        << "<text x=\"" << bar_x + 8 << "\" y=\"" << frame.top - 8
        << "\" font-size=\"11\" text-anchor=\"middle\" font-family=\"sans-serif\">"
        << escape(metric) << "</text>\n";

    out << "</svg>\n";
    return out.str();
}

}  // namespace hierenv::cli
