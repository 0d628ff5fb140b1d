#include "slicing/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <tuple>

#include "slicing/error.hpp"

namespace slicing {

namespace {

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

}  // namespace

std::string format_report_csv(std::vector<SliceReport> reports) {
    std::stable_sort(reports.begin(), reports.end(), [](const SliceReport& a, const SliceReport& b) {
        return std::tuple(a.num_small_cells, a.users_per_cell, a.slice) <
               std::tuple(b.num_small_cells, b.users_per_cell, b.slice);
    });
    std::string out = kReportHeader;
    out += '\n';
    for (const SliceReport& r : reports) {
        out += std::to_string(r.num_small_cells) + ',' + std::to_string(r.users_per_cell) + ',' +
               std::string(slice_name(r.slice)) + ',' + fixed(r.mean_capacity_bps, 3) + ',' +
               fixed(r.std_bps, 3) + ',' + std::to_string(r.num_seeds) + '\n';
    }
    return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
    out << text;
    out.flush();
    if (!out) throw Error(ErrorKind::Io, "failed writing " + path.string());
}

void write_report(const std::vector<SliceReport>& reports, const std::filesystem::path& path) {
    if (reports.empty()) throw Error(ErrorKind::InvalidConfig, "no reports to write");
    write_text_file(path, format_report_csv(reports));
}

std::string format_svg_chart(const std::vector<SliceReport>& reports, Slice slice) {
    constexpr double kWidth = 640, kHeight = 400, kLeft = 80, kRight = 20, kTop = 40, kBottom = 50;
    static constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

    std::map<int, std::vector<std::pair<int, double>>> series;
    int x_min = 0, x_max = 1;
    double y_max = 0.0;
    bool first = true;
    for (const SliceReport& r : reports) {
        if (r.slice != slice) continue;
        series[r.users_per_cell].emplace_back(r.num_small_cells, r.mean_capacity_bps);
        x_min = first ? r.num_small_cells : std::min(x_min, r.num_small_cells);
        x_max = first ? r.num_small_cells : std::max(x_max, r.num_small_cells);
        y_max = std::max(y_max, r.mean_capacity_bps);
        first = false;
    }
    if (x_max == x_min) x_max = x_min + 1;
    if (!(y_max > 0.0)) y_max = 1.0;
    const double mbps_max = y_max / 1e6;

    auto px = [&](double x) { return kLeft + (x - x_min) / (x_max - x_min) * (kWidth - kLeft - kRight); };
    auto py = [&](double bps) { return kHeight - kBottom - bps / y_max * (kHeight - kTop - kBottom); };

    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" "
                      "viewBox=\"0 0 640 400\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg += "<rect width=\"640\" height=\"400\" fill=\"white\"/>\n";
    svg += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">Total " +
           std::string(slice_name(slice)) + " capacity</text>\n";
    svg += "<line x1=\"" + fixed(kLeft, 1) + "\" y1=\"" + fixed(kHeight - kBottom, 1) + "\" x2=\"" +
           fixed(kWidth - kRight, 1) + "\" y2=\"" + fixed(kHeight - kBottom, 1) + "\" stroke=\"black\"/>\n";
    svg += "<line x1=\"" + fixed(kLeft, 1) + "\" y1=\"" + fixed(kTop, 1) + "\" x2=\"" + fixed(kLeft, 1) +
           "\" y2=\"" + fixed(kHeight - kBottom, 1) + "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double v = y_max * i / 4.0;
        svg += "<text x=\"" + fixed(kLeft - 6, 1) + "\" y=\"" + fixed(py(v) + 4, 1) + "\" text-anchor=\"end\">" +
               fixed(mbps_max * i / 4.0, 1) + "</text>\n";
    }
    svg += "<text x=\"320\" y=\"390\" text-anchor=\"middle\">Number of small cells</text>\n";
    svg += "<text x=\"18\" y=\"200\" text-anchor=\"middle\" transform=\"rotate(-90 18 200)\">Capacity (Mbps)</text>\n";

    int index = 0;
    for (auto& [users, points] : series) {
        std::sort(points.begin(), points.end());
        const char* color = kColors[index % 5];
        std::string pts;
        for (const auto& [x, y] : points) {
            if (!pts.empty()) pts += ' ';
            pts += fixed(px(x), 1) + ',' + fixed(py(y), 1);
            svg += "<circle cx=\"" + fixed(px(x), 1) + "\" cy=\"" + fixed(py(y), 1) + "\" r=\"3\" fill=\"" +
                   color + "\"/>\n";
        }
        if (index == 0) {
            for (const auto& point : points)
                svg += "<text x=\"" + fixed(px(point.first), 1) + "\" y=\"" + fixed(kHeight - kBottom + 16, 1) +
                       "\" text-anchor=\"middle\">" + std::to_string(point.first) + "</text>\n";
        }
        svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"2\" points=\"" + pts +
               "\"/>\n";
        svg += "<text x=\"" + fixed(kWidth - kRight - 110, 1) + "\" y=\"" + fixed(kTop + 16 + 16 * index, 1) +
               "\" fill=\"" + color + "\">" + std::to_string(users) + " users/cell</text>\n";
        ++index;
    }
    svg += "</svg>\n";
    return svg;
}

std::vector<std::filesystem::path> write_svg_charts(const std::vector<SliceReport>& reports,
                                                    const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> written;
    for (Slice slice : {Slice::eMBB, Slice::uRLLC, Slice::IoT}) {
        const std::filesystem::path path = dir / ("capacity_" + std::string(slice_name(slice)) + ".svg");
        write_text_file(path, format_svg_chart(reports, slice));
        written.push_back(path);
    }
    return written;
}

}  // namespace slicing
