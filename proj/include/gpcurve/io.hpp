#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gpcurve/errors.hpp"
#include "gpcurve/util.hpp"

namespace gpcurve {

// Insertion order is preserved so that repeated runs serialize byte-identically.
using Json = nlohmann::ordered_json;

inline Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open for reading: " + path);
    Json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw IoError("parse failure in " + path + ": " + e.what());
    }
    return j;
}

inline void ensure_parent_dir(const std::string& path) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(parent, ec);
        if (ec) throw IoError("cannot create directory: " + parent.string());
    }
}

inline void write_text_file(const std::string& path, const std::string& body) {
    ensure_parent_dir(path);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << body;
    if (!out) throw IoError("write failure: " + path);
}

inline void write_json_file(const std::string& path, const Json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

// CSV with full-precision numeric cells.
struct CsvWriter {
    std::ostringstream os;

    explicit CsvWriter(const std::vector<std::string>& header) {
        for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
        os << "\n";
    }
    void row(const Vec& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << fmt17(cells[i]);
        os << "\n";
    }
    void save(const std::string& path) const { write_text_file(path, os.str()); }
};

// Minimal deterministic SVG polyline plot: one curve per series on shared axes.
inline std::string svg_plot(const std::vector<Vec>& xs, const std::vector<Vec>& ys,
                            const std::vector<std::string>& labels, const std::string& title) {
    const int W = 720, H = 480, ML = 64, MR = 24, MT = 40, MB = 48;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (std::size_t s = 0; s < xs.size(); ++s)
        for (std::size_t i = 0; i < xs[s].size(); ++i) {
            xmin = std::min(xmin, xs[s][i]);
            xmax = std::max(xmax, xs[s][i]);
            ymin = std::min(ymin, ys[s][i]);
            ymax = std::max(ymax, ys[s][i]);
        }
    if (!(xmax > xmin)) { xmax = xmin + 1.0; }
    if (!(ymax > ymin)) { ymax = ymin + 1.0; }
    const double padY = 0.05 * (ymax - ymin);
    ymin -= padY;
    ymax += padY;
    auto px = [&](double x) { return ML + (x - xmin) / (xmax - xmin) * (W - ML - MR); };
    auto py = [&](double y) { return H - MB - (y - ymin) / (ymax - ymin) * (H - MT - MB); };
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
    s << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    s << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
      << title << "</text>\n";
    s << "<line x1=\"" << ML << "\" y1=\"" << H - MB << "\" x2=\"" << W - MR << "\" y2=\"" << H - MB
      << "\" stroke=\"black\"/>\n";
    s << "<line x1=\"" << ML << "\" y1=\"" << MT << "\" x2=\"" << ML << "\" y2=\"" << H - MB
      << "\" stroke=\"black\"/>\n";
    char buf[64];
    for (int t = 0; t <= 4; ++t) {
        const double xv = xmin + t * (xmax - xmin) / 4.0, yv = ymin + t * (ymax - ymin) / 4.0;
        std::snprintf(buf, sizeof buf, "%.4g", xv);
        s << "<text x=\"" << px(xv) << "\" y=\"" << H - MB + 18
          << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << buf << "</text>\n";
        std::snprintf(buf, sizeof buf, "%.4g", yv);
        s << "<text x=\"" << ML - 6 << "\" y=\"" << py(yv) + 4
          << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << buf << "</text>\n";
    }
    for (std::size_t ser = 0; ser < xs.size(); ++ser) {
        s << "<polyline fill=\"none\" stroke=\"" << colors[ser % 6] << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < xs[ser].size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(xs[ser][i]), py(ys[ser][i]));
            s << buf;
        }
        s << "\"/>\n";
        if (ser < labels.size() && !labels[ser].empty())
            s << "<text x=\"" << W - MR - 8 << "\" y=\"" << MT + 16 * (ser + 1)
              << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" << colors[ser % 6]
              << "\">" << labels[ser] << "</text>\n";
    }
    s << "</svg>\n";
    return s.str();
}

}  // namespace gpcurve
