#pragma once

#include <algorithm>
#include <fstream>
#include <string>
#include <vector>

#include "gpncast/common.hpp"

namespace gpncast {

/// One bar of a chart: a label and a non-negative value.
struct Bar {
    std::string label;
    double value = 0.0;
};

namespace svg_detail {

inline std::string escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
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

}  // namespace svg_detail

/// Render a horizontal bar chart as a standalone SVG string. Pure text
/// generation, deterministic for identical inputs.
inline std::string bar_chart_svg(const std::string& title,
                                 const std::vector<Bar>& bars,
                                 const std::string& value_suffix = "") {
    const int bar_h = 22, gap = 6, label_w = 300, chart_w = 480, value_w = 120;
    const int margin = 16, title_h = 30;
    const int width = margin * 2 + label_w + chart_w + value_w;
    const int height =
        title_h + margin * 2 + static_cast<int>(bars.size()) * (bar_h + gap);

    double vmax = 0.0;
    for (const auto& b : bars) vmax = std::max(vmax, b.value);
    if (vmax <= 0.0) vmax = 1.0;

    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         std::to_string(width) + "\" height=\"" + std::to_string(height) +
         "\" font-family=\"monospace\" font-size=\"13\">\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s += "<text x=\"" + std::to_string(margin) + "\" y=\"" +
         std::to_string(margin + 6) + "\" font-size=\"15\" font-weight=\"bold\">" +
         svg_detail::escape(title) + "</text>\n";
    int y = title_h + margin;
    for (const auto& b : bars) {
        const int w = static_cast<int>(chart_w * std::max(0.0, b.value) / vmax);
        s += "<text x=\"" + std::to_string(margin + label_w - 8) + "\" y=\"" +
             std::to_string(y + bar_h - 6) + "\" text-anchor=\"end\">" +
             svg_detail::escape(b.label) + "</text>\n";
        s += "<rect x=\"" + std::to_string(margin + label_w) + "\" y=\"" +
             std::to_string(y) + "\" width=\"" + std::to_string(std::max(w, 1)) +
             "\" height=\"" + std::to_string(bar_h) + "\" fill=\"#4878a8\"/>\n";
        s += "<text x=\"" + std::to_string(margin + label_w + std::max(w, 1) + 6) +
             "\" y=\"" + std::to_string(y + bar_h - 6) + "\">" +
             svg_detail::escape(fmt_double(b.value) + value_suffix) + "</text>\n";
        y += bar_h + gap;
    }
    s += "</svg>\n";
    return s;
}

inline void write_bar_chart(const std::string& path, const std::string& title,
                            const std::vector<Bar>& bars,
                            const std::string& value_suffix = "") {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write svg '" + path + "'");
    out << bar_chart_svg(title, bars, value_suffix);
}

}  // namespace gpncast
