#include "jobmatch/charts.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace jobmatch {

namespace {

constexpr double kWidth = 640, kHeight = 400;
constexpr double kLeft = 70, kTop = 30, kRight = 150, kBottom = 60;
constexpr double kPlotW = kWidth - kLeft - kRight;
constexpr double kPlotH = kHeight - kTop - kBottom;

const char* const kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (const char c : s) {
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

const char* colour(std::size_t i) { return kPalette[i % (sizeof kPalette / sizeof kPalette[0])]; }

double y_of(double v) { return kTop + kPlotH * (1.0 - std::clamp(v, 0.0, 1.0)); }

std::string header(const std::string& title) {
    std::string s;
    s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + num(kWidth) + "\" height=\"" +
         num(kHeight) + "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\">\n";
    s += "<rect x=\"0\" y=\"0\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) + "\" fill=\"#ffffff\"/>\n";
    s += "<text x=\"" + num(kLeft + kPlotW / 2) + "\" y=\"20.00\" font-family=\"sans-serif\" font-size=\"14\" "
         "text-anchor=\"middle\">" + escape(title) + "</text>\n";
    // y axis with gridlines
    for (int i = 0; i <= 5; ++i) {
        const double v = i / 5.0;
        const double y = y_of(v);
        s += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(y) + "\" x2=\"" + num(kLeft + kPlotW) + "\" y2=\"" +
             num(y) + "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        s += "<text x=\"" + num(kLeft - 8) + "\" y=\"" + num(y + 4) +
             "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" + num(v) + "</text>\n";
    }
    s += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kTop) + "\" x2=\"" + num(kLeft) + "\" y2=\"" +
         num(kTop + kPlotH) + "\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
    s += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kTop + kPlotH) + "\" x2=\"" + num(kLeft + kPlotW) +
         "\" y2=\"" + num(kTop + kPlotH) + "\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
    return s;
}

std::string legend(const std::vector<std::string>& labels) {
    std::string s;
    const double x = kLeft + kPlotW + 15;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const double y = kTop + 10 + 20.0 * static_cast<double>(i);
        s += "<rect x=\"" + num(x) + "\" y=\"" + num(y - 9) + "\" width=\"12.00\" height=\"12.00\" fill=\"" +
             colour(i) + "\"/>\n";
        s += "<text x=\"" + num(x + 18) + "\" y=\"" + num(y + 1) + "\" font-family=\"sans-serif\" font-size=\"11\">" +
             escape(labels[i]) + "</text>\n";
    }
    return s;
}

}  // namespace

std::string grouped_bar_chart(const std::string& title, const std::vector<std::string>& series,
                              const std::vector<BarGroup>& groups) {
    if (groups.empty() || series.empty()) throw std::invalid_argument("bar chart needs groups and series");
    for (const auto& g : groups)
        if (g.values.size() != series.size()) throw std::invalid_argument("bar group size mismatch");

    std::string s = header(title);
    const double group_w = kPlotW / static_cast<double>(groups.size());
    const double bar_w = group_w * 0.8 / static_cast<double>(series.size());
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const double gx = kLeft + group_w * static_cast<double>(g) + group_w * 0.1;
        for (std::size_t k = 0; k < series.size(); ++k) {
            const double v = groups[g].values[k];
            const double x = gx + bar_w * static_cast<double>(k);
            const double y = y_of(v);
            s += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(bar_w - 2) + "\" height=\"" +
                 num(kTop + kPlotH - y) + "\" fill=\"" + colour(k) + "\"/>\n";
            s += "<text x=\"" + num(x + (bar_w - 2) / 2) + "\" y=\"" + num(y - 4) +
                 "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">" + num(v) + "</text>\n";
        }
        s += "<text x=\"" + num(kLeft + group_w * (static_cast<double>(g) + 0.5)) + "\" y=\"" +
             num(kTop + kPlotH + 20) + "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">" +
             escape(groups[g].label) + "</text>\n";
    }
    s += legend(series);
    s += "</svg>\n";
    return s;
}

std::string line_chart(const std::string& title, const std::string& x_axis_label,
                       const std::vector<std::string>& x_labels, const std::vector<LineSeries>& series) {
    if (x_labels.empty() || series.empty()) throw std::invalid_argument("line chart needs points and series");
    for (const auto& ls : series)
        if (ls.y.size() != x_labels.size()) throw std::invalid_argument("line series size mismatch");

    std::string s = header(title);
    const std::size_t n = x_labels.size();
    const auto x_of = [&](std::size_t i) {
        return n == 1 ? kLeft + kPlotW / 2 : kLeft + 20 + (kPlotW - 40) * static_cast<double>(i) / (n - 1);
    };
    for (std::size_t i = 0; i < n; ++i) {
        s += "<text x=\"" + num(x_of(i)) + "\" y=\"" + num(kTop + kPlotH + 18) +
             "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">" + escape(x_labels[i]) +
             "</text>\n";
    }
    s += "<text x=\"" + num(kLeft + kPlotW / 2) + "\" y=\"" + num(kHeight - 15) +
         "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">" + escape(x_axis_label) +
         "</text>\n";
    std::vector<std::string> names;
    for (std::size_t k = 0; k < series.size(); ++k) {
        names.push_back(series[k].label);
        std::string pts;
        for (std::size_t i = 0; i < n; ++i) {
            if (i) pts += ' ';
            pts += num(x_of(i)) + "," + num(y_of(series[k].y[i]));
        }
        s += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + colour(k) + "\" stroke-width=\"2\"/>\n";
        for (std::size_t i = 0; i < n; ++i) {
            s += "<circle cx=\"" + num(x_of(i)) + "\" cy=\"" + num(y_of(series[k].y[i])) + "\" r=\"3.00\" fill=\"" +
                 colour(k) + "\"/>\n";
        }
    }
    s += legend(names);
    s += "</svg>\n";
    return s;
}

}  // namespace jobmatch
