#pragma once
//! SVG documents for the posterior model matrix and the RSS-vs-size plot.
//! Output depends only on the inputs, so identical inputs give identical bytes.

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ssvs/pattern.hpp"
#include "ssvs/summary.hpp"

namespace ssvs {

namespace svg {

inline std::string num(double x) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.3f", x);
    return buf;
}

inline std::string escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += ch;
        }
    }
    return out;
}

struct MatrixLayout {
    double cell_width = 28;
    double plot_height = 600;
    double margin_left = 60;
    double margin_top = 20;
    double label_band = 60;
    std::size_t separated_rows = 10;
};

inline void open_document(std::ostringstream& o, double w, double h) {
    o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(w) << "\" height=\"" << num(h)
      << "\" viewBox=\"0 0 " << num(w) << ' ' << num(h) << "\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << num(w) << "\" height=\"" << num(h) << "\" fill=\"#ffffff\"/>\n";
}

inline void node_labels(std::ostringstream& o, const std::vector<std::string>& labels, const MatrixLayout& l,
                        double baseline) {
    for (std::size_t i = 0; i < labels.size(); ++i) {
        double x = l.margin_left + l.cell_width * (static_cast<double>(i) + 0.5);
        o << "<text class=\"label\" x=\"" << num(x) << "\" y=\"" << num(baseline + 14)
          << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\" transform=\"rotate(-60 "
          << num(x) << ' ' << num(baseline + 14) << ")\">" << escape(labels[i]) << "</text>\n";
    }
}

inline void cell(std::ostringstream& o, bool on, double x, double y, double w, double h) {
    o << "<rect class=\"cell " << (on ? "on" : "off") << "\" x=\"" << num(x) << "\" y=\"" << num(y)
      << "\" width=\"" << num(w) << "\" height=\"" << num(h) << "\" fill=\"" << (on ? "#000000" : "#ffffff")
      << "\"/>\n";
}

}  // namespace svg

/// Stretched 0/1 matrix of the most probable models: one row per model with
/// height proportional to its posterior probability, most probable at the
/// bottom, separator lines around the leading rows, node labels underneath.
inline std::string render_model_matrix(const ModelTable& table, const std::vector<std::string>& labels,
                                       std::size_t top_n, const svg::MatrixLayout& l = {}) {
    const std::size_t p = labels.size();
    const std::size_t rows = std::min(top_n, table.rows.size());
    double mass = 0;
    for (std::size_t k = 0; k < rows; ++k) mass += table.rows[k].posterior;

    const double width = l.margin_left + l.cell_width * static_cast<double>(p) + 20;
    const double height = l.margin_top + l.plot_height + l.label_band;
    const double bottom = l.margin_top + l.plot_height;
    std::ostringstream o;
    svg::open_document(o, width, height);

    double y_low = bottom;
    std::vector<double> edges;
    for (std::size_t k = 0; k < rows; ++k) {
        const auto& r = table.rows[k];
        double h = rows == 1 ? l.plot_height : (mass > 0 ? l.plot_height * r.posterior / mass : 0.0);
        double y = y_low - h;
        o << "<g class=\"model\" data-rank=\"" << k + 1 << "\" data-key=\"" << r.key << "\">\n";
        for (std::size_t i = 0; i < p; ++i)
            svg::cell(o, i < r.key.size() && r.key[i] == '1',
                      l.margin_left + l.cell_width * static_cast<double>(i), y, l.cell_width, h);
        o << "</g>\n";
        if (k < l.separated_rows) edges.push_back(y);
        y_low = y;
    }
    const double x0 = l.margin_left, x1 = l.margin_left + l.cell_width * static_cast<double>(p);
    for (double y : edges)
        o << "<line class=\"separator\" x1=\"" << svg::num(x0) << "\" y1=\"" << svg::num(y) << "\" x2=\""
          << svg::num(x1) << "\" y2=\"" << svg::num(y) << "\" stroke=\"#808080\" stroke-width=\"0.5\"/>\n";
    o << "<rect class=\"frame\" x=\"" << svg::num(x0) << "\" y=\"" << svg::num(l.margin_top) << "\" width=\""
      << svg::num(x1 - x0) << "\" height=\"" << svg::num(l.plot_height)
      << "\" fill=\"none\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
    svg::node_labels(o, labels, l, bottom);
    o << "</svg>\n";
    return o.str();
}

/// Unstretched variant: patterns in sampling order, equal row heights, first
/// sample at the bottom. Useful for spotting a chain stuck in one region.
inline std::string render_sampled_matrix(const std::vector<ActivationPattern>& samples,
                                         const std::vector<std::string>& labels, std::size_t max_rows,
                                         const svg::MatrixLayout& l = {}) {
    const std::size_t p = labels.size();
    const std::size_t rows = std::min(max_rows, samples.size());
    const double width = l.margin_left + l.cell_width * static_cast<double>(p) + 20;
    const double height = l.margin_top + l.plot_height + l.label_band;
    const double bottom = l.margin_top + l.plot_height;
    const double h = rows ? l.plot_height / static_cast<double>(rows) : 0.0;
    std::ostringstream o;
    svg::open_document(o, width, height);
    for (std::size_t k = 0; k < rows; ++k) {
        double y = bottom - h * static_cast<double>(k + 1);
        o << "<g class=\"sample\" data-index=\"" << k << "\">\n";
        for (std::size_t i = 0; i < p; ++i)
            svg::cell(o, samples[k].size() > i && samples[k][i], l.margin_left + l.cell_width * static_cast<double>(i),
                      y, l.cell_width, h);
        o << "</g>\n";
    }
    svg::node_labels(o, labels, l, bottom);
    o << "</svg>\n";
    return o.str();
}

/// Residual sum of squares against the number of active nodes for the
/// leading models, with an optional caller-supplied overlay path.
inline std::string render_rss_size(const ModelTable& table, const DesignMatrix& design, const Eigen::VectorXd& y,
                                   std::size_t top_k, const std::vector<std::pair<double, double>>& overlay = {}) {
    struct Point {
        double terms, rss;
        std::string key;
    };
    std::vector<Point> pts;
    for (std::size_t k = 0; k < table.rows.size() && k < top_k; ++k) {
        auto d = table.rows[k].pattern();
        double rss = table.rows[k].rss;
        if (std::isnan(rss)) rss = fit_metrics(d, design, y).rss;
        pts.push_back({static_cast<double>(d.count()), rss, table.rows[k].key});
    }
    const double tss = fit_metrics(ActivationPattern(design.node_count()), design, y).rss;

    double max_x = static_cast<double>(design.node_count()), max_y = tss;
    for (const auto& pt : pts) max_y = std::max(max_y, pt.rss);
    for (const auto& [ox, oy] : overlay) {
        max_x = std::max(max_x, ox);
        max_y = std::max(max_y, oy);
    }
    if (!(max_y > 0)) max_y = 1;
    if (!(max_x > 0)) max_x = 1;

    const double left = 80, top = 20, pw = 520, ph = 360, width = left + pw + 30, height = top + ph + 50;
    auto sx = [&](double x) { return left + pw * x / max_x; };
    auto sy = [&](double v) { return top + ph * (1.0 - v / max_y); };

    std::ostringstream o;
    svg::open_document(o, width, height);
    o << "<line class=\"axis\" x1=\"" << svg::num(left) << "\" y1=\"" << svg::num(top + ph) << "\" x2=\""
      << svg::num(left + pw) << "\" y2=\"" << svg::num(top + ph) << "\" stroke=\"#000000\"/>\n";
    o << "<line class=\"axis\" x1=\"" << svg::num(left) << "\" y1=\"" << svg::num(top) << "\" x2=\"" << svg::num(left)
      << "\" y2=\"" << svg::num(top + ph) << "\" stroke=\"#000000\"/>\n";
    o << "<text x=\"" << svg::num(left + pw / 2) << "\" y=\"" << svg::num(height - 10)
      << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">number of active terms</text>\n";
    o << "<text x=\"15\" y=\"" << svg::num(top + ph / 2) << "\" font-family=\"sans-serif\" font-size=\"12\" "
      << "text-anchor=\"middle\" transform=\"rotate(-90 15 " << svg::num(top + ph / 2) << ")\">RSS</text>\n";
    o << "<circle class=\"baseline\" data-terms=\"0\" data-rss=\"" << detail::format_real(tss) << "\" cx=\""
      << svg::num(sx(0)) << "\" cy=\"" << svg::num(sy(tss)) << "\" r=\"3\" fill=\"none\" stroke=\"#808080\"/>\n";
    o << "<text class=\"baseline-label\" x=\"" << svg::num(sx(0) + 6) << "\" y=\"" << svg::num(sy(tss) + 4)
      << "\" font-family=\"sans-serif\" font-size=\"10\">RSS without predictors " << svg::num(tss) << "</text>\n";
    if (!overlay.empty()) {
        o << "<polyline class=\"overlay\" fill=\"none\" stroke=\"#000000\" points=\"";
        for (std::size_t k = 0; k < overlay.size(); ++k)
            o << (k ? " " : "") << svg::num(sx(overlay[k].first)) << ',' << svg::num(sy(overlay[k].second));
        o << "\"/>\n";
    }
    for (const auto& pt : pts)
        o << "<circle class=\"point\" data-key=\"" << pt.key << "\" data-terms=\"" << pt.terms << "\" data-rss=\""
          << detail::format_real(pt.rss) << "\" cx=\"" << svg::num(sx(pt.terms)) << "\" cy=\"" << svg::num(sy(pt.rss))
          << "\" r=\"3\" fill=\"#000000\"/>\n";
    o << "</svg>\n";
    return o.str();
}

}  // namespace ssvs
