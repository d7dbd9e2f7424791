#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "ictrace/common.hpp"

namespace ictrace {

/// Minimal static SVG plotting: scatter with optional edges, and multi-series
/// line charts with optional log axes. Enough to render embeddings, PCA
/// panels, and fitted curves; nothing interactive.
class SvgPlot {
public:
    SvgPlot(double width = 480.0, double height = 360.0, std::string title = "")
        : width_(width), height_(height), title_(std::move(title)) {}

    void set_log_axes(bool log_x, bool log_y) {
        log_x_ = log_x;
        log_y_ = log_y;
    }

    void add_points(std::vector<std::pair<double, double>> pts, const std::string& color,
                    std::vector<std::string> labels = {}) {
        points_.push_back({std::move(pts), color, std::move(labels)});
    }

    void add_line(std::vector<std::pair<double, double>> pts, const std::string& color,
                  std::string label = "") {
        lines_.push_back({std::move(pts), color, std::move(label)});
    }

    /// Edge segments in data coordinates (for graph drawings).
    void add_segments(std::vector<std::array<double, 4>> segments, const std::string& color) {
        segments_.push_back({std::move(segments), color});
    }

    std::string str() const {
        double xmin = kInfinity, xmax = -kInfinity, ymin = kInfinity, ymax = -kInfinity;
        auto grow = [&](double x, double y) {
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        };
        for (const auto& s : points_)
            for (const auto& [x, y] : s.pts) grow(tx(x), ty(y));
        for (const auto& s : lines_)
            for (const auto& [x, y] : s.pts) grow(tx(x), ty(y));
        for (const auto& s : segments_)
            for (const auto& seg : s.segments) {
                grow(tx(seg[0]), ty(seg[1]));
                grow(tx(seg[2]), ty(seg[3]));
            }
        if (!(xmin < xmax)) {
            xmin -= 1.0;
            xmax += 1.0;
        }
        if (!(ymin < ymax)) {
            ymin -= 1.0;
            ymax += 1.0;
        }

        const double margin = 42.0;
        const double plot_w = width_ - 2.0 * margin;
        const double plot_h = height_ - 2.0 * margin;
        auto px = [&](double x) { return margin + (tx(x) - xmin) / (xmax - xmin) * plot_w; };
        auto py = [&](double y) { return height_ - margin - (ty(y) - ymin) / (ymax - ymin) * plot_h; };

        std::string out;
        out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(width_) +
               "\" height=\"" + fmt(height_) + "\" viewBox=\"0 0 " + fmt(width_) + " " +
               fmt(height_) + "\">\n";
        out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
        out += "<rect x=\"" + fmt(margin) + "\" y=\"" + fmt(margin) + "\" width=\"" + fmt(plot_w) +
               "\" height=\"" + fmt(plot_h) + "\" fill=\"none\" stroke=\"#888\"/>\n";
        if (!title_.empty())
            out += "<text x=\"" + fmt(width_ / 2.0) +
                   "\" y=\"24\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\">" +
                   escape(title_) + "</text>\n";

        for (const auto& s : segments_)
            for (const auto& seg : s.segments)
                out += "<line x1=\"" + fmt(px(seg[0])) + "\" y1=\"" + fmt(py(seg[1])) + "\" x2=\"" +
                       fmt(px(seg[2])) + "\" y2=\"" + fmt(py(seg[3])) + "\" stroke=\"" + s.color +
                       "\" stroke-width=\"1\"/>\n";

        for (const auto& s : lines_) {
            if (s.pts.empty()) continue;
            std::string poly;
            for (const auto& [x, y] : s.pts) poly += fmt(px(x)) + "," + fmt(py(y)) + " ";
            out += "<polyline points=\"" + poly + "\" fill=\"none\" stroke=\"" + s.color +
                   "\" stroke-width=\"1.5\"/>\n";
            if (!s.label.empty())
                out += "<text x=\"" + fmt(px(s.pts.back().first)) + "\" y=\"" +
                       fmt(py(s.pts.back().second) - 4.0) +
                       "\" font-size=\"10\" font-family=\"sans-serif\" fill=\"" + s.color + "\">" +
                       escape(s.label) + "</text>\n";
        }

        for (const auto& s : points_) {
            for (std::size_t i = 0; i < s.pts.size(); ++i) {
                const auto& [x, y] = s.pts[i];
                out += "<circle cx=\"" + fmt(px(x)) + "\" cy=\"" + fmt(py(y)) +
                       "\" r=\"2.6\" fill=\"" + s.color + "\"/>\n";
                if (i < s.labels.size() && !s.labels[i].empty())
                    out += "<text x=\"" + fmt(px(x) + 4.0) + "\" y=\"" + fmt(py(y) - 3.0) +
                           "\" font-size=\"9\" font-family=\"sans-serif\">" + escape(s.labels[i]) +
                           "</text>\n";
            }
        }
        out += "</svg>\n";
        return out;
    }

private:
    struct PointSeries {
        std::vector<std::pair<double, double>> pts;
        std::string color;
        std::vector<std::string> labels;
    };
    struct LineSeries {
        std::vector<std::pair<double, double>> pts;
        std::string color;
        std::string label;
    };
    struct SegmentSeries {
        std::vector<std::array<double, 4>> segments;
        std::string color;
    };

    double tx(double x) const { return log_x_ ? std::log10(std::max(x, 1e-300)) : x; }
    double ty(double y) const { return log_y_ ? std::log10(std::max(y, 1e-300)) : y; }

    static std::string fmt(double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.4f", v);
        return buf;
    }

    static std::string escape(const std::string& s) {
        std::string out;
        for (char c : s) {
            if (c == '&') out += "&amp;";
            else if (c == '<') out += "&lt;";
            else if (c == '>') out += "&gt;";
            else out += c;
        }
        return out;
    }

    double width_;
    double height_;
    std::string title_;
    bool log_x_ = false;
    bool log_y_ = false;
    std::vector<PointSeries> points_;
    std::vector<LineSeries> lines_;
    std::vector<SegmentSeries> segments_;
};

}  // namespace ictrace
