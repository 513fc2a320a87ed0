#include "tonal/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "tonal/eval.hpp"

namespace tonal::svg {

namespace {

constexpr int kWidth = 640;
constexpr int kHeight = 480;
constexpr int kMargin = 56;

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                          "#9467bd", "#8c564b", "#e377c2", "#bcbd22"};
constexpr int kPaletteSize = 8;
constexpr const char* kGray = "#9e9e9e";

std::string f2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

struct Range {
    double lo = 0.0;
    double hi = 1.0;

    double scale(double v, double out_lo, double out_hi) const {
        return out_lo + (v - lo) / (hi - lo) * (out_hi - out_lo);
    }
};

Range padded_range(double lo, double hi) {
    if (!(hi > lo)) {
        lo -= 1.0;
        hi += 1.0;
    }
    const double pad = 0.05 * (hi - lo);
    return {lo - pad, hi + pad};
}

void open_svg(std::ostringstream& out, const std::string& title) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    out << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"16\">" << title << "</text>\n";
}

void draw_frame(std::ostringstream& out, const Range& xr, const Range& yr) {
    out << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\""
        << kWidth - 2 * kMargin << "\" height=\"" << kHeight - 2 * kMargin
        << "\" fill=\"none\" stroke=\"#333333\"/>\n";
    // corner tick labels
    out << "<text x=\"" << kMargin << "\" y=\"" << kHeight - kMargin + 16
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << f2(xr.lo) << "</text>\n";
    out << "<text x=\"" << kWidth - kMargin << "\" y=\"" << kHeight - kMargin + 16
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << f2(xr.hi)
        << "</text>\n";
    out << "<text x=\"" << kMargin - 4 << "\" y=\"" << kHeight - kMargin
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << f2(yr.lo)
        << "</text>\n";
    out << "<text x=\"" << kMargin - 4 << "\" y=\"" << kMargin + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << f2(yr.hi)
        << "</text>\n";
}

}  // namespace

std::string scatter(const std::vector<cluster::Point>& points,
                    const std::vector<int>& assignments,
                    const std::vector<cluster::Point>& centers, const std::string& title) {
    double lo_x = 0.0, hi_x = 0.0, lo_y = 0.0, hi_y = 0.0;
    bool first = true;
    auto widen = [&](const cluster::Point& p) {
        if (first) {
            lo_x = hi_x = p[0];
            lo_y = hi_y = p[1];
            first = false;
        } else {
            lo_x = std::min(lo_x, p[0]);
            hi_x = std::max(hi_x, p[0]);
            lo_y = std::min(lo_y, p[1]);
            hi_y = std::max(hi_y, p[1]);
        }
    };
    for (const auto& p : points) widen(p);
    for (const auto& c : centers) widen(c);
    const Range xr = padded_range(lo_x, hi_x);
    const Range yr = padded_range(lo_y, hi_y);

    std::ostringstream out;
    open_svg(out, title);
    draw_frame(out, xr, yr);
    for (std::size_t i = 0; i < points.size(); ++i) {
        const int label = i < assignments.size() ? assignments[i] : cluster::kUnclustered;
        const char* color =
            label == cluster::kUnclustered ? kGray : kPalette[label % kPaletteSize];
        out << "<circle cx=\"" << f2(xr.scale(points[i][0], kMargin, kWidth - kMargin))
            << "\" cy=\"" << f2(yr.scale(points[i][1], kHeight - kMargin, kMargin))
            << "\" r=\"3\" fill=\"" << color << "\" fill-opacity=\"0.7\"/>\n";
    }
    for (const auto& c : centers) {
        const std::string cx = f2(xr.scale(c[0], kMargin, kWidth - kMargin));
        const std::string cy = f2(yr.scale(c[1], kHeight - kMargin, kMargin));
        out << "<path d=\"M " << cx << " " << cy << " m -5 -5 l 10 10 m 0 -10 l -10 10\" "
            << "stroke=\"black\" stroke-width=\"2\" fill=\"none\"/>\n";
    }
    out << "</svg>\n";
    return out.str();
}

std::string prototype_panels(const std::vector<std::vector<double>>& prototypes,
                             const std::vector<int>& sizes, const std::string& title) {
    const int k = static_cast<int>(prototypes.size());
    const int cols = std::min(4, std::max(1, k));
    const int rows = (k + cols - 1) / cols;
    const double panel_w = static_cast<double>(kWidth - 2 * kMargin) / cols;
    const double panel_h = static_cast<double>(kHeight - 2 * kMargin) / std::max(1, rows);

    std::ostringstream out;
    open_svg(out, title);
    for (int p = 0; p < k; ++p) {
        const double x0 = kMargin + (p % cols) * panel_w + 6;
        const double y0 = kMargin + (p / cols) * panel_h + 14;
        const double w = panel_w - 12;
        const double h = panel_h - 26;
        out << "<rect x=\"" << f2(x0) << "\" y=\"" << f2(y0) << "\" width=\"" << f2(w)
            << "\" height=\"" << f2(h) << "\" fill=\"none\" stroke=\"#cccccc\"/>\n";
        std::string label = eval::cluster_letter(p);
        if (p < static_cast<int>(sizes.size())) {
            label += " (n=" + std::to_string(sizes[p]) + ")";
        }
        out << "<text x=\"" << f2(x0) << "\" y=\"" << f2(y0 - 3)
            << "\" font-family=\"sans-serif\" font-size=\"11\">" << label << "</text>\n";
        const auto& proto = prototypes[p];
        if (proto.size() < 2) continue;
        out << "<polyline fill=\"none\" stroke=\"" << kPalette[p % kPaletteSize]
            << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < proto.size(); ++i) {
            const double px =
                x0 + static_cast<double>(i) / static_cast<double>(proto.size() - 1) * w;
            const double py = y0 + h - std::clamp(proto[i], 0.0, 1.0) * h;
            out << f2(px) << "," << f2(py) << (i + 1 < proto.size() ? " " : "");
        }
        out << "\"/>\n";
    }
    out << "</svg>\n";
    return out.str();
}

std::string size_bars(const std::vector<int>& sizes, int threshold, const std::string& title) {
    int max_size = threshold;
    for (int s : sizes) max_size = std::max(max_size, s);
    const Range yr = padded_range(0.0, static_cast<double>(std::max(1, max_size)));
    const Range xr{0.0, static_cast<double>(std::max<std::size_t>(1, sizes.size()))};

    std::ostringstream out;
    open_svg(out, title);
    draw_frame(out, xr, yr);
    const double slot = (kWidth - 2.0 * kMargin) / xr.hi;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        const double x = kMargin + static_cast<double>(i) * slot + 0.15 * slot;
        const double top = yr.scale(sizes[i], kHeight - kMargin, kMargin);
        out << "<rect x=\"" << f2(x) << "\" y=\"" << f2(top) << "\" width=\"" << f2(0.7 * slot)
            << "\" height=\"" << f2(kHeight - kMargin - top) << "\" fill=\""
            << kPalette[i % kPaletteSize] << "\"/>\n";
        out << "<text x=\"" << f2(x + 0.35 * slot) << "\" y=\"" << kHeight - kMargin + 16
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << eval::cluster_letter(static_cast<int>(i)) << "</text>\n";
    }
    const double ty = yr.scale(threshold, kHeight - kMargin, kMargin);
    out << "<line x1=\"" << kMargin << "\" y1=\"" << f2(ty) << "\" x2=\"" << kWidth - kMargin
        << "\" y2=\"" << f2(ty) << "\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
    out << "<text x=\"" << kWidth - kMargin - 4 << "\" y=\"" << f2(ty - 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">threshold "
        << threshold << "</text>\n";
    out << "</svg>\n";
    return out.str();
}

std::string line_chart(const std::vector<double>& values, const std::string& title,
                       const std::string& x_label, const std::string& y_label) {
    double lo = 0.0, hi = 1.0;
    if (!values.empty()) {
        lo = hi = values[0];
        for (double v : values) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    const Range yr = padded_range(lo, hi);
    const Range xr{0.0, static_cast<double>(values.empty() ? 1 : values.size() - 1)};

    std::ostringstream out;
    open_svg(out, title);
    draw_frame(out, xr, yr);
    out << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 12
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << x_label
        << "</text>\n";
    out << "<text x=\"16\" y=\"" << kHeight / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
        << "transform=\"rotate(-90 16 " << kHeight / 2 << ")\">" << y_label << "</text>\n";
    if (values.size() >= 2) {
        out << "<polyline fill=\"none\" stroke=\"" << kPalette[0]
            << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < values.size(); ++i) {
            out << f2(xr.scale(static_cast<double>(i), kMargin, kWidth - kMargin)) << ","
                << f2(yr.scale(values[i], kHeight - kMargin, kMargin))
                << (i + 1 < values.size() ? " " : "");
        }
        out << "\"/>\n";
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace tonal::svg
