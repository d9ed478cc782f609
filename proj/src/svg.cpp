#include "ledtap/svg.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace ledtap::svg {

namespace {

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::vector<double> ticks(double lo, double hi, int target) {
    std::vector<double> t;
    if (!(hi > lo)) return {lo};
    const double raw = (hi - lo) / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (m * mag >= raw) {
            step = m * mag;
            break;
        }
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step) t.push_back(std::round(v / step) * step + 0.0);
    return t;
}

// Decades, with 2 and 5 added when the axis spans little more than one.
std::vector<double> log_ticks(double lo, double hi) {
    std::vector<double> t;
    const bool fine = hi - lo < 2.0;
    for (double d = std::floor(lo); d <= hi; d += 1.0)
        for (double m : {1.0, 2.0, 5.0}) {
            if (m != 1.0 && !fine) continue;
            const double v = d + std::log10(m);
            if (v >= lo - 1e-9 && v <= hi + 1e-9) t.push_back(v);
        }
    return t.empty() ? ticks(lo, hi, 6) : t;
}

}  // namespace

std::string render(const Plot& p) {
    const double ml = 70, mr = 20, mt = 36, mb = 48;
    const double pw = p.width - ml - mr, ph = p.height - mt - mb;
    auto fx = [&](double x) { return p.log_x ? std::log10(x) : x; };

    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : p.series)
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!std::isfinite(s.y[i]) || (p.log_x && !(s.x[i] > 0))) continue;
            x0 = std::min(x0, fx(s.x[i]));
            x1 = std::max(x1, fx(s.x[i]));
            y0 = std::min(y0, s.y[i]);
            y1 = std::max(y1, s.y[i]);
        }
    if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (x1 == x0) x1 = x0 + 1;
    if (y1 == y0) y1 = y0 + 1;
    const double pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;
    auto X = [&](double x) { return ml + (fx(x) - x0) / (x1 - x0) * pw; };
    auto Y = [&](double y) { return mt + (1.0 - (y - y0) / (y1 - y0)) * ph; };

    std::string o = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0:g}\" height=\"{1:g}\" viewBox=\"0 0 {0:g} {1:g}\" "
        "font-family=\"sans-serif\" font-size=\"12\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
        p.width, p.height);
    o += fmt::format("<text x=\"{:g}\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n", p.width / 2,
                     escape(p.title));
    o += fmt::format("<rect x=\"{:g}\" y=\"{:g}\" width=\"{:g}\" height=\"{:g}\" fill=\"none\" stroke=\"#444\"/>\n", ml,
                     mt, pw, ph);
    for (double t : p.log_x ? log_ticks(x0, x1) : ticks(x0, x1, 6)) {
        const double px = ml + (t - x0) / (x1 - x0) * pw;
        const std::string label = p.log_x ? fmt::format("{:g}", std::pow(10.0, t)) : fmt::format("{:g}", t + 0.0);
        o += fmt::format("<line x1=\"{0:.2f}\" x2=\"{0:.2f}\" y1=\"{1:g}\" y2=\"{2:g}\" stroke=\"#ddd\"/>\n", px, mt,
                         mt + ph);
        o += fmt::format("<text x=\"{:.2f}\" y=\"{:g}\" text-anchor=\"middle\">{}</text>\n", px, mt + ph + 16, label);
    }
    for (double t : ticks(y0, y1, 5)) {
        o += fmt::format("<line x1=\"{0:g}\" x2=\"{1:g}\" y1=\"{2:.2f}\" y2=\"{2:.2f}\" stroke=\"#ddd\"/>\n", ml, ml + pw,
                         Y(t));
        o += fmt::format("<text x=\"{:g}\" y=\"{:.2f}\" text-anchor=\"end\">{:g}</text>\n", ml - 6, Y(t) + 4, t + 0.0);
    }
    o += fmt::format("<text x=\"{:g}\" y=\"{:g}\" text-anchor=\"middle\">{}</text>\n", ml + pw / 2, p.height - 10,
                     escape(p.x_label));
    o += fmt::format("<text transform=\"translate(16,{:g}) rotate(-90)\" text-anchor=\"middle\">{}</text>\n",
                     mt + ph / 2, escape(p.y_label));

    double legend_y = mt + 14;
    for (const auto& s : p.series) {
        std::string pts;
        double prev_y = std::numeric_limits<double>::quiet_NaN();
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!std::isfinite(s.y[i]) || (p.log_x && !(s.x[i] > 0))) continue;
            if (s.step && std::isfinite(prev_y)) pts += fmt::format("{:.2f},{:.2f} ", X(s.x[i]), Y(prev_y));
            pts += fmt::format("{:.2f},{:.2f} ", X(s.x[i]), Y(s.y[i]));
            prev_y = s.y[i];
        }
        o += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.2\" points=\"{}\"/>\n", s.color, pts);
        if (!s.label.empty()) {
            o += fmt::format("<line x1=\"{0:g}\" x2=\"{1:g}\" y1=\"{2:g}\" y2=\"{2:g}\" stroke=\"{3}\" stroke-width=\"2\"/>\n",
                             ml + pw - 150, ml + pw - 130, legend_y - 4, s.color);
            o += fmt::format("<text x=\"{:g}\" y=\"{:g}\">{}</text>\n", ml + pw - 124, legend_y, escape(s.label));
            legend_y += 16;
        }
    }
    for (const auto& m : p.markers) {
        o += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"4\" fill=\"none\" stroke=\"#c0392b\" stroke-width=\"1.5\"/>\n",
                         X(m.x), Y(m.y));
        o += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" fill=\"#c0392b\">{}</text>\n", X(m.x) + 6, Y(m.y) - 6,
                         escape(m.label));
    }
    o += "</svg>\n";
    return o;
}

}  // namespace ledtap::svg
