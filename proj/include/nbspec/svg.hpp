#pragma once

// Static SVG line/bar plots with linear or log axes.  Enough for the figure
// artifacts: no interactivity, no external renderer.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace nbspec {

class SvgPlot {
public:
    SvgPlot(std::string title, std::string xlabel, std::string ylabel, bool logx = false,
            bool logy = false)
        : title_(std::move(title)), xlabel_(std::move(xlabel)), ylabel_(std::move(ylabel)),
          logx_(logx), logy_(logy) {}

    void add_line(const std::vector<double>& x, const std::vector<double>& y, std::string color,
                  std::string label = "", bool dashed = false) {
        series_.push_back({x, y, std::move(color), std::move(label), true, dashed});
        grow_limits(x, y);
    }

    void add_points(const std::vector<double>& x, const std::vector<double>& y, std::string color,
                    std::string label = "") {
        series_.push_back({x, y, std::move(color), std::move(label), false, false});
        grow_limits(x, y);
    }

    // bars stand on y = 0; only meaningful on linear axes
    void add_bars(const std::vector<double>& lo, const std::vector<double>& hi,
                  const std::vector<double>& height, std::string color, std::string label = "") {
        bars_ = {lo, hi, height, std::move(color), std::move(label)};
        grow_limits(lo, height);
        grow_limits(hi, {0.0});
    }

    std::string render() const {
        if (series_.empty() && bars_.lo.empty())
            throw std::invalid_argument("svg plot: nothing to draw");
        double x0 = xmin_, x1 = xmax_, y0 = ymin_, y1 = ymax_;
        pad_range(x0, x1, logx_);
        pad_range(y0, y1, logy_);

        std::ostringstream s;
        s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
          << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
        s << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
        s << "<clipPath id=\"area\"><rect x=\"" << ML << "\" y=\"" << MT << "\" width=\""
          << W - ML - MR << "\" height=\"" << H - MT - MB << "\"/></clipPath>\n";

        draw_axes(s, x0, x1, y0, y1);

        s << "<g clip-path=\"url(#area)\">\n";
        if (!bars_.lo.empty()) {
            const double base = py(std::max(0.0, y0), y0, y1);
            for (std::size_t i = 0; i < bars_.lo.size(); ++i) {
                const double xa = px(bars_.lo[i], x0, x1), xb = px(bars_.hi[i], x0, x1);
                const double yt = py(bars_.height[i], y0, y1);
                s << "<rect x=\"" << xa << "\" y=\"" << std::min(yt, base) << "\" width=\""
                  << std::max(0.5, xb - xa - 0.5) << "\" height=\"" << std::abs(base - yt)
                  << "\" fill=\"" << bars_.color << "\" fill-opacity=\"0.55\"/>\n";
            }
        }
        for (const auto& sr : series_) {
            if (sr.line) {
                s << "<polyline fill=\"none\" stroke=\"" << sr.color << "\" stroke-width=\"1.6\"";
                if (sr.dashed) s << " stroke-dasharray=\"6 4\"";
                s << " points=\"";
                for (std::size_t i = 0; i < sr.x.size(); ++i)
                    if (finite_point(sr.x[i], sr.y[i]))
                        s << px(sr.x[i], x0, x1) << "," << py(sr.y[i], y0, y1) << " ";
                s << "\"/>\n";
            } else {
                for (std::size_t i = 0; i < sr.x.size(); ++i)
                    if (finite_point(sr.x[i], sr.y[i]))
                        s << "<circle cx=\"" << px(sr.x[i], x0, x1) << "\" cy=\""
                          << py(sr.y[i], y0, y1) << "\" r=\"2.2\" fill=\"" << sr.color << "\"/>\n";
            }
        }
        s << "</g>\n";

        draw_legend(s);
        s << "</svg>\n";
        return s.str();
    }

private:
    struct Series {
        std::vector<double> x, y;
        std::string color, label;
        bool line = true, dashed = false;
    };
    struct Bars {
        std::vector<double> lo, hi, height;
        std::string color, label;
    };

    static constexpr int W = 640, H = 440, ML = 70, MR = 24, MT = 40, MB = 56;

    bool finite_point(double x, double y) const {
        if (!std::isfinite(x) || !std::isfinite(y)) return false;
        if (logx_ && x <= 0.0) return false;
        if (logy_ && y <= 0.0) return false;
        return true;
    }

    void grow_limits(const std::vector<double>& xs, const std::vector<double>& ys) {
        for (double x : xs)
            if (std::isfinite(x) && !(logx_ && x <= 0)) {
                xmin_ = std::min(xmin_, x);
                xmax_ = std::max(xmax_, x);
            }
        for (double y : ys)
            if (std::isfinite(y) && !(logy_ && y <= 0)) {
                ymin_ = std::min(ymin_, y);
                ymax_ = std::max(ymax_, y);
            }
    }

    static void pad_range(double& a, double& b, bool logscale) {
        if (a > b) {  // nothing plottable landed in range
            a = logscale ? 0.1 : 0.0;
            b = 1.0;
        }
        if (logscale) {
            a = std::log10(a);
            b = std::log10(b);
        }
        double pad = 0.05 * (b - a);
        if (pad == 0.0) pad = (a == 0.0) ? 0.5 : std::abs(a) * 0.1;
        a -= pad;
        b += pad;
        if (!logscale && a > 0.0 && a < 0.25 * b) a = 0.0;  // anchor near-zero axes at 0
    }

    double px(double x, double x0, double x1) const {
        if (logx_) x = std::log10(std::max(x, 1e-300));
        return ML + (x - x0) / (x1 - x0) * (W - ML - MR);
    }
    double py(double y, double y0, double y1) const {
        if (logy_) y = std::log10(std::max(y, 1e-300));
        return H - MB - (y - y0) / (y1 - y0) * (H - MT - MB);
    }

    static std::string tick_label(double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%g", v);
        return buf;
    }

    static std::vector<double> linear_ticks(double a, double b) {
        const double span = b - a;
        const double raw = span / 5.0;
        const double mag = std::pow(10.0, std::floor(std::log10(raw)));
        double step = mag;
        for (double m : {1.0, 2.0, 5.0, 10.0})
            if (mag * m >= raw) {
                step = mag * m;
                break;
            }
        std::vector<double> t;
        for (double v = std::ceil(a / step) * step; v <= b + 1e-9 * span; v += step)
            t.push_back(std::abs(v) < 1e-12 * span ? 0.0 : v);
        return t;
    }

    void draw_axes(std::ostringstream& s, double x0, double x1, double y0, double y1) const {
        s << "<rect x=\"" << ML << "\" y=\"" << MT << "\" width=\"" << W - ML - MR
          << "\" height=\"" << H - MT - MB
          << "\" fill=\"none\" stroke=\"#333\" stroke-width=\"1\"/>\n";
        const char* tstyle = "font-family=\"sans-serif\" font-size=\"12\" fill=\"#333\"";

        auto emit_xtick = [&](double pos, const std::string& lab) {
            s << "<line x1=\"" << pos << "\" y1=\"" << H - MB << "\" x2=\"" << pos << "\" y2=\""
              << H - MB + 5 << "\" stroke=\"#333\"/>\n";
            s << "<text x=\"" << pos << "\" y=\"" << H - MB + 18 << "\" text-anchor=\"middle\" "
              << tstyle << ">" << lab << "</text>\n";
        };
        auto emit_ytick = [&](double pos, const std::string& lab) {
            s << "<line x1=\"" << ML - 5 << "\" y1=\"" << pos << "\" x2=\"" << ML << "\" y2=\""
              << pos << "\" stroke=\"#333\"/>\n";
            s << "<text x=\"" << ML - 8 << "\" y=\"" << pos + 4 << "\" text-anchor=\"end\" "
              << tstyle << ">" << lab << "</text>\n";
        };

        if (logx_) {
            for (int e = static_cast<int>(std::ceil(x0)); e <= static_cast<int>(std::floor(x1));
                 ++e)
                emit_xtick(ML + (e - x0) / (x1 - x0) * (W - ML - MR),
                           "1e" + std::to_string(e));
        } else {
            for (double v : linear_ticks(x0, x1)) emit_xtick(px(v, x0, x1), tick_label(v));
        }
        if (logy_) {
            for (int e = static_cast<int>(std::ceil(y0)); e <= static_cast<int>(std::floor(y1));
                 ++e)
                emit_ytick(H - MB - (e - y0) / (y1 - y0) * (H - MT - MB),
                           "1e" + std::to_string(e));
        } else {
            for (double v : linear_ticks(y0, y1)) emit_ytick(py(v, y0, y1), tick_label(v));
        }

        s << "<text x=\"" << (ML + W - MR) / 2 << "\" y=\"" << H - 14
          << "\" text-anchor=\"middle\" " << tstyle << ">" << xlabel_ << "</text>\n";
        s << "<text x=\"16\" y=\"" << (MT + H - MB) / 2 << "\" text-anchor=\"middle\" " << tstyle
          << " transform=\"rotate(-90 16 " << (MT + H - MB) / 2 << ")\">" << ylabel_
          << "</text>\n";
        s << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" "
          << "font-family=\"sans-serif\" font-size=\"14\" fill=\"#111\">" << title_
          << "</text>\n";
    }

    void draw_legend(std::ostringstream& s) const {
        std::vector<std::pair<std::string, std::string>> entries;  // label, color
        if (!bars_.lo.empty() && !bars_.label.empty()) entries.emplace_back(bars_.label, bars_.color);
        for (const auto& sr : series_)
            if (!sr.label.empty()) entries.emplace_back(sr.label, sr.color);
        double y = MT + 16;
        for (const auto& [label, color] : entries) {
            const double x = W - MR - 150;
            s << "<line x1=\"" << x << "\" y1=\"" << y - 4 << "\" x2=\"" << x + 22 << "\" y2=\""
              << y - 4 << "\" stroke=\"" << color << "\" stroke-width=\"3\"/>\n";
            s << "<text x=\"" << x + 28 << "\" y=\"" << y
              << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#333\">" << label
              << "</text>\n";
            y += 18;
        }
    }

    std::string title_, xlabel_, ylabel_;
    bool logx_, logy_;
    std::vector<Series> series_;
    Bars bars_;
    double xmin_ = 1e300, xmax_ = -1e300, ymin_ = 1e300, ymax_ = -1e300;
};

}  // namespace nbspec
