#include "chargegame/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

namespace chargegame {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 600.0;
constexpr double kMargin = 60.0;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string svg_open() {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 600\" "
           "width=\"800\" height=\"600\">\n"
           "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"white\"/>\n";
}

std::string text(double x, double y, const std::string& s,
                 const std::string& anchor = "middle") {
    return "<text x=\"" + fmt(x) + "\" y=\"" + fmt(y) +
           "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"" + anchor +
           "\">" + s + "</text>\n";
}

std::string line(double x1, double y1, double x2, double y2, const std::string& color,
                 double width = 1.0, const std::string& dash = "") {
    std::string s = "<line x1=\"" + fmt(x1) + "\" y1=\"" + fmt(y1) + "\" x2=\"" + fmt(x2) +
                    "\" y2=\"" + fmt(y2) + "\" stroke=\"" + color + "\" stroke-width=\"" +
                    fmt(width) + "\"";
    if (!dash.empty()) s += " stroke-dasharray=\"" + dash + "\"";
    return s + "/>\n";
}

std::string rect(double x, double y, double w, double h, const std::string& fill,
                 const std::string& stroke) {
    return "<rect x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" width=\"" + fmt(w) +
           "\" height=\"" + fmt(h) + "\" fill=\"" + fill + "\" stroke=\"" + stroke +
           "\"/>\n";
}

std::string value_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

struct Axis {
    double lo = 0.0;
    double hi = 1.0;
    double pix_lo = 0.0;
    double pix_hi = 1.0;
    double map(double v) const {
        if (hi == lo) return 0.5 * (pix_lo + pix_hi);
        return pix_lo + (v - lo) / (hi - lo) * (pix_hi - pix_lo);
    }
};

// 1-2-5 tick progression.
std::vector<double> ticks_for(double lo, double hi, int target = 6) {
    std::vector<double> out;
    if (!(hi > lo)) return {lo};
    const double raw = (hi - lo) / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double mult : {1.0, 2.0, 5.0, 10.0}) {
        if (mag * mult >= raw) {
            step = mag * mult;
            break;
        }
    }
    const double first = std::ceil(lo / step) * step;
    for (double v = first; v <= hi + 1e-12 * std::abs(hi); v += step) {
        out.push_back(std::abs(v) < step * 1e-9 ? 0.0 : v);
    }
    return out;
}

std::string y_axis(const Axis& y, double x_pix, const std::string& label) {
    std::string s = line(x_pix, y.pix_lo, x_pix, y.pix_hi, "black");
    for (double v : ticks_for(y.lo, y.hi)) {
        const double py = y.map(v);
        s += line(x_pix - 4, py, x_pix, py, "black");
        s += text(x_pix - 8, py + 4, value_label(v), "end");
    }
    s += "<text x=\"" + fmt(x_pix - 44) + "\" y=\"" + fmt(0.5 * (y.pix_lo + y.pix_hi)) +
         "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" "
         "transform=\"rotate(-90 " +
         fmt(x_pix - 44) + " " + fmt(0.5 * (y.pix_lo + y.pix_hi)) + ")\">" + label +
         "</text>\n";
    return s;
}

}  // namespace

std::string render_poa_boxplot(const std::vector<SweepRecord>& records) {
    if (records.empty()) throw std::invalid_argument("render_poa_boxplot: empty input");

    std::map<std::size_t, std::vector<double>> by_m;
    for (const SweepRecord& r : records) {
        if (std::isfinite(r.rel_error)) by_m[r.m].push_back(r.rel_error);
    }
    if (by_m.empty()) throw std::invalid_argument("render_poa_boxplot: no finite records");

    std::map<std::size_t, BoxStats> stats;
    double y_min = 0.0;
    double y_max = -1e300;
    for (const auto& [m, values] : by_m) {
        BoxStats s = summarize(values);
        y_max = std::max({y_max, s.hi_whisker, s.mean});
        y_min = std::min({y_min, s.lo_whisker});
        for (double o : s.outliers) {
            y_max = std::max(y_max, o);
            y_min = std::min(y_min, o);
        }
        stats.emplace(m, std::move(s));
    }
    if (y_max <= y_min) y_max = y_min + 1.0;

    Axis y{y_min, y_max + 0.05 * (y_max - y_min), kHeight - kMargin, kMargin};
    const double lx_min = std::log10(static_cast<double>(stats.begin()->first));
    const double lx_max = std::log10(static_cast<double>(stats.rbegin()->first));
    Axis x{lx_min, lx_max > lx_min ? lx_max : lx_min + 1.0, kMargin + 30.0,
           kWidth - kMargin};

    std::string s = svg_open();
    s += line(x.pix_lo, y.pix_lo, x.pix_hi, y.pix_lo, "black");
    s += y_axis(y, x.pix_lo, "relative error");
    s += text(0.5 * (x.pix_lo + x.pix_hi), kHeight - 14, "m");

    const double half = 12.0;
    for (const auto& [m, st] : stats) {
        const double cx = x.map(std::log10(static_cast<double>(m)));
        s += line(cx, y.pix_lo, cx, y.pix_lo + 4, "black");
        s += text(cx, y.pix_lo + 18, std::to_string(m));

        s += line(cx, y.map(st.lo_whisker), cx, y.map(st.q1), "black");
        s += line(cx, y.map(st.q3), cx, y.map(st.hi_whisker), "black");
        s += line(cx - half * 0.5, y.map(st.lo_whisker), cx + half * 0.5,
                  y.map(st.lo_whisker), "black");
        s += line(cx - half * 0.5, y.map(st.hi_whisker), cx + half * 0.5,
                  y.map(st.hi_whisker), "black");
        s += rect(cx - half, y.map(st.q3), 2 * half, y.map(st.q1) - y.map(st.q3), "none",
                  "#1f77b4");
        s += line(cx - half, y.map(st.median), cx + half, y.map(st.median), "#d62728",
                  1.5);
        // mean marker
        s += line(cx - 4, y.map(st.mean) - 4, cx + 4, y.map(st.mean) + 4, "#1f77b4", 1.5);
        s += line(cx - 4, y.map(st.mean) + 4, cx + 4, y.map(st.mean) - 4, "#1f77b4", 1.5);
        for (double o : st.outliers) {
            s += line(cx - 3, y.map(o), cx + 3, y.map(o), "#7f7f7f");
            s += line(cx, y.map(o) - 3, cx, y.map(o) + 3, "#7f7f7f");
        }
    }
    s += "</svg>\n";
    return s;
}

std::string render_hetero_histograms(const std::vector<SweepRecord>& records,
                                     double limit_value) {
    if (records.empty()) {
        throw std::invalid_argument("render_hetero_histograms: empty input");
    }
    std::map<std::size_t, std::vector<double>> by_m;
    double lo = limit_value;
    double hi = limit_value;
    for (const SweepRecord& r : records) {
        if (!std::isfinite(r.normalized_value)) continue;
        by_m[r.m].push_back(r.normalized_value);
        lo = std::min(lo, r.normalized_value);
        hi = std::max(hi, r.normalized_value);
    }
    if (by_m.empty()) {
        throw std::invalid_argument("render_hetero_histograms: no finite records");
    }
    if (hi <= lo) hi = lo + 1.0;
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;

    constexpr int kBins = 30;
    const double panel_h = (kHeight - 2 * kMargin) / static_cast<double>(by_m.size());
    Axis x{lo, hi, kMargin + 30.0, kWidth - kMargin};

    std::string s = svg_open();
    std::size_t panel = 0;
    for (const auto& [m, values] : by_m) {
        const double top = kMargin + panel * panel_h;
        const double bottom = top + panel_h - 24.0;

        std::vector<int> bins(kBins, 0);
        for (double v : values) {
            int b = static_cast<int>((v - lo) / (hi - lo) * kBins);
            b = std::clamp(b, 0, kBins - 1);
            ++bins[b];
        }
        const int peak = *std::max_element(bins.begin(), bins.end());
        Axis y{0.0, static_cast<double>(std::max(peak, 1)), bottom, top};

        s += line(x.pix_lo, bottom, x.pix_hi, bottom, "black");
        for (int b = 0; b < kBins; ++b) {
            if (bins[b] == 0) continue;
            const double x0 = x.map(lo + (hi - lo) * b / kBins);
            const double x1 = x.map(lo + (hi - lo) * (b + 1) / kBins);
            s += rect(x0, y.map(bins[b]), x1 - x0, bottom - y.map(bins[b]), "#1f77b4",
                      "white");
        }
        s += line(x.map(limit_value), top, x.map(limit_value), bottom, "#d62728", 1.5,
                  "4 3");
        s += text(x.pix_hi - 4, top + 14, "m=" + std::to_string(m), "end");
        s += text(x.pix_lo - 8, 0.5 * (top + bottom), std::to_string(values.size()),
                  "end");
        ++panel;
    }
    for (double v : ticks_for(lo, hi)) {
        const double px = x.map(v);
        s += line(px, kHeight - kMargin, px, kHeight - kMargin + 4, "black");
        s += text(px, kHeight - kMargin + 18, value_label(v));
    }
    s += text(0.5 * (x.pix_lo + x.pix_hi), kHeight - 14, "F/m^2");
    s += "</svg>\n";
    return s;
}

std::string render_valley_profiles(const std::vector<ValleyFillProfiles>& profiles) {
    if (profiles.empty()) throw std::invalid_argument("render_valley_profiles: empty input");

    double hi = 0.0;
    std::size_t h = 0;
    for (const ValleyFillProfiles& p : profiles) {
        h = std::max({h, p.social_total.size(), p.base.size()});
        for (double v : p.social_total) hi = std::max(hi, v);
        for (double v : p.nash_total) hi = std::max(hi, v);
        for (double v : p.base) hi = std::max(hi, v);
    }
    if (h == 0) throw std::invalid_argument("render_valley_profiles: empty profiles");
    if (hi <= 0.0) hi = 1.0;

    const double panel_h = (kHeight - 2 * kMargin) / static_cast<double>(profiles.size());
    Axis x{0.0, static_cast<double>(h - 1), kMargin + 30.0, kWidth - kMargin};

    const auto polyline = [&](const std::vector<double>& v, const Axis& y,
                              const std::string& color) {
        std::string p = "<polyline fill=\"none\" stroke=\"" + color +
                        "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t t = 0; t < v.size(); ++t) {
            if (t) p += ' ';
            p += fmt(x.map(static_cast<double>(t))) + "," + fmt(y.map(v[t]));
        }
        return p + "\"/>\n";
    };

    std::string s = svg_open();
    for (std::size_t k = 0; k < profiles.size(); ++k) {
        const ValleyFillProfiles& p = profiles[k];
        const double top = kMargin + k * panel_h;
        const double bottom = top + panel_h - 24.0;
        Axis y{0.0, hi * 1.05, bottom, top};

        s += line(x.pix_lo, bottom, x.pix_hi, bottom, "black");
        s += line(x.pix_lo, top, x.pix_lo, bottom, "black");
        s += polyline(p.social_total, y, "#1f77b4");
        s += polyline(p.nash_total, y, "#d62728");
        s += polyline(p.base, y, "#2ca02c");
        s += text(x.pix_hi - 4, top + 14, "m=" + std::to_string(p.m), "end");

        if (k == 0) {
            const double lx = x.pix_lo + 12;
            s += line(lx, top + 10, lx + 24, top + 10, "#1f77b4", 1.5);
            s += text(lx + 30, top + 14, "social", "start");
            s += line(lx, top + 26, lx + 24, top + 26, "#d62728", 1.5);
            s += text(lx + 30, top + 30, "nash", "start");
            s += line(lx, top + 42, lx + 24, top + 42, "#2ca02c", 1.5);
            s += text(lx + 30, top + 46, "non-PEV", "start");
        }
    }
    for (std::size_t t = 0; t < h; ++t) {
        if (h > 16 && t % 2 == 1) continue;
        const double px = x.map(static_cast<double>(t));
        s += line(px, kHeight - kMargin, px, kHeight - kMargin + 4, "black");
        s += text(px, kHeight - kMargin + 18, std::to_string(t));
    }
    s += text(0.5 * (x.pix_lo + x.pix_hi), kHeight - 14, "t");
    s += "</svg>\n";
    return s;
}

}  // namespace chargegame
