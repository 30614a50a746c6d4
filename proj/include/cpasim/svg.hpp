#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "dynamics.hpp"
#include "steady_solver.hpp"
#include "sweep.hpp"

namespace cpasim::svg {

inline std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", x);
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

inline std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

struct Axis {
    double lo = 0.0;
    double hi = 1.0;
    bool log = false;
    std::string label;

    /// Position of v along the axis in [0, 1].
    [[nodiscard]] double frac(double v) const {
        if (log) return (std::log10(v) - std::log10(lo)) / (std::log10(hi) - std::log10(lo));
        return (v - lo) / (hi - lo);
    }

    [[nodiscard]] std::vector<double> ticks() const {
        std::vector<double> t;
        if (log) {
            const int a = static_cast<int>(std::ceil(std::log10(lo) - 1e-9));
            const int b = static_cast<int>(std::floor(std::log10(hi) + 1e-9));
            const int stride = std::max(1, (b - a) / 8 + 1);
            for (int k = a; k <= b; k += stride) t.push_back(std::pow(10.0, k));
            return t;
        }
        const double span = hi - lo;
        const double raw = span / 6.0;
        const double mag = std::pow(10.0, std::floor(std::log10(raw)));
        double step = mag;
        for (double m : {1.0, 2.0, 5.0, 10.0})
            if (raw <= m * mag) {
                step = m * mag;
                break;
            }
        for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step)
            t.push_back(std::abs(v) < 1e-12 * span ? 0.0 : v);
        return t;
    }

    /// Linear axis padded around [a, b]; log axis spanning whole decades.
    static Axis fit(double a, double b, bool log, std::string label) {
        Axis ax;
        ax.log = log;
        ax.label = std::move(label);
        if (log) {
            ax.lo = std::pow(10.0, std::floor(std::log10(a)));
            ax.hi = std::pow(10.0, std::ceil(std::log10(b)));
            if (ax.hi <= ax.lo) ax.hi = ax.lo * 10.0;
        } else {
            if (!(b > a)) b = a + 1.0;
            const double pad = 0.04 * (b - a);
            ax.lo = a - pad;
            ax.hi = b + pad;
        }
        return ax;
    }
};

struct Style {
    std::string color = "#1f77b4";
    double width = 1.6;
    std::string dash;  ///< stroke-dasharray, empty for solid
};

/// One framed panel of a figure.
class Panel {
public:
    Panel(double x, double y, double w, double h, Axis ax, Axis ay, std::string title)
        : x_(x), y_(y), w_(w), h_(h), ax_(std::move(ax)), ay_(std::move(ay)), title_(std::move(title)) {}

    [[nodiscard]] double px(double v) const { return x_ + w_ * ax_.frac(v); }
    [[nodiscard]] double py(double v) const { return y_ + h_ * (1.0 - ay_.frac(v)); }

    void polyline(const std::vector<double>& xs, const std::vector<double>& ys, const Style& s) {
        if (xs.size() < 2) return;
        std::string pts;
        for (std::size_t i = 0; i < xs.size(); ++i) pts += num(px(xs[i])) + "," + num(py(ys[i])) + " ";
        body_ += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"" + num(s.width) + "\"" +
                 (s.dash.empty() ? "" : " stroke-dasharray=\"" + s.dash + "\"") + " points=\"" + pts + "\"/>\n";
    }

    /// Closed region between an upper and a lower boundary.
    void band(const std::vector<double>& xs, const std::vector<double>& lower, const std::vector<double>& upper,
              const std::string& fill) {
        if (xs.size() < 2) return;
        std::string pts;
        for (std::size_t i = 0; i < xs.size(); ++i) pts += num(px(xs[i])) + "," + num(py(upper[i])) + " ";
        for (std::size_t i = xs.size(); i-- > 0;) pts += num(px(xs[i])) + "," + num(py(lower[i])) + " ";
        body_ += "<polygon fill=\"" + fill + "\" stroke=\"none\" points=\"" + pts + "\"/>\n";
    }

    void circle(double x, double y, double r, const std::string& fill, const std::string& label = "") {
        body_ += "<circle cx=\"" + num(px(x)) + "\" cy=\"" + num(py(y)) + "\" r=\"" + num(r) + "\" fill=\"" + fill +
                 "\" stroke=\"black\" stroke-width=\"0.6\"/>\n";
        if (!label.empty())
            body_ += "<text x=\"" + num(px(x) + r + 3) + "\" y=\"" + num(py(y) - r - 2) +
                     "\" font-size=\"13\" font-weight=\"bold\">" + escape(label) + "</text>\n";
    }

    void triangle(double x, double y, double r, const std::string& fill) {
        const double cx = px(x), cy = py(y);
        body_ += "<polygon fill=\"" + fill + "\" stroke=\"black\" stroke-width=\"0.6\" points=\"" + num(cx) + "," +
                 num(cy - r) + " " + num(cx - r) + "," + num(cy + r) + " " + num(cx + r) + "," + num(cy + r) +
                 "\"/>\n";
    }

    void legend(const std::vector<std::pair<std::string, Style>>& entries) {
        double ly = y_ + 14;
        for (const auto& [text, s] : entries) {
            body_ += "<line x1=\"" + num(x_ + w_ - 120) + "\" y1=\"" + num(ly - 4) + "\" x2=\"" + num(x_ + w_ - 96) +
                     "\" y2=\"" + num(ly - 4) + "\" stroke=\"" + s.color + "\" stroke-width=\"" + num(s.width) +
                     "\"" + (s.dash.empty() ? "" : " stroke-dasharray=\"" + s.dash + "\"") + "/>\n";
            body_ += "<text x=\"" + num(x_ + w_ - 90) + "\" y=\"" + num(ly) + "\" font-size=\"11\">" + escape(text) +
                     "</text>\n";
            ly += 15;
        }
    }

    [[nodiscard]] const Axis& x_axis() const { return ax_; }
    [[nodiscard]] const Axis& y_axis() const { return ay_; }

    void render(std::ostream& os, std::size_t index) const {
        const std::string clip = "clip" + std::to_string(index);
        os << "<defs><clipPath id=\"" << clip << "\"><rect x=\"" << num(x_) << "\" y=\"" << num(y_) << "\" width=\""
           << num(w_) << "\" height=\"" << num(h_) << "\"/></clipPath></defs>\n";
        os << "<rect x=\"" << num(x_) << "\" y=\"" << num(y_) << "\" width=\"" << num(w_) << "\" height=\"" << num(h_)
           << "\" fill=\"white\" stroke=\"black\"/>\n";
        for (double t : ax_.ticks()) {
            const double X = px(t);
            os << "<line x1=\"" << num(X) << "\" y1=\"" << num(y_ + h_) << "\" x2=\"" << num(X) << "\" y2=\""
               << num(y_ + h_ + 5) << "\" stroke=\"black\"/>\n"
               << "<text x=\"" << num(X) << "\" y=\"" << num(y_ + h_ + 18) << "\" font-size=\"11\" text-anchor=\"middle\">"
               << tick_label(t) << "</text>\n";
        }
        for (double t : ay_.ticks()) {
            const double Y = py(t);
            os << "<line x1=\"" << num(x_ - 5) << "\" y1=\"" << num(Y) << "\" x2=\"" << num(x_) << "\" y2=\"" << num(Y)
               << "\" stroke=\"black\"/>\n"
               << "<text x=\"" << num(x_ - 8) << "\" y=\"" << num(Y + 4) << "\" font-size=\"11\" text-anchor=\"end\">"
               << tick_label(t) << "</text>\n";
        }
        os << "<text x=\"" << num(x_ + w_ / 2) << "\" y=\"" << num(y_ + h_ + 38)
           << "\" font-size=\"13\" text-anchor=\"middle\">" << escape(ax_.label) << "</text>\n";
        os << "<text transform=\"translate(" << num(x_ - 58) << "," << num(y_ + h_ / 2)
           << ") rotate(-90)\" font-size=\"13\" text-anchor=\"middle\">" << escape(ay_.label) << "</text>\n";
        os << "<text x=\"" << num(x_ + w_ / 2) << "\" y=\"" << num(y_ - 10)
           << "\" font-size=\"14\" text-anchor=\"middle\">" << escape(title_) << "</text>\n";
        os << "<g clip-path=\"url(#" << clip << ")\">\n" << body_ << "</g>\n";
    }

private:
    double x_, y_, w_, h_;
    Axis ax_, ay_;
    std::string title_;
    std::string body_;
};

inline void write_document(std::ostream& os, double width, double height, const std::vector<Panel>& panels) {
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\"" << num(height)
       << "\" viewBox=\"0 0 " << num(width) << " " << num(height) << "\" font-family=\"sans-serif\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (std::size_t i = 0; i < panels.size(); ++i) panels[i].render(os, i);
    os << "</svg>\n";
}

inline const std::vector<std::string>& palette() {
    static const std::vector<std::string> colors{"#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    return colors;
}

inline std::string dash_for(Stability s) {
    switch (s) {
    case Stability::Stable: return "";
    case Stability::Unstable: return "7,4";
    case Stability::Marginal: return "2,3";
    }
    return "";
}

/// One curve of a hysteresis figure.
struct HysteresisSeries {
    const HysteresisCurve* curve = nullptr;
    std::string legend;     ///< e.g. "Δ_TLS = 4.5"
    std::string cpa_label;  ///< label for the CPA dot, e.g. "A₁"
};

/// Output versus input intensity. Stable segments solid, unstable dashed,
/// folds as triangles, CPA points as labeled green dots.
inline void render_hysteresis(std::ostream& os, const std::vector<HysteresisSeries>& series, const std::string& title,
                              double flux_scale = 1.0) {
    double xmax = 0.0, ymax = 0.0;
    for (const auto& s : series)
        for (const auto& p : s.curve->points) {
            xmax = std::max(xmax, p.input_intensity);
            if (std::isfinite(p.output_intensity)) ymax = std::max(ymax, p.output_intensity);
        }
    Panel panel(90, 50, 620, 420, Axis::fit(0.0, flux_scale * xmax, false, "input intensity"),
                Axis::fit(0.0, flux_scale * ymax, false, "output intensity"), title);

    std::vector<std::pair<std::string, Style>> legend;
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& c = *series[k].curve;
        const std::string color = palette()[k % palette().size()];
        std::map<int, std::vector<const CurvePoint*>> branches;
        for (const auto& p : c.points) branches[p.branch_id].push_back(&p);
        for (auto& [id, pts] : branches) {
            std::size_t i = 0;
            while (i < pts.size()) {
                std::size_t j = i;
                while (j + 1 < pts.size() && pts[j + 1]->stability == pts[i]->stability) ++j;
                // Extend one node into the next segment so the branch stays connected.
                const std::size_t end = std::min(j + 1, pts.size() - 1);
                std::vector<double> xs, ys;
                for (std::size_t m = i; m <= end; ++m) {
                    xs.push_back(flux_scale * pts[m]->input_intensity);
                    ys.push_back(flux_scale * pts[m]->output_intensity);
                }
                if (xs.size() == 1) {
                    panel.circle(xs[0], ys[0], 1.2, color);
                } else {
                    panel.polyline(xs, ys, {color, 1.6, dash_for(pts[i]->stability)});
                }
                i = j + 1;
            }
        }
        for (const auto& f : c.folds)
            if (f.kind == FoldKind::SaddleNode && std::isfinite(f.output_intensity))
                panel.triangle(flux_scale * f.input_intensity, flux_scale * f.output_intensity, 5.0, color);
        for (const auto& m : c.cpa_markers)
            panel.circle(flux_scale * m.input_intensity, flux_scale * m.output_intensity, 5.5, "#2ca02c",
                         series[k].cpa_label + (m.stability == Stability::Stable ? "" : " (unstable)"));
        legend.push_back({series[k].legend, {color, 1.6, ""}});
    }
    legend.push_back({"stable", {"#444444", 1.4, ""}});
    legend.push_back({"unstable", {"#444444", 1.4, dash_for(Stability::Unstable)}});
    panel.legend(legend);
    write_document(os, 760, 540, {panel});
}

/// Critical coupling and critical detuning against beta, with the
/// CPA-feasible side of each boundary shaded.
inline void render_boundary(std::ostream& os, const BoundaryMap& m, double rate_scale = 1.0) {
    std::vector<double> b, gc, dc_b, dc;
    for (std::size_t i = 0; i < m.beta.size(); ++i) {
        b.push_back(rate_scale * m.beta[i]);
        gc.push_back(rate_scale * m.g_c_curve[i]);
        if (m.delta_c_exists[i] && m.delta_c_curve[i] > 0.0) {
            dc_b.push_back(rate_scale * m.beta[i]);
            dc.push_back(rate_scale * m.delta_c_curve[i]);
        }
    }
    const double gfix = rate_scale * m.g_fixed;
    const double dfix = rate_scale * std::abs(m.delta_tls_fixed);
    const double gtop = std::max(*std::max_element(gc.begin(), gc.end()), gfix) * 1.15;
    double dtop = dfix;
    for (double v : dc) dtop = std::max(dtop, v);
    dtop = std::max(dtop * 1.15, 1e-12);

    const Axis xb = Axis::fit(b.front(), b.back(), true, "β");
    Panel pg(90, 50, 420, 360, xb, Axis{0.0, gtop, false, "g_c"}, "critical coupling at Δ_TLS = " + tick_label(dfix));
    pg.band(b, gc, std::vector<double>(b.size(), gtop), "#add8e6");
    pg.polyline(b, gc, {"#1f77b4", 2.0, ""});
    pg.polyline({b.front(), b.back()}, {gfix, gfix}, {"#d62728", 1.4, "6,4"});
    pg.legend({{"g_c(β)", {"#1f77b4", 2.0, ""}}, {"g = " + tick_label(gfix), {"#d62728", 1.4, "6,4"}}});

    Panel pd(600, 50, 420, 360, xb, Axis{0.0, dtop, false, "Δ_TLS^c"}, "critical detuning at g = " + tick_label(gfix));
    if (dc_b.size() >= 2) {
        pd.band(dc_b, std::vector<double>(dc_b.size(), 0.0), dc, "#add8e6");
        pd.polyline(dc_b, dc, {"#1f77b4", 2.0, ""});
    }
    pd.polyline({b.front(), b.back()}, {dfix, dfix}, {"#d62728", 1.4, "6,4"});
    pd.legend({{"Δ_TLS^c(β)", {"#1f77b4", 2.0, ""}}, {"Δ_TLS = " + tick_label(dfix), {"#d62728", 1.4, "6,4"}}});
    write_document(os, 1080, 470, {pg, pd});
}

/// Photon number and output intensity against time, one color per trace,
/// on logarithmic intensity axes.
inline void render_traces(std::ostream& os, const std::vector<TimeTrace>& traces, const std::string& title,
                          double gamma = 1.0) {
    double tmax = 0.0, nmax = 0.0, omax = 0.0;
    for (const auto& t : traces) {
        if (!t.times.empty()) tmax = std::max(tmax, t.times.back() / gamma);
        for (double v : t.n_c) nmax = std::max(nmax, v);
        for (double v : t.out_intensity) omax = std::max(omax, gamma * v);
    }
    const double nfloor = std::max(nmax, 1e-300) * 1e-12;
    const double ofloor = std::max(omax, 1e-300) * 1e-12;
    Panel pn(90, 50, 620, 260, Axis::fit(0.0, tmax, false, "t"), Axis::fit(nfloor, std::max(nmax, nfloor * 10), true, "n_c"),
             title);
    Panel po(90, 380, 620, 260, Axis::fit(0.0, tmax, false, "t"),
             Axis::fit(ofloor, std::max(omax, ofloor * 10), true, "output intensity"), "");
    std::vector<std::pair<std::string, Style>> legend;
    for (std::size_t k = 0; k < traces.size(); ++k) {
        const auto& t = traces[k];
        const Style s{palette()[k % palette().size()], 1.2, ""};
        // Thin long traces to about 4000 vertices per panel.
        const std::size_t stride = std::max<std::size_t>(1, t.times.size() / 4000);
        std::vector<double> xs, ns, os_;
        for (std::size_t i = 0; i < t.times.size(); i += stride) {
            xs.push_back(t.times[i] / gamma);
            ns.push_back(std::max(t.n_c[i], nfloor));
            os_.push_back(std::max(gamma * t.out_intensity[i], ofloor));
        }
        pn.polyline(xs, ns, s);
        po.polyline(xs, os_, s);
        legend.push_back({"δ = " + tick_label(gamma * t.delta), s});
    }
    pn.legend(legend);
    write_document(os, 760, 700, {pn, po});
}

} // namespace cpasim::svg
