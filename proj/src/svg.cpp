#include "polysense/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "polysense/csv.hpp"
#include "polysense/errors.hpp"

namespace polysense::svg {

namespace {

constexpr int kWidth = 640, kHeight = 420;
constexpr int kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                         "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

struct Range {
    double lo = 0.0, hi = 1.0;
    void extend(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void pad() {
        if (hi - lo < 1e-12) {
            lo -= 1.0;
            hi += 1.0;
        }
        double m = 0.05 * (hi - lo);
        lo -= m;
        hi += m;
    }
};

std::string esc(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else if (c == '&') out += "&amp;";
        else out += c;
    }
    return out;
}

void open_doc(std::ofstream& out, const std::string& title, const std::string& y_label) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"15\">"
        << esc(title) << "</text>\n";
    out << "<text x=\"16\" y=\"" << kHeight / 2
        << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << kHeight / 2 << ")\">"
        << esc(y_label) << "</text>\n";
}

}  // namespace

void write_line_chart(const std::string& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<Series>& series) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot open file for writing: " + path);

    Range rx, ry;
    bool any = false;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!any) {
                rx = {s.x[i], s.x[i]};
                ry = {s.y[i], s.y[i]};
                any = true;
            }
            rx.extend(s.x[i]);
            ry.extend(s.y[i]);
        }
    rx.pad();
    ry.pad();

    auto px = [&](double x) {
        return kLeft + (x - rx.lo) / (rx.hi - rx.lo) * (kWidth - kLeft - kRight);
    };
    auto py = [&](double y) {
        return kHeight - kBottom - (y - ry.lo) / (ry.hi - ry.lo) * (kHeight - kTop - kBottom);
    };

    open_doc(out, title, y_label);
    out << "<text x=\"" << (kLeft + kWidth - kRight) / 2 << "\" y=\"" << kHeight - 12
        << "\" text-anchor=\"middle\">" << esc(x_label) << "</text>\n";
    out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << kWidth - kLeft - kRight
        << "\" height=\"" << kHeight - kTop - kBottom << "\" fill=\"none\" stroke=\"#333\"/>\n";

    for (int t = 0; t <= 4; ++t) {
        double xv = rx.lo + t * (rx.hi - rx.lo) / 4.0;
        double yv = ry.lo + t * (ry.hi - ry.lo) / 4.0;
        out << "<text x=\"" << px(xv) << "\" y=\"" << kHeight - kBottom + 16
            << "\" text-anchor=\"middle\">" << csv::fmt(std::round(xv * 100.0) / 100.0)
            << "</text>\n";
        out << "<text x=\"" << kLeft - 6 << "\" y=\"" << py(yv) + 4
            << "\" text-anchor=\"end\">" << csv::fmt(std::round(yv * 1000.0) / 1000.0)
            << "</text>\n";
    }

    int ci = 0;
    for (const auto& s : series) {
        const char* color = kColors[ci % 8];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i)
            out << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
        out << "\"/>\n";
        out << "<text x=\"" << kWidth - kRight - 6 << "\" y=\"" << kTop + 16 + 16 * ci
            << "\" text-anchor=\"end\" fill=\"" << color << "\">" << esc(s.label) << "</text>\n";
        ++ci;
    }
    out << "</svg>\n";
}

void write_box_chart(const std::string& path, const std::string& title,
                     const std::string& y_label, const std::vector<Box>& boxes) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot open file for writing: " + path);

    Range ry;
    bool any = false;
    std::vector<std::vector<double>> sorted;
    for (const auto& b : boxes) {
        auto s = b.samples;
        std::sort(s.begin(), s.end());
        for (double v : s) {
            if (!any) {
                ry = {v, v};
                any = true;
            }
            ry.extend(v);
        }
        sorted.push_back(std::move(s));
    }
    ry.pad();

    auto py = [&](double y) {
        return kHeight - kBottom - (y - ry.lo) / (ry.hi - ry.lo) * (kHeight - kTop - kBottom);
    };
    auto quantile = [](const std::vector<double>& s, double q) {
        if (s.empty()) return 0.0;
        double pos = q * (s.size() - 1);
        std::size_t i = static_cast<std::size_t>(pos);
        double frac = pos - i;
        return i + 1 < s.size() ? s[i] * (1.0 - frac) + s[i + 1] * frac : s[i];
    };

    open_doc(out, title, y_label);
    out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << kWidth - kLeft - kRight
        << "\" height=\"" << kHeight - kTop - kBottom << "\" fill=\"none\" stroke=\"#333\"/>\n";
    for (int t = 0; t <= 4; ++t) {
        double yv = ry.lo + t * (ry.hi - ry.lo) / 4.0;
        out << "<text x=\"" << kLeft - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">"
            << csv::fmt(std::round(yv * 1000.0) / 1000.0) << "</text>\n";
    }
    if (ry.lo < 0.0 && ry.hi > 0.0)
        out << "<line x1=\"" << kLeft << "\" y1=\"" << py(0.0) << "\" x2=\"" << kWidth - kRight
            << "\" y2=\"" << py(0.0) << "\" stroke=\"#bbb\" stroke-dasharray=\"4 3\"/>\n";

    double slot = static_cast<double>(kWidth - kLeft - kRight) / std::max<std::size_t>(1, boxes.size());
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        const auto& s = sorted[i];
        if (s.empty()) continue;
        double cx = kLeft + slot * (i + 0.5);
        double w = 0.35 * slot;
        double q1 = quantile(s, 0.25), q2 = quantile(s, 0.5), q3 = quantile(s, 0.75);
        double lo = s.front(), hi = s.back();
        const char* color = kColors[i % 8];
        out << "<line x1=\"" << cx << "\" y1=\"" << py(lo) << "\" x2=\"" << cx << "\" y2=\""
            << py(hi) << "\" stroke=\"" << color << "\"/>\n";
        out << "<rect x=\"" << cx - w / 2 << "\" y=\"" << py(q3) << "\" width=\"" << w
            << "\" height=\"" << py(q1) - py(q3) << "\" fill=\"" << color
            << "\" fill-opacity=\"0.25\" stroke=\"" << color << "\"/>\n";
        out << "<line x1=\"" << cx - w / 2 << "\" y1=\"" << py(q2) << "\" x2=\"" << cx + w / 2
            << "\" y2=\"" << py(q2) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << cx << "\" y=\"" << kHeight - kBottom + 16
            << "\" text-anchor=\"middle\">" << esc(boxes[i].label) << "</text>\n";
    }
    out << "</svg>\n";
}

}  // namespace polysense::svg
