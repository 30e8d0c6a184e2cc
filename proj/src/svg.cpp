#include "epictrl/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace epictrl {

namespace {

constexpr double kWidth = 960.0;
constexpr double kHeight = 540.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 190.0; // legend column
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

std::string fixed(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string format_tick(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, std::fabs(v) >= 10.0 ? "%.0f" : "%.2f", v);
    return buf;
}

std::string escape(const std::string& s)
{
    std::string out;
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

// Round an axis maximum up to 1, 2 or 5 times a power of ten.
double nice_ceiling(double v)
{
    if (!(v > 0.0))
        return 1.0;
    const double base = std::pow(10.0, std::floor(std::log10(v)));
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (m * base >= v)
            return m * base;
    return 10.0 * base;
}

} // namespace

const std::string& restriction_color(Restriction r)
{
    static const std::array<std::string, kRestrictionCount> colors = {"#9ecae1", "#a1d99b",
                                                                      "#fdd835", "#fc9272"};
    return colors[static_cast<std::size_t>(code(r))];
}

std::string render_svg(const LineChart& chart)
{
    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;

    double x_min = chart.x.empty() ? 0.0 : chart.x.front();
    double x_max = chart.x.empty() ? 1.0 : chart.x.back();
    if (x_max <= x_min)
        x_max = x_min + 1.0;
    double y_max = 0.0;
    for (const auto& s : chart.series)
        for (double v : s.values)
            if (std::isfinite(v))
                y_max = std::max(y_max, v);
    y_max = nice_ceiling(y_max);

    auto px = [&](double x) { return kLeft + (x - x_min) / (x_max - x_min) * plot_w; };
    auto py = [&](double y) { return kTop + plot_h - y / y_max * plot_h; };

    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
        << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" fill=\"white\"/>\n"
        << "<text x=\"" << fixed(kLeft + plot_w / 2) << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"16\">" << escape(chart.title) << "</text>\n";

    for (const auto& band : chart.bands) {
        const double x0 = px(std::clamp(band.start, x_min, x_max));
        const double x1 = px(std::clamp(band.end, x_min, x_max));
        out << "<rect x=\"" << fixed(x0) << "\" y=\"" << fixed(kTop) << "\" width=\""
            << fixed(std::max(0.0, x1 - x0)) << "\" height=\"" << fixed(plot_h) << "\" fill=\""
            << band.color << "\" fill-opacity=\"0.35\"/>\n";
    }

    // axes and ticks
    out << "<g stroke=\"#333\" stroke-width=\"1\" fill=\"none\">\n"
        << "<line x1=\"" << fixed(kLeft) << "\" y1=\"" << fixed(kTop + plot_h) << "\" x2=\""
        << fixed(kLeft + plot_w) << "\" y2=\"" << fixed(kTop + plot_h) << "\"/>\n"
        << "<line x1=\"" << fixed(kLeft) << "\" y1=\"" << fixed(kTop) << "\" x2=\""
        << fixed(kLeft) << "\" y2=\"" << fixed(kTop + plot_h) << "\"/>\n"
        << "</g>\n<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
    for (int k = 0; k <= 5; ++k) {
        const double yv = y_max * k / 5.0;
        const double xv = x_min + (x_max - x_min) * k / 5.0;
        out << "<text x=\"" << fixed(kLeft - 6) << "\" y=\"" << fixed(py(yv) + 4)
            << "\" text-anchor=\"end\">" << format_tick(yv) << "</text>\n"
            << "<text x=\"" << fixed(px(xv)) << "\" y=\"" << fixed(kTop + plot_h + 16)
            << "\" text-anchor=\"middle\">" << format_tick(xv) << "</text>\n";
    }
    out << "<text x=\"" << fixed(kLeft + plot_w / 2) << "\" y=\"" << fixed(kHeight - 10)
        << "\" text-anchor=\"middle\">" << escape(chart.x_label) << "</text>\n"
        << "<text x=\"16\" y=\"" << fixed(kTop + plot_h / 2)
        << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << fixed(kTop + plot_h / 2)
        << ")\">" << escape(chart.y_label) << "</text>\n</g>\n";

    for (const auto& s : chart.series) {
        out << "<polyline fill=\"none\" stroke=\"" << s.color
            << "\" stroke-width=\"1.6\" points=\"";
        const std::size_t n = std::min(s.values.size(), chart.x.size());
        for (std::size_t k = 0; k < n; ++k)
            out << (k ? " " : "") << fixed(px(chart.x[k])) << ',' << fixed(py(s.values[k]));
        out << "\"><title>" << escape(s.label) << "</title></polyline>\n";
    }

    // legend
    const double lx = kLeft + plot_w + 16;
    double ly = kTop + 10;
    out << "<g class=\"legend\" font-family=\"sans-serif\" font-size=\"12\">\n";
    for (const auto& s : chart.series) {
        out << "<line x1=\"" << fixed(lx) << "\" y1=\"" << fixed(ly) << "\" x2=\"" << fixed(lx + 22)
            << "\" y2=\"" << fixed(ly) << "\" stroke=\"" << s.color << "\" stroke-width=\"3\"/>"
            << "<text x=\"" << fixed(lx + 28) << "\" y=\"" << fixed(ly + 4) << "\">"
            << escape(s.label) << "</text>\n";
        ly += 20;
    }
    for (const auto& [label, color] : chart.band_legend) {
        out << "<rect x=\"" << fixed(lx) << "\" y=\"" << fixed(ly - 7) << "\" width=\"22\" "
            << "height=\"14\" fill=\"" << color << "\" fill-opacity=\"0.6\"/>"
            << "<text x=\"" << fixed(lx + 28) << "\" y=\"" << fixed(ly + 4) << "\">"
            << escape(label) << "</text>\n";
        ly += 20;
    }
    out << "</g>\n</svg>\n";
    return out.str();
}

LineChart trajectory_chart(const Trajectory& traj, const std::string& title)
{
    LineChart chart;
    chart.title = title;
    chart.x_label = "day";
    chart.y_label = "persons";
    const std::array<std::pair<const char*, const char*>, 6> names = {{
        {"Susceptible", "#1f77b4"},
        {"Exposed", "#ff7f0e"},
        {"Infected", "#2ca02c"},
        {"Recovered", "#d62728"},
        {"Deceased", "#9467bd"},
        {"Economy", "#8c564b"},
    }};
    for (const auto& [label, color] : names)
        chart.series.push_back({label, color, {}});
    for (const auto& rec : traj.days) {
        chart.x.push_back(rec.day);
        const auto& c = rec.state;
        const double values[] = {c.s, c.e, c.i, c.r, c.d, rec.economy};
        for (std::size_t k = 0; k < names.size(); ++k)
            chart.series[k].values.push_back(values[k]);
    }
    return chart;
}

LineChart policy_chart(const Trajectory& traj, const std::string& title)
{
    LineChart chart = trajectory_chart(traj, title);
    // row d + 1 carries the restriction in force over day d
    std::size_t k = 1;
    std::array<bool, kRestrictionCount> used{};
    while (k < traj.days.size()) {
        const Restriction r = traj.days[k].restriction;
        std::size_t end = k;
        while (end < traj.days.size() && traj.days[end].restriction == r)
            ++end;
        chart.bands.push_back({static_cast<double>(k - 1), static_cast<double>(end - 1),
                               restriction_color(r)});
        used[static_cast<std::size_t>(code(r))] = true;
        k = end;
    }
    for (Restriction r : kAllRestrictions)
        if (used[static_cast<std::size_t>(code(r))])
            chart.band_legend.emplace_back(std::string(name(r)), restriction_color(r));
    return chart;
}

} // namespace epictrl
