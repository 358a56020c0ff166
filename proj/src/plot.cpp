#include "ddstc/plot.hpp"

#include "ddstc/config.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>

namespace ddstc::plot {

namespace {

constexpr double width = 720.0;
constexpr double height = 480.0;
constexpr double left = 70.0;
constexpr double right = 180.0;
constexpr double top = 30.0;
constexpr double bottom = 50.0;

constexpr std::array<const char*, 8> palette{"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                             "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

const char* dash_for(harness::Scheme s)
{
    switch (s) {
    case harness::Scheme::proposed: return "";
    case harness::Scheme::conventional: return " stroke-dasharray=\"6,4\"";
    case harness::Scheme::coherent: return " stroke-dasharray=\"2,3\"";
    }
    return "";
}

struct LinearAxis {
    double lo, hi, px_lo, px_hi;
    double to_px(double v) const { return hi == lo ? px_lo : px_lo + (v - lo) / (hi - lo) * (px_hi - px_lo); }
};

void header(std::ostream& os)
{
    os << fmt::format("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" "
                      "viewBox=\"0 0 {:.0f} {:.0f}\" font-family=\"sans-serif\" font-size=\"12\">\n",
                      width, height, width, height);
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

void frame(std::ostream& os)
{
    os << fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"none\" "
                      "stroke=\"black\"/>\n",
                      left, top, width - left - right, height - top - bottom);
}

void x_ticks(std::ostream& os, const LinearAxis& ax, double step)
{
    const double first = std::ceil(ax.lo / step) * step;
    for (double v = first; v <= ax.hi + 1e-9; v += step) {
        const double x = ax.to_px(v);
        os << fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"#dddddd\"/>\n", x,
                          top, x, height - bottom);
        os << fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{:g}</text>\n", x,
                          height - bottom + 16.0, v);
    }
}

double nice_step(double span)
{
    if (span <= 0.0) {
        return 1.0;
    }
    const double raw = span / 8.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
        if (raw <= m * mag) {
            return m * mag;
        }
    }
    return 10.0 * mag;
}

} // namespace

std::vector<int> log_decades(double lo, double hi)
{
    if (!(lo > 0.0) || !(hi >= lo)) {
        throw std::invalid_argument("log_decades: need 0 < lo <= hi");
    }
    const int a = static_cast<int>(std::floor(std::log10(lo) + 1e-12));
    int b = static_cast<int>(std::ceil(std::log10(hi) - 1e-12));
    if (b == a) {
        ++b;
    }
    std::vector<int> out;
    for (int e = a; e <= b; ++e) {
        out.push_back(e);
    }
    return out;
}

double LogAxis::to_px(double value) const
{
    const double frac = (std::log10(value) - lo_exp) / static_cast<double>(hi_exp - lo_exp);
    return bottom_px - frac * (bottom_px - top_px);
}

void write_ber_svg(std::ostream& os, std::span<const harness::BerPoint> points)
{
    if (points.empty()) {
        throw std::invalid_argument("plot: no BER points");
    }
    std::map<std::pair<int, long long>, std::vector<harness::BerPoint>> series;
    double xmin = points.front().p_over_n0_db;
    double xmax = xmin;
    double ymin = 1.0;
    double ymax = 0.0;
    for (const auto& p : points) {
        series[{static_cast<int>(p.scheme), std::llround(p.tau * 1e6)}].push_back(p);
        xmin = std::min(xmin, p.p_over_n0_db);
        xmax = std::max(xmax, p.p_over_n0_db);
        if (p.ber > 0.0) {
            ymin = std::min(ymin, p.ber);
            ymax = std::max(ymax, p.ber);
        }
    }
    if (ymax <= 0.0) {
        ymin = 1e-6;
        ymax = 1.0;
    }
    const auto decades = log_decades(ymin, ymax);
    const LogAxis yax{decades.front(), decades.back(), top, height - bottom};
    const LinearAxis xax{xmin, xmax, left, width - right};

    header(os);
    for (int e : decades) {
        const double y = yax.to_px(std::pow(10.0, e));
        os << fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"#dddddd\"/>\n",
                          left, y, width - right, y);
        os << fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">1e{}</text>\n", left - 6.0,
                          y + 4.0, e);
    }
    x_ticks(os, xax, nice_step(xmax - xmin));
    frame(os);
    os << fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">P/N0 (dB)</text>\n",
                      (left + width - right) / 2.0, height - 12.0);
    os << fmt::format("<text x=\"16\" y=\"{:.2f}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.2f})\">"
                      "BER</text>\n",
                      (top + height - bottom) / 2.0, (top + height - bottom) / 2.0);

    std::size_t idx = 0;
    for (auto& [key, pts] : series) {
        std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.p_over_n0_db < b.p_over_n0_db; });
        const char* color = palette[idx % palette.size()];
        std::string path;
        for (const auto& p : pts) {
            if (p.ber <= 0.0) {
                continue;
            }
            path += fmt::format("{}{:.2f},{:.2f}", path.empty() ? "" : " ", xax.to_px(p.p_over_n0_db),
                                yax.to_px(p.ber));
        }
        const auto scheme = pts.front().scheme;
        if (!path.empty()) {
            os << fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"{}/>\n", path,
                              color, dash_for(scheme));
        }
        for (const auto& p : pts) {
            if (p.ber > 0.0) {
                os << fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3\" fill=\"{}\"/>\n",
                                  xax.to_px(p.p_over_n0_db), yax.to_px(p.ber), color);
            }
        }
        const double ly = top + 14.0 + 18.0 * static_cast<double>(idx);
        os << fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"{}\" "
                          "stroke-width=\"1.5\"{}/>\n",
                          width - right + 10.0, ly, width - right + 34.0, ly, color, dash_for(scheme));
        os << fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\">{} tau={:g}</text>\n", width - right + 40.0, ly + 4.0,
                          harness::to_string(scheme), pts.front().tau);
        ++idx;
    }
    os << "</svg>\n";
}

void write_surface_svg(std::ostream& os, const analysis::SnrSurface& surface)
{
    if (surface.taus.empty() || surface.gamma_db.empty()) {
        throw std::invalid_argument("plot: empty SNR surface");
    }
    std::vector<std::size_t> rows;
    for (std::size_t t = 0; t < surface.taus.size(); ++t) {
        const double tenth = surface.taus[t] * 10.0;
        if (surface.taus.size() <= 11 || std::abs(tenth - std::round(tenth)) < 1e-9) {
            rows.push_back(t);
        }
    }
    const auto [mn, mx] = std::minmax_element(surface.gamma_db.begin(), surface.gamma_db.end());
    double ylo = std::floor(*mn);
    double yhi = std::ceil(*mx);
    if (yhi == ylo) {
        yhi += 1.0;
    }
    const LinearAxis xax{0.0, static_cast<double>(surface.subcarriers() - 1), left, width - right};
    const LinearAxis yax{ylo, yhi, height - bottom, top};

    header(os);
    const double ystep = nice_step(yhi - ylo);
    for (double v = std::ceil(ylo / ystep) * ystep; v <= yhi + 1e-9; v += ystep) {
        const double y = yax.to_px(v);
        os << fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"#dddddd\"/>\n",
                          left, y, width - right, y);
        os << fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{:g}</text>\n", left - 6.0, y + 4.0,
                          v);
    }
    x_ticks(os, xax, nice_step(xax.hi));
    frame(os);
    os << fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">subcarrier n</text>\n",
                      (left + width - right) / 2.0, height - 12.0);
    os << fmt::format("<text x=\"16\" y=\"{:.2f}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.2f})\">"
                      "gamma (dB)</text>\n",
                      (top + height - bottom) / 2.0, (top + height - bottom) / 2.0);

    for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::size_t t = rows[i];
        const char* color = palette[i % palette.size()];
        std::string path;
        for (std::size_t n = 0; n < surface.subcarriers(); ++n) {
            path += fmt::format("{}{:.2f},{:.2f}", n ? " " : "", xax.to_px(static_cast<double>(n)),
                                yax.to_px(surface.at(t, n)));
        }
        os << fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>\n", path,
                          color);
        const double ly = top + 14.0 + 18.0 * static_cast<double>(i);
        os << fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"{}\" "
                          "stroke-width=\"1.5\"/>\n",
                          width - right + 10.0, ly, width - right + 34.0, ly, color);
        os << fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\">tau={:g}</text>\n", width - right + 40.0, ly + 4.0,
                          surface.taus[t]);
    }
    os << "</svg>\n";
}

analysis::SnrSurface read_surface_csv(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line) || line != "n,tau_over_Ts,gamma_db") {
        throw harness::IoError("surface CSV: missing or unexpected header");
    }
    std::map<double, std::map<std::size_t, double>> grid;
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 == std::string::npos ? c1 : c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos) {
            throw harness::IoError(fmt::format("surface CSV line {}: expected 3 fields", line_no));
        }
        std::size_t n = 0;
        double tau = 0.0;
        double g = 0.0;
        const char* b = line.data();
        const bool ok = std::from_chars(b, b + c1, n).ec == std::errc{}
                        && std::from_chars(b + c1 + 1, b + c2, tau).ec == std::errc{}
                        && std::from_chars(b + c2 + 1, b + line.size(), g).ec == std::errc{};
        if (!ok) {
            throw harness::IoError(fmt::format("surface CSV line {}: bad number", line_no));
        }
        grid[tau][n] = g;
    }
    if (grid.empty()) {
        throw harness::IoError("surface CSV: no rows");
    }
    analysis::SnrSurface s;
    s.config.subcarriers = grid.begin()->second.size();
    s.config.tau_points = grid.size();
    for (const auto& [tau, row] : grid) {
        if (row.size() != s.config.subcarriers) {
            throw harness::IoError("surface CSV: ragged grid");
        }
        s.taus.push_back(tau);
        for (const auto& [n, g] : row) {
            s.gamma_db.push_back(g);
        }
    }
    return s;
}

} // namespace ddstc::plot
