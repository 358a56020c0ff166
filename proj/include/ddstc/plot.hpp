// plot.hpp - self-contained SVG rendering of BER curves and SNR surfaces.

#pragma once

#include "ddstc/analysis.hpp"
#include "ddstc/harness.hpp"

#include <iosfwd>
#include <span>
#include <vector>

namespace ddstc::plot {

/// Decade exponents covering [lo, hi] (both > 0): floor(log10 lo) .. ceil(log10 hi).
std::vector<int> log_decades(double lo, double hi);

/// Maps a value onto pixel rows; decades are evenly spaced.
struct LogAxis {
    int lo_exp;
    int hi_exp;
    double top_px;
    double bottom_px;

    double to_px(double value) const;
};

/// BER vs P/N0 on a log axis, one polyline per (scheme, tau); zero-BER
/// points are omitted. Throws std::invalid_argument on empty input.
void write_ber_svg(std::ostream& os, std::span<const harness::BerPoint> points);

/// gamma[n] in dB against n, one line per tau row (rows at multiples of
/// 0.1 Ts when the grid is denser). Throws std::invalid_argument on empty input.
void write_surface_svg(std::ostream& os, const analysis::SnrSurface& surface);

/// Parses the surface CSV back into a grid (used by the `plot` command).
analysis::SnrSurface read_surface_csv(std::istream& is);

} // namespace ddstc::plot
