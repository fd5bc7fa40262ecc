#pragma once

// Deterministic SVG rendering of a piecewise function: one polyline per
// continuous run (segments merge across breakpoints without a jump), hollow
// markers for one-sided limit values that the function does not attain,
// filled markers for defined breakpoint values off the through-path, and
// optional phototangent / tangent-line overlays at a marked point.
//
// Output is byte-stable: fixed viewport, coordinates rounded to 2 decimals,
// no timestamps or generator tags.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "piecewise.hpp"
#include "specular1d.hpp"

namespace specular {

struct SvgOptions {
    int width = 800;
    int height = 600;
    int samples = 512;            // sample budget across the whole domain
    std::optional<double> mark_at; // draw phototangent and tangent line here
};

namespace detail {

struct SvgMarker {
    double x, y;
    bool filled;
};

inline std::string round2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    // Avoid the two encodings of zero.
    if (std::string(buf) == "-0.00") return "0.00";
    return buf;
}

} // namespace detail

inline std::string render_svg(const PiecewiseFunction& f, const SvgOptions& opt = {}) {
    double lo = f.lo(), hi = f.hi();
    double width = hi - lo;

    // Continuous runs: split only at jumps.
    std::vector<double> cuts;
    cuts.push_back(lo);
    for (double s : f.singular_points()) cuts.push_back(s);
    cuts.push_back(hi);

    std::vector<std::vector<std::pair<double, double>>> lines;  // function path
    std::vector<std::vector<std::pair<double, double>>> overlays; // phototangent, tangent
    std::vector<detail::SvgMarker> markers;

    for (std::size_t r = 0; r + 1 < cuts.size(); ++r) {
        std::vector<std::pair<double, double>> line;
        auto flush = [&]() {
            if (line.size() >= 2) lines.push_back(line);
            line.clear();
        };
        std::size_t seg_first = f.breakpoint_index(cuts[r])
                                    ? *f.breakpoint_index(cuts[r]) + 1
                                    : 0;
        std::size_t seg_last = f.breakpoint_index(cuts[r + 1])
                                   ? *f.breakpoint_index(cuts[r + 1])
                                   : f.segments().size() - 1;
        for (std::size_t si = seg_first; si <= seg_last; ++si) {
            double a = f.segment_lo(si), b = f.segment_hi(si);
            int m = std::max(2, static_cast<int>(opt.samples * (b - a) / width));
            for (int i = 0; i <= m; ++i) {
                double x = a + (b - a) * i / m;
                double y;
                if (i == 0)
                    y = f.one_sided_limit(a, +1);
                else if (i == m)
                    y = f.one_sided_limit(b, -1);
                else
                    y = f.segments()[si].value(x);
                if (!std::isfinite(y)) {
                    flush();
                    continue;
                }
                // Shared breakpoint sample: skip the duplicate join point.
                if (i == 0 && !line.empty() && line.back().first == x) continue;
                line.push_back({x, y});
            }
        }
        flush();
    }

    // Breakpoint markers: hollow for unattained limits, filled for a defined
    // value away from the limits.
    for (std::size_t i = 0; i < f.breakpoints().size(); ++i) {
        double x = f.breakpoints()[i];
        const BreakpointLimits& lim = f.cached_limits(i);
        const PointValue& pv = f.breakpoint_values()[i];
        bool jump = f.has_jump_at(i);
        bool defined = pv.state == PointState::Defined;
        auto attained = [&](double y) { return defined && std::fabs(pv.value - y) <= kJumpTol; };
        if (jump) {
            markers.push_back({x, lim.right, attained(lim.right)});
            markers.push_back({x, lim.left, attained(lim.left)});
            if (defined && !attained(lim.right) && !attained(lim.left))
                markers.push_back({x, pv.value, true});
        } else if (defined && !attained(lim.right)) {
            markers.push_back({x, lim.right, false});
            markers.push_back({x, pv.value, true});
        } else if (!defined) {
            markers.push_back({x, lim.right, false});
        }
    }

    std::size_t pht_polylines = 0; // leading entries of overlays; the rest is tangent
    if (opt.mark_at) {
        double x0 = *opt.mark_at;
        Phototangent p = phototangent(f, x0);
        if (std::fabs(p.right_value - p.left_value) <= kJumpTol) {
            overlays.push_back({{lo, p(lo)}, {x0, p.mid}, {hi, p(hi)}});
            pht_polylines = 1;
        } else {
            overlays.push_back({{lo, p(lo)}, {x0, p.left_value}});
            overlays.push_back({{x0, p.right_value}, {hi, p(hi)}});
            pht_polylines = 2;
        }
        markers.push_back({x0, p.mid, true});
        try {
            TangentLine t = specular_tangent_line(f, x0);
            overlays.push_back({{lo, t(lo)}, {hi, t(hi)}});
        } catch (const Error&) {
            // no tangent at this point; the phototangent still shows
        }
    }

    // Data bounds over everything drawn.
    double ylo = 0.0, yhi = 0.0;
    bool have_y = false;
    auto grow = [&](double y) {
        if (!std::isfinite(y)) return;
        if (!have_y) {
            ylo = yhi = y;
            have_y = true;
        } else {
            ylo = std::min(ylo, y);
            yhi = std::max(yhi, y);
        }
    };
    for (const auto& ln : lines)
        for (const auto& pt : ln) grow(pt.second);
    for (const auto& ln : overlays)
        for (const auto& pt : ln) grow(pt.second);
    for (const auto& mk : markers) grow(mk.y);
    if (!have_y) {
        ylo = -1.0;
        yhi = 1.0;
    }
    if (yhi - ylo < 1e-12) {
        ylo -= 1.0;
        yhi += 1.0;
    }

    double margin = 40.0;
    double sx = (opt.width - 2.0 * margin) / width;
    double sy = (opt.height - 2.0 * margin) / (yhi - ylo);
    auto px = [&](double x) { return margin + (x - lo) * sx; };
    auto py = [&](double y) { return opt.height - margin - (y - ylo) * sy; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width
        << "\" height=\"" << opt.height << "\" viewBox=\"0 0 " << opt.width << " "
        << opt.height << "\">\n";
    svg << "<rect width=\"" << opt.width << "\" height=\"" << opt.height
        << "\" fill=\"#ffffff\"/>\n";

    auto emit_polyline = [&](const std::vector<std::pair<double, double>>& pts,
                             const char* color, const char* dash) {
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"";
        if (dash[0] != '\0') svg << " stroke-dasharray=\"" << dash << "\"";
        svg << " points=\"";
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (i) svg << ' ';
            svg << detail::round2(px(pts[i].first)) << ',' << detail::round2(py(pts[i].second));
        }
        svg << "\"/>\n";
    };

    for (const auto& ln : lines) emit_polyline(ln, "#000000", "");
    for (std::size_t i = 0; i < overlays.size(); ++i) {
        bool is_tangent = i >= pht_polylines;
        emit_polyline(overlays[i], is_tangent ? "#ff4136" : "#0074d9",
                      is_tangent ? "6,4" : "");
    }

    for (const auto& mk : markers) {
        svg << "<circle cx=\"" << detail::round2(px(mk.x)) << "\" cy=\""
            << detail::round2(py(mk.y)) << "\" r=\"3.5\" stroke=\"#000000\" fill=\""
            << (mk.filled ? "#000000" : "#ffffff") << "\"/>\n";
    }

    svg << "</svg>\n";
    return svg.str();
}

} // namespace specular
