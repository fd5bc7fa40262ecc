#pragma once

// Integral calculus against jumps. A function's domain splits at its singular
// points (breakpoints where the one-sided limits differ); on each run between
// them the closure of f is continuous, so it integrates classically, and the
// indefinite integral chains those pieces together with accumulated
// constants. The derivative of the result at a singular point merges f's two
// limits, which is the content of the jump-value hypothesis checked here.

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "numeric.hpp"
#include "piecewise.hpp"
#include "quadrature.hpp"
#include "specular1d.hpp"

namespace specular {

// Continuous extension of f over the closed run [a, b], where a and b are
// consecutive singular points (or domain endpoints): endpoint values come
// from the inward one-sided limits, interior breakpoints from the common
// two-sided limit.
inline std::function<double(double)> run_view(std::shared_ptr<const PiecewiseFunction> f,
                                              double a, double b) {
    double at_a = f->right_limit(a);
    double at_b = f->left_limit(b);
    return [f, a, b, at_a, at_b](double x) {
        if (x == a) return at_a;
        if (x == b) return at_b;
        if (f->breakpoint_index(x)) return f->midgap(x);
        double v = f->segments()[f->segment_index(x)].value(x);
        if (!std::isfinite(v)) throw undefined_at(x);
        return v;
    };
}

struct IndefiniteIntegral {
    PiecewiseFunction F;
    std::vector<double> singular;  // partition points: the jumps of f
    std::vector<double> constants; // F's value at the start of each run
};

// F(x) = integral of the run closures from lo to x. F(lo) = 0, F is
// continuous across the singular points, and each segment carries the run
// closure as its derivative callable.
inline IndefiniteIntegral indefinite_integral(const PiecewiseFunction& f) {
    auto fp = std::make_shared<const PiecewiseFunction>(f);
    std::vector<double> singular = fp->singular_points();

    std::vector<double> bounds;
    bounds.push_back(fp->lo());
    for (double s : singular) bounds.push_back(s);
    bounds.push_back(fp->hi());
    std::size_t runs = bounds.size() - 1;

    std::vector<double> constants(runs, 0.0);
    std::vector<SegmentFn> segs;
    std::vector<PointValue> values;
    for (std::size_t j = 0; j < runs; ++j) {
        auto view = run_view(fp, bounds[j], bounds[j + 1]);
        auto cum = std::make_shared<CumulativeIntegral>(view, bounds[j], kSegmentQuadTol);
        double base = constants[j];
        if (j + 1 < runs) constants[j + 1] = base + (*cum)(bounds[j + 1]);

        SegmentFn seg;
        seg.value = [cum, base](double x) { return (*cum)(x) + base; };
        seg.derivative = view;
        // When the run is exactly one segment of f, its body is F's slope.
        std::size_t lo_seg = fp->breakpoint_index(bounds[j])
                                 ? *fp->breakpoint_index(bounds[j]) + 1
                                 : 0;
        std::size_t hi_seg = fp->breakpoint_index(bounds[j + 1])
                                 ? *fp->breakpoint_index(bounds[j + 1])
                                 : fp->segments().size() - 1;
        if (lo_seg == hi_seg) seg.dexpr_text = fp->segments()[lo_seg].expr_text;
        segs.push_back(std::move(seg));

        if (j + 1 < runs) values.push_back(PointValue::defined(constants[j + 1]));
    }

    PiecewiseFunction F(fp->lo(), fp->hi(), singular, std::move(segs), std::move(values));
    return IndefiniteIntegral{std::move(F), std::move(singular), std::move(constants)};
}

// ---------------------------------------------------------------------------
// Jump-value hypothesis: at every singular point s the function's own value
// should be the merge combine_A(f[s+), f(s-]) of its one-sided limits. That
// is exactly the value the indefinite integral differentiates back to.

enum class H1Status { Satisfied, Violated, Assigned };

struct H1Record {
    double point = 0.0;
    double expected = 0.0;
    H1Status status = H1Status::Satisfied;
    std::optional<double> actual;
};

struct H1Report {
    bool ok = true; // no violations (assignments are fine)
    std::vector<H1Record> records;
};

inline H1Report check_H1(const PiecewiseFunction& f) {
    H1Report rep;
    for (std::size_t i = 0; i < f.breakpoints().size(); ++i) {
        if (!f.has_jump_at(i)) continue;
        const BreakpointLimits& lim = f.cached_limits(i);
        H1Record rec;
        rec.point = f.breakpoints()[i];
        rec.expected = combine_A(lim.right, lim.left);
        const PointValue& pv = f.breakpoint_values()[i];
        switch (pv.state) {
        case PointState::Defined:
            rec.actual = pv.value;
            rec.status = std::fabs(pv.value - rec.expected) <= kH1CompareTol
                             ? H1Status::Satisfied
                             : H1Status::Violated;
            break;
        case PointState::Unknown:
            rec.status = H1Status::Assigned;
            break;
        case PointState::Undefined:
            rec.status = H1Status::Violated;
            break;
        }
        if (rec.status == H1Status::Violated) rep.ok = false;
        rep.records.push_back(rec);
    }
    return rep;
}

// Fill every unknown jump value with its hypothesis value; defined and
// undefined points are left alone. Idempotent.
inline PiecewiseFunction apply_H1(const PiecewiseFunction& f) {
    std::vector<PointValue> values = f.breakpoint_values();
    for (std::size_t i = 0; i < f.breakpoints().size(); ++i) {
        if (values[i].state != PointState::Unknown) continue;
        if (!f.has_jump_at(i)) continue;
        const BreakpointLimits& lim = f.cached_limits(i);
        values[i] = PointValue::defined(combine_A(lim.right, lim.left));
    }
    return PiecewiseFunction(f.lo(), f.hi(), f.breakpoints(), f.segments(),
                             std::move(values));
}

struct FtcReport {
    bool ok = false;
    double start_value = 0.0;        // F(lo), should be 0
    double max_continuity_gap = 0.0; // across singular points
    double max_residual = 0.0;       // |F' - f| on the grid and at defined jumps
    std::vector<H1Record> h1;
};

inline FtcReport verify_ftc(const PiecewiseFunction& f, int grid_n = 128) {
    IndefiniteIntegral ii = indefinite_integral(f);
    FtcReport rep;
    rep.start_value = ii.F.eval(ii.F.lo());
    rep.h1 = check_H1(f).records;

    for (double s : ii.singular) {
        double gap = std::fabs(ii.F.right_limit(s) - ii.F.left_limit(s));
        gap = std::max(gap, std::fabs(ii.F.eval(s) - ii.F.midgap(s)));
        rep.max_continuity_gap = std::max(rep.max_continuity_gap, gap);
    }

    for (int i = 1; i <= grid_n; ++i) {
        double x = f.lo() + (f.hi() - f.lo()) * i / (grid_n + 1);
        if (!f.defined_at(x)) continue;
        if (ii.F.breakpoint_index(x)) continue;
        double r = std::fabs(specular_derivative(ii.F, x) - f.eval(x));
        rep.max_residual = std::max(rep.max_residual, r);
    }
    for (const H1Record& rec : rep.h1) {
        if (!rec.actual) continue;
        double r = std::fabs(specular_derivative(ii.F, rec.point) - *rec.actual);
        rep.max_residual = std::max(rep.max_residual, r);
    }

    rep.ok = std::fabs(rep.start_value) <= kH1CompareTol &&
             rep.max_continuity_gap <= kH1CompareTol &&
             rep.max_residual <= kFtcResidualTol;
    return rep;
}

} // namespace specular
