#pragma once

// Piecewise-defined real function on a closed interval [lo, hi]: open
// segments separated by interior breakpoints, plus an explicit value state at
// each breakpoint (defined / undefined / unknown). Segment bodies are
// callables, usually expression trees; each may carry a derivative callable
// for the analytic fast path.
//
// Construction verifies the shape and computes both one-sided limits at every
// breakpoint; those limits must exist finitely, and they are cached since the
// whole calculus is built on them.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "limits.hpp"
#include "numeric.hpp"

namespace specular {

enum class PointState { Defined, Undefined, Unknown };

struct PointValue {
    PointState state = PointState::Undefined;
    double value = 0.0;

    static PointValue defined(double v) { return {PointState::Defined, v}; }
    static PointValue undefined() { return {PointState::Undefined, 0.0}; }
    static PointValue unknown() { return {PointState::Unknown, 0.0}; }
};

struct SegmentFn {
    std::function<double(double)> value;
    std::function<double(double)> derivative; // may be empty
    std::string expr_text;                    // empty when callable-backed
    std::string dexpr_text;
    // Set when the body (resp. derivative) contains sgn: endpoint evaluation
    // then cannot stand in for a one-sided limit.
    bool value_limit_risk = false;
    bool deriv_limit_risk = false;
};

struct BreakpointLimits {
    double left = 0.0;  // limit into the segment on the left of the breakpoint
    double right = 0.0; // limit into the segment on the right
};

class PiecewiseFunction {
public:
    PiecewiseFunction(double lo, double hi, std::vector<double> breakpoints,
                      std::vector<SegmentFn> segments,
                      std::vector<PointValue> breakpoint_values)
        : lo_(lo), hi_(hi), breakpoints_(std::move(breakpoints)),
          segments_(std::move(segments)), values_(std::move(breakpoint_values)) {
        if (!(std::isfinite(lo_) && std::isfinite(hi_) && lo_ < hi_))
            throw ValidationError("domain must be a finite interval with lo < hi");
        for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
            double b = breakpoints_[i];
            if (!(b > lo_ && b < hi_))
                throw ValidationError("breakpoints must lie strictly inside the domain");
            if (i > 0 && !(breakpoints_[i - 1] < b))
                throw ValidationError("breakpoints must be strictly increasing");
        }
        if (segments_.size() != breakpoints_.size() + 1)
            throw ValidationError("segment count must be breakpoint count + 1");
        if (values_.size() != breakpoints_.size())
            throw ValidationError("one point value per breakpoint");
        for (const SegmentFn& s : segments_)
            if (!s.value) throw ValidationError("every segment needs a value callable");

        check_derivative_probes();

        limits_.resize(breakpoints_.size());
        for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
            double b = breakpoints_[i];
            limits_[i].left = limit_into_segment(i, b, -1);
            limits_[i].right = limit_into_segment(i + 1, b, +1);
        }
    }

    double lo() const { return lo_; }
    double hi() const { return hi_; }
    const std::vector<double>& breakpoints() const { return breakpoints_; }
    const std::vector<SegmentFn>& segments() const { return segments_; }
    const std::vector<PointValue>& breakpoint_values() const { return values_; }

    std::optional<std::size_t> breakpoint_index(double x) const {
        auto it = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), x);
        if (it != breakpoints_.end() && *it == x)
            return static_cast<std::size_t>(it - breakpoints_.begin());
        return std::nullopt;
    }

    // Index of the open segment containing x, for x not a breakpoint.
    std::size_t segment_index(double x) const {
        auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
        return static_cast<std::size_t>(it - breakpoints_.begin());
    }

    double segment_lo(std::size_t i) const { return i == 0 ? lo_ : breakpoints_[i - 1]; }
    double segment_hi(std::size_t i) const {
        return i == breakpoints_.size() ? hi_ : breakpoints_[i];
    }

    double eval(double x) const {
        if (!(x >= lo_ && x <= hi_)) throw out_of_domain(x, lo_, hi_);
        if (auto bi = breakpoint_index(x)) {
            const PointValue& pv = values_[*bi];
            if (pv.state == PointState::Defined) return pv.value;
            if (pv.state == PointState::Unknown)
                throw Error("UndefinedAt", {{"x", x}, {"state", std::string("unknown")}});
            throw undefined_at(x);
        }
        double v = segments_[segment_index(x)].value(x);
        if (!std::isfinite(v)) throw undefined_at(x);
        return v;
    }

    bool defined_at(double x) const {
        if (!(x >= lo_ && x <= hi_)) return false;
        if (auto bi = breakpoint_index(x)) return values_[*bi].state == PointState::Defined;
        return std::isfinite(segments_[segment_index(x)].value(x));
    }

    // One-sided limit at any x in the domain (side +1 from the right, valid
    // for x < hi; side -1 from the left, valid for x > lo).
    double one_sided_limit(double x, int side) const {
        if (side > 0) {
            if (!(x >= lo_ && x < hi_)) throw out_of_domain(x, lo_, hi_);
            if (auto bi = breakpoint_index(x)) return limits_[*bi].right;
            std::size_t s = x == lo_ ? 0 : segment_index(x);
            return limit_into_segment(s, x, +1);
        }
        if (!(x > lo_ && x <= hi_)) throw out_of_domain(x, lo_, hi_);
        if (auto bi = breakpoint_index(x)) return limits_[*bi].left;
        std::size_t s = x == hi_ ? segments_.size() - 1 : segment_index(x);
        return limit_into_segment(s, x, -1);
    }

    double right_limit(double x) const { return one_sided_limit(x, +1); }
    double left_limit(double x) const { return one_sided_limit(x, -1); }

    // Average of the two one-sided limits; at a domain endpoint the single
    // available limit.
    double midgap(double x) const {
        if (x == lo_) return right_limit(x);
        if (x == hi_) return left_limit(x);
        return 0.5 * (right_limit(x) + left_limit(x));
    }

    bool has_jump_at(std::size_t breakpoint_idx) const {
        const BreakpointLimits& L = limits_[breakpoint_idx];
        return std::fabs(L.right - L.left) > kJumpTol;
    }

    std::vector<double> singular_points() const {
        std::vector<double> out;
        for (std::size_t i = 0; i < breakpoints_.size(); ++i)
            if (has_jump_at(i)) out.push_back(breakpoints_[i]);
        return out;
    }

    const BreakpointLimits& cached_limits(std::size_t breakpoint_idx) const {
        return limits_[breakpoint_idx];
    }

    // Segment body restricted to its open interval, NaN outside: the sampling
    // view used by limit ladders and difference quotients, which must never
    // read across a breakpoint.
    std::function<double(double)> segment_view(std::size_t i) const {
        double a = segment_lo(i), b = segment_hi(i);
        std::function<double(double)> body = segments_[i].value;
        return [a, b, body = std::move(body)](double x) {
            if (!(x > a && x < b)) return std::nan("");
            return body(x);
        };
    }

    // One-sided limit of the segment's derivative callable at x; empty when
    // the segment has no derivative.
    std::optional<double> derivative_limit(std::size_t seg_idx, double x, int side) const {
        const SegmentFn& seg = segments_[seg_idx];
        if (!seg.derivative) return std::nullopt;
        if (!seg.deriv_limit_risk) {
            double v = seg.derivative(x);
            if (std::isfinite(v)) return v;
        }
        double a = segment_lo(seg_idx), b = segment_hi(seg_idx);
        auto view = [a, b, &seg](double t) {
            if (!(t > a && t < b)) return std::nan("");
            return seg.derivative(t);
        };
        double s = side > 0 ? 1.0 : -1.0;
        LimitOutcome r = extrapolated_limit([&](double h) { return view(x + s * h); });
        if (!r.converged) return std::nullopt;
        return r.value;
    }

    struct Extended {
        double lo = 0.0, hi = 0.0; // closed
        std::function<double(double)> value;
    };

    // Segment i with its endpoints filled in by the one-sided limits.
    Extended extended_segment(std::size_t i) const {
        Extended e;
        e.lo = segment_lo(i);
        e.hi = segment_hi(i);
        double at_lo = i == 0 ? limit_into_segment(0, lo_, +1) : limits_[i - 1].right;
        double at_hi = i == breakpoints_.size()
                           ? limit_into_segment(segments_.size() - 1, hi_, -1)
                           : limits_[i].left;
        std::function<double(double)> body = segments_[i].value;
        double a = e.lo, b = e.hi;
        e.value = [a, b, at_lo, at_hi, body = std::move(body)](double x) {
            if (x == a) return at_lo;
            if (x == b) return at_hi;
            double v = body(x);
            if (!std::isfinite(v)) throw undefined_at(x);
            return v;
        };
        return e;
    }

private:
    double lo_, hi_;
    std::vector<double> breakpoints_;
    std::vector<SegmentFn> segments_;
    std::vector<PointValue> values_;
    std::vector<BreakpointLimits> limits_;

    // Limit of segment seg_idx's body as x -> x0 from the given side, where
    // x0 is an endpoint of that segment. Endpoint evaluation is trusted when
    // finite and the body is free of discontinuous primitives; otherwise the
    // geometric ladder restricted to the open segment decides.
    double limit_into_segment(std::size_t seg_idx, double x0, int side) const {
        const SegmentFn& seg = segments_[seg_idx];
        if (!seg.value_limit_risk) {
            double v = seg.value(x0);
            if (std::isfinite(v)) return v;
        }
        auto view = segment_view(seg_idx);
        double s = side > 0 ? 1.0 : -1.0;
        LimitOutcome r = extrapolated_limit([&, s, x0](double h) { return view(x0 + s * h); });
        if (!r.converged) throw limit_diverges(x0, side);
        return r.value;
    }

    // A derivative callable must match a centered difference of the body at
    // five interior probes; this catches documents whose dexpr drifted from
    // their expr. The step refines before a probe rejects: a body that is
    // merely non-smooth near the probe (an integral of a kinked integrand)
    // converges under refinement, a drifted derivative does not. Probes
    // where either quantity fails to evaluate are skipped.
    void check_derivative_probes() const {
        for (std::size_t i = 0; i < segments_.size(); ++i) {
            const SegmentFn& seg = segments_[i];
            if (!seg.derivative) continue;
            double a = segment_lo(i), b = segment_hi(i);
            double w = b - a;
            double h0 = std::min(1e-5, w / 64.0);
            for (int p = 1; p <= 5; ++p) {
                double x = a + w * p / 6.0;
                double d = seg.derivative(x);
                if (!std::isfinite(d)) continue;
                bool agrees = false, evaluated = false;
                for (double h = h0; h >= h0 / 1024.0; h /= 32.0) {
                    double f1 = seg.value(x + h), f0 = seg.value(x - h);
                    if (!std::isfinite(f1) || !std::isfinite(f0)) continue;
                    evaluated = true;
                    double fd = (f1 - f0) / (2.0 * h);
                    if (std::fabs(d - fd) <= 1e-6 * (1.0 + std::fabs(d) + std::fabs(fd))) {
                        agrees = true;
                        break;
                    }
                }
                if (evaluated && !agrees)
                    throw ValidationError("derivative callable disagrees with difference quotient on segment " +
                                          std::to_string(i));
            }
        }
    }
};

} // namespace specular
