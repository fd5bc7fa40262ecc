#pragma once

// One-dimensional specular differentiation.
//
// The central object is the pair of semi-derivatives at a point: the right
// slope alpha measured against the right limit f[x0+) and the left slope beta
// against f(x0-]. They merge into one number through combine_A, the slope of
// the chord that the phototangent cuts on a unit circle centered at the
// midgap point. combine_A(a, a) = a, so the notion extends the classical
// derivative.

#include <cmath>
#include <functional>
#include <utility>

#include "errors.hpp"
#include "limits.hpp"
#include "numeric.hpp"
#include "piecewise.hpp"

namespace specular {

// Merge of two one-sided slopes. Exact form (a*b - 1 + sqrt((a^2+1)(b^2+1)))
// / (a + b) loses digits when a + b nearly cancels, so a half-angle form
// takes over there, and an (approximately) exact cancellation returns the
// true limiting value 0.
inline double combine_A(double a, double b) {
    double s = a + b;
    double scale = 1.0 + std::fabs(a) + std::fabs(b);
    if (std::fabs(s) < kCombineZeroRel * scale) return 0.0;
    if (std::fabs(s) < kCombineAngleSwitch * scale)
        return std::tan(0.5 * (std::atan(a) + std::atan(b)));
    return (a * b - 1.0 + std::sqrt((a * a + 1.0) * (b * b + 1.0))) / s;
}

struct SemiPair {
    double right = 0.0; // alpha
    double left = 0.0;  // beta
};

// ---------------------------------------------------------------------------
// Callable-level engine. Used directly for derived functions (higher-order
// chains) and axis sections; the piecewise overloads below add segment
// awareness and the analytic fast paths.

namespace detail {

inline std::function<double(double)> swallow_errors(std::function<double(double)> g) {
    return [g = std::move(g)](double x) {
        try {
            return g(x);
        } catch (const Error&) {
            return std::nan("");
        }
    };
}

} // namespace detail

// One-sided limit of a bare callable. Never trusts g(x0): a callable can be
// defined at x0 with a different value than its limit.
inline LimitOutcome callable_one_sided_limit(const std::function<double(double)>& g,
                                             double x0, int side,
                                             double h0 = kLimitH0,
                                             double accept_rel = kLimitAcceptRel) {
    auto safe = detail::swallow_errors(g);
    double s = side > 0 ? 1.0 : -1.0;
    return extrapolated_limit([&, s, x0](double h) { return safe(x0 + s * h); }, h0,
                              kLimitMaxHalvings, accept_rel);
}

inline LimitOutcome callable_semi(const std::function<double(double)>& g, double x0,
                                  int side, double base, double h0 = kLimitH0,
                                  double accept_rel = kLimitAcceptRel) {
    auto safe = detail::swallow_errors(g);
    double s = side > 0 ? 1.0 : -1.0;
    return extrapolated_limit(
        [&, s, x0, base](double h) { return (safe(x0 + s * h) - base) / (s * h); }, h0,
        kLimitMaxHalvings, accept_rel);
}

// Specular derivative of a bare callable. level tags errors when this runs
// inside a higher-order chain.
inline double callable_specular_derivative(const std::function<double(double)>& g,
                                           double x0, double h0 = kLimitH0,
                                           double accept_rel = kLimitAcceptRel,
                                           long long level = 1) {
    auto fail = [&](const char* reason) {
        return Error("NotSpecularlyDifferentiable",
                     {{"x0", x0}, {"level", level}, {"reason", std::string(reason)}});
    };
    LimitOutcome r = callable_one_sided_limit(g, x0, +1, h0, accept_rel);
    LimitOutcome l = callable_one_sided_limit(g, x0, -1, h0, accept_rel);
    if (!r.converged || !l.converged) throw fail("divergent-side");
    if (std::fabs(r.value - l.value) > kJumpTol) throw fail("jump");
    LimitOutcome a = callable_semi(g, x0, +1, r.value, h0, accept_rel);
    LimitOutcome b = callable_semi(g, x0, -1, l.value, h0, accept_rel);
    if (!a.converged || !b.converged) throw fail("divergent-side");
    return combine_A(a.value, b.value);
}

// ---------------------------------------------------------------------------
// Piecewise engine.

// Semi-derivative on one side: slope of f against its one-sided limit,
// sampled inside the adjacent open segment only. A derivative callable on
// that segment short-circuits the quotient ladder.
inline double semi_derivative(const PiecewiseFunction& f, double x0, int side,
                              double h0 = kLimitH0) {
    double base = f.one_sided_limit(x0, side); // throws when x0/side invalid or no limit

    std::size_t seg;
    if (auto bi = f.breakpoint_index(x0))
        seg = side > 0 ? *bi + 1 : *bi;
    else if (x0 == f.lo())
        seg = 0;
    else if (x0 == f.hi())
        seg = f.segments().size() - 1;
    else
        seg = f.segment_index(x0);

    if (auto d = f.derivative_limit(seg, x0, side)) return *d;

    auto view = f.segment_view(seg);
    double s = side > 0 ? 1.0 : -1.0;
    LimitOutcome q = extrapolated_limit(
        [&, s, x0, base](double h) { return (view(x0 + s * h) - base) / (s * h); }, h0);
    if (!q.converged) throw semi_derivative_diverges(x0, side);
    return q.value;
}

inline double semi_derivative_right(const PiecewiseFunction& f, double x0) {
    return semi_derivative(f, x0, +1);
}
inline double semi_derivative_left(const PiecewiseFunction& f, double x0) {
    return semi_derivative(f, x0, -1);
}

inline SemiPair semi_pair(const PiecewiseFunction& f, double x0) {
    return {semi_derivative(f, x0, +1), semi_derivative(f, x0, -1)};
}

namespace detail {

// Shared preparation for the interior routes: both one-sided limits, the
// no-jump requirement, both semi-derivatives. Failures become the derivative
// error with its reason.
struct InteriorParts {
    double right_limit, left_limit, mid;
    SemiPair semi;
};

inline InteriorParts interior_parts(const PiecewiseFunction& f, double x0) {
    InteriorParts p{};
    try {
        p.right_limit = f.right_limit(x0);
        p.left_limit = f.left_limit(x0);
    } catch (const Error& e) {
        if (e.kind() == "LimitDiverges")
            throw not_specularly_differentiable(x0, "divergent-side");
        throw;
    }
    if (std::fabs(p.right_limit - p.left_limit) > kJumpTol)
        throw not_specularly_differentiable(x0, "jump");
    p.mid = 0.5 * (p.right_limit + p.left_limit);
    try {
        p.semi.right = semi_derivative(f, x0, +1);
        p.semi.left = semi_derivative(f, x0, -1);
    } catch (const Error& e) {
        if (e.kind() == "SemiDerivativeDiverges")
            throw not_specularly_differentiable(x0, "divergent-side");
        throw;
    }
    return p;
}

inline double endpoint_semi(const PiecewiseFunction& f, double x0) {
    int side = x0 == f.lo() ? +1 : -1;
    try {
        return semi_derivative(f, x0, side);
    } catch (const Error& e) {
        if (e.kind() == "SemiDerivativeDiverges" || e.kind() == "LimitDiverges")
            throw not_specularly_differentiable(x0, "divergent-side");
        throw;
    }
}

} // namespace detail

// At interior points the specular derivative requires equal one-sided limits
// and merges the semi-derivatives through combine_A; at a domain endpoint it
// is the single available semi-derivative.
inline double specular_derivative(const PiecewiseFunction& f, double x0) {
    if (x0 == f.lo() || x0 == f.hi()) return detail::endpoint_semi(f, x0);
    auto p = detail::interior_parts(f, x0);
    return combine_A(p.semi.right, p.semi.left);
}

inline bool is_specularly_differentiable(const PiecewiseFunction& f, double x0) {
    try {
        specular_derivative(f, x0);
        return true;
    } catch (const Error&) {
        return false;
    }
}

// Half-angle route: same inputs, slope expressed through the two slope
// angles. Agrees with specular_derivative to roundoff.
inline double specular_derivative_via_angles(const PiecewiseFunction& f, double x0) {
    if (x0 == f.lo() || x0 == f.hi()) return detail::endpoint_semi(f, x0);
    auto p = detail::interior_parts(f, x0);
    return std::tan(0.5 * (std::atan(p.semi.right) + std::atan(p.semi.left)));
}

// Derivative-free route: the symmetric quotient
//   sigma(h) = (g(h) R(-h) - g(-h) R(h)) / (h (R(-h) + R(h))),
//   g(h) = f(x0 + h) - f[x0],  R(h) = sqrt(g(h)^2 + h^2),
// extrapolated to first order along h_k = h0 2^-k, k = 0..20. The accepted
// estimate must agree with the closed-form route within 1e-5.
inline double specular_derivative_via_criterion(const PiecewiseFunction& f, double x0) {
    if (x0 == f.lo() || x0 == f.hi()) return detail::endpoint_semi(f, x0);
    auto p = detail::interior_parts(f, x0);
    double formula = combine_A(p.semi.right, p.semi.left);

    std::size_t bi_right, bi_left;
    if (auto bi = f.breakpoint_index(x0)) {
        bi_right = *bi + 1;
        bi_left = *bi;
    } else {
        bi_right = bi_left = f.segment_index(x0);
    }
    auto right_view = f.segment_view(bi_right);
    auto left_view = f.segment_view(bi_left);
    double mid = p.mid;

    auto sigma = [&](double h) {
        double gp = right_view(x0 + h) - mid;
        double gm = left_view(x0 - h) - mid;
        double rp = std::sqrt(gp * gp + h * h);
        double rm = std::sqrt(gm * gm + h * h);
        return (gp * rm - gm * rp) / (h * (rm + rp));
    };

    double prev_sigma = std::nan("");
    double prev_r = std::nan("");
    double h = kLimitH0;
    for (int k = 0; k <= kCriterionMaxK; ++k, h *= 0.5) {
        double s = sigma(h);
        if (!std::isfinite(s)) {
            prev_sigma = std::nan("");
            continue;
        }
        if (std::isfinite(prev_sigma)) {
            double r = 2.0 * s - prev_sigma; // first-order extrapolant
            if (std::isfinite(prev_r) &&
                std::fabs(r - prev_r) < kCriterionAcceptRel * (1.0 + std::fabs(r))) {
                if (std::fabs(r - formula) > 1e-5 * (1.0 + std::fabs(formula)))
                    throw no_convergence(prev_r, r);
                return r;
            }
            prev_r = r;
        }
        prev_sigma = s;
    }
    throw no_convergence(prev_r, prev_sigma);
}

// ---------------------------------------------------------------------------
// Tangent objects.

// Three-branch graph through a (possibly discontinuous) point: the left ray
// anchored at the left limit with slope beta, the single midgap point, the
// right ray anchored at the right limit with slope alpha.
struct Phototangent {
    double x0 = 0.0;
    double right_value = 0.0; // f[x0+)
    double left_value = 0.0;  // f(x0-]
    double mid = 0.0;         // f[x0]
    double alpha = 0.0, beta = 0.0;

    double operator()(double x) const {
        if (x > x0) return right_value + alpha * (x - x0);
        if (x < x0) return left_value + beta * (x - x0);
        return mid;
    }
};

inline Phototangent phototangent(const PiecewiseFunction& f, double x0) {
    if (!(x0 > f.lo() && x0 < f.hi()))
        throw ValidationError("phototangent requires an interior point");
    Phototangent p;
    p.x0 = x0;
    p.right_value = f.right_limit(x0);
    p.left_value = f.left_limit(x0);
    p.mid = 0.5 * (p.right_value + p.left_value);
    p.alpha = semi_derivative(f, x0, +1);
    p.beta = semi_derivative(f, x0, -1);
    return p;
}

// Slope of the chord the phototangent cuts on the unit circle centered at
// (x0, mid). Requires both ray anchors inside the circle (|half jump| < 1).
inline double phototangent_chord_slope(const Phototangent& p) {
    double dr = p.right_value - p.mid;
    double dl = p.left_value - p.mid;
    if (std::fabs(dr) >= 1.0 || std::fabs(dl) >= 1.0)
        throw ValidationError("phototangent rays start outside the unit circle");
    // Ray (t, d + m t) meets the circle where (1+m^2) t^2 + 2 m d t + d^2 = 1;
    // the right ray takes the positive root, the left ray the negative one.
    double qa = 1.0 + p.alpha * p.alpha;
    double tr = (-p.alpha * dr + std::sqrt(qa - dr * dr)) / qa;
    double qb = 1.0 + p.beta * p.beta;
    double tl = (-p.beta * dl - std::sqrt(qb - dl * dl)) / qb;
    double yr = dr + p.alpha * tr;
    double yl = dl + p.beta * tl;
    return (yr - yl) / (tr - tl);
}

struct TangentLine {
    double x0 = 0.0;
    double anchor = 0.0; // f[x0]
    double slope = 0.0;

    double operator()(double x) const { return anchor + slope * (x - x0); }
};

inline TangentLine specular_tangent_line(const PiecewiseFunction& f, double x0) {
    TangentLine t;
    t.x0 = x0;
    t.slope = specular_derivative(f, x0);
    t.anchor = f.midgap(x0);
    return t;
}

// ---------------------------------------------------------------------------
// Higher order: level k differentiates the level k-1 derivative, which exists
// only as a sampled callable. Each level shrinks the base step a decade.

inline double higher_specular_derivative(const PiecewiseFunction& f, double x0, int order) {
    if (order < 1) throw ValidationError("derivative order must be >= 1");
    if (order == 1) return specular_derivative(f, x0);
    std::function<double(double)> g = [&f](double x) { return specular_derivative(f, x); };
    for (int level = 2; level < order; ++level) {
        double h0 = kLimitH0 * std::pow(10.0, -(level - 1));
        auto prev = g;
        long long lvl = level;
        g = [prev, h0, lvl](double x) {
            return callable_specular_derivative(prev, x, h0, kHigherAcceptRel, lvl);
        };
    }
    double h0 = kLimitH0 * std::pow(10.0, -(order - 1));
    return callable_specular_derivative(g, x0, h0, kHigherAcceptRel, order);
}

// ---------------------------------------------------------------------------
// Mean-value witnesses: on [a, b] the specular derivative need not hit the
// chord slope exactly, but it reaches at least the slope somewhere and at
// most the slope somewhere. Scanned on a uniform interior grid.

struct MvtWitnesses {
    double slope = 0.0;
    double c_upper = 0.0; // f'(c_upper) >= slope - tol
    double c_lower = 0.0; // f'(c_lower) <= slope + tol
};

inline MvtWitnesses quasi_mvt_witnesses(const PiecewiseFunction& f, double a, double b,
                                        int grid_n = 512) {
    if (!(a >= f.lo() && b <= f.hi() && a < b))
        throw ValidationError("witness interval must satisfy lo <= a < b <= hi");
    MvtWitnesses w;
    w.slope = (f.eval(b) - f.eval(a)) / (b - a);
    bool have_upper = false, have_lower = false;
    for (int i = 1; i <= grid_n; ++i) {
        double c = a + (b - a) * i / (grid_n + 1);
        double d;
        try {
            d = specular_derivative(f, c);
        } catch (const Error&) {
            continue;
        }
        if (!have_upper && d >= w.slope - kWitnessSlackTol) {
            w.c_upper = c;
            have_upper = true;
        }
        if (!have_lower && d <= w.slope + kWitnessSlackTol) {
            w.c_lower = c;
            have_lower = true;
        }
        if (have_upper && have_lower) return w;
    }
    throw witness_not_found(have_upper ? "lower" : "upper");
}

} // namespace specular
