#pragma once

// Specular differentiation in n variables.
//
// Everything is built from axis sections t -> f(a + t e_i): one-sided limits,
// the per-axis semi-derivative pair, and the per-axis specular partial (which
// requires the two axis limits to agree). Each usable axis contributes two
// unit offsets from its midgap anchor; the collected points P drive the
// classification and the tangent hyperplane construction.
//
// Axis arguments in this API are 0-based. Axis numbers in error details and
// serialized output are 1-based, matching the variable names x1..xn.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "limits.hpp"
#include "ndfunction.hpp"
#include "numeric.hpp"
#include "specular1d.hpp"

namespace specular {

struct AxisLimits {
    double right = 0.0, left = 0.0, mid = 0.0;
};

// Both limits of the axis section at 0. Point evaluation stands in for the
// limits when it is finite and the body is free of discontinuous primitives;
// otherwise each side runs the geometric ladder.
inline AxisLimits axis_limits(const NdFunction& f, std::span<const double> a, int axis) {
    auto sec = f.axis_section(a, axis);
    AxisLimits out;
    if (!f.value_limit_risk) {
        double v = sec(0.0);
        if (std::isfinite(v)) {
            out.right = out.left = out.mid = v;
            return out;
        }
    }
    LimitOutcome r = callable_one_sided_limit(sec, 0.0, +1);
    LimitOutcome l = callable_one_sided_limit(sec, 0.0, -1);
    if (!r.converged)
        throw Error("LimitDiverges", {{"axis", static_cast<long long>(axis + 1)},
                                      {"side", std::string("right")}});
    if (!l.converged)
        throw Error("LimitDiverges", {{"axis", static_cast<long long>(axis + 1)},
                                      {"side", std::string("left")}});
    out.right = r.value;
    out.left = l.value;
    out.mid = 0.5 * (r.value + l.value);
    return out;
}

inline SemiPair semi_specular_partial(const NdFunction& f, std::span<const double> a,
                                      int axis) {
    auto sec = f.axis_section(a, axis);
    AxisLimits lim = axis_limits(f, a, axis);
    LimitOutcome qa = callable_semi(sec, 0.0, +1, lim.right);
    LimitOutcome qb = callable_semi(sec, 0.0, -1, lim.left);
    if (!qa.converged)
        throw Error("SemiDerivativeDiverges", {{"axis", static_cast<long long>(axis + 1)},
                                               {"side", std::string("right")}});
    if (!qb.converged)
        throw Error("SemiDerivativeDiverges", {{"axis", static_cast<long long>(axis + 1)},
                                               {"side", std::string("left")}});
    return {qa.value, qb.value};
}

// Specular partial along one axis: both axis limits must agree (the section
// must pass through the point without a gap) and both semi slopes must exist.
inline double specular_partial(const NdFunction& f, std::span<const double> a, int axis) {
    AxisLimits lim;
    try {
        lim = axis_limits(f, a, axis);
    } catch (const Error&) {
        throw not_specularly_partial_differentiable(axis + 1, "divergent-side");
    }
    if (std::fabs(lim.right - lim.left) > kJumpTol)
        throw not_specularly_partial_differentiable(axis + 1, "jump");
    try {
        SemiPair s = semi_specular_partial(f, a, axis);
        return combine_A(s.right, s.left);
    } catch (const Error& e) {
        if (e.kind() == "SemiDerivativeDiverges")
            throw not_specularly_partial_differentiable(axis + 1, "divergent-side");
        throw;
    }
}

// ---------------------------------------------------------------------------
// Whole-point analysis.

struct AxisData {
    int axis = 0;
    bool usable = false; // specular partial exists along this axis
    std::string fail_reason;
    AxisLimits limits;
    SemiPair semi{};
    double partial = 0.0;
};

inline std::vector<AxisData> analyze_axes(const NdFunction& f, std::span<const double> a) {
    std::vector<AxisData> out;
    out.reserve(static_cast<std::size_t>(f.dim));
    for (int i = 0; i < f.dim; ++i) {
        AxisData d;
        d.axis = i;
        try {
            d.limits = axis_limits(f, a, i);
            if (std::fabs(d.limits.right - d.limits.left) > kJumpTol) {
                d.fail_reason = "jump";
            } else {
                d.semi = semi_specular_partial(f, a, i);
                d.partial = combine_A(d.semi.right, d.semi.left);
                d.usable = true;
            }
        } catch (const Error&) {
            d.fail_reason = "divergent-side";
        }
        out.push_back(std::move(d));
    }
    return out;
}

inline std::vector<int> compute_V(const NdFunction& f, std::span<const double> a) {
    std::vector<int> v;
    for (const AxisData& d : analyze_axes(f, a))
        if (d.usable) v.push_back(d.axis);
    return v;
}

// One unit offset from the axis anchor (a, mid_i) in R^{n+1}: along +e_i
// tilted by the right slope, or along -e_i tilted by the left slope.
struct PPoint {
    std::vector<double> point; // size n+1
    int axis = 0;
    int side = +1;
};

namespace detail {

inline PPoint make_p_point(std::span<const double> a, const AxisData& d, int side) {
    PPoint p;
    p.axis = d.axis;
    p.side = side;
    p.point.assign(a.begin(), a.end());
    p.point.push_back(d.limits.mid);
    double slope = side > 0 ? d.semi.right : d.semi.left;
    double s = 1.0 / std::sqrt(1.0 + slope * slope);
    p.point[static_cast<std::size_t>(d.axis)] += side > 0 ? s : -s;
    p.point.back() += side > 0 ? slope * s : -slope * s;
    return p;
}

} // namespace detail

inline std::vector<PPoint> compute_P(const NdFunction& f, std::span<const double> a) {
    std::vector<PPoint> out;
    for (const AxisData& d : analyze_axes(f, a)) {
        if (!d.usable) continue;
        out.push_back(detail::make_p_point(a, d, +1));
        out.push_back(detail::make_p_point(a, d, -1));
    }
    return out;
}

enum class NdClass { None, Weak, Strong };

struct Classification {
    NdClass kind = NdClass::None;
    int w = -1;          // representative axis of the dominating midgap class
    double mid = 0.0;    // common midgap value of that class
    bool readings_disagree = false; // dominating class exists but mids differ across V
    std::vector<int> V;
    std::vector<std::vector<int>> mid_classes; // partition of V by midgap value
};

// Strong: every axis usable and all midgap values agree. Weak: some midgap
// class covers at least (n+1)/2 axes, i.e. contributes at least n+1 of the
// 2|V| points. At most one class can do so.
inline Classification classify_differentiability(const NdFunction& f,
                                                 std::span<const double> a) {
    Classification c;
    std::vector<AxisData> axes = analyze_axes(f, a);
    std::vector<double> rep_mids;
    for (const AxisData& d : axes) {
        if (!d.usable) continue;
        c.V.push_back(d.axis);
        bool placed = false;
        for (std::size_t k = 0; k < c.mid_classes.size(); ++k) {
            if (std::fabs(d.limits.mid - rep_mids[k]) <= kJumpTol) {
                c.mid_classes[k].push_back(d.axis);
                placed = true;
                break;
            }
        }
        if (!placed) {
            c.mid_classes.push_back({d.axis});
            rep_mids.push_back(d.limits.mid);
        }
    }
    if (c.V.empty()) return c;

    std::size_t dominant = c.mid_classes.size();
    for (std::size_t k = 0; k < c.mid_classes.size(); ++k) {
        if (2 * c.mid_classes[k].size() >= static_cast<std::size_t>(f.dim) + 1) {
            dominant = k;
            break;
        }
    }
    if (dominant == c.mid_classes.size()) return c; // kind None

    c.w = c.mid_classes[dominant].front();
    c.mid = rep_mids[dominant];
    c.readings_disagree = c.mid_classes.size() > 1;
    c.kind = (static_cast<int>(c.V.size()) == f.dim && c.mid_classes.size() == 1)
                 ? NdClass::Strong
                 : NdClass::Weak;
    return c;
}

// ---------------------------------------------------------------------------
// Tangent hyperplanes.

struct Hyperplane {
    std::vector<double> anchor; // size n
    std::vector<double> coeffs; // size n
    double offset = 0.0;        // value at the anchor

    double eval(std::span<const double> x) const {
        double v = offset;
        for (std::size_t i = 0; i < coeffs.size(); ++i)
            v += coeffs[i] * (x[i] - anchor[i]);
        return v;
    }
};

namespace detail {

// Rank of an m x n matrix by Gaussian elimination with partial pivoting.
inline int matrix_rank(std::vector<std::vector<double>> m, double tol) {
    if (m.empty()) return 0;
    std::size_t rows = m.size(), cols = m[0].size();
    int rank = 0;
    std::size_t row = 0;
    for (std::size_t col = 0; col < cols && row < rows; ++col) {
        std::size_t piv = row;
        for (std::size_t r = row + 1; r < rows; ++r)
            if (std::fabs(m[r][col]) > std::fabs(m[piv][col])) piv = r;
        if (std::fabs(m[piv][col]) <= tol) continue;
        std::swap(m[piv], m[row]);
        for (std::size_t r = row + 1; r < rows; ++r) {
            double factor = m[r][col] / m[row][col];
            for (std::size_t cc = col; cc < cols; ++cc) m[r][cc] -= factor * m[row][cc];
        }
        ++rank;
        ++row;
    }
    return rank;
}

// Solve the square system M z = rhs in place; false when singular.
inline bool solve_square(std::vector<std::vector<double>>& m, std::vector<double>& rhs,
                         double tol) {
    std::size_t n = m.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::fabs(m[r][col]) > std::fabs(m[piv][col])) piv = r;
        if (std::fabs(m[piv][col]) <= tol) return false;
        std::swap(m[piv], m[col]);
        std::swap(rhs[piv], rhs[col]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            double factor = m[r][col] / m[col][col];
            for (std::size_t cc = col; cc < n; ++cc) m[r][cc] -= factor * m[col][cc];
            rhs[r] -= factor * rhs[col];
        }
    }
    for (std::size_t i = 0; i < n; ++i) rhs[i] /= m[i][i];
    return true;
}

} // namespace detail

// All hyperplanes through the representative anchor parallel to one cut by an
// (n+1)-point subset of P. A subset must touch every usable axis (axes it
// misses would get a spurious zero slope), be affinely independent, and admit
// a graph form over the usable axes; coefficients of unusable axes are zero.
// The fit is least squares, exact whenever the subset's system is consistent,
// and the fitted offset is replaced by the anchor value.
inline std::vector<Hyperplane> weak_tangent_hyperplanes(const NdFunction& f,
                                                        std::span<const double> a) {
    if (f.dim > kMaxHyperplaneDim)
        throw ValidationError("hyperplane enumeration supports dimension <= " +
                              std::to_string(kMaxHyperplaneDim));
    Classification cls = classify_differentiability(f, a);
    if (cls.kind == NdClass::None)
        throw ValidationError("point is not weakly specularly differentiable");

    std::vector<PPoint> P = compute_P(f, a);
    std::size_t n = static_cast<std::size_t>(f.dim);
    std::size_t need = n + 1;
    if (P.size() < need) throw degenerate_p();

    std::vector<int> axis_of(P.size());
    for (std::size_t i = 0; i < P.size(); ++i) axis_of[i] = P[i].axis;
    std::vector<int> V;
    for (int ax : axis_of)
        if (std::find(V.begin(), V.end(), ax) == V.end()) V.push_back(ax);
    std::sort(V.begin(), V.end());
    std::vector<std::size_t> col_of_axis(n, SIZE_MAX);
    for (std::size_t k = 0; k < V.size(); ++k)
        col_of_axis[static_cast<std::size_t>(V[k])] = k;

    std::vector<Hyperplane> planes;
    std::vector<std::size_t> idx(need);
    for (std::size_t i = 0; i < need; ++i) idx[i] = i;

    auto process = [&](const std::vector<std::size_t>& sel) {
        // Cover every usable axis.
        std::vector<bool> covered(n, false);
        for (std::size_t i : sel) covered[static_cast<std::size_t>(axis_of[i])] = true;
        for (int ax : V)
            if (!covered[static_cast<std::size_t>(ax)]) return;

        // Affine independence of the n+1 points in R^{n+1}.
        std::vector<std::vector<double>> diffs;
        double scale = 0.0;
        for (std::size_t j = 1; j < sel.size(); ++j) {
            std::vector<double> row(n + 1);
            for (std::size_t c = 0; c <= n; ++c) {
                row[c] = P[sel[j]].point[c] - P[sel[0]].point[c];
                scale = std::max(scale, std::fabs(row[c]));
            }
            diffs.push_back(std::move(row));
        }
        if (detail::matrix_rank(diffs, 1e-9 * (1.0 + scale)) != static_cast<int>(n))
            return;

        // Least squares for z = sum_{i in V} c_i (x_i - a_i) + d.
        std::size_t m = V.size() + 1;
        std::vector<std::vector<double>> ata(m, std::vector<double>(m, 0.0));
        std::vector<double> atb(m, 0.0);
        for (std::size_t i : sel) {
            std::vector<double> row(m, 0.0);
            for (std::size_t k = 0; k < V.size(); ++k)
                row[k] = P[i].point[static_cast<std::size_t>(V[k])] -
                         a[static_cast<std::size_t>(V[k])];
            row[m - 1] = 1.0;
            double b = P[i].point[n];
            for (std::size_t r = 0; r < m; ++r) {
                atb[r] += row[r] * b;
                for (std::size_t c = 0; c < m; ++c) ata[r][c] += row[r] * row[c];
            }
        }
        if (!detail::solve_square(ata, atb, 1e-12)) return;

        Hyperplane h;
        h.anchor.assign(a.begin(), a.end());
        h.coeffs.assign(n, 0.0);
        for (std::size_t k = 0; k < V.size(); ++k)
            h.coeffs[static_cast<std::size_t>(V[k])] = atb[k];
        h.offset = cls.mid;

        for (const Hyperplane& seen : planes) {
            double d = 0.0;
            for (std::size_t c = 0; c < n; ++c)
                d = std::max(d, std::fabs(seen.coeffs[c] - h.coeffs[c]));
            if (d <= kHyperplaneDedupTol) return;
        }
        planes.push_back(std::move(h));
    };

    // Enumerate (n+1)-combinations of P in lexicographic index order.
    for (;;) {
        process(idx);
        std::size_t i = need;
        while (i > 0) {
            --i;
            if (idx[i] != i + P.size() - need) break;
            if (i == 0) {
                i = SIZE_MAX;
                break;
            }
        }
        if (i == SIZE_MAX) break;
        ++idx[i];
        for (std::size_t j = i + 1; j < need; ++j) idx[j] = idx[j - 1] + 1;
    }

    if (planes.empty()) throw degenerate_p();
    std::sort(planes.begin(), planes.end(), [](const Hyperplane& x, const Hyperplane& y) {
        return std::lexicographical_compare(x.coeffs.begin(), x.coeffs.end(),
                                            y.coeffs.begin(), y.coeffs.end());
    });
    return planes;
}

// The tangent hyperplane proper: exists exactly when the weak construction is
// unambiguous.
inline Hyperplane strong_tangent_hyperplane(const NdFunction& f, std::span<const double> a) {
    std::vector<Hyperplane> planes = weak_tangent_hyperplanes(f, a);
    if (planes.size() != 1)
        throw no_unique_weak_plane(static_cast<long long>(planes.size()));
    return planes.front();
}

// ---------------------------------------------------------------------------
// Gradients and directional derivatives.

namespace detail {

inline std::vector<double> gradient_of_side(const NdFunction& f, std::span<const double> a,
                                            int side) {
    std::vector<double> g(static_cast<std::size_t>(f.dim), 0.0);
    std::string failed;
    for (int i = 0; i < f.dim; ++i) {
        try {
            auto sec = f.axis_section(a, i);
            AxisLimits lim = axis_limits(f, a, i);
            double base = side > 0 ? lim.right : lim.left;
            LimitOutcome q = callable_semi(sec, 0.0, side, base);
            if (!q.converged) throw semi_derivative_diverges(0.0, side);
            g[static_cast<std::size_t>(i)] = q.value;
        } catch (const Error&) {
            if (!failed.empty()) failed += ",";
            failed += std::to_string(i + 1);
        }
    }
    if (!failed.empty())
        throw Error("SemiDerivativeDiverges",
                    {{"axes", failed},
                     {"side", std::string(side > 0 ? "right" : "left")}});
    return g;
}

inline double norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

} // namespace detail

inline std::vector<double> right_gradient(const NdFunction& f, std::span<const double> a) {
    return detail::gradient_of_side(f, a, +1);
}
inline std::vector<double> left_gradient(const NdFunction& f, std::span<const double> a) {
    return detail::gradient_of_side(f, a, -1);
}

inline std::vector<double> specular_gradient(const NdFunction& f, std::span<const double> a) {
    std::vector<double> g(static_cast<std::size_t>(f.dim), 0.0);
    for (int i = 0; i < f.dim; ++i)
        g[static_cast<std::size_t>(i)] = specular_partial(f, a, i);
    return g;
}

struct DirectionalPair {
    double right = 0.0; // right gradient dotted with u
    double left = 0.0;
};

inline DirectionalPair directional_semi(const NdFunction& f, std::span<const double> a,
                                        std::span<const double> u) {
    if (static_cast<int>(u.size()) != f.dim)
        throw ValidationError("direction dimension mismatch");
    if (std::fabs(detail::norm(u) - 1.0) > 1e-12)
        throw ValidationError("direction must be a unit vector");
    std::vector<double> r = right_gradient(f, a);
    std::vector<double> l = left_gradient(f, a);
    DirectionalPair d;
    for (std::size_t i = 0; i < u.size(); ++i) {
        d.right += r[i] * u[i];
        d.left += l[i] * u[i];
    }
    return d;
}

inline double specular_directional(const NdFunction& f, std::span<const double> a,
                                   std::span<const double> u) {
    DirectionalPair d = directional_semi(f, a, u);
    return combine_A(d.right, d.left);
}

// Derivative-free check of the directional value: the symmetric quotient of
// the line section against the common midgap value, extrapolated to first
// order. Must agree with the gradient route within 1e-4.
inline double specular_directional_via_limit(const NdFunction& f, std::span<const double> a,
                                             std::span<const double> u) {
    Classification cls = classify_differentiability(f, a);
    if (cls.kind == NdClass::None)
        throw ValidationError("directional limit route requires weak differentiability");
    double fast = specular_directional(f, a, u);

    auto sec = f.line_section(a, u);
    double mid = cls.mid;
    auto sigma = [&](double h) {
        double gp = sec(h) - mid;
        double gm = sec(-h) - mid;
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
            double r = 2.0 * s - prev_sigma;
            if (std::isfinite(prev_r) &&
                std::fabs(r - prev_r) < kCriterionAcceptRel * (1.0 + std::fabs(r))) {
                if (std::fabs(r - fast) > 1e-4 * (1.0 + std::fabs(fast)))
                    throw no_convergence(prev_r, r);
                return r;
            }
            prev_r = r;
        }
        prev_sigma = s;
    }
    throw no_convergence(prev_r, prev_sigma);
}

struct DirectionalExtrema {
    double bound = 0.0; // (|D_R| + |D_L|) / 2 dominates every |directional|
    std::optional<std::vector<double>> argmax;
    std::optional<std::vector<double>> argmin;
};

// The extremizing direction exists when the one-sided gradients point the
// same way (or one vanishes); it is their common direction, and its opposite
// minimizes.
inline DirectionalExtrema directional_extrema(const NdFunction& f,
                                              std::span<const double> a) {
    std::vector<double> r = right_gradient(f, a);
    std::vector<double> l = left_gradient(f, a);
    double nr = detail::norm(r), nl = detail::norm(l);
    DirectionalExtrema out;
    out.bound = 0.5 * (nr + nl);

    const double zero_tol = 1e-12;
    std::vector<double> dir;
    if (nr > zero_tol && nl > zero_tol) {
        double mismatch = 0.0;
        for (std::size_t i = 0; i < r.size(); ++i)
            mismatch = std::max(mismatch, std::fabs(r[i] / nr - l[i] / nl));
        if (mismatch > kAngularTol) return out;
        dir = r;
        for (double& x : dir) x /= nr;
    } else if (nr > zero_tol) {
        dir = r;
        for (double& x : dir) x /= nr;
    } else if (nl > zero_tol) {
        dir = l;
        for (double& x : dir) x /= nl;
    } else {
        return out; // both gradients vanish: every direction is trivial
    }

    out.argmax = dir;
    for (double& x : dir) x = -x;
    out.argmin = dir;
    return out;
}

} // namespace specular
