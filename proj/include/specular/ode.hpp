#pragma once

// First-order linear problems u' + p(x) u = f(x) where the right-hand side
// jumps. Away from f's singular points the integrating factor mu = exp(P)
// gives the classical solution u = (integral of mu f + C) / mu per run;
// continuity of u chains the run constants together, so one pin (a leading
// constant, an initial condition, or a value at a singular point) fixes the
// whole family.
//
// At a singular point s the solution's one-sided derivatives are
// u'(s+) = f(s+) - p(s) u(s) and u'(s-) = f(s-) - p(s) u(s); merging them and
// adding back p(s) u(s) recovers the one value of f(s) that makes u solve the
// equation at s in the merged-derivative sense.

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "calculus.hpp"
#include "errors.hpp"
#include "expression.hpp"
#include "numeric.hpp"
#include "piecewise.hpp"
#include "quadrature.hpp"
#include "specular1d.hpp"

namespace specular {

struct LinearOdeProblem {
    double lo = 0.0, hi = 0.0;
    Expression p;
    std::shared_ptr<const PiecewiseFunction> f;
    std::optional<std::pair<double, double>> ic; // (x0, y0)
};

struct OdeSolution {
    PiecewiseFunction u;
    std::vector<double> singular;  // of the right-hand side
    std::vector<double> constants; // run constants C_j in u = (I_j + C_j)/mu
    std::vector<double> recovered; // merged-sense value of f at each singular point
};

namespace detail {

enum class OdePin { Leading, InitialCondition, AtSingular };

inline OdeSolution solve_linear_ode_core(const LinearOdeProblem& prob, OdePin pin,
                                         double pin_x, double pin_value) {
    if (!prob.f) throw ValidationError("ode problem has no right-hand side");
    const PiecewiseFunction& f = *prob.f;
    if (f.lo() != prob.lo || f.hi() != prob.hi)
        throw ValidationError("right-hand side domain must match the problem domain");

    std::vector<double> singular = f.singular_points();
    std::vector<double> bounds;
    bounds.push_back(prob.lo);
    for (double s : singular) bounds.push_back(s);
    bounds.push_back(prob.hi);
    std::size_t runs = bounds.size() - 1;

    Expression p = prob.p;
    auto pint = std::make_shared<CumulativeIntegral>(
        [p](double t) { return p.eval1(t); }, prob.lo, kExponentQuadTol);
    std::function<double(double)> mu = [pint](double x) { return std::exp((*pint)(x)); };

    std::vector<std::function<double(double)>> views(runs);
    std::vector<CumulativeIntegralPtr> particular(runs);
    for (std::size_t j = 0; j < runs; ++j) {
        views[j] = run_view(prob.f, bounds[j], bounds[j + 1]);
        auto view = views[j];
        particular[j] = std::make_shared<CumulativeIntegral>(
            [view, mu](double t) { return mu(t) * view(t); }, bounds[j], kSegmentQuadTol);
    }

    std::vector<double> C(runs, 0.0);
    std::size_t pinned_run = 0;
    switch (pin) {
    case detail::OdePin::Leading:
        C[0] = pin_value;
        break;
    case detail::OdePin::InitialCondition: {
        if (!(pin_x >= prob.lo && pin_x <= prob.hi))
            throw ValidationError("initial condition lies outside the domain");
        for (double s : singular)
            if (pin_x == s) throw ic_on_singular_point(pin_x);
        std::size_t j = 0;
        while (j + 1 < runs && pin_x >= bounds[j + 1]) ++j;
        pinned_run = j;
        C[j] = pin_value * mu(pin_x) - (*particular[j])(pin_x);
        break;
    }
    case detail::OdePin::AtSingular: {
        bool found = false;
        std::size_t j = 0;
        for (std::size_t k = 0; k < singular.size(); ++k) {
            if (singular[k] == pin_x) {
                j = k + 1; // run whose left endpoint is pin_x
                found = true;
                break;
            }
        }
        if (!found) throw ValidationError("pin point is not a singular point");
        pinned_run = j;
        C[j] = pin_value * mu(pin_x);
        break;
    }
    }
    for (std::size_t j = pinned_run; j + 1 < runs; ++j)
        C[j + 1] = C[j] + (*particular[j])(bounds[j + 1]);
    for (std::size_t j = pinned_run; j > 0; --j)
        C[j - 1] = C[j] - (*particular[j - 1])(bounds[j]);

    std::vector<SegmentFn> segs;
    std::vector<PointValue> values;
    for (std::size_t j = 0; j < runs; ++j) {
        auto cum = particular[j];
        double cj = C[j];
        std::function<double(double)> u_val = [cum, cj, mu](double x) {
            return ((*cum)(x) + cj) / mu(x);
        };
        auto view = views[j];
        Expression pj = p;
        SegmentFn seg;
        seg.value = u_val;
        seg.derivative = [view, pj, u_val](double x) {
            return view(x) - pj.eval1(x) * u_val(x);
        };
        segs.push_back(std::move(seg));
        if (j + 1 < runs)
            values.push_back(PointValue::defined(C[j + 1] / mu(bounds[j + 1])));
    }

    PiecewiseFunction u(prob.lo, prob.hi, singular, std::move(segs), std::move(values));

    std::vector<double> recovered;
    for (double s : singular) {
        double ps = p.eval1(s);
        double us = u.eval(s);
        double alpha = f.right_limit(s) - ps * us;
        double beta = f.left_limit(s) - ps * us;
        recovered.push_back(combine_A(alpha, beta) + ps * us);
    }

    return OdeSolution{std::move(u), std::move(singular), std::move(C),
                       std::move(recovered)};
}

} // namespace detail

// Default pin: the problem's initial condition when present, otherwise a zero
// leading constant.
inline OdeSolution solve_linear_ode(const LinearOdeProblem& prob) {
    if (prob.ic)
        return detail::solve_linear_ode_core(prob, detail::OdePin::InitialCondition,
                                             prob.ic->first, prob.ic->second);
    return detail::solve_linear_ode_core(prob, detail::OdePin::Leading, 0.0, 0.0);
}

inline OdeSolution solve_linear_ode_with_leading_constant(const LinearOdeProblem& prob,
                                                          double c0) {
    return detail::solve_linear_ode_core(prob, detail::OdePin::Leading, 0.0, c0);
}

inline OdeSolution solve_linear_ode_pinned_at(const LinearOdeProblem& prob, double s,
                                              double value_at_s) {
    return detail::solve_linear_ode_core(prob, detail::OdePin::AtSingular, s, value_at_s);
}

// The one right-hand-side value at s that the solution differentiates back
// to: merge of u's one-sided derivatives plus p(s) u(s).
inline double recover_singular_value(const PiecewiseFunction& u, double s,
                                     double p_at_s = 0.0) {
    double alpha = semi_derivative(u, s, +1);
    double beta = semi_derivative(u, s, -1);
    return combine_A(alpha, beta) + p_at_s * u.eval(s);
}

// Count and locate the members of the one-jump solution family whose
// recovered value at the singular point s hits the target. The family is
// parameterized by C = u(s); the recovered value depends on C alone:
//   phi(C) = combine_A(f(s+) - p(s) C, f(s-) - p(s) C) + p(s) C - target.
// Roots are found by sign-change bisection over a uniform grid in C.
inline std::vector<double> count_solutions_for_target(const LinearOdeProblem& prob,
                                                      double s, double target,
                                                      double c_lo, double c_hi,
                                                      int grid_n = 400) {
    if (!prob.f) throw ValidationError("ode problem has no right-hand side");
    std::vector<double> singular = prob.f->singular_points();
    if (singular.size() != 1 || singular[0] != s)
        throw ValidationError("family counting needs s to be the unique singular point");
    if (!(c_lo < c_hi) || grid_n < 2)
        throw ValidationError("need c_lo < c_hi and at least two grid cells");

    double ps = prob.p.eval1(s);
    double fr = prob.f->right_limit(s);
    double fl = prob.f->left_limit(s);
    auto phi = [&](double c) {
        return combine_A(fr - ps * c, fl - ps * c) + ps * c - target;
    };

    std::vector<double> roots;
    double step = (c_hi - c_lo) / grid_n;
    double prev_c = c_lo, prev_phi = phi(c_lo);
    if (prev_phi == 0.0) roots.push_back(prev_c);
    for (int i = 1; i <= grid_n; ++i) {
        double c = c_lo + i * step;
        double v = phi(c);
        if (v == 0.0) {
            roots.push_back(c);
        } else if (prev_phi != 0.0 && (prev_phi < 0.0) != (v < 0.0)) {
            double a = prev_c, b = c, fa = prev_phi;
            while (b - a > kBisectionTol) {
                double m = 0.5 * (a + b);
                double fm = phi(m);
                if (fm == 0.0) {
                    a = b = m;
                    break;
                }
                if ((fa < 0.0) == (fm < 0.0)) {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            roots.push_back(0.5 * (a + b));
        }
        prev_c = c;
        prev_phi = v;
    }

    std::sort(roots.begin(), roots.end());
    std::vector<double> unique;
    for (double r : roots)
        if (unique.empty() || r - unique.back() > 1e-9) unique.push_back(r);
    return unique;
}

struct OdeVerifyReport {
    bool ok = false;
    double max_residual = 0.0;          // |u' + p u - f| away from jumps
    double max_continuity_gap = 0.0;    // of u across jumps
    double max_singular_residual = 0.0; // merged derivative vs recovered value
    bool ic_ok = true;
};

inline OdeVerifyReport verify_ode_solution(const LinearOdeProblem& prob,
                                           const OdeSolution& sol, int grid_n = 128) {
    OdeVerifyReport rep;
    const PiecewiseFunction& f = *prob.f;
    const PiecewiseFunction& u = sol.u;
    Expression p = prob.p;

    for (double s : sol.singular) {
        double gap = std::fabs(u.right_limit(s) - u.left_limit(s));
        gap = std::max(gap, std::fabs(u.eval(s) - u.midgap(s)));
        rep.max_continuity_gap = std::max(rep.max_continuity_gap, gap);
    }

    for (int i = 1; i <= grid_n; ++i) {
        double x = prob.lo + (prob.hi - prob.lo) * i / (grid_n + 1);
        if (u.breakpoint_index(x)) continue;
        if (!f.defined_at(x)) continue;
        double r = specular_derivative(u, x) + p.eval1(x) * u.eval(x) - f.eval(x);
        rep.max_residual = std::max(rep.max_residual, std::fabs(r));
    }

    for (std::size_t k = 0; k < sol.singular.size(); ++k) {
        double s = sol.singular[k];
        double merged = specular_derivative(u, s) + p.eval1(s) * u.eval(s);
        rep.max_singular_residual =
            std::max(rep.max_singular_residual, std::fabs(merged - sol.recovered[k]));
    }

    if (prob.ic) rep.ic_ok = std::fabs(u.eval(prob.ic->first) - prob.ic->second) <= kH1CompareTol;

    rep.ok = rep.max_continuity_gap <= kH1CompareTol &&
             rep.max_residual <= kOdeResidualTol &&
             rep.max_singular_residual <= kH1CompareTol && rep.ic_ok;
    return rep;
}

} // namespace specular
