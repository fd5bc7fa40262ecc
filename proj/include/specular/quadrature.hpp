#pragma once

// Adaptive Simpson quadrature plus a memoizing cumulative integral. The
// cumulative form is what the calculus and ODE layers want: many evaluations
// of x -> integral from a fixed anchor, often in near-sorted order, so each
// query only integrates from the nearest previously computed point.

#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <mutex>

#include "errors.hpp"
#include "numeric.hpp"

namespace specular {

namespace detail {

inline double simpson_slice(const std::function<double(double)>& f, double a, double b,
                            double fa, double fm, double fb, double whole, double tol,
                            int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    if (!std::isfinite(flm) || !std::isfinite(frm)) throw quadrature_failure(a, b);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double delta = left + right - whole;
    if (std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    if (depth >= 60) throw quadrature_failure(a, b);
    return simpson_slice(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
           simpson_slice(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
}

} // namespace detail

// Signed integral over [a, b] (or [b, a] with flipped sign), absolute
// tolerance tol.
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = kSegmentQuadTol) {
    if (a == b) return 0.0;
    if (a > b) return -integrate(f, b, a, tol);
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    if (!std::isfinite(fa) || !std::isfinite(fb) || !std::isfinite(fm))
        throw quadrature_failure(a, b);
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::simpson_slice(f, a, b, fa, fm, fb, whole, tol, 0);
}

// x -> integral of g from anchor to x, with every computed prefix cached.
class CumulativeIntegral {
public:
    CumulativeIntegral(std::function<double(double)> g, double anchor,
                       double tol = kSegmentQuadTol)
        : g_(std::move(g)), tol_(tol) {
        memo_[anchor] = 0.0;
    }

    double operator()(double x) const {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = memo_.lower_bound(x);
        if (it != memo_.end() && it->first == x) return it->second;
        // Nearest cached point on either side.
        double from, base;
        if (it == memo_.begin()) {
            from = it->first;
            base = it->second;
        } else {
            auto below = std::prev(it);
            if (it == memo_.end() || x - below->first <= it->first - x) {
                from = below->first;
                base = below->second;
            } else {
                from = it->first;
                base = it->second;
            }
        }
        double v = base + integrate(g_, from, x, tol_);
        memo_[x] = v;
        return v;
    }

private:
    std::function<double(double)> g_;
    double tol_;
    mutable std::map<double, double> memo_;
    mutable std::mutex mu_;
};

using CumulativeIntegralPtr = std::shared_ptr<CumulativeIntegral>;

} // namespace specular
