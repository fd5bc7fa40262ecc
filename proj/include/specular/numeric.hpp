#pragma once

// Shared numeric policy: every tolerance or step constant that two modules
// must agree on lives here under one name. Tests reference these symbols
// instead of repeating literals.

#include <cmath>
#include <cstdio>
#include <string>

namespace specular {

// One-sided sampling x0 +/- h0 * 2^-k used by limits and difference quotients.
inline constexpr double kLimitH0 = 1e-2;
inline constexpr int kLimitMaxHalvings = 40;
inline constexpr double kLimitAcceptRel = 1e-9;  // successive-estimate agreement
inline constexpr double kLimitDivergeAbs = 1e12; // |estimate| beyond this: divergent

// Jump detection: one-sided limits closer than this are a removable point.
inline constexpr double kJumpTol = 1e-12;

// combine_A branch selection.
inline constexpr double kCombineZeroRel = 1e-14;     // alpha+beta treated as exactly 0
inline constexpr double kCombineAngleSwitch = 1e-8;  // below this, use the angle form

// Criterion-route quotient: steps 1e-2 * 2^-k for k = 0..20, first-order
// extrapolation, accepted when successive extrapolants agree to this.
inline constexpr int kCriterionMaxK = 20;
inline constexpr double kCriterionAcceptRel = 1e-7;

// Quadrature.
inline constexpr double kSegmentQuadTol = 1e-10;  // absolute, per segment
inline constexpr double kExponentQuadTol = 1e-12; // cumulative integral of p for exp(P)

// Geometry.
inline constexpr double kHyperplaneDedupTol = 1e-9;
inline constexpr double kAngularTol = 1e-9;  // co-directedness of gradient pair
inline constexpr int kMaxHyperplaneDim = 8;  // combinatorial guard

// Higher-order derivative chains: sampled derivatives carry ladder noise, so
// the outer quotient accepts coarser agreement and shrinks its base step one
// decade per level.
inline constexpr double kHigherAcceptRel = 1e-6;

// Verification and root finding.
inline constexpr double kH1CompareTol = 1e-9;
inline constexpr double kWitnessSlackTol = 1e-9;
inline constexpr double kFtcResidualTol = 1e-6;
inline constexpr double kOdeResidualTol = 1e-6;
inline constexpr double kTransportResidualTol = 1e-8;
inline constexpr double kBisectionTol = 1e-12;

inline double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

inline bool nearly_equal(double a, double b, double tol) {
    return std::fabs(a - b) <= tol;
}

// Round-trip-exact decimal rendering used for all JSON numeric output.
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
}

} // namespace specular
