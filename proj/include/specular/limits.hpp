#pragma once

// Numeric one-sided limits along the geometric ladder h_k = h0 * 2^-k.
//
// Raw samples feed a Neville tableau for node ratio 2: column i of row k is
// T[k][i] = (2^i T[k][i-1] - T[k-1][i-1]) / (2^i - 1), so each column cancels
// one more power of h. Acceptance is the contract's successive-estimate test
// applied to the tableau diagonal. Leading samples outside the caller's valid
// range (reported as NaN) are skipped; a non-finite sample after the ladder
// has started counts as failure to converge.

#include <cmath>
#include <functional>

#include "numeric.hpp"

namespace specular {

struct LimitOutcome {
    bool converged = false;
    bool diverged = false; // |raw sample| exceeded the divergence bound
    double value = 0.0;
    double prev = 0.0; // last two diagonal estimates, for diagnostics
    double last = 0.0;
};

// sample(h) evaluates the quantity whose limit as h -> 0+ is wanted; the
// caller bakes in direction and any difference quotient. sample returns NaN
// where it is not defined.
inline LimitOutcome extrapolated_limit(const std::function<double(double)>& sample,
                                       double h0 = kLimitH0,
                                       int max_k = kLimitMaxHalvings,
                                       double accept_rel = kLimitAcceptRel,
                                       double diverge_abs = kLimitDivergeAbs) {
    constexpr int kMaxCols = 8;
    double tableau[kMaxCols + 1] = {0.0};
    LimitOutcome out;

    int rows = 0;
    bool have_prev = false;
    double prev_diag = 0.0;
    double h = h0;
    for (int k = 0; k <= max_k; ++k, h *= 0.5) {
        double e = sample(h);
        if (!std::isfinite(e)) {
            if (rows == 0) continue; // ladder not started yet
            out.prev = prev_diag;
            out.last = e;
            return out;
        }
        if (std::fabs(e) > diverge_abs) {
            out.diverged = true;
            out.prev = prev_diag;
            out.last = e;
            return out;
        }

        int cols = rows < kMaxCols ? rows : kMaxCols;
        double old_left = tableau[0]; // T[k-1][i-1] while filling column i
        tableau[0] = e;
        for (int i = 1; i <= cols; ++i) {
            double w = std::ldexp(1.0, i); // 2^i
            double cur = (w * tableau[i - 1] - old_left) / (w - 1.0);
            old_left = tableau[i];
            tableau[i] = cur;
        }
        ++rows;

        double diag = tableau[cols];
        if (have_prev &&
            std::fabs(diag - prev_diag) < accept_rel * (1.0 + std::fabs(diag))) {
            out.converged = true;
            out.value = diag;
            out.prev = prev_diag;
            out.last = diag;
            return out;
        }
        prev_diag = diag;
        have_prev = true;
    }
    out.prev = prev_diag;
    out.last = prev_diag;
    return out;
}

} // namespace specular
