#pragma once

// Transport with a kinked profile: u(x, t) = g(sigma - n t b) where
// sigma = x_1 + ... + x_n and g(s) = a1 s for s >= 0, a2 s for s < 0. Off the
// kink line u solves the classical equation u_t + b sum_i u_{x_i} = 0; on the
// line the merged-derivative balance picks out one admissible constant c with
// d_t u + b d_x u = c in the merged sense.

#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "errors.hpp"
#include "ndfunction.hpp"
#include "numeric.hpp"
#include "specular1d.hpp"
#include "specularnd.hpp"

namespace specular {

// The admissible defect constant. a1 + a2 = 0 collapses every term to zero;
// otherwise b must be nonzero.
inline double transport_admissible_c(double a1, double a2, double b, int dim) {
    if (dim < 1) throw ValidationError("dimension must be >= 1");
    double scale = 1.0 + std::fabs(a1) + std::fabs(a2);
    if (std::fabs(a1 + a2) < kCombineZeroRel * scale) return 0.0;
    if (b == 0.0) throw b_zero();
    if (dim == 1) {
        double q1 = std::sqrt((a1 * a1 * b * b + 1.0) * (a2 * a2 * b * b + 1.0));
        double q2 = std::sqrt((a1 * a1 + 1.0) * (a2 * a2 + 1.0));
        return (1.0 - q1 - b * b * (1.0 - q2)) / ((a1 + a2) * b);
    }
    return combine_A(-a1 * b, -a2 * b) + std::pow(b, dim) * dim * combine_A(a1, a2);
}

struct TransportProblem {
    int dim = 1;
    double b = 0.0, a1 = 0.0, a2 = 0.0;
    std::optional<double> c; // must match the admissible constant when given
};

struct TransportSolution {
    int dim = 1;
    double b = 0.0, a1 = 0.0, a2 = 0.0;
    double c = 0.0;

    double eval(std::span<const double> x, double t) const {
        double sigma = 0.0;
        for (double xi : x) sigma += xi;
        double arg = sigma - dim * t * b;
        return (arg >= 0.0 ? a1 : a2) * arg;
    }

    // The same solution as a function of (x, t); only meaningful for dim 1,
    // where the kink-line balance is stated.
    NdFunction as_space_time_function() const {
        if (dim != 1)
            throw ValidationError("space-time view is defined for dimension 1");
        NdFunction nd;
        nd.dim = 2;
        TransportSolution self = *this;
        nd.value = [self](std::span<const double> p) {
            const double x[1] = {p[0]};
            return self.eval(std::span<const double>(x, 1), p[1]);
        };
        return nd;
    }
};

inline TransportSolution solve_transport(const TransportProblem& prob) {
    double required = transport_admissible_c(prob.a1, prob.a2, prob.b, prob.dim);
    if (prob.c && std::fabs(*prob.c - required) > 1e-9)
        throw inadmissible_c(*prob.c, required);
    return TransportSolution{prob.dim, prob.b, prob.a1, prob.a2, required};
}

struct TransportVerifyReport {
    bool ok = false;
    double max_offline_residual = 0.0; // classical equation away from the kink
    double max_online_residual = 0.0;  // merged-derivative balance on the kink
    bool online_checked = false;       // the balance is stated for dim 1
};

inline TransportVerifyReport verify_transport(const TransportSolution& sol,
                                              int samples = 16) {
    TransportVerifyReport rep;
    int n = sol.dim;

    // Off the kink the profile is linear, so central differences are exact up
    // to rounding. Sample points keep a safe distance from the kink surface.
    double h = 1e-6;
    std::vector<double> x(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < samples; ++i) {
        double t = 0.05 + 0.9 * i / std::max(1, samples - 1);
        for (int sgn_pick = -1; sgn_pick <= 1; sgn_pick += 2) {
            double sigma_target = n * t * sol.b + sgn_pick * (0.5 + 0.1 * i);
            for (int k = 0; k < n; ++k) x[static_cast<std::size_t>(k)] = sigma_target / n;
            double ut = (sol.eval(x, t + h) - sol.eval(x, t - h)) / (2.0 * h);
            double sum_ux = 0.0;
            for (int k = 0; k < n; ++k) {
                double saved = x[static_cast<std::size_t>(k)];
                x[static_cast<std::size_t>(k)] = saved + h;
                double up = sol.eval(x, t);
                x[static_cast<std::size_t>(k)] = saved - h;
                double um = sol.eval(x, t);
                x[static_cast<std::size_t>(k)] = saved;
                sum_ux += (up - um) / (2.0 * h);
            }
            double r = std::fabs(ut + sol.b * sum_ux);
            rep.max_offline_residual = std::max(rep.max_offline_residual, r);
        }
    }

    if (n == 1) {
        rep.online_checked = true;
        NdFunction nd = sol.as_space_time_function();
        for (int i = 0; i < samples; ++i) {
            double t = 0.1 + 0.8 * i / std::max(1, samples - 1);
            const double pt[2] = {t * sol.b, t};
            std::span<const double> at(pt, 2);
            double dx = specular_partial(nd, at, 0);
            double dt = specular_partial(nd, at, 1);
            double r = std::fabs(dt + sol.b * dx - sol.c);
            rep.max_online_residual = std::max(rep.max_online_residual, r);
        }
    }

    rep.ok = rep.max_offline_residual <= kTransportResidualTol &&
             (!rep.online_checked || rep.max_online_residual <= kTransportResidualTol);
    return rep;
}

} // namespace specular
