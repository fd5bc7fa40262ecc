#pragma once

// Scalar function of n real variables, evaluated through a callable, with an
// optional list of excluded loci g(x) == 0 where the function is undefined
// even if the callable would produce a number. Undefined evaluations surface
// as NaN so the sampling ladders can skip or reject them uniformly.

#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "expression.hpp"

namespace specular {

struct NdFunction {
    int dim = 0;
    std::function<double(std::span<const double>)> value;
    std::string expr_text; // empty when callable-backed
    std::vector<Expression> exclusions;
    // Assigned values at single points, taking precedence over the callable.
    std::vector<std::pair<std::vector<double>, double>> point_overrides;
    // Set when the body contains sgn or carries point overrides: evaluation
    // at a point then cannot stand in for the limit along an axis.
    bool value_limit_risk = false;

    double eval(std::span<const double> x) const {
        for (const auto& [p, v] : point_overrides) {
            bool hit = true;
            for (std::size_t i = 0; i < p.size(); ++i)
                if (x[i] != p[i]) { hit = false; break; }
            if (hit) return v;
        }
        for (const Expression& g : exclusions)
            if (g.eval(x) == 0.0) return std::nan("");
        return value(x);
    }

    void add_override(std::vector<double> at, double v) {
        if (static_cast<int>(at.size()) != dim)
            throw ValidationError("override point arity does not match dimension");
        point_overrides.emplace_back(std::move(at), v);
        value_limit_risk = true;
    }

    static NdFunction from_expression(int dim, const std::string& expr,
                                      const std::vector<std::string>& exclude = {}) {
        if (dim < 1) throw ValidationError("dimension must be >= 1");
        std::vector<std::string> vars;
        vars.reserve(static_cast<std::size_t>(dim));
        for (int i = 1; i <= dim; ++i) vars.push_back("x" + std::to_string(i));

        NdFunction f;
        f.dim = dim;
        f.expr_text = expr;
        Expression tree = Expression::parse(expr, vars);
        f.value_limit_risk = tree.has_discontinuous_function();
        f.value = [tree = std::move(tree)](std::span<const double> x) {
            return tree.eval(x);
        };
        for (const std::string& raw : exclude) {
            auto pos = raw.find("==");
            if (pos == std::string::npos)
                throw ValidationError("exclusion must have the form '<expr>==0': " + raw);
            std::string lhs = raw.substr(0, pos);
            std::string rhs = raw.substr(pos + 2);
            auto strip = [](std::string s) {
                std::size_t b = s.find_first_not_of(" \t");
                std::size_t e = s.find_last_not_of(" \t");
                return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
            };
            if (strip(rhs) != "0")
                throw ValidationError("exclusion right-hand side must be 0: " + raw);
            f.exclusions.push_back(Expression::parse(strip(lhs), vars));
        }
        return f;
    }

    // Section along one axis through the base point: t -> f(a + t e_axis).
    std::function<double(double)> axis_section(std::span<const double> a, int axis) const {
        std::vector<double> base(a.begin(), a.end());
        const NdFunction* self = this;
        return [self, base = std::move(base), axis](double t) {
            std::vector<double> p(base);
            p[static_cast<std::size_t>(axis)] += t;
            return self->eval(p);
        };
    }

    // Section along an arbitrary direction: t -> f(a + t u).
    std::function<double(double)> line_section(std::span<const double> a,
                                               std::span<const double> u) const {
        std::vector<double> base(a.begin(), a.end());
        std::vector<double> dir(u.begin(), u.end());
        const NdFunction* self = this;
        return [self, base = std::move(base), dir = std::move(dir)](double t) {
            std::vector<double> p(base);
            for (std::size_t i = 0; i < p.size(); ++i) p[i] += t * dir[i];
            return self->eval(p);
        };
    }
};

} // namespace specular
