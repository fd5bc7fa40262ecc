#pragma once

// Structured failures. Every expected failure mode carries a stable kind
// string plus named details; the CLI serializes these verbatim, so kinds and
// detail keys are part of the external contract.

#include <exception>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace specular {

class Error : public std::exception {
public:
    using Detail = std::pair<std::string, std::variant<double, long long, std::string>>;

    Error(std::string kind, std::vector<Detail> details = {})
        : kind_(std::move(kind)), details_(std::move(details)) {
        std::ostringstream os;
        os << kind_;
        if (!details_.empty()) {
            os << " {";
            bool first = true;
            for (const auto& [k, v] : details_) {
                if (!first) os << ", ";
                first = false;
                os << k << "=";
                if (std::holds_alternative<double>(v)) os << std::get<double>(v);
                else if (std::holds_alternative<long long>(v)) os << std::get<long long>(v);
                else os << std::get<std::string>(v);
            }
            os << "}";
        }
        what_ = os.str();
    }

    const std::string& kind() const { return kind_; }
    const std::vector<Detail>& details() const { return details_; }
    const char* what() const noexcept override { return what_.c_str(); }

private:
    std::string kind_;
    std::vector<Detail> details_;
    std::string what_;
};

// Bad input: malformed documents, out-of-range arguments, violated
// preconditions that a caller could have checked. The CLI maps these to
// exit code 2, everything else derived from Error to exit code 1.
class ValidationError : public Error {
public:
    explicit ValidationError(std::string message)
        : Error("ValidationError", {{"message", std::move(message)}}) {}
};

inline Error syntax_error(std::size_t position, std::string expected) {
    return Error("SyntaxError", {{"position", static_cast<long long>(position)},
                                 {"expected", std::move(expected)}});
}

inline Error unknown_function(std::string name) {
    return Error("UnknownFunction", {{"name", std::move(name)}});
}

inline Error out_of_domain(double x, double lo, double hi) {
    return Error("OutOfDomain", {{"x", x}, {"lo", lo}, {"hi", hi}});
}

inline Error undefined_at(double x) {
    return Error("UndefinedAt", {{"x", x}});
}

inline Error limit_diverges(double x0, int side) {
    return Error("LimitDiverges",
                 {{"x0", x0}, {"side", std::string(side > 0 ? "right" : "left")}});
}

inline Error semi_derivative_diverges(double x0, int side) {
    return Error("SemiDerivativeDiverges",
                 {{"x0", x0}, {"side", std::string(side > 0 ? "right" : "left")}});
}

inline Error not_specularly_differentiable(double x0, std::string reason) {
    return Error("NotSpecularlyDifferentiable",
                 {{"x0", x0}, {"reason", std::move(reason)}});
}

inline Error not_specularly_differentiable_level(double x0, long long level) {
    return Error("NotSpecularlyDifferentiable", {{"x0", x0}, {"level", level}});
}

inline Error no_convergence(double a, double b) {
    return Error("NoConvergence", {{"estimate_prev", a}, {"estimate_last", b}});
}

inline Error witness_not_found(std::string side) {
    return Error("WitnessNotFound", {{"side", std::move(side)}});
}

inline Error not_specularly_partial_differentiable(long long axis, std::string reason) {
    return Error("NotSpecularlyPartialDifferentiable",
                 {{"axis", axis}, {"reason", std::move(reason)}});
}

inline Error degenerate_p() { return Error("DegenerateP"); }

inline Error no_unique_weak_plane(long long count) {
    return Error("NoUniqueWeakPlane", {{"count", count}});
}

inline Error quadrature_failure(double lo, double hi) {
    return Error("QuadratureFailure", {{"lo", lo}, {"hi", hi}});
}

inline Error ic_on_singular_point(double x0) {
    return Error("InitialConditionOnSingularPoint", {{"x0", x0}});
}

inline Error inadmissible_c(double given, double required) {
    return Error("InadmissibleC", {{"given", given}, {"required", required}});
}

inline Error b_zero() { return Error("BZero"); }

} // namespace specular
