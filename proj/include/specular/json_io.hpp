#pragma once

// Document parsing and deterministic serialization.
//
// Inputs are parsed with nlohmann::json. Output never goes through a DOM:
// JsonOut emits fields in insertion order with %.17g numbers, so identical
// runs produce identical bytes.

#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "expression.hpp"
#include "ndfunction.hpp"
#include "numeric.hpp"
#include "ode.hpp"
#include "piecewise.hpp"
#include "transport.hpp"

namespace specular {

// ---------------------------------------------------------------------------
// Writer.

class JsonOut {
public:
    JsonOut& begin_obj() {
        sep();
        out_ << '{';
        stack_.push_back(false);
        return *this;
    }
    JsonOut& end_obj() {
        out_ << '}';
        stack_.pop_back();
        mark();
        return *this;
    }
    JsonOut& begin_arr() {
        sep();
        out_ << '[';
        stack_.push_back(false);
        return *this;
    }
    JsonOut& end_arr() {
        out_ << ']';
        stack_.pop_back();
        mark();
        return *this;
    }
    JsonOut& key(const std::string& k) {
        sep();
        write_string(k);
        out_ << ':';
        pending_value_ = true;
        return *this;
    }
    JsonOut& value(double v) {
        sep();
        out_ << fmt17(v);
        mark();
        return *this;
    }
    JsonOut& value(long long v) {
        sep();
        out_ << v;
        mark();
        return *this;
    }
    JsonOut& value(int v) { return value(static_cast<long long>(v)); }
    JsonOut& value(std::size_t v) { return value(static_cast<long long>(v)); }
    JsonOut& value(const std::string& v) {
        sep();
        write_string(v);
        mark();
        return *this;
    }
    JsonOut& value(const char* v) { return value(std::string(v)); }
    JsonOut& boolean(bool v) {
        sep();
        out_ << (v ? "true" : "false");
        mark();
        return *this;
    }
    JsonOut& null() {
        sep();
        out_ << "null";
        mark();
        return *this;
    }
    JsonOut& numbers(const std::vector<double>& v) {
        begin_arr();
        for (double x : v) value(x);
        return end_arr();
    }

    std::string str() const { return out_.str(); }

private:
    std::ostringstream out_;
    std::vector<bool> stack_; // per container: something already emitted
    bool pending_value_ = false;

    void sep() {
        if (pending_value_) {
            pending_value_ = false;
            return;
        }
        if (!stack_.empty() && stack_.back()) out_ << ',';
    }
    void mark() {
        if (!stack_.empty()) stack_.back() = true;
    }
    void write_string(const std::string& s) {
        out_ << '"';
        for (char c : s) {
            switch (c) {
            case '"': out_ << "\\\""; break;
            case '\\': out_ << "\\\\"; break;
            case '\n': out_ << "\\n"; break;
            case '\t': out_ << "\\t"; break;
            case '\r': out_ << "\\r"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out_ << buf;
                } else {
                    out_ << c;
                }
            }
        }
        out_ << '"';
    }
};

inline std::string error_to_json(const Error& e) {
    JsonOut j;
    j.begin_obj();
    j.key("error").value(e.kind());
    for (const auto& [k, v] : e.details()) {
        j.key(k);
        if (std::holds_alternative<double>(v)) j.value(std::get<double>(v));
        else if (std::holds_alternative<long long>(v)) j.value(std::get<long long>(v));
        else j.value(std::get<std::string>(v));
    }
    j.end_obj();
    return j.str();
}

// ---------------------------------------------------------------------------
// Parsing.

namespace detail {

inline double require_number(const nlohmann::json& j, const std::string& what) {
    if (!j.is_number()) throw ValidationError(what + " must be a number");
    return j.get<double>();
}

inline const nlohmann::json& require_field(const nlohmann::json& j, const char* name) {
    auto it = j.find(name);
    if (it == j.end()) throw ValidationError(std::string("missing field '") + name + "'");
    return *it;
}

} // namespace detail

inline PiecewiseFunction piecewise_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ValidationError("piecewise document must be an object");
    const auto& dom = detail::require_field(doc, "domain");
    if (!dom.is_array() || dom.size() != 2)
        throw ValidationError("'domain' must be [lo, hi]");
    double lo = detail::require_number(dom[0], "domain lo");
    double hi = detail::require_number(dom[1], "domain hi");

    std::vector<double> breakpoints;
    if (auto it = doc.find("breakpoints"); it != doc.end()) {
        if (!it->is_array()) throw ValidationError("'breakpoints' must be an array");
        for (const auto& b : *it)
            breakpoints.push_back(detail::require_number(b, "breakpoint"));
    }

    const auto& segs = detail::require_field(doc, "segments");
    if (!segs.is_array()) throw ValidationError("'segments' must be an array");
    std::vector<std::string> vars{"x"};
    std::vector<SegmentFn> fns;
    for (const auto& s : segs) {
        if (!s.is_object()) throw ValidationError("each segment must be an object");
        const auto& expr = detail::require_field(s, "expr");
        if (!expr.is_string()) throw ValidationError("segment 'expr' must be a string");
        SegmentFn fn;
        fn.expr_text = expr.get<std::string>();
        Expression tree = Expression::parse(fn.expr_text, vars);
        fn.value_limit_risk = tree.has_discontinuous_function();
        fn.value = [tree = std::move(tree)](double x) { return tree.eval1(x); };
        if (auto d = s.find("dexpr"); d != s.end() && !d->is_null()) {
            if (!d->is_string()) throw ValidationError("segment 'dexpr' must be a string");
            fn.dexpr_text = d->get<std::string>();
            Expression dtree = Expression::parse(fn.dexpr_text, vars);
            fn.deriv_limit_risk = dtree.has_discontinuous_function();
            fn.derivative = [dtree = std::move(dtree)](double x) { return dtree.eval1(x); };
        }
        fns.push_back(std::move(fn));
    }

    std::vector<PointValue> values(breakpoints.size(), PointValue::undefined());
    if (auto it = doc.find("values"); it != doc.end()) {
        if (!it->is_object()) throw ValidationError("'values' must be an object");
        for (const auto& [k, v] : it->items()) {
            double key;
            try {
                key = std::stod(k);
            } catch (...) {
                throw ValidationError("values key is not a number: " + k);
            }
            std::size_t idx = breakpoints.size();
            for (std::size_t i = 0; i < breakpoints.size(); ++i) {
                if (breakpoints[i] == key || std::fabs(breakpoints[i] - key) <= 1e-12) {
                    idx = i;
                    break;
                }
            }
            if (idx == breakpoints.size())
                throw ValidationError("values key does not name a breakpoint: " + k);
            if (v.is_null()) values[idx] = PointValue::undefined();
            else if (v.is_string() && v.get<std::string>() == "unknown")
                values[idx] = PointValue::unknown();
            else if (v.is_number()) values[idx] = PointValue::defined(v.get<double>());
            else throw ValidationError("values entry must be a number, null, or \"unknown\"");
        }
    }

    return PiecewiseFunction(lo, hi, std::move(breakpoints), std::move(fns),
                             std::move(values));
}

inline NdFunction nd_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ValidationError("function document must be an object");
    const auto& dim = detail::require_field(doc, "dim");
    if (!dim.is_number_integer()) throw ValidationError("'dim' must be an integer");
    const auto& expr = detail::require_field(doc, "expr");
    if (!expr.is_string()) throw ValidationError("'expr' must be a string");
    std::vector<std::string> exclude;
    if (auto it = doc.find("exclude"); it != doc.end()) {
        if (!it->is_array()) throw ValidationError("'exclude' must be an array");
        for (const auto& e : *it) {
            if (!e.is_string()) throw ValidationError("exclusions must be strings");
            exclude.push_back(e.get<std::string>());
        }
    }
    NdFunction f =
        NdFunction::from_expression(dim.get<int>(), expr.get<std::string>(), exclude);
    if (auto it = doc.find("values"); it != doc.end()) {
        if (!it->is_array()) throw ValidationError("'values' must be an array");
        for (const auto& entry : *it) {
            if (!entry.is_object())
                throw ValidationError("each value override must be an object");
            const auto& at = detail::require_field(entry, "at");
            if (!at.is_array() || static_cast<int>(at.size()) != f.dim)
                throw ValidationError("override 'at' must be a point of the right arity");
            std::vector<double> p;
            p.reserve(at.size());
            for (const auto& c : at) p.push_back(detail::require_number(c, "override coordinate"));
            f.add_override(std::move(p),
                           detail::require_number(detail::require_field(entry, "value"),
                                                  "override value"));
        }
    }
    return f;
}

inline LinearOdeProblem ode_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ValidationError("ode document must be an object");
    const auto& dom = detail::require_field(doc, "domain");
    if (!dom.is_array() || dom.size() != 2)
        throw ValidationError("'domain' must be [lo, hi]");
    LinearOdeProblem prob;
    prob.lo = detail::require_number(dom[0], "domain lo");
    prob.hi = detail::require_number(dom[1], "domain hi");
    const auto& p = detail::require_field(doc, "p");
    if (!p.is_string()) throw ValidationError("'p' must be an expression string");
    std::vector<std::string> vars{"x"};
    prob.p = Expression::parse(p.get<std::string>(), vars);
    prob.f = std::make_shared<const PiecewiseFunction>(
        piecewise_from_json(detail::require_field(doc, "f")));
    if (auto it = doc.find("ic"); it != doc.end() && !it->is_null()) {
        if (!it->is_array() || it->size() != 2)
            throw ValidationError("'ic' must be [x0, y0]");
        prob.ic = {detail::require_number((*it)[0], "ic x0"),
                   detail::require_number((*it)[1], "ic y0")};
    }
    return prob;
}

inline TransportProblem transport_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ValidationError("transport document must be an object");
    TransportProblem prob;
    const auto& dim = detail::require_field(doc, "dim");
    if (!dim.is_number_integer()) throw ValidationError("'dim' must be an integer");
    prob.dim = dim.get<int>();
    prob.b = detail::require_number(detail::require_field(doc, "b"), "b");
    prob.a1 = detail::require_number(detail::require_field(doc, "a1"), "a1");
    prob.a2 = detail::require_number(detail::require_field(doc, "a2"), "a2");
    if (auto it = doc.find("c"); it != doc.end() && !it->is_null())
        prob.c = detail::require_number(*it, "c");
    return prob;
}

enum class DocKind { Piecewise, Nd, Ode, Transport };

inline DocKind sniff_document(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ValidationError("document must be a JSON object");
    if (doc.contains("p") && doc.contains("f")) return DocKind::Ode;
    if (doc.contains("a1") && doc.contains("a2")) return DocKind::Transport;
    if (doc.contains("dim") && doc.contains("expr")) return DocKind::Nd;
    if (doc.contains("segments")) return DocKind::Piecewise;
    throw ValidationError("unrecognized document shape");
}

inline nlohmann::json parse_json_text(const std::string& text) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("invalid JSON: ") + e.what());
    }
}

inline void hyperplane_to_json(JsonOut& j, const Hyperplane& h) {
    j.begin_obj();
    j.key("anchor").numbers(h.anchor);
    j.key("coeffs").numbers(h.coeffs);
    j.key("offset").value(h.offset);
    j.end_obj();
}

} // namespace specular
