// speccalc: command-line front-end for the specular-derivative library.
//
// Every subcommand reads JSON documents, dispatches to the library, and emits
// JSON on stdout (or --out). Exit codes: 0 success, 2 validation failure
// (including expression syntax errors), 1 mathematical failure, with the
// error object serialized either way. Axis numbers are 1-based here and in
// all emitted JSON, matching the variable names x1..xn.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "specular/specular.hpp"

namespace {

using namespace specular;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<double> parse_csv_doubles(const std::string& text, const std::string& what) {
    std::vector<double> out;
    std::string token;
    std::istringstream ss(text);
    while (std::getline(ss, token, ',')) {
        try {
            std::size_t used = 0;
            double v = std::stod(token, &used);
            while (used < token.size() && std::isspace(static_cast<unsigned char>(token[used])))
                ++used;
            if (used != token.size()) throw std::invalid_argument(token);
            out.push_back(v);
        } catch (const std::exception&) {
            throw ValidationError(what + " must be a comma-separated list of numbers, got '" +
                                  text + "'");
        }
    }
    if (out.empty()) throw ValidationError(what + " must not be empty");
    return out;
}

double parse_one_double(const std::string& text, const std::string& what) {
    std::vector<double> v = parse_csv_doubles(text, what);
    if (v.size() != 1) throw ValidationError(what + " must be a single number");
    return v[0];
}

struct Output {
    std::optional<std::string> path;

    void emit(const std::string& text) const {
        if (path) {
            std::ofstream out(*path, std::ios::binary);
            if (!out) throw ValidationError("cannot write file: " + *path);
            out << text << '\n';
        } else {
            std::cout << text << '\n';
        }
    }
};

void write_point_value(JsonOut& j, const PointValue& pv) {
    switch (pv.state) {
    case PointState::Defined: j.value(pv.value); break;
    case PointState::Undefined: j.null(); break;
    case PointState::Unknown: j.value("unknown"); break;
    }
}

int run_derive(const std::string& fn, const std::string& at, int order,
               const std::string& route, std::optional<int> axis, const Output& out) {
    nlohmann::json doc = parse_json_text(read_file(fn));
    JsonOut j;
    if (sniff_document(doc) == DocKind::Nd) {
        NdFunction f = nd_from_json(doc);
        if (order != 1) throw ValidationError("--order is for one-variable functions");
        if (route != "formula") throw ValidationError("--route is for one-variable functions");
        if (!axis) throw ValidationError("--axis is required for multi-variable functions");
        if (*axis < 1 || *axis > f.dim)
            throw ValidationError("--axis must be between 1 and the dimension");
        std::vector<double> a = parse_csv_doubles(at, "--at");
        if (static_cast<int>(a.size()) != f.dim)
            throw ValidationError("--at arity does not match the dimension");
        j.begin_obj().key("value").value(specular_partial(f, a, *axis - 1)).end_obj();
    } else {
        PiecewiseFunction f = piecewise_from_json(doc);
        if (axis) throw ValidationError("--axis is for multi-variable functions");
        double x0 = parse_one_double(at, "--at");
        double v;
        if (order > 1)
            v = higher_specular_derivative(f, x0, order);
        else if (route == "criterion")
            v = specular_derivative_via_criterion(f, x0);
        else if (route == "formula")
            v = specular_derivative(f, x0);
        else
            throw ValidationError("--route must be 'formula' or 'criterion'");
        j.begin_obj().key("value").value(v).end_obj();
    }
    out.emit(j.str());
    return 0;
}

int run_tangent(const std::string& fn, const std::string& at, const Output& out) {
    PiecewiseFunction f = piecewise_from_json(parse_json_text(read_file(fn)));
    TangentLine t = specular_tangent_line(f, parse_one_double(at, "--at"));
    JsonOut j;
    j.begin_obj();
    j.key("slope").value(t.slope);
    j.key("anchor").begin_arr().value(t.x0).value(t.anchor).end_arr();
    j.end_obj();
    out.emit(j.str());
    return 0;
}

int run_gradient(const std::string& fn, const std::string& at, const Output& out) {
    NdFunction f = nd_from_json(parse_json_text(read_file(fn)));
    std::vector<double> a = parse_csv_doubles(at, "--at");
    if (static_cast<int>(a.size()) != f.dim)
        throw ValidationError("--at arity does not match the dimension");
    JsonOut j;
    j.begin_obj();
    j.key("right").numbers(right_gradient(f, a));
    j.key("left").numbers(left_gradient(f, a));
    j.key("specular").numbers(specular_gradient(f, a));
    j.end_obj();
    out.emit(j.str());
    return 0;
}

int run_directional(const std::string& fn, const std::string& at, const std::string& dir,
                    const Output& out) {
    NdFunction f = nd_from_json(parse_json_text(read_file(fn)));
    std::vector<double> a = parse_csv_doubles(at, "--at");
    std::vector<double> u = parse_csv_doubles(dir, "--dir");
    if (static_cast<int>(a.size()) != f.dim || static_cast<int>(u.size()) != f.dim)
        throw ValidationError("--at and --dir arity must match the dimension");
    DirectionalPair p = directional_semi(f, a, u);
    DirectionalExtrema ex = directional_extrema(f, a);
    JsonOut j;
    j.begin_obj();
    j.key("value").value(combine_A(p.right, p.left));
    j.key("right").value(p.right);
    j.key("left").value(p.left);
    j.key("bound").value(ex.bound);
    j.end_obj();
    out.emit(j.str());
    return 0;
}

int run_hyperplanes(const std::string& fn, const std::string& at, const Output& out) {
    NdFunction f = nd_from_json(parse_json_text(read_file(fn)));
    std::vector<double> a = parse_csv_doubles(at, "--at");
    if (static_cast<int>(a.size()) != f.dim)
        throw ValidationError("--at arity does not match the dimension");
    Classification cls = classify_differentiability(f, a);
    JsonOut j;
    j.begin_obj();
    j.key("classification")
        .value(cls.kind == NdClass::None ? "none"
                                         : cls.kind == NdClass::Weak ? "weak" : "strong");
    if (cls.kind != NdClass::None) j.key("w").value(cls.w + 1);
    j.key("readings_disagree").boolean(cls.readings_disagree);
    j.key("planes").begin_arr();
    std::vector<Hyperplane> planes;
    if (cls.kind != NdClass::None) planes = weak_tangent_hyperplanes(f, a);
    for (const Hyperplane& h : planes) hyperplane_to_json(j, h);
    j.end_arr();
    j.key("strong");
    if (planes.size() == 1)
        hyperplane_to_json(j, planes[0]);
    else
        j.null();
    j.end_obj();
    out.emit(j.str());
    return 0;
}

int run_integrate(const std::string& fn, const Output& out) {
    PiecewiseFunction f = piecewise_from_json(parse_json_text(read_file(fn)));
    IndefiniteIntegral ii = indefinite_integral(f);
    JsonOut j;
    j.begin_obj();
    j.key("domain").begin_arr().value(ii.F.lo()).value(ii.F.hi()).end_arr();
    j.key("breakpoints").numbers(ii.F.breakpoints());
    j.key("segments").begin_arr();
    for (const SegmentFn& seg : ii.F.segments()) {
        j.begin_obj();
        j.key("expr").null();
        j.key("dexpr");
        if (seg.dexpr_text.empty())
            j.null();
        else
            j.value(seg.dexpr_text);
        j.end_obj();
    }
    j.end_arr();
    j.key("values").begin_obj();
    for (std::size_t i = 0; i < ii.F.breakpoints().size(); ++i) {
        j.key(fmt17(ii.F.breakpoints()[i]));
        write_point_value(j, ii.F.breakpoint_values()[i]);
    }
    j.end_obj();
    j.key("constants").numbers(ii.constants);
    j.end_obj();
    out.emit(j.str());
    return 0;
}

int run_ode(const std::string& problem, std::optional<double> constant,
            std::optional<std::string> ic, const Output& out) {
    LinearOdeProblem prob = ode_from_json(parse_json_text(read_file(problem)));
    if (ic) {
        std::vector<double> given = parse_csv_doubles(*ic, "--ic");
        if (given.size() != 2) throw ValidationError("--ic must be 'x0,y0'");
        prob.ic = std::make_pair(given[0], given[1]);
    }
    if (constant && prob.ic)
        throw ValidationError("--constant conflicts with an initial condition");
    OdeSolution sol = constant ? solve_linear_ode_with_leading_constant(prob, *constant)
                               : solve_linear_ode(prob);
    JsonOut j;
    j.begin_obj();
    j.key("singular_points").numbers(sol.singular);
    j.key("constants").numbers(sol.constants);
    j.key("recovered").begin_obj();
    for (std::size_t i = 0; i < sol.singular.size(); ++i)
        j.key(fmt17(sol.singular[i])).value(sol.recovered[i]);
    j.end_obj();
    j.end_obj();
    out.emit(j.str());
    return 0;
}

int run_transport(std::optional<std::string> problem, std::optional<double> a1,
                  std::optional<double> a2, std::optional<double> b, int dim,
                  std::optional<double> c, const Output& out) {
    TransportProblem prob;
    if (problem) {
        prob = transport_from_json(parse_json_text(read_file(*problem)));
    } else {
        if (!a1 || !a2 || !b)
            throw ValidationError("transport needs --problem or all of --a1 --a2 --b");
        prob = TransportProblem{dim, *b, *a1, *a2, c};
    }
    TransportSolution sol = solve_transport(prob);
    JsonOut j;
    j.begin_obj().key("c").value(sol.c).end_obj();
    out.emit(j.str());
    return 0;
}

int run_plot(const std::string& fn, std::optional<std::string> at, int samples,
             std::optional<std::string> svg_path) {
    PiecewiseFunction f = piecewise_from_json(parse_json_text(read_file(fn)));
    SvgOptions opt;
    opt.samples = samples;
    if (at) opt.mark_at = parse_one_double(*at, "--at");
    std::string svg = render_svg(f, opt);
    if (svg_path) {
        std::ofstream outf(*svg_path, std::ios::binary);
        if (!outf) throw ValidationError("cannot write file: " + *svg_path);
        outf << svg;
    } else {
        std::cout << svg;
    }
    return 0;
}

int run_verify(const std::string& problem, int samples, const Output& out) {
    nlohmann::json doc = parse_json_text(read_file(problem));
    JsonOut j;
    switch (sniff_document(doc)) {
    case DocKind::Piecewise: {
        PiecewiseFunction f = piecewise_from_json(doc);
        FtcReport rep = verify_ftc(f, samples);
        j.begin_obj();
        j.key("kind").value("ftc");
        j.key("ok").boolean(rep.ok);
        j.key("start_value").value(rep.start_value);
        j.key("max_continuity_gap").value(rep.max_continuity_gap);
        j.key("max_residual").value(rep.max_residual);
        j.key("h1").begin_arr();
        for (const H1Record& r : rep.h1) {
            j.begin_obj();
            j.key("point").value(r.point);
            j.key("expected").value(r.expected);
            j.key("status").value(r.status == H1Status::Satisfied ? "satisfied"
                                  : r.status == H1Status::Assigned ? "assigned"
                                                                   : "violated");
            j.end_obj();
        }
        j.end_arr();
        j.end_obj();
        break;
    }
    case DocKind::Ode: {
        LinearOdeProblem prob = ode_from_json(doc);
        OdeSolution sol = solve_linear_ode(prob);
        OdeVerifyReport rep = verify_ode_solution(prob, sol, samples);
        j.begin_obj();
        j.key("kind").value("ode");
        j.key("ok").boolean(rep.ok);
        j.key("max_residual").value(rep.max_residual);
        j.key("max_continuity_gap").value(rep.max_continuity_gap);
        j.key("max_singular_residual").value(rep.max_singular_residual);
        j.key("ic_ok").boolean(rep.ic_ok);
        j.end_obj();
        break;
    }
    case DocKind::Transport: {
        TransportProblem prob = transport_from_json(doc);
        TransportSolution sol = solve_transport(prob);
        TransportVerifyReport rep = verify_transport(sol, samples);
        j.begin_obj();
        j.key("kind").value("transport");
        j.key("ok").boolean(rep.ok);
        j.key("c").value(sol.c);
        j.key("max_offline_residual").value(rep.max_offline_residual);
        j.key("max_online_residual").value(rep.max_online_residual);
        j.key("online_checked").boolean(rep.online_checked);
        j.end_obj();
        break;
    }
    default:
        throw ValidationError("verify does not handle this document kind");
    }
    out.emit(j.str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"specular-derivative calculator"};
    app.require_subcommand(1);

    std::string fn, at, dir, route = "formula";
    std::optional<std::string> out_path, svg_path, ic, problem_path;
    std::optional<double> constant, a1, a2, b, c;
    std::optional<int> axis;
    int order = 1, dim = 1, samples = 0;

    auto add_out = [&](CLI::App* cmd) { cmd->add_option("--out", out_path, "write JSON here"); };

    CLI::App* derive = app.add_subcommand("derive", "specular derivative at a point");
    derive->add_option("--fn", fn, "function document")->required();
    derive->add_option("--at", at, "evaluation point")->required();
    derive->add_option("--order", order, "derivative order");
    derive->add_option("--route", route, "formula or criterion");
    derive->add_option("--axis", axis, "1-based axis for multi-variable functions");
    add_out(derive);

    CLI::App* tangent = app.add_subcommand("tangent", "specular tangent line");
    tangent->add_option("--fn", fn)->required();
    tangent->add_option("--at", at)->required();
    add_out(tangent);

    CLI::App* gradient = app.add_subcommand("gradient", "one-sided and specular gradients");
    gradient->add_option("--fn", fn)->required();
    gradient->add_option("--at", at)->required();
    add_out(gradient);

    CLI::App* directional = app.add_subcommand("directional", "specular directional derivative");
    directional->add_option("--fn", fn)->required();
    directional->add_option("--at", at)->required();
    directional->add_option("--dir", dir, "unit direction u1,u2,...")->required();
    add_out(directional);

    CLI::App* hyper = app.add_subcommand("hyperplanes", "specular tangent hyperplanes");
    hyper->add_option("--fn", fn)->required();
    hyper->add_option("--at", at)->required();
    add_out(hyper);

    CLI::App* integrate = app.add_subcommand("integrate", "indefinite integral document");
    integrate->add_option("--fn", fn)->required();
    add_out(integrate);

    CLI::App* ode = app.add_subcommand("ode", "solve a first-order linear ODE");
    ode->add_option("--problem", problem_path, "problem document")->required();
    ode->add_option("--constant", constant, "leading run constant");
    ode->add_option("--ic", ic, "initial condition x0,y0");
    add_out(ode);

    CLI::App* transport = app.add_subcommand("transport", "admissible transport constant");
    transport->add_option("--problem", problem_path, "problem document");
    transport->add_option("--a1", a1);
    transport->add_option("--a2", a2);
    transport->add_option("--b", b);
    transport->add_option("--dim", dim);
    transport->add_option("--c", c, "candidate constant to validate");
    add_out(transport);

    CLI::App* plot = app.add_subcommand("plot", "render a function as SVG");
    plot->add_option("--fn", fn)->required();
    plot->add_option("--at", at, "overlay phototangent and tangent here");
    plot->add_option("--samples", samples)->default_val(512);
    plot->add_option("--svg", svg_path, "write SVG here instead of stdout");

    CLI::App* verify = app.add_subcommand("verify", "residual report for a document");
    verify->add_option("--problem,--fn", problem_path, "document to verify")->required();
    verify->add_option("--samples", samples)->default_val(128);
    add_out(verify);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        specular::JsonOut j;
        j.begin_obj();
        j.key("error").value("ValidationError");
        j.key("message").value(e.what());
        j.end_obj();
        std::cout << j.str() << '\n';
        return 2;
    }

    Output out{out_path};
    try {
        if (derive->parsed())
            return run_derive(fn, at, order, route, axis, out);
        if (tangent->parsed()) return run_tangent(fn, at, out);
        if (gradient->parsed()) return run_gradient(fn, at, out);
        if (directional->parsed()) return run_directional(fn, at, dir, out);
        if (hyper->parsed()) return run_hyperplanes(fn, at, out);
        if (integrate->parsed()) return run_integrate(fn, out);
        if (ode->parsed()) return run_ode(*problem_path, constant, ic, out);
        if (transport->parsed()) return run_transport(problem_path, a1, a2, b, dim, c, out);
        if (plot->parsed())
            return run_plot(fn, at.empty() ? std::nullopt : std::make_optional(at), samples,
                            svg_path);
        if (verify->parsed()) return run_verify(*problem_path, samples, out);
    } catch (const specular::Error& e) {
        std::cout << specular::error_to_json(e) << '\n';
        bool validation = e.kind() == "ValidationError" || e.kind() == "SyntaxError" ||
                          e.kind() == "UnknownFunction";
        return validation ? 2 : 1;
    }
    return 0;
}
