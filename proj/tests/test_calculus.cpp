#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "specular/calculus.hpp"
#include "specular/json_io.hpp"

using namespace specular;
using Catch::Approx;

namespace {

PiecewiseFunction from_text(const std::string& text) {
    return piecewise_from_json(parse_json_text(text));
}

PiecewiseFunction from_sample(const std::string& name) {
    std::ifstream in(std::string(SAMPLES_DIR) + "/" + name);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_text(ss.str());
}

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kSqrt5 = 2.23606797749979;

} // namespace

TEST_CASE("integral of the sign function is the vee") {
    PiecewiseFunction f = from_sample("sign.json");
    IndefiniteIntegral ii = indefinite_integral(f);

    CHECK(ii.F.eval(-1.0) == Approx(0.0).margin(1e-12));
    REQUIRE(ii.singular.size() == 1);
    CHECK(ii.singular[0] == 0.0);
    REQUIRE(ii.constants.size() == 2);
    CHECK(ii.constants[0] == Approx(0.0).margin(1e-12));
    CHECK(ii.constants[1] == Approx(-1.0).epsilon(1e-12));

    for (int i = 0; i <= 1000; ++i) {
        double x = -1.0 + 2.0 * i / 1000.0;
        CHECK(std::fabs(ii.F.eval(x) - (std::fabs(x) - 1.0)) <= 1e-9);
    }

    // derivative of the vee at the kink merges the slopes -1 and 1 to 0
    CHECK(std::fabs(specular_derivative(ii.F, 0.0)) <= 1e-12);
    // everywhere else the integrand comes back
    CHECK(specular_derivative(ii.F, 0.5) == Approx(1.0).epsilon(1e-9));
    CHECK(specular_derivative(ii.F, -0.5) == Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("integral is continuous across the jump") {
    PiecewiseFunction f = from_sample("step.json");
    IndefiniteIntegral ii = indefinite_integral(f);
    CHECK(ii.F.right_limit(0.0) == Approx(ii.F.left_limit(0.0)).margin(1e-12));
    CHECK(ii.F.eval(0.0) == Approx(ii.F.midgap(0.0)).margin(1e-12));
    CHECK(ii.F.eval(1.0) == Approx(1.0).epsilon(1e-9)); // integral of the unit step
    // derivative at the step merges 0 and 1
    CHECK(specular_derivative(ii.F, 0.0) == Approx(kSqrt2 - 1.0).epsilon(1e-9));
}

TEST_CASE("integral of a smooth function has no seams") {
    PiecewiseFunction f = from_sample("quad.json");
    IndefiniteIntegral ii = indefinite_integral(f);
    CHECK(ii.singular.empty());
    REQUIRE(ii.constants.size() == 1);
    CHECK(ii.constants[0] == 0.0);
    for (double x : {0.0, 1.0, 2.5, 6.0})
        CHECK(ii.F.eval(x) == Approx(x * x * x / 3.0).margin(1e-8));
}

TEST_CASE("periodic sawtooth integrates to shifted parabolas") {
    PiecewiseFunction f = from_sample("periodic5.json");
    IndefiniteIntegral ii = indefinite_integral(f);
    REQUIRE(ii.singular.size() == 5);

    for (int i = 0; i <= 600; ++i) {
        double x = 6.0 * i / 600.0;
        double j = std::floor(x);
        if (x == j && j > 0.0) j -= 1.0; // F on (j, j+1]
        double want = (x - j) * (x - j) + j;
        CHECK(std::fabs(ii.F.eval(x) - want) <= 1e-9);
    }

    for (int j = 1; j <= 5; ++j) {
        double d = specular_derivative(ii.F, static_cast<double>(j));
        CHECK(std::fabs(d - (kSqrt5 - 1.0) / 2.0) <= 1e-9);
    }
}

TEST_CASE("jump-value hypothesis states") {
    // sign stores 0 at its jump, and 0 is the merged value of -1 and 1
    H1Report sign_rep = check_H1(from_sample("sign.json"));
    REQUIRE(sign_rep.records.size() == 1);
    CHECK(sign_rep.ok);
    CHECK(sign_rep.records[0].status == H1Status::Satisfied);
    CHECK(sign_rep.records[0].expected == Approx(0.0).margin(1e-12));

    // the step leaves its jump value unknown
    H1Report step_rep = check_H1(from_sample("step.json"));
    REQUIRE(step_rep.records.size() == 1);
    CHECK(step_rep.ok); // assignments are not violations
    CHECK(step_rep.records[0].status == H1Status::Assigned);
    CHECK(step_rep.records[0].expected == Approx(kSqrt2 - 1.0).epsilon(1e-12));

    // a defined value away from the merge is a violation
    H1Report bad_rep = check_H1(from_text(
        R"({"domain":[-1,1],"breakpoints":[0],)"
        R"("segments":[{"expr":"-1"},{"expr":"1"}],"values":{"0":0.9}})"));
    REQUIRE(bad_rep.records.size() == 1);
    CHECK_FALSE(bad_rep.ok);
    CHECK(bad_rep.records[0].status == H1Status::Violated);

    // no jump, no records
    CHECK(check_H1(from_sample("relu.json")).records.empty());
}

TEST_CASE("assigning the hypothesis value is idempotent") {
    PiecewiseFunction f = from_sample("step.json");
    CHECK_FALSE(f.defined_at(0.0));

    PiecewiseFunction g = apply_H1(f);
    CHECK(g.defined_at(0.0));
    CHECK(g.eval(0.0) == Approx(kSqrt2 - 1.0).epsilon(1e-12));
    CHECK(check_H1(g).records[0].status == H1Status::Satisfied);

    PiecewiseFunction h = apply_H1(g);
    CHECK(h.eval(0.0) == g.eval(0.0));

    // defined values are left alone even when they violate the hypothesis
    PiecewiseFunction bad = from_text(
        R"({"domain":[-1,1],"breakpoints":[0],)"
        R"("segments":[{"expr":"-1"},{"expr":"1"}],"values":{"0":0.9}})");
    CHECK(apply_H1(bad).eval(0.0) == 0.9);
}

TEST_CASE("integral round trip verifies") {
    FtcReport sign_rep = verify_ftc(from_sample("sign.json"), 256);
    CHECK(sign_rep.ok);
    CHECK(sign_rep.start_value == Approx(0.0).margin(1e-12));
    CHECK(sign_rep.max_continuity_gap <= 1e-9);
    CHECK(sign_rep.max_residual <= 1e-6);

    FtcReport step_rep = verify_ftc(from_sample("step.json"), 128);
    CHECK(step_rep.ok);
    REQUIRE(step_rep.h1.size() == 1);
    CHECK(step_rep.h1[0].status == H1Status::Assigned);

    FtcReport per_rep = verify_ftc(from_sample("periodic5.json"), 128);
    CHECK(per_rep.ok);

    FtcReport smooth_rep = verify_ftc(from_sample("quad.json"), 64);
    CHECK(smooth_rep.ok);
}

TEST_CASE("run closures take limits at their ends and midgaps inside") {
    auto f = std::make_shared<const PiecewiseFunction>(from_sample("g_removable.json"));
    // no jump: single run over the whole domain, removable point healed
    auto view = run_view(f, -2.0, 2.0);
    CHECK(view(0.0) == Approx(0.0).margin(1e-12)); // midgap, not the stored 1
    CHECK(view(-2.0) == Approx(2.0).epsilon(1e-12));
    CHECK(view(2.0) == Approx(2.0).epsilon(1e-12));
    CHECK(view(1.0) == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("integral segments expose the integrand as derivative text") {
    PiecewiseFunction f = from_sample("sign.json");
    IndefiniteIntegral ii = indefinite_integral(f);
    REQUIRE(ii.F.segments().size() == 2);
    CHECK(ii.F.segments()[0].dexpr_text == "-1");
    CHECK(ii.F.segments()[1].dexpr_text == "1");
}

TEST_CASE("integral spans a continuous kink without splitting") {
    // breakpoint without a jump: one run covers the whole domain, and the
    // construction probes must tolerate the kink sitting inside a segment
    PiecewiseFunction f = from_text(
        R"json({"domain":[-3,3],"breakpoints":[1],)json"
        R"json("segments":[{"expr":"x^2","dexpr":"2*x"},)json"
        R"json({"expr":"5*x-4","dexpr":"5"}],"values":{"1":1}})json");
    REQUIRE(f.singular_points().empty());

    IndefiniteIntegral ii = indefinite_integral(f);
    CHECK(ii.singular.empty());
    REQUIRE(ii.F.segments().size() == 1);

    // closed form: (x^3+27)/3 up to the kink, then quadratic continuation
    CHECK(ii.F.eval(-1.0) == Approx(26.0 / 3.0).epsilon(1e-10));
    CHECK(ii.F.eval(1.0) == Approx(28.0 / 3.0).epsilon(1e-10));
    CHECK(ii.F.eval(3.0) == Approx(28.0 / 3.0 + 20.0 - 8.0).epsilon(1e-10));
    CHECK(specular_derivative(ii.F, 0.5) == Approx(0.25).margin(1e-8));

    FtcReport rep = verify_ftc(f, 128);
    CHECK(rep.ok);
}
