#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "specular/json_io.hpp"
#include "specular/transport.hpp"

using namespace specular;
using Catch::Approx;

namespace {

TransportProblem transport_sample(const std::string& name) {
    std::ifstream in(std::string(SAMPLES_DIR) + "/" + name);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return transport_from_json(parse_json_text(ss.str()));
}

} // namespace

TEST_CASE("admissible constant closed form") {
    // a1 = 4, a2 = 1, b = 2, one space dimension
    double want = (4.0 * std::sqrt(34.0) - 5.0 * std::sqrt(13.0) - 3.0) / 10.0;
    CHECK(std::fabs(transport_admissible_c(4.0, 1.0, 2.0, 1) - want) <= 1e-12);
    CHECK(transport_admissible_c(4.0, 1.0, 2.0, 1) == Approx(0.2296051202061257));
}

TEST_CASE("one-dimensional closed form equals the merged-slope form") {
    // for n = 1 the dedicated formula and the generic expression
    // combine_A(-a1 b, -a2 b) + b combine_A(a1, a2) must agree
    std::mt19937 rng(2026);
    std::uniform_real_distribution<double> coef(-5.0, 5.0);
    std::uniform_real_distribution<double> speed(0.1, 4.0);
    int checked = 0;
    while (checked < 20) {
        double a1 = coef(rng), a2 = coef(rng);
        double b = speed(rng) * (rng() % 2 ? 1.0 : -1.0);
        // both routes divide by a1 + a2; keep it away from cancellation so
        // rounding differences stay below the comparison margin
        if (std::fabs(a1 + a2) < 0.1) continue;
        ++checked;
        double dedicated = transport_admissible_c(a1, a2, b, 1);
        double generic = combine_A(-a1 * b, -a2 * b) + b * combine_A(a1, a2);
        CHECK(dedicated == Approx(generic).margin(1e-11));
    }
}

TEST_CASE("odd profile needs no defect") {
    CHECK(transport_admissible_c(1.0, -1.0, 3.0, 1) == 0.0);
    CHECK(transport_admissible_c(2.5, -2.5, 0.7, 2) == 0.0);
    // and the zero-speed guard is skipped in that case
    CHECK(transport_admissible_c(1.0, -1.0, 0.0, 1) == 0.0);
}

TEST_CASE("zero speed with a genuine kink is rejected") {
    try {
        transport_admissible_c(4.0, 1.0, 0.0, 1);
        FAIL("expected BZero");
    } catch (const Error& e) {
        CHECK(e.kind() == "BZero");
    }
    CHECK_THROWS_AS(transport_admissible_c(1.0, 2.0, 3.0, 0), ValidationError);
}

TEST_CASE("solver validates a supplied constant") {
    TransportProblem prob = transport_sample("transport_example.json");
    TransportSolution sol = solve_transport(prob);
    CHECK(sol.c == Approx(0.2296051202061257).margin(1e-12));

    prob.c = sol.c;
    CHECK(solve_transport(prob).c == sol.c);

    prob.c = 0.5;
    try {
        solve_transport(prob);
        FAIL("expected InadmissibleC");
    } catch (const Error& e) {
        CHECK(e.kind() == "InadmissibleC");
        CHECK(std::get<double>(e.details()[0].second) == 0.5);
    }
}

TEST_CASE("solution rides the characteristic") {
    TransportSolution sol = solve_transport(transport_sample("transport_example.json"));
    // u(x, t) = g(x - 2t), g(s) = 4s for s >= 0, s for s < 0
    std::vector<double> x{1.0};
    CHECK(sol.eval(x, 0.0) == Approx(4.0));
    x[0] = -1.0;
    CHECK(sol.eval(x, 0.0) == Approx(-1.0));
    x[0] = 3.0;
    CHECK(sol.eval(x, 1.0) == Approx(4.0)); // 3 - 2 = 1, positive side
    x[0] = 1.0;
    CHECK(sol.eval(x, 1.0) == Approx(-1.0)); // 1 - 2 = -1, negative side
    x[0] = 2.0;
    CHECK(sol.eval(x, 1.0) == 0.0); // on the kink line
}

TEST_CASE("higher-dimensional profile sums its coordinates") {
    TransportProblem prob{3, 0.5, 2.0, -1.0, std::nullopt};
    TransportSolution sol = solve_transport(prob);
    std::vector<double> x{1.0, 2.0, 3.0}; // sigma = 6, n t b = 3
    CHECK(sol.eval(x, 2.0) == Approx(2.0 * 3.0));
    CHECK(sol.eval(x, 6.0) == Approx(-1.0 * -3.0));
}

TEST_CASE("verification passes on and off the kink line") {
    TransportSolution sol = solve_transport(transport_sample("transport_example.json"));
    TransportVerifyReport rep = verify_transport(sol, 16);
    CHECK(rep.ok);
    CHECK(rep.online_checked);
    CHECK(rep.max_offline_residual <= 1e-8);
    CHECK(rep.max_online_residual <= 1e-8);
}

TEST_CASE("verification in higher dimensions checks the classical part") {
    TransportProblem prob{2, 1.5, 3.0, 1.0, std::nullopt};
    TransportSolution sol = solve_transport(prob);
    TransportVerifyReport rep = verify_transport(sol, 8);
    CHECK(rep.ok);
    CHECK_FALSE(rep.online_checked);
    CHECK(rep.max_offline_residual <= 1e-8);
    CHECK_THROWS_AS(sol.as_space_time_function(), ValidationError);
}

TEST_CASE("space-time view exposes the merged balance") {
    TransportSolution sol = solve_transport(transport_sample("transport_example.json"));
    NdFunction nd = sol.as_space_time_function();
    // on the kink line x = 2t the balance u_t + b u_x equals the admissible c
    std::vector<double> at{1.0, 0.5};
    double dx = specular_partial(nd, at, 0);
    double dt = specular_partial(nd, at, 1);
    CHECK(std::fabs(dt + sol.b * dx - sol.c) <= 1e-8);
    // off the line the classical equation holds and the defect vanishes
    std::vector<double> off{2.0, 0.5};
    double dx_off = specular_partial(nd, off, 0);
    double dt_off = specular_partial(nd, off, 1);
    CHECK(std::fabs(dt_off + sol.b * dx_off) <= 1e-8);
}

TEST_CASE("problem document parsing") {
    TransportProblem prob = transport_sample("transport_example.json");
    CHECK(prob.dim == 1);
    CHECK(prob.b == 2.0);
    CHECK(prob.a1 == 4.0);
    CHECK(prob.a2 == 1.0);
    CHECK_FALSE(prob.c.has_value());
    CHECK_THROWS_AS(transport_from_json(parse_json_text(R"({"a1":1})")), ValidationError);
}
