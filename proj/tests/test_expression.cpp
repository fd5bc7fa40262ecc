#include <catch2/catch_amalgamated.hpp>

#include <string>
#include <vector>

#include "specular/expression.hpp"

using namespace specular;
using Catch::Approx;

namespace {

Expression px(const std::string& text) {
    std::vector<std::string> vars{"x"};
    return Expression::parse(text, vars);
}

Expression pn(const std::string& text, int dim) {
    std::vector<std::string> vars;
    for (int i = 1; i <= dim; ++i) vars.push_back("x" + std::to_string(i));
    return Expression::parse(text, vars);
}

} // namespace

TEST_CASE("arithmetic and precedence") {
    CHECK(px("2+3*4^2").eval1(0.0) == Approx(50.0));
    // unary minus is part of the atom, so it binds tighter than the caret
    CHECK(px("-x^2").eval1(3.0) == Approx(9.0));
    CHECK(px("-(x^2)").eval1(3.0) == Approx(-9.0));
    CHECK(px("(2+3)*4").eval1(0.0) == Approx(20.0));
    CHECK(px("2^3^2").eval1(0.0) == Approx(512.0)); // right assoc
    CHECK(px("6/3/2").eval1(0.0) == Approx(1.0));   // left assoc
    CHECK(px("2-3-4").eval1(0.0) == Approx(-5.0));
}

TEST_CASE("variables resolve by declaration order") {
    std::vector<double> at{2.0, 3.0};
    CHECK(pn("x1*10 + x2", 2).eval(at) == Approx(23.0));
}

TEST_CASE("builtin functions") {
    CHECK(px("abs(-3)").eval1(0.0) == Approx(3.0));
    CHECK(px("sgn(-2)").eval1(0.0) == Approx(-1.0));
    CHECK(px("sgn(0)").eval1(0.0) == Approx(0.0));
    CHECK(px("sgn(5)").eval1(0.0) == Approx(1.0));
    CHECK(px("sqrt(x)").eval1(9.0) == Approx(3.0));
    CHECK(px("exp(1)").eval1(0.0) == Approx(2.718281828459045));
    CHECK(px("ln(exp(2))").eval1(0.0) == Approx(2.0));
    CHECK(px("sin(0)").eval1(0.0) == Approx(0.0));
    CHECK(px("cos(0)").eval1(0.0) == Approx(1.0));
    CHECK(px("tan(0)").eval1(0.0) == Approx(0.0));
    CHECK(px("atan(1)").eval1(0.0) == Approx(0.7853981633974483));
}

TEST_CASE("whitespace is ignored") {
    CHECK(px("  2 * ( x + 1 ) ").eval1(2.0) == Approx(6.0));
}

TEST_CASE("malformed operator reports byte offset") {
    try {
        px("x^^2");
        FAIL("expected SyntaxError");
    } catch (const Error& e) {
        CHECK(e.kind() == "SyntaxError");
        REQUIRE(!e.details().empty());
        CHECK(e.details()[0].first == "position");
        CHECK(std::get<long long>(e.details()[0].second) == 2);
    }
}

TEST_CASE("structurally broken inputs rejected") {
    CHECK_THROWS_AS(px("x+1)"), Error);
    CHECK_THROWS_AS(px("(x+1"), Error);
    CHECK_THROWS_AS(px(""), Error);
    CHECK_THROWS_AS(px("x 2"), Error);
}

TEST_CASE("unknown function has its own kind") {
    try {
        px("sinh(x)");
        FAIL("expected UnknownFunction");
    } catch (const Error& e) {
        CHECK(e.kind() == "UnknownFunction");
        CHECK(std::get<std::string>(e.details()[0].second) == "sinh");
    }
}

TEST_CASE("undeclared variable rejected") {
    CHECK_THROWS_AS(pn("x1+y", 1), Error);
}

TEST_CASE("source text round-trips") {
    CHECK(px("2*(x-1)").source() == "2*(x-1)");
}

TEST_CASE("discontinuous function detection") {
    CHECK(px("sgn(x)+1").has_discontinuous_function());
    CHECK_FALSE(px("x^2+abs(x)").has_discontinuous_function());
}

TEST_CASE("ieee semantics at poles") {
    CHECK(std::isinf(px("1/x").eval1(0.0)));
    CHECK(std::isnan(px("sqrt(x)").eval1(-1.0)));
}
