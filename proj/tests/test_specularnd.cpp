#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "specular/json_io.hpp"
#include "specular/specularnd.hpp"

using namespace specular;
using Catch::Approx;

namespace {

NdFunction nd_sample(const std::string& name) {
    std::ifstream in(std::string(SAMPLES_DIR) + "/" + name);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return nd_from_json(parse_json_text(ss.str()));
}

constexpr double kSqrt5 = 2.23606797749979;

bool close(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

bool point_matches(const std::vector<double>& p, const std::vector<double>& q, double tol) {
    if (p.size() != q.size()) return false;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (!close(p[i], q[i], tol)) return false;
    return true;
}

} // namespace

TEST_CASE("axis partials of the folded absolute difference") {
    NdFunction f = nd_sample("absdiff2d.json");
    std::vector<double> origin{0.0, 0.0};
    double expect = (1.0 - kSqrt5) / 2.0;
    CHECK(specular_partial(f, origin, 0) == Approx(expect).epsilon(1e-12));
    CHECK(specular_partial(f, origin, 1) == Approx(expect).epsilon(1e-12));

    SemiPair ax0 = semi_specular_partial(f, origin, 0);
    CHECK(ax0.right == Approx(0.0).margin(1e-12));
    CHECK(ax0.left == Approx(-2.0).epsilon(1e-12));
}

TEST_CASE("sphere points of the folded absolute difference") {
    NdFunction f = nd_sample("absdiff2d.json");
    std::vector<double> origin{0.0, 0.0};
    std::vector<PPoint> P = compute_P(f, origin);
    REQUIRE(P.size() == 4);

    double r5 = std::sqrt(5.0);
    std::vector<std::vector<double>> expected = {
        {1.0, 0.0, 0.0},
        {-1.0 / r5, 0.0, 2.0 / r5},
        {0.0, 1.0 / r5, -2.0 / r5},
        {0.0, -1.0, 0.0},
    };
    for (const auto& want : expected) {
        bool found = false;
        for (const PPoint& p : P)
            if (point_matches(p.point, want, 1e-12)) found = true;
        CHECK(found);
    }
    // every point sits on the unit sphere around (a, mid)
    for (const PPoint& p : P) {
        double d2 = 0.0;
        for (std::size_t c = 0; c < 2; ++c) d2 += p.point[c] * p.point[c];
        d2 += p.point[2] * p.point[2];
        CHECK(std::sqrt(d2) == Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("four tangent hyperplane candidates at the fold") {
    NdFunction f = nd_sample("absdiff2d.json");
    std::vector<double> origin{0.0, 0.0};

    Classification cls = classify_differentiability(f, origin);
    CHECK(cls.kind == NdClass::Strong);
    CHECK_FALSE(cls.readings_disagree);
    REQUIRE(cls.V.size() == 2);
    CHECK(cls.mid == Approx(0.0).margin(1e-12));

    std::vector<Hyperplane> planes = weak_tangent_hyperplanes(f, origin);
    REQUIRE(planes.size() == 4);

    double s = std::sqrt(5.0);
    std::vector<std::pair<double, double>> expected = {
        {(1.0 - s) / 2.0, (s - 9.0) / 2.0},
        {(1.0 - s) / 2.0, (s - 1.0) / 2.0},
        {(s - 1.0) / 2.0, (1.0 - s) / 2.0},
        {(s - 9.0) / 2.0, (1.0 - s) / 2.0},
    };
    for (const auto& [c1, c2] : expected) {
        bool found = false;
        for (const Hyperplane& h : planes)
            if (close(h.coeffs[0], c1, 1e-9) && close(h.coeffs[1], c2, 1e-9)) found = true;
        CHECK(found);
    }
    for (const Hyperplane& h : planes) {
        CHECK(h.offset == Approx(0.0).margin(1e-12));
        CHECK(h.anchor == std::vector<double>{0.0, 0.0});
    }
    // emitted in lexicographic coefficient order
    for (std::size_t i = 1; i < planes.size(); ++i)
        CHECK(std::lexicographical_compare(planes[i - 1].coeffs.begin(),
                                           planes[i - 1].coeffs.end(),
                                           planes[i].coeffs.begin(),
                                           planes[i].coeffs.end()));

    try {
        strong_tangent_hyperplane(f, origin);
        FAIL("expected NoUniqueWeakPlane");
    } catch (const Error& e) {
        CHECK(e.kind() == "NoUniqueWeakPlane");
        CHECK(std::get<long long>(e.details()[0].second) == 4);
    }
}

TEST_CASE("cone with a displaced apex value still flattens") {
    NdFunction f = nd_sample("cone.json");
    std::vector<double> origin{0.0, 0.0};

    // the stored value at the apex must not leak into the limits
    CHECK(f.eval(origin) == 1.0);
    AxisLimits lim = axis_limits(f, origin, 0);
    CHECK(lim.right == Approx(0.0).margin(1e-12));
    CHECK(lim.left == Approx(0.0).margin(1e-12));
    CHECK(lim.mid == Approx(0.0).margin(1e-12));

    Classification cls = classify_differentiability(f, origin);
    CHECK(cls.kind == NdClass::Strong);

    std::vector<Hyperplane> planes = weak_tangent_hyperplanes(f, origin);
    REQUIRE(planes.size() == 1);
    CHECK(planes[0].coeffs[0] == Approx(0.0).margin(1e-9));
    CHECK(planes[0].coeffs[1] == Approx(0.0).margin(1e-9));
    CHECK(planes[0].offset == Approx(0.0).margin(1e-12));

    Hyperplane stg = strong_tangent_hyperplane(f, origin);
    std::vector<double> probe{0.3, -0.4};
    CHECK(stg.eval(probe) == Approx(0.0).margin(1e-9));
}

TEST_CASE("disagreeing axis readings classify as none") {
    NdFunction f = nd_sample("ratio2d.json");
    std::vector<double> origin{0.0, 0.0};

    AxisLimits ax0 = axis_limits(f, origin, 0);
    CHECK(ax0.mid == Approx(1.0).epsilon(1e-9));
    AxisLimits ax1 = axis_limits(f, origin, 1);
    CHECK(ax1.mid == Approx(0.0).margin(1e-9));

    Classification cls = classify_differentiability(f, origin);
    CHECK(cls.kind == NdClass::None);
    CHECK(cls.V.size() == 2);
    CHECK(cls.mid_classes.size() == 2);

    // both axes still contribute sphere points
    CHECK(compute_P(f, origin).size() == 4);

    CHECK_THROWS_AS(weak_tangent_hyperplanes(f, origin), ValidationError);
}

TEST_CASE("weak point of the three-variable mix") {
    NdFunction f = nd_sample("mixed3.json");
    std::vector<double> origin{0.0, 0.0, 0.0};

    Classification cls = classify_differentiability(f, origin);
    CHECK(cls.kind == NdClass::Weak);
    CHECK(cls.w == 1); // first usable axis, zero-based
    CHECK(cls.mid == Approx(0.0).margin(1e-12));
    CHECK_FALSE(cls.readings_disagree);
    REQUIRE(cls.V == std::vector<int>{1, 2});

    CHECK(compute_P(f, origin).size() == 4);

    std::vector<Hyperplane> planes = weak_tangent_hyperplanes(f, origin);
    REQUIRE(planes.size() == 1);
    for (double c : planes[0].coeffs) CHECK(c == Approx(0.0).margin(1e-9));
    CHECK(planes[0].offset == Approx(0.0).margin(1e-12));
}

TEST_CASE("sphere point count is twice the usable axis count") {
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> shift(-1.0, 1.0);
    NdFunction abs3 = nd_sample("abssum3.json");
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> a{shift(rng), shift(rng), shift(rng)};
        std::vector<int> V = compute_V(abs3, a);
        std::vector<PPoint> P = compute_P(abs3, a);
        CHECK(P.size() == 2 * V.size());
        for (const PPoint& p : P) {
            double d2 = 0.0;
            for (int c = 0; c < 3; ++c) {
                double diff = p.point[static_cast<std::size_t>(c)] -
                              a[static_cast<std::size_t>(c)];
                d2 += diff * diff;
            }
            // anchor height along this axis is the midgap value
            AxisLimits lim = axis_limits(abs3, a, p.axis);
            double dz = p.point[3] - lim.mid;
            CHECK(std::sqrt(d2 + dz * dz) == Approx(1.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("partial along a jump axis refuses with the axis number") {
    NdFunction f = NdFunction::from_expression(2, "sgn(x1) + x2");
    std::vector<double> origin{0.0, 0.0};
    try {
        specular_partial(f, origin, 0);
        FAIL("expected NotSpecularlyPartialDifferentiable");
    } catch (const Error& e) {
        CHECK(e.kind() == "NotSpecularlyPartialDifferentiable");
        CHECK(std::get<long long>(e.details()[0].second) == 1); // one-based
    }
    // the clean axis still differentiates
    CHECK(specular_partial(f, origin, 1) == Approx(1.0).epsilon(1e-9));
}

TEST_CASE("gradients of the absolute sum at the origin") {
    NdFunction f = nd_sample("abssum3.json");
    std::vector<double> origin{0.0, 0.0, 0.0};
    std::vector<double> r = right_gradient(f, origin);
    std::vector<double> l = left_gradient(f, origin);
    std::vector<double> s = specular_gradient(f, origin);
    for (int i = 0; i < 3; ++i) {
        CHECK(r[static_cast<std::size_t>(i)] == Approx(1.0).epsilon(1e-9));
        CHECK(l[static_cast<std::size_t>(i)] == Approx(-1.0).epsilon(1e-9));
        CHECK(s[static_cast<std::size_t>(i)] == Approx(0.0).margin(1e-9));
    }
}

TEST_CASE("directional derivative needs a unit direction") {
    NdFunction f = nd_sample("abssum3.json");
    std::vector<double> origin{0.0, 0.0, 0.0};
    std::vector<double> not_unit{1.0, 1.0, 0.0};
    CHECK_THROWS_AS(specular_directional(f, origin, not_unit), ValidationError);
    std::vector<double> wrong_dim{1.0, 0.0};
    CHECK_THROWS_AS(specular_directional(f, origin, wrong_dim), ValidationError);
}

TEST_CASE("directional bound and sign property on random directions") {
    NdFunction f = nd_sample("abssum3.json");
    std::vector<double> origin{0.0, 0.0, 0.0};
    DirectionalExtrema ex = directional_extrema(f, origin);
    CHECK(std::fabs(ex.bound - std::sqrt(3.0)) < 1e-12);
    CHECK_FALSE(ex.argmax.has_value()); // gradients point opposite ways
    CHECK_FALSE(ex.argmin.has_value());

    std::mt19937 rng(321);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> u{gauss(rng), gauss(rng), gauss(rng)};
        double n = std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
        if (n < 1e-3) continue;
        for (double& x : u) x /= n;
        DirectionalPair p = directional_semi(f, origin, u);
        double d = combine_A(p.right, p.left);
        REQUIRE(std::fabs(d) <= ex.bound + 1e-12);
        double sum = p.right + p.left;
        if (std::fabs(sum) > 1e-9) REQUIRE((d > 0) == (sum > 0));
    }
}

TEST_CASE("limit route confirms the gradient route") {
    NdFunction f = nd_sample("abssum3.json");
    std::vector<double> origin{0.0, 0.0, 0.0};
    std::vector<std::vector<double>> dirs = {
        {1.0, 0.0, 0.0},
        {0.0, -1.0, 0.0},
        {1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0)},
        {1.0 / 3.0, -2.0 / 3.0, 2.0 / 3.0},
    };
    for (const auto& u : dirs) {
        double fast = specular_directional(f, origin, u);
        double slow = specular_directional_via_limit(f, origin, u);
        CHECK(std::fabs(slow - fast) <= 1e-4 * (1.0 + std::fabs(fast)));
    }
}

TEST_CASE("limit route refuses when no classification holds") {
    NdFunction f = nd_sample("ratio2d.json");
    std::vector<double> origin{0.0, 0.0};
    std::vector<double> u{1.0, 0.0};
    CHECK_THROWS_AS(specular_directional_via_limit(f, origin, u), ValidationError);
}

TEST_CASE("extremal direction exists for a co-directed corner") {
    NdFunction f = NdFunction::from_expression(2, "(x1+abs(x1))/2 + (x2+abs(x2))/2");
    std::vector<double> origin{0.0, 0.0};
    DirectionalExtrema ex = directional_extrema(f, origin);
    CHECK(ex.bound == Approx(std::sqrt(2.0) / 2.0).epsilon(1e-9));
    REQUIRE(ex.argmax.has_value());
    double inv = 1.0 / std::sqrt(2.0);
    CHECK((*ex.argmax)[0] == Approx(inv).epsilon(1e-9));
    CHECK((*ex.argmax)[1] == Approx(inv).epsilon(1e-9));
    REQUIRE(ex.argmin.has_value());
    CHECK((*ex.argmin)[0] == Approx(-inv).epsilon(1e-9));

    // the maximum is the combined slope along the common direction; the
    // bound stays strict because the left gradient vanishes
    double attained = specular_directional(f, origin, *ex.argmax);
    CHECK(attained == Approx(combine_A(std::sqrt(2.0), 0.0)).epsilon(1e-9));
    CHECK(attained < ex.bound);
}

TEST_CASE("smooth functions recover the classical gradient") {
    NdFunction f = NdFunction::from_expression(2, "x1^2 + 3*x2");
    std::vector<double> at{1.0, -2.0};
    std::vector<double> g = specular_gradient(f, at);
    CHECK(g[0] == Approx(2.0).epsilon(1e-8));
    CHECK(g[1] == Approx(3.0).epsilon(1e-8));
    Classification cls = classify_differentiability(f, at);
    CHECK(cls.kind == NdClass::Strong);
    Hyperplane stg = strong_tangent_hyperplane(f, at);
    CHECK(stg.coeffs[0] == Approx(2.0).epsilon(1e-6));
    CHECK(stg.coeffs[1] == Approx(3.0).epsilon(1e-6));
    CHECK(stg.offset == Approx(f.eval(at)).epsilon(1e-9));
}
