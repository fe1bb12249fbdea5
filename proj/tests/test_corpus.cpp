#include "helpers.hpp"

#include "corpus.hpp"
#include "error.hpp"
#include "metrics.hpp"

#include <doctest.h>

#include <cmath>

using namespace sobnet;
using namespace testing;

TEST_SUITE("corpus")
{
    TEST_CASE("named entries have unit W1inf norm at most")
    {
        for (const auto& name : corpus_names()) {
            Target t;
            REQUIRE(corpus_lookup(name, t));
            INFO(name);
            NormEstimate n = sobolev_norm(t, 1, INFINITY, t.d == 3 ? 16 : 0);
            CHECK(n.value <= 1.0);
            CHECK(n.value >= 0.5);
        }
        Target t;
        CHECK_FALSE(corpus_lookup("nope", t));
    }

    TEST_CASE("expression values")
    {
        Target f = parse_target("sin(2*pi*x)*exp(-y) + x^2/4 - cos(z)", 3);
        double x[3] = {0.2, 0.7, 0.4};
        double want = std::sin(2 * M_PI * 0.2) * std::exp(-0.7) + 0.04 / 4 - std::cos(0.4);
        CHECK(f.value(x) == doctest::Approx(want).epsilon(1e-14));
        CHECK_THROWS_AS(parse_target("x + ", 1), Error);
        CHECK_THROWS_AS(parse_target("y", 1), Error);
        CHECK_THROWS_AS(parse_target("log(x)", 1), Error);
    }

    TEST_CASE("jets match finite differences")
    {
        Target f = parse_target("exp(-8*((x-0.5)^2+(y-0.5)^2)) * sin(3*x*y) / (2 + y)", 2);
        JetLayout lay(2, 2);
        std::vector<double> c(lay.size());
        double x[2] = {0.3, 0.6};
        f.jet(x, lay, c.data());
        const double h = 1e-4;
        auto at = [&](double dx, double dy) {
            double p[2] = {x[0] + dx, x[1] + dy};
            return f.value(p);
        };
        CHECK(c[lay.index({0, 0})] == doctest::Approx(f.value(x)).epsilon(1e-14));
        CHECK(c[lay.index({1, 0})] == doctest::Approx((at(h, 0) - at(-h, 0)) / (2 * h)).epsilon(1e-7));
        CHECK(c[lay.index({0, 1})] == doctest::Approx((at(0, h) - at(0, -h)) / (2 * h)).epsilon(1e-7));
        double fxy = (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4 * h * h);
        CHECK(c[lay.index({1, 1})] == doctest::Approx(fxy).epsilon(1e-5));
        double fxx = (at(h, 0) - 2 * f.value(x) + at(-h, 0)) / (h * h);
        CHECK(2 * c[lay.index({2, 0})] == doctest::Approx(fxx).epsilon(1e-5));
    }

    TEST_CASE("compose and multiply jets")
    {
        JetLayout lay(1, 4);
        // exp(u) composed with u = 0.5 + h: coefficients e^0.5 / k!.
        double z[5] = {0.5, 1, 0, 0, 0}, g[5], out[5];
        for (double& v : g) v = std::exp(0.5);
        compose_jet(lay, z, g, out);
        double fact = 1;
        for (int k = 0; k <= 4; ++k) {
            if (k) fact *= k;
            CHECK(out[k] == doctest::Approx(std::exp(0.5) / fact).epsilon(1e-14));
        }
        double a[5] = {1, 1, 0, 0, 0}, b[5] = {1, -1, 0, 0, 0}, ab[5];
        multiply_jet(lay, a, b, ab);
        CHECK(ab[0] == 1.0);
        CHECK(ab[1] == 0.0);
        CHECK(ab[2] == -1.0);
    }

    TEST_CASE("constant target")
    {
        Target c = constant_target(2.5, 2);
        double x[2] = {0.1, 0.9};
        CHECK(c.value(x) == 2.5);
        JetLayout lay(2, 2);
        std::vector<double> co(lay.size());
        c.jet(x, lay, co.data());
        for (int i = 1; i < lay.size(); ++i) CHECK(co[i] == 0.0);
    }
}
