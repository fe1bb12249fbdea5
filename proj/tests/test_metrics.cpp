#include "helpers.hpp"

#include "activation.hpp"
#include "corpus.hpp"
#include "error.hpp"
#include "metrics.hpp"
#include "poly_nets.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace sobnet;
using namespace testing;

TEST_SUITE("metrics")
{
    TEST_CASE("midpoint grid")
    {
        auto g = midpoint_grid(2, 4);
        REQUIRE(g.size() == 32);
        CHECK(g[0] == 0.125);
        CHECK(g[1] == 0.125);
        CHECK(g[3] == 0.375);
        CHECK(default_grid(1) == 512);
        CHECK(default_grid(2) == 128);
        CHECK(default_grid(3) == 32);
    }

    TEST_CASE("self distance and zero distance")
    {
        std::mt19937_64 rng(8);
        Network n = random_net(rng, {2, 4, 1}, "tanh");
        CHECK(sobolev_distance(network_target(n), n, 2, INFINITY, 32).value == 0.0);
        Network z(1, "sigmoid", {dense_layer(1, 1, {0.0}, {0.0}), dense_layer(1, 1, {0.0}, {0.0})});
        CHECK(sobolev_distance(constant_target(0.0, 1), z, 1, 2.0).value == 0.0);
        CHECK(network_distance(n, n, 1, INFINITY, 16).value == 0.0);
    }

    TEST_CASE("multiplication gadget distance")
    {
        Gadget g = mult_net(lookup("sigmoid"), 1e-2, 1.0);
        CHECK(sobolev_distance(parse_target("x*y", 2), g.net, 1, INFINITY, 64).value <= 1e-2);
    }

    TEST_CASE("norms against closed forms")
    {
        Target f = parse_target("sin(2*pi*x)", 1);
        NormEstimate inf = sobolev_norm(f, 1, INFINITY, 2000);
        CHECK(inf.value == doctest::Approx(2 * M_PI).epsilon(1e-4));
        NormEstimate l2 = sobolev_norm(f, 0, 2.0, 2000);
        // Trapezoid weights on midpoint nodes: within the quadrature tolerance.
        CHECK(l2.value == doctest::Approx(std::sqrt(0.5)).epsilon(1e-3));
        CHECK(inf.value >= sobolev_norm(f, 1, 2.0, 2000).value - 1e-3);
        CHECK(inf.per_order.size() == 2);
    }

    TEST_CASE("grid refinement is stable")
    {
        Target f;
        REQUIRE(corpus_lookup("gauss2", f));
        double a = sobolev_norm(f, 1, INFINITY, 64).value, b = sobolev_norm(f, 1, INFINITY, 128).value;
        CHECK(std::fabs(a - b) <= 0.05 * b);
    }

    TEST_CASE("exact and finite-difference modes agree")
    {
        std::mt19937_64 rng(12);
        Network n = random_net(rng, {1, 6, 1}, "sigmoid");
        Target f = parse_target("sin(2*pi*x)", 1);
        for (int k = 0; k <= 2; ++k) {
            double e = sobolev_distance(f, n, k, INFINITY, 200).value;
            double fd = sobolev_distance(f, n, k, INFINITY, 200, DerivMode::finite_difference).value;
            CHECK(std::fabs(e - fd) <= 1e-4 * e);
        }
    }

    TEST_CASE("fit_rate")
    {
        RateFit r = fit_rate({{0.1, 100}, {0.05, 200}, {0.025, 400}});
        CHECK(r.exponent == doctest::Approx(-1.0).epsilon(1e-12));
        CHECK(fit_rate({{10, 100}, {20, 200}, {40, 400}}).exponent == doctest::Approx(1.0).epsilon(1e-12));
        std::mt19937_64 rng(1);
        std::uniform_real_distribution<double> noise(0.95, 1.05);
        std::vector<std::pair<double, double>> pts;
        for (double x = 1; x <= 64; x *= 2) pts.push_back({x, 3 * std::pow(x, 1.5) * noise(rng)});
        CHECK(std::fabs(fit_rate(pts).exponent - 1.5) <= 0.1);
        CHECK_THROWS_AS(fit_rate({{1.0, 2.0}}), Error);
        CHECK_THROWS_AS(fit_rate({{1.0, 2.0}, {1.0, 3.0}}), Error);
    }
}
