#include "helpers.hpp"

#include "error.hpp"
#include "jet.hpp"
#include "network.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace sobnet;
using namespace testing;

namespace {

Network affine(double a, double b, const std::string& act = "sigmoid")
{
    return Network(1, act, {dense_layer(1, 1, {a}, {b})});
}

Network two_layer(double a1, double b1, double a2, double b2, const std::string& act)
{
    return Network(1, act, {dense_layer(1, 1, {a1}, {b1}), dense_layer(1, 1, {a2}, {b2})});
}

} // namespace

TEST_SUITE("network")
{
    TEST_CASE("realize follows the layer scheme")
    {
        CHECK(realize(affine(2, 1), {3.0})[0] == 7.0);
        CHECK(realize(two_layer(1, -1, 1, 0, "relu"), {2.0})[0] == 1.0);
        CHECK(realize(two_layer(1, 0, 1, 0, "sigmoid"), {0.0})[0] == 0.5);
    }

    TEST_CASE("realize rejects bad input")
    {
        CHECK_THROWS_AS(realize(affine(2, 1), {1.0, 2.0}), Error);
        CHECK_THROWS_AS(realize(Network(1, "no_such_act", {dense_layer(1, 1, {1}, {0}), dense_layer(1, 1, {1}, {0})}), {0.5}), Error);
    }

    TEST_CASE("make_layer prunes zeros and rejects duplicates and non-finite values")
    {
        Layer l = make_layer(2, 2, {{1, 1, 3.0}, {0, 0, 0.0}, {0, 1, -2.0}}, {0.0, 1.0});
        REQUIRE(l.entries.size() == 2);
        CHECK(l.entries[0].row == 0);
        CHECK(l.entries[0].col == 1);
        CHECK_THROWS_AS(make_layer(1, 1, {{0, 0, 1.0}, {0, 0, 2.0}}, {0.0}), Error);
        CHECK_THROWS_AS(make_layer(1, 1, {{0, 0, NAN}}, {0.0}), Error);
        CHECK_THROWS_AS(make_layer(1, 1, {{0, 3, 1.0}}, {0.0}), Error);
    }

    TEST_CASE("stats counts nonzero weights and biases")
    {
        Network z(1, "sigmoid", {dense_layer(1, 1, {0.0}, {0.0}), dense_layer(1, 1, {0.0}, {0.0})});
        CHECK(stats(z).nonzero_weights == 0);
        Network n = two_layer(-3, 1, 2, 0, "tanh");
        NetworkStats s = stats(n);
        CHECK(s.nonzero_weights == 3);
        CHECK(s.layers == 2);
        CHECK(s.max_abs_weight == 3.0);
        CHECK(s.widths == std::vector<int>{1, 1, 1});
    }

    TEST_CASE("concat depth and composition")
    {
        std::mt19937_64 rng(7);
        Network outer = random_net(rng, {2, 4, 3, 1}, "tanh");
        Network inner = random_net(rng, {3, 5, 2}, "tanh");
        Network c = concat(outer, inner);
        CHECK(c.depth() == 4);
        for (double t : linspace(-1, 1, 9)) {
            std::vector<double> x{t, 0.5 * t, -t};
            CHECK(std::fabs(realize(c, x)[0] - realize(outer, realize(inner, x))[0]) <= 1e-12);
        }
        CHECK_THROWS_AS(concat(inner, outer), Error);
    }

    TEST_CASE("concat of single affine layers merges them")
    {
        Network c = concat(affine(2, 1), affine(3, -4));
        REQUIRE(c.depth() == 1);
        CHECK(c.layers()[0].entries[0].value == 6.0);
        CHECK(c.layers()[0].bias[0] == 2.0 * -4.0 + 1.0);
    }

    TEST_CASE("parallelize adds weights and stacks outputs")
    {
        std::mt19937_64 rng(3);
        Network a = random_net(rng, {1, 2, 1}, "sigmoid");  // 2 + 2 + 2 + 1 = 7
        Network b = Network(1, "sigmoid", {dense_layer(2, 1, {1.0, 0.0}, {0.25, 0.5}), dense_layer(1, 2, {1.0, -1.0}, {0.0})});
        CHECK(stats(b).nonzero_weights == 5);
        CHECK(stats(a).nonzero_weights == 7);
        Network p = parallelize({b, a});
        CHECK(stats(p).nonzero_weights == 12);
        CHECK(stats(p).max_abs_weight == std::max(stats(a).max_abs_weight, stats(b).max_abs_weight));
        for (double t : linspace(-2, 2, 7)) {
            auto y = realize(p, {t});
            CHECK(same_bits(y[0], realize(b, {t})[0]));
            CHECK(same_bits(y[1], realize(a, {t})[0]));
        }
        Network single = parallelize({a});
        CHECK(same_bits(realize(single, {0.3})[0], realize(a, {0.3})[0]));
    }

    TEST_CASE("selector picks coordinates")
    {
        Network s = selector(3, {2, 0}, "sigmoid");
        auto y = realize(s, {1.0, 2.0, 3.0});
        CHECK(y == std::vector<double>{3.0, 1.0});
    }

    TEST_CASE("derivative of affine and sigmoid nets")
    {
        Network a = concat(affine(3, 1), affine(-2, 5));
        CHECK(derivative(a, {0.7}, {1}).value == doctest::Approx(-6.0).epsilon(1e-15));
        Network s = two_layer(1, 0, 1, 0, "sigmoid");
        DerivativeResult r = derivative(s, {0.0}, {1});
        CHECK(r.value == doctest::Approx(0.25).epsilon(1e-15));
        CHECK_FALSE(r.finite_difference);
    }

    TEST_CASE("derivative flags a sampled ReLU kink")
    {
        Network r = two_layer(1, 0, 1, 0, "relu");
        DerivativeResult d = derivative(r, {0.0}, {1});
        CHECK(d.one_sided);
        CHECK_FALSE(derivative(r, {0.5}, {1}).one_sided);
    }

    TEST_CASE("exact derivatives match finite differences on random sigmoid nets")
    {
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> u(-1, 1);
        for (int trial = 0; trial < 20; ++trial) {
            Network n = random_net(rng, {2, 5, 4, 1}, "sigmoid");
            std::vector<double> x{u(rng), u(rng)};
            for (int i = 0; i < 2; ++i) {
                std::vector<int> alpha{i == 0, i == 1};
                const double h = 1e-4;
                std::vector<double> xp = x, xm = x, xp2 = x, xm2 = x;
                xp[i] += h;
                xm[i] -= h;
                xp2[i] += 2 * h;
                xm2[i] -= 2 * h;
                double fd = (8 * (realize(n, xp)[0] - realize(n, xm)[0]) - (realize(n, xp2)[0] - realize(n, xm2)[0])) /
                            (12 * h);
                double ex = derivative(n, x, alpha).value;
                CHECK(std::fabs(ex - fd) <= 1e-5 * std::max(std::fabs(fd), 1e-3));
            }
        }
    }

    TEST_CASE("JSON roundtrip is bit exact")
    {
        std::mt19937_64 rng(5);
        Network n = random_net(rng, {2, 3, 1}, "softplus", 10.0);
        Network m = from_json(to_json(n));
        CHECK(same_network(n, m));
        for (double v : {0.1, -3.0e-300, 1.0 / 3.0, 6.02e23}) CHECK(same_bits(parse_hexfloat(hexfloat(v)), v));
        CHECK_THROWS(from_json("{\"activation\": \"sigmoid\"}"));
    }
}
