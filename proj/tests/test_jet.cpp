#include "helpers.hpp"

#include "jet.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace sobnet;
using namespace testing;

TEST_SUITE("jet")
{
    TEST_CASE("layout sizes and indices")
    {
        JetLayout l(2, 3);
        CHECK(l.size() == 10);
        CHECK(l.alphas[0] == std::vector<int>{0, 0});
        for (int i = 0; i < l.size(); ++i) CHECK(l.index(l.alphas[i]) == i);
        for (const auto& p : l.products)
            for (int c = 0; c < 2; ++c) CHECK(l.alphas[p.a][c] + l.alphas[p.b][c] == l.alphas[p.c][c]);
        CHECK(JetLayout(3, 4).size() == 35);
        CHECK(multi_factorial({3, 2}) == 12.0);
    }

    TEST_CASE("jets of a sigmoid unit")
    {
        Network n(1, "sigmoid", {dense_layer(1, 1, {2.0}, {0.5}), dense_layer(1, 1, {1.0}, {0.0})});
        JetBatch jb = realize_jets(n, {0.25}, 4);
        JetLayout lay(1, 4);
        double d[5];
        lookup("sigmoid").derivatives(1.0, 4, d);
        for (int k = 0; k <= 4; ++k)
            CHECK(jb.derivative(lay, 0, {k}, 0) == doctest::Approx(d[k] * std::pow(2.0, k)).epsilon(1e-12));
    }

    TEST_CASE("mixed partials of a product net")
    {
        // x*y through an affine net is not available, so use tanh(x + 2y) with known derivatives.
        Network n(2, "tanh", {dense_layer(1, 2, {1.0, 2.0}, {0.0}), dense_layer(1, 1, {1.0}, {0.0})});
        double x = 0.3, y = -0.1, d[5];
        lookup("tanh").derivatives(x + 2 * y, 4, d);
        CHECK(derivative(n, {x, y}, {1, 1}).value == doctest::Approx(2 * d[2]).epsilon(1e-12));
        CHECK(derivative(n, {x, y}, {2, 2}).value == doctest::Approx(4 * d[4]).epsilon(1e-12));
        DerivativeResult hi = derivative(n, {x, y}, {3, 2});
        CHECK(hi.finite_difference);
        double d5 = 0;
        {
            // Fifth derivative of tanh via centered difference of the exact fourth.
            const double h = 1e-3;
            double a[5], b[5];
            lookup("tanh").derivatives(x + 2 * y + h, 4, a);
            lookup("tanh").derivatives(x + 2 * y - h, 4, b);
            d5 = (a[4] - b[4]) / (2 * h);
        }
        CHECK(hi.value == doctest::Approx(4 * d5).epsilon(1e-3));
    }

    TEST_CASE("batch jets agree with pointwise derivatives")
    {
        std::mt19937_64 rng(4);
        Network n = random_net(rng, {2, 4, 3, 1}, "softplus");
        std::vector<double> xs{0.1, 0.2, -0.5, 0.7, 0.9, -0.3};
        JetBatch jb = realize_jets(n, xs, 2);
        JetLayout lay(2, 2);
        for (int p = 0; p < 3; ++p) {
            std::vector<double> x{xs[2 * p], xs[2 * p + 1]};
            CHECK(jb.derivative(lay, 0, {0, 0}, p) == doctest::Approx(realize(n, x)[0]).epsilon(1e-14));
            CHECK(jb.derivative(lay, 0, {1, 1}, p) == doctest::Approx(derivative(n, x, {1, 1}).value).epsilon(1e-14));
        }
    }
}
