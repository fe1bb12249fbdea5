#include "helpers.hpp"

#include "activation.hpp"
#include "error.hpp"
#include "poly_nets.hpp"
#include "pu.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace sobnet;
using namespace testing;

namespace {

double binom(int n, int k)
{
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

} // namespace

TEST_SUITE("poly_nets")
{
    TEST_CASE("finite-difference coefficient identity")
    {
        for (int r = 1; r <= 4; ++r) {
            double fact = 1.0;
            for (int i = 2; i <= r; ++i) fact *= i;
            for (int k = 0; k <= r; ++k) {
                double sum = 0.0;
                for (int j = 0; j <= r; ++j) sum += ((j % 2) ? -1.0 : 1.0) * binom(r, j) * std::pow(j, k);
                double want = k == r ? ((r % 2) ? -fact : fact) : 0.0;
                CHECK(sum == doctest::Approx(want));
            }
        }
        CHECK(-2.0 * 1 + 1.0 * 4 == 2.0);
    }

    TEST_CASE("monomial gadget sizes")
    {
        Gadget g = monomial_net(lookup("tanh"), 2, 2, 0.01, 1.0);
        CHECK(g.net.depth() == 2);
        CHECK(stats(g.net).nonzero_weights <= 9);
        CHECK(g.cert.pass);
        for (int r = 1; r <= 3; ++r) CHECK(stats(monomial_net(lookup("tanh"), r, 3, 0.1, 1.0).net).nonzero_weights <= 3 * (r + 1));
    }

    TEST_CASE("sigmoid monomial r=1 meets 1e-3 in C1")
    {
        Gadget g = monomial_net(lookup("sigmoid"), 1, 1, 1e-3, 1.0);
        CHECK(g.cert.pass);
        double e0 = 0, e1 = 0;
        for (double x : linspace(-1, 1, 1001)) {
            e0 = std::max(e0, std::fabs(realize(g.net, {x})[0] - x));
            e1 = std::max(e1, std::fabs(derivative(g.net, {x}, {1}).value - 1.0));
        }
        CHECK(e0 <= 1e-3);
        CHECK(e1 <= 1e-3);
    }

    TEST_CASE("tanh monomials certify higher orders and scale like eps^-r")
    {
        for (int r = 1; r <= 3; ++r) {
            double w1 = 0, w2 = 0;
            for (double eps : {0.02, 0.01}) {
                Gadget g = monomial_net(lookup("tanh"), r, 3, eps, 1.0);
                CHECK(g.cert.pass);
                REQUIRE(g.cert.errors.size() == 4);
                // Independent grid check at each derivative order.
                for (double x : linspace(-1, 1, 41))
                    for (int k = 0; k <= 3; ++k) {
                        double want = 0.0;
                        if (k <= r) {
                            want = std::pow(x, r - k);
                            for (int i = 0; i < k; ++i) want *= (r - i);
                        }
                        double got = k == 0 ? realize(g.net, {x})[0] : derivative(g.net, {x}, {k}).value;
                        CHECK(std::fabs(got - want) <= eps);
                    }
                (eps == 0.02 ? w1 : w2) = stats(g.net).max_abs_weight;
            }
            CHECK(std::log(w2 / w1) / std::log(0.5) >= -r - 0.1);
        }
    }

    TEST_CASE("ReLU has no monomial gadget")
    {
        try {
            monomial_net(lookup("relu"), 2, 2, 0.1, 1.0);
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK((e.code() == Status::unsupported || e.code() == Status::order_exceeds_smoothness));
        }
        CHECK_THROWS_AS(gadget_x0(lookup("relu"), 2), Error);
    }

    TEST_CASE("identity gadget")
    {
        Gadget g = identity_net(lookup("tanh"), 3, 2, 1.0, 0.01);
        CHECK(g.net.depth() == 3);
        CHECK(stats(g.net).nonzero_weights <= 18);
        auto y = realize(g.net, {0.3, -0.8});
        CHECK(std::fabs(y[0] - 0.3) <= 0.01);
        CHECK(std::fabs(y[1] + 0.8) <= 0.01);

        Gadget s = identity_net(lookup("sigmoid"), 4, 1, 1.0, 1e-2);
        CHECK(s.net.depth() == 4);
        double e = 0;
        for (double x : linspace(-1, 1, 1001)) e = std::max(e, std::fabs(realize(s.net, {x})[0] - x));
        CHECK(e <= 1e-2);
        CHECK_THROWS_AS(identity_net(lookup("sigmoid"), 1, 1, 1.0, 0.1), Error);
    }

    TEST_CASE("multiplication gadget")
    {
        CHECK(((3.0 + 5.0) * (3.0 + 5.0) - (3.0 - 5.0) * (3.0 - 5.0)) / 4 == 15.0);
        Gadget g = mult_net(lookup("sigmoid"), 1e-2, 1.0);
        CHECK(g.net.depth() == 2);
        CHECK(stats(g.net).nonzero_weights <= 24);
        double e = 0, eg = 0;
        for (double x : linspace(-1, 1, 101))
            for (double y : linspace(-1, 1, 101)) {
                e = std::max(e, std::fabs(realize(g.net, {x, y})[0] - x * y));
                if (std::fmod(std::fabs(x * 100), 10) < 1e-9)
                    eg = std::max({eg, std::fabs(derivative(g.net, {x, y}, {1, 0}).value - y),
                                   std::fabs(derivative(g.net, {x, y}, {0, 1}).value - x)});
            }
        CHECK(e <= 1e-2);
        CHECK(eg <= 1e-2);
        CHECK(realize(g.net, {0.7, 0.0})[0] == 0.0);
        CHECK_THROWS_AS(mult_net(lookup("relu"), 0.1, 1.0), Error);
    }

    TEST_CASE("product_chain")
    {
        ActivationSpec s = lookup("sigmoid");
        DirectGadgets g(s, 1e-3, 2.0, 1);
        Network base1 = bump_network(s, 1, 4, {2}, 4.0);
        CHECK(same_network(product_chain(base1, g), base1));

        Network base = bump_network(s, 2, 4, {1, 2}, 4.0);
        Network chain = product_chain(base, g);
        CHECK(chain.output_dim() == 1);
        std::mt19937_64 rng(9);
        std::uniform_real_distribution<double> u(0, 1);
        double e = 0;
        for (int i = 0; i < 500; ++i) {
            double x = u(rng), y = u(rng);
            double want = bump_1d(s, 4.0, 12 * (x - 0.25)) * bump_1d(s, 4.0, 12 * (y - 0.5));
            e = std::max(e, std::fabs(realize(chain, {x, y})[0] - want));
        }
        CHECK(e <= 4 * 1e-3);
        CHECK(stats(chain).max_abs_weight <= 4 * std::max(stats(base).max_abs_weight, 1e6));
        for (const auto& c : g.certs()) CHECK(c.pass);
    }
}
