#include "helpers.hpp"

#include "activation.hpp"
#include "error.hpp"
#include "pu.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace sobnet;
using namespace testing;

namespace {

double sig(double x) { return 1.0 / (1.0 + std::exp(-x)); }
double sp(double x) { return std::log1p(std::exp(x)); }

} // namespace

TEST_SUITE("pu")
{
    TEST_CASE("bump_1d closed forms")
    {
        ActivationSpec s = lookup("sigmoid");
        CHECK(bump_1d(s, 4, 0.0) == doctest::Approx(sig(6) - sig(-6)).epsilon(1e-14));
        CHECK(bump_1d(s, 4, 0.0) == doctest::Approx(0.9950548).epsilon(1e-7));
        CHECK(bump_1d(s, 4, 3.0) == doctest::Approx(sig(18) - sig(6)).epsilon(1e-12));
        CHECK(bump_1d(s, 4, 3.0) == doctest::Approx(0.0024726).epsilon(1e-4));
        double soft = (sp(8) - sp(4) - sp(-4) + sp(-8)) / 4;
        CHECK(bump_1d(lookup("softplus"), 4, 0.0) == doctest::Approx(soft).epsilon(1e-14));
        // The closed form is 0.99109274; the quoted 0.9910921 agrees to six digits.
        CHECK(soft == doctest::Approx(0.9910921).epsilon(1e-6));
    }

    TEST_CASE("bump_1d derivatives match finite differences")
    {
        for (const char* name : {"sigmoid", "softplus", "tanh"}) {
            ActivationSpec spec = lookup(name);
            for (double x : {-1.2, -0.3, 0.4, 1.1}) {
                double d[3];
                bump_1d_derivs(spec, 4, x, 2, d);
                const double h = 1e-5;
                CHECK(d[0] == doctest::Approx(bump_1d(spec, 4, x)).epsilon(1e-14));
                CHECK(d[1] == doctest::Approx((bump_1d(spec, 4, x + h) - bump_1d(spec, 4, x - h)) / (2 * h)).epsilon(1e-6));
            }
        }
    }

    TEST_CASE("bump_network matches the formula in one dimension")
    {
        ActivationSpec s = lookup("sigmoid");
        const int N = 5;
        for (int m : {0, 2, 5}) {
            Network b = bump_network(s, 1, N, {m}, 8.0);
            CHECK(b.depth() == 2);
            CHECK(stats(b).max_abs_weight <= 4 * 8.0 * N);
            for (double x : linspace(0, 1, 200))
                CHECK(std::fabs(realize(b, {x})[0] - bump_1d(s, 8.0, 3 * N * (x - double(m) / N))) <= 1e-12);
        }
    }

    TEST_CASE("product of bump outputs equals the tensor formula")
    {
        std::mt19937_64 rng(2);
        std::uniform_real_distribution<double> u(0, 1);
        for (const char* name : {"sigmoid", "softplus"}) {
            ActivationSpec s = lookup(name);
            Network b = bump_network(s, 2, 4, {1, 3}, 6.0);
            for (int i = 0; i < 500; ++i) {
                double x = u(rng), y = u(rng);
                auto o = realize(b, {x, y});
                double direct = bump_1d(s, 6.0, 12 * (x - 0.25)) * bump_1d(s, 6.0, 12 * (y - 0.75));
                CHECK(std::fabs(o[0] * o[1] - direct) <= 1e-12);
            }
        }
    }

    TEST_CASE("select_scaling closed forms")
    {
        CHECK(select_scaling(DecayClass::exponential, 16, 1, INFINITY, 3, 0.5, 1.0) == doctest::Approx(4.0));
        CHECK(select_scaling(DecayClass::exact, 16, 1, INFINITY, 3, 0.5, 1.0) == 1.0);
        CHECK(select_scaling(DecayClass::polynomial, 2, 1, INFINITY, 3, 0.5, 1.0) == doctest::Approx(16.0));
        CHECK(select_scaling(DecayClass::polynomial, 2, 1, 2.0, 3, 0.5, 1.0) == doctest::Approx(32.0));
    }

    TEST_CASE("ReLU forms an exact partition")
    {
        PUFamily f = make_pu_family(lookup("relu"), 1, 5, 1.0);
        PUReport r = verify_pu(f, 0);
        CHECK(r.sum_deviation[0] <= 1e-12);
        CHECK(r.complement_max[0] <= 1e-12);
    }

    TEST_CASE("sigmoid partition deviation and complement")
    {
        PUFamily f = make_pu_family(lookup("sigmoid"), 1, 5, 8.0);
        PUReport r = verify_pu(f, 1);
        CHECK(r.sum_deviation[0] <= 1.3e-5);
        CHECK(r.sum_deviation[0] >= 1e-6);
        CHECK(r.complement_max[0] <= 7e-6);
        CHECK(r.grid_points > 0);
    }

    TEST_CASE("seminorm ratio is stable in N")
    {
        for (int k = 1; k <= 2; ++k) {
            std::vector<double> ratios;
            for (int N : {4, 8, 16, 32}) {
                PUFamily f = make_pu_family(lookup("sigmoid"), 1, N, 4.0);
                ratios.push_back(verify_pu(f, 2).seminorm_ratio[k]);
            }
            auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
            CHECK(*hi / *lo <= 1.1);
        }
    }

    TEST_CASE("two-dimensional family covers the unit square")
    {
        PUFamily f = make_pu_family(lookup("tanh"), 2, 3, 8.0);
        CHECK(f.indices.size() == 16);
        PUReport r = verify_pu(f, 1, 9);
        CHECK(r.sum_deviation[0] <= 1e-4);
    }

    TEST_CASE("verify_pu rejects orders above smoothness")
    {
        PUFamily f = make_pu_family(lookup("relu"), 1, 2, 1.0);
        CHECK_THROWS_AS(verify_pu(f, 2), Error);
    }
}
