#include "activation.hpp"
#include "error.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace sobnet;

TEST_SUITE("activation")
{
    TEST_CASE("catalog rows")
    {
        auto cat = catalog();
        CHECK(cat.size() == 12);
        ActivationSpec s = lookup("sigmoid");
        CHECK(s.tau == 0);
        CHECK(s.A == 0.0);
        CHECK(s.B == 1.0);
        CHECK(s.decay == DecayClass::exponential);
        ActivationSpec ss = lookup("softsign");
        CHECK(ss.tau == 0);
        CHECK(ss.A == -1.0);
        CHECK(ss.B == 1.0);
        CHECK(ss.decay == DecayClass::polynomial);
        ActivationSpec sp = lookup("softplus");
        CHECK(sp.tau == 1);
        CHECK(sp.A == 0.0);
        CHECK(sp.B == 1.0);
        CHECK(sp.decay == DecayClass::exponential);
        for (const auto& c : cat) {
            CHECK(c.A < c.B);
            CHECK(c.D > 0);
        }
    }

    TEST_CASE("lookup errors")
    {
        try {
            lookup("gelu");
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.code() == Status::unknown_activation);
        }
    }

    TEST_CASE("eval examples")
    {
        CHECK(eval("tanh", 0.0, 0).values[0] == 0.0);
        CHECK(eval("sigmoid", 0.0, 1).values[1] == doctest::Approx(0.25).epsilon(1e-15));
        CHECK(eval("elu1", -1.0, 2).values[2] == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
        try {
            eval("relu", 1.0, 2);
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.code() == Status::order_exceeds_smoothness);
        }
        CHECK(eval("relu", 0.0, 1).one_sided);
    }

    TEST_CASE("eval derivatives match finite differences away from kinks")
    {
        for (const auto& spec : catalog()) {
            const int top = std::min(spec.max_order(), 3);
            for (double x : {-2.3, -0.7, 0.4, 1.9}) {
                if (std::fabs(x - spec.kink) < 0.1 && spec.kink_order < 100) continue;
                auto v = eval(spec.name, x, top).values;
                for (int k = 1; k <= top; ++k) {
                    const double h = 1e-4;
                    auto lo = eval(spec.name, x - h, k - 1).values, hi = eval(spec.name, x + h, k - 1).values;
                    auto lo2 = eval(spec.name, x - 2 * h, k - 1).values, hi2 = eval(spec.name, x + 2 * h, k - 1).values;
                    double fd = (8 * (hi[k - 1] - lo[k - 1]) - (hi2[k - 1] - lo2[k - 1])) / (12 * h);
                    INFO(spec.name << " order " << k << " at " << x);
                    CHECK(std::fabs(v[k] - fd) <= 1e-6 * std::max(1.0, std::fabs(v[k])));
                }
            }
        }
    }

    TEST_CASE("boundedness flags match sampled extremes")
    {
        for (const auto& spec : catalog()) {
            double m = 0.0;
            for (int i = 0; i <= 2000; ++i) m = std::max(m, std::fabs(spec.value(-1e6 + 1e3 * i)));
            INFO(spec.name);
            if (spec.bounded)
                CHECK(m <= 10.0);
            else
                CHECK(m >= 1e5);
        }
    }

    TEST_CASE("admissibility examples")
    {
        AdmissibilityReport relu = check_admissibility(lookup("relu"), 2.0, 20.0, 1);
        CHECK(relu.pass);
        CHECK(relu.decay == DecayClass::exact);

        AdmissibilityReport sig = check_admissibility(lookup("sigmoid"), 2.0, 20.0, 0);
        REQUIRE_FALSE(sig.conditions.empty());
        CHECK(sig.conditions[0].fitted_rate == doctest::Approx(1.0).epsilon(0.05));
        CHECK(sig.pass);

        AdmissibilityReport ss = check_admissibility(lookup("softsign"), 2.0, 100.0, 0);
        REQUIRE_FALSE(ss.conditions.empty());
        CHECK(ss.conditions[0].fitted_rate == doctest::Approx(1.0).epsilon(0.05));
        CHECK(ss.pass);
    }

    TEST_CASE("every catalog entry passes its class beyond R")
    {
        for (const auto& spec : catalog()) {
            INFO(spec.name);
            AdmissibilityReport r = check_admissibility(spec, 2 * spec.R, 50 * spec.R, std::min(spec.max_order(), 3));
            CHECK(r.pass);
        }
    }

    TEST_CASE("x0 points have nonzero derivatives")
    {
        for (const auto& spec : catalog())
            for (int r = 1; r <= std::min(spec.max_order(), 3); ++r) {
                auto x0 = spec.x0(r);
                if (!x0) continue;
                double d[kMaxOracleOrder + 1];
                spec.derivatives(*x0, r, d);
                INFO(spec.name << " r=" << r);
                CHECK(std::fabs(d[r]) > 1e-6);
            }
        CHECK_FALSE(lookup("relu").x0(2).has_value());
    }
}
