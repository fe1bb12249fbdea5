#include "pipeline.hpp"

#include "error.hpp"

#include <doctest.h>

#include <cmath>

using namespace sobnet;

TEST_SUITE("pipeline")
{
    TEST_CASE("resolve_target")
    {
        CHECK(resolve_target("sin1", 1).name == "sin1");
        CHECK(resolve_target("x*y", 2).d == 2);
        CHECK_THROWS_AS(resolve_target("gauss2", 1), Error);
    }

    TEST_CASE("run_synthesis roundtrips the rounded network")
    {
        Target f = resolve_target("sin1", 1);
        SynthesisPlan p = make_plan("sigmoid", 0.1, 3, 0, INFINITY, 1, 0.25, 1.35);
        RunOutcome r = run_synthesis(f, p);
        CHECK(r.error <= 0.1);
        CHECK(r.rounded_error <= 0.1);
        CHECK(r.perturbation <= 0.1 / 3);
        CHECK(r.codec.roundtrip_exact);
        CHECK(r.codec.realizations_equal);
        CHECK(r.codec.bit_ratio <= 4.0);
        CHECK(r.codec.theta >= p.theta);
        CHECK(r.codec.M == stats(r.rounded).nonzero_weights);
    }

    TEST_CASE("sweep is deterministic and checks its inputs")
    {
        Target f = resolve_target("sin1", 1);
        std::vector<double> eps{0.1, 0.05, 0.025};
        SweepResult a = sweep("sigmoid", f, eps, 3, 0, INFINITY, 0.25, 1.35);
        SweepResult b = sweep("sigmoid", f, eps, 3, 0, INFINITY, 0.25, 1.35);
        CHECK(sweep_json(a).dump() == sweep_json(b).dump());
        CHECK(a.errors_ok);
        CHECK(a.depth_constant);
        CHECK(a.theory_exponent == doctest::Approx(1.0 / 3.0));
        CHECK(a.weights_fit.exponent <= a.theory_exponent + 0.75);
        for (size_t i = 0; i < eps.size(); ++i) CHECK(a.entropy_floors[i] <= double(a.runs[i].codec.M));
        CHECK_THROWS_AS(sweep("sigmoid", f, {0.1, 0.05}, 3, 0, INFINITY, 0.25, 1.35), Error);
        CHECK_THROWS_AS(sweep("sigmoid", f, {0.05, 0.1, 0.025}, 3, 0, INFINITY, 0.25, 1.35), Error);
    }

    TEST_CASE("reports serialize non-finite values as strings")
    {
        SynthesisPlan p = make_plan("sigmoid", 0.1, 3, 0, INFINITY, 1, 0.25, 1.0);
        Json j = plan_json(p);
        CHECK(j["p"].is_string());
        CHECK(catalog_json().size() == 12);
    }
}
