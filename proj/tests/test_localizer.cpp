#include "helpers.hpp"

#include "corpus.hpp"
#include "error.hpp"
#include "localizer.hpp"
#include "pu.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace sobnet;
using namespace testing;

namespace {

double sup_fit_error(const Target& f, int N, int n)
{
    double e = 0;
    for (const Patch& p : make_patches(N, 1)) {
        LocalPolynomial lp = fit_local_polynomial(f, p, n);
        for (double x : linspace(p.center(0) - p.radius(), p.center(0) + p.radius(), 41))
            e = std::max(e, std::fabs(f.value(&x) - lp.value(&x)));
    }
    return e;
}

SynthesisPlan manual_plan(const std::string& act, int N, double s, int n)
{
    SynthesisPlan p;
    p.activation = act;
    p.N = N;
    p.s = s;
    p.n = n;
    p.d = 1;
    return p;
}

double sup_localized(const Target& f, const LocalizedSum& ls, int grid = 2001)
{
    double e = 0;
    for (int i = 0; i < grid; ++i) {
        double x = (i + 0.5) / grid;
        e = std::max(e, std::fabs(f.value(&x) - ls.value(&x)));
    }
    return e;
}

} // namespace

TEST_SUITE("localizer")
{
    TEST_CASE("make_patches")
    {
        auto p1 = make_patches(1, 1);
        REQUIRE(p1.size() == 2);
        CHECK(p1[0].center(0) == 0.0);
        CHECK(p1[1].center(0) == 1.0);
        CHECK(make_patches(5, 2).size() == 36);
        auto p5 = make_patches(5, 1);
        CHECK(p5[0].center(0) - p5[0].radius() == doctest::Approx(-0.2));
        CHECK(p5[0].center(0) + p5[0].radius() == doctest::Approx(0.2));
    }

    TEST_CASE("polynomials are fitted exactly")
    {
        Target f = parse_target("1 - 2*x + 3*x*y - y^2 + 0.5*x^2", 2);
        Patch patch{{2, 3}, 4};
        LocalPolynomial lp = fit_local_polynomial(f, patch, 3);
        CHECK(lp.coeffs.size() == 6);
        for (size_t i = 0; i < lp.alphas.size(); ++i) {
            const auto& a = lp.alphas[i];
            double want = 0;
            if (a == std::vector<int>{0, 0}) want = 1;
            if (a == std::vector<int>{1, 0}) want = -2;
            if (a == std::vector<int>{1, 1}) want = 3;
            if (a == std::vector<int>{0, 2}) want = -1;
            if (a == std::vector<int>{2, 0}) want = 0.5;
            CHECK(std::fabs(lp.coeffs[i] - want) <= 1e-10);
        }
        CHECK(lp.residual <= 1e-10);
    }

    TEST_CASE("fit residual decays like N^-n")
    {
        Target f = parse_target("sin(2*pi*x)", 1);
        double ratio = sup_fit_error(f, 16, 3) / sup_fit_error(f, 8, 3);
        CHECK(ratio == doctest::Approx(0.125).epsilon(0.3));
    }

    TEST_CASE("coefficients stay bounded in N")
    {
        Target f = parse_target("sin(2*pi*x)", 1);
        std::vector<double> mx;
        for (int N : {4, 8, 16}) {
            double m = 0;
            for (const Patch& p : make_patches(N, 1))
                for (double c : fit_local_polynomial(f, p, 3).coeffs) m = std::max(m, std::fabs(c));
            mx.push_back(m);
        }
        CHECK(*std::max_element(mx.begin(), mx.end()) / *std::min_element(mx.begin(), mx.end()) <= 2.0);
    }

    TEST_CASE("choose_N formula")
    {
        CHECK(choose_N(0.01, 3, 0, 0, 0.25, 1.0) == 6);
        CHECK(choose_N(0.5, 2, 0, 0, 0.25, 1.0) == 2);
        CHECK(choose_N(0.01, 3, 1, 1, 0.25, 1.0) == choose_N(0.01, 3, 1, 1, 0.9, 1.0));
        CHECK(rate_denominator(DecayClass::exponential, 3, 1, 0, 0.25) == doctest::Approx(1.75));
        CHECK(rate_denominator(DecayClass::polynomial, 3, 1, 0, 0.25) == doctest::Approx(2.0));
        CHECK(rate_denominator(DecayClass::exponential, 2, 2, 0, 0.25) < 0);
        CHECK_THROWS_AS(choose_N(0.1, 2, 2, 0, 0.25, 1.0), Error);
    }

    TEST_CASE("make_plan derives consistent quantities")
    {
        SynthesisPlan p = make_plan("sigmoid", 0.05, 3, 0, INFINITY, 1, 0.25, 1.0);
        CHECK(p.N == choose_N(0.05, 3, 0, 0, 0.25, 1.0));
        CHECK(p.T == (p.N + 1) * 3);
        CHECK(p.eps_sub > 0);
        CHECK(p.eps_sub <= p.eps);
        CHECK(p.s == doctest::Approx(select_scaling(DecayClass::exponential, p.N, 1, INFINITY, 3, 0.25, 1.0)));
        try {
            make_plan("relu", 0.1, 3, 0, INFINITY, 1, 0.25, 1.0);
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.code() == Status::unsupported);
        }
        CHECK_THROWS_AS(make_plan("sigmoid", 0.1, 2, 2, INFINITY, 1, 0.25, 1.0), Error);
        CHECK_THROWS_AS(make_plan("elu", 0.1, 4, 3, INFINITY, 1, 0.25, 1.0), Error);
    }

    TEST_CASE("localized sum of a constant")
    {
        Target one = constant_target(1.0, 1);
        LocalizedSum exact = localized_sum(one, manual_plan("relu", 5, 1.0, 3));
        CHECK(sup_localized(one, exact) <= 1e-12);

        LocalizedSum sig = localized_sum(one, manual_plan("sigmoid", 5, 8.0, 3));
        double dev = verify_pu(sig.family, 0).sum_deviation[0];
        CHECK(sup_localized(one, sig) == doctest::Approx(dev).epsilon(0.05));
        CHECK(dev <= 1.3e-5);
    }

    TEST_CASE("localized sum converges like N^-n")
    {
        Target f = parse_target("sin(2*pi*x)", 1);
        double e8 = sup_localized(f, localized_sum(f, manual_plan("sigmoid", 8, 16.0, 3)));
        double e16 = sup_localized(f, localized_sum(f, manual_plan("sigmoid", 16, 16.0, 3)));
        CHECK(e16 / e8 == doctest::Approx(0.125).epsilon(0.4));
    }

    TEST_CASE("synthesis of zero keeps the scaffold and zeroes the sum row")
    {
        SynthesisPlan p = make_plan("sigmoid", 0.1, 3, 0, INFINITY, 1, 0.25, 1.0);
        SynthesisResult z = synthesize(constant_target(0.0, 1), p);
        const Layer& last = z.net.layers().back();
        CHECK(last.rows == 1);
        CHECK(last.entries.empty());
        CHECK(last.bias[0] == 0.0);
        REQUIRE(z.report.error.has_value());
        CHECK(z.report.error->value == 0.0);
        CHECK(z.report.stats.nonzero_weights == z.report.scaffold_weights);

        Target f;
        REQUIRE(corpus_lookup("sin1", f));
        SynthesisResult s = synthesize(f, p);
        CHECK(s.net.depth() == z.net.depth());
        CHECK(s.net.depth() == p.L);
        CHECK(s.report.scaffold_weights == z.report.scaffold_weights);
        // Every layer but the last is independent of f.
        for (int l = 0; l + 1 < s.net.depth(); ++l) {
            const Layer& a = s.net.layers()[l];
            const Layer& b = z.net.layers()[l];
            REQUIRE(a.entries.size() == b.entries.size());
            bool same = true;
            for (size_t i = 0; i < a.entries.size(); ++i)
                same = same && a.entries[i].row == b.entries[i].row && a.entries[i].col == b.entries[i].col &&
                       same_bits(a.entries[i].value, b.entries[i].value);
            for (int r = 0; r < a.rows; ++r) same = same && same_bits(a.bias[r], b.bias[r]);
            CHECK(same);
        }
        CHECK(s.report.error->value <= 0.1);
    }

    TEST_CASE("synthesized error holds on a fine grid")
    {
        Target f;
        REQUIRE(corpus_lookup("sin1", f));
        SynthesisPlan p = make_plan("sigmoid", 0.05, 3, 0, INFINITY, 1, 0.25, 1.35);
        SynthesisResult r = synthesize(f, p, false);
        NormEstimate e = sobolev_distance(f, r.net, 0, INFINITY, 4001);
        CHECK(e.value <= 0.05);
    }
}
