#pragma once

#include "corpus.hpp"
#include "metrics.hpp"
#include "network.hpp"
#include "poly_nets.hpp"
#include "pu.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace sobnet {

// Open sup-norm ball of radius 1/N around m/N.
struct Patch {
    std::vector<int> m;
    int N = 1;
    double center(int l) const { return double(m[l]) / N; }
    double radius() const { return 1.0 / N; }
};

std::vector<Patch> make_patches(int N, int d);

struct LocalPolynomial {
    Patch patch;
    int n = 1;
    std::vector<std::vector<int>> alphas;  // |alpha| <= n - 1, graded
    std::vector<double> coeffs;            // coefficients of the global monomials x^alpha
    double residual = 0.0;                 // max |f - p| on the fit grid

    double value(const double* x) const;
};

// Least-squares fit of degree n - 1 on a (2n+3)^d grid inside the patch.
LocalPolynomial fit_local_polynomial(const Target& f, const Patch& patch, int n);

// Exponent n - k - mu * max(0, k - tau); the mu term only for exponential PUs.
double rate_denominator(DecayClass cls, int n, int k, int tau, double mu);

int choose_N(double eps, int n, int k, int tau, double mu, double Ctilde, DecayClass cls = DecayClass::exponential);

struct SynthesisPlan {
    std::string activation;
    double eps = 0.1;
    int n = 3;
    int k = 0;
    double p = INFINITY;
    int d = 1;
    double mu = 0.25;
    double Ctilde = 1.0;
    // derived
    int N = 1;
    double s = 1.0;
    double eps_sub = 0.0;
    double theta = 0.0;
    long long T = 0;
    int L = 0;
};

// Validates the request and derives N, s, eps_sub, theta, T and L.
// A positive N_override replaces the formula value of N.
SynthesisPlan make_plan(const std::string& activation, double eps, int n, int k, double p, int d, double mu,
                        double Ctilde, int N_override = 0);

struct LocalizedSum {
    PUFamily family;
    std::vector<LocalPolynomial> polys;  // aligned with family.indices

    double value(const double* x) const;
};

LocalizedSum localized_sum(const Target& f, const SynthesisPlan& plan);

struct SynthesisReport {
    SynthesisPlan plan;
    NetworkStats stats;
    long long scaffold_weights = 0;  // nonzeros outside the last layer
    std::optional<NormEstimate> error;
    std::vector<GadgetCert> gadgets;
    double max_fit_residual = 0.0;
    double max_coefficient = 0.0;
    double seconds = 0.0;
};

struct SynthesisResult {
    Network net;
    SynthesisReport report;
};

SynthesisResult synthesize(const Target& f, const SynthesisPlan& plan, bool measure = true);

// Calibrated constant in the formula for N, cached per (activation, d, n, k, p, mu).
std::string ctilde_key(const std::string& activation, int d, int n, int k, double p, double mu);
std::optional<double> cached_ctilde(const std::string& key);
void store_ctilde(const std::string& key, double value);
double calibrate_ctilde(const std::string& activation, int d, int n, int k, double p, double mu);

} // namespace sobnet
