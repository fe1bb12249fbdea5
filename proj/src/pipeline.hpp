#pragma once

#include "activation.hpp"
#include "codec.hpp"
#include "localizer.hpp"
#include "metrics.hpp"
#include "pu.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sobnet {

using Json = nlohmann::ordered_json;

// Corpus name or inline expression in x, y, z.
Target resolve_target(const std::string& spec, int d);

struct CodecOutcome {
    double nu = 0.0;
    double theta = 0.0;  // max(plan theta, last-layer exponent)
    int K = 0;
    double C0 = 0.0;
    uint64_t bits = 0;
    long long M = 0;
    double bit_ratio = 0.0;  // bits / (M (K + ceil(log2 M)))
    bool roundtrip_exact = false;
    bool realizations_equal = false;
    double seconds = 0.0;  // rounding, re-measurement and roundtrip
};

struct RunOutcome {
    SynthesisResult synth;
    Network rounded;
    double error = 0.0;          // unrounded W^{k,p} error
    double rounded_error = 0.0;  // after last-layer rounding
    double perturbation = 0.0;   // W^{k,inf} distance between the two realizations
    CodecOutcome codec;
};

// Synthesis, last-layer rounding, codec roundtrip. `seed` drives the random check points.
RunOutcome run_synthesis(const Target& f, const SynthesisPlan& plan, uint64_t seed = 1);

struct SweepResult {
    std::string activation, target;
    int d = 1, n = 3, k = 0;
    double p = INFINITY, mu = 0.25, Ctilde = 1.0;
    std::vector<double> eps;
    std::vector<RunOutcome> runs;
    RateFit weights_fit;     // M against 1/eps
    RateFit magnitude_fit;   // max |w| against 1/eps
    double theory_exponent = 0.0;  // d / (n - k - mu max(0, k - tau))
    double floor_exponent = 0.0;   // d / (n - k)
    std::vector<double> entropy_floors;
    bool errors_ok = false;
    bool depth_constant = false;
};

SweepResult sweep(const std::string& activation, const Target& f, const std::vector<double>& eps, int n, int k,
                  double p, double mu, std::optional<double> Ctilde = std::nullopt, uint64_t seed = 1);

Json stats_json(const NetworkStats& s);
Json plan_json(const SynthesisPlan& p);
Json norm_json(const NormEstimate& n);
Json cert_json(const GadgetCert& c);
Json run_json(const RunOutcome& r);
Json sweep_json(const SweepResult& s);
Json pu_json(const PUReport& r);
Json admissibility_json(const AdmissibilityReport& r);
Json catalog_json();
Json rate_json(const RateFit& r);

} // namespace sobnet
