#pragma once

#include "network.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace sobnet {

// Last-layer entries clamped to [-eps^-theta, eps^-theta] and rounded to the
// eps^nu grid, ties to even.
Network round_output_layer(const Network& net, double eps, double theta, double nu);

// nu = 2 s + 2 with s = ceil(log((#last-layer entries + 1) * max(1, max_i |h_i|_{W^{k,inf}})) / log(1/eps)),
// h_i the last hidden units measured on a midpoint grid of (0,1)^d.
double measured_nu(const Network& net, double eps, int k, int grid_n = 0);

// Smallest theta with every last-layer entry inside [-eps^-theta, eps^-theta].
double last_layer_theta(const Network& net, double eps);

struct CodingScheme {
    std::string activation;
    double C0 = 0.0;
    double eps = 0.1;
    double nu = 1.0;
    double theta = 1.0;
    std::vector<double> dictionary;  // sorted distinct scaffold weights

    int K() const;                   // ceil(C0 log2(1/eps))
    long double grid_half() const;   // floor(eps^-(theta+nu))
    long double cardinality() const; // |dictionary| + 2 grid_half + 1
};

// Scheme whose dictionary is the set of nonzero weights outside the last layer.
// C0 <= 0 picks theta + nu + 1, raised until 2^K covers the cardinality.
CodingScheme make_scheme(const Network& net, double eps, double theta, double nu, double C0 = 0.0);

struct BitStream {
    std::vector<uint8_t> bytes;
    uint64_t bits = 0;
    bool padded = false;  // bit count rounded up to whole bytes
};

BitStream encode(const Network& net, const CodingScheme& scheme);
Network decode(const BitStream& stream, const CodingScheme& scheme);

// Stream read back from bytes with an unknown bit count: up to 7 zero padding bits allowed.
BitStream from_bytes(std::vector<uint8_t> bytes);

// C0 and eps stored in a stream header.
void peek_constants(const BitStream& stream, double& C0, double& eps);

// C eps^-gamma / log2(1/eps) for eps in (0, 1/2).
double entropy_floor(double gamma, double C, double eps);

// Exponent d / (t - s) of the Sobolev lower bound.
double sobolev_gamma(int d, double t, double s);

} // namespace sobnet
