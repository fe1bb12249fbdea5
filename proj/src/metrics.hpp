#pragma once

#include "corpus.hpp"
#include "network.hpp"

#include <string>
#include <utility>
#include <vector>

namespace sobnet {

enum class DerivMode { exact, finite_difference };

struct NormEstimate {
    double value = 0.0;
    int k = 0;
    double p = 0.0;  // +inf for the sup norm
    int grid_n = 0;
    std::string method;
    std::vector<double> per_order;  // max over |alpha| = j of the L^p grid norm, j = 0..k
};

// Default points per axis: 512 (d=1), 128 (d=2), 32 (d=3).
int default_grid(int d);

// Midpoint grid (i + 1/2)/n per axis, row-major over points.
std::vector<double> midpoint_grid(int d, int n);

// max over |alpha| <= k of || D^alpha (f - R(net)) ||_{L^p} on the midpoint grid.
NormEstimate sobolev_distance(const Target& f, const Network& net, int k, double p, int grid_n = 0,
                              DerivMode mode = DerivMode::exact);

// Same quantity between two networks (e.g. before and after rounding).
NormEstimate network_distance(const Network& a, const Network& b, int k, double p, int grid_n = 0);

// W^{k,p} norm of the target alone.
NormEstimate sobolev_norm(const Target& f, int k, double p, int grid_n = 0);

struct RateFit {
    double exponent = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

// Least squares of log y against log x.
RateFit fit_rate(const std::vector<std::pair<double, double>>& points);

} // namespace sobnet
