#pragma once

#include "activation.hpp"
#include "network.hpp"

#include <vector>

namespace sobnet {

// psi^s(x) for tau in {0, 1}.
double bump_1d(const ActivationSpec& spec, double s, double x);

// psi^s and its derivatives up to `order` at x, by the chain rule on the catalog oracle.
void bump_1d_derivs(const ActivationSpec& spec, double s, double x, int order, double* out);

// Two-layer network with d outputs whose product is phi_m^s(x) = prod_l psi^s(3N(x_l - m_l/N)).
Network bump_network(const ActivationSpec& spec, int d, int N, const std::vector<int>& m, double s);

// d/p is read as 0 when p is infinite.
double select_scaling(DecayClass cls, int N, int d, double p, int n, double mu, double D);

// Smallest scaling for which the PU bounds are asserted: max(2R/3, 1).
double min_scaling(const ActivationSpec& spec);

struct PUFamily {
    ActivationSpec spec;
    int d = 1;
    int N = 1;
    double s = 1.0;
    std::vector<std::vector<int>> indices;  // m in {0..N}^d, lexicographic
    std::vector<Network> bumps;
};

PUFamily make_pu_family(const ActivationSpec& spec, int d, int N, double s);

struct PUReport {
    std::string activation;
    DecayClass decay = DecayClass::exact;
    int d = 1, N = 1, k_max = 0, grid_per_patch = 33;
    double s = 1.0;
    long long grid_points = 0;
    // Indexed by k = 0..k_max. Derivative orders k >= 1 take the max over |alpha| = k.
    std::vector<double> sum_deviation;   // sup |D^alpha (1 - sum phi)| on (0,1)^d
    std::vector<double> complement_max;  // sup over m of |D^alpha phi_m| off its patch
    std::vector<double> seminorm_max;    // sup over m of |D^alpha phi_m|
    std::vector<double> seminorm_ratio;  // seminorm_max / (N^k s^max(0, k - tau))
};

PUReport verify_pu(const PUFamily& family, int k_max, int grid_per_patch = 33);

} // namespace sobnet
