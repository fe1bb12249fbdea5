#pragma once

#include "corpus.hpp"
#include "jet.hpp"
#include "network.hpp"

#include <bit>
#include <cstdint>
#include <random>
#include <vector>

namespace testing {

using namespace sobnet;

inline std::vector<double> linspace(double a, double b, int n)
{
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
    return v;
}

inline bool same_bits(double a, double b) { return std::bit_cast<uint64_t>(a) == std::bit_cast<uint64_t>(b); }

// Entrywise bitwise equality of topology, weights and biases.
inline bool same_network(const Network& a, const Network& b)
{
    if (a.input_dim() != b.input_dim() || a.depth() != b.depth() || a.activation() != b.activation()) return false;
    for (int l = 0; l < a.depth(); ++l) {
        const Layer& x = a.layers()[l];
        const Layer& y = b.layers()[l];
        if (x.rows != y.rows || x.cols != y.cols || x.entries.size() != y.entries.size()) return false;
        for (size_t i = 0; i < x.entries.size(); ++i)
            if (x.entries[i].row != y.entries[i].row || x.entries[i].col != y.entries[i].col ||
                !same_bits(x.entries[i].value, y.entries[i].value))
                return false;
        for (int r = 0; r < x.rows; ++r)
            if (!same_bits(x.bias[r], y.bias[r])) return false;
    }
    return true;
}

// Target whose jet is the realization jet of a network.
inline Target network_target(const Network& net)
{
    Target t;
    t.name = "network";
    t.d = net.input_dim();
    t.jet = [net](const double* x, const JetLayout& lay, double* coefs) {
        std::vector<double> xs(x, x + net.input_dim());
        JetBatch jb = realize_jets(net, xs, lay.order);
        for (int a = 0; a < lay.size(); ++a) coefs[a] = jb.at(0, a, 0);
    };
    return t;
}

// Random dense net with the given widths; weights uniform in [-w, w].
inline Network random_net(std::mt19937_64& rng, const std::vector<int>& widths, const std::string& act, double w = 1.0)
{
    std::uniform_real_distribution<double> u(-w, w);
    std::vector<Layer> layers;
    for (size_t l = 1; l < widths.size(); ++l) {
        std::vector<double> a(static_cast<size_t>(widths[l]) * widths[l - 1]), b(widths[l]);
        for (double& v : a) v = u(rng);
        for (double& v : b) v = u(rng);
        layers.push_back(dense_layer(widths[l], widths[l - 1], a, b));
    }
    return Network(widths[0], act, std::move(layers));
}

} // namespace testing
