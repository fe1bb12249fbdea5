#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sobnet {

struct Entry {
    uint32_t row = 0;
    uint32_t col = 0;
    double value = 0.0;
};

// One affine map x -> A x + b with A stored as a coordinate list.
struct Layer {
    int rows = 0;
    int cols = 0;
    std::vector<Entry> entries;  // sorted by (row, col), zeros pruned
    std::vector<double> bias;    // dense, length rows
};

// Sorts entries, rejects duplicates and non-finite values, drops zeros.
Layer make_layer(int rows, int cols, std::vector<Entry> entries, std::vector<double> bias);

// Layer from a dense row-major matrix.
Layer dense_layer(int rows, int cols, const std::vector<double>& a, std::vector<double> bias);

class Network {
public:
    Network(int input_dim, std::string activation, std::vector<Layer> layers);

    int input_dim() const { return input_dim_; }
    int output_dim() const { return layers_.back().rows; }
    int depth() const { return static_cast<int>(layers_.size()); }
    const std::string& activation() const { return activation_; }
    const std::vector<Layer>& layers() const { return layers_; }
    std::vector<int> widths() const;

private:
    int input_dim_;
    std::string activation_;
    std::vector<Layer> layers_;
};

struct NetworkStats {
    long long nonzero_weights = 0;
    int layers = 0;
    double max_abs_weight = 0.0;
    std::vector<int> widths;
};

NetworkStats stats(const Network& net);

std::vector<double> realize(const Network& net, const std::vector<double>& x);

// Realizations at `points` inputs stored row-major (points x d); returns points x N_L.
std::vector<double> realize_batch(const Network& net, const std::vector<double>& xs);

// Network computing outer(inner(x)); L1 + L2 - 1 layers.
Network concat(const Network& outer, const Network& inner);

// Stacked realizations of networks sharing input dimension and depth.
Network parallelize(const std::vector<Network>& nets);

// Single affine layer selecting the listed input coordinates.
Network selector(int input_dim, const std::vector<int>& picks, const std::string& activation);

std::string to_json(const Network& net);
Network from_json(const std::string& text);
void save_network(const Network& net, const std::string& path);
Network load_network(const std::string& path);

std::string hexfloat(double v);
double parse_hexfloat(const std::string& s);

} // namespace sobnet
