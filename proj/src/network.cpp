#include "network.hpp"

#include "activation.hpp"
#include "error.hpp"
#include "jet.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace sobnet {

Layer make_layer(int rows, int cols, std::vector<Entry> entries, std::vector<double> bias)
{
    require(rows > 0 && cols > 0, Status::invalid_argument, "layer dimensions must be positive");
    require(static_cast<int>(bias.size()) == rows, Status::dimension_mismatch, "bias length differs from row count");
    for (double b : bias) require(std::isfinite(b), Status::invalid_argument, "non-finite bias");
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.row != b.row ? a.row < b.row : a.col < b.col; });
    Layer l;
    l.rows = rows;
    l.cols = cols;
    l.bias = std::move(bias);
    l.entries.reserve(entries.size());
    for (size_t i = 0; i < entries.size(); ++i) {
        const Entry& e = entries[i];
        require(e.row < static_cast<uint32_t>(rows) && e.col < static_cast<uint32_t>(cols),
                Status::dimension_mismatch, "entry index outside matrix");
        require(std::isfinite(e.value), Status::invalid_argument, "non-finite weight");
        if (i > 0) {
            require(!(entries[i - 1].row == e.row && entries[i - 1].col == e.col), Status::invalid_argument,
                    "duplicate matrix entry");
        }
        if (e.value != 0.0) l.entries.push_back(e);
    }
    return l;
}

Layer dense_layer(int rows, int cols, const std::vector<double>& a, std::vector<double> bias)
{
    require(static_cast<int>(a.size()) == rows * cols, Status::dimension_mismatch, "dense matrix size");
    std::vector<Entry> es;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            if (a[r * cols + c] != 0.0) es.push_back({uint32_t(r), uint32_t(c), a[r * cols + c]});
    return make_layer(rows, cols, std::move(es), std::move(bias));
}

Network::Network(int input_dim, std::string activation, std::vector<Layer> layers)
    : input_dim_(input_dim), activation_(std::move(activation)), layers_(std::move(layers))
{
    require(input_dim_ > 0, Status::invalid_argument, "input dimension must be positive");
    require(!layers_.empty(), Status::invalid_argument, "network needs at least one layer");
    int prev = input_dim_;
    for (const Layer& l : layers_) {
        require(l.cols == prev, Status::dimension_mismatch, "layer column count differs from previous width");
        require(static_cast<int>(l.bias.size()) == l.rows, Status::dimension_mismatch, "bias length");
        prev = l.rows;
    }
}

std::vector<int> Network::widths() const
{
    std::vector<int> w{input_dim_};
    for (const Layer& l : layers_) w.push_back(l.rows);
    return w;
}

NetworkStats stats(const Network& net)
{
    NetworkStats s;
    s.layers = net.depth();
    s.widths = net.widths();
    for (const Layer& l : net.layers()) {
        for (const Entry& e : l.entries) {
            ++s.nonzero_weights;
            s.max_abs_weight = std::max(s.max_abs_weight, std::fabs(e.value));
        }
        for (double b : l.bias) {
            if (b == 0.0) continue;
            ++s.nonzero_weights;
            s.max_abs_weight = std::max(s.max_abs_weight, std::fabs(b));
        }
    }
    return s;
}

std::vector<double> realize(const Network& net, const std::vector<double>& x)
{
    require(static_cast<int>(x.size()) == net.input_dim(), Status::dimension_mismatch,
            "input length differs from network input dimension");
    return realize_batch(net, x);
}

std::vector<double> realize_batch(const Network& net, const std::vector<double>& xs)
{
    const int d = net.input_dim();
    require(xs.size() % d == 0, Status::dimension_mismatch, "input batch size not a multiple of d");
    JetBatch jb = realize_jets(net, xs, 0);
    const int pts = jb.points;
    std::vector<double> out(static_cast<size_t>(pts) * jb.units);
    for (int u = 0; u < jb.units; ++u)
        for (int p = 0; p < pts; ++p) out[static_cast<size_t>(p) * jb.units + u] = jb.at(u, 0, p);
    return out;
}

Network concat(const Network& outer, const Network& inner)
{
    require(outer.input_dim() == inner.output_dim(), Status::dimension_mismatch,
            "outer input dimension differs from inner output dimension");
    require(outer.activation() == inner.activation(), Status::invalid_argument, "activation mismatch in concat");
    const Layer& a1 = outer.layers().front();
    const Layer& al = inner.layers().back();

    // Row k of the inner last layer, for the product A1 * AL.
    std::vector<std::vector<const Entry*>> inner_rows(al.rows);
    for (const Entry& e : al.entries) inner_rows[e.row].push_back(&e);

    std::vector<Entry> merged;
    std::vector<double> bias(a1.rows, 0.0);
    size_t i = 0;
    while (i < a1.entries.size()) {
        uint32_t r = a1.entries[i].row;
        std::map<uint32_t, double> acc;
        double b = 0.0;
        for (; i < a1.entries.size() && a1.entries[i].row == r; ++i) {
            const Entry& e = a1.entries[i];
            for (const Entry* f : inner_rows[e.col]) acc[f->col] += e.value * f->value;
            b += e.value * al.bias[e.col];
        }
        for (auto& [c, v] : acc) merged.push_back({r, c, v});
        bias[r] = b;
    }
    for (int r = 0; r < a1.rows; ++r) bias[r] += a1.bias[r];

    std::vector<Layer> layers(inner.layers().begin(), inner.layers().end() - 1);
    layers.push_back(make_layer(a1.rows, al.cols, std::move(merged), std::move(bias)));
    layers.insert(layers.end(), outer.layers().begin() + 1, outer.layers().end());
    return Network(inner.input_dim(), inner.activation(), std::move(layers));
}

Network parallelize(const std::vector<Network>& nets)
{
    require(!nets.empty(), Status::invalid_argument, "parallelize needs at least one network");
    const int d = nets[0].input_dim();
    const int L = nets[0].depth();
    for (const Network& n : nets) {
        require(n.input_dim() == d, Status::dimension_mismatch, "parallelize: input dimensions differ");
        require(n.depth() == L, Status::dimension_mismatch, "parallelize: layer counts differ");
        require(n.activation() == nets[0].activation(), Status::invalid_argument, "parallelize: activations differ");
    }
    std::vector<Layer> layers;
    for (int l = 0; l < L; ++l) {
        Layer out;
        size_t total = 0;
        for (const Network& n : nets) {
            out.rows += n.layers()[l].rows;
            out.cols += n.layers()[l].cols;
            total += n.layers()[l].entries.size();
        }
        if (l == 0) out.cols = d;
        out.entries.reserve(total);
        out.bias.reserve(out.rows);
        uint32_t r0 = 0, c0 = 0;
        for (const Network& n : nets) {
            const Layer& src = n.layers()[l];
            for (const Entry& e : src.entries) out.entries.push_back({e.row + r0, e.col + (l == 0 ? 0u : c0), e.value});
            out.bias.insert(out.bias.end(), src.bias.begin(), src.bias.end());
            r0 += src.rows;
            c0 += src.cols;
        }
        layers.push_back(std::move(out));
    }
    return Network(d, nets[0].activation(), std::move(layers));
}

Network selector(int input_dim, const std::vector<int>& picks, const std::string& activation)
{
    require(!picks.empty(), Status::invalid_argument, "selector needs at least one coordinate");
    std::vector<Entry> es;
    for (size_t i = 0; i < picks.size(); ++i) {
        require(picks[i] >= 0 && picks[i] < input_dim, Status::dimension_mismatch, "selector index");
        es.push_back({uint32_t(i), uint32_t(picks[i]), 1.0});
    }
    std::vector<Layer> ls{make_layer(static_cast<int>(picks.size()), input_dim, std::move(es),
                                     std::vector<double>(picks.size(), 0.0))};
    return Network(input_dim, activation, std::move(ls));
}

std::string hexfloat(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a", v);
    return buf;
}

double parse_hexfloat(const std::string& s)
{
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    require(end && *end == '\0' && !s.empty(), Status::decode_error, "bad hex-float '" + s + "'");
    return v;
}

std::string to_json(const Network& net)
{
    nlohmann::ordered_json j;
    j["activation"] = net.activation();
    j["input_dim"] = net.input_dim();
    j["layers"] = nlohmann::ordered_json::array();
    for (const Layer& l : net.layers()) {
        nlohmann::ordered_json lj;
        lj["rows"] = l.rows;
        lj["cols"] = l.cols;
        lj["entries"] = nlohmann::ordered_json::array();
        for (const Entry& e : l.entries) lj["entries"].push_back({e.row, e.col, hexfloat(e.value)});
        lj["bias"] = nlohmann::ordered_json::array();
        for (double b : l.bias) lj["bias"].push_back(hexfloat(b));
        j["layers"].push_back(std::move(lj));
    }
    return j.dump();
}

Network from_json(const std::string& text)
{
    try {
        auto j = nlohmann::json::parse(text);
        std::vector<Layer> layers;
        for (const auto& lj : j.at("layers")) {
            std::vector<Entry> es;
            for (const auto& e : lj.at("entries"))
                es.push_back({e.at(0).get<uint32_t>(), e.at(1).get<uint32_t>(), parse_hexfloat(e.at(2).get<std::string>())});
            std::vector<double> bias;
            for (const auto& b : lj.at("bias")) bias.push_back(parse_hexfloat(b.get<std::string>()));
            layers.push_back(make_layer(lj.at("rows").get<int>(), lj.at("cols").get<int>(), std::move(es), std::move(bias)));
        }
        return Network(j.at("input_dim").get<int>(), j.at("activation").get<std::string>(), std::move(layers));
    } catch (const nlohmann::json::exception& e) {
        fail(Status::decode_error, std::string("network json: ") + e.what());
    }
}

void save_network(const Network& net, const std::string& path)
{
    std::ofstream f(path);
    require(static_cast<bool>(f), Status::io_error, "cannot open '" + path + "' for writing");
    f << to_json(net) << '\n';
    require(static_cast<bool>(f), Status::io_error, "write to '" + path + "' failed");
}

Network load_network(const std::string& path)
{
    std::ifstream f(path);
    require(static_cast<bool>(f), Status::io_error, "cannot open '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return from_json(ss.str());
}

} // namespace sobnet
