#include "codec.hpp"

#include "error.hpp"
#include "jet.hpp"
#include "metrics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <set>

namespace sobnet {

namespace {

using u128 = unsigned __int128;
using i128 = __int128;

double grid_step(double eps, double nu) { return std::pow(eps, nu); }

long double half_width(double eps, double theta, double nu)
{
    return std::floor(std::pow(static_cast<long double>(eps), -static_cast<long double>(theta + nu)) * (1.0L + 1e-12L));
}

class BitWriter {
public:
    void put(uint64_t v, int n)
    {
        for (int i = n - 1; i >= 0; --i) bit((v >> i) & 1u);
    }
    void put128(u128 v, int n)
    {
        for (int i = n - 1; i >= 0; --i) bit(i >= 128 ? 0 : static_cast<unsigned>((v >> i) & 1u));
    }
    void put_f64(double v) { put(std::bit_cast<uint64_t>(v), 64); }
    BitStream finish() { return {std::move(bytes_), bits_}; }

private:
    std::vector<uint8_t> bytes_;
    uint64_t bits_ = 0;
    void bit(unsigned b)
    {
        if (bits_ % 8 == 0) bytes_.push_back(0);
        if (b) bytes_.back() |= static_cast<uint8_t>(0x80u >> (bits_ % 8));
        ++bits_;
    }
};

class BitReader {
public:
    explicit BitReader(const BitStream& s) : s_(s)
    {
        require(s.bytes.size() * 8 >= s.bits && s.bytes.size() * 8 < s.bits + 8, Status::decode_error,
                "bit length inconsistent with byte count");
    }
    uint64_t get(int n)
    {
        uint64_t v = 0;
        for (int i = 0; i < n; ++i) v = (v << 1) | bit();
        return v;
    }
    u128 get128(int n)
    {
        u128 v = 0;
        for (int i = 0; i < n; ++i) {
            unsigned b = bit();
            if (n - i > 128) {
                require(b == 0, Status::decode_error, "index overflow");
                continue;
            }
            v = (v << 1) | b;
        }
        return v;
    }
    double get_f64() { return std::bit_cast<double>(get(64)); }
    uint64_t pos() const { return pos_; }

private:
    const BitStream& s_;
    uint64_t pos_ = 0;
    unsigned bit()
    {
        require(pos_ < s_.bits, Status::decode_error, "truncated stream");
        unsigned b = (s_.bytes[pos_ / 8] >> (7 - pos_ % 8)) & 1u;
        ++pos_;
        return b;
    }
};

void put_magic(BitWriter& w)
{
    for (char c : std::string("SBN1")) w.put(static_cast<uint8_t>(c), 8);
}

} // namespace

Network round_output_layer(const Network& net, double eps, double theta, double nu)
{
    require(nu > 0, Status::invalid_argument, "rounding exponent nu must be positive");
    require(eps > 0 && eps < 1, Status::invalid_argument, "eps must lie in (0,1)");
    require(theta >= 0, Status::invalid_argument, "theta must be nonnegative");
    const double step = grid_step(eps, nu);
    const long double G = half_width(eps, theta, nu);
    auto round = [&](double w) {
        double q = std::nearbyint(w / step);  // default rounding mode: ties to even
        q = static_cast<double>(std::clamp(static_cast<long double>(q), -G, G));
        if (std::fabs(static_cast<long double>(q)) > G) q = std::nextafter(q, 0.0);
        return q * step;
    };
    std::vector<Layer> layers = net.layers();
    Layer& last = layers.back();
    std::vector<Entry> es;
    for (const Entry& e : last.entries) es.push_back({e.row, e.col, round(e.value)});
    std::vector<double> bias;
    for (double b : last.bias) bias.push_back(round(b));
    last = make_layer(last.rows, last.cols, std::move(es), std::move(bias));
    return Network(net.input_dim(), net.activation(), std::move(layers));
}

double measured_nu(const Network& net, double eps, int k, int grid_n)
{
    require(eps > 0 && eps < 1, Status::invalid_argument, "eps must lie in (0,1)");
    const Layer& last = net.layers().back();
    long long entries = static_cast<long long>(last.entries.size());
    for (double b : last.bias) entries += b != 0.0;
    double h = 1.0;
    if (net.depth() > 1) {
        // Hidden units of layer L-1 exposed by an identity output layer.
        std::vector<Layer> layers(net.layers().begin(), net.layers().end() - 1);
        const int w = layers.back().rows;
        std::vector<Entry> id;
        for (int i = 0; i < w; ++i) id.push_back({uint32_t(i), uint32_t(i), 1.0});
        layers.push_back(make_layer(w, w, std::move(id), std::vector<double>(w, 0.0)));
        Network hidden(net.input_dim(), net.activation(), std::move(layers));
        const int d = net.input_dim();
        if (grid_n == 0) grid_n = std::max(16, default_grid(d) / 4);
        JetBatch jb = realize_jets(hidden, midpoint_grid(d, grid_n), k);
        JetLayout lay(d, k);
        for (int u = 0; u < jb.units; ++u)
            for (int c = 0; c < jb.ncoef; ++c) {
                double f = multi_factorial(lay.alphas[c]);
                for (int p = 0; p < jb.points; ++p) h = std::max(h, std::fabs(jb.at(u, c, p)) * f);
            }
    }
    double s = std::ceil(std::log(static_cast<double>(entries + 1) * h) / std::log(1.0 / eps));
    return 2.0 * std::max(0.0, s) + 2.0;
}

double last_layer_theta(const Network& net, double eps)
{
    const Layer& last = net.layers().back();
    double m = 0.0;
    for (const Entry& e : last.entries) m = std::max(m, std::fabs(e.value));
    for (double b : last.bias) m = std::max(m, std::fabs(b));
    if (m <= 1.0) return 0.0;
    return std::log(m) / std::log(1.0 / eps);
}

int CodingScheme::K() const { return static_cast<int>(std::ceil(C0 * std::log2(1.0 / eps) - 1e-12)); }

long double CodingScheme::grid_half() const { return half_width(eps, theta, nu); }

long double CodingScheme::cardinality() const
{
    return static_cast<long double>(dictionary.size()) + 2.0L * grid_half() + 1.0L;
}

CodingScheme make_scheme(const Network& net, double eps, double theta, double nu, double C0)
{
    require(eps > 0 && eps < 0.5, Status::invalid_argument, "eps must lie in (0, 0.5)");
    require(nu > 0, Status::invalid_argument, "nu must be positive");
    CodingScheme sc;
    sc.activation = net.activation();
    sc.eps = eps;
    sc.nu = nu;
    sc.theta = theta;
    std::set<double> w;
    for (size_t l = 0; l + 1 < net.layers().size(); ++l) {
        for (const Entry& e : net.layers()[l].entries) w.insert(e.value);
        for (double b : net.layers()[l].bias)
            if (b != 0.0) w.insert(b);
    }
    sc.dictionary.assign(w.begin(), w.end());
    sc.C0 = C0 > 0 ? C0 : theta + nu + 1.0;
    if (C0 <= 0) {
        while (std::ldexp(1.0L, sc.K()) < sc.cardinality()) sc.C0 += 1.0;
    }
    require(std::ldexp(1.0L, sc.K()) >= sc.cardinality(), Status::not_encodable,
            "bit budget 2^K smaller than the dictionary");
    require(sc.K() <= 128 && sc.grid_half() < std::ldexp(1.0L, 125), Status::not_encodable,
            "index width above 128 bits");
    return sc;
}

BitStream encode(const Network& net, const CodingScheme& sc)
{
    require(net.depth() <= 255, Status::not_encodable, "more than 255 layers");
    const int K = sc.K();
    require(K >= 1 && K <= 160, Status::not_encodable, "index width outside 1..160 bits");
    const double step = grid_step(sc.eps, sc.nu);
    const long double G = sc.grid_half();
    const i128 Gi = static_cast<i128>(G);
    const auto& dict = sc.dictionary;
    auto index_of = [&](double v, int layer, uint32_t row, uint32_t col) -> u128 {
        auto it = std::lower_bound(dict.begin(), dict.end(), v);
        if (it != dict.end() && *it == v && std::signbit(*it) == std::signbit(v)) return u128(it - dict.begin());
        double q = std::nearbyint(v / step);
        for (double c : {q, q - 1.0, q + 1.0}) {
            if (c * step == v && std::fabs(static_cast<long double>(c)) <= G)
                return u128(dict.size()) + static_cast<u128>(static_cast<i128>(c) + Gi);
        }
        fail(Status::not_encodable, "weight " + hexfloat(v) + " at layer " + std::to_string(layer + 1) + " row " +
                                        std::to_string(row) + " col " + std::to_string(col) + " is not in the dictionary");
    };

    NetworkStats st = stats(net);
    require(st.nonzero_weights <= 0xffffffffLL, Status::not_encodable, "too many weights");
    BitWriter w;
    put_magic(w);
    w.put_f64(sc.C0);
    w.put_f64(sc.eps);
    w.put(static_cast<uint64_t>(st.nonzero_weights), 32);
    w.put(static_cast<uint64_t>(net.depth()), 32);
    for (int width : st.widths) w.put(static_cast<uint64_t>(width), 32);
    w.put(dict.size(), 32);
    for (double v : dict) w.put_f64(v);
    for (int l = 0; l < net.depth(); ++l) {
        const Layer& layer = net.layers()[l];
        for (const Entry& e : layer.entries) {
            w.put(static_cast<uint64_t>(l), 8);
            w.put(e.row, 32);
            w.put(e.col, 32);
            w.put128(index_of(e.value, l, e.row, e.col), K);
        }
        for (int r = 0; r < layer.rows; ++r) {
            if (layer.bias[r] == 0.0) continue;
            w.put(static_cast<uint64_t>(l), 8);
            w.put(static_cast<uint64_t>(r), 32);
            w.put(static_cast<uint64_t>(layer.cols), 32);
            w.put128(index_of(layer.bias[r], l, r, layer.cols), K);
        }
    }
    return w.finish();
}

Network decode(const BitStream& stream, const CodingScheme& sc)
{
    BitReader r(stream);
    for (char c : std::string("SBN1"))
        require(r.get(8) == static_cast<uint8_t>(c), Status::decode_error, "bad magic");
    double C0 = r.get_f64();
    double eps = r.get_f64();
    require(std::bit_cast<uint64_t>(C0) == std::bit_cast<uint64_t>(sc.C0) &&
                std::bit_cast<uint64_t>(eps) == std::bit_cast<uint64_t>(sc.eps),
            Status::decode_error, "stream coding constants differ from the scheme");
    const int K = sc.K();
    const uint64_t M = r.get(32);
    const uint64_t L = r.get(32);
    require(L >= 1 && L <= 255, Status::decode_error, "layer count outside 1..255");
    std::vector<int> widths;
    for (uint64_t i = 0; i <= L; ++i) {
        uint64_t wv = r.get(32);
        require(wv >= 1 && wv < (1u << 30), Status::decode_error, "bad width");
        widths.push_back(static_cast<int>(wv));
    }
    const uint64_t nd = r.get(32);
    require(nd <= stream.bits / 64, Status::decode_error, "dictionary longer than stream");
    std::vector<double> dict(nd);
    for (auto& v : dict) v = r.get_f64();
    for (size_t i = 1; i < dict.size(); ++i)
        require(dict[i - 1] < dict[i], Status::decode_error, "dictionary not strictly increasing");

    const double step = grid_step(sc.eps, sc.nu);
    const i128 Gi = static_cast<i128>(sc.grid_half());
    std::vector<std::vector<Entry>> entries(L);
    std::vector<std::vector<double>> bias(L);
    std::vector<std::vector<char>> bias_set(L);
    for (uint64_t l = 0; l < L; ++l) {
        bias[l].assign(widths[l + 1], 0.0);
        bias_set[l].assign(widths[l + 1], 0);
    }
    for (uint64_t i = 0; i < M; ++i) {
        uint64_t l = r.get(8);
        uint64_t row = r.get(32);
        uint64_t col = r.get(32);
        u128 idx = r.get128(K);
        require(l < L, Status::decode_error, "record layer out of range");
        require(row < static_cast<uint64_t>(widths[l + 1]), Status::decode_error, "record row out of range");
        require(col <= static_cast<uint64_t>(widths[l]), Status::decode_error, "record column out of range");
        double v;
        if (idx < u128(nd)) {
            v = dict[static_cast<size_t>(idx)];
        } else {
            i128 j = static_cast<i128>(idx - u128(nd));
            require(j >= 0 && j <= 2 * Gi, Status::decode_error, "dictionary index out of range");
            v = static_cast<double>(j - Gi) * step;
        }
        require(v != 0.0, Status::decode_error, "record encodes a zero weight");
        if (col == static_cast<uint64_t>(widths[l])) {
            require(!bias_set[l][row], Status::decode_error, "duplicate bias record");
            bias_set[l][row] = 1;
            bias[l][row] = v;
        } else {
            entries[l].push_back({uint32_t(row), uint32_t(col), v});
        }
    }
    if (stream.padded)
        require(stream.bits >= r.pos() && stream.bits - r.pos() < 8, Status::decode_error, "trailing bits after last record");
    else
        require(stream.bits == r.pos(), Status::decode_error, "trailing bits after last record");
    for (uint64_t b = r.pos(); b < stream.bits; ++b)
        require(((stream.bytes[b / 8] >> (7 - b % 8)) & 1u) == 0, Status::decode_error, "nonzero padding");
    for (uint64_t b = stream.bits; b < stream.bytes.size() * 8; ++b)
        require(((stream.bytes[b / 8] >> (7 - b % 8)) & 1u) == 0, Status::decode_error, "nonzero padding");

    std::vector<Layer> layers;
    try {
        for (uint64_t l = 0; l < L; ++l)
            layers.push_back(make_layer(widths[l + 1], widths[l], std::move(entries[l]), std::move(bias[l])));
    } catch (const Error& e) {
        fail(Status::decode_error, e.what());
    }
    return Network(widths[0], sc.activation, std::move(layers));
}

BitStream from_bytes(std::vector<uint8_t> bytes)
{
    BitStream s;
    s.bits = bytes.size() * 8;
    s.bytes = std::move(bytes);
    s.padded = true;
    return s;
}

void peek_constants(const BitStream& stream, double& C0, double& eps)
{
    BitReader r(stream);
    for (char c : std::string("SBN1"))
        require(r.get(8) == static_cast<uint8_t>(c), Status::decode_error, "bad magic");
    C0 = r.get_f64();
    eps = r.get_f64();
}

double entropy_floor(double gamma, double C, double eps)
{
    require(eps > 0 && eps < 0.5, Status::invalid_argument, "eps must lie in (0, 1/2)");
    require(gamma > 0, Status::invalid_argument, "gamma must be positive");
    return C * std::pow(eps, -gamma) / std::log2(1.0 / eps);
}

double sobolev_gamma(int d, double t, double s)
{
    require(d >= 1 && t > s, Status::invalid_argument, "need d >= 1 and t > s");
    return d / (t - s);
}

} // namespace sobnet
