#include "pu.hpp"

#include "error.hpp"
#include "jet.hpp"

#include <algorithm>
#include <cmath>

namespace sobnet {

namespace {

void require_pu_order(const ActivationSpec& spec)
{
    if (spec.tau != 0 && spec.tau != 1)
        fail(Status::unsupported,
             "bump construction needs tau in {0,1}; " + spec.name + " has tau=" + std::to_string(spec.tau));
}

// Shifts c and signs of the hidden units of one coordinate bump.
struct BumpShape {
    std::vector<double> shift;
    std::vector<double> sign;
    double scale;  // output factor
};

BumpShape shape(const ActivationSpec& spec, double s)
{
    require_pu_order(spec);
    if (spec.tau == 0) return {{1.5, -1.5}, {1.0, -1.0}, 1.0 / (spec.B - spec.A)};
    return {{2.0, 1.0, -1.0, -2.0}, {1.0, -1.0, -1.0, 1.0}, 1.0 / (s * (spec.B - spec.A))};
}

} // namespace

double bump_1d(const ActivationSpec& spec, double s, double x)
{
    BumpShape b = shape(spec, s);
    double acc = 0.0;
    for (size_t i = 0; i < b.shift.size(); ++i) acc += b.sign[i] * spec.value(s * (x + b.shift[i]));
    return acc * b.scale;
}

void bump_1d_derivs(const ActivationSpec& spec, double s, double x, int order, double* out)
{
    if (order > spec.max_order())
        fail(Status::order_exceeds_smoothness, "bump derivative order exceeds smoothness of " + spec.name);
    BumpShape b = shape(spec, s);
    double rd[kMaxOracleOrder + 1];
    std::fill(out, out + order + 1, 0.0);
    for (size_t i = 0; i < b.shift.size(); ++i) {
        spec.derivatives(s * (x + b.shift[i]), order, rd);
        for (int k = 0; k <= order; ++k) out[k] += b.sign[i] * rd[k];
    }
    double sk = b.scale;
    for (int k = 0; k <= order; ++k) {
        out[k] *= sk;
        sk *= s;
    }
}

Network bump_network(const ActivationSpec& spec, int d, int N, const std::vector<int>& m, double s)
{
    require(d >= 1 && N >= 1, Status::invalid_argument, "bump network needs d, N >= 1");
    require(static_cast<int>(m.size()) == d, Status::dimension_mismatch, "bump index dimension");
    for (int ml : m) require(ml >= 0 && ml <= N, Status::invalid_argument, "bump index outside {0..N}");
    BumpShape b = shape(spec, s);
    const int u = static_cast<int>(b.shift.size());
    std::vector<Entry> e1, e2;
    std::vector<double> b1;
    for (int l = 0; l < d; ++l) {
        for (int i = 0; i < u; ++i) {
            uint32_t row = static_cast<uint32_t>(l * u + i);
            e1.push_back({row, uint32_t(l), 3.0 * N * s});
            b1.push_back(s * (b.shift[i] - 3.0 * m[l]));
            e2.push_back({uint32_t(l), row, b.sign[i] * b.scale});
        }
    }
    std::vector<Layer> layers;
    layers.push_back(make_layer(d * u, d, std::move(e1), std::move(b1)));
    layers.push_back(make_layer(d, d * u, std::move(e2), std::vector<double>(d, 0.0)));
    return Network(d, spec.name, std::move(layers));
}

double select_scaling(DecayClass cls, int N, int d, double p, int n, double mu, double D)
{
    require(N >= 1, Status::invalid_argument, "N must be >= 1");
    switch (cls) {
    case DecayClass::exact: return 1.0;
    case DecayClass::exponential:
        require(mu > 0, Status::invalid_argument, "mu must be positive for exponential PUs");
        return std::pow(static_cast<double>(N), mu);
    case DecayClass::polynomial: {
        require(D > 0, Status::invalid_argument, "D must be positive for polynomial PUs");
        double dp = std::isinf(p) ? 0.0 : d / p;
        return std::pow(static_cast<double>(N), (2.0 * dp + d + n) / D);
    }
    }
    return 1.0;
}

double min_scaling(const ActivationSpec& spec) { return std::max(2.0 * spec.R / 3.0, 1.0); }

PUFamily make_pu_family(const ActivationSpec& spec, int d, int N, double s)
{
    require(s >= 1.0, Status::invalid_argument, "scaling s must be >= 1");
    PUFamily f;
    f.spec = spec;
    f.d = d;
    f.N = N;
    f.s = s;
    std::vector<int> m(d, 0);
    while (true) {
        f.indices.push_back(m);
        f.bumps.push_back(bump_network(spec, d, N, m, s));
        int l = d - 1;
        while (l >= 0 && m[l] == N) m[l--] = 0;
        if (l < 0) break;
        ++m[l];
    }
    return f;
}

PUReport verify_pu(const PUFamily& fam, int k_max, int gpp)
{
    const ActivationSpec& spec = fam.spec;
    require(k_max >= 0 && k_max <= spec.max_order(), Status::order_exceeds_smoothness,
            "k_max exceeds smoothness of " + spec.name);
    require(gpp >= 2, Status::invalid_argument, "grid_per_patch must be >= 2");
    const int d = fam.d, N = fam.N;
    const double off = 1e-9;

    std::vector<double> t;
    for (int c = 0; c < N; ++c)
        for (int i = 0; i < gpp; ++i)
            t.push_back(double(c) / N + off + (1.0 / N - 2 * off) * i / (gpp - 1));
    const int G = static_cast<int>(t.size());

    // tab[(m * G + i) * (k_max + 1) + k] = d^k/dx^k psi^s(3N(x - m/N)) at t[i]
    std::vector<double> tab(static_cast<size_t>(N + 1) * G * (k_max + 1));
    std::vector<double> buf(k_max + 1);
    for (int m = 0; m <= N; ++m) {
        for (int i = 0; i < G; ++i) {
            bump_1d_derivs(spec, fam.s, 3.0 * N * (t[i] - double(m) / N), k_max, buf.data());
            double f = 1.0;
            for (int k = 0; k <= k_max; ++k) {
                tab[(static_cast<size_t>(m) * G + i) * (k_max + 1) + k] = f * buf[k];
                f *= 3.0 * N;
            }
        }
    }

    JetLayout lay(d, k_max);
    PUReport rep;
    rep.activation = spec.name;
    rep.decay = spec.decay;
    rep.d = d;
    rep.N = N;
    rep.s = fam.s;
    rep.k_max = k_max;
    rep.grid_per_patch = gpp;
    rep.sum_deviation.assign(k_max + 1, 0.0);
    rep.complement_max.assign(k_max + 1, 0.0);
    rep.seminorm_max.assign(k_max + 1, 0.0);

    std::vector<int> gi(d, 0);
    long long count = 0;
    while (true) {
        ++count;
        for (int a = 0; a < lay.size(); ++a) {
            const std::vector<int>& alpha = lay.alphas[a];
            const int k = lay.degree[a];
            double sum = 0.0;
            for (size_t b = 0; b < fam.indices.size(); ++b) {
                const std::vector<int>& m = fam.indices[b];
                double v = 1.0;
                bool outside = false;
                for (int l = 0; l < d; ++l) {
                    v *= tab[(static_cast<size_t>(m[l]) * G + gi[l]) * (k_max + 1) + alpha[l]];
                    if (std::fabs(t[gi[l]] - double(m[l]) / N) >= 1.0 / N) outside = true;
                }
                sum += v;
                double av = std::fabs(v);
                rep.seminorm_max[k] = std::max(rep.seminorm_max[k], av);
                if (outside) rep.complement_max[k] = std::max(rep.complement_max[k], av);
            }
            double dev = k == 0 ? std::fabs(1.0 - sum) : std::fabs(sum);
            rep.sum_deviation[k] = std::max(rep.sum_deviation[k], dev);
        }
        int l = d - 1;
        while (l >= 0 && gi[l] == G - 1) gi[l--] = 0;
        if (l < 0) break;
        ++gi[l];
    }
    rep.grid_points = count;
    for (int k = 0; k <= k_max; ++k) {
        double scale = std::pow(double(N), k) * std::pow(fam.s, std::max(0, k - spec.tau));
        rep.seminorm_ratio.push_back(rep.seminorm_max[k] / scale);
    }
    return rep;
}

} // namespace sobnet
