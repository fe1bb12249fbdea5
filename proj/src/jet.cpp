#include "jet.hpp"

#include "error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace sobnet {

namespace {

void enumerate(int d, int deg, int pos, std::vector<int>& cur, std::vector<std::vector<int>>& out)
{
    if (pos == d - 1) {
        cur[pos] = deg;
        out.push_back(cur);
        return;
    }
    for (int a = deg; a >= 0; --a) {
        cur[pos] = a;
        enumerate(d, deg - a, pos + 1, cur, out);
    }
}

} // namespace

JetLayout::JetLayout(int d_, int order_) : d(d_), order(order_)
{
    require(d >= 1 && order >= 0, Status::invalid_argument, "jet layout needs d >= 1, order >= 0");
    std::vector<int> cur(d, 0);
    for (int k = 0; k <= order; ++k) {
        size_t before = alphas.size();
        enumerate(d, k, 0, cur, alphas);
        degree.insert(degree.end(), alphas.size() - before, k);
    }
    for (int a = 1; a < size(); ++a) {
        for (int b = 1; b < size(); ++b) {
            if (degree[a] + degree[b] > order) continue;
            std::vector<int> s(d);
            for (int i = 0; i < d; ++i) s[i] = alphas[a][i] + alphas[b][i];
            products.push_back({a, b, index(s)});
        }
    }
}

int JetLayout::index(const std::vector<int>& alpha) const
{
    for (int i = 0; i < size(); ++i)
        if (alphas[i] == alpha) return i;
    fail(Status::invalid_argument, "multi-index outside jet layout");
}

double multi_factorial(const std::vector<int>& alpha)
{
    double r = 1.0;
    for (int a : alpha)
        for (int i = 2; i <= a; ++i) r *= i;
    return r;
}

double JetBatch::derivative(const JetLayout& lay, int unit, const std::vector<int>& alpha, int p) const
{
    return at(unit, lay.index(alpha), p) * multi_factorial(alpha);
}

namespace {

// Applies rho to every jet of `in` (units x ncoef x points) in place.
bool activate(const ActivationSpec& spec, const JetLayout& lay, int units, int points, std::vector<double>& buf)
{
    const int nc = lay.size();
    const int K = lay.order;
    bool kink = false;
    double rd[kMaxOracleOrder + 1];
    if (K == 0) {
        for (size_t i = 0; i < static_cast<size_t>(units) * points; ++i) {
            kink |= spec.derivatives(buf[i], 0, rd);
            buf[i] = rd[0];
        }
        return kink;
    }
    double inv_fact[kMaxOracleOrder + 1];
    inv_fact[0] = 1.0;
    for (int i = 1; i <= K; ++i) inv_fact[i] = inv_fact[i - 1] / i;
    std::vector<double> u(nc), res(nc), tmp(nc);
    for (int unit = 0; unit < units; ++unit) {
        double* base = buf.data() + static_cast<size_t>(unit) * nc * points;
        for (int p = 0; p < points; ++p) {
            for (int c = 0; c < nc; ++c) u[c] = base[static_cast<size_t>(c) * points + p];
            kink |= spec.derivatives(u[0], K, rd);
            u[0] = 0.0;
            std::fill(res.begin(), res.end(), 0.0);
            res[0] = rd[K] * inv_fact[K];
            for (int i = K - 1; i >= 0; --i) {
                for (int c = 0; c < nc; ++c) tmp[c] = res[0] * u[c];
                for (const auto& pr : lay.products) tmp[pr.c] += res[pr.a] * u[pr.b];
                tmp[0] = rd[i] * inv_fact[i];
                std::swap(res, tmp);
            }
            for (int c = 0; c < nc; ++c) base[static_cast<size_t>(c) * points + p] = res[c];
        }
    }
    return kink;
}

// One affine layer applied to a chunk of jets; accumulation in entry order, then bias.
void affine(const Layer& l, int nc, int points, const std::vector<double>& in, std::vector<double>& out)
{
    const size_t block = static_cast<size_t>(nc) * points;
    out.assign(static_cast<size_t>(l.rows) * block, 0.0);
    for (const Entry& e : l.entries) {
        double* dst = out.data() + e.row * block;
        const double* src = in.data() + e.col * block;
        const double w = e.value;
        for (size_t i = 0; i < block; ++i) dst[i] += w * src[i];
    }
    for (int r = 0; r < l.rows; ++r) {
        double* dst = out.data() + r * block;
        for (int p = 0; p < points; ++p) dst[p] += l.bias[r];
    }
}

} // namespace

JetBatch realize_jets(const Network& net, const std::vector<double>& xs, int order)
{
    const int d = net.input_dim();
    require(xs.size() % d == 0, Status::dimension_mismatch, "input batch size not a multiple of d");
    require(order >= 0 && order <= kMaxOracleOrder, Status::order_exceeds_smoothness,
            "jet order outside supported range");
    const ActivationSpec spec = lookup(net.activation());
    if (net.depth() > 1 && order > spec.max_order())
        fail(Status::order_exceeds_smoothness,
             "order " + std::to_string(order) + " exceeds smoothness of " + spec.name);
    const JetLayout lay(d, order);
    const int nc = lay.size();
    const int total = static_cast<int>(xs.size() / d);

    JetBatch jb;
    jb.units = net.output_dim();
    jb.ncoef = nc;
    jb.points = total;
    jb.data.assign(static_cast<size_t>(jb.units) * nc * total, 0.0);

    int width = d;
    for (const Layer& l : net.layers()) width = std::max(width, l.rows);
    const size_t budget = size_t(1) << 21;  // doubles per working buffer
    const int chunk = static_cast<int>(std::clamp<size_t>(budget / (static_cast<size_t>(width) * nc), 1, 4096));

    std::vector<int> unit_index(d);
    for (int i = 0; i < d; ++i) {
        std::vector<int> e(d, 0);
        e[i] = 1;
        unit_index[i] = order >= 1 ? lay.index(e) : -1;
    }

    std::vector<double> a, b;
    for (int p0 = 0; p0 < total; p0 += chunk) {
        const int pts = std::min(chunk, total - p0);
        a.assign(static_cast<size_t>(d) * nc * pts, 0.0);
        for (int i = 0; i < d; ++i) {
            for (int p = 0; p < pts; ++p) {
                a[static_cast<size_t>(i) * nc * pts + p] = xs[static_cast<size_t>(p0 + p) * d + i];
                if (order >= 1) a[(static_cast<size_t>(i) * nc + unit_index[i]) * pts + p] = 1.0;
            }
        }
        for (int l = 0; l < net.depth(); ++l) {
            const Layer& layer = net.layers()[l];
            affine(layer, nc, pts, a, b);
            if (l + 1 < net.depth()) jb.one_sided |= activate(spec, lay, layer.rows, pts, b);
            std::swap(a, b);
        }
        for (int u = 0; u < jb.units; ++u)
            for (int c = 0; c < nc; ++c)
                std::copy_n(a.data() + (static_cast<size_t>(u) * nc + c) * pts, pts,
                            jb.data.data() + (static_cast<size_t>(u) * nc + c) * total + p0);
    }
    return jb;
}

DerivativeResult derivative(const Network& net, const std::vector<double>& x, const std::vector<int>& alpha,
                            int output)
{
    require(static_cast<int>(x.size()) == net.input_dim(), Status::dimension_mismatch, "point dimension");
    require(static_cast<int>(alpha.size()) == net.input_dim(), Status::dimension_mismatch, "multi-index dimension");
    require(output >= 0 && output < net.output_dim(), Status::dimension_mismatch, "output index");
    int order = 0;
    for (int a : alpha) {
        require(a >= 0, Status::invalid_argument, "negative multi-index entry");
        order += a;
    }
    DerivativeResult r;
    if (order <= kMaxOracleOrder) {
        JetBatch jb = realize_jets(net, x, order);
        JetLayout lay(net.input_dim(), order);
        r.value = jb.derivative(lay, output, alpha, 0);
        r.one_sided = jb.one_sided;
        return r;
    }
    int i = static_cast<int>(std::find_if(alpha.begin(), alpha.end(), [](int a) { return a > 0; }) - alpha.begin());
    std::vector<int> lower = alpha;
    --lower[i];
    double h = std::pow(std::numeric_limits<double>::epsilon(), 1.0 / (order + 2)) * std::max(1.0, std::fabs(x[i]));
    std::vector<double> xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    DerivativeResult fp = derivative(net, xp, lower, output);
    DerivativeResult fm = derivative(net, xm, lower, output);
    r.value = (fp.value - fm.value) / (2.0 * h);
    r.one_sided = fp.one_sided || fm.one_sided;
    r.finite_difference = true;
    return r;
}

} // namespace sobnet
