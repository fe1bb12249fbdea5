#include "metrics.hpp"

#include "error.hpp"
#include "jet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sobnet {

int default_grid(int d)
{
    switch (d) {
    case 1: return 512;
    case 2: return 128;
    default: return 32;
    }
}

std::vector<double> midpoint_grid(int d, int n)
{
    size_t total = 1;
    for (int i = 0; i < d; ++i) total *= n;
    std::vector<double> xs(total * d);
    std::vector<int> idx(d, 0);
    for (size_t p = 0; p < total; ++p) {
        for (int i = 0; i < d; ++i) xs[p * d + i] = (idx[i] + 0.5) / n;
        for (int i = d - 1; i >= 0; --i) {
            if (++idx[i] < n) break;
            idx[i] = 0;
        }
    }
    return xs;
}

namespace {

// Trapezoid weights on the midpoint nodes of one axis, normalized to sum 1.
std::vector<double> axis_weights(int n)
{
    std::vector<double> w(n, 1.0);
    if (n > 1) {
        w.front() = w.back() = 0.5;
        for (double& v : w) v /= (n - 1);
    }
    return w;
}

// vals[a * points + p] holds D^alpha_a g at grid point p.
NormEstimate aggregate(const JetLayout& lay, const std::vector<double>& vals, int d, int n, int k, double p,
                       const char* method)
{
    const size_t points = vals.size() / lay.size();
    NormEstimate est;
    est.k = k;
    est.p = p;
    est.grid_n = n;
    est.method = method;
    est.per_order.assign(k + 1, 0.0);
    std::vector<double> w1 = axis_weights(n);
    for (int a = 0; a < lay.size(); ++a) {
        const double* v = vals.data() + a * points;
        double norm = 0.0;
        if (std::isinf(p)) {
            for (size_t i = 0; i < points; ++i) {
                double e = std::fabs(v[i]);
                if (!(e <= norm)) norm = std::isnan(e) ? INFINITY : e;
            }
        } else {
            std::vector<int> idx(d, 0);
            double acc = 0.0;
            for (size_t i = 0; i < points; ++i) {
                double w = 1.0;
                for (int j = 0; j < d; ++j) w *= w1[idx[j]];
                acc += w * std::pow(std::fabs(v[i]), p);
                for (int j = d - 1; j >= 0; --j) {
                    if (++idx[j] < n) break;
                    idx[j] = 0;
                }
            }
            norm = std::pow(acc, 1.0 / p);
        }
        int deg = lay.degree[a];
        est.per_order[deg] = std::max(est.per_order[deg], norm);
    }
    est.value = *std::max_element(est.per_order.begin(), est.per_order.end());
    return est;
}

void check_args(int d, int k, double p, int grid_n)
{
    require(k >= 0 && k <= kMaxOracleOrder, Status::order_exceeds_smoothness, "norm order outside supported range");
    require(p >= 1.0, Status::invalid_argument, "p must be >= 1");
    require(grid_n >= 16, Status::invalid_argument, "grid_n must be >= 16");
    require(d >= 1 && d <= 3, Status::invalid_argument, "dimension must be 1..3");
}

// D^alpha f at every grid point for every |alpha| <= k.
std::vector<double> target_derivs(const Target& f, const JetLayout& lay, const std::vector<double>& xs)
{
    const int d = lay.d;
    const size_t points = xs.size() / d;
    std::vector<double> out(lay.size() * points), c(lay.size());
    std::vector<double> fact(lay.size());
    for (int a = 0; a < lay.size(); ++a) fact[a] = multi_factorial(lay.alphas[a]);
    for (size_t i = 0; i < points; ++i) {
        f.jet(&xs[i * d], lay, c.data());
        for (int a = 0; a < lay.size(); ++a) out[a * points + i] = c[a] * fact[a];
    }
    return out;
}

std::vector<double> network_derivs(const Network& net, const JetLayout& lay, const std::vector<double>& xs)
{
    JetBatch jb = realize_jets(net, xs, lay.order);
    std::vector<double> out(lay.size() * static_cast<size_t>(jb.points));
    for (int a = 0; a < lay.size(); ++a) {
        double f = multi_factorial(lay.alphas[a]);
        for (int p = 0; p < jb.points; ++p) out[a * static_cast<size_t>(jb.points) + p] = jb.at(0, a, p) * f;
    }
    return out;
}

double binom(int n, int k)
{
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// Central-difference derivatives of f - R built from point values only.
std::vector<double> fd_derivs(const Target& f, const Network& net, const JetLayout& lay, const std::vector<double>& xs)
{
    const int d = lay.d;
    const size_t points = xs.size() / d;
    std::vector<double> out(lay.size() * points);
    for (int a = 0; a < lay.size(); ++a) {
        const std::vector<int>& alpha = lay.alphas[a];
        const int order = lay.degree[a];
        const double h = order == 0 ? 0.0 : std::pow(std::numeric_limits<double>::epsilon(), 1.0 / (order + 2));
        // Stencil: tensor product of 1-d central differences.
        std::vector<std::pair<std::vector<double>, double>> stencil{{std::vector<double>(d, 0.0), 1.0}};
        for (int i = 0; i < d; ++i) {
            std::vector<std::pair<std::vector<double>, double>> next;
            for (const auto& [off, w] : stencil) {
                for (int j = 0; j <= alpha[i]; ++j) {
                    auto o = off;
                    o[i] += (alpha[i] / 2.0 - j) * h;
                    double c = ((j % 2 == 0) ? 1.0 : -1.0) * binom(alpha[i], j) / std::pow(h, alpha[i]);
                    next.push_back({o, w * c});
                }
            }
            stencil = std::move(next);
        }
        std::vector<double> shifted(points * d);
        for (const auto& [off, w] : stencil) {
            for (size_t pnt = 0; pnt < points; ++pnt)
                for (int i = 0; i < d; ++i) shifted[pnt * d + i] = xs[pnt * d + i] + off[i];
            std::vector<double> r = realize_batch(net, shifted);
            for (size_t pnt = 0; pnt < points; ++pnt)
                out[a * points + pnt] += w * (f.value(&shifted[pnt * d]) - r[pnt * net.output_dim()]);
        }
    }
    return out;
}

} // namespace

NormEstimate sobolev_distance(const Target& f, const Network& net, int k, double p, int grid_n, DerivMode mode)
{
    const int d = net.input_dim();
    require(f.d == d, Status::dimension_mismatch, "target and network dimensions differ");
    if (grid_n == 0) grid_n = default_grid(d);
    check_args(d, k, p, grid_n);
    const JetLayout lay(d, k);
    const std::vector<double> xs = midpoint_grid(d, grid_n);
    if (mode == DerivMode::finite_difference) return aggregate(lay, fd_derivs(f, net, lay, xs), d, grid_n, k, p, "finite-difference");
    std::vector<double> g = target_derivs(f, lay, xs);
    std::vector<double> r = network_derivs(net, lay, xs);
    for (size_t i = 0; i < g.size(); ++i) g[i] -= r[i];
    return aggregate(lay, g, d, grid_n, k, p, "exact-derivative");
}

NormEstimate network_distance(const Network& a, const Network& b, int k, double p, int grid_n)
{
    const int d = a.input_dim();
    require(b.input_dim() == d, Status::dimension_mismatch, "network dimensions differ");
    if (grid_n == 0) grid_n = default_grid(d);
    check_args(d, k, p, grid_n);
    const JetLayout lay(d, k);
    const std::vector<double> xs = midpoint_grid(d, grid_n);
    std::vector<double> g = network_derivs(a, lay, xs);
    std::vector<double> r = network_derivs(b, lay, xs);
    for (size_t i = 0; i < g.size(); ++i) g[i] -= r[i];
    return aggregate(lay, g, d, grid_n, k, p, "exact-derivative");
}

NormEstimate sobolev_norm(const Target& f, int k, double p, int grid_n)
{
    if (grid_n == 0) grid_n = default_grid(f.d);
    check_args(f.d, k, p, grid_n);
    const JetLayout lay(f.d, k);
    return aggregate(lay, target_derivs(f, lay, midpoint_grid(f.d, grid_n)), f.d, grid_n, k, p, "exact-derivative");
}

RateFit fit_rate(const std::vector<std::pair<double, double>>& pts)
{
    require(pts.size() >= 2, Status::invalid_argument, "rate fit needs at least two points");
    std::vector<double> lx, ly;
    for (const auto& [x, y] : pts) {
        require(x > 0 && y > 0, Status::invalid_argument, "rate fit needs positive values");
        lx.push_back(std::log(x));
        ly.push_back(std::log(y));
    }
    const double n = static_cast<double>(pts.size());
    double mx = 0, my = 0;
    for (size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    require(sxx > 0, Status::invalid_argument, "rate fit needs distinct x values");
    RateFit r;
    r.exponent = sxy / sxx;
    r.intercept = my - r.exponent * mx;
    r.r_squared = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return r;
}

} // namespace sobnet
