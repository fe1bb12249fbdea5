#include "poly_nets.hpp"

#include "error.hpp"
#include "jet.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <mutex>

namespace sobnet {

double GadgetCert::max_error() const
{
    double e = 0.0;
    for (double v : errors) e = std::max(e, v);
    return e;
}

namespace {

double binom(int n, int k)
{
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

double falling(int r, int k)
{
    double v = 1.0;
    for (int i = 0; i < k; ++i) v *= (r - i);
    return v;
}

std::vector<double> linspace(double a, double b, int n)
{
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
    return v;
}

// Max over the grid of |D^alpha net - D^alpha target| per derivative order.
std::vector<double> measure(const Network& net, const std::vector<double>& xs, int order,
                            const std::function<double(const std::vector<int>&, const double*)>& target)
{
    const int d = net.input_dim();
    JetBatch jb = realize_jets(net, xs, order);
    JetLayout lay(d, order);
    std::vector<double> err(order + 1, 0.0);
    for (int a = 0; a < lay.size(); ++a) {
        double f = multi_factorial(lay.alphas[a]);
        for (int p = 0; p < jb.points; ++p) {
            double v = jb.at(0, a, p) * f;
            double e = std::fabs(v - target(lay.alphas[a], &xs[static_cast<size_t>(p) * d]));
            if (!(e <= err[lay.degree[a]])) err[lay.degree[a]] = std::isnan(e) ? INFINITY : e;
        }
    }
    return err;
}

double worst(const std::vector<double>& e)
{
    double m = 0.0;
    for (double v : e) m = std::max(m, v);
    return m;
}

struct Search {
    double delta;
    std::vector<double> errors;
};

// Smallest delta (to about 12% on a log scale) meeting eps; the best delta seen
// when the target is out of reach.
Search search_delta(const std::function<std::vector<double>(double)>& errors_at, double eps)
{
    Search best{1.0, errors_at(1.0)};
    double lo = 0.0, hi = 0.0;
    std::vector<double> hi_err;
    double delta = 1.0;
    std::vector<double> err = best.errors;
    int since_best = 0;
    for (int i = 0; i < 60; ++i) {
        if (worst(err) <= eps) {
            hi = delta;
            hi_err = err;
            break;
        }
        if (worst(err) < worst(best.errors)) {
            best = {delta, err};
            since_best = 0;
        } else if (++since_best >= 4) {
            break;
        }
        lo = delta;
        delta *= 2.0;
        err = errors_at(delta);
    }
    if (hi == 0.0) return best;
    if (lo == 0.0) return {hi, hi_err};
    for (int i = 0; i < 6; ++i) {
        double mid = std::sqrt(lo * hi);
        std::vector<double> e = errors_at(mid);
        if (worst(e) <= eps) {
            hi = mid;
            hi_err = e;
        } else {
            lo = mid;
        }
    }
    return {hi, hi_err};
}

GadgetCert make_cert(const std::string& target, double eps, double B, double delta, double x0,
                     std::vector<double> errors, int grid, const Network& net)
{
    GadgetCert c;
    c.target = target;
    c.eps_target = eps;
    c.B = B;
    c.delta = delta;
    c.x0 = x0;
    c.errors = std::move(errors);
    c.grid = grid;
    c.stats = stats(net);
    c.pass = c.max_error() <= eps;
    return c;
}

} // namespace

double gadget_x0(const ActivationSpec& spec, int r)
{
    auto x0 = spec.x0(r);
    if (!x0)
        fail(Status::unsupported,
             spec.name + " has no point with nonzero derivative of order " + std::to_string(r));
    return *x0;
}

Network monomial_net_at(const ActivationSpec& spec, int r, double delta, double x0)
{
    require(r >= 1, Status::invalid_argument, "monomial degree must be >= 1");
    double rd[kMaxOracleOrder + 1];
    require(r <= kMaxOracleOrder, Status::order_exceeds_smoothness, "monomial degree above oracle range");
    spec.derivatives(x0, r, rd);
    std::vector<Entry> e1, e2;
    for (int j = 0; j <= r; ++j) {
        e1.push_back({uint32_t(j), 0, -j / delta});
        double sign = (j % 2 == 0) ? 1.0 : -1.0;
        e2.push_back({0, uint32_t(j), std::pow(delta, r) / rd[r] * sign * binom(r, j)});
    }
    std::vector<Layer> layers;
    layers.push_back(make_layer(r + 1, 1, std::move(e1), std::vector<double>(r + 1, x0)));
    layers.push_back(make_layer(1, r + 1, std::move(e2), {0.0}));
    return Network(1, spec.name, std::move(layers));
}

Gadget monomial_net(const ActivationSpec& spec, int r, int n, double eps, double B)
{
    require(r >= 1 && r <= n, Status::invalid_argument, "monomial needs 1 <= r <= n");
    require(eps > 0 && eps < 1, Status::invalid_argument, "eps must lie in (0,1)");
    require(B > 0, Status::invalid_argument, "B must be positive");
    require(n <= spec.max_order(), Status::order_exceeds_smoothness,
            "certificate order exceeds smoothness of " + spec.name);
    const double x0 = gadget_x0(spec, r);
    const int grid = 1001;
    const std::vector<double> xs = linspace(-B, B, grid);
    auto target = [r](const std::vector<int>& a, const double* x) {
        int k = a[0];
        return k > r ? 0.0 : falling(r, k) * std::pow(x[0], r - k);
    };
    auto errors_at = [&](double delta) { return measure(monomial_net_at(spec, r, delta, x0), xs, n, target); };

    // The difference scale is delta = C / eps with C fixed per (activation, r, n, B):
    // the smallest power of two that certifies at eps = 0.1.
    static std::mutex mu;
    static std::map<std::string, double> cache;
    const std::string key = spec.name + "|" + std::to_string(r) + "|" + std::to_string(n) + "|" + hexfloat(B);
    double C = 0.0;
    {
        std::lock_guard<std::mutex> lock(mu);
        if (auto it = cache.find(key); it != cache.end()) C = it->second;
    }
    if (C == 0.0) {
        C = 1.0;
        for (int i = 0; i < 30 && worst(errors_at(C / 0.1)) > 0.1; ++i) C *= 2.0;
        std::lock_guard<std::mutex> lock(mu);
        cache[key] = C;
    }
    double delta = C / eps;
    std::vector<double> err = errors_at(delta);
    for (int i = 0; i < 10 && worst(err) > eps; ++i) {
        delta *= 2.0;
        err = errors_at(delta);
    }
    Network net = monomial_net_at(spec, r, delta, x0);
    GadgetCert cert = make_cert("x^" + std::to_string(r), eps, B, delta, x0, std::move(err), grid, net);
    return {std::move(net), std::move(cert)};
}

Network identity_net_at(const ActivationSpec& spec, int L, int d, double delta, double x0)
{
    require(L >= 2, Status::invalid_argument, "identity network needs L >= 2");
    require(d >= 1, Status::invalid_argument, "identity network needs d >= 1");
    double rd[2];
    spec.derivatives(x0, 1, rd);
    const double g = rd[1];
    std::vector<Layer> layers;
    {
        std::vector<Entry> es;
        for (int l = 0; l < d; ++l) es.push_back({uint32_t(2 * l + 1), uint32_t(l), -1.0 / delta});
        layers.push_back(make_layer(2 * d, d, std::move(es), std::vector<double>(2 * d, x0)));
    }
    for (int i = 0; i < L - 2; ++i) {
        std::vector<Entry> es;
        for (int l = 0; l < d; ++l) {
            es.push_back({uint32_t(2 * l + 1), uint32_t(2 * l), -1.0 / g});
            es.push_back({uint32_t(2 * l + 1), uint32_t(2 * l + 1), 1.0 / g});
        }
        layers.push_back(make_layer(2 * d, 2 * d, std::move(es), std::vector<double>(2 * d, x0)));
    }
    {
        std::vector<Entry> es;
        for (int l = 0; l < d; ++l) {
            es.push_back({uint32_t(l), uint32_t(2 * l), delta / g});
            es.push_back({uint32_t(l), uint32_t(2 * l + 1), -delta / g});
        }
        layers.push_back(make_layer(d, 2 * d, std::move(es), std::vector<double>(d, 0.0)));
    }
    return Network(d, spec.name, std::move(layers));
}

Gadget identity_net(const ActivationSpec& spec, int L, int d, double B, double eps, int order)
{
    require(L >= 2, Status::invalid_argument, "identity network needs L >= 2");
    require(eps > 0, Status::invalid_argument, "eps must be positive");
    order = std::min(order, spec.max_order());
    const double x0 = gadget_x0(spec, 1);
    const int grid = 1001;
    const std::vector<double> xs = linspace(-B, B, grid);
    auto target = [](const std::vector<int>& a, const double* x) {
        return a[0] == 0 ? x[0] : (a[0] == 1 ? 1.0 : 0.0);
    };
    // Coordinates are decoupled, so one coordinate certifies all d.
    Search s = search_delta([&](double delta) { return measure(identity_net_at(spec, L, 1, delta, x0), xs, order, target); },
                            eps);
    Network net = identity_net_at(spec, L, d, s.delta, x0);
    GadgetCert cert = make_cert("identity", eps, B, s.delta, x0, std::move(s.errors), grid, net);
    return {std::move(net), std::move(cert)};
}

Network mult_net_at(const ActivationSpec& spec, double delta, double x0)
{
    double rd[3];
    spec.derivatives(x0, 2, rd);
    const double c = delta * delta / (4.0 * rd[2]);
    // Hidden units (x0 - j(x+y)/delta, x0 - j(x-y)/delta) for j = 1, 2; the j = 0
    // terms of the two squares cancel and are left out. The interleaved order makes
    // the output exactly 0 at y = 0.
    std::vector<Entry> e1, e2;
    for (int j = 1; j <= 2; ++j) {
        uint32_t p = 2 * (j - 1), m = p + 1;
        e1.push_back({p, 0, -j / delta});
        e1.push_back({p, 1, -j / delta});
        e1.push_back({m, 0, -j / delta});
        e1.push_back({m, 1, j / delta});
        double w = c * ((j % 2 == 0) ? 1.0 : -1.0) * binom(2, j);
        e2.push_back({0, p, w});
        e2.push_back({0, m, -w});
    }
    std::vector<Layer> layers;
    layers.push_back(make_layer(4, 2, std::move(e1), std::vector<double>(4, x0)));
    layers.push_back(make_layer(1, 4, std::move(e2), {0.0}));
    return Network(2, spec.name, std::move(layers));
}

Gadget mult_net(const ActivationSpec& spec, double eps, double B, int order)
{
    require(eps > 0, Status::invalid_argument, "eps must be positive");
    order = std::min(order, spec.max_order());
    const double x0 = gadget_x0(spec, 2);
    const int grid = 101;
    std::vector<double> xs;
    for (double x : linspace(-B, B, grid))
        for (double y : linspace(-B, B, grid)) {
            xs.push_back(x);
            xs.push_back(y);
        }
    auto target = [](const std::vector<int>& a, const double* x) {
        if (a[0] == 0 && a[1] == 0) return x[0] * x[1];
        if (a[0] == 1 && a[1] == 0) return x[1];
        if (a[0] == 0 && a[1] == 1) return x[0];
        if (a[0] == 1 && a[1] == 1) return 1.0;
        return 0.0;
    };
    Search s = search_delta([&](double delta) { return measure(mult_net_at(spec, delta, x0), xs, order, target); }, eps);
    Network net = mult_net_at(spec, s.delta, x0);
    GadgetCert cert = make_cert("xy", eps, B, s.delta, x0, std::move(s.errors), grid, net);
    return {std::move(net), std::move(cert)};
}

Network product_chain(const Network& base, GadgetSource& gadgets)
{
    const int m = base.output_dim();
    require(m >= 1, Status::invalid_argument, "product chain needs at least one factor");
    if (m == 1) return base;
    const std::string& act = base.activation();
    Network tail = selector(m, {0}, act);
    for (int i = 1; i < m; ++i) {
        Network pick = selector(m, {i}, act);
        Network pass = tail.depth() == 1 ? pick : concat(gadgets.identity(tail.depth()), pick);
        tail = concat(gadgets.mult(), parallelize({pass, tail}));
    }
    return concat(tail, base);
}

DirectGadgets::DirectGadgets(ActivationSpec spec, double eps, double B, int order)
    : spec_(std::move(spec)), eps_(eps), B_(B), order_(order)
{
}

const Network& DirectGadgets::identity(int L)
{
    for (auto& [l, g] : ids_)
        if (l == L) return g.net;
    ids_.emplace_back(L, identity_net(spec_, L, 1, B_, eps_, order_));
    return ids_.back().second.net;
}

const Network& DirectGadgets::mult()
{
    if (mult_.empty()) mult_.push_back(mult_net(spec_, eps_, B_, order_));
    return mult_.front().net;
}

std::vector<GadgetCert> DirectGadgets::certs() const
{
    std::vector<GadgetCert> out;
    for (const auto& [l, g] : ids_) out.push_back(g.cert);
    for (const auto& g : mult_) out.push_back(g.cert);
    return out;
}

} // namespace sobnet
