#include "localizer.hpp"

#include "error.hpp"
#include "jet.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <mutex>
#include <set>

namespace sobnet {

std::vector<Patch> make_patches(int N, int d)
{
    require(N >= 1, Status::invalid_argument, "N must be >= 1");
    require(d >= 1, Status::invalid_argument, "d must be >= 1");
    std::vector<Patch> out;
    std::vector<int> m(d, 0);
    while (true) {
        out.push_back({m, N});
        int l = d - 1;
        while (l >= 0 && m[l] == N) m[l--] = 0;
        if (l < 0) break;
        ++m[l];
    }
    return out;
}

double LocalPolynomial::value(const double* x) const
{
    double acc = 0.0;
    for (size_t i = 0; i < alphas.size(); ++i) {
        double t = coeffs[i];
        for (size_t l = 0; l < alphas[i].size(); ++l) t *= std::pow(x[l], alphas[i][l]);
        acc += t;
    }
    return acc;
}

namespace {

double binom(int n, int k)
{
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

} // namespace

LocalPolynomial fit_local_polynomial(const Target& f, const Patch& patch, int n)
{
    require(n >= 1, Status::invalid_argument, "polynomial order n must be >= 1");
    const int d = static_cast<int>(patch.m.size());
    require(f.d == d, Status::dimension_mismatch, "target and patch dimensions differ");
    const JetLayout lay(d, n - 1);
    const int nb = lay.size();
    const int q = 2 * n + 3;
    int total = 1;
    for (int l = 0; l < d; ++l) total *= q;

    // Local coordinates u = N x - m in (-1, 1).
    Eigen::MatrixXd A(total, nb);
    Eigen::VectorXd b(total);
    std::vector<int> idx(d, 0);
    std::vector<double> x(d), u(d);
    for (int r = 0; r < total; ++r) {
        for (int l = 0; l < d; ++l) {
            u[l] = -1.0 + (2.0 * idx[l] + 1.0) / q;
            x[l] = (patch.m[l] + u[l]) / patch.N;
        }
        for (int c = 0; c < nb; ++c) {
            double v = 1.0;
            for (int l = 0; l < d; ++l) v *= std::pow(u[l], lay.alphas[c][l]);
            A(r, c) = v;
        }
        b(r) = f.value(x.data());
        for (int l = d - 1; l >= 0; --l) {
            if (++idx[l] < q) break;
            idx[l] = 0;
        }
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    require(qr.rank() == nb, Status::internal, "rank-deficient local fit");
    Eigen::VectorXd a = qr.solve(b);

    LocalPolynomial lp;
    lp.patch = patch;
    lp.n = n;
    lp.alphas = lay.alphas;
    lp.residual = (A * a - b).cwiseAbs().maxCoeff();
    lp.coeffs.assign(nb, 0.0);
    // prod_l (N x_l - m_l)^{beta_l} expanded into global monomials x^gamma.
    for (int c = 0; c < nb; ++c) {
        const std::vector<int>& beta = lay.alphas[c];
        std::vector<int> gamma(d, 0);
        while (true) {
            double w = a(c);
            for (int l = 0; l < d; ++l)
                w *= binom(beta[l], gamma[l]) * std::pow(double(patch.N), gamma[l]) *
                     std::pow(double(-patch.m[l]), beta[l] - gamma[l]);
            lp.coeffs[lay.index(gamma)] += w;
            int l = d - 1;
            while (l >= 0 && gamma[l] == beta[l]) gamma[l--] = 0;
            if (l < 0) break;
            ++gamma[l];
        }
    }
    return lp;
}

double rate_denominator(DecayClass cls, int n, int k, int tau, double mu)
{
    double kp = cls == DecayClass::exponential ? std::max(0, k - tau) : 0.0;
    return n - k - mu * kp;
}

int choose_N(double eps, int n, int k, int tau, double mu, double Ctilde, DecayClass cls)
{
    require(eps > 0, Status::invalid_argument, "eps must be positive");
    require(Ctilde > 0, Status::invalid_argument, "Ctilde must be positive");
    double a = rate_denominator(cls, n, k, tau, mu);
    require(a > 0, Status::invalid_argument, "plan exponent n - k - mu*max(0,k-tau) must be positive");
    double v = std::pow(eps / (2.0 * Ctilde), -1.0 / a);
    return std::max(1, static_cast<int>(std::ceil(v * (1.0 - 1e-12))));
}

SynthesisPlan make_plan(const std::string& activation, double eps, int n, int k, double p, int d, double mu,
                        double Ctilde, int N_override)
{
    const ActivationSpec spec = lookup(activation);
    require(eps > 0 && eps < 0.5, Status::invalid_argument, "eps must lie in (0, 0.5)");
    require(d >= 1 && d <= 3, Status::invalid_argument, "d must be 1..3");
    require(n >= 1 && n <= 6, Status::invalid_argument, "n must be 1..6");
    require(k >= 0 && k <= 3, Status::invalid_argument, "k must be 0..3");
    require(p >= 1, Status::invalid_argument, "p must be >= 1");
    require(n >= k + 1, Status::invalid_argument, "need n >= k + 1");
    require(k <= spec.max_order(), Status::order_exceeds_smoothness,
            "k=" + std::to_string(k) + " exceeds smoothness of " + spec.name);
    require(spec.tau == 0 || spec.tau == 1, Status::unsupported, spec.name + " has no tau in {0,1} bump construction");
    if (!spec.x0(2))
        fail(Status::unsupported, spec.name + " has no point with rho''(x0) != 0; the multiplication gadget is unavailable");
    if (spec.decay == DecayClass::polynomial)
        require(k <= spec.tau, Status::unsupported, "polynomial-class synthesis requires k <= tau");
    if (spec.decay == DecayClass::exponential)
        require(mu > 0, Status::invalid_argument, "mu must be positive for exponential PUs");

    SynthesisPlan pl;
    pl.activation = spec.name;
    pl.eps = eps;
    pl.n = n;
    pl.k = k;
    pl.p = p;
    pl.d = d;
    pl.mu = mu;
    pl.Ctilde = Ctilde;
    pl.N = N_override > 0 ? N_override : choose_N(eps, n, k, spec.tau, mu, Ctilde, spec.decay);
    pl.s = std::max(1.0, select_scaling(spec.decay, pl.N, d, p, n, mu, spec.D));
    const double dp = std::isinf(p) ? 0.0 : d / p;
    const double kp = spec.decay == DecayClass::exponential ? mu * std::max(0, k - spec.tau) : 0.0;
    const double e1 = dp + d + k + kp;
    pl.eps_sub = eps * std::pow(double(pl.N), -e1);
    pl.theta = 2.0 + (2.0 * e1 + dp + d) / rate_denominator(spec.decay, n, k, spec.tau, mu);
    long long per = 1;
    for (int i = 1; i <= d; ++i) per = per * (n - 1 + i) / i;  // C(n-1+d, d)
    long long cells = 1;
    for (int i = 0; i < d; ++i) cells *= (pl.N + 1);
    pl.T = cells * per;
    pl.L = d + n;
    return pl;
}

double LocalizedSum::value(const double* x) const
{
    const int d = family.d;
    const int N = family.N;
    double acc = 0.0;
    for (size_t b = 0; b < family.indices.size(); ++b) {
        double phi = 1.0;
        for (int l = 0; l < d; ++l) phi *= bump_1d(family.spec, family.s, 3.0 * N * (x[l] - double(family.indices[b][l]) / N));
        acc += phi * polys[b].value(x);
    }
    return acc;
}

LocalizedSum localized_sum(const Target& f, const SynthesisPlan& plan)
{
    require(f.d == plan.d, Status::dimension_mismatch, "target and plan dimensions differ");
    LocalizedSum ls{make_pu_family(lookup(plan.activation), plan.d, plan.N, plan.s), {}};
    for (const auto& m : ls.family.indices) ls.polys.push_back(fit_local_polynomial(f, Patch{m, plan.N}, plan.n));
    return ls;
}

namespace {

// Process-wide gadget cache keyed by (activation, kind, eps, B, L, order).
class CachedGadgets : public GadgetSource {
public:
    CachedGadgets(const ActivationSpec& spec, double eps, double B, int order)
        : spec_(spec), eps_(eps), B_(B), order_(order)
    {
    }

    const Network& identity(int L) override
    {
        return get("id" + std::to_string(L), [&] { return identity_net(spec_, L, 1, B_, eps_, order_); });
    }
    const Network& mult() override
    {
        return get("mult", [&] { return mult_net(spec_, eps_, B_, order_); });
    }
    const std::vector<GadgetCert>& used() const { return used_; }

private:
    ActivationSpec spec_;
    double eps_, B_;
    int order_;
    std::set<std::string> seen_;
    std::vector<GadgetCert> used_;

    static std::mutex& mu()
    {
        static std::mutex m;
        return m;
    }
    static std::map<std::string, Gadget>& cache()
    {
        static std::map<std::string, Gadget> c;
        return c;
    }

    template <class Build>
    const Network& get(const std::string& kind, Build build)
    {
        const std::string key = spec_.name + "|" + kind + "|" + hexfloat(eps_) + "|" + hexfloat(B_) + "|" +
                                std::to_string(order_);
        std::unique_lock<std::mutex> lock(mu());
        auto it = cache().find(key);
        if (it == cache().end()) {
            lock.unlock();
            Gadget g = build();
            lock.lock();
            it = cache().emplace(key, std::move(g)).first;
        }
        if (seen_.insert(key).second) used_.push_back(it->second.cert);
        return it->second.net;
    }
};

} // namespace

SynthesisResult synthesize(const Target& f, const SynthesisPlan& plan, bool measure)
{
    const auto t0 = std::chrono::steady_clock::now();
    require(f.d == plan.d, Status::dimension_mismatch, "target and plan dimensions differ");
    const ActivationSpec spec = lookup(plan.activation);
    const int d = plan.d;
    const double B = 2.0;
    LocalizedSum ls = localized_sum(f, plan);

    CachedGadgets gadgets(spec, plan.eps_sub, B, plan.k);
    CachedGadgets padding(spec, plan.eps_sub / double(plan.T), B, plan.k);
    const JetLayout alphas(d, plan.n - 1);

    std::vector<Network> branches;
    std::vector<double> coeffs;
    branches.reserve(plan.T);
    for (size_t b = 0; b < ls.family.indices.size(); ++b) {
        const Network& bump = ls.family.bumps[b];
        for (int a = 0; a < alphas.size(); ++a) {
            std::vector<Network> parts{bump};
            for (int l = 0; l < d; ++l)
                for (int r = 0; r < alphas.alphas[a][l]; ++r)
                    parts.push_back(concat(gadgets.identity(2), selector(d, {l}, spec.name)));
            Network psi = product_chain(parallelize(parts), gadgets);
            if (psi.depth() < plan.L) psi = concat(padding.identity(plan.L - psi.depth() + 1), psi);
            branches.push_back(std::move(psi));
            coeffs.push_back(ls.polys[b].coeffs[a]);
        }
    }
    Network scaffold = parallelize(branches);
    std::vector<Entry> row;
    for (size_t i = 0; i < coeffs.size(); ++i) row.push_back({0, uint32_t(i), coeffs[i]});
    Network sum(static_cast<int>(coeffs.size()), spec.name,
                {make_layer(1, static_cast<int>(coeffs.size()), std::move(row), {0.0})});
    Network net = concat(sum, scaffold);

    SynthesisReport rep;
    rep.plan = plan;
    rep.stats = stats(net);
    rep.scaffold_weights = rep.stats.nonzero_weights;
    {
        const Layer& last = net.layers().back();
        rep.scaffold_weights -= static_cast<long long>(last.entries.size());
        for (double v : last.bias) rep.scaffold_weights -= v != 0.0;
    }
    rep.gadgets = gadgets.used();
    for (const auto& c : padding.used()) rep.gadgets.push_back(c);
    for (const auto& lp : ls.polys) {
        rep.max_fit_residual = std::max(rep.max_fit_residual, lp.residual);
        for (double c : lp.coeffs) rep.max_coefficient = std::max(rep.max_coefficient, std::fabs(c));
    }
    if (measure) rep.error = sobolev_distance(f, net, plan.k, plan.p);
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {std::move(net), std::move(rep)};
}

namespace {

std::mutex& ctilde_mu()
{
    static std::mutex m;
    return m;
}

std::map<std::string, double>& ctilde_cache()
{
    static std::map<std::string, double> c;
    return c;
}

} // namespace

std::string ctilde_key(const std::string& activation, int d, int n, int k, double p, double mu)
{
    char buf[160];
    std::snprintf(buf, sizeof buf, "ctilde.%s.d%d.n%d.k%d.p%s.mu%g", lookup(activation).name.c_str(), d, n, k,
                  std::isinf(p) ? "inf" : std::to_string(p).c_str(), mu);
    return buf;
}

std::optional<double> cached_ctilde(const std::string& key)
{
    std::lock_guard<std::mutex> lock(ctilde_mu());
    auto it = ctilde_cache().find(key);
    if (it == ctilde_cache().end()) return std::nullopt;
    return it->second;
}

void store_ctilde(const std::string& key, double value)
{
    require(value > 0 && std::isfinite(value), Status::invalid_argument, "Ctilde must be positive");
    std::lock_guard<std::mutex> lock(ctilde_mu());
    ctilde_cache()[key] = value;
}

double calibrate_ctilde(const std::string& activation, int d, int n, int k, double p, double mu)
{
    const std::string key = ctilde_key(activation, d, n, k, p, mu);
    if (auto c = cached_ctilde(key)) return *c;
    const char* names[] = {"sin1", "gauss2", "poly3"};
    Target f;
    require(d >= 1 && d <= 3 && corpus_lookup(names[d - 1], f), Status::invalid_argument, "no calibration target");
    const double eps = 0.1;
    SynthesisPlan plan = make_plan(activation, eps, n, k, p, d, mu, 1.0);
    int N = plan.N;
    for (int i = 0; i < 8; ++i) {
        SynthesisPlan trial = make_plan(activation, eps, n, k, p, d, mu, 1.0, N);
        SynthesisResult r = synthesize(f, trial, true);
        if (r.report.error->value <= eps) break;
        N *= 2;
    }
    const ActivationSpec spec = lookup(activation);
    double a = rate_denominator(spec.decay, n, k, spec.tau, mu);
    double c = eps / 2.0 * std::pow(double(N), a);
    store_ctilde(key, c);
    return c;
}

} // namespace sobnet
