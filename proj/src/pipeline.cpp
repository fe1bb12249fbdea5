#include "pipeline.hpp"

#include "error.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <random>

namespace sobnet {

Target resolve_target(const std::string& spec, int d)
{
    Target t;
    if (corpus_lookup(spec, t)) {
        require(t.d == d, Status::dimension_mismatch,
                "corpus target " + spec + " has d=" + std::to_string(t.d) + ", requested d=" + std::to_string(d));
        return t;
    }
    return parse_target(spec, d, spec);
}

namespace {

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof(double)) == 0; }

bool networks_identical(const Network& a, const Network& b)
{
    if (a.input_dim() != b.input_dim() || a.depth() != b.depth()) return false;
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

} // namespace

RunOutcome run_synthesis(const Target& f, const SynthesisPlan& plan, uint64_t seed)
{
    RunOutcome out{synthesize(f, plan, true), Network(1, plan.activation, {make_layer(1, 1, {}, {0.0})}), 0.0, 0.0, 0.0, {}};
    const Network& net = out.synth.net;
    const int grid = default_grid(plan.d);
    out.error = out.synth.report.error->value;

    CodecOutcome& c = out.codec;
    const auto t0 = std::chrono::steady_clock::now();
    c.nu = measured_nu(net, plan.eps, plan.k);
    c.theta = std::max(plan.theta, last_layer_theta(net, plan.eps));
    out.rounded = round_output_layer(net, plan.eps, c.theta, c.nu);
    out.rounded_error = sobolev_distance(f, out.rounded, plan.k, plan.p, grid).value;
    out.perturbation = network_distance(net, out.rounded, plan.k, INFINITY, grid).value;

    CodingScheme scheme = make_scheme(out.rounded, plan.eps, c.theta, c.nu);
    c.K = scheme.K();
    c.C0 = scheme.C0;
    BitStream bs = encode(out.rounded, scheme);
    c.bits = bs.bits;
    NetworkStats st = stats(out.rounded);
    c.M = st.nonzero_weights;
    double logM = c.M > 1 ? std::ceil(std::log2(double(c.M))) : 0.0;
    c.bit_ratio = c.M > 0 ? double(c.bits) / (double(c.M) * (c.K + logM)) : 0.0;

    Network back = decode(bs, scheme);
    c.roundtrip_exact = networks_identical(back, out.rounded);

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> xs(100 * static_cast<size_t>(plan.d));
    for (double& x : xs) x = u(rng);
    std::vector<double> ya = realize_batch(out.rounded, xs);
    std::vector<double> yb = realize_batch(back, xs);
    c.realizations_equal = ya.size() == yb.size();
    for (size_t i = 0; c.realizations_equal && i < ya.size(); ++i) c.realizations_equal = same_bits(ya[i], yb[i]);
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

SweepResult sweep(const std::string& activation, const Target& f, const std::vector<double>& eps, int n, int k,
                  double p, double mu, std::optional<double> Ctilde, uint64_t seed)
{
    require(eps.size() >= 3, Status::invalid_argument, "a sweep needs at least 3 eps values");
    for (size_t i = 1; i < eps.size(); ++i)
        require(eps[i] < eps[i - 1], Status::invalid_argument, "sweep eps values must decrease");
    const int d = f.d;
    SweepResult s;
    s.activation = lookup(activation).name;
    s.target = f.name;
    s.d = d;
    s.n = n;
    s.k = k;
    s.p = p;
    s.mu = mu;
    s.eps = eps;
    if (Ctilde) {
        s.Ctilde = *Ctilde;
    } else {
        std::optional<double> c = cached_ctilde(ctilde_key(s.activation, d, n, k, p, mu));
        s.Ctilde = c ? *c : calibrate_ctilde(s.activation, d, n, k, p, mu);
    }

    const ActivationSpec spec = lookup(activation);
    s.theory_exponent = d / rate_denominator(spec.decay, n, k, spec.tau, mu);
    s.floor_exponent = sobolev_gamma(d, n, k);

    std::vector<std::pair<double, double>> mpts, wpts;
    s.errors_ok = true;
    s.depth_constant = true;
    for (size_t i = 0; i < eps.size(); ++i) {
        SynthesisPlan plan = make_plan(s.activation, eps[i], n, k, p, d, mu, s.Ctilde);
        s.runs.push_back(run_synthesis(f, plan, seed + i));
        const RunOutcome& r = s.runs.back();
        const NetworkStats& st = r.synth.report.stats;
        if (!(r.error <= eps[i]) || !(r.rounded_error <= eps[i])) s.errors_ok = false;
        if (st.layers != s.runs.front().synth.report.stats.layers) s.depth_constant = false;
        mpts.push_back({1.0 / eps[i], double(st.nonzero_weights)});
        wpts.push_back({1.0 / eps[i], st.max_abs_weight});
        s.entropy_floors.push_back(entropy_floor(s.floor_exponent, 1.0, eps[i]));
    }
    s.weights_fit = fit_rate(mpts);
    s.magnitude_fit = fit_rate(wpts);
    return s;
}

namespace {

Json num(double v)
{
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

Json nums(const std::vector<double>& v)
{
    Json a = Json::array();
    for (double x : v) a.push_back(num(x));
    return a;
}

} // namespace

Json stats_json(const NetworkStats& s)
{
    return {{"M", s.nonzero_weights}, {"L", s.layers}, {"max_abs_weight", num(s.max_abs_weight)}, {"widths", s.widths}};
}

Json plan_json(const SynthesisPlan& p)
{
    return {{"activation", p.activation}, {"eps", p.eps}, {"n", p.n}, {"k", p.k}, {"p", num(p.p)},
            {"d", p.d}, {"mu", p.mu}, {"Ctilde", p.Ctilde}, {"N", p.N}, {"s", p.s},
            {"eps_sub", p.eps_sub}, {"theta", p.theta}, {"T", p.T}, {"L", p.L}};
}

Json norm_json(const NormEstimate& n)
{
    return {{"k", n.k}, {"p", num(n.p)}, {"value", num(n.value)}, {"grid_n", n.grid_n}, {"method", n.method},
            {"per_order", nums(n.per_order)}};
}

Json cert_json(const GadgetCert& c)
{
    return {{"target", c.target}, {"eps", c.eps_target}, {"B", c.B},   {"delta", c.delta},
            {"x0", c.x0},         {"errors", nums(c.errors)}, {"grid", c.grid}, {"stats", stats_json(c.stats)},
            {"pass", c.pass}};
}

Json rate_json(const RateFit& r)
{
    return {{"exponent", num(r.exponent)}, {"intercept", num(r.intercept)}, {"r_squared", num(r.r_squared)}};
}

Json run_json(const RunOutcome& r)
{
    const SynthesisReport& rep = r.synth.report;
    Json j;
    if (rep.error) j["norm"] = norm_json(*rep.error);
    j["stats"] = stats_json(rep.stats);
    j["plan"] = plan_json(rep.plan);
    j["rate_fits"] = Json::array();
    j["scaffold_weights"] = rep.scaffold_weights;
    j["max_fit_residual"] = num(rep.max_fit_residual);
    j["max_coefficient"] = num(rep.max_coefficient);
    Json g = Json::array();
    for (const GadgetCert& c : rep.gadgets) g.push_back(cert_json(c));
    j["gadgets"] = g;
    j["rounding"] = {{"nu", r.codec.nu},
                     {"theta", r.codec.theta},
                     {"rounded_error", num(r.rounded_error)},
                     {"perturbation", num(r.perturbation)}};
    j["codec"] = {{"K", r.codec.K},
                  {"C0", r.codec.C0},
                  {"bits", r.codec.bits},
                  {"M", r.codec.M},
                  {"bit_ratio", r.codec.bit_ratio},
                  {"roundtrip_exact", r.codec.roundtrip_exact},
                  {"realizations_equal", r.codec.realizations_equal}};
    return j;
}

Json sweep_json(const SweepResult& s)
{
    Json j;
    j["activation"] = s.activation;
    j["target"] = s.target;
    j["d"] = s.d;
    j["n"] = s.n;
    j["k"] = s.k;
    j["p"] = num(s.p);
    j["mu"] = s.mu;
    j["Ctilde"] = s.Ctilde;
    Json rows = Json::array();
    for (size_t i = 0; i < s.runs.size(); ++i) {
        const RunOutcome& r = s.runs[i];
        const NetworkStats& st = r.synth.report.stats;
        rows.push_back({{"eps", s.eps[i]},
                        {"error", num(r.error)},
                        {"rounded_error", num(r.rounded_error)},
                        {"perturbation", num(r.perturbation)},
                        {"M", st.nonzero_weights},
                        {"L", st.layers},
                        {"max_abs_weight", num(st.max_abs_weight)},
                        {"N", r.synth.report.plan.N},
                        {"entropy_floor", num(s.entropy_floors[i])},
                        {"bits", r.codec.bits},
                        {"bit_ratio", r.codec.bit_ratio},
                        {"roundtrip_exact", r.codec.roundtrip_exact && r.codec.realizations_equal}});
    }
    j["runs"] = rows;
    j["rate_fits"] = Json::array({Json{{"quantity", "M"}, {"fit", rate_json(s.weights_fit)}},
                                  Json{{"quantity", "max_abs_weight"}, {"fit", rate_json(s.magnitude_fit)}}});
    j["theory_exponent"] = num(s.theory_exponent);
    j["floor_exponent"] = num(s.floor_exponent);
    j["errors_ok"] = s.errors_ok;
    j["depth_constant"] = s.depth_constant;
    return j;
}

Json pu_json(const PUReport& r)
{
    return {{"activation", r.activation},
            {"class", decay_class_name(r.decay)},
            {"d", r.d},
            {"N", r.N},
            {"s", r.s},
            {"k_max", r.k_max},
            {"grid_per_patch", r.grid_per_patch},
            {"grid_points", r.grid_points},
            {"sum_deviation", nums(r.sum_deviation)},
            {"complement_max", nums(r.complement_max)},
            {"seminorm_max", nums(r.seminorm_max)},
            {"seminorm_ratio", nums(r.seminorm_ratio)}};
}

Json admissibility_json(const AdmissibilityReport& r)
{
    Json c = Json::array();
    for (const ConditionFit& f : r.conditions)
        c.push_back({{"condition", f.condition},
                     {"derivative_order", f.derivative_order},
                     {"fitted_rate", num(f.fitted_rate)},
                     {"residual_max", num(f.residual_max)},
                     {"monotone", f.monotone},
                     {"pass", f.pass}});
    return {{"activation", r.activation}, {"class", decay_class_name(r.decay)}, {"x_lo", r.x_lo},
            {"x_hi", r.x_hi},             {"order", r.order},                  {"conditions", c},
            {"pass", r.pass}};
}

Json catalog_json()
{
    Json rows = Json::array();
    for (const ActivationSpec& s : catalog()) {
        Json j = s.j == kSmoothInf ? Json("inf") : Json(s.j);
        rows.push_back({{"name", s.name}, {"tau", s.tau}, {"j", j}, {"class", decay_class_name(s.decay)},
                        {"A", num(s.A)}, {"B", num(s.B)}, {"D", s.D}});
    }
    return rows;
}

} // namespace sobnet
