#include "activation.hpp"

#include "error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

namespace sobnet {

const char* decay_class_name(DecayClass c)
{
    switch (c) {
    case DecayClass::exact: return "exact";
    case DecayClass::exponential: return "exponential";
    case DecayClass::polynomial: return "polynomial";
    }
    return "?";
}

namespace {

double sigmoid(double x)
{
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    double e = std::exp(x);
    return e / (1.0 + e);
}

// k-th derivative of the logistic function written as a polynomial in s = sigma.
double sigmoid_poly(int k, double s)
{
    switch (k) {
    case 1: return s * (1.0 - s);
    case 2: return s * (1.0 + s * (-3.0 + 2.0 * s));
    case 3: return s * (1.0 + s * (-7.0 + s * (12.0 - 6.0 * s)));
    case 4: return s * (1.0 + s * (-15.0 + s * (50.0 + s * (-60.0 + 24.0 * s))));
    default: fail(Status::internal, "sigmoid derivative order out of range");
    }
}

// sigma^(k)(x) for k = 0..order. For x > 0 the symmetry
// sigma^(k)(x) = (-1)^(k+1) sigma^(k)(-x) keeps the polynomial argument small.
void sigmoid_derivs(double x, int order, double* out)
{
    out[0] = sigmoid(x);
    if (order == 0) return;
    if (x <= 0) {
        double s = out[0];
        for (int k = 1; k <= order; ++k) out[k] = sigmoid_poly(k, s);
    } else {
        double q = sigmoid(-x);
        for (int k = 1; k <= order; ++k) {
            double v = sigmoid_poly(k, q);
            out[k] = (k % 2 == 1) ? v : -v;
        }
    }
}

double factorial(int n)
{
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

// x / sqrt(1 + a x^2) and its first four derivatives.
void isru_derivs(double a, double x, int order, double* out)
{
    double u = 1.0 + a * x * x;
    double su = std::sqrt(u);
    out[0] = x / su;
    if (order >= 1) out[1] = 1.0 / (u * su);
    if (order >= 2) out[2] = -3.0 * a * x / (u * u * su);
    if (order >= 3) out[3] = -3.0 * a * (1.0 - 4.0 * a * x * x) / (u * u * u * su);
    if (order >= 4) out[4] = 15.0 * a * a * x * (3.0 - 4.0 * a * x * x) / (u * u * u * u * su);
}

std::string with_param(const std::string& base, double p)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s:%.17g", base.c_str(), p);
    return buf;
}

} // namespace

double ActivationSpec::value(double x) const
{
    switch (kind) {
    case Kind::relu: return x >= 0 ? x : param * x;
    case Kind::elu: return x >= 0 ? x : param * std::expm1(x);
    case Kind::softsign: return x / (1.0 + std::fabs(x));
    case Kind::isrlu: return x >= 0 ? x : x / std::sqrt(1.0 + param * x * x);
    case Kind::isru: return x / std::sqrt(1.0 + param * x * x);
    case Kind::sigmoid: return sigmoid(x);
    case Kind::tanh: return std::tanh(x);
    case Kind::arctan: return std::atan(x);
    case Kind::softplus: return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
    case Kind::swish: return x * sigmoid(x);
    case Kind::repu: return x > 0 ? std::pow(x, param) : 0.0;
    }
    return 0.0;
}

bool ActivationSpec::derivatives(double x, int order, double* out) const
{
    if (order < 0 || order > kMaxOracleOrder)
        fail(Status::order_exceeds_smoothness, "derivative order " + std::to_string(order) + " outside oracle range");
    bool on_kink = (x == kink) && order >= kink_order;
    switch (kind) {
    case Kind::relu:
        out[0] = value(x);
        if (order >= 1) out[1] = x >= 0 ? 1.0 : param;
        for (int k = 2; k <= order; ++k) out[k] = 0.0;
        break;
    case Kind::elu:
        if (x >= 0) {
            out[0] = x;
            if (order >= 1) out[1] = 1.0;
            for (int k = 2; k <= order; ++k) out[k] = 0.0;
        } else {
            double e = param * std::exp(x);
            out[0] = param * std::expm1(x);
            for (int k = 1; k <= order; ++k) out[k] = e;
        }
        break;
    case Kind::softsign:
        if (x >= 0) {
            double g = 1.0 / (1.0 + x);
            out[0] = x * g;
            double p = g;
            for (int k = 1; k <= order; ++k) {
                p *= g;
                double v = factorial(k) * p;
                out[k] = (k % 2 == 1) ? v : -v;
            }
        } else {
            double g = 1.0 / (1.0 - x);
            out[0] = x * g;
            double p = g;
            for (int k = 1; k <= order; ++k) {
                p *= g;
                out[k] = factorial(k) * p;
            }
        }
        break;
    case Kind::isrlu:
        if (x >= 0) {
            out[0] = x;
            if (order >= 1) out[1] = 1.0;
            for (int k = 2; k <= order; ++k) out[k] = 0.0;
        } else {
            isru_derivs(param, x, order, out);
        }
        break;
    case Kind::isru: isru_derivs(param, x, order, out); break;
    case Kind::sigmoid: sigmoid_derivs(x, order, out); break;
    case Kind::tanh: {
        double tmp[kMaxOracleOrder + 1];
        sigmoid_derivs(2.0 * x, order, tmp);
        out[0] = std::tanh(x);
        double scale = 2.0;
        for (int k = 1; k <= order; ++k) {
            scale *= 2.0;
            out[k] = scale * tmp[k];
        }
        break;
    }
    case Kind::arctan: {
        double u = 1.0 + x * x;
        out[0] = std::atan(x);
        if (order >= 1) out[1] = 1.0 / u;
        if (order >= 2) out[2] = -2.0 * x / (u * u);
        if (order >= 3) out[3] = (6.0 * x * x - 2.0) / (u * u * u);
        if (order >= 4) out[4] = 24.0 * x * (1.0 - x * x) / (u * u * u * u);
        break;
    }
    case Kind::softplus: {
        double tmp[kMaxOracleOrder + 1];
        out[0] = value(x);
        if (order >= 1) {
            sigmoid_derivs(x, order - 1, tmp);
            for (int k = 1; k <= order; ++k) out[k] = tmp[k - 1];
        }
        break;
    }
    case Kind::swish: {
        double tmp[kMaxOracleOrder + 1];
        sigmoid_derivs(x, order, tmp);
        out[0] = x * tmp[0];
        for (int k = 1; k <= order; ++k) out[k] = x * tmp[k] + k * tmp[k - 1];
        break;
    }
    case Kind::repu: {
        int a = static_cast<int>(param);
        for (int k = 0; k <= order; ++k) {
            if (k > a || x < 0) {
                out[k] = 0.0;
            } else if (k == a) {
                out[k] = factorial(a);
            } else {
                out[k] = x > 0 ? factorial(a) / factorial(a - k) * std::pow(x, a - k) : 0.0;
            }
        }
        break;
    }
    }
    return on_kink;
}

std::optional<double> ActivationSpec::x0(int r) const
{
    if (r < 1) return std::nullopt;
    auto usable = [&](double x) {
        if (r > max_order()) return false;
        double d[kMaxOracleOrder + 1];
        derivatives(x, r, d);
        return std::fabs(d[r]) > 1e-3;
    };
    // Table entries put a zero of rho^(r+1) at x0 where one exists, or sit on
    // a linear branch for r = 1.
    std::optional<double> preferred;
    switch (kind) {
    case Kind::sigmoid:
        if (r == 2) preferred = std::log(2.0 + std::sqrt(3.0));
        else if (r == 1 || r == 3) preferred = 0.0;
        break;
    case Kind::tanh:
        if (r == 2) preferred = 0.5 * std::log(2.0 + std::sqrt(3.0));
        else if (r == 1 || r == 3) preferred = 0.0;
        break;
    case Kind::arctan:
        if (r == 2) preferred = 1.0 / std::sqrt(3.0);
        else if (r == 1 || r == 3) preferred = 0.0;
        break;
    case Kind::isru:
        if (r == 2) preferred = 0.5 / std::sqrt(param);
        else if (r == 1 || r == 3) preferred = 0.0;
        break;
    case Kind::softplus:
        if (r == 1 || r == 2) preferred = 0.0;
        else if (r == 3) preferred = std::log(2.0 + std::sqrt(3.0));
        break;
    case Kind::swish:
        if (r == 1 || r == 2) preferred = 0.0;
        break;
    case Kind::relu:
    case Kind::elu:
    case Kind::isrlu:
        preferred = r == 1 ? 1.0 : -1.0;
        break;
    case Kind::softsign: preferred = 1.0; break;
    case Kind::repu: preferred = 1.0; break;
    }
    if (preferred && usable(*preferred)) return preferred;
    const double fallback[] = {0.0, 1.0, -1.0, 0.5, -0.5, 2.0, -2.0};
    for (double c : fallback) {
        if (kink_order != INT_MAX && c == kink) continue;
        if (usable(c)) return c;
    }
    return std::nullopt;
}

double ActivationSpec::asymptote_gap(double x) const
{
    bool up = x > 0;
    double ax = std::fabs(x);
    switch (kind) {
    case Kind::relu: return 0.0;
    case Kind::elu: return up ? 0.0 : param * std::exp(x);
    case Kind::softsign: return 1.0 / (1.0 + ax);
    case Kind::isrlu: return up ? 0.0 : std::pow(1.0 + param * x * x, -1.5);
    case Kind::isru: {
        double sa = std::sqrt(param);
        double su = std::sqrt(1.0 + param * x * x);
        return 1.0 / (sa * su * (su + sa * ax));
    }
    case Kind::sigmoid: return sigmoid(-ax);
    case Kind::tanh: return 2.0 * sigmoid(-2.0 * ax);
    case Kind::arctan: return std::atan(1.0 / ax);
    case Kind::softplus: return sigmoid(-ax);
    case Kind::swish:
        if (up) return std::fabs(sigmoid(-x) * (1.0 - x * sigmoid(x)));
        return std::fabs(sigmoid(x) * (1.0 + x * sigmoid(-x)));
    case Kind::repu: return 0.0;
    }
    return 0.0;
}

ActivationSpec lookup(const std::string& full)
{
    std::string base = full;
    std::optional<double> p;
    if (auto pos = full.find(':'); pos != std::string::npos) {
        base = full.substr(0, pos);
        std::string rest = full.substr(pos + 1);
        char* end = nullptr;
        double v = std::strtod(rest.c_str(), &end);
        require(end && *end == '\0' && !rest.empty() && std::isfinite(v), Status::unknown_activation,
                "bad activation parameter in '" + full + "'");
        p = v;
    }

    ActivationSpec s;
    s.family = base;
    if (base == "relu" || base == "leaky_relu") {
        double a = p.value_or(base == "relu" ? 0.0 : 0.01);
        require(a >= 0 && a < 1, Status::unknown_activation, "leaky slope must lie in [0,1)");
        s.family = "relu";
        s.name = a == 0.0 ? "relu" : with_param("leaky_relu", a);
        s.kind = Kind::relu;
        s.param = a;
        s.tau = 1;
        s.j = 1;
        s.A = a;
        s.B = 1.0;
        s.decay = DecayClass::exact;
        s.bounded = false;
        s.kink_order = 1;
    } else if (base == "elu" || base == "elu1") {
        double a = base == "elu1" ? 1.0 : p.value_or(0.5);
        require(a > 0, Status::unknown_activation, "ELU parameter must be positive");
        s.family = a == 1.0 ? "elu1" : "elu";
        s.name = a == 1.0 ? "elu1" : with_param("elu", a);
        s.kind = Kind::elu;
        s.param = a;
        s.tau = 1;
        s.j = a == 1.0 ? 2 : 1;
        s.A = 0.0;
        s.B = 1.0;
        s.decay = DecayClass::exponential;
        s.bounded = false;
        s.kink_order = a == 1.0 ? 2 : 1;
    } else if (base == "softsign") {
        s.name = "softsign";
        s.kind = Kind::softsign;
        s.tau = 0;
        s.j = 2;
        s.A = -1.0;
        s.B = 1.0;
        s.decay = DecayClass::polynomial;
        s.bounded = true;
        s.kink_order = 2;
    } else if (base == "isrlu") {
        double a = p.value_or(1.0);
        require(a > 0, Status::unknown_activation, "ISRLU parameter must be positive");
        s.name = a == 1.0 ? "isrlu" : with_param("isrlu", a);
        s.kind = Kind::isrlu;
        s.param = a;
        s.tau = 1;
        s.j = 3;
        s.A = 0.0;
        s.B = 1.0;
        s.decay = DecayClass::polynomial;
        s.bounded = false;
        s.kink_order = 3;
    } else if (base == "isru") {
        double a = p.value_or(1.0);
        require(a > 0, Status::unknown_activation, "ISRU parameter must be positive");
        s.name = a == 1.0 ? "isru" : with_param("isru", a);
        s.kind = Kind::isru;
        s.param = a;
        s.tau = 0;
        s.A = -1.0 / std::sqrt(a);
        s.B = 1.0 / std::sqrt(a);
        s.decay = DecayClass::polynomial;
        s.bounded = true;
    } else if (base == "sigmoid") {
        s.name = "sigmoid";
        s.kind = Kind::sigmoid;
        s.tau = 0;
        s.A = 0.0;
        s.B = 1.0;
        s.decay = DecayClass::exponential;
        s.bounded = true;
    } else if (base == "tanh") {
        s.name = "tanh";
        s.kind = Kind::tanh;
        s.tau = 0;
        s.A = -1.0;
        s.B = 1.0;
        s.decay = DecayClass::exponential;
        s.bounded = true;
    } else if (base == "arctan") {
        s.name = "arctan";
        s.kind = Kind::arctan;
        s.tau = 0;
        s.A = -std::numbers::pi / 2;
        s.B = std::numbers::pi / 2;
        s.decay = DecayClass::polynomial;
        s.bounded = true;
    } else if (base == "softplus") {
        s.name = "softplus";
        s.kind = Kind::softplus;
        s.tau = 1;
        s.A = 0.0;
        s.B = 1.0;
        s.decay = DecayClass::exponential;
        s.bounded = false;
    } else if (base == "swish") {
        s.name = "swish";
        s.kind = Kind::swish;
        s.tau = 1;
        s.A = 0.0;
        s.B = 1.0;
        s.decay = DecayClass::exponential;
        s.bounded = false;
    } else if (base == "repu") {
        double a = p.value_or(2.0);
        require(a >= 2 && a == std::floor(a) && a <= 16, Status::unknown_activation,
                "RePU power must be an integer >= 2");
        s.name = a == 2.0 ? "repu" : with_param("repu", a);
        s.kind = Kind::repu;
        s.param = a;
        s.tau = static_cast<int>(a);
        s.j = static_cast<int>(a);
        s.A = 0.0;
        s.B = factorial(static_cast<int>(a));
        s.decay = DecayClass::exact;
        s.bounded = false;
        s.kink_order = static_cast<int>(a);
    } else {
        fail(Status::unknown_activation, "unknown activation '" + full + "'");
    }
    if (p && base != "relu" && base != "leaky_relu" && base != "elu" && base != "isrlu" &&
        base != "isru" && base != "repu")
        fail(Status::unknown_activation, "activation '" + base + "' takes no parameter");
    return s;
}

std::vector<ActivationSpec> catalog()
{
    const char* names[] = {"relu",    "elu",  "elu1",   "softsign", "isrlu", "isru",
                           "sigmoid", "tanh", "arctan", "softplus", "swish", "repu"};
    std::vector<ActivationSpec> out;
    for (const char* n : names) out.push_back(lookup(n));
    return out;
}

EvalResult eval(const std::string& name, double x, int order)
{
    ActivationSpec s = lookup(name);
    require(order >= 0, Status::invalid_argument, "negative derivative order");
    require(order <= s.max_order(), Status::order_exceeds_smoothness,
            "order " + std::to_string(order) + " exceeds smoothness of " + s.name);
    EvalResult r;
    r.values.resize(order + 1);
    r.one_sided = s.derivatives(x, order, r.values.data());
    return r;
}

namespace {

// Least-squares slope of y against t.
double ls_slope(const std::vector<double>& t, const std::vector<double>& y)
{
    double n = static_cast<double>(t.size());
    double mt = 0, my = 0;
    for (size_t i = 0; i < t.size(); ++i) {
        mt += t[i];
        my += y[i];
    }
    mt /= n;
    my /= n;
    double stt = 0, sty = 0;
    for (size_t i = 0; i < t.size(); ++i) {
        stt += (t[i] - mt) * (t[i] - mt);
        sty += (t[i] - mt) * (y[i] - my);
    }
    return sty / stt;
}

ConditionFit fit_condition(const ActivationSpec& spec, const std::string& label, int k,
                           const std::vector<double>& xs, const std::vector<double>& res)
{
    ConditionFit c;
    c.condition = label;
    c.derivative_order = k;
    std::vector<double> t, y;
    for (size_t i = 0; i < xs.size(); ++i) {
        c.residual_max = std::max(c.residual_max, res[i]);
        if (i > 0 && res[i] > res[i - 1] * (1.0 + 1e-9) + 1e-300) c.monotone = false;
        if (res[i] < 1e-300) continue;
        // Polynomial class regresses against log(1 + x): same decay class as
        // x^-D, without the small-x bias of a plain log-log fit.
        t.push_back(spec.decay == DecayClass::polynomial ? std::log1p(xs[i]) : xs[i]);
        y.push_back(std::log(res[i]));
    }
    if (t.size() < 2) {
        c.fitted_rate = std::numeric_limits<double>::infinity();
    } else if (spec.decay == DecayClass::exact) {
        c.fitted_rate = 0.0;  // exact class demands vanishing residuals
    } else {
        c.fitted_rate = -ls_slope(t, y);
    }
    c.pass = c.monotone && c.fitted_rate >= 0.9 * spec.D;
    return c;
}

} // namespace

AdmissibilityReport check_admissibility(const ActivationSpec& spec, double x_lo, double x_hi,
                                        int order, int samples)
{
    require(x_lo > 0 && x_hi > x_lo, Status::invalid_argument, "admissibility range must satisfy 0 < lo < hi");
    require(samples >= 2, Status::invalid_argument, "need at least two samples");
    require(order >= spec.tau && order <= spec.max_order(), Status::order_exceeds_smoothness,
            "admissibility order outside [tau, j]");
    AdmissibilityReport rep;
    rep.activation = spec.name;
    rep.decay = spec.decay;
    rep.x_lo = x_lo;
    rep.x_hi = x_hi;
    rep.order = order;

    std::vector<double> xs(samples);
    for (int i = 0; i < samples; ++i) xs[i] = x_lo + (x_hi - x_lo) * i / (samples - 1);

    std::vector<double> up(samples), down(samples);
    for (int i = 0; i < samples; ++i) {
        up[i] = spec.asymptote_gap(xs[i]);
        down[i] = spec.asymptote_gap(-xs[i]);
    }
    rep.conditions.push_back(fit_condition(spec, "d.1", spec.tau, xs, up));
    rep.conditions.push_back(fit_condition(spec, "d.2", spec.tau, xs, down));
    double d[kMaxOracleOrder + 1];
    for (int k = spec.tau + 1; k <= order; ++k) {
        std::vector<double> r(samples);
        for (int i = 0; i < samples; ++i) {
            spec.derivatives(xs[i], k, d);
            double a = std::fabs(d[k]);
            spec.derivatives(-xs[i], k, d);
            r[i] = std::max(a, std::fabs(d[k]));
        }
        rep.conditions.push_back(fit_condition(spec, "d.3", k, xs, r));
    }
    rep.pass = std::all_of(rep.conditions.begin(), rep.conditions.end(),
                           [](const ConditionFit& c) { return c.pass; });
    return rep;
}

} // namespace sobnet
