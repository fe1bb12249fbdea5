#include "sobnet/sobnet.h"

#include "codec.hpp"
#include "error.hpp"
#include "jet.hpp"
#include "pipeline.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

using namespace sobnet;

struct sobnet_network {
    Network net;
};

struct sobnet_scheme {
    CodingScheme scheme;
};

namespace {

thread_local std::string g_last_error;

template <class F>
int guarded(F&& body)
{
    g_last_error.clear();
    try {
        body();
        return SOBNET_OK;
    } catch (const Error& e) {
        g_last_error = e.what();
        return static_cast<int>(e.code());
    } catch (const nlohmann::json::exception& e) {
        g_last_error = e.what();
        return static_cast<int>(Status::invalid_argument);
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return static_cast<int>(Status::internal);
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return static_cast<int>(Status::internal);
    }
}

void need(const void* p, const char* what)
{
    if (!p) fail(Status::invalid_argument, std::string(what) + " is null");
}

char* dup_string(const std::string& s)
{
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

void put_json(const Json& j, char** out)
{
    need(out, "out_json");
    *out = dup_string(j.dump(2));
}

double norm_p(double p) { return p < 0 ? INFINITY : p; }

} // namespace

extern "C" {

const char* sobnet_last_error(void) { return g_last_error.c_str(); }

const char* sobnet_status_name(int status)
{
    if (status < 0 || status > static_cast<int>(Status::internal)) return "unknown";
    return status_name(static_cast<Status>(status));
}

void sobnet_free(void* p) { std::free(p); }

int sobnet_catalog_json(char** out_json)
{
    return guarded([&] { put_json(catalog_json(), out_json); });
}

int sobnet_eval(const char* activation, double x, int order, double* values, int* one_sided)
{
    return guarded([&] {
        need(activation, "activation");
        need(values, "values");
        EvalResult r = eval(activation, x, order);
        std::copy(r.values.begin(), r.values.end(), values);
        if (one_sided) *one_sided = r.one_sided;
    });
}

int sobnet_admissibility_json(const char* activation, double x_lo, double x_hi, int order, char** out_json)
{
    return guarded([&] {
        need(activation, "activation");
        put_json(admissibility_json(check_admissibility(lookup(activation), x_lo, x_hi, order)), out_json);
    });
}

int sobnet_verify_pu_json(const char* activation, int d, int N, double s, double mu, int n, int k_max,
                          int grid_per_patch, char** out_json)
{
    return guarded([&] {
        need(activation, "activation");
        ActivationSpec spec = lookup(activation);
        require(d >= 1 && d <= 3, Status::invalid_argument, "d must lie in 1..3");
        require(N >= 1, Status::invalid_argument, "N must be >= 1");
        if (s <= 0)
            s = std::max(min_scaling(spec), select_scaling(spec.decay, N, d, INFINITY, n, mu, spec.D));
        PUFamily fam = make_pu_family(spec, d, N, s);
        put_json(pu_json(verify_pu(fam, k_max, grid_per_patch)), out_json);
    });
}

int sobnet_network_load(const char* path, sobnet_network** out)
{
    return guarded([&] {
        need(path, "path");
        need(out, "out");
        *out = new sobnet_network{load_network(path)};
    });
}

int sobnet_network_save(const sobnet_network* net, const char* path)
{
    return guarded([&] {
        need(net, "net");
        need(path, "path");
        save_network(net->net, path);
    });
}

int sobnet_network_from_json(const char* text, sobnet_network** out)
{
    return guarded([&] {
        need(text, "text");
        need(out, "out");
        *out = new sobnet_network{from_json(text)};
    });
}

int sobnet_network_to_json(const sobnet_network* net, char** out_json)
{
    return guarded([&] {
        need(net, "net");
        need(out_json, "out_json");
        *out_json = dup_string(to_json(net->net));
    });
}

int sobnet_network_stats_json(const sobnet_network* net, char** out_json)
{
    return guarded([&] {
        need(net, "net");
        put_json(stats_json(stats(net->net)), out_json);
    });
}

int sobnet_network_dims(const sobnet_network* net, int* input_dim, int* output_dim, int* depth)
{
    return guarded([&] {
        need(net, "net");
        if (input_dim) *input_dim = net->net.input_dim();
        if (output_dim) *output_dim = net->net.output_dim();
        if (depth) *depth = net->net.depth();
    });
}

void sobnet_network_free(sobnet_network* net) { delete net; }

int sobnet_realize(const sobnet_network* net, const double* xs, size_t points, double* out)
{
    return guarded([&] {
        need(net, "net");
        if (points == 0) return;
        need(xs, "xs");
        need(out, "out");
        std::vector<double> in(xs, xs + points * net->net.input_dim());
        std::vector<double> y = realize_batch(net->net, in);
        std::copy(y.begin(), y.end(), out);
    });
}

int sobnet_derivative(const sobnet_network* net, const double* x, const int* alpha, int output, double* value)
{
    return guarded([&] {
        need(net, "net");
        need(x, "x");
        need(alpha, "alpha");
        need(value, "value");
        const int d = net->net.input_dim();
        *value = derivative(net->net, std::vector<double>(x, x + d), std::vector<int>(alpha, alpha + d), output).value;
    });
}

int sobnet_sobolev_distance_json(const sobnet_network* net, const char* target, int k, double p, int grid_n,
                                 int finite_difference, char** out_json)
{
    return guarded([&] {
        need(net, "net");
        need(target, "target");
        Target f = resolve_target(target, net->net.input_dim());
        DerivMode mode = finite_difference ? DerivMode::finite_difference : DerivMode::exact;
        put_json(norm_json(sobolev_distance(f, net->net, k, norm_p(p), grid_n, mode)), out_json);
    });
}

int sobnet_calibrate_ctilde(const char* activation, int d, int n, int k, double p, double mu, double* out)
{
    return guarded([&] {
        need(activation, "activation");
        need(out, "out");
        *out = calibrate_ctilde(lookup(activation).name, d, n, k, norm_p(p), mu);
    });
}

int sobnet_set_ctilde(const char* activation, int d, int n, int k, double p, double mu, double value)
{
    return guarded([&] {
        need(activation, "activation");
        require(value > 0 && std::isfinite(value), Status::invalid_argument, "Ctilde must be positive");
        store_ctilde(ctilde_key(lookup(activation).name, d, n, k, norm_p(p), mu), value);
    });
}

int sobnet_plan_json(const char* activation, double eps, int n, int k, double p, int d, double mu, double Ctilde,
                     char** out_json)
{
    return guarded([&] {
        need(activation, "activation");
        put_json(plan_json(make_plan(lookup(activation).name, eps, n, k, norm_p(p), d, mu, Ctilde)), out_json);
    });
}

int sobnet_synthesize(const char* activation, const char* target, int d, double eps, int n, int k, double p,
                      double mu, double Ctilde, uint64_t seed, sobnet_network** out_net, char** out_report)
{
    return guarded([&] {
        need(activation, "activation");
        need(target, "target");
        const std::string act = lookup(activation).name;
        p = norm_p(p);
        Target f = resolve_target(target, d);
        // Validate before any calibration work.
        make_plan(act, eps, n, k, p, d, mu, 1.0);
        if (Ctilde <= 0) {
            std::optional<double> c = cached_ctilde(ctilde_key(act, d, n, k, p, mu));
            Ctilde = c ? *c : calibrate_ctilde(act, d, n, k, p, mu);
        }
        RunOutcome r = run_synthesis(f, make_plan(act, eps, n, k, p, d, mu, Ctilde), seed);
        if (out_report) put_json(run_json(r), out_report);
        if (out_net) *out_net = new sobnet_network{r.synth.net};
    });
}

int sobnet_sweep_json(const char* activation, const char* target, int d, const double* eps, size_t count, int n,
                      int k, double p, double mu, double Ctilde, uint64_t seed, char** out_json)
{
    return guarded([&] {
        need(activation, "activation");
        need(target, "target");
        need(eps, "eps");
        Target f = resolve_target(target, d);
        std::optional<double> c;
        if (Ctilde > 0) c = Ctilde;
        SweepResult s = sweep(activation, f, std::vector<double>(eps, eps + count), n, k, norm_p(p), mu, c, seed);
        put_json(sweep_json(s), out_json);
    });
}

int sobnet_round_output_layer(const sobnet_network* net, double eps, double theta, double nu, sobnet_network** out)
{
    return guarded([&] {
        need(net, "net");
        need(out, "out");
        *out = new sobnet_network{round_output_layer(net->net, eps, theta, nu)};
    });
}

int sobnet_scheme_create(const sobnet_network* net, double eps, double theta, double nu, int k, double C0,
                         sobnet_scheme** out)
{
    return guarded([&] {
        need(net, "net");
        need(out, "out");
        if (theta <= 0) theta = last_layer_theta(net->net, eps);
        if (nu <= 0) nu = measured_nu(net->net, eps, k);
        *out = new sobnet_scheme{make_scheme(net->net, eps, theta, nu, C0)};
    });
}

int sobnet_scheme_open(const char* activation, double C0, double eps, double theta, double nu, sobnet_scheme** out)
{
    return guarded([&] {
        need(activation, "activation");
        need(out, "out");
        require(C0 > 0 && eps > 0 && eps < 0.5 && nu > 0, Status::invalid_argument,
                "scheme needs C0 > 0, eps in (0, 0.5), nu > 0");
        CodingScheme sc;
        sc.activation = lookup(activation).name;
        sc.C0 = C0;
        sc.eps = eps;
        sc.theta = theta;
        sc.nu = nu;
        *out = new sobnet_scheme{sc};
    });
}

int sobnet_scheme_json(const sobnet_scheme* scheme, char** out_json)
{
    return guarded([&] {
        need(scheme, "scheme");
        const CodingScheme& sc = scheme->scheme;
        put_json({{"activation", sc.activation},
                  {"C0", sc.C0},
                  {"eps", sc.eps},
                  {"nu", sc.nu},
                  {"theta", sc.theta},
                  {"K", sc.K()},
                  {"dictionary_size", sc.dictionary.size()},
                  {"log2_cardinality", static_cast<double>(std::log2(sc.cardinality()))}},
                 out_json);
    });
}

void sobnet_scheme_free(sobnet_scheme* scheme) { delete scheme; }

int sobnet_encode(const sobnet_network* net, const sobnet_scheme* scheme, uint8_t** bytes, size_t* nbytes,
                  uint64_t* bits)
{
    return guarded([&] {
        need(net, "net");
        need(scheme, "scheme");
        need(bytes, "bytes");
        need(nbytes, "nbytes");
        BitStream s = encode(net->net, scheme->scheme);
        uint8_t* buf = static_cast<uint8_t*>(std::malloc(std::max<size_t>(1, s.bytes.size())));
        if (!buf) throw std::bad_alloc();
        std::copy(s.bytes.begin(), s.bytes.end(), buf);
        *bytes = buf;
        *nbytes = s.bytes.size();
        if (bits) *bits = s.bits;
    });
}

int sobnet_decode(const sobnet_scheme* scheme, const uint8_t* bytes, size_t nbytes, uint64_t bits,
                  sobnet_network** out)
{
    return guarded([&] {
        need(scheme, "scheme");
        need(out, "out");
        if (nbytes) need(bytes, "bytes");
        std::vector<uint8_t> v(bytes, bytes + nbytes);
        BitStream s;
        if (bits == 0) {
            s = from_bytes(std::move(v));
        } else {
            s.bytes = std::move(v);
            s.bits = bits;
        }
        *out = new sobnet_network{decode(s, scheme->scheme)};
    });
}

int sobnet_stream_constants(const uint8_t* bytes, size_t nbytes, double* C0, double* eps)
{
    return guarded([&] {
        need(C0, "C0");
        need(eps, "eps");
        if (nbytes) need(bytes, "bytes");
        peek_constants(from_bytes(std::vector<uint8_t>(bytes, bytes + nbytes)), *C0, *eps);
    });
}

int sobnet_entropy_floor(double gamma, double C, double eps, double* out)
{
    return guarded([&] {
        need(out, "out");
        *out = entropy_floor(gamma, C, eps);
    });
}

} // extern "C"
