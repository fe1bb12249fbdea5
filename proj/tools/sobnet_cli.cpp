// Command-line frontend over the C API.
//
// Exit codes: 0 success, 1 contract failure (measured error above eps, roundtrip mismatch, I/O),
// 2 usage error (bad flags, out-of-range parameters, unsupported activation).

#include "sobnet/sobnet.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using Json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitContract = 1;
constexpr int kExitUsage = 2;

struct Failure {
    int exit_code;
    std::string message;
};

int exit_for(int status)
{
    switch (status) {
    case SOBNET_INVALID_ARGUMENT:
    case SOBNET_DIMENSION_MISMATCH:
    case SOBNET_UNKNOWN_ACTIVATION:
    case SOBNET_ORDER_EXCEEDS_SMOOTHNESS:
    case SOBNET_UNSUPPORTED: return kExitUsage;
    default: return kExitContract;
    }
}

void check(int status)
{
    if (status != SOBNET_OK)
        throw Failure{exit_for(status), std::string(sobnet_status_name(status)) + ": " + sobnet_last_error()};
}

// Owns a malloc'd string returned by the library.
std::string take(char* s)
{
    std::string out = s ? s : "";
    sobnet_free(s);
    return out;
}

void write_text(const std::string& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary);
    f << text;
    if (!f) throw Failure{kExitContract, "cannot write " + path};
}

std::vector<uint8_t> read_bytes(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Failure{kExitContract, "cannot read " + path};
    return std::vector<uint8_t>(std::istreambuf_iterator<char>(f), {});
}

std::string read_text(const std::string& path)
{
    std::vector<uint8_t> b = read_bytes(path);
    return std::string(b.begin(), b.end());
}

// key = value lines, '#' comments. Keys are flag names without dashes; ctilde[...] lines seed the
// calibrated-constant cache.
struct Config {
    std::string path;
    std::map<std::string, std::string> values;
    std::map<std::string, double> ctilde;

    static Config load(const std::string& path)
    {
        Config c;
        c.path = path;
        std::ifstream f(path);
        if (!f) return c;  // created on first calibration
        std::string line;
        int no = 0;
        while (std::getline(f, line)) {
            ++no;
            auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            auto eq = line.find('=');
            auto trim = [](std::string s) {
                size_t a = s.find_first_not_of(" \t\r"), b = s.find_last_not_of(" \t\r");
                return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
            };
            if (trim(line).empty()) continue;
            if (eq == std::string::npos) throw Failure{kExitUsage, path + ":" + std::to_string(no) + ": expected key = value"};
            std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
            if (key.rfind("ctilde[", 0) == 0) {
                try {
                    c.ctilde[key] = std::stod(value);
                } catch (const std::exception&) {
                    throw Failure{kExitUsage, path + ":" + std::to_string(no) + ": bad ctilde value"};
                }
            } else {
                c.values[key] = value;
            }
        }
        return c;
    }

    void append(const std::string& key, double value) const
    {
        if (path.empty()) return;
        std::ofstream f(path, std::ios::app);
        f << key << " = " << std::setprecision(17) << value << "\n";
    }
};

std::string fmt_number(double v)
{
    if (std::isinf(v)) return "inf";
    std::ostringstream s;
    s << std::setprecision(17) << v;
    return s.str();
}

std::string ctilde_entry(const std::string& act, int d, int n, int k, double p, double mu)
{
    return "ctilde[" + act + "," + std::to_string(d) + "," + std::to_string(n) + "," + std::to_string(k) + "," +
           fmt_number(p) + "," + fmt_number(mu) + "]";
}

double parse_p(const std::string& s)
{
    if (s == "inf" || s == "infinity") return INFINITY;
    double p = std::stod(s);
    if (!(p >= 1)) throw Failure{kExitUsage, "p must be >= 1 or inf"};
    return p;
}

double c_p(double p) { return std::isinf(p) ? -1.0 : p; }

std::string pre_scan_config(int argc, char** argv)
{
    for (int i = 1; i < argc; ++i) {
        std::string a = argv[i];
        if (a == "--config" && i + 1 < argc) return argv[i + 1];
        if (a.rfind("--config=", 0) == 0) return a.substr(9);
    }
    return "";
}

struct SynthArgs {
    std::string activation = "sigmoid", target = "sin1", p = "inf", out = "network.json", report = "report.json";
    double eps = 0.1, mu = 0.25, ctilde = 0.0;
    int n = 3, k = 0, d = 1;
    uint64_t seed = 1;
};

struct RatesArgs {
    std::string activation = "sigmoid", target = "sin1", p = "inf", report = "rates.json";
    std::vector<double> eps{0.1, 0.05, 0.025};
    double mu = 0.25, ctilde = 0.0;
    int n = 3, k = 0, d = 1;
    uint64_t seed = 1;
};

struct PuArgs {
    std::string activation = "sigmoid", out;
    int d = 1, N = 5, kmax = 2, n = 3, gpp = 33;
    double s = 0.0, mu = 0.25;
};

struct CodecArgs {
    std::string in, out = "stream.bin", report, decode, rounded_out, scheme, activation = "sigmoid";
    double eps = 0.1, theta = 0.0, nu = 0.0, C0 = 0.0;
    int k = 0;
};

template <class T>
void from_config(const Config& c, const std::string& key, T& v)
{
    auto it = c.values.find(key);
    if (it == c.values.end()) return;
    std::istringstream s(it->second);
    if constexpr (std::is_same_v<T, std::string>) {
        v = it->second;
    } else if constexpr (std::is_same_v<T, std::vector<double>>) {
        v.clear();
        std::string item;
        while (std::getline(s, item, ',')) v.push_back(std::stod(item));
    } else {
        s >> v;
        if (!s) throw Failure{kExitUsage, c.path + ": bad value for " + key};
    }
}

double resolve_ctilde(const Config& cfg, const std::string& act, int d, int n, int k, double p, double mu,
                      double given)
{
    if (given > 0) return given;
    std::string key = ctilde_entry(act, d, n, k, p, mu);
    auto it = cfg.ctilde.find(key);
    if (it != cfg.ctilde.end()) return it->second;
    double c = 0.0;
    check(sobnet_calibrate_ctilde(act.c_str(), d, n, k, c_p(p), mu, &c));
    cfg.append(key, c);
    std::cerr << "calibrated " << key << " = " << c << "\n";
    return c;
}

int run_catalog(bool json)
{
    char* s = nullptr;
    check(sobnet_catalog_json(&s));
    Json rows = Json::parse(take(s));
    if (json) {
        std::cout << rows.dump(2) << "\n";
        return kExitOk;
    }
    std::cout << std::left << std::setw(16) << "name" << std::setw(5) << "tau" << std::setw(5) << "j" << std::setw(13)
              << "class" << std::setw(8) << "A" << "B\n";
    for (const Json& r : rows) {
        auto cell = [](const Json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
        std::cout << std::setw(16) << r["name"].get<std::string>() << std::setw(5) << cell(r["tau"]) << std::setw(5)
                  << cell(r["j"]) << std::setw(13) << r["class"].get<std::string>() << std::setw(8) << cell(r["A"])
                  << cell(r["B"]) << "\n";
    }
    return kExitOk;
}

int run_verify_pu(const PuArgs& a)
{
    char* s = nullptr;
    check(sobnet_verify_pu_json(a.activation.c_str(), a.d, a.N, a.s, a.mu, a.n, a.kmax, a.gpp, &s));
    std::string text = take(s);
    if (!a.out.empty()) write_text(a.out, text + "\n");
    std::cout << text << "\n";
    return kExitOk;
}

int run_synth(const SynthArgs& a, const Config& cfg)
{
    double p = parse_p(a.p);
    // Validation with a unit constant rejects bad ranges and unsupported activations before calibration.
    char* plan = nullptr;
    check(sobnet_plan_json(a.activation.c_str(), a.eps, a.n, a.k, c_p(p), a.d, a.mu, 1.0, &plan));
    sobnet_free(plan);
    double ct = resolve_ctilde(cfg, a.activation, a.d, a.n, a.k, p, a.mu, a.ctilde);
    sobnet_network* net = nullptr;
    char* rep = nullptr;
    check(sobnet_synthesize(a.activation.c_str(), a.target.c_str(), a.d, a.eps, a.n, a.k, c_p(p), a.mu, ct, a.seed,
                            &net, &rep));
    std::string report = take(rep);
    int st = sobnet_network_save(net, a.out.c_str());
    sobnet_network_free(net);
    check(st);
    write_text(a.report, report + "\n");
    Json j = Json::parse(report);
    double err = j["norm"]["value"].get<double>();
    double rerr = j["rounding"]["rounded_error"].get<double>();
    std::cout << "error " << err << " rounded " << rerr << " eps " << a.eps << " M " << j["stats"]["M"] << " L "
              << j["stats"]["L"] << "\n";
    return err <= a.eps && rerr <= a.eps ? kExitOk : kExitContract;
}

int run_rates(const RatesArgs& a, const Config& cfg)
{
    double p = parse_p(a.p);
    char* plan = nullptr;
    check(sobnet_plan_json(a.activation.c_str(), a.eps.front(), a.n, a.k, c_p(p), a.d, a.mu, 1.0, &plan));
    sobnet_free(plan);
    double ct = resolve_ctilde(cfg, a.activation, a.d, a.n, a.k, p, a.mu, a.ctilde);
    char* s = nullptr;
    check(sobnet_sweep_json(a.activation.c_str(), a.target.c_str(), a.d, a.eps.data(), a.eps.size(), a.n, a.k, c_p(p),
                            a.mu, ct, a.seed, &s));
    std::string text = take(s);
    write_text(a.report, text + "\n");
    Json j = Json::parse(text);
    std::cout << std::left << std::setw(10) << "eps" << std::setw(14) << "error" << std::setw(10) << "M"
              << std::setw(4) << "L" << "max|w|\n";
    for (const Json& r : j["runs"])
        std::cout << std::setw(10) << r["eps"].get<double>() << std::setw(14) << r["error"].get<double>()
                  << std::setw(10) << r["M"].get<long long>() << std::setw(4) << r["L"].get<int>()
                  << r["max_abs_weight"].get<double>() << "\n";
    std::cout << "M exponent " << j["rate_fits"][0]["fit"]["exponent"] << " (theory " << j["theory_exponent"]
              << ")\n";
    return j["errors_ok"].get<bool>() && j["depth_constant"].get<bool>() ? kExitOk : kExitContract;
}

int run_codec(const CodecArgs& a)
{
    if (!a.decode.empty()) {
        double theta = a.theta, nu = a.nu;
        std::string act = a.activation;
        if (!a.scheme.empty()) {
            Json j = Json::parse(read_text(a.scheme)).at("scheme");
            theta = j.at("theta").get<double>();
            nu = j.at("nu").get<double>();
            act = j.at("activation").get<std::string>();
        }
        if (!(theta > 0 && nu > 0)) throw Failure{kExitUsage, "--decode needs --scheme or --theta and --nu"};
        std::vector<uint8_t> bytes = read_bytes(a.decode);
        double C0 = 0, eps = 0;
        check(sobnet_stream_constants(bytes.data(), bytes.size(), &C0, &eps));
        sobnet_scheme* sc = nullptr;
        check(sobnet_scheme_open(act.c_str(), C0, eps, theta, nu, &sc));
        sobnet_network* net = nullptr;
        int st = sobnet_decode(sc, bytes.data(), bytes.size(), 0, &net);
        sobnet_scheme_free(sc);
        check(st);
        st = sobnet_network_save(net, a.out.c_str());
        sobnet_network_free(net);
        check(st);
        std::cout << "decoded " << a.decode << " -> " << a.out << "\n";
        return kExitOk;
    }
    if (a.in.empty()) throw Failure{kExitUsage, "codec needs --in or --decode"};
    sobnet_network* raw = nullptr;
    check(sobnet_network_load(a.in.c_str(), &raw));
    // The output layer is rounded onto the scheme grid first; theta and nu come from the
    // flags or are measured on the input network.
    double theta = a.theta, nu = a.nu;
    sobnet_network* net = nullptr;
    {
        sobnet_scheme* probe = nullptr;
        int st = sobnet_scheme_create(raw, a.eps, a.theta, a.nu, a.k, a.C0, &probe);
        char* s = nullptr;
        if (st == SOBNET_OK) st = sobnet_scheme_json(probe, &s);
        sobnet_scheme_free(probe);
        if (st == SOBNET_OK) {
            Json j = Json::parse(take(s));
            theta = j["theta"].get<double>();
            nu = j["nu"].get<double>();
            st = sobnet_round_output_layer(raw, a.eps, theta, nu, &net);
        }
        sobnet_network_free(raw);
        check(st);
    }
    if (!a.rounded_out.empty()) check(sobnet_network_save(net, a.rounded_out.c_str()));
    sobnet_scheme* sc = nullptr;
    sobnet_network* back = nullptr;
    uint8_t* bytes = nullptr;
    size_t nbytes = 0;
    uint64_t bits = 0;
    int st = sobnet_scheme_create(net, a.eps, theta, nu, a.k, a.C0, &sc);
    if (st == SOBNET_OK) st = sobnet_encode(net, sc, &bytes, &nbytes, &bits);
    if (st == SOBNET_OK) st = sobnet_decode(sc, bytes, nbytes, bits, &back);
    std::string err = sobnet_last_error();
    Json report;
    bool same = false;
    if (st == SOBNET_OK) {
        char *s1 = nullptr, *s2 = nullptr, *s3 = nullptr, *s4 = nullptr;
        check(sobnet_network_to_json(net, &s1));
        check(sobnet_network_to_json(back, &s2));
        same = take(s1) == take(s2);
        check(sobnet_scheme_json(sc, &s3));
        check(sobnet_network_stats_json(net, &s4));
        Json scheme = Json::parse(take(s3));
        Json stats = Json::parse(take(s4));
        long long M = stats["M"].get<long long>();
        int K = scheme["K"].get<int>();
        double logM = M > 1 ? std::ceil(std::log2(double(M))) : 0.0;
        report = {{"scheme", scheme},
                  {"stats", stats},
                  {"bits", bits},
                  {"bytes", nbytes},
                  {"bit_ratio", M > 0 ? double(bits) / (double(M) * (K + logM)) : 0.0},
                  {"roundtrip_exact", same}};
        std::ofstream f(a.out, std::ios::binary);
        f.write(reinterpret_cast<const char*>(bytes), static_cast<std::streamsize>(nbytes));
        if (!f) st = SOBNET_IO_ERROR, err = "cannot write " + a.out;
    }
    sobnet_free(bytes);
    sobnet_network_free(back);
    sobnet_scheme_free(sc);
    sobnet_network_free(net);
    if (st != SOBNET_OK) throw Failure{exit_for(st), std::string(sobnet_status_name(st)) + ": " + err};
    std::string text = report.dump(2);
    if (!a.report.empty()) write_text(a.report, text + "\n");
    std::cout << text << "\n";
    return same ? kExitOk : kExitContract;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Constructive Sobolev approximation with smooth-activation networks"};
    app.require_subcommand(1);
    app.fallthrough();  // --config may follow the subcommand
    std::string config_path;
    app.add_option("--config", config_path, "key = value file; also stores calibrated constants");

    Config cfg;
    try {
        std::string pre = pre_scan_config(argc, argv);
        if (!pre.empty()) cfg = Config::load(pre);
    } catch (const Failure& f) {
        std::cerr << f.message << "\n";
        return f.exit_code;
    }

    bool catalog_json_out = false;
    auto* cat = app.add_subcommand("catalog", "Print the activation catalog");
    cat->add_flag("--json", catalog_json_out, "JSON instead of aligned text");

    PuArgs pu;
    SynthArgs sy;
    RatesArgs ra;
    CodecArgs co;
    try {
        from_config(cfg, "activation", pu.activation);
        from_config(cfg, "d", pu.d);
        from_config(cfg, "N", pu.N);
        from_config(cfg, "s", pu.s);
        from_config(cfg, "mu", pu.mu);
        from_config(cfg, "kmax", pu.kmax);
        for (auto* a : {&sy.activation, &ra.activation}) from_config(cfg, "activation", *a);
        for (auto* a : {&sy.target, &ra.target}) from_config(cfg, "target", *a);
        for (auto* a : {&sy.p, &ra.p}) from_config(cfg, "p", *a);
        for (auto* a : {&sy.mu, &ra.mu}) from_config(cfg, "mu", *a);
        for (auto* a : {&sy.n, &ra.n, &pu.n}) from_config(cfg, "n", *a);
        for (auto* a : {&sy.k, &ra.k, &co.k}) from_config(cfg, "k", *a);
        for (auto* a : {&sy.d, &ra.d}) from_config(cfg, "d", *a);
        for (auto* a : {&sy.seed, &ra.seed}) from_config(cfg, "seed", *a);
        from_config(cfg, "eps", sy.eps);
        from_config(cfg, "eps", co.eps);
        from_config(cfg, "eps_list", ra.eps);
        from_config(cfg, "out", sy.out);
        from_config(cfg, "report", sy.report);
        from_config(cfg, "rates_report", ra.report);
    } catch (const Failure& f) {
        std::cerr << f.message << "\n";
        return f.exit_code;
    } catch (const std::exception& e) {
        std::cerr << cfg.path << ": " << e.what() << "\n";
        return kExitUsage;
    }

    auto* vp = app.add_subcommand("verify-pu", "Measure the partition-of-unity properties of a bump family");
    vp->add_option("--activation", pu.activation);
    vp->add_option("--d", pu.d)->check(CLI::Range(1, 3));
    vp->add_option("--N", pu.N)->check(CLI::PositiveNumber);
    vp->add_option("--s", pu.s, "scaling; omitted or <= 0 selects it from the decay class");
    vp->add_option("--mu", pu.mu);
    vp->add_option("--n", pu.n, "smoothness used by the polynomial-class scaling rule");
    vp->add_option("--kmax", pu.kmax)->check(CLI::Range(0, 4));
    vp->add_option("--grid", pu.gpp, "grid points per patch and axis");
    vp->add_option("--out", pu.out, "also write the report here");

    auto* sp = app.add_subcommand("synth", "Synthesize, round and encode one network");
    sp->add_option("--activation", sy.activation);
    sp->add_option("--target", sy.target, "corpus name (sin1, gauss2, poly3) or expression in x, y, z");
    sp->add_option("--eps", sy.eps);
    sp->add_option("--n", sy.n);
    sp->add_option("--k", sy.k);
    sp->add_option("--p", sy.p, "Lebesgue exponent or inf");
    sp->add_option("--d", sy.d);
    sp->add_option("--mu", sy.mu);
    sp->add_option("--ctilde", sy.ctilde, "override the calibrated constant");
    sp->add_option("--seed", sy.seed);
    sp->add_option("--out", sy.out);
    sp->add_option("--report", sy.report);

    auto* rp = app.add_subcommand("rates", "Sweep eps and fit complexity exponents");
    rp->add_option("--activation", ra.activation);
    rp->add_option("--target", ra.target);
    rp->add_option("--eps", ra.eps, "decreasing eps values")->delimiter(',')->expected(3, 64);
    rp->add_option("--n", ra.n);
    rp->add_option("--k", ra.k);
    rp->add_option("--p", ra.p);
    rp->add_option("--d", ra.d);
    rp->add_option("--mu", ra.mu);
    rp->add_option("--ctilde", ra.ctilde);
    rp->add_option("--seed", ra.seed);
    rp->add_option("--report", ra.report);

    auto* cp = app.add_subcommand("codec", "Encode a network file and verify the roundtrip, or decode a stream");
    cp->add_option("--in", co.in, "network JSON to encode");
    cp->add_option("--eps", co.eps);
    cp->add_option("--theta", co.theta, "magnitude exponent; omitted measures it");
    cp->add_option("--nu", co.nu, "rounding exponent; omitted measures it");
    cp->add_option("--k", co.k, "derivative order used when measuring nu");
    cp->add_option("--C0", co.C0);
    cp->add_option("--out", co.out, "bitstream output, or network output with --decode");
    cp->add_option("--report", co.report);
    cp->add_option("--rounded-out", co.rounded_out, "network after output-layer rounding");
    cp->add_option("--decode", co.decode, "bitstream to decode");
    cp->add_option("--scheme", co.scheme, "codec report supplying theta, nu and activation for --decode");
    cp->add_option("--activation", co.activation, "activation of the decoded network");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (cat->parsed()) return run_catalog(catalog_json_out);
        if (vp->parsed()) return run_verify_pu(pu);
        if (sp->parsed()) return run_synth(sy, cfg);
        if (rp->parsed()) return run_rates(ra, cfg);
        if (cp->parsed()) return run_codec(co);
    } catch (const Failure& f) {
        std::cerr << f.message << "\n";
        return f.exit_code;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
