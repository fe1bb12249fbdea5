#pragma once

#include "activation.hpp"
#include "network.hpp"

#include <deque>
#include <string>
#include <vector>

namespace sobnet {

struct GadgetCert {
    std::string target;
    double eps_target = 0.0;
    double B = 0.0;
    double delta = 0.0;           // internal difference scale
    double x0 = 0.0;
    std::vector<double> errors;   // measured error per derivative order k
    int grid = 0;                 // points per axis
    NetworkStats stats;
    bool pass = false;

    double max_error() const;
};

struct Gadget {
    Network net;
    GadgetCert cert;
};

// Throws Status::unsupported when no cataloged x0 has rho^(r)(x0) != 0.
double gadget_x0(const ActivationSpec& spec, int r);

// Two-layer approximation of x^r on [-B, B] with a fixed difference scale delta.
Network monomial_net_at(const ActivationSpec& spec, int r, double delta, double x0);

// Certified x^r approximation: C^k error <= eps for k <= n on a 1001-point grid of [-B, B].
Gadget monomial_net(const ActivationSpec& spec, int r, int n, double eps, double B);

// L-layer approximation of the identity on [-B, B]^d (L >= 2), certified in W^{order,inf}.
Gadget identity_net(const ActivationSpec& spec, int L, int d, double B, double eps, int order = 1);
Network identity_net_at(const ActivationSpec& spec, int L, int d, double delta, double x0);

// Two-layer approximation of (x, y) -> xy on [-B, B]^2 via polarization, certified in W^{order,inf}.
Gadget mult_net(const ActivationSpec& spec, double eps, double B, int order = 1);
Network mult_net_at(const ActivationSpec& spec, double delta, double x0);

// Supplies pass-through and multiplication gadgets to product_chain.
struct GadgetSource {
    virtual ~GadgetSource() = default;
    virtual const Network& identity(int L) = 0;  // one input, L >= 2 layers
    virtual const Network& mult() = 0;
};

// Approximates the product of all outputs of `base`; m = 1 returns base unchanged.
// The running product enters the second multiplier slot.
Network product_chain(const Network& base, GadgetSource& gadgets);

// Direct gadget source with fixed accuracy and domain bound.
class DirectGadgets : public GadgetSource {
public:
    DirectGadgets(ActivationSpec spec, double eps, double B, int order);
    const Network& identity(int L) override;
    const Network& mult() override;
    std::vector<GadgetCert> certs() const;

private:
    ActivationSpec spec_;
    double eps_, B_;
    int order_;
    std::deque<std::pair<int, Gadget>> ids_;
    std::deque<Gadget> mult_;
};

} // namespace sobnet
