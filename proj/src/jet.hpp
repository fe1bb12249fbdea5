#pragma once

#include "activation.hpp"
#include "network.hpp"

#include <vector>

namespace sobnet {

// Truncated multivariate Taylor polynomials: coefficient of h^alpha for |alpha| <= order.
struct JetLayout {
    JetLayout(int d, int order);

    int d;
    int order;
    std::vector<std::vector<int>> alphas;  // graded order, alphas[0] = 0
    std::vector<int> degree;
    struct Product {
        int a, b, c;  // alphas[a] + alphas[b] = alphas[c]
    };
    std::vector<Product> products;  // pairs with both factors of positive degree

    int size() const { return static_cast<int>(alphas.size()); }
    int index(const std::vector<int>& alpha) const;
};

double multi_factorial(const std::vector<int>& alpha);

// Jets of every output unit at every point: data[(unit * ncoef + coef) * points + p].
struct JetBatch {
    int units = 0;
    int ncoef = 0;
    int points = 0;
    std::vector<double> data;
    bool one_sided = false;  // some pre-activation hit a kink

    double& at(int unit, int coef, int p) { return data[(static_cast<size_t>(unit) * ncoef + coef) * points + p]; }
    double at(int unit, int coef, int p) const { return data[(static_cast<size_t>(unit) * ncoef + coef) * points + p]; }
    // Partial derivative D^alpha of an output at point p.
    double derivative(const JetLayout& lay, int unit, const std::vector<int>& alpha, int p) const;
};

// Propagates jets of order `order` through the network at row-major inputs xs.
JetBatch realize_jets(const Network& net, const std::vector<double>& xs, int order);

struct DerivativeResult {
    double value = 0.0;
    bool one_sided = false;
    bool finite_difference = false;
};

// D^alpha of output `output` at x: exact through jets for |alpha| <= kMaxOracleOrder,
// centered differences of exact lower-order derivatives above that.
DerivativeResult derivative(const Network& net, const std::vector<double>& x, const std::vector<int>& alpha,
                            int output = 0);

} // namespace sobnet
