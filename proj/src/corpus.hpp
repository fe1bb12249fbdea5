#pragma once

#include "jet.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace sobnet {

// A target function with Taylor-coefficient oracle: coefs[i] is the coefficient
// of h^alphas[i] in f(x + h) for the given layout.
struct Target {
    std::string name;
    int d = 1;
    double normalizer = 1.0;  // divisor applied to the raw expression
    std::function<void(const double* x, const JetLayout& lay, double* coefs)> jet;

    double value(const double* x) const;
};

// Expression over variables x, y, z with + - * / ^int, sin, cos, exp, pi and numbers.
Target parse_target(const std::string& expr, int d, const std::string& name = "");

// Named corpus entries: sin1, gauss2, poly3. Empty when the name is unknown.
bool corpus_lookup(const std::string& name, Target& out);
std::vector<std::string> corpus_names();

// Constant target, mainly for tests and scaffold runs.
Target constant_target(double c, int d);

// Univariate composition g(z0 + u) for a jet with derivative values g^(i)(z0), i <= order.
void compose_jet(const JetLayout& lay, const double* z, const double* gd, double* out);
void multiply_jet(const JetLayout& lay, const double* a, const double* b, double* out);

} // namespace sobnet
