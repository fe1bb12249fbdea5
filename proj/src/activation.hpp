#pragma once

#include <climits>
#include <optional>
#include <string>
#include <vector>

namespace sobnet {

enum class Kind { relu, elu, softsign, isrlu, isru, sigmoid, tanh, arctan, softplus, swish, repu };

enum class DecayClass { exact, exponential, polynomial };

const char* decay_class_name(DecayClass c);

constexpr int kSmoothInf = INT_MAX;  // j for analytic entries
constexpr int kMaxOracleOrder = 4;   // cap on hand-written derivative oracles

struct ActivationSpec {
    std::string name;  // canonical, including parameter ("elu:0.5")
    std::string family;
    Kind kind = Kind::sigmoid;
    double param = 0.0;
    int tau = 0;
    int j = kSmoothInf;
    double A = 0.0;
    double B = 1.0;
    DecayClass decay = DecayClass::exponential;
    double D = 1.0;
    double R = 10.0;
    bool bounded = true;
    double kink = 0.0;      // location of the single non-smooth point, if any
    int kink_order = INT_MAX;  // smallest derivative order that jumps at the kink

    // Usable derivative order: j capped at the oracle limit.
    int max_order() const { return j < kMaxOracleOrder ? j : kMaxOracleOrder; }

    double value(double x) const;
    // Fills out[0..order] with rho^(i)(x). Returns true when x sits on a kink
    // and a right-sided value was used for an order >= kink_order.
    bool derivatives(double x, int order, double* out) const;

    // Point with rho^(r)(x0) != 0, chosen per (activation, r).
    std::optional<double> x0(int r) const;

    // |B - rho^(tau)(x)| for x > 0 and |A - rho^(tau)(x)| for x < 0,
    // evaluated without cancellation in the tails.
    double asymptote_gap(double x) const;
};

ActivationSpec lookup(const std::string& name);

// The twelve catalog rows with default parameters.
std::vector<ActivationSpec> catalog();

struct EvalResult {
    std::vector<double> values;
    bool one_sided = false;
};

// Checked evaluation: order must not exceed the activation's smoothness.
EvalResult eval(const std::string& name, double x, int order);

struct ConditionFit {
    std::string condition;
    int derivative_order = 0;
    double fitted_rate = 0.0;  // +inf when all residuals vanish
    double residual_max = 0.0;
    bool monotone = true;
    bool pass = false;
};

struct AdmissibilityReport {
    std::string activation;
    DecayClass decay = DecayClass::exponential;
    double x_lo = 0.0, x_hi = 0.0;
    int order = 0;
    std::vector<ConditionFit> conditions;
    bool pass = false;
};

AdmissibilityReport check_admissibility(const ActivationSpec& spec, double x_lo, double x_hi,
                                        int order, int samples = 200);

} // namespace sobnet
