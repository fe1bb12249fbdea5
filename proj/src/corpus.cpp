#include "corpus.hpp"

#include "error.hpp"

#include <cctype>
#include <cmath>
#include <numbers>

namespace sobnet {

double Target::value(const double* x) const
{
    JetLayout lay(d, 0);
    double v = 0.0;
    jet(x, lay, &v);
    return v;
}

void multiply_jet(const JetLayout& lay, const double* a, const double* b, double* out)
{
    const int nc = lay.size();
    out[0] = a[0] * b[0];
    for (int c = 1; c < nc; ++c) out[c] = a[0] * b[c] + b[0] * a[c];
    for (const auto& p : lay.products) out[p.c] += a[p.a] * b[p.b];
}

void compose_jet(const JetLayout& lay, const double* z, const double* gd, double* out)
{
    const int nc = lay.size();
    const int K = lay.order;
    std::vector<double> u(z, z + nc), res(nc, 0.0), tmp(nc);
    u[0] = 0.0;
    double inv_fact = 1.0;
    for (int i = 2; i <= K; ++i) inv_fact /= i;
    res[0] = gd[K] * inv_fact;
    for (int i = K - 1; i >= 0; --i) {
        inv_fact *= (i + 1);
        for (int c = 0; c < nc; ++c) tmp[c] = res[0] * u[c];
        for (const auto& p : lay.products) tmp[p.c] += res[p.a] * u[p.b];
        tmp[0] = gd[i] * inv_fact;
        std::swap(res, tmp);
    }
    std::copy(res.begin(), res.end(), out);
}

namespace {

struct Node {
    enum Op { constant, variable, add, sub, mul, div, neg, pow, sin, cos, exp } op;
    double value = 0.0;
    int index = 0;  // variable index or integer power
    std::unique_ptr<Node> a, b;
};

class Parser {
public:
    Parser(const std::string& s, int d) : s_(s), d_(d) {}

    std::unique_ptr<Node> parse()
    {
        auto n = expr();
        skip();
        require(pos_ == s_.size(), Status::invalid_argument, "trailing input in expression at " + std::to_string(pos_));
        return n;
    }

private:
    const std::string& s_;
    int d_;
    size_t pos_ = 0;

    void skip()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool eat(char c)
    {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    static std::unique_ptr<Node> make(Node::Op op, std::unique_ptr<Node> a = nullptr, std::unique_ptr<Node> b = nullptr)
    {
        auto n = std::make_unique<Node>();
        n->op = op;
        n->a = std::move(a);
        n->b = std::move(b);
        return n;
    }

    std::unique_ptr<Node> expr()
    {
        auto n = term();
        while (true) {
            if (eat('+')) n = make(Node::add, std::move(n), term());
            else if (eat('-')) n = make(Node::sub, std::move(n), term());
            else return n;
        }
    }
    std::unique_ptr<Node> term()
    {
        auto n = unary();
        while (true) {
            if (eat('*')) n = make(Node::mul, std::move(n), unary());
            else if (eat('/')) n = make(Node::div, std::move(n), unary());
            else return n;
        }
    }
    std::unique_ptr<Node> unary()
    {
        if (eat('-')) return make(Node::neg, unary());
        if (eat('+')) return unary();
        return power();
    }
    std::unique_ptr<Node> power()
    {
        auto n = primary();
        if (eat('^')) {
            bool negative = eat('-');
            skip();
            size_t start = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            require(pos_ > start, Status::invalid_argument, "exponent must be an integer literal");
            int e = std::stoi(s_.substr(start, pos_ - start));
            auto p = make(Node::pow, std::move(n));
            p->index = negative ? -e : e;
            return p;
        }
        return n;
    }
    std::unique_ptr<Node> primary()
    {
        skip();
        require(pos_ < s_.size(), Status::invalid_argument, "unexpected end of expression");
        char c = s_[pos_];
        if (eat('(')) {
            auto n = expr();
            require(eat(')'), Status::invalid_argument, "missing ')'");
            return n;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            char* end = nullptr;
            double v = std::strtod(s_.c_str() + pos_, &end);
            pos_ = static_cast<size_t>(end - s_.c_str());
            auto n = make(Node::constant);
            n->value = v;
            return n;
        }
        size_t start = pos_;
        while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        std::string id = s_.substr(start, pos_ - start);
        require(!id.empty(), Status::invalid_argument, std::string("unexpected character '") + c + "'");
        if (id == "pi") {
            auto n = make(Node::constant);
            n->value = std::numbers::pi;
            return n;
        }
        if (id == "x" || id == "y" || id == "z") {
            int i = id[0] - 'x';
            require(i < d_, Status::invalid_argument, "variable '" + id + "' exceeds dimension");
            auto n = make(Node::variable);
            n->index = i;
            return n;
        }
        Node::Op op;
        if (id == "sin") op = Node::sin;
        else if (id == "cos") op = Node::cos;
        else if (id == "exp") op = Node::exp;
        else fail(Status::invalid_argument, "unknown identifier '" + id + "'");
        require(eat('('), Status::invalid_argument, "expected '(' after " + id);
        auto arg = expr();
        require(eat(')'), Status::invalid_argument, "missing ')'");
        return make(op, std::move(arg));
    }
};

void eval_node(const Node& n, const double* x, const JetLayout& lay, double* out)
{
    const int nc = lay.size();
    std::vector<double> a, b;
    auto sub_eval = [&](const Node& c, std::vector<double>& v) {
        v.assign(nc, 0.0);
        eval_node(c, x, lay, v.data());
    };
    switch (n.op) {
    case Node::constant:
        std::fill(out, out + nc, 0.0);
        out[0] = n.value;
        return;
    case Node::variable: {
        std::fill(out, out + nc, 0.0);
        out[0] = x[n.index];
        if (lay.order >= 1) {
            std::vector<int> e(lay.d, 0);
            e[n.index] = 1;
            out[lay.index(e)] = 1.0;
        }
        return;
    }
    case Node::add:
    case Node::sub:
        sub_eval(*n.a, a);
        sub_eval(*n.b, b);
        for (int c = 0; c < nc; ++c) out[c] = n.op == Node::add ? a[c] + b[c] : a[c] - b[c];
        return;
    case Node::neg:
        sub_eval(*n.a, a);
        for (int c = 0; c < nc; ++c) out[c] = -a[c];
        return;
    case Node::mul:
        sub_eval(*n.a, a);
        sub_eval(*n.b, b);
        multiply_jet(lay, a.data(), b.data(), out);
        return;
    case Node::div: {
        sub_eval(*n.a, a);
        sub_eval(*n.b, b);
        require(b[0] != 0.0, Status::invalid_argument, "division by zero in target expression");
        std::vector<double> gd(lay.order + 1), inv(nc);
        double f = 1.0 / b[0];
        for (int i = 0; i <= lay.order; ++i) {
            gd[i] = f;
            f *= -(i + 1) / b[0];
        }
        compose_jet(lay, b.data(), gd.data(), inv.data());
        multiply_jet(lay, a.data(), inv.data(), out);
        return;
    }
    case Node::pow: {
        sub_eval(*n.a, a);
        int e = n.index;
        std::vector<double> gd(lay.order + 1);
        double z0 = a[0];
        for (int i = 0; i <= lay.order; ++i) {
            double coef = 1.0;
            for (int j = 0; j < i; ++j) coef *= (e - j);
            gd[i] = coef == 0.0 ? 0.0 : coef * std::pow(z0, e - i);
        }
        compose_jet(lay, a.data(), gd.data(), out);
        return;
    }
    case Node::sin:
    case Node::cos:
    case Node::exp: {
        sub_eval(*n.a, a);
        std::vector<double> gd(lay.order + 1);
        double z0 = a[0];
        for (int i = 0; i <= lay.order; ++i) {
            if (n.op == Node::exp) {
                gd[i] = std::exp(z0);
            } else {
                int phase = (i + (n.op == Node::cos ? 1 : 0)) % 4;
                double v = (phase % 2 == 0) ? std::sin(z0) : std::cos(z0);
                gd[i] = phase >= 2 ? -v : v;
            }
        }
        compose_jet(lay, a.data(), gd.data(), out);
        return;
    }
    }
}

} // namespace

Target parse_target(const std::string& expr, int d, const std::string& name)
{
    require(d >= 1 && d <= 3, Status::invalid_argument, "target dimension must be 1..3");
    std::shared_ptr<Node> root = Parser(expr, d).parse();
    Target t;
    t.name = name.empty() ? expr : name;
    t.d = d;
    t.jet = [root](const double* x, const JetLayout& lay, double* coefs) { eval_node(*root, x, lay, coefs); };
    return t;
}

namespace {

Target scaled(Target t, double normalizer)
{
    auto raw = t.jet;
    t.normalizer = normalizer;
    t.jet = [raw, normalizer](const double* x, const JetLayout& lay, double* coefs) {
        raw(x, lay, coefs);
        for (int c = 0; c < lay.size(); ++c) coefs[c] /= normalizer;
    };
    return t;
}

} // namespace

bool corpus_lookup(const std::string& name, Target& out)
{
    // Divisors bring the W^{1,inf}((0,1)^d) norm of each raw expression to at most 1.
    if (name == "sin1") {
        out = scaled(parse_target("sin(2*pi*x)", 1, "sin1"), 7.0);
    } else if (name == "gauss2") {
        out = scaled(parse_target("exp(-8*((x-0.5)^2+(y-0.5)^2))", 2, "gauss2"), 4.0 * std::exp(-0.5));
    } else if (name == "poly3") {
        out = scaled(parse_target("x^3+y^3+z^3", 3, "poly3"), 3.0);
    } else {
        return false;
    }
    return true;
}

std::vector<std::string> corpus_names() { return {"sin1", "gauss2", "poly3"}; }

Target constant_target(double c, int d)
{
    Target t;
    t.name = "const";
    t.d = d;
    t.jet = [c](const double*, const JetLayout& lay, double* coefs) {
        std::fill(coefs, coefs + lay.size(), 0.0);
        coefs[0] = c;
    };
    return t;
}

} // namespace sobnet
