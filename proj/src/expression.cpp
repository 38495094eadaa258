#include "nldirac/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <set>
#include <vector>

namespace nldirac {

struct Expression::Node {
    enum class Kind { number, variable, unary_minus, binary, call };
    Kind kind = Kind::number;
    Complex value = 0.0;
    std::string name;
    char op = 0;
    std::vector<std::shared_ptr<const Node>> args;
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    NodePtr parse_all() {
        NodePtr root = expr();
        skip_space();
        if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        return root;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw Error(ErrorCode::parse, "expression '" + std::string(text_) + "' at column " +
                                          std::to_string(pos_ + 1) + ": " + what);
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    static NodePtr binary(char op, NodePtr lhs, NodePtr rhs) {
        auto n = std::make_shared<Node>();
        n->kind = Node::Kind::binary;
        n->op = op;
        n->args = {std::move(lhs), std::move(rhs)};
        return n;
    }

    NodePtr expr() {
        NodePtr lhs = term();
        for (;;) {
            if (accept('+')) {
                lhs = binary('+', lhs, term());
            } else if (accept('-')) {
                lhs = binary('-', lhs, term());
            } else {
                return lhs;
            }
        }
    }

    NodePtr term() {
        NodePtr lhs = unary();
        for (;;) {
            if (accept('*')) {
                lhs = binary('*', lhs, unary());
            } else if (accept('/')) {
                lhs = binary('/', lhs, unary());
            } else {
                return lhs;
            }
        }
    }

    NodePtr unary() {
        if (accept('-')) {
            auto n = std::make_shared<Node>();
            n->kind = Node::Kind::unary_minus;
            n->args = {unary()};
            return n;
        }
        if (accept('+')) return unary();
        return power();
    }

    NodePtr power() {
        NodePtr base = primary();
        if (accept('^')) return binary('^', base, unary());
        return base;
    }

    NodePtr primary() {
        skip_space();
        if (pos_ >= text_.size()) fail("unexpected end of expression");
        const char c = text_[pos_];
        if (accept('(')) {
            NodePtr inner = expr();
            if (!accept(')')) fail("expected ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return name();
        fail("unexpected '" + std::string(1, c) + "'");
    }

    NodePtr number() {
        const char* begin = text_.data() + pos_;
        const char* end = text_.data() + text_.size();
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(begin, end, v);
        if (ec != std::errc()) fail("malformed number");
        pos_ += static_cast<std::size_t>(ptr - begin);
        auto n = std::make_shared<Node>();
        n->value = v;
        return n;
    }

    NodePtr name() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
            ++pos_;
        }
        auto n = std::make_shared<Node>();
        n->name = std::string(text_.substr(start, pos_ - start));
        if (accept('(')) {
            static const std::set<std::string, std::less<>> functions = {
                "exp", "sin", "cos", "sqrt", "abs", "re", "im", "conj", "const", "exp_mode"};
            if (!functions.count(n->name)) {
                pos_ = start;
                fail("unknown function '" + n->name + "'");
            }
            n->kind = Node::Kind::call;
            do {
                n->args.push_back(expr());
            } while (accept(','));
            if (!accept(')')) fail("expected ')' after arguments of " + n->name);
            if (n->args.size() != 1) fail(n->name + " expects 1 argument");
            return n;
        }
        n->kind = Node::Kind::variable;
        return n;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

Complex lookup(const Variables& vars, const std::string& name) {
    if (auto it = vars.find(name); it != vars.end()) return it->second;
    if (name == "pi") return pi;
    if (name == "e") return std::exp(1.0);
    if (name == "i") return Complex(0.0, 1.0);
    throw Error(ErrorCode::parse, "unknown variable '" + name + "'");
}

Complex eval(const Node& n, const Variables& vars);

Complex call(const Node& n, const Variables& vars) {
    auto arity = [&](std::size_t k) {
        if (n.args.size() != k) {
            throw Error(ErrorCode::parse, n.name + " expects " + std::to_string(k) + " argument(s)");
        }
    };
    if (n.name == "exp_mode") {
        arity(1);
        const Complex k = eval(*n.args[0], vars);
        return std::exp(Complex(0.0, 1.0) * k * pi * lookup(vars, "x") / lookup(vars, "L"));
    }
    arity(1);
    const Complex a = eval(*n.args[0], vars);
    if (n.name == "exp") return std::exp(a);
    if (n.name == "sin") return std::sin(a);
    if (n.name == "cos") return std::cos(a);
    if (n.name == "sqrt") return std::sqrt(a);
    if (n.name == "abs") return std::abs(a);
    if (n.name == "re") return a.real();
    if (n.name == "im") return a.imag();
    if (n.name == "conj") return std::conj(a);
    if (n.name == "const") return a;
    throw Error(ErrorCode::parse, "unknown function '" + n.name + "'");
}

Complex eval(const Node& n, const Variables& vars) {
    switch (n.kind) {
        case Node::Kind::number: return n.value;
        case Node::Kind::variable: return lookup(vars, n.name);
        case Node::Kind::unary_minus: {
            Complex v = -eval(*n.args[0], vars);
            // Keep real negatives on the principal branch of sqrt and pow.
            if (v.imag() == 0.0) v.imag(0.0);
            return v;
        }
        case Node::Kind::call: return call(n, vars);
        case Node::Kind::binary: {
            const Complex a = eval(*n.args[0], vars);
            const Complex b = eval(*n.args[1], vars);
            switch (n.op) {
                case '+': return a + b;
                case '-': return a - b;
                case '*': return a * b;
                case '/': return a / b;
                case '^':
                    if (b.imag() == 0.0 && a.imag() == 0.0 && a.real() >= 0.0) return std::pow(a.real(), b.real());
                    if (b.imag() == 0.0 && b.real() == std::round(b.real())) {
                        return std::pow(a, static_cast<int>(b.real()));
                    }
                    return std::pow(a, b);
            }
        }
    }
    return 0.0;
}

bool mentions(const Node& n, std::string_view name) {
    if ((n.kind == Node::Kind::variable || n.kind == Node::Kind::call) && n.name == name) return true;
    if (n.kind == Node::Kind::call && n.name == "exp_mode" && (name == "x" || name == "L")) return true;
    for (const auto& a : n.args) {
        if (mentions(*a, name)) return true;
    }
    return false;
}

}  // namespace

Expression Expression::parse(std::string_view text) {
    Expression e;
    e.text_ = std::string(text);
    e.root_ = Parser(text).parse_all();
    return e;
}

Complex Expression::evaluate(const Variables& vars) const { return eval(*root_, vars); }

Real Expression::evaluate_real(const Variables& vars) const {
    const Complex v = evaluate(vars);
    if (std::abs(v.imag()) > 1e-12 * std::max(1.0, std::abs(v))) {
        throw Error(ErrorCode::parse, "expression '" + text_ + "' must be real");
    }
    return v.real();
}

bool Expression::uses(std::string_view name) const { return mentions(*root_, name); }

}  // namespace nldirac
