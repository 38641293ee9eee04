#include "pdarcy/expression.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace pdarcy {

struct Expression::Node {
    enum class Kind { constant, var_x, var_z, neg, add, sub, mul, div, pow, call };
    enum class Func { sin, cos, tan, exp, log, sqrt, abs };

    Kind kind = Kind::constant;
    Func func = Func::sin;
    double value = 0.0;
    std::unique_ptr<Node> lhs;
    std::unique_ptr<Node> rhs;

    double eval(double x, double z) const
    {
        switch (kind) {
        case Kind::constant: return value;
        case Kind::var_x: return x;
        case Kind::var_z: return z;
        case Kind::neg: return -lhs->eval(x, z);
        case Kind::add: return lhs->eval(x, z) + rhs->eval(x, z);
        case Kind::sub: return lhs->eval(x, z) - rhs->eval(x, z);
        case Kind::mul: return lhs->eval(x, z) * rhs->eval(x, z);
        case Kind::div: return lhs->eval(x, z) / rhs->eval(x, z);
        case Kind::pow: return std::pow(lhs->eval(x, z), rhs->eval(x, z));
        case Kind::call: {
            const double a = lhs->eval(x, z);
            switch (func) {
            case Func::sin: return std::sin(a);
            case Func::cos: return std::cos(a);
            case Func::tan: return std::tan(a);
            case Func::exp: return std::exp(a);
            case Func::log: return std::log(a);
            case Func::sqrt: return std::sqrt(a);
            case Func::abs: return std::abs(a);
            }
        }
        }
        return 0.0;
    }
};

namespace {

using Node = Expression::Node;
using NodePtr = std::unique_ptr<Node>;

NodePtr make_binary(Node::Kind kind, NodePtr lhs, NodePtr rhs)
{
    auto n = std::make_unique<Node>();
    n->kind = kind;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return n;
}

// Recursive descent: expr := term (('+'|'-') term)*, term := unary (('*'|'/') unary)*,
// unary := '-' unary | power, power := primary ('^' unary)?
class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    NodePtr parse()
    {
        auto n = expr();
        skip_ws();
        if (pos_ != src_.size()) {
            fail("unexpected character");
        }
        return n;
    }

private:
    [[noreturn]] void fail(const std::string& what) const
    {
        throw std::invalid_argument("expression '" + std::string(src_) + "': " + what +
                                    " at offset " + std::to_string(pos_));
    }

    void skip_ws()
    {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) {
            ++pos_;
        }
    }

    bool accept(char c)
    {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr expr()
    {
        auto n = term();
        for (;;) {
            if (accept('+')) {
                n = make_binary(Node::Kind::add, std::move(n), term());
            } else if (accept('-')) {
                n = make_binary(Node::Kind::sub, std::move(n), term());
            } else {
                return n;
            }
        }
    }

    NodePtr term()
    {
        auto n = unary();
        for (;;) {
            if (accept('*')) {
                n = make_binary(Node::Kind::mul, std::move(n), unary());
            } else if (accept('/')) {
                n = make_binary(Node::Kind::div, std::move(n), unary());
            } else {
                return n;
            }
        }
    }

    NodePtr unary()
    {
        if (accept('-')) {
            auto n = std::make_unique<Node>();
            n->kind = Node::Kind::neg;
            n->lhs = unary();
            return n;
        }
        if (accept('+')) {
            return unary();
        }
        return power();
    }

    NodePtr power()
    {
        auto base = primary();
        if (accept('^')) {
            return make_binary(Node::Kind::pow, std::move(base), unary());
        }
        return base;
    }

    NodePtr primary()
    {
        skip_ws();
        if (pos_ >= src_.size()) {
            fail("unexpected end of input");
        }
        if (accept('(')) {
            auto n = expr();
            if (!accept(')')) {
                fail("expected ')'");
            }
            return n;
        }
        const char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            return number();
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            return identifier();
        }
        fail("unexpected character");
    }

    NodePtr number()
    {
        const std::string rest(src_.substr(pos_));
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(rest, &used);
        } catch (const std::exception&) {
            fail("malformed number");
        }
        pos_ += used;
        auto n = std::make_unique<Node>();
        n->value = v;
        return n;
    }

    NodePtr identifier()
    {
        const std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
            ++pos_;
        }
        const std::string name(src_.substr(start, pos_ - start));
        auto n = std::make_unique<Node>();
        if (name == "x") {
            n->kind = Node::Kind::var_x;
            return n;
        }
        if (name == "z") {
            n->kind = Node::Kind::var_z;
            return n;
        }
        if (name == "pi") {
            n->value = std::numbers::pi;
            return n;
        }
        if (name == "e") {
            n->value = std::numbers::e;
            return n;
        }
        static const std::vector<std::pair<std::string, Node::Func>> funcs = {
            {"sin", Node::Func::sin},   {"cos", Node::Func::cos}, {"tan", Node::Func::tan},
            {"exp", Node::Func::exp},   {"log", Node::Func::log}, {"sqrt", Node::Func::sqrt},
            {"abs", Node::Func::abs},
        };
        for (const auto& [fname, f] : funcs) {
            if (fname == name) {
                if (!accept('(')) {
                    fail("expected '(' after " + name);
                }
                n->kind = Node::Kind::call;
                n->func = f;
                n->lhs = expr();
                if (!accept(')')) {
                    fail("expected ')'");
                }
                return n;
            }
        }
        pos_ = start;
        fail("unknown identifier '" + name + "'");
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

}  // namespace

Expression::Expression() : Expression("0") {}

Expression::Expression(std::string_view source)
    : source_(source), root_(Parser(source).parse())
{
}

double Expression::operator()(double x, double z) const { return root_->eval(x, z); }

}  // namespace pdarcy
