#include "spde/expression.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <vector>

namespace spde {

struct Expression::Node {
    enum class Kind { number, time, coord, add, sub, mul, div, pow, neg, sin, cos, exp };
    Kind kind;
    double value = 0.0;
    int axis = 0;
    std::vector<std::shared_ptr<const Node>> args;

    double eval(double t, std::span<const double> x) const {
        switch (kind) {
        case Kind::number: return value;
        case Kind::time: return t;
        case Kind::coord:
            if (static_cast<std::size_t>(axis) > x.size())
                throw ExpressionError("expression references x" + std::to_string(axis) +
                                      " beyond the grid dimension");
            return x[static_cast<std::size_t>(axis - 1)];
        case Kind::add: return args[0]->eval(t, x) + args[1]->eval(t, x);
        case Kind::sub: return args[0]->eval(t, x) - args[1]->eval(t, x);
        case Kind::mul: return args[0]->eval(t, x) * args[1]->eval(t, x);
        case Kind::div: return args[0]->eval(t, x) / args[1]->eval(t, x);
        case Kind::pow: return std::pow(args[0]->eval(t, x), args[1]->eval(t, x));
        case Kind::neg: return -args[0]->eval(t, x);
        case Kind::sin: return std::sin(args[0]->eval(t, x));
        case Kind::cos: return std::cos(args[0]->eval(t, x));
        case Kind::exp: return std::exp(args[0]->eval(t, x));
        }
        return 0.0;
    }

    bool uses_x() const {
        if (kind == Kind::coord)
            return true;
        for (const auto& a : args)
            if (a->uses_x())
                return true;
        return false;
    }

    bool uses_t() const {
        if (kind == Kind::time)
            return true;
        for (const auto& a : args)
            if (a->uses_t())
                return true;
        return false;
    }

    int highest_axis() const {
        int m = kind == Kind::coord ? axis : 0;
        for (const auto& a : args)
            m = std::max(m, a->highest_axis());
        return m;
    }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Kind = Expression::Node::Kind;

NodePtr make(Kind kind, std::vector<NodePtr> args = {}, double value = 0.0, int axis = 0) {
    auto n = std::make_shared<Expression::Node>();
    n->kind = kind;
    n->args = std::move(args);
    n->value = value;
    n->axis = axis;
    return n;
}

class Parser {
public:
    explicit Parser(const std::string& text) : s_(text) {}

    NodePtr parse() {
        auto n = expr();
        skip();
        if (pos_ != s_.size())
            fail("unexpected trailing input");
        return n;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw ExpressionError(what + " at position " + std::to_string(pos_) + " in '" + s_ + "'");
    }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
            ++pos_;
    }

    bool accept(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr expr() {
        auto lhs = term();
        for (;;) {
            if (accept('+'))
                lhs = make(Kind::add, {lhs, term()});
            else if (accept('-'))
                lhs = make(Kind::sub, {lhs, term()});
            else
                return lhs;
        }
    }

    NodePtr term() {
        auto lhs = unary();
        for (;;) {
            if (accept('*'))
                lhs = make(Kind::mul, {lhs, unary()});
            else if (accept('/'))
                lhs = make(Kind::div, {lhs, unary()});
            else
                return lhs;
        }
    }

    NodePtr unary() {
        if (accept('-'))
            return make(Kind::neg, {unary()});
        if (accept('+'))
            return unary();
        return power();
    }

    NodePtr power() {
        auto base = atom();
        if (accept('^'))
            return make(Kind::pow, {base, unary()});
        return base;
    }

    NodePtr atom() {
        skip();
        if (pos_ >= s_.size())
            fail("unexpected end of expression");
        if (accept('(')) {
            auto n = expr();
            if (!accept(')'))
                fail("expected ')'");
            return n;
        }
        const char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* begin = s_.c_str() + pos_;
            char* end = nullptr;
            const double v = std::strtod(begin, &end);
            if (end == begin)
                fail("malformed number");
            pos_ += static_cast<std::size_t>(end - begin);
            return make(Kind::number, {}, v);
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            const std::size_t start = pos_;
            while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_])))
                ++pos_;
            const std::string name = s_.substr(start, pos_ - start);
            if (name == "sin" || name == "cos" || name == "exp") {
                if (!accept('('))
                    fail("expected '(' after " + name);
                auto arg = expr();
                if (!accept(')'))
                    fail("expected ')'");
                const Kind k = name == "sin" ? Kind::sin : name == "cos" ? Kind::cos : Kind::exp;
                return make(k, {arg});
            }
            if (name == "t")
                return make(Kind::time);
            if (name == "pi")
                return make(Kind::number, {}, std::numbers::pi);
            if (name == "x")
                return make(Kind::coord, {}, 0.0, 1);
            if (name.size() == 2 && name[0] == 'x' && name[1] >= '1' && name[1] <= '9')
                return make(Kind::coord, {}, 0.0, name[1] - '0');
            pos_ = start;
            fail("unknown name '" + name + "'");
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    const std::string& s_;
    std::size_t pos_ = 0;
};

}  // namespace

Expression::Expression(std::shared_ptr<const Node> root, std::string text)
    : root_(std::move(root)), text_(std::move(text)) {}

Expression Expression::parse(const std::string& text) {
    return Expression(Parser(text).parse(), text);
}

Expression Expression::constant(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return Expression(make(Kind::number, {}, value), buf);
}

double Expression::operator()(double t, std::span<const double> x) const {
    return root_->eval(t, x);
}

bool Expression::depends_on_x() const noexcept { return root_->uses_x(); }
bool Expression::depends_on_t() const noexcept { return root_->uses_t(); }
int Expression::max_axis() const noexcept { return root_->highest_axis(); }

}  // namespace spde
