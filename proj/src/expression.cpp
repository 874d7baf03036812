#include "toricma/expression.hpp"

#include <cctype>
#include <cstdlib>
#include <cmath>
#include <numbers>
#include <vector>

#include "toricma/error.hpp"

namespace toricma {

struct Expression::Node {
    enum class Op { Number, X1, X2, Edge, ProdL, Neg, Add, Sub, Mul, Div, Pow, Abs, Sqrt, Exp, Log, Min, Max };
    Op op = Op::Number;
    double value = 0.0;
    int edge = 0;
    std::shared_ptr<const Node> a;
    std::shared_ptr<const Node> b;
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;
using Op = Node::Op;

NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

NodePtr make_number(double v) {
    auto n = std::make_shared<Node>();
    n->value = v;
    return n;
}

class Parser {
public:
    explicit Parser(const std::string& s) : s_(s) {}

    NodePtr parse_all() {
        NodePtr n = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected character '" + std::string(1, s_[pos_]) + "'");
        return n;
    }

    bool smooth = true;
    int max_edge = 0;
    bool uses_product = false;

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw Error(ErrorKind::ConfigError, "expression '" + s_ + "': " + msg + " at offset " + std::to_string(pos_));
    }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }

    NodePtr expr() {
        NodePtr n = term();
        for (;;) {
            if (accept('+')) n = make(Op::Add, n, term());
            else if (accept('-')) n = make(Op::Sub, n, term());
            else return n;
        }
    }

    NodePtr term() {
        NodePtr n = unary();
        for (;;) {
            if (accept('*')) n = make(Op::Mul, n, unary());
            else if (accept('/')) n = make(Op::Div, n, unary());
            else return n;
        }
    }

    NodePtr unary() {
        if (accept('-')) return make(Op::Neg, unary());
        if (accept('+')) return unary();
        return power();
    }

    NodePtr power() {
        NodePtr base = primary();
        if (accept('^')) {
            NodePtr exponent = unary();
            note_power(exponent);
            return make(Op::Pow, base, exponent);
        }
        return base;
    }

    void note_power(const NodePtr& exponent) {
        if (exponent->op != Op::Number || exponent->value != std::floor(exponent->value)) smooth = false;
    }

    NodePtr primary() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end of input");
        const char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (accept('(')) {
            NodePtr n = expr();
            expect(')');
            return n;
        }
        if (accept('|')) {
            NodePtr n = expr();
            expect('|');
            smooth = false;
            return make(Op::Abs, n);
        }
        if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
        fail(std::string("unexpected character '") + c + "'");
    }

    NodePtr number() {
        const char* begin = s_.c_str() + pos_;
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin) fail("malformed number");
        pos_ += static_cast<std::size_t>(end - begin);
        return make_number(v);
    }

    NodePtr identifier() {
        const std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
        const std::string name = s_.substr(start, pos_ - start);
        if (name == "x1") return make(Op::X1);
        if (name == "x2") return make(Op::X2);
        if (name == "prod_l") {
            uses_product = true;
            return make(Op::ProdL);
        }
        if (name == "pi") return make_number(std::numbers::pi);
        if (name == "e") return make_number(std::numbers::e);
        if (name.size() >= 2 && name[0] == 'l' &&
            name.find_first_not_of("0123456789", 1) == std::string::npos) {
            auto n = std::make_shared<Node>();
            n->op = Op::Edge;
            n->edge = std::stoi(name.substr(1));
            if (n->edge < 1) fail("edge functions are numbered from l1");
            max_edge = std::max(max_edge, n->edge);
            return n;
        }
        skip();
        if (pos_ >= s_.size() || s_[pos_] != '(') fail("unknown name '" + name + "'");
        ++pos_;
        std::vector<NodePtr> args{expr()};
        while (accept(',')) args.push_back(expr());
        expect(')');
        auto arity = [&](std::size_t k) {
            if (args.size() != k) fail(name + " takes " + std::to_string(k) + " argument(s)");
        };
        if (name == "abs") { arity(1); smooth = false; return make(Op::Abs, args[0]); }
        if (name == "sqrt") { arity(1); smooth = false; return make(Op::Sqrt, args[0]); }
        if (name == "exp") { arity(1); return make(Op::Exp, args[0]); }
        if (name == "log") { arity(1); return make(Op::Log, args[0]); }
        if (name == "pow") { arity(2); note_power(args[1]); return make(Op::Pow, args[0], args[1]); }
        if (name == "min") { arity(2); smooth = false; return make(Op::Min, args[0], args[1]); }
        if (name == "max") { arity(2); smooth = false; return make(Op::Max, args[0], args[1]); }
        fail("unknown function '" + name + "'");
    }

    const std::string& s_;
    std::size_t pos_ = 0;
};

double eval(const Node& n, Point x, const Polygon* polygon) {
    switch (n.op) {
        case Op::Number: return n.value;
        case Op::X1: return x.x;
        case Op::X2: return x.y;
        case Op::Edge: {
            if (polygon == nullptr || static_cast<std::size_t>(n.edge) > polygon->size())
                throw Error(ErrorKind::ConfigError, "expression references l" + std::to_string(n.edge) +
                                                        " but the polygon has fewer edges");
            return polygon->l(static_cast<std::size_t>(n.edge - 1), x);
        }
        case Op::ProdL: {
            if (polygon == nullptr) throw Error(ErrorKind::ConfigError, "prod_l needs a polygon");
            return polygon->product_l(x);
        }
        case Op::Neg: return -eval(*n.a, x, polygon);
        case Op::Add: return eval(*n.a, x, polygon) + eval(*n.b, x, polygon);
        case Op::Sub: return eval(*n.a, x, polygon) - eval(*n.b, x, polygon);
        case Op::Mul: return eval(*n.a, x, polygon) * eval(*n.b, x, polygon);
        case Op::Div: return eval(*n.a, x, polygon) / eval(*n.b, x, polygon);
        case Op::Pow: {
            const double base = eval(*n.a, x, polygon);
            const double ex = eval(*n.b, x, polygon);
            if (ex == 2.0) return base * base;
            return std::pow(base, ex);
        }
        case Op::Abs: return std::abs(eval(*n.a, x, polygon));
        case Op::Sqrt: return std::sqrt(eval(*n.a, x, polygon));
        case Op::Exp: return std::exp(eval(*n.a, x, polygon));
        case Op::Log: return std::log(eval(*n.a, x, polygon));
        case Op::Min: return std::min(eval(*n.a, x, polygon), eval(*n.b, x, polygon));
        case Op::Max: return std::max(eval(*n.a, x, polygon), eval(*n.b, x, polygon));
    }
    return 0.0;
}

}  // namespace

Expression Expression::parse(const std::string& source) {
    Parser parser(source);
    Expression e;
    e.root_ = parser.parse_all();
    e.source_ = source;
    e.smooth_ = parser.smooth;
    e.max_edge_ = parser.max_edge;
    e.uses_product_ = parser.uses_product;
    return e;
}

double Expression::evaluate(Point x, const Polygon* polygon) const { return eval(*root_, x, polygon); }

}  // namespace toricma
