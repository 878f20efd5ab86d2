#include "stw/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>

namespace stw {

struct ExprNode {
    enum class Kind { Num, Var, Add, Sub, Mul, Div, Pow, Neg, Func };
    Kind kind;
    cplx num{};
    int var = -1;
    int ipow = 0;
    Fn fn{};
    NodeP lhs, rhs;
    size_t pos = 0;
};

namespace {

NodeP mknum(cplx c, size_t pos = 0) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Num;
    n->num = c;
    n->pos = pos;
    return n;
}

NodeP mkvar(int k, size_t pos = 0) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Var;
    n->var = k;
    n->pos = pos;
    return n;
}

bool is_num(const NodeP& n, cplx c) {
    return n->kind == ExprNode::Kind::Num && n->num == c;
}

NodeP mkbin(ExprNode::Kind k, NodeP a, NodeP b, size_t pos = 0) {
    using K = ExprNode::Kind;
    if (a->kind == K::Num && b->kind == K::Num) {
        switch (k) {
            case K::Add: return mknum(a->num + b->num, pos);
            case K::Sub: return mknum(a->num - b->num, pos);
            case K::Mul: return mknum(a->num * b->num, pos);
            default: break;  // keep Div for domain reporting
        }
    }
    if (k == K::Add) {
        if (is_num(a, 0.0)) return b;
        if (is_num(b, 0.0)) return a;
    }
    if (k == K::Sub && is_num(b, 0.0)) return a;
    if (k == K::Mul) {
        if (is_num(a, 0.0) || is_num(b, 0.0)) return mknum(0.0, pos);
        if (is_num(a, 1.0)) return b;
        if (is_num(b, 1.0)) return a;
    }
    if (k == K::Div && is_num(a, 0.0) && !is_num(b, 0.0)) return mknum(0.0, pos);
    auto n = std::make_shared<ExprNode>();
    n->kind = k;
    n->lhs = std::move(a);
    n->rhs = std::move(b);
    n->pos = pos;
    return n;
}

NodeP mkneg(NodeP a, size_t pos = 0) {
    if (a->kind == ExprNode::Kind::Num) return mknum(-a->num, pos);
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Neg;
    n->lhs = std::move(a);
    n->pos = pos;
    return n;
}

NodeP mkpow(NodeP a, int k, size_t pos = 0) {
    if (k == 1) return a;
    if (k == 0) return mknum(1.0, pos);
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Pow;
    n->lhs = std::move(a);
    n->ipow = k;
    n->pos = pos;
    return n;
}

NodeP mkfn(Fn f, NodeP a, size_t pos = 0) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Func;
    n->fn = f;
    n->lhs = std::move(a);
    n->pos = pos;
    return n;
}

std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string fmt_cplx(cplx c) {
    if (c.imag() == 0.0) {
        if (c.real() < 0.0) return "(" + fmt_double(c.real()) + ")";
        return fmt_double(c.real());
    }
    if (c.real() == 0.0) {
        if (c.imag() == 1.0) return "i";
        return "(" + fmt_double(c.imag()) + "*i)";
    }
    return "(" + fmt_double(c.real()) + "+" + fmt_double(c.imag()) + "*i)";
}

const char* fn_name(Fn f) {
    switch (f) {
        case Fn::Sin: return "sin";
        case Fn::Cos: return "cos";
        case Fn::Exp: return "exp";
        case Fn::Log: return "log";
        case Fn::Sqrt: return "sqrt";
        case Fn::Conj: return "conj";
        case Fn::Abs2: return "abs2";
        case Fn::Atanh2q: return "atanh2q";
    }
    return "?";
}

void print_node(const NodeP& n, std::string& out, int parent_prec);

int prec_of(const NodeP& n) {
    using K = ExprNode::Kind;
    switch (n->kind) {
        case K::Add: case K::Sub: return 1;
        case K::Mul: case K::Div: return 2;
        case K::Neg: return 1;
        case K::Pow: return 3;
        default: return 4;
    }
}

void print_node(const NodeP& n, std::string& out, int parent_prec) {
    using K = ExprNode::Kind;
    int prec = prec_of(n);
    bool paren = prec < parent_prec;
    if (paren) out += "(";
    switch (n->kind) {
        case K::Num: out += fmt_cplx(n->num); break;
        case K::Var: out += "x" + std::to_string(n->var + 1); break;
        case K::Add:
            print_node(n->lhs, out, prec);
            out += "+";
            print_node(n->rhs, out, prec);
            break;
        case K::Sub:
            print_node(n->lhs, out, prec);
            out += "-";
            print_node(n->rhs, out, prec + 1);
            break;
        case K::Mul:
            print_node(n->lhs, out, prec);
            out += "*";
            print_node(n->rhs, out, prec);
            break;
        case K::Div:
            print_node(n->lhs, out, prec);
            out += "/";
            print_node(n->rhs, out, prec + 1);
            break;
        case K::Neg:
            out += "-";
            print_node(n->lhs, out, prec + 1);
            break;
        case K::Pow:
            print_node(n->lhs, out, prec + 1);
            out += "^";
            if (n->ipow < 0) out += "(" + std::to_string(n->ipow) + ")";
            else out += std::to_string(n->ipow);
            break;
        case K::Func:
            out += fn_name(n->fn);
            out += "(";
            print_node(n->lhs, out, 0);
            out += ")";
            break;
    }
    if (paren) out += ")";
}

std::string node_str(const NodeP& n) {
    std::string s;
    print_node(n, s, 0);
    return s;
}

[[noreturn]] void domain_error(const std::string& what, const NodeP& n) {
    throw ExprError("domain error: " + what + " in subexpression '" + node_str(n) + "'", n->pos);
}

// ---- jet arithmetic ----

Jet jconst(cplx c, int nv, int ord) {
    Jet j(nv, ord);
    j.v = c;
    return j;
}

Jet jadd(const Jet& a, const Jet& b) {
    Jet r = a;
    r.v += b.v;
    for (int k = 0; k < r.nv && r.order >= 1; ++k) r.d[k] += b.d[k];
    for (size_t k = 0; k < r.dd.size(); ++k) r.dd[k] += b.dd[k];
    return r;
}

Jet jsub(const Jet& a, const Jet& b) {
    Jet r = a;
    r.v -= b.v;
    for (int k = 0; k < r.nv && r.order >= 1; ++k) r.d[k] -= b.d[k];
    for (size_t k = 0; k < r.dd.size(); ++k) r.dd[k] -= b.dd[k];
    return r;
}

Jet jneg(const Jet& a) {
    Jet r = a;
    r.v = -r.v;
    for (auto& x : r.d) x = -x;
    for (auto& x : r.dd) x = -x;
    return r;
}

Jet jmul(const Jet& a, const Jet& b) {
    Jet r(a.nv, a.order);
    r.v = a.v * b.v;
    if (r.order >= 1)
        for (int k = 0; k < r.nv; ++k) r.d[k] = a.d[k] * b.v + a.v * b.d[k];
    if (r.order >= 2)
        for (int k = 0; k < r.nv; ++k)
            for (int l = 0; l < r.nv; ++l)
                r.d2(k, l) = a.d2(k, l) * b.v + a.d[k] * b.d[l] + a.d[l] * b.d[k] + a.v * b.d2(k, l);
    return r;
}

Jet jdiv(const Jet& a, const Jet& b, const NodeP& site) {
    if (std::abs(b.v) < 1e-300) domain_error("division by zero", site);
    Jet r(a.nv, a.order);
    r.v = a.v / b.v;
    if (r.order >= 1)
        for (int k = 0; k < r.nv; ++k) r.d[k] = (a.d[k] - r.v * b.d[k]) / b.v;
    if (r.order >= 2)
        for (int k = 0; k < r.nv; ++k)
            for (int l = 0; l < r.nv; ++l)
                r.d2(k, l) = (a.d2(k, l) - r.d[k] * b.d[l] - r.d[l] * b.d[k] - r.v * b.d2(k, l)) / b.v;
    return r;
}

Jet jconj(const Jet& a) {
    Jet r = a;
    r.v = std::conj(r.v);
    for (auto& x : r.d) x = std::conj(x);
    for (auto& x : r.dd) x = std::conj(x);
    return r;
}

// chain rule for f with derivatives f', f'' at a.v
Jet jchain(const Jet& a, cplx f0, cplx f1, cplx f2) {
    Jet r(a.nv, a.order);
    r.v = f0;
    if (r.order >= 1)
        for (int k = 0; k < r.nv; ++k) r.d[k] = f1 * a.d[k];
    if (r.order >= 2)
        for (int k = 0; k < r.nv; ++k)
            for (int l = 0; l < r.nv; ++l) r.d2(k, l) = f2 * a.d[k] * a.d[l] + f1 * a.d2(k, l);
    return r;
}

// atanh(sqrt(s))^2, smooth across s = 0; series below the cutoff.
void atanh2q_derivs(cplx s, cplx& f0, cplx& f1, cplx& f2, const NodeP& site) {
    if (std::abs(cplx(1.0) - s) < 1e-14) domain_error("atanh2q at s = 1", site);
    if (std::abs(s) < 1e-3) {
        // atanh(x)^2 = s + 2/3 s^2 + 23/45 s^3 + 44/105 s^4 + 563/1575 s^5, s = x^2
        const double c2 = 2.0 / 3.0, c3 = 23.0 / 45.0, c4 = 44.0 / 105.0, c5 = 563.0 / 1575.0;
        f0 = s * (1.0 + s * (c2 + s * (c3 + s * (c4 + s * c5))));
        f1 = 1.0 + s * (2.0 * c2 + s * (3.0 * c3 + s * (4.0 * c4 + s * (5.0 * c5))));
        f2 = 2.0 * c2 + s * (6.0 * c3 + s * (12.0 * c4 + s * (20.0 * c5)));
        return;
    }
    cplx rt = std::sqrt(s);
    cplx at = std::atanh(rt);
    cplx om = cplx(1.0) - s;
    f0 = at * at;
    f1 = at / (rt * om);
    f2 = 0.5 / (s * om * om) + at * (-0.5 / (rt * s * om) + 1.0 / (rt * om * om));
}

Jet jfunc(Fn f, const Jet& a, const NodeP& site) {
    switch (f) {
        case Fn::Sin: return jchain(a, std::sin(a.v), std::cos(a.v), -std::sin(a.v));
        case Fn::Cos: return jchain(a, std::cos(a.v), -std::sin(a.v), -std::cos(a.v));
        case Fn::Exp: {
            cplx e = std::exp(a.v);
            return jchain(a, e, e, e);
        }
        case Fn::Log: {
            if (std::abs(a.v) < 1e-300) domain_error("log of zero", site);
            cplx inv = 1.0 / a.v;
            return jchain(a, std::log(a.v), inv, -inv * inv);
        }
        case Fn::Sqrt: {
            if (a.order >= 1 && std::abs(a.v) < 1e-300)
                domain_error("sqrt derivative at zero", site);
            cplx s = std::sqrt(a.v);
            if (a.order == 0) return jchain(a, s, 0.0, 0.0);
            cplx f1 = 0.5 / s;
            return jchain(a, s, f1, -0.5 * f1 / a.v);
        }
        case Fn::Conj: return jconj(a);
        case Fn::Abs2: return jmul(a, jconj(a));
        case Fn::Atanh2q: {
            cplx f0, f1, f2;
            atanh2q_derivs(a.v, f0, f1, f2, site);
            return jchain(a, f0, f1, f2);
        }
    }
    throw ExprError("unhandled function");
}

Jet eval_node(const NodeP& n, const double* p, int nv, int ord) {
    using K = ExprNode::Kind;
    switch (n->kind) {
        case K::Num: return jconst(n->num, nv, ord);
        case K::Var: {
            Jet j(nv, ord);
            j.v = p[n->var];
            if (ord >= 1) j.d[n->var] = 1.0;
            return j;
        }
        case K::Add: return jadd(eval_node(n->lhs, p, nv, ord), eval_node(n->rhs, p, nv, ord));
        case K::Sub: return jsub(eval_node(n->lhs, p, nv, ord), eval_node(n->rhs, p, nv, ord));
        case K::Mul: return jmul(eval_node(n->lhs, p, nv, ord), eval_node(n->rhs, p, nv, ord));
        case K::Div: return jdiv(eval_node(n->lhs, p, nv, ord), eval_node(n->rhs, p, nv, ord), n);
        case K::Neg: return jneg(eval_node(n->lhs, p, nv, ord));
        case K::Pow: {
            Jet base = eval_node(n->lhs, p, nv, ord);
            int k = n->ipow;
            bool invert = k < 0;
            if (invert) k = -k;
            Jet acc = jconst(1.0, nv, ord);
            for (int t = 0; t < k; ++t) acc = jmul(acc, base);
            if (invert) return jdiv(jconst(1.0, nv, ord), acc, n);
            return acc;
        }
        case K::Func: return jfunc(n->fn, eval_node(n->lhs, p, nv, ord), n);
    }
    throw ExprError("unhandled node");
}

NodeP diff_node(const NodeP& n, int var);

NodeP diff_node(const NodeP& n, int var) {
    using K = ExprNode::Kind;
    switch (n->kind) {
        case K::Num: return mknum(0.0);
        case K::Var: return mknum(n->var == var ? 1.0 : 0.0);
        case K::Add: return mkbin(K::Add, diff_node(n->lhs, var), diff_node(n->rhs, var));
        case K::Sub: return mkbin(K::Sub, diff_node(n->lhs, var), diff_node(n->rhs, var));
        case K::Mul:
            return mkbin(K::Add, mkbin(K::Mul, diff_node(n->lhs, var), n->rhs),
                         mkbin(K::Mul, n->lhs, diff_node(n->rhs, var)));
        case K::Div:
            // (a/b)' = a'/b - a b'/b^2
            return mkbin(K::Sub, mkbin(K::Div, diff_node(n->lhs, var), n->rhs),
                         mkbin(K::Div, mkbin(K::Mul, n->lhs, diff_node(n->rhs, var)),
                               mkpow(n->rhs, 2)));
        case K::Neg: return mkneg(diff_node(n->lhs, var));
        case K::Pow:
            return mkbin(K::Mul, mknum(static_cast<double>(n->ipow)),
                         mkbin(K::Mul, mkpow(n->lhs, n->ipow - 1), diff_node(n->lhs, var)));
        case K::Func: {
            NodeP da = diff_node(n->lhs, var);
            switch (n->fn) {
                case Fn::Sin: return mkbin(K::Mul, mkfn(Fn::Cos, n->lhs), da);
                case Fn::Cos: return mkneg(mkbin(K::Mul, mkfn(Fn::Sin, n->lhs), da));
                case Fn::Exp: return mkbin(K::Mul, mkfn(Fn::Exp, n->lhs), da);
                case Fn::Log: return mkbin(K::Div, da, n->lhs);
                case Fn::Sqrt:
                    return mkbin(K::Div, da, mkbin(K::Mul, mknum(2.0), mkfn(Fn::Sqrt, n->lhs)));
                case Fn::Conj: return mkfn(Fn::Conj, da);
                case Fn::Abs2:
                    return mkbin(K::Add, mkbin(K::Mul, da, mkfn(Fn::Conj, n->lhs)),
                                 mkbin(K::Mul, n->lhs, mkfn(Fn::Conj, da)));
                case Fn::Atanh2q:
                    throw ExprError("symbolic derivative of atanh2q is not supported");
            }
        }
    }
    throw ExprError("unhandled node in diff");
}

NodeP subst_node(const NodeP& n, const std::vector<NodeP>& roots) {
    using K = ExprNode::Kind;
    switch (n->kind) {
        case K::Num: return n;
        case K::Var:
            if (n->var < static_cast<int>(roots.size()) && roots[n->var]) return roots[n->var];
            throw ExprError("substitution missing variable x" + std::to_string(n->var + 1));
        case K::Add: case K::Sub: case K::Mul: case K::Div:
            return mkbin(n->kind, subst_node(n->lhs, roots), subst_node(n->rhs, roots), n->pos);
        case K::Neg: return mkneg(subst_node(n->lhs, roots), n->pos);
        case K::Pow: return mkpow(subst_node(n->lhs, roots), n->ipow, n->pos);
        case K::Func: return mkfn(n->fn, subst_node(n->lhs, roots), n->pos);
    }
    throw ExprError("unhandled node in subst");
}

}  // namespace

cplx wirt_dz(const Jet& j, int k) { return 0.5 * (j.d[2 * k] - cplx(0, 1) * j.d[2 * k + 1]); }
cplx wirt_dzb(const Jet& j, int k) { return 0.5 * (j.d[2 * k] + cplx(0, 1) * j.d[2 * k + 1]); }

cplx wirt_dzdz(const Jet& j, int k, int l) {
    const cplx I(0, 1);
    return 0.25 * (j.d2(2 * k, 2 * l) - I * j.d2(2 * k, 2 * l + 1) - I * j.d2(2 * k + 1, 2 * l) -
                   j.d2(2 * k + 1, 2 * l + 1));
}

cplx wirt_dzdzb(const Jet& j, int k, int l) {
    const cplx I(0, 1);
    return 0.25 * (j.d2(2 * k, 2 * l) + I * j.d2(2 * k, 2 * l + 1) - I * j.d2(2 * k + 1, 2 * l) +
                   j.d2(2 * k + 1, 2 * l + 1));
}

cplx wirt_dzbdzb(const Jet& j, int k, int l) {
    const cplx I(0, 1);
    return 0.25 * (j.d2(2 * k, 2 * l) + I * j.d2(2 * k, 2 * l + 1) + I * j.d2(2 * k + 1, 2 * l) -
                   j.d2(2 * k + 1, 2 * l + 1));
}

Jet Expr::eval(const double* p, int order) const {
    if (!root_) throw ExprError("empty expression");
    return eval_node(root_, p, nvars_, order);
}

Expr Expr::diff(int var) const { return Expr(diff_node(root_, var), nvars_); }

Expr Expr::subst(const std::vector<Expr>& repl) const {
    std::vector<NodeP> roots;
    int nv = 0;
    for (const auto& e : repl) {
        roots.push_back(e.root_);
        if (e.root_) nv = std::max(nv, e.nvars_);
    }
    return Expr(subst_node(root_, roots), nv);
}

std::string Expr::str() const { return root_ ? node_str(root_) : std::string(); }

Expr Expr::number(cplx c, int nvars) { return Expr(mknum(c), nvars); }
Expr Expr::variable(int k, int nvars) { return Expr(mkvar(k), nvars); }
Expr Expr::apply(Fn f, const Expr& a) { return Expr(mkfn(f, a.root_), a.nvars_); }
Expr Expr::pow(int k) const { return Expr(mkpow(root_, k), nvars_); }

Expr operator+(const Expr& a, const Expr& b) {
    return Expr(mkbin(ExprNode::Kind::Add, a.root_, b.root_), std::max(a.nvars_, b.nvars_));
}
Expr operator-(const Expr& a, const Expr& b) {
    return Expr(mkbin(ExprNode::Kind::Sub, a.root_, b.root_), std::max(a.nvars_, b.nvars_));
}
Expr operator*(const Expr& a, const Expr& b) {
    return Expr(mkbin(ExprNode::Kind::Mul, a.root_, b.root_), std::max(a.nvars_, b.nvars_));
}
Expr operator/(const Expr& a, const Expr& b) {
    return Expr(mkbin(ExprNode::Kind::Div, a.root_, b.root_), std::max(a.nvars_, b.nvars_));
}
Expr operator-(const Expr& a) { return Expr(mkneg(a.root_), a.nvars_); }

// ---- parser ----

class Parser {
public:
    Parser(const std::string& s, const ParseContext& ctx) : s_(s), ctx_(ctx) {}

    Expr run() {
        NodeP e = parse_sum();
        skip_ws();
        if (i_ < s_.size()) fail("unexpected character");
        return Expr(e, ctx_.nvars);
    }

private:
    const std::string& s_;
    const ParseContext& ctx_;
    size_t i_ = 0;

    [[noreturn]] void fail(const std::string& msg) {
        throw ExprError("syntax error at offset " + std::to_string(i_ + 1) + ": " + msg, i_ + 1);
    }

    void skip_ws() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    }

    bool peek(char c) {
        skip_ws();
        return i_ < s_.size() && s_[i_] == c;
    }

    bool accept(char c) {
        if (peek(c)) { ++i_; return true; }
        return false;
    }

    NodeP parse_sum() {
        skip_ws();
        bool neg = false;
        if (accept('-')) neg = true;
        else accept('+');
        NodeP e = parse_term();
        if (neg) e = mkneg(e, i_);
        for (;;) {
            if (accept('+')) e = mkbin(ExprNode::Kind::Add, e, parse_term(), i_);
            else if (accept('-')) e = mkbin(ExprNode::Kind::Sub, e, parse_term(), i_);
            else break;
        }
        return e;
    }

    NodeP parse_term() {
        NodeP e = parse_factor();
        for (;;) {
            if (accept('*')) e = mkbin(ExprNode::Kind::Mul, e, parse_factor(), i_);
            else if (accept('/')) e = mkbin(ExprNode::Kind::Div, e, parse_factor(), i_);
            else break;
        }
        return e;
    }

    NodeP parse_factor() {
        NodeP a = parse_atom();
        if (accept('^')) {
            skip_ws();
            bool neg = false;
            if (accept('-')) neg = true;
            if (accept('(')) {
                skip_ws();
                if (i_ < s_.size() && s_[i_] == '-') { neg = !neg; ++i_; }
                int k = parse_int();
                if (!accept(')')) fail("expected ')' after exponent");
                return mkpow(a, neg ? -k : k, i_);
            }
            int k = parse_int();
            return mkpow(a, neg ? -k : k, i_);
        }
        return a;
    }

    int parse_int() {
        skip_ws();
        size_t start = i_;
        while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
        if (i_ == start) fail("expected integer exponent");
        return std::stoi(s_.substr(start, i_ - start));
    }

    NodeP parse_atom() {
        skip_ws();
        if (i_ >= s_.size()) fail("unexpected end of input");
        size_t pos1 = i_ + 1;
        char c = s_[i_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (c == '(') {
            ++i_;
            NodeP e = parse_sum();
            if (!accept(')')) fail("expected ')'");
            return e;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            size_t start = i_;
            while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])))) ++i_;
            std::string name = s_.substr(start, i_ - start);
            if (name == "i") return mknum(cplx(0, 1), pos1);
            static const std::map<std::string, Fn> fns = {
                {"sin", Fn::Sin}, {"cos", Fn::Cos}, {"exp", Fn::Exp},  {"log", Fn::Log},
                {"sqrt", Fn::Sqrt}, {"conj", Fn::Conj}, {"abs2", Fn::Abs2}};
            auto fit = fns.find(name);
            if (fit != fns.end()) {
                if (!accept('(')) fail("expected '(' after function " + name);
                NodeP arg = parse_sum();
                skip_ws();
                if (peek(',')) {
                    throw ExprError("arity mismatch: function " + name + " takes one argument",
                                    i_ + 1);
                }
                if (!accept(')')) fail("expected ')'");
                return mkfn(fit->second, arg, pos1);
            }
            for (const auto& [id, expr] : ctx_.idents)
                if (id == name) return node_of(expr);
            throw ExprError("unknown identifier '" + name + "' at offset " + std::to_string(pos1),
                            pos1);
        }
        fail("unexpected character");
    }

    static NodeP node_of(const Expr& e);

    NodeP parse_number() {
        size_t start = i_;
        while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
        if (i_ < s_.size() && s_[i_] == '.') {
            ++i_;
            while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
        }
        if (i_ < s_.size() && (s_[i_] == 'e' || s_[i_] == 'E')) {
            size_t save = i_;
            ++i_;
            if (i_ < s_.size() && (s_[i_] == '+' || s_[i_] == '-')) ++i_;
            if (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) {
                while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
            } else {
                i_ = save;
            }
        }
        if (i_ == start) fail("expected number");
        return mknum(std::stod(s_.substr(start, i_ - start)), start + 1);
    }
};

struct ExprOps {
    static NodeP root(const Expr& e) { return e.root_; }
    static Expr make(NodeP n, int nv) { return Expr(std::move(n), nv); }
};

NodeP Parser::node_of(const Expr& e) { return ExprOps::root(e); }

ParseContext base_context(int n) {
    if (n < 1 || 2 * n > 9) throw ExprError("dimension n out of range (1..4)");
    ParseContext ctx;
    ctx.nvars = 2 * n;
    for (int k = 0; k < 2 * n; ++k)
        ctx.idents.emplace_back("x" + std::to_string(k + 1), Expr::variable(k, ctx.nvars));
    if (n == 1) {
        Expr x = Expr::variable(0, 2), y = Expr::variable(1, 2);
        Expr iu = Expr::number(cplx(0, 1), 2);
        ctx.idents.emplace_back("x", x);
        ctx.idents.emplace_back("y", y);
        ctx.idents.emplace_back("z", x + iu * y);
        ctx.idents.emplace_back("zb", x - iu * y);
    }
    return ctx;
}

static ParseContext four_var_context(const char* a, const char* ab) {
    ParseContext ctx;
    ctx.nvars = 4;
    for (int k = 0; k < 4; ++k)
        ctx.idents.emplace_back("x" + std::to_string(k + 1), Expr::variable(k, 4));
    Expr iu = Expr::number(cplx(0, 1), 4);
    Expr p = Expr::variable(0, 4), q = Expr::variable(1, 4);
    Expr u = Expr::variable(2, 4), v = Expr::variable(3, 4);
    ctx.idents.emplace_back(a, p + iu * q);
    ctx.idents.emplace_back(ab, p - iu * q);
    ctx.idents.emplace_back("w", u + iu * v);
    ctx.idents.emplace_back("wb", u - iu * v);
    return ctx;
}

ParseContext twistor_context() { return four_var_context("z", "zb"); }
ParseContext chart_context() { return four_var_context("xi", "xib"); }

Expr parse_expr(const std::string& text, int n) {
    ParseContext ctx = base_context(n);
    return Parser(text, ctx).run();
}

Expr parse_expr_ctx(const std::string& text, const ParseContext& ctx) {
    return Parser(text, ctx).run();
}

}  // namespace stw
