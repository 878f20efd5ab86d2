#pragma once

#include <complex>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "stw/mat.hpp"

namespace stw {

class ExprError : public std::runtime_error {
public:
    size_t pos;  // 1-based source offset, 0 when synthetic
    ExprError(const std::string& msg, size_t p = 0) : std::runtime_error(msg), pos(p) {}
};

enum class Fn { Sin, Cos, Exp, Log, Sqrt, Conj, Abs2, Atanh2q };

// Jet of a complex-valued function of nv real variables: value, first and
// (optionally) second partials with respect to the real coordinates.
struct Jet {
    int nv = 0;
    int order = 0;
    cplx v{};
    std::vector<cplx> d;    // nv entries when order >= 1
    std::vector<cplx> dd;   // nv*nv entries (full symmetric) when order >= 2

    Jet() = default;
    Jet(int n, int ord) : nv(n), order(ord), v(0.0) {
        if (order >= 1) d.assign(n, cplx{});
        if (order >= 2) dd.assign(static_cast<size_t>(n) * n, cplx{});
    }
    cplx d2(int k, int l) const { return dd[static_cast<size_t>(k) * nv + l]; }
    cplx& d2(int k, int l) { return dd[static_cast<size_t>(k) * nv + l]; }
};

// Wirtinger combinations; variable pairs are (x_k, y_k) = (2k, 2k+1).
cplx wirt_dz(const Jet& j, int k);
cplx wirt_dzb(const Jet& j, int k);
cplx wirt_dzdz(const Jet& j, int k, int l);
cplx wirt_dzdzb(const Jet& j, int k, int l);   // dz_k dzb_l
cplx wirt_dzbdzb(const Jet& j, int k, int l);

struct ExprNode;
using NodeP = std::shared_ptr<const ExprNode>;

// Immutable expression tree over real variables x1..x_nv with complex
// constants. Evaluation is pure; instances are safe to share across threads.
class Expr {
public:
    Expr() = default;

    int nvars() const { return nvars_; }
    bool empty() const { return !root_; }

    Jet eval(const double* p, int order) const;
    Jet eval(const std::vector<double>& p, int order) const { return eval(p.data(), order); }
    cplx value(const std::vector<double>& p) const { return eval(p.data(), 0).v; }

    Expr diff(int var) const;                     // symbolic partial d/dx_var
    Expr subst(const std::vector<Expr>& repl) const;  // x_k -> repl[k]
    std::string str() const;

    static Expr number(cplx c, int nvars);
    static Expr variable(int k, int nvars);
    static Expr apply(Fn f, const Expr& a);
    Expr pow(int k) const;

    friend Expr operator+(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a, const Expr& b);
    friend Expr operator*(const Expr& a, const Expr& b);
    friend Expr operator/(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a);

private:
    NodeP root_;
    int nvars_ = 0;
    Expr(NodeP r, int nv) : root_(std::move(r)), nvars_(nv) {}
    friend class Parser;
    friend struct ExprOps;
};

// Named identifier table for a parse context.
struct ParseContext {
    std::vector<std::pair<std::string, Expr>> idents;
    int nvars = 0;
};

// Base coordinates x1..x_{2n}; for n = 1 also x, y, z, zb.
ParseContext base_context(int n);
// Twistor chart (z, zb, w, wb) over x1..x4.
ParseContext twistor_context();
// Holomorphic chart (xi, xib, w, wb) over x1..x4.
ParseContext chart_context();

Expr parse_expr(const std::string& text, int n);
Expr parse_expr_ctx(const std::string& text, const ParseContext& ctx);

}  // namespace stw
