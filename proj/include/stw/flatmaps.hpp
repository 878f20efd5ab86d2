#pragma once

#include <vector>

#include "stw/connection.hpp"
#include "stw/expr.hpp"
#include "stw/mat.hpp"

namespace stw {

// Pointwise invertible matrix of coefficient fields g : R^{2n} -> GL(2n).
struct FrameMap {
    int dim = 0;
    std::vector<Expr> entries;  // row-major, dim*dim
    bool symplectic_claimed = false;

    RMat value(const RVec& x) const;
    RMat partial(const RVec& x, int k) const;
};

FrameMap frame_from_exprs(int dim, std::vector<Expr> entries);
FrameMap identity_frame(int dim);

// Constant sp-valued 1-form A with matrices A_i = A(e_i); A(x) = sum x_i A_i.
struct ConstantOneForm {
    std::vector<RMat> A;  // 2n matrices

    int dim() const { return static_cast<int>(A.size()); }
    RMat at(const RVec& x) const;  // A(x)
    double sp_residual() const;
    double total_symmetry_residual() const;
};

ConstantOneForm one_form_from_abcd(double a, double b, double c, double d);

// max-norm of A_x(e_i) - (g dg^{-1})_x(e_i) over coordinate directions.
double frame_flat_residual(const SymplecticConnection& conn, const FrameMap& g, const RVec& x);

// ||g(sigma(x)) - Jac sigma(x)||
double jacobian_equation_residual(const Diffeo& sigma, const FrameMap& g, const RVec& x);

// max over (j,alpha,beta) of d_i g_{j alpha} g_{i beta} - d_k g_{j beta} g_{k alpha}
double schwarz_residual(const FrameMap& g, const RVec& x);

struct TiFlatClass {
    bool on_curve = false;
    bool excluded_point = false;
};

// Projective classification of constant (a,b,c,d) coefficient forms against
// the curve bc - ad = 0, b^2 - ac = 0, with excluded point [0:0:1:0].
TiFlatClass ti_flat_classify(double a, double b, double c, double d);

// sigma(x) = x - A(x) x / 2 for a flat translation-invariant symplectic form;
// refuses when A(X)A(Y) != 0.
Diffeo ti_flat_sigma(const ConstantOneForm& A);

// matrix exponential by scaling-and-squaring; exact 1 - B for nilpotent B
RMat expm(const RMat& b);

// frame map x -> exp(-A(x)) for a constant one-form
FrameMap exp_frame(const ConstantOneForm& A);

// points of the twisted-cubic parameterization [1 : t : t^2 : t^3] plus the
// limit [0:0:0:1]; these are exactly the flat translation-invariant forms.
std::vector<std::array<double, 4>> flat_curve_samples(int count, const Rng& rng);

}  // namespace stw
