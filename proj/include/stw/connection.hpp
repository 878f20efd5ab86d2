#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stw/expr.hpp"
#include "stw/mat.hpp"
#include "stw/rng.hpp"
#include "stw/symplin.hpp"

namespace stw {

enum class ConnKind { AlphaBeta, RealCoeffs, ConstantA, GeneralGamma };

// Values of the endomorphism-valued coefficient 1-form A(e_i) together with
// its first and second coordinate partials.
struct ConnectionJet {
    int dim = 0;
    int order = 0;
    std::vector<RMat> A;                            // A[i]
    std::vector<std::vector<RMat>> dA;              // dA[k][i] = d_k A_i
    std::vector<std::vector<std::vector<RMat>>> d2A;  // d2A[k][l][i]
};

// A diffeomorphism of R^{2n} given by component expressions; the inverse is
// caller-supplied.
struct Diffeo {
    int n = 0;
    std::vector<Expr> fwd;
    std::vector<Expr> inv;

    RVec apply(const RVec& x) const;
    RVec apply_inv(const RVec& y) const;
    RMat jacobian(const RVec& x) const;
    // directional derivative of the Jacobian along coordinate k
    RMat jacobian_partial(const RVec& x, int k) const;
};

Diffeo identity_diffeo(int n);
Diffeo translation_diffeo(const RVec& v);
Diffeo linear_diffeo(const RMat& s);  // invertible linear map
Diffeo inversion_diffeo();            // z -> 1/z on the punctured plane (n = 1)

// Torsion-free connection nabla = nabla0 + A on R^{2n} in one global chart.
// Symplectic kinds enforce total symmetry of omega(A(X)Y, Z); the
// general-gamma kind may opt out for plain linear connections.
class SymplecticConnection {
public:
    int n = 0;
    ConnKind kind = ConnKind::AlphaBeta;
    bool symplectic = true;
    std::vector<Expr> gamma;  // (2n)^3 exprs, index gidx(k,i,j)
    std::optional<Expr> alpha, beta;  // kept for the n=1 fibre cubic
    std::optional<Expr> domain;       // in-domain iff Re(value) > 0
    std::vector<std::pair<double, double>> box;  // sampling box per coordinate
    std::vector<RMat> constA;                    // ConstantA only

    int dim() const { return 2 * n; }
    size_t gidx(int k, int i, int j) const {
        return (static_cast<size_t>(k) * dim() + i) * dim() + j;
    }

    bool in_domain(const RVec& x) const;
    RVec sample_point(const Rng& rng, uint64_t k) const;

    RMat christoffel(const RVec& x, int i) const;  // A_x(e_i)
    std::vector<RMat> christoffel_all(const RVec& x) const;
    ConnectionJet christoffel_jet(const RVec& x, int order) const;

    // pointwise structural residuals
    double torsion_residual(const RVec& x) const;
    double symplectic_residual(const RVec& x) const;  // total symmetry of lowered A
    double sp_residual(const RVec& x) const;          // Om A + A^T Om per direction
};

SymplecticConnection from_alpha_beta(const Expr& alpha, const Expr& beta,
                                     std::optional<Expr> domain = {});
SymplecticConnection from_real_coeffs(const Expr& a, const Expr& b, const Expr& c, const Expr& d,
                                      std::optional<Expr> domain = {});
SymplecticConnection from_constant_A(const std::vector<RMat>& Ai);
SymplecticConnection from_gamma(int n, std::vector<Expr> gamma, bool symplectic,
                                std::optional<Expr> domain = {});

// (a,b,c,d) -> (alpha, beta) per the real/complex coefficient dictionary, and back.
void abcd_to_alphabeta(double a, double b, double c, double d, cplx& alpha, cplx& beta);
void alphabeta_to_abcd(cplx alpha, cplx beta, double& a, double& b, double& c, double& d);

// Curvature at a point: endomorphisms R(e_i,e_j), the lowered tensor,
// Ricci tensor and its E/W decomposition.
struct CurvatureValue {
    int dim = 0;
    int n = 0;
    std::vector<RMat> R;  // packed i*dim+j
    std::vector<double> lowered;  // dim^4, index ((i*d+j)*d+k)*d+l
    RMat ricci;
    std::vector<double> E, W;

    const RMat& R_at(int i, int j) const { return R[static_cast<size_t>(i) * dim + j]; }
    double low(const std::vector<double>& t, int i, int j, int k, int l) const {
        return t[((static_cast<size_t>(i) * dim + j) * dim + k) * dim + l];
    }
};

CurvatureValue curvature_value(const SymplecticConnection& conn, const RVec& x);
// complex-bilinear extension of R in the two slots
CMat curvature_c(const CurvatureValue& cv, const CVec& X, const CVec& Y);
// Ricci contraction of an arbitrary lowered tensor (same convention as ricci)
RMat ricci_of_lowered(const std::vector<double>& t, int dim);

double max_curvature_norm(const SymplecticConnection& conn, const RVec& x);
double field_eq_residual(const SymplecticConnection& conn, const RVec& x);

// sigma . nabla with coefficients composed symbolically.
SymplecticConnection pullback(const Diffeo& sigma, const SymplecticConnection& conn);

SymplecticConnection preset_connection(const std::string& name);
SymplecticConnection connection_from_json(const std::string& json_text);

}  // namespace stw
