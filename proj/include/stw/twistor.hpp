#pragma once

#include <functional>

#include "stw/connection.hpp"
#include "stw/symplin.hpp"

namespace stw {

struct TwistorPoint {
    RVec x;
    CompatJ j;
};

TwistorPoint twistor_point(const RVec& x, cplx w);        // n = 1
TwistorPoint twistor_point(const RVec& x, const CMat& W);  // general n

// Tangent to the twistor space in chart form: base direction plus a vertical
// matrix anchored at the fibre point.
struct TwistorTangent {
    RVec base;
    RMat vert;
};

double tangent_norm(const TwistorTangent& u);
TwistorTangent tangent_sub(const TwistorTangent& a, const TwistorTangent& b);

// Horizontal lift of a base direction; the vertical part is -[A(X), j].
TwistorTangent horizontal_lift(const SymplecticConnection& conn, const TwistorPoint& p,
                               const RVec& X);

// Vertical projection with kernel the horizontal space: V + [A(X), j].
RMat vertical_part(const SymplecticConnection& conn, const TwistorPoint& p,
                   const TwistorTangent& u);

TwistorTangent acs_apply(const SymplecticConnection& conn, const TwistorPoint& p,
                         const TwistorTangent& u);
// the never-integrable companion (J^h, -J^v), kept as a negative control
TwistorTangent acs_apply_companion(const SymplecticConnection& conn, const TwistorPoint& p,
                                   const TwistorTangent& u);

// n = 1 chart representation of the structure as a real 4x4 matrix in
// coordinates (x, y, Re w, Im w).
RMat acs_chart_matrix(const SymplecticConnection& conn, const RVec& x, cplx w,
                      bool companion = false);

// fibre drift of the (0,1) horizontal field: closed-form cubic in w
cplx cubic_P(const SymplecticConnection& conn, cplx z, cplx w);
// independent route: w-coordinate of the algebraic lift along dzb + w dz
cplx cubic_P_oracle(const SymplecticConnection& conn, cplx z, cplx w);
// wbar-component of the same lift (no closed form asserted)
cplx fibre_drift_Q(const SymplecticConnection& conn, cplx z, cplx w);

// max norm of j+ T(j-X, j-Y) and j+ R(j-X, j-Y) j- for base directions X, Y
double integrability_residual_eq4(const SymplecticConnection& conn, const TwistorPoint& p,
                                  const RVec& X, const RVec& Y);

// finite-difference Nijenhuis tensor of the chart structure on constant fields
double nijenhuis_residual(const SymplecticConnection& conn, const RVec& x, cplx w,
                          const RVec& u4, const RVec& v4, double h = 1e-4,
                          bool companion = false);

using CubicFn = std::function<cplx(cplx, cplx)>;

// residuals of the holomorphic-function system for f(z, zb, w, wb)
double holo_function_residual(const SymplecticConnection& conn, const Expr& f, cplx z, cplx w);
double holo_function_residual(const CubicFn& P, const Expr& f, cplx z, cplx w);

// section z -> (z, w(z)): residual of the holomorphic-section equation
double holo_section_residual(const SymplecticConnection& conn, const Expr& w_of_z, cplx z);

struct SigmaLift {
    TwistorPoint p;
    cplx w1 = 0.0;  // n = 1 pushed coordinate
};

// Sigma(j) = dsigma . j . dsigma^{-1} over sigma
SigmaLift sigma_lift(const Diffeo& sigma, const TwistorPoint& p);

struct AcsWitness {
    bool found = false;
    RVec x;
    cplx w;
    TwistorTangent u;
    double gap = 0.0;
};

// search for a tangent where the two induced structures differ
AcsWitness acs_injectivity_witness(const SymplecticConnection& a, const SymplecticConnection& b,
                                   int budget, uint64_t seed);

}  // namespace stw
