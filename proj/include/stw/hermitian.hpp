#pragma once

#include <functional>

#include "stw/twistor.hpp"

namespace stw {

struct MetricParams {
    double t = 1.0;
};

// Representative of a vertical tangent under the adjoint identification
// [Q, Phi] = A, i.e. Q = -A j / 2. The fibre metric, tau and the connection
// shift are all expressed through these representatives; see tau/metric.
RMat fibre_repr(const RMat& a_tangent, const RMat& j);

// <A,B> on vertical tangents = Tr(repr(A) repr(B))/2 = Tr(A B)/8
double vertical_inner(const RMat& a_tangent, const RMat& b_tangent);

double tau(const SymplecticConnection& conn, const TwistorPoint& p, const TwistorTangent& u,
           const TwistorTangent& v);

struct TwistorMetricValue {
    double tau = 0.0;
    double omega = 0.0;
    double inner = 0.0;
};

TwistorMetricValue metric(const SymplecticConnection& conn, const MetricParams& params,
                          const TwistorPoint& p, const TwistorTangent& u, const TwistorTangent& v);

// tangent field on the n=1 chart (x, y, Re w, Im w)
using ChartField = std::function<TwistorTangent(const RVec&)>;

ChartField constant_chart_field(const RVec& comps4);
TwistorPoint chart_point(const RVec& q4);
// chart coordinate velocity of a tangent (base, Re dw, Im dw)
RVec chart_components(const TwistorTangent& u, const RMat& j);

// splitting-preserving connection D = pi* nabla - P on chart tangent fields
TwistorTangent d_derivative(const SymplecticConnection& conn, const RVec& q4,
                            const TwistorTangent& u, const ChartField& w, double h = 1e-5);

// residual of D Phi = 0 at a tangent
double dphi_residual(const SymplecticConnection& conn, const TwistorPoint& p,
                     const TwistorTangent& u);

// torsion of D on constant extensions of u, v
TwistorTangent d_torsion(const SymplecticConnection& conn, const RVec& q4,
                         const TwistorTangent& u, const TwistorTangent& v, double h = 1e-5);

// Levi-Civita connection of the twistor metric, assembled from D, the
// representative shift, the curvature term and the S tensor solves.
TwistorTangent levi_civita(const SymplecticConnection& conn, const MetricParams& params,
                           const RVec& q4, const TwistorTangent& u, const ChartField& w,
                           double h = 1e-5);

// |FD exterior derivative of tau - curvature trace formula| on constant fields
double dtau_residual(const SymplecticConnection& conn, const RVec& q4, const TwistorTangent& u,
                     const TwistorTangent& v, const TwistorTangent& w, double h = 1e-5);

// the displayed vertical second-fundamental-form endomorphism
RMat S_v(const MetricParams& params, const RMat& j, const RVec& x_vec, const RVec& y_vec);

// sectional curvature of the plane spanned by the orthonormal pair
// {X + A, Y + B}; X, Y base vectors, A, B vertical tangents.
double sectional_curvature(const MetricParams& params, const RMat& j, const RVec& X, const RVec& Y,
                           const RMat& A, const RMat& B);

struct ClosednessReport {
    double max_domega = 0.0;
    double max_curvature = 0.0;
    int samples = 0;
};

ClosednessReport closedness_check(const SymplecticConnection& conn, const MetricParams& params,
                                  int samples, uint64_t seed, double h = 1e-4);

// curvature of D as an endomorphism-valued 2-form on tangents
CMat rd_curvature(const SymplecticConnection& conn, const TwistorPoint& p, const TwistorTangent& u,
                  const TwistorTangent& v);
// norm of the (0,2) component of R^D at a tangent pair
double rd_type02_residual(const SymplecticConnection& conn, const TwistorPoint& p,
                          const TwistorTangent& u, const TwistorTangent& v);

// holomorphic-vector-field criterion: D_X Y + J D_{JX} Y - 2 (PY) pi_* X,
// evaluated on a complex field given by real and imaginary parts
double holo_vector_residual(const SymplecticConnection& conn, const RVec& q4,
                            const TwistorTangent& x, const ChartField& y_re,
                            const ChartField& y_im, double h = 1e-5);

}  // namespace stw
