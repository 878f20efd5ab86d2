#pragma once

#include <optional>
#include <vector>

#include "stw/expr.hpp"
#include "stw/mat.hpp"

namespace stw {

using RVec = std::vector<double>;
using CVec = std::vector<cplx>;

// Basis order is (dx1, dy1, ..., dxn, dyn) throughout; omega = sum dx^i ^ dy^i.
RMat omega_matrix(int n);

double omega(const RMat& Om, const RVec& u, const RVec& v);
cplx omega_c(const RMat& Om, const CVec& u, const CVec& v);

RVec basis_vec(int dim, int k);

// Compatible complex structure with positive-definite omega(., j.).
struct CompatJ {
    int n = 0;
    RMat j;
    std::optional<CMat> W;  // Siegel coordinate, symmetric n x n
};

struct CompatResiduals {
    double square;      // ||j^2 + Id||
    double symplectic;  // ||j^T Om j - Om||
    double min_metric_eig;
};

CompatResiduals compat_residuals(const RMat& j);
// Throws with a labelled message when j is not a compatible positive structure.
void require_compat(const RMat& j);

struct SiegelResult {
    bool inside = false;
    double margin = 0.0;  // smallest eigenvalue of 1 - W W*
};

// Membership in the Siegel disk model: 1 - W W* > 0 for symmetric W.
SiegelResult siegel_membership(const CMat& W, double asym_tol = 1e-12);

CompatJ fibre_to_matrix(const CMat& W);
CompatJ fibre_to_matrix(cplx w);  // n = 1

CMat matrix_to_fibre(const RMat& j);
cplx matrix_to_fibre_w(const RMat& j);  // n = 1 closed form

// j+ = (1 - i j)/2, j- = (1 + i j)/2.
std::pair<CMat, CMat> type_projections(const RMat& j);

// Orthonormal basis of {A in sp(2n): Aj = -jA} for <A,B> = Tr(AB)/2.
std::vector<RMat> vertical_basis(const RMat& j);

// n = 1 fibre chart: j(w) with first and second derivatives in (u, v) = (Re w, Im w).
struct FibreChart {
    RMat j;
    RMat dj[2];      // d/du, d/dv
    RMat d2j[2][2];  // second derivatives (order >= 2)
    int order = 0;
};

FibreChart fibre_chart(cplx w, int order);

// Linear coordinate functionals of the n = 1 disk coordinate at j:
// dw(V) and dwbar(V) for a (possibly complex) vertical matrix V.
cplx dw_of(const RMat& j, const CMat& V);
cplx dwbar_of(const RMat& j, const CMat& V);

}  // namespace stw
