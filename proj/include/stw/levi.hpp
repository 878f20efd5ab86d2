#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stw/expr.hpp"
#include "stw/mat.hpp"
#include "stw/parallel.hpp"
#include "stw/symplin.hpp"

namespace stw {

// Oka's function -log(eps^2 - |x|^2) on the ball of radius eps.
double oka_phi(double eps, const RVec& x);
Expr oka_phi_expr(double eps);  // over base variables (x1, x2)

// squared hyperbolic distance between disk points
double fibre_distance_sq(cplx w, cplx w_ref);

// Levi form of a function of the holomorphic chart (xi, w): the 2x2 Hermitian
// matrix 4 d^2 f / dzeta_i dzetabar_j with eigenvalues and positive count.
struct LeviValue {
    CMat form;
    std::vector<double> eigenvalues;  // ascending
    int positive_count = 0;
    double hermitian_residual = 0.0;
};

// f is an expression over chart variables (x1..x4) = (Re xi, Im xi, Re w, Im w)
LeviValue levi_form(const Expr& f, const RVec& chart_pt, double threshold = 1e-9);

// chart map over the flat twistor space: xi = w zb - z and its inverse
cplx chart_xi(cplx z, cplx w);
cplx chart_z(cplx xi, cplx w);

// Exhaustion data: psi = h + phi o pi by default, or a custom chart function.
struct ExhaustionSpec {
    std::optional<Expr> phi;     // base function of (x1, x2), real-valued
    Expr w_ref;                  // reference section of (x1, x2); default 0
    std::optional<Expr> custom;  // full chart expression in (xi, w), overrides
    // the assembled chart expression in (Re xi, Im xi, Re w, Im w)
    Expr chart_expr() const;
};

ExhaustionSpec default_exhaustion(double oka_eps);  // h + Oka o pi
ExhaustionSpec stein_exhaustion();                  // |xi|^2 + h
ExhaustionSpec custom_exhaustion(const Expr& chart_expr);

// fibre-distance expression h(w) to a reference section, over chart variables
Expr fibre_distance_expr(const Expr& w_ref_base);

struct ScanGrid {
    int base_n = 15;      // base grid is base_n x base_n
    int fibre_n = 12;     // points per fibre
    double wmax = 0.95;
    double base_lo = -0.9, base_hi = 0.9;
};

struct ScanReport {
    int min_positive_count = 0;
    int max_positive_count = 0;
    bool certificate = false;  // min count >= n(n+1)/2 (= 1 here)
    bool stein = false;        // min count >= complex dimension (= 2 here)
    double min_eigenvalue_seen = 0.0;
    double max_psi = 0.0;
    int grid_points = 0;
    std::vector<double> eigenvalues_flat;  // per point, optional verbose payload
};

// scan the Levi form of the exhaustion over a base x fibre grid; grid points
// are independent, evaluated through the parallel driver
ScanReport completeness_scan(const ExhaustionSpec& spec, const ScanGrid& grid,
                             bool keep_eigenvalues = false);

// deterministic fibre grid: golden-angle spiral avoiding the origin
std::vector<cplx> fibre_grid(int count, double wmax);

}  // namespace stw
