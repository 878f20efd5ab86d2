#include "stw/levi.hpp"

#include <cmath>

namespace stw {

double oka_phi(double eps, const RVec& x) {
    double r2 = 0;
    for (double c : x) r2 += c * c;
    double arg = eps * eps - r2;
    if (arg <= 0.0) throw std::runtime_error("oka_phi: point outside the ball");
    return -std::log(arg);
}

Expr oka_phi_expr(double eps) {
    Expr x = Expr::variable(0, 2), y = Expr::variable(1, 2);
    Expr arg = Expr::number(eps * eps, 2) - (x * x + y * y);
    return -Expr::apply(Fn::Log, arg);
}

double fibre_distance_sq(cplx w, cplx w_ref) {
    if (std::abs(w) >= 1.0 || std::abs(w_ref) >= 1.0)
        throw std::runtime_error("fibre_distance_sq: point outside the disk");
    double r = std::abs(w - w_ref) / std::abs(1.0 - std::conj(w_ref) * w);
    double a = std::atanh(r);
    return a * a;
}

LeviValue levi_form(const Expr& f, const RVec& chart_pt, double threshold) {
    Jet j = f.eval(chart_pt, 2);
    LeviValue out;
    out.form = CMat(2, 2);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) out.form(a, b) = 4.0 * wirt_dzdzb(j, a, b);
    CMat herm = 0.5 * (out.form + conj_transpose(out.form));
    out.hermitian_residual = (out.form - conj_transpose(out.form)).frob();
    out.eigenvalues = hermitian_eigenvalues(herm);
    double scale = herm.max_abs();
    if (scale > 0.0) {
        for (double ev : out.eigenvalues)
            if (ev / scale > threshold) ++out.positive_count;
    }
    return out;
}

cplx chart_xi(cplx z, cplx w) { return w * std::conj(z) - z; }

cplx chart_z(cplx xi, cplx w) {
    double d = 1.0 - std::norm(w);
    return -(xi + w * std::conj(xi)) / d;
}

namespace {

// z as a complex expression of the chart variables (Re xi, Im xi, Re w, Im w)
Expr chart_z_expr() {
    ParseContext ctx = chart_context();
    Expr xi = parse_expr_ctx("xi", ctx);
    Expr xib = parse_expr_ctx("xib", ctx);
    Expr w = parse_expr_ctx("w", ctx);
    Expr one = Expr::number(1.0, 4);
    Expr den = one - parse_expr_ctx("abs2(w)", ctx);
    return -(xi + w * xib) / den;
}

std::vector<Expr> chart_z_components() {
    Expr ez = chart_z_expr();
    Expr half = Expr::number(0.5, 4);
    Expr mi_half = Expr::number(cplx(0, -0.5), 4);
    Expr zre = half * (ez + Expr::apply(Fn::Conj, ez));
    Expr zim = mi_half * (ez - Expr::apply(Fn::Conj, ez));
    return {zre, zim};
}

}  // namespace

Expr fibre_distance_expr(const Expr& w_ref_base) {
    ParseContext ctx = chart_context();
    Expr w = parse_expr_ctx("w", ctx);
    auto zc = chart_z_components();
    Expr wr = w_ref_base.subst(zc);
    Expr num = Expr::apply(Fn::Abs2, w - wr);
    Expr den = Expr::apply(Fn::Abs2, Expr::number(1.0, 4) - Expr::apply(Fn::Conj, wr) * w);
    return Expr::apply(Fn::Atanh2q, num / den);
}

Expr ExhaustionSpec::chart_expr() const {
    if (custom) return *custom;
    Expr h = fibre_distance_expr(w_ref);
    if (phi) {
        auto zc = chart_z_components();
        return h + phi->subst(zc);
    }
    return h;
}

ExhaustionSpec default_exhaustion(double oka_eps) {
    ExhaustionSpec s;
    s.phi = oka_phi_expr(oka_eps);
    s.w_ref = Expr::number(0.0, 2);
    return s;
}

ExhaustionSpec stein_exhaustion() {
    ExhaustionSpec s;
    s.w_ref = Expr::number(0.0, 2);
    ParseContext ctx = chart_context();
    s.custom = parse_expr_ctx("abs2(xi)", ctx) + fibre_distance_expr(Expr::number(0.0, 2));
    return s;
}

ExhaustionSpec custom_exhaustion(const Expr& chart_expr) {
    ExhaustionSpec s;
    s.w_ref = Expr::number(0.0, 2);
    s.custom = chart_expr;
    return s;
}

std::vector<cplx> fibre_grid(int count, double wmax) {
    std::vector<cplx> out;
    const double golden = 2.399963229728653;
    for (int k = 0; k < count; ++k) {
        double r = wmax * std::sqrt((k + 0.5) / count);
        out.push_back(std::polar(r, golden * k));
    }
    return out;
}

ScanReport completeness_scan(const ExhaustionSpec& spec, const ScanGrid& grid,
                             bool keep_eigenvalues) {
    Expr psi = spec.chart_expr();
    std::vector<cplx> fibres = fibre_grid(grid.fibre_n, grid.wmax);
    const int total = grid.base_n * grid.base_n * grid.fibre_n;

    struct PointResult {
        int count = -1;
        double min_eig = 0.0;
        double psi_val = 0.0;
        double e0 = 0.0, e1 = 0.0;
        std::string error;
    };
    std::vector<PointResult> results(total);

    run_for(total, [&](int idx) {
        int f = idx % grid.fibre_n;
        int rem = idx / grid.fibre_n;
        int iy = rem % grid.base_n;
        int ix = rem / grid.base_n;
        double fx = grid.base_n > 1 ? ix / double(grid.base_n - 1) : 0.5;
        double fy = grid.base_n > 1 ? iy / double(grid.base_n - 1) : 0.5;
        cplx z(grid.base_lo + (grid.base_hi - grid.base_lo) * fx,
               grid.base_lo + (grid.base_hi - grid.base_lo) * fy);
        cplx w = fibres[f];
        cplx xi = chart_xi(z, w);
        RVec q = {xi.real(), xi.imag(), w.real(), w.imag()};
        PointResult& r = results[idx];
        try {
            Jet jv = psi.eval(q, 0);
            if (std::abs(jv.v.imag()) > 1e-9) {
                r.error = "grid point outside the domain (non-real value)";
                return;
            }
            LeviValue lv = levi_form(psi, q);
            r.count = lv.positive_count;
            r.min_eig = lv.eigenvalues.front();
            r.psi_val = jv.v.real();
            r.e0 = lv.eigenvalues[0];
            r.e1 = lv.eigenvalues[1];
        } catch (const ExprError& e) {
            r.error = e.what();
        }
    });

    ScanReport rep;
    rep.min_positive_count = 3;
    rep.max_positive_count = 0;
    rep.min_eigenvalue_seen = 1e300;
    for (const auto& r : results) {
        if (!r.error.empty()) throw std::runtime_error("completeness_scan: " + r.error);
        rep.min_positive_count = std::min(rep.min_positive_count, r.count);
        rep.max_positive_count = std::max(rep.max_positive_count, r.count);
        rep.min_eigenvalue_seen = std::min(rep.min_eigenvalue_seen, r.min_eig);
        rep.max_psi = std::max(rep.max_psi, r.psi_val);
        ++rep.grid_points;
        if (keep_eigenvalues) {
            rep.eigenvalues_flat.push_back(r.e0);
            rep.eigenvalues_flat.push_back(r.e1);
        }
    }
    rep.certificate = rep.min_positive_count >= 1;
    rep.stein = rep.min_positive_count >= 2;
    return rep;
}

}  // namespace stw
