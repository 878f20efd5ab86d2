#include "stw/twistor.hpp"

#include <cmath>

namespace stw {

namespace {

const cplx I(0, 1);

CMat complex_dir_A(const std::vector<RMat>& A, const CVec& v) {
    const int d = static_cast<int>(A.size());
    CMat out(d, d);
    for (int i = 0; i < d; ++i) {
        if (v[i] == cplx{}) continue;
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) out(r, c) += v[i] * A[i](r, c);
    }
    return out;
}

}  // namespace

TwistorPoint twistor_point(const RVec& x, cplx w) { return {x, fibre_to_matrix(w)}; }
TwistorPoint twistor_point(const RVec& x, const CMat& W) { return {x, fibre_to_matrix(W)}; }

double tangent_norm(const TwistorTangent& u) {
    double s = 0;
    for (double v : u.base) s += v * v;
    return std::sqrt(s + u.vert.frob() * u.vert.frob());
}

TwistorTangent tangent_sub(const TwistorTangent& a, const TwistorTangent& b) {
    TwistorTangent r = a;
    for (size_t i = 0; i < r.base.size(); ++i) r.base[i] -= b.base[i];
    r.vert -= b.vert;
    return r;
}

TwistorTangent horizontal_lift(const SymplecticConnection& conn, const TwistorPoint& p,
                               const RVec& X) {
    auto A = conn.christoffel_all(p.x);
    const int d = conn.dim();
    RMat ax(d, d);
    for (int i = 0; i < d; ++i) ax += X[i] * A[i];
    return {X, -commutator(ax, p.j.j)};
}

RMat vertical_part(const SymplecticConnection& conn, const TwistorPoint& p,
                   const TwistorTangent& u) {
    auto A = conn.christoffel_all(p.x);
    const int d = conn.dim();
    RMat ax(d, d);
    for (int i = 0; i < d; ++i) ax += u.base[i] * A[i];
    return u.vert + commutator(ax, p.j.j);
}

namespace {

TwistorTangent acs_impl(const SymplecticConnection& conn, const TwistorPoint& p,
                        const TwistorTangent& u, double vert_sign) {
    const RMat& j = p.j.j;
    RVec jx = j.apply(u.base);
    RMat pv = vertical_part(conn, p, u);
    TwistorTangent lift = horizontal_lift(conn, p, jx);
    lift.vert += vert_sign * (j * pv);
    return lift;
}

}  // namespace

TwistorTangent acs_apply(const SymplecticConnection& conn, const TwistorPoint& p,
                         const TwistorTangent& u) {
    return acs_impl(conn, p, u, 1.0);
}

TwistorTangent acs_apply_companion(const SymplecticConnection& conn, const TwistorPoint& p,
                                   const TwistorTangent& u) {
    return acs_impl(conn, p, u, -1.0);
}

RMat acs_chart_matrix(const SymplecticConnection& conn, const RVec& x, cplx w, bool companion) {
    FibreChart fc = fibre_chart(w, 1);
    TwistorPoint p{x, CompatJ{1, fc.j, CMat(1, 1)}};
    (*p.j.W)(0, 0) = w;
    RMat out(4, 4);
    for (int a = 0; a < 4; ++a) {
        TwistorTangent u;
        u.base = RVec(2, 0.0);
        u.vert = RMat(2, 2);
        if (a < 2)
            u.base[a] = 1.0;
        else
            u.vert = fc.dj[a - 2];
        TwistorTangent r = companion ? acs_apply_companion(conn, p, u) : acs_apply(conn, p, u);
        cplx dw = dw_of(fc.j, complexify(r.vert));
        out(0, a) = r.base[0];
        out(1, a) = r.base[1];
        out(2, a) = dw.real();
        out(3, a) = dw.imag();
    }
    return out;
}

cplx cubic_P(const SymplecticConnection& conn, cplx z, cplx w) {
    if (!conn.alpha || !conn.beta)
        throw std::runtime_error("cubic_P: connection has no (alpha, beta) coefficients");
    if (std::abs(w) > 1.0 + 1e-12) throw std::runtime_error("cubic_P: |w| > 1");
    RVec p = {z.real(), z.imag()};
    cplx a = conn.alpha->value(p);
    cplx b = conn.beta->value(p);
    return -std::conj(b) + 3.0 * std::conj(a) * w - 3.0 * a * w * w + b * w * w * w;
}

namespace {

CMat lift_drift(const SymplecticConnection& conn, cplx z, cplx w, const RMat& j) {
    auto A = conn.christoffel_all({z.real(), z.imag()});
    // A(dzb + w dz) with dz = (e_x - i e_y)/2, dzb = (e_x + i e_y)/2
    CVec dir = {0.5 * (1.0 + w), 0.5 * I * (1.0 - w)};
    CMat av = complex_dir_A(A, dir);
    return -commutator(av, complexify(j));
}

}  // namespace

cplx cubic_P_oracle(const SymplecticConnection& conn, cplx z, cplx w) {
    if (std::abs(w) >= 1.0) throw std::runtime_error("cubic_P_oracle: |w| >= 1");
    RMat j = fibre_chart(w, 0).j;
    return dw_of(j, lift_drift(conn, z, w, j));
}

cplx fibre_drift_Q(const SymplecticConnection& conn, cplx z, cplx w) {
    RMat j = fibre_chart(w, 0).j;
    return dwbar_of(j, lift_drift(conn, z, w, j));
}

double integrability_residual_eq4(const SymplecticConnection& conn, const TwistorPoint& p,
                                  const RVec& X, const RVec& Y) {
    const int d = conn.dim();
    auto [jp, jm] = type_projections(p.j.j);
    CVec xc(d), yc(d);
    for (int i = 0; i < d; ++i) {
        xc[i] = X[i];
        yc[i] = Y[i];
    }
    CVec xm = jm.apply(xc), ym = jm.apply(yc);
    CurvatureValue cv = curvature_value(conn, p.x);
    CMat r = curvature_c(cv, xm, ym);
    double res = (jp * r * jm).frob();
    // torsion term, identically zero for torsion-free coefficients but evaluated
    auto A = conn.christoffel_all(p.x);
    CVec t1 = complex_dir_A(A, xm).apply(ym);
    CVec t2 = complex_dir_A(A, ym).apply(xm);
    CVec t(d);
    for (int i = 0; i < d; ++i) t[i] = t1[i] - t2[i];
    CVec tp = jp.apply(t);
    double tn = 0;
    for (const auto& v : tp) tn += std::norm(v);
    return std::max(res, std::sqrt(tn));
}

double nijenhuis_residual(const SymplecticConnection& conn, const RVec& x, cplx w, const RVec& u4,
                          const RVec& v4, double h, bool companion) {
    if (std::abs(w) > 0.97)
        throw std::runtime_error("nijenhuis_residual: bracket stencil leaves the fibre chart");
    auto jmat = [&](const RVec& q) {
        return acs_chart_matrix(conn, {q[0], q[1]}, cplx(q[2], q[3]), companion);
    };
    RVec q0 = {x[0], x[1], w.real(), w.imag()};
    auto dir_deriv = [&](const std::function<RVec(const RVec&)>& field, const RVec& dir) {
        RVec hi = q0, lo = q0;
        for (int i = 0; i < 4; ++i) {
            hi[i] += h * dir[i];
            lo[i] -= h * dir[i];
        }
        RVec a = field(hi), b = field(lo);
        RVec r(4);
        for (int i = 0; i < 4; ++i) r[i] = (a[i] - b[i]) / (2 * h);
        return r;
    };
    auto Ffield = [&](const RVec& q) { return jmat(q).apply(u4); };
    auto Gfield = [&](const RVec& q) { return jmat(q).apply(v4); };
    RMat j0 = jmat(q0);
    RVec F0 = j0.apply(u4), G0 = j0.apply(v4);
    // N(U,V) = [JU,JV] - J[JU,V] - J[U,JV] for constant chart vectors U, V
    RVec dFG = dir_deriv(Gfield, F0);
    RVec dGF = dir_deriv(Ffield, G0);
    RVec dVF = dir_deriv(Ffield, v4);
    RVec dUG = dir_deriv(Gfield, u4);
    RVec jdVF = j0.apply(dVF), jdUG = j0.apply(dUG);
    double s = 0;
    for (int i = 0; i < 4; ++i) {
        double c = dFG[i] - dGF[i] + jdVF[i] - jdUG[i];
        s += c * c;
    }
    return std::sqrt(s);
}

namespace {

double holo_residual_impl(const CubicFn& P, const Expr& f, cplx z, cplx w) {
    if (std::abs(w) >= 1.0) throw std::runtime_error("holo_function_residual: |w| >= 1");
    RVec q = {z.real(), z.imag(), w.real(), w.imag()};
    Jet j = f.eval(q, 1);
    cplx r1 = wirt_dzb(j, 1);  // df/dwb
    cplx r2 = wirt_dzb(j, 0) + w * wirt_dz(j, 0) + P(z, w) * wirt_dz(j, 1);
    return std::max(std::abs(r1), std::abs(r2));
}

}  // namespace

double holo_function_residual(const SymplecticConnection& conn, const Expr& f, cplx z, cplx w) {
    return holo_residual_impl([&](cplx zz, cplx ww) { return cubic_P(conn, zz, ww); }, f, z, w);
}

double holo_function_residual(const CubicFn& P, const Expr& f, cplx z, cplx w) {
    return holo_residual_impl(P, f, z, w);
}

double holo_section_residual(const SymplecticConnection& conn, const Expr& w_of_z, cplx z) {
    RVec p = {z.real(), z.imag()};
    Jet j = w_of_z.eval(p, 1);
    cplx w0 = j.v;
    if (std::abs(w0) >= 1.0)
        throw std::runtime_error("holo_section_residual: section leaves the Siegel disk");
    return std::abs(wirt_dzb(j, 0) + w0 * wirt_dz(j, 0) - cubic_P(conn, z, w0));
}

SigmaLift sigma_lift(const Diffeo& sigma, const TwistorPoint& p) {
    RMat S = sigma.jacobian(p.x);
    RMat Si = inverse(S);  // throws on singular Jacobian
    SigmaLift out;
    out.p.x = sigma.apply(p.x);
    out.p.j.n = p.j.n;
    out.p.j.j = S * p.j.j * Si;
    require_compat(out.p.j.j);
    if (p.j.n == 1) {
        out.w1 = matrix_to_fibre_w(out.p.j.j);
        out.p.j.W = CMat(1, 1);
        (*out.p.j.W)(0, 0) = out.w1;
    } else {
        out.p.j.W = matrix_to_fibre(out.p.j.j);
    }
    return out;
}

AcsWitness acs_injectivity_witness(const SymplecticConnection& a, const SymplecticConnection& b,
                                   int budget, uint64_t seed) {
    Rng rng(seed);
    const int d = a.dim();
    AcsWitness out;
    for (int k = 0; k < budget; ++k) {
        RVec x = a.sample_point(rng, k);
        if (x.empty() || !b.in_domain(x)) continue;
        cplx w = rng.disk(k, 0.9, 3);
        TwistorPoint p = (d == 2) ? twistor_point(x, w) : twistor_point(x, CMat(d / 2, d / 2));
        TwistorTangent u;
        u.base.resize(d);
        for (int i = 0; i < d; ++i) u.base[i] = rng.uniform(k, -1, 1, 40 + i);
        auto basis = vertical_basis(p.j.j);
        u.vert = RMat(d, d);
        for (size_t i = 0; i < basis.size(); ++i)
            u.vert += rng.uniform(k, -1, 1, 60 + static_cast<int>(i)) * basis[i];
        TwistorTangent ja = acs_apply(a, p, u);
        TwistorTangent jb = acs_apply(b, p, u);
        double gap = tangent_norm(tangent_sub(ja, jb));
        if (gap > 1e-8) {
            out.found = true;
            out.x = x;
            out.w = w;
            out.u = u;
            out.gap = gap;
            return out;
        }
    }
    return out;
}

}  // namespace stw
