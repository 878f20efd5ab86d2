#include "stw/hermitian.hpp"

#include <cmath>

namespace stw {

RMat fibre_repr(const RMat& a_tangent, const RMat& j) { return -0.5 * (a_tangent * j); }

double vertical_inner(const RMat& a_tangent, const RMat& b_tangent) {
    return 0.125 * (a_tangent * b_tangent).trace();
}

double tau(const SymplecticConnection& conn, const TwistorPoint& p, const TwistorTangent& u,
           const TwistorTangent& v) {
    RMat pu = fibre_repr(vertical_part(conn, p, u), p.j.j);
    RMat pv = fibre_repr(vertical_part(conn, p, v), p.j.j);
    return 0.5 * (pu * p.j.j * pv).trace();
}

TwistorMetricValue metric(const SymplecticConnection& conn, const MetricParams& params,
                          const TwistorPoint& p, const TwistorTangent& u,
                          const TwistorTangent& v) {
    RMat Om = omega_matrix(conn.n);
    TwistorMetricValue out;
    out.tau = tau(conn, p, u, v);
    out.omega = params.t * omega(Om, u.base, v.base) - out.tau;
    RMat pu = fibre_repr(vertical_part(conn, p, u), p.j.j);
    RMat pv = fibre_repr(vertical_part(conn, p, v), p.j.j);
    out.inner = params.t * omega(Om, u.base, p.j.j.apply(v.base)) + 0.5 * (pu * pv).trace();
    return out;
}

TwistorPoint chart_point(const RVec& q4) {
    return twistor_point({q4[0], q4[1]}, cplx(q4[2], q4[3]));
}

ChartField constant_chart_field(const RVec& comps4) {
    return [comps4](const RVec& q4) {
        FibreChart fc = fibre_chart(cplx(q4[2], q4[3]), 1);
        TwistorTangent t;
        t.base = {comps4[0], comps4[1]};
        t.vert = comps4[2] * fc.dj[0] + comps4[3] * fc.dj[1];
        return t;
    };
}

RVec chart_components(const TwistorTangent& u, const RMat& j) {
    cplx dw = dw_of(j, complexify(u.vert));
    return {u.base[0], u.base[1], dw.real(), dw.imag()};
}

namespace {

struct DContext {
    TwistorPoint p;
    std::vector<RMat> A;
    RMat ax;      // A(X_u)
    RMat q_shift;  // repr of the vertical projection of u
    RVec qdot;    // chart velocity of u
};

DContext d_context(const SymplecticConnection& conn, const RVec& q4, const TwistorTangent& u) {
    DContext c;
    c.p = chart_point(q4);
    c.A = conn.christoffel_all(c.p.x);
    c.ax = RMat(2, 2);
    for (int i = 0; i < 2; ++i) c.ax += u.base[i] * c.A[i];
    c.q_shift = fibre_repr(u.vert + commutator(c.ax, c.p.j.j), c.p.j.j);
    c.qdot = chart_components(u, c.p.j.j);
    return c;
}

TwistorTangent field_at(const ChartField& w, const RVec& q4) { return w(q4); }

}  // namespace

TwistorTangent d_derivative(const SymplecticConnection& conn, const RVec& q4,
                            const TwistorTangent& u, const ChartField& w, double h) {
    if (conn.n != 1) throw std::runtime_error("d_derivative: n = 1 chart only");
    DContext c = d_context(conn, q4, u);

    RVec hi = q4, lo = q4;
    for (int i = 0; i < 4; ++i) {
        hi[i] += h * c.qdot[i];
        lo[i] -= h * c.qdot[i];
    }
    TwistorTangent whi = field_at(w, hi), wlo = field_at(w, lo);
    TwistorTangent w0 = field_at(w, q4);

    // E-part: s = base components; D_u s = u(s) + A(X_u) s - Q s
    RVec ds(2);
    for (int i = 0; i < 2; ++i) ds[i] = (whi.base[i] - wlo.base[i]) / (2 * h);
    RVec as = c.ax.apply(w0.base);
    RVec qs = c.q_shift.apply(w0.base);
    RVec e_part(2);
    for (int i = 0; i < 2; ++i) e_part[i] = ds[i] + as[i] - qs[i];

    // V-part: the vertical projection as a section of End
    auto proj = [&](const TwistorTangent& t, const RVec& at) {
        TwistorPoint pp = chart_point(at);
        return vertical_part(conn, pp, t);
    };
    RMat pw0 = proj(w0, q4);
    RMat dpw = (proj(whi, hi) - proj(wlo, lo)) * (1.0 / (2 * h));
    RMat v_part = dpw + commutator(c.ax, pw0) - commutator(c.q_shift, pw0);

    TwistorTangent lift = horizontal_lift(conn, c.p, e_part);
    lift.vert += v_part;
    return lift;
}

double dphi_residual(const SymplecticConnection& conn, const TwistorPoint& p,
                     const TwistorTangent& u) {
    RMat pl = vertical_part(conn, p, u);
    RMat q = fibre_repr(pl, p.j.j);
    // (pi* nabla)_u Phi - [Q, Phi]
    return (pl - commutator(q, p.j.j)).frob();
}

TwistorTangent d_torsion(const SymplecticConnection& conn, const RVec& q4, const TwistorTangent& u,
                         const TwistorTangent& v, double h) {
    TwistorPoint p = chart_point(q4);
    ChartField uf = constant_chart_field(chart_components(u, p.j.j));
    ChartField vf = constant_chart_field(chart_components(v, p.j.j));
    TwistorTangent duv = d_derivative(conn, q4, u, vf, h);
    TwistorTangent dvu = d_derivative(conn, q4, v, uf, h);
    return tangent_sub(duv, dvu);
}

namespace {

// S-tensor solves against the implemented metric
RMat solve_sv(const SymplecticConnection& conn, const MetricParams& params, const TwistorPoint& p,
              const RVec& xu, const RVec& xw) {
    auto basis = vertical_basis(p.j.j);
    RMat Om = omega_matrix(conn.n);
    const int m = static_cast<int>(basis.size());
    RMat gram(m, m);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) gram(a, b) = vertical_inner(basis[a], basis[b]);
    RVec rhs(m);
    for (int a = 0; a < m; ++a) {
        RMat q = fibre_repr(basis[a], p.j.j);
        rhs[a] = params.t * omega(Om, q.apply(xu), p.j.j.apply(xw));
    }
    RVec coef = solve(gram, rhs);
    RMat out(conn.dim(), conn.dim());
    for (int a = 0; a < m; ++a) out += coef[a] * basis[a];
    return out;
}

RVec solve_sh(const SymplecticConnection& conn, const MetricParams& params, const TwistorPoint& p,
              const CurvatureValue& cv, const RVec& xvec, const RMat& b_tangent) {
    const int d = conn.dim();
    RMat Om = omega_matrix(conn.n);
    RMat gram(d, d);
    for (int a = 0; a < d; ++a)
        for (int c = 0; c < d; ++c)
            gram(a, c) = params.t * omega(Om, basis_vec(d, a), p.j.j.apply(basis_vec(d, c)));
    RVec rhs(d);
    for (int a = 0; a < d; ++a) {
        // R(xvec, e_a) by bilinearity
        RMat r(d, d);
        for (int i = 0; i < d; ++i)
            if (xvec[i] != 0.0) r += xvec[i] * cv.R_at(i, a);
        RMat rv = commutator(r, p.j.j);
        rhs[a] = 0.5 * vertical_inner(rv, b_tangent);
    }
    return solve(gram, rhs);
}

}  // namespace

TwistorTangent levi_civita(const SymplecticConnection& conn, const MetricParams& params,
                           const RVec& q4, const TwistorTangent& u, const ChartField& w,
                           double h) {
    TwistorTangent base = d_derivative(conn, q4, u, w, h);
    TwistorPoint p = chart_point(q4);
    TwistorTangent w0 = w(q4);
    const int d = conn.dim();
    CurvatureValue cv = curvature_value(conn, p.x);

    RMat pw = vertical_part(conn, p, w0);
    RMat pu = vertical_part(conn, p, u);
    RMat qw = fibre_repr(pw, p.j.j);

    // horizontal additions: -Q_W pi_* u + S^h(X_u, P w) + S^h(X_w, P u)
    RVec e_add = qw.apply(u.base);
    for (double& v : e_add) v = -v;
    RVec sh1 = solve_sh(conn, params, p, cv, u.base, pw);
    RVec sh2 = solve_sh(conn, params, p, cv, w0.base, pu);
    for (int i = 0; i < d; ++i) e_add[i] += sh1[i] + sh2[i];

    // vertical additions: -1/2 [R(X_u, X_w), j] + Sv(X_u, X_w)
    RMat r(d, d);
    for (int i = 0; i < d; ++i)
        for (int k = 0; k < d; ++k)
            if (u.base[i] != 0.0 && w0.base[k] != 0.0) r += (u.base[i] * w0.base[k]) * cv.R_at(i, k);
    RMat v_add = -0.5 * commutator(r, p.j.j) + solve_sv(conn, params, p, u.base, w0.base);

    TwistorTangent lift = horizontal_lift(conn, p, e_add);
    TwistorTangent out = base;
    for (int i = 0; i < d; ++i) out.base[i] += lift.base[i];
    out.vert += lift.vert + v_add;
    return out;
}

double dtau_residual(const SymplecticConnection& conn, const RVec& q4, const TwistorTangent& u,
                     const TwistorTangent& v, const TwistorTangent& w, double h) {
    TwistorPoint p = chart_point(q4);
    RVec cu = chart_components(u, p.j.j);
    RVec cv_ = chart_components(v, p.j.j);
    RVec cw = chart_components(w, p.j.j);
    ChartField fu = constant_chart_field(cu);
    ChartField fv = constant_chart_field(cv_);
    ChartField fw = constant_chart_field(cw);

    auto tau_at = [&](const ChartField& a, const ChartField& b, const RVec& q) {
        TwistorPoint pp = chart_point(q);
        return tau(conn, pp, a(q), b(q));
    };
    auto dir_fd = [&](const ChartField& a, const ChartField& b, const RVec& dir) {
        RVec hi = q4, lo = q4;
        for (int i = 0; i < 4; ++i) {
            hi[i] += h * dir[i];
            lo[i] -= h * dir[i];
        }
        return (tau_at(a, b, hi) - tau_at(a, b, lo)) / (2 * h);
    };
    double lhs = dir_fd(fv, fw, cu) - dir_fd(fu, fw, cv_) + dir_fd(fu, fv, cw);

    CurvatureValue cval = curvature_value(conn, p.x);
    auto rmat = [&](const RVec& a, const RVec& b) {
        RMat r(2, 2);
        for (int i = 0; i < 2; ++i)
            for (int k = 0; k < 2; ++k) r += (a[i] * b[k]) * cval.R_at(i, k);
        return r;
    };
    RMat plu = vertical_part(conn, p, u);
    RMat plv = vertical_part(conn, p, v);
    RMat plw = vertical_part(conn, p, w);
    double rhs = -0.25 * ((rmat(u.base, v.base) * plw).trace() + (rmat(v.base, w.base) * plu).trace() +
                          (rmat(w.base, u.base) * plv).trace());
    return std::abs(lhs - rhs);
}

RMat S_v(const MetricParams& params, const RMat& j, const RVec& x_vec, const RVec& y_vec) {
    const int d = j.rows();
    RMat Om = omega_matrix(d / 2);
    RVec jx = j.apply(x_vec), jy = j.apply(y_vec);
    RMat out(d, d);
    auto rank1 = [&](const RVec& u, const RVec& cov_src) {
        // u (x) omega(cov_src, .)
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) out(r, c) += u[r] * omega(Om, cov_src, basis_vec(d, c));
    };
    rank1(jy, x_vec);
    rank1(x_vec, jy);
    rank1(y_vec, jx);
    rank1(jx, y_vec);
    out *= -0.5 * params.t;
    return out;
}

double sectional_curvature(const MetricParams& params, const RMat& j, const RVec& X, const RVec& Y,
                           const RMat& A, const RMat& B) {
    const int d = j.rows();
    RMat Om = omega_matrix(d / 2);
    auto hin = [&](const RVec& u, const RVec& v) { return params.t * omega(Om, u, j.apply(v)); };
    auto full = [&](const RVec& u, const RMat& a, const RVec& v, const RMat& b) {
        return hin(u, v) + vertical_inner(a, b);
    };
    double n1 = full(X, A, X, A), n2 = full(Y, B, Y, B), cross = full(X, A, Y, B);
    if (std::abs(n1 - 1.0) > 1e-9 || std::abs(n2 - 1.0) > 1e-9 || std::abs(cross) > 1e-9)
        throw std::runtime_error("sectional_curvature: basis not orthonormal");

    RMat ar = fibre_repr(A, j), br = fibre_repr(B, j);
    double om_xy = omega(Om, X, Y);
    double k = 0.5 * (hin(X, X) * hin(Y, Y) + 3.0 * params.t * params.t * om_xy * om_xy -
                      hin(X, Y) * hin(X, Y));
    RVec bx = br.apply(X), ay = ar.apply(Y);
    RVec diff(d);
    for (int i = 0; i < d; ++i) diff[i] = bx[i] - ay[i];
    // the mixed term enters negatively; an independent Riemann-tensor check of
    // the metric fixes this sign (the term vanishes on purely horizontal or
    // purely vertical planes, where the classical values hold)
    k -= hin(diff, diff);
    RMat comm = commutator(ar, br);
    k += 2.0 * hin(comm.apply(X), Y);
    k -= -0.5 * (comm * comm).trace();
    return k;
}

ClosednessReport closedness_check(const SymplecticConnection& conn, const MetricParams& params,
                                  int samples, uint64_t seed, double h) {
    if (conn.n != 1) throw std::runtime_error("closedness_check: n = 1 chart only");
    Rng rng(seed);
    ClosednessReport rep;
    for (int k = 0; k < samples; ++k) {
        RVec x = conn.sample_point(rng, k);
        if (x.empty()) continue;
        cplx w = rng.disk(k, 0.8, 5);
        RVec q4 = {x[0], x[1], w.real(), w.imag()};
        RVec cu(4), cv(4), cw(4);
        for (int i = 0; i < 4; ++i) {
            cu[i] = rng.uniform(k, -1, 1, 500 + i);
            cv[i] = rng.uniform(k, -1, 1, 510 + i);
            cw[i] = rng.uniform(k, -1, 1, 520 + i);
        }
        ChartField fu = constant_chart_field(cu);
        ChartField fv = constant_chart_field(cv);
        ChartField fw = constant_chart_field(cw);
        auto om_at = [&](const ChartField& a, const ChartField& b, const RVec& q) {
            TwistorPoint pp = chart_point(q);
            return metric(conn, params, pp, a(q), b(q)).omega;
        };
        auto central = [&](const ChartField& a, const ChartField& b, const RVec& dir, double hh) {
            RVec hi = q4, lo = q4;
            for (int i = 0; i < 4; ++i) {
                hi[i] += hh * dir[i];
                lo[i] -= hh * dir[i];
            }
            return (om_at(a, b, hi) - om_at(a, b, lo)) / (2 * hh);
        };
        auto dir_fd = [&](const ChartField& a, const ChartField& b, const RVec& dir) {
            // Richardson-extrapolated central difference
            return (4.0 * central(a, b, dir, h) - central(a, b, dir, 2 * h)) / 3.0;
        };
        double dom = dir_fd(fv, fw, cu) - dir_fd(fu, fw, cv) + dir_fd(fu, fv, cw);
        rep.max_domega = std::max(rep.max_domega, std::abs(dom));
        rep.max_curvature = std::max(rep.max_curvature, max_curvature_norm(conn, x));
        ++rep.samples;
    }
    return rep;
}

CMat rd_curvature(const SymplecticConnection& conn, const TwistorPoint& p, const TwistorTangent& u,
                  const TwistorTangent& v) {
    const int d = conn.dim();
    CurvatureValue cv = curvature_value(conn, p.x);
    RMat r(d, d);
    for (int i = 0; i < d; ++i)
        for (int k = 0; k < d; ++k)
            if (u.base[i] != 0.0 && v.base[k] != 0.0) r += (u.base[i] * v.base[k]) * cv.R_at(i, k);
    // u-part of R minus the commutator of the representatives
    RMat m_part = 0.5 * (r + p.j.j * r * p.j.j);
    RMat qu = fibre_repr(vertical_part(conn, p, u), p.j.j);
    RMat qv = fibre_repr(vertical_part(conn, p, v), p.j.j);
    return complexify(r - m_part - commutator(qu, qv));
}

double rd_type02_residual(const SymplecticConnection& conn, const TwistorPoint& p,
                          const TwistorTangent& u, const TwistorTangent& v) {
    TwistorTangent ju = acs_apply(conn, p, u);
    TwistorTangent jv = acs_apply(conn, p, v);
    const cplx I(0, 1);
    CMat ruv = rd_curvature(conn, p, u, v);
    CMat rju_v = rd_curvature(conn, p, ju, v);
    CMat ru_jv = rd_curvature(conn, p, u, jv);
    CMat rju_jv = rd_curvature(conn, p, ju, jv);
    CMat out = ruv - rju_jv + I * rju_v + I * ru_jv;
    return 0.25 * out.frob();
}

double holo_vector_residual(const SymplecticConnection& conn, const RVec& q4,
                            const TwistorTangent& x, const ChartField& y_re,
                            const ChartField& y_im, double h) {
    TwistorPoint p = chart_point(q4);
    TwistorTangent jx = acs_apply(conn, p, x);
    auto op = [&](const ChartField& y) {
        TwistorTangent t1 = d_derivative(conn, q4, x, y, h);
        TwistorTangent t2 = d_derivative(conn, q4, jx, y, h);
        TwistorTangent jt2 = acs_apply(conn, p, t2);
        TwistorTangent y0 = y(q4);
        RMat qy = fibre_repr(vertical_part(conn, p, y0), p.j.j);
        RVec corr = qy.apply(x.base);
        TwistorTangent lift = horizontal_lift(conn, p, corr);
        TwistorTangent out = t1;
        for (int i = 0; i < 2; ++i) out.base[i] += jt2.base[i] - 2.0 * lift.base[i];
        out.vert += jt2.vert - 2.0 * lift.vert;
        return out;
    };
    TwistorTangent re = op(y_re);
    TwistorTangent im = op(y_im);
    return std::sqrt(tangent_norm(re) * tangent_norm(re) + tangent_norm(im) * tangent_norm(im));
}

}  // namespace stw
