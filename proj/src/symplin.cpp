#include "stw/symplin.hpp"

#include <cmath>

namespace stw {

RMat omega_matrix(int n) {
    RMat om(2 * n, 2 * n);
    for (int k = 0; k < n; ++k) {
        om(2 * k, 2 * k + 1) = 1.0;
        om(2 * k + 1, 2 * k) = -1.0;
    }
    return om;
}

double omega(const RMat& Om, const RVec& u, const RVec& v) {
    double s = 0;
    for (int i = 0; i < Om.rows(); ++i)
        for (int j = 0; j < Om.cols(); ++j) s += u[i] * Om(i, j) * v[j];
    return s;
}

cplx omega_c(const RMat& Om, const CVec& u, const CVec& v) {
    cplx s = 0;
    for (int i = 0; i < Om.rows(); ++i)
        for (int j = 0; j < Om.cols(); ++j) s += u[i] * Om(i, j) * v[j];
    return s;
}

RVec basis_vec(int dim, int k) {
    RVec v(dim, 0.0);
    v[k] = 1.0;
    return v;
}

CompatResiduals compat_residuals(const RMat& j) {
    const int d = j.rows();
    RMat Om = omega_matrix(d / 2);
    CompatResiduals r{};
    r.square = (j * j + RMat::identity(d)).frob();
    r.symplectic = (j.transposed() * Om * j - Om).frob();
    RMat g = Om * j;
    RMat gs(d, d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) gs(a, b) = 0.5 * (g(a, b) + g(b, a));
    auto ev = jacobi_eigensolve(gs);
    r.min_metric_eig = ev.front();
    return r;
}

void require_compat(const RMat& j) {
    CompatResiduals r = compat_residuals(j);
    if (r.square > 1e-10) throw std::runtime_error("CompatJ: j^2 != -Id (residual " + std::to_string(r.square) + ")");
    if (r.symplectic > 1e-10)
        throw std::runtime_error("CompatJ: omega not preserved (residual " + std::to_string(r.symplectic) + ")");
    if (r.min_metric_eig <= 1e-10)
        throw std::runtime_error("CompatJ: signature error, omega(.,j.) not positive definite (min eig " +
                                 std::to_string(r.min_metric_eig) + ")");
}

SiegelResult siegel_membership(const CMat& W, double asym_tol) {
    const int n = W.rows();
    double asym = (W - W.transposed()).frob();
    if (asym > asym_tol) throw std::runtime_error("siegel_membership: W not symmetric (residual " + std::to_string(asym) + ")");
    CMat m = CMat::identity(n) - W * conj_transpose(W);
    auto ev = hermitian_eigenvalues(m);
    SiegelResult r;
    r.margin = ev.front();
    r.inside = r.margin > 0.0;
    return r;
}

namespace {

// columns of the complex 2n x 2n matrix [v_1..v_n | conj v_1..conj v_n],
// v_k = d/dzb_k + sum_l W_{kl} d/dz_l in the interleaved real basis.
CMat span_matrix(const CMat& W) {
    const int n = W.rows();
    CMat S(2 * n, 2 * n);
    const cplx I(0, 1);
    for (int k = 0; k < n; ++k) {
        CVec v(2 * n, cplx{});
        v[2 * k] += 0.5;
        v[2 * k + 1] += 0.5 * I;
        for (int l = 0; l < n; ++l) {
            v[2 * l] += W(k, l) * 0.5;
            v[2 * l + 1] += W(k, l) * (-0.5 * I);
        }
        for (int r = 0; r < 2 * n; ++r) {
            S(r, k) = v[r];
            S(r, n + k) = std::conj(v[r]);
        }
    }
    return S;
}

}  // namespace

CompatJ fibre_to_matrix(const CMat& W) {
    const int n = W.rows();
    SiegelResult mem = siegel_membership(W);
    if (!mem.inside)
        throw std::runtime_error("fibre_to_matrix: W outside the Siegel disk (margin " +
                                 std::to_string(mem.margin) + ")");
    CMat S = span_matrix(W);
    CMat D(2 * n, 2 * n);
    const cplx I(0, 1);
    for (int k = 0; k < n; ++k) {
        D(k, k) = -I;
        D(n + k, n + k) = I;
    }
    CMat jc = S * D * inverse(S);
    if (imag_norm(jc) > 1e-9)
        throw std::runtime_error("fibre_to_matrix: non-real structure (residual " +
                                 std::to_string(imag_norm(jc)) + ")");
    CompatJ out;
    out.n = n;
    out.j = real_part(jc);
    out.W = W;
    require_compat(out.j);
    return out;
}

CompatJ fibre_to_matrix(cplx w) {
    CMat W(1, 1);
    W(0, 0) = w;
    return fibre_to_matrix(W);
}

CMat matrix_to_fibre(const RMat& j) {
    require_compat(j);
    const int d = j.rows();
    const int n = d / 2;
    auto [jp, jm] = type_projections(j);
    const cplx I(0, 1);
    // u_k = j^- dzb_k; read off dz/dzb components: p_l = u_x + i u_y, q_l = u_x - i u_y.
    CMat P(n, n), Q(n, n);
    for (int k = 0; k < n; ++k) {
        CVec e(d, cplx{});
        e[2 * k] = 0.5;
        e[2 * k + 1] = 0.5 * I;
        CVec u = jm.apply(e);
        for (int l = 0; l < n; ++l) {
            P(l, k) = u[2 * l] + I * u[2 * l + 1];
            Q(l, k) = u[2 * l] - I * u[2 * l + 1];
        }
    }
    CMat W = P * inverse(Q);
    // the two index conventions differ by a transpose; W is symmetric anyway
    double asym = (W - W.transposed()).frob();
    if (asym > 1e-9)
        throw std::runtime_error("matrix_to_fibre: non-symmetric Siegel coordinate (residual " +
                                 std::to_string(asym) + ")");
    CMat Ws(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) Ws(a, b) = 0.5 * (W(a, b) + W(b, a));
    return Ws;
}

cplx matrix_to_fibre_w(const RMat& j) {
    const cplx I(0, 1);
    double dq = j(1, 0) - j(0, 1) + 2.0;
    cplx num = -(j(1, 0) + j(0, 1)) + 2.0 * I * j(0, 0);
    return num / dq;
}

std::pair<CMat, CMat> type_projections(const RMat& j) {
    const int d = j.rows();
    CMat jc = complexify(j);
    const cplx I(0, 1);
    CMat jp = CMat::identity(d), jm = CMat::identity(d);
    jp = 0.5 * (jp - I * jc);
    jm = 0.5 * (jm + I * jc);
    return {jp, jm};
}

std::vector<RMat> vertical_basis(const RMat& j) {
    const int d = j.rows();
    const int n = d / 2;
    RMat Om = omega_matrix(n);
    // constraints on the entries of A: (Om A + A^T Om)_{rc} = 0 and (A j + j A)_{rc} = 0
    RMat M(2 * d * d, d * d);
    auto idx = [d](int r, int c) { return r * d + c; };
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) {
            int row1 = idx(r, c);
            int row2 = d * d + idx(r, c);
            for (int k = 0; k < d; ++k) {
                M(row1, idx(k, c)) += Om(r, k);  // (Om A)_{rc} = sum_k Om(r,k) A(k,c)
                M(row1, idx(k, r)) += Om(k, c);  // (A^T Om)_{rc} = sum_k A(k,r) Om(k,c)
                M(row2, idx(r, k)) += j(k, c);   // (A j)_{rc} = sum_k A(r,k) j(k,c)
                M(row2, idx(k, c)) += j(r, k);   // (j A)_{rc} = sum_k j(r,k) A(k,c)
            }
        }
    auto null = nullspace(M, 1e-10);
    if (static_cast<int>(null.size()) != n * (n + 1))
        throw std::runtime_error("vertical_basis: expected dimension " + std::to_string(n * (n + 1)) +
                                 ", got " + std::to_string(null.size()));
    std::vector<RMat> basis;
    auto to_mat = [&](const std::vector<double>& v) {
        RMat a(d, d);
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) a(r, c) = v[idx(r, c)];
        return a;
    };
    auto ip = [](const RMat& a, const RMat& b) { return 0.5 * (a * b).trace(); };
    for (const auto& v : null) {
        RMat a = to_mat(v);
        for (const auto& b : basis) a -= ip(a, b) * b;
        double nrm = ip(a, a);
        if (nrm < 1e-16) continue;
        a *= 1.0 / std::sqrt(nrm);
        basis.push_back(a);
    }
    if (static_cast<int>(basis.size()) != n * (n + 1))
        throw std::runtime_error("vertical_basis: orthonormalization lost rank");
    return basis;
}

namespace {

struct ChartExprs {
    Expr j11, j12, j21, j22;
};

const ChartExprs& chart_exprs() {
    static const ChartExprs ce = [] {
        ChartExprs c;
        c.j11 = parse_expr("2*x2/(1-(x1^2+x2^2))", 1);
        c.j12 = parse_expr("-((1+x1)^2+x2^2)/(1-(x1^2+x2^2))", 1);
        c.j21 = parse_expr("((1-x1)^2+x2^2)/(1-(x1^2+x2^2))", 1);
        c.j22 = parse_expr("-2*x2/(1-(x1^2+x2^2))", 1);
        return c;
    }();
    return ce;
}

}  // namespace

FibreChart fibre_chart(cplx w, int order) {
    if (std::abs(w) >= 1.0) throw std::runtime_error("fibre_chart: |w| >= 1");
    const auto& ce = chart_exprs();
    double p[2] = {w.real(), w.imag()};
    Jet e11 = ce.j11.eval(p, order), e12 = ce.j12.eval(p, order);
    Jet e21 = ce.j21.eval(p, order), e22 = ce.j22.eval(p, order);
    FibreChart fc;
    fc.order = order;
    auto put = [&](RMat& m, auto select) {
        m = RMat(2, 2);
        m(0, 0) = select(e11);
        m(0, 1) = select(e12);
        m(1, 0) = select(e21);
        m(1, 1) = select(e22);
    };
    put(fc.j, [](const Jet& j) { return j.v.real(); });
    if (order >= 1)
        for (int k = 0; k < 2; ++k)
            put(fc.dj[k], [k](const Jet& j) { return j.d[k].real(); });
    if (order >= 2)
        for (int k = 0; k < 2; ++k)
            for (int l = 0; l < 2; ++l)
                put(fc.d2j[k][l], [k, l](const Jet& j) { return j.d2(k, l).real(); });
    return fc;
}

cplx dw_of(const RMat& j, const CMat& V) {
    const cplx I(0, 1);
    double dq = j(1, 0) - j(0, 1) + 2.0;
    cplx num = -(j(1, 0) + j(0, 1)) + 2.0 * I * j(0, 0);
    cplx dnum = -(V(1, 0) + V(0, 1)) + 2.0 * I * V(0, 0);
    cplx ddq = V(1, 0) - V(0, 1);
    return dnum / dq - num * ddq / (dq * dq);
}

cplx dwbar_of(const RMat& j, const CMat& V) {
    const cplx I(0, 1);
    double dq = j(1, 0) - j(0, 1) + 2.0;
    cplx num = std::conj(cplx(-(j(1, 0) + j(0, 1)), 2.0 * j(0, 0)));
    cplx dnum = -(V(1, 0) + V(0, 1)) - 2.0 * I * V(0, 0);
    cplx ddq = V(1, 0) - V(0, 1);
    return dnum / dq - num * ddq / (dq * dq);
}

}  // namespace stw
