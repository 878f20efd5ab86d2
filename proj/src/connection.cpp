#include "stw/connection.hpp"

#include <cmath>

#include <json.hpp>

namespace stw {

namespace {

Expr re_part(const Expr& e) {
    Expr half = Expr::number(0.5, e.nvars());
    return half * (e + Expr::apply(Fn::Conj, e));
}

Expr im_part(const Expr& e) {
    Expr c = Expr::number(cplx(0, -0.5), e.nvars());
    return c * (e - Expr::apply(Fn::Conj, e));
}

void validate_connection(const SymplecticConnection& conn, const char* label) {
    Rng rng(20240u);
    int checked = 0;
    for (uint64_t k = 0; k < 60 && checked < 20; ++k) {
        RVec x = conn.sample_point(rng, k);
        if (x.empty()) continue;
        ++checked;
        if (conn.torsion_residual(x) > 1e-9)
            throw std::runtime_error(std::string(label) + ": torsion-free validation failed");
        if (conn.symplectic && conn.symplectic_residual(x) > 1e-9)
            throw std::runtime_error(std::string(label) + ": symplectic validation failed");
    }
}

}  // namespace

RVec Diffeo::apply(const RVec& x) const {
    RVec y(fwd.size());
    for (size_t k = 0; k < fwd.size(); ++k) y[k] = fwd[k].value(x).real();
    return y;
}

RVec Diffeo::apply_inv(const RVec& y) const {
    if (inv.empty()) throw std::runtime_error("Diffeo: missing inverse");
    RVec x(inv.size());
    for (size_t k = 0; k < inv.size(); ++k) x[k] = inv[k].value(y).real();
    return x;
}

RMat Diffeo::jacobian(const RVec& x) const {
    const int d = static_cast<int>(fwd.size());
    RMat s(d, d);
    for (int r = 0; r < d; ++r) {
        Jet j = fwd[r].eval(x, 1);
        for (int c = 0; c < d; ++c) s(r, c) = j.d[c].real();
    }
    return s;
}

RMat Diffeo::jacobian_partial(const RVec& x, int k) const {
    const int d = static_cast<int>(fwd.size());
    RMat s(d, d);
    for (int r = 0; r < d; ++r) {
        Jet j = fwd[r].eval(x, 2);
        for (int c = 0; c < d; ++c) s(r, c) = j.d2(k, c).real();
    }
    return s;
}

Diffeo identity_diffeo(int n) {
    Diffeo s;
    s.n = n;
    for (int k = 0; k < 2 * n; ++k) {
        s.fwd.push_back(Expr::variable(k, 2 * n));
        s.inv.push_back(Expr::variable(k, 2 * n));
    }
    return s;
}

Diffeo translation_diffeo(const RVec& v) {
    const int d = static_cast<int>(v.size());
    Diffeo s;
    s.n = d / 2;
    for (int k = 0; k < d; ++k) {
        s.fwd.push_back(Expr::variable(k, d) + Expr::number(v[k], d));
        s.inv.push_back(Expr::variable(k, d) - Expr::number(v[k], d));
    }
    return s;
}

Diffeo linear_diffeo(const RMat& m) {
    const int d = m.rows();
    RMat mi = inverse(m);
    Diffeo s;
    s.n = d / 2;
    auto row_expr = [d](const RMat& mm, int r) {
        Expr e = Expr::number(0.0, d);
        for (int c = 0; c < d; ++c) e = e + Expr::number(mm(r, c), d) * Expr::variable(c, d);
        return e;
    };
    for (int r = 0; r < d; ++r) {
        s.fwd.push_back(row_expr(m, r));
        s.inv.push_back(row_expr(mi, r));
    }
    return s;
}

Diffeo inversion_diffeo() {
    // z -> 1/z: (x, y) -> (x, -y)/(x^2+y^2); an involution
    Diffeo s;
    s.n = 1;
    Expr x = Expr::variable(0, 2), y = Expr::variable(1, 2);
    Expr r2 = x * x + y * y;
    s.fwd = {x / r2, Expr::number(-1.0, 2) * y / r2};
    s.inv = s.fwd;
    return s;
}

bool SymplecticConnection::in_domain(const RVec& x) const {
    if (domain && !domain->empty()) {
        try {
            if (domain->value(x).real() <= 0.0) return false;
        } catch (const ExprError&) {
            return false;
        }
    }
    return true;
}

RVec SymplecticConnection::sample_point(const Rng& rng, uint64_t k) const {
    const int d = dim();
    for (uint64_t attempt = 0; attempt < 50; ++attempt) {
        RVec x(d);
        for (int i = 0; i < d; ++i) {
            auto [lo, hi] = box.empty() ? std::pair<double, double>{-1.5, 1.5} : box[i];
            x[i] = rng.uniform(k * 50 + attempt, lo, hi, 700 + i);
        }
        if (in_domain(x)) return x;
    }
    return {};
}

RMat SymplecticConnection::christoffel(const RVec& x, int i) const {
    const int d = dim();
    RMat a(d, d);
    for (int k = 0; k < d; ++k)
        for (int j = 0; j < d; ++j) a(k, j) = gamma[gidx(k, i, j)].value(x).real();
    return a;
}

std::vector<RMat> SymplecticConnection::christoffel_all(const RVec& x) const {
    std::vector<RMat> out;
    for (int i = 0; i < dim(); ++i) out.push_back(christoffel(x, i));
    return out;
}

ConnectionJet SymplecticConnection::christoffel_jet(const RVec& x, int order) const {
    const int d = dim();
    ConnectionJet cj;
    cj.dim = d;
    cj.order = order;
    cj.A.assign(d, RMat(d, d));
    if (order >= 1) cj.dA.assign(d, std::vector<RMat>(d, RMat(d, d)));
    if (order >= 2)
        cj.d2A.assign(d, std::vector<std::vector<RMat>>(d, std::vector<RMat>(d, RMat(d, d))));
    for (int k = 0; k < d; ++k)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                Jet jet = gamma[gidx(k, i, j)].eval(x, order);
                cj.A[i](k, j) = jet.v.real();
                if (order >= 1)
                    for (int m = 0; m < d; ++m) cj.dA[m][i](k, j) = jet.d[m].real();
                if (order >= 2)
                    for (int m = 0; m < d; ++m)
                        for (int l = 0; l < d; ++l) cj.d2A[m][l][i](k, j) = jet.d2(m, l).real();
            }
    return cj;
}

double SymplecticConnection::torsion_residual(const RVec& x) const {
    auto A = christoffel_all(x);
    const int d = dim();
    double worst = 0;
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) {
            RVec u = A[i].apply(basis_vec(d, j)), v = A[j].apply(basis_vec(d, i));
            for (int r = 0; r < d; ++r) worst = std::max(worst, std::abs(u[r] - v[r]));
        }
    return worst;
}

double SymplecticConnection::symplectic_residual(const RVec& x) const {
    auto A = christoffel_all(x);
    const int d = dim();
    RMat Om = omega_matrix(n);
    auto low = [&](int i, int j, int k) {
        RVec u = A[i].apply(basis_vec(d, j));
        return omega(Om, u, basis_vec(d, k));
    };
    double worst = 0;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k) {
                double v = low(i, j, k);
                worst = std::max({worst, std::abs(v - low(j, i, k)), std::abs(v - low(i, k, j)),
                                  std::abs(v - low(k, j, i))});
            }
    return worst;
}

double SymplecticConnection::sp_residual(const RVec& x) const {
    auto A = christoffel_all(x);
    RMat Om = omega_matrix(n);
    double worst = 0;
    for (const auto& a : A) worst = std::max(worst, (Om * a + a.transposed() * Om).frob());
    return worst;
}

void abcd_to_alphabeta(double a, double b, double c, double d, cplx& alpha, cplx& beta) {
    alpha = cplx(-(b + d) / 4.0, -(a + c) / 4.0);
    beta = cplx((3 * b - d) / 4.0, -(3 * c - a) / 4.0);
}

void alphabeta_to_abcd(cplx alpha, cplx beta, double& a, double& b, double& c, double& d) {
    a = -3.0 * alpha.imag() + beta.imag();
    b = beta.real() - alpha.real();
    c = -alpha.imag() - beta.imag();
    d = -3.0 * alpha.real() - beta.real();
}

namespace {

// Gamma expressions for n=1 from real coefficient expressions (a,b,c,d):
// A(dx) = [[b, c], [-a, -b]], A(dy) = [[c, d], [-b, -c]].
std::vector<Expr> gamma_from_abcd(const Expr& a, const Expr& b, const Expr& c, const Expr& d) {
    const int dimn = 2;
    std::vector<Expr> g(dimn * dimn * dimn);
    auto gi = [dimn](int k, int i, int j) { return (k * dimn + i) * dimn + j; };
    Expr na = -a, nb = -b, nc = -c;
    g[gi(0, 0, 0)] = b;
    g[gi(1, 0, 0)] = na;
    g[gi(0, 0, 1)] = c;
    g[gi(1, 0, 1)] = nb;
    g[gi(0, 1, 0)] = c;
    g[gi(1, 1, 0)] = nb;
    g[gi(0, 1, 1)] = d;
    g[gi(1, 1, 1)] = nc;
    return g;
}

}  // namespace

SymplecticConnection from_alpha_beta(const Expr& alpha, const Expr& beta,
                                     std::optional<Expr> domain) {
    SymplecticConnection c;
    c.n = 1;
    c.kind = ConnKind::AlphaBeta;
    c.symplectic = true;
    c.alpha = alpha;
    c.beta = beta;
    c.domain = std::move(domain);
    c.box.assign(2, {-1.5, 1.5});
    Expr a = Expr::number(-3.0, 2) * im_part(alpha) + im_part(beta);
    Expr b = re_part(beta) - re_part(alpha);
    Expr cc = -im_part(alpha) - im_part(beta);
    Expr d = Expr::number(-3.0, 2) * re_part(alpha) - re_part(beta);
    c.gamma = gamma_from_abcd(a, b, cc, d);
    validate_connection(c, "from_alpha_beta");
    return c;
}

SymplecticConnection from_real_coeffs(const Expr& a, const Expr& b, const Expr& c, const Expr& d,
                                      std::optional<Expr> domain) {
    SymplecticConnection conn;
    conn.n = 1;
    conn.kind = ConnKind::RealCoeffs;
    conn.symplectic = true;
    conn.domain = std::move(domain);
    conn.box.assign(2, {-1.5, 1.5});
    conn.gamma = gamma_from_abcd(a, b, c, d);
    Expr quarter = Expr::number(0.25, 2);
    Expr i_quarter = Expr::number(cplx(0, 0.25), 2);
    conn.alpha = -(quarter * (b + d)) - i_quarter * (a + c);
    conn.beta =
        quarter * (Expr::number(3.0, 2) * b - d) - i_quarter * (Expr::number(3.0, 2) * c - a);
    validate_connection(conn, "from_real_coeffs");
    return conn;
}

SymplecticConnection from_constant_A(const std::vector<RMat>& Ai) {
    const int d = static_cast<int>(Ai.size());
    SymplecticConnection c;
    c.n = d / 2;
    c.kind = ConnKind::ConstantA;
    c.symplectic = true;
    c.constA = Ai;
    c.box.assign(d, {-1.5, 1.5});
    c.gamma.resize(static_cast<size_t>(d) * d * d);
    for (int k = 0; k < d; ++k)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) c.gamma[c.gidx(k, i, j)] = Expr::number(Ai[i](k, j), d);
    RMat Om = omega_matrix(c.n);
    for (const auto& a : Ai)
        if ((Om * a + a.transposed() * Om).frob() > 1e-12)
            throw std::runtime_error("from_constant_A: matrix not in sp(2n)");
    validate_connection(c, "from_constant_A");
    return c;
}

SymplecticConnection from_gamma(int n, std::vector<Expr> gamma, bool symplectic,
                                std::optional<Expr> domain) {
    SymplecticConnection c;
    c.n = n;
    c.kind = ConnKind::GeneralGamma;
    c.symplectic = symplectic;
    c.gamma = std::move(gamma);
    c.domain = std::move(domain);
    c.box.assign(2 * n, {-1.5, 1.5});
    if (c.gamma.size() != static_cast<size_t>(8) * n * n * n)
        throw std::runtime_error("from_gamma: expected (2n)^3 coefficient expressions");
    validate_connection(c, "from_gamma");
    return c;
}

CurvatureValue curvature_value(const SymplecticConnection& conn, const RVec& x) {
    const int d = conn.dim();
    ConnectionJet cj = conn.christoffel_jet(x, 1);
    CurvatureValue cv;
    cv.dim = d;
    cv.n = conn.n;
    cv.R.assign(static_cast<size_t>(d) * d, RMat(d, d));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            cv.R[static_cast<size_t>(i) * d + j] =
                cj.dA[i][j] - cj.dA[j][i] + commutator(cj.A[i], cj.A[j]);
    RMat Om = omega_matrix(conn.n);
    cv.lowered.assign(static_cast<size_t>(d) * d * d * d, 0.0);
    auto set_low = [&](int i, int j, int k, int l, double v) {
        cv.lowered[((static_cast<size_t>(i) * d + j) * d + k) * d + l] = v;
    };
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            const RMat& R = cv.R_at(i, j);
            for (int k = 0; k < d; ++k)
                for (int l = 0; l < d; ++l) {
                    double v = 0;
                    for (int r = 0; r < d; ++r) v += R(r, k) * Om(r, l);
                    set_low(i, j, k, l, v);
                }
        }
    cv.ricci = RMat(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            double s = 0;
            for (int k = 0; k < d; ++k) s += cv.R_at(i, k)(k, j);
            cv.ricci(i, j) = s;
        }
    const double cE = -1.0 / (2.0 * (conn.n + 1));
    cv.E.assign(cv.lowered.size(), 0.0);
    cv.W.assign(cv.lowered.size(), 0.0);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
                for (int l = 0; l < d; ++l) {
                    double e = cE * (2.0 * Om(i, j) * cv.ricci(k, l) + Om(i, k) * cv.ricci(j, l) +
                                     Om(i, l) * cv.ricci(j, k) - Om(j, k) * cv.ricci(i, l) -
                                     Om(j, l) * cv.ricci(i, k));
                    size_t idx = ((static_cast<size_t>(i) * d + j) * d + k) * d + l;
                    cv.E[idx] = e;
                    cv.W[idx] = cv.lowered[idx] - e;
                }
    return cv;
}

CMat curvature_c(const CurvatureValue& cv, const CVec& X, const CVec& Y) {
    const int d = cv.dim;
    CMat out(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            cplx c = X[i] * Y[j];
            if (c == cplx{}) continue;
            const RMat& R = cv.R_at(i, j);
            for (int r = 0; r < d; ++r)
                for (int s = 0; s < d; ++s) out(r, s) += c * R(r, s);
        }
    return out;
}

RMat ricci_of_lowered(const std::vector<double>& t, int dim) {
    const int d = dim;
    RMat Om = omega_matrix(d / 2);
    auto low = [&](int i, int j, int k, int l) {
        return t[((static_cast<size_t>(i) * d + j) * d + k) * d + l];
    };
    // raise the last slot back to an endomorphism, then trace as for ricci
    RMat out(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            double s = 0;
            for (int k = 0; k < d; ++k) {
                double v = 0;
                for (int l = 0; l < d; ++l) v += Om(k, l) * low(i, k, j, l);
                s += v;
            }
            out(i, j) = s;
        }
    return out;
}

double max_curvature_norm(const SymplecticConnection& conn, const RVec& x) {
    CurvatureValue cv = curvature_value(conn, x);
    double worst = 0;
    for (int i = 0; i < cv.dim; ++i)
        for (int j = 0; j < cv.dim; ++j) worst = std::max(worst, cv.R_at(i, j).max_abs());
    return worst;
}

double field_eq_residual(const SymplecticConnection& conn, const RVec& x) {
    const int d = conn.dim();
    ConnectionJet cj = conn.christoffel_jet(x, 2);
    std::vector<RMat> R(static_cast<size_t>(d) * d, RMat(d, d));
    std::vector<RMat> dR(static_cast<size_t>(d) * d * d, RMat(d, d));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            R[static_cast<size_t>(i) * d + j] =
                cj.dA[i][j] - cj.dA[j][i] + commutator(cj.A[i], cj.A[j]);
            for (int m = 0; m < d; ++m)
                dR[(static_cast<size_t>(m) * d + i) * d + j] =
                    cj.d2A[m][i][j] - cj.d2A[m][j][i] + commutator(cj.dA[m][i], cj.A[j]) +
                    commutator(cj.A[i], cj.dA[m][j]);
        }
    RMat ric(d, d);
    std::vector<RMat> dric(d, RMat(d, d));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            double s = 0;
            for (int k = 0; k < d; ++k) s += R[static_cast<size_t>(i) * d + k](k, j);
            ric(i, j) = s;
            for (int m = 0; m < d; ++m) {
                double t = 0;
                for (int k = 0; k < d; ++k) t += dR[(static_cast<size_t>(m) * d + i) * d + k](k, j);
                dric[m](i, j) = t;
            }
        }
    auto nabla_r = [&](int m, int i, int j) {
        double s = dric[m](i, j);
        for (int r = 0; r < d; ++r) {
            s -= cj.A[m](r, i) * ric(r, j);
            s -= cj.A[m](r, j) * ric(i, r);
        }
        return s;
    };
    double worst = 0;
    for (int m = 0; m < d; ++m)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                double c = nabla_r(m, i, j) + nabla_r(i, j, m) + nabla_r(j, m, i);
                worst = std::max(worst, std::abs(c));
            }
    return worst;
}

SymplecticConnection pullback(const Diffeo& sigma, const SymplecticConnection& conn) {
    const int d = conn.dim();
    if (static_cast<int>(sigma.fwd.size()) != d)
        throw std::runtime_error("pullback: dimension mismatch");
    if (sigma.inv.empty()) throw std::runtime_error("pullback: missing inverse");

    Rng rng(5150u);
    int checked = 0;
    for (uint64_t k = 0; k < 40 && checked < 8; ++k) {
        RVec x = conn.sample_point(rng, k);
        if (x.empty()) continue;
        RVec y, back;
        try {
            y = sigma.apply(x);
            back = sigma.apply_inv(y);
        } catch (const ExprError&) {
            continue;
        }
        ++checked;
        for (int i = 0; i < d; ++i)
            if (std::abs(back[i] - x[i]) > 1e-7)
                throw std::runtime_error("pullback: supplied inverse does not invert sigma");
        try {
            (void)inverse(sigma.jacobian(x));
        } catch (const std::exception&) {
            throw std::runtime_error("pullback: singular Jacobian");
        }
    }

    std::vector<Expr> jac_fwd_comp(static_cast<size_t>(d) * d);  // dsigma_k/dx_c at inv(y)
    std::vector<Expr> jac_inv(static_cast<size_t>(d) * d);       // dinv_a/dy_i
    std::vector<Expr> hess_inv(static_cast<size_t>(d) * d * d);  // d2 inv_c / dy_i dy_j
    for (int k = 0; k < d; ++k)
        for (int c = 0; c < d; ++c)
            jac_fwd_comp[static_cast<size_t>(k) * d + c] = sigma.fwd[k].diff(c).subst(sigma.inv);
    for (int a = 0; a < d; ++a)
        for (int i = 0; i < d; ++i)
            jac_inv[static_cast<size_t>(a) * d + i] = sigma.inv[a].diff(i);
    for (int c = 0; c < d; ++c)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                hess_inv[(static_cast<size_t>(c) * d + i) * d + j] = sigma.inv[c].diff(i).diff(j);

    std::vector<Expr> g(static_cast<size_t>(d) * d * d);
    for (int k = 0; k < d; ++k)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                Expr total = Expr::number(0.0, d);
                for (int c = 0; c < d; ++c) {
                    Expr inner = hess_inv[(static_cast<size_t>(c) * d + i) * d + j];
                    for (int a = 0; a < d; ++a)
                        for (int b = 0; b < d; ++b) {
                            const Expr& gsrc = conn.gamma[conn.gidx(c, a, b)];
                            inner = inner + jac_inv[static_cast<size_t>(a) * d + i] *
                                                jac_inv[static_cast<size_t>(b) * d + j] *
                                                gsrc.subst(sigma.inv);
                        }
                    total = total + jac_fwd_comp[static_cast<size_t>(k) * d + c] * inner;
                }
                g[(static_cast<size_t>(k) * d + i) * d + j] = total;
            }

    SymplecticConnection out;
    out.n = conn.n;
    out.kind = ConnKind::GeneralGamma;
    out.symplectic = false;  // re-established by validation when sigma preserves omega
    out.gamma = std::move(g);
    if (conn.domain) out.domain = conn.domain->subst(sigma.inv);
    out.box.assign(d, {1e300, -1e300});
    const int gridpts = 5;
    std::vector<int> idxv(d, 0);
    for (;;) {
        RVec x(d);
        for (int i = 0; i < d; ++i) {
            auto [lo, hi] = conn.box[i];
            x[i] = lo + (hi - lo) * idxv[i] / double(gridpts - 1);
        }
        if (conn.in_domain(x)) {
            try {
                RVec y = sigma.apply(x);
                for (int i = 0; i < d; ++i) {
                    out.box[i].first = std::min(out.box[i].first, y[i]);
                    out.box[i].second = std::max(out.box[i].second, y[i]);
                }
            } catch (const ExprError&) {
            }
        }
        int c = 0;
        while (c < d && ++idxv[c] == gridpts) idxv[c++] = 0;
        if (c == d) break;
    }
    for (int i = 0; i < d; ++i)
        if (out.box[i].first > out.box[i].second) out.box[i] = {-1.5, 1.5};
    return out;
}

SymplecticConnection preset_connection(const std::string& name) {
    if (name == "trivial") {
        return from_alpha_beta(Expr::number(0.0, 2), Expr::number(0.0, 2));
    }
    if (name == "sphere") {
        return from_alpha_beta(parse_expr("-2*zb/(1+abs2(z))", 1), Expr::number(0.0, 2));
    }
    if (name == "log_example") {
        auto c = from_real_coeffs(parse_expr("0", 1), parse_expr("-1/(2*x)", 1), parse_expr("0", 1),
                                  parse_expr("x", 1), parse_expr("x", 1));
        c.box = {{0.5, 3.0}, {-2.0, 2.0}};
        return c;
    }
    if (name == "sphere_darboux") {
        // Levi-Civita connection of the round metric transported by the
        // area-straightening map z -> z/sqrt(1+|z|^2); symplectic for the
        // constant form, curved, and with parallel Ricci tensor.
        Diffeo phi;
        phi.n = 1;
        Expr x = Expr::variable(0, 2), y = Expr::variable(1, 2);
        Expr one = Expr::number(1.0, 2);
        Expr s = Expr::apply(Fn::Sqrt, one + x * x + y * y);
        Expr si = Expr::apply(Fn::Sqrt, one - (x * x + y * y));
        phi.fwd = {x / s, y / s};
        phi.inv = {x / si, y / si};
        auto c = pullback(phi, preset_connection("sphere_lc"));
        c.symplectic = true;
        c.box.assign(2, {-0.65, 0.65});
        c.domain = parse_expr("0.96 - abs2(z)", 1);
        return c;
    }
    if (name == "sphere_lc") {
        // Levi-Civita connection of the round metric in the affine chart:
        // the (1,0) coefficient is -2 zb/(1+|z|^2) and the mixed term vanishes.
        // Torsion-free, not symplectic for the constant form.
        Expr reg = parse_expr("-2*x/(1+abs2(z))", 1);
        Expr img = parse_expr("2*y/(1+abs2(z))", 1);
        const int d = 2;
        std::vector<Expr> g(8);
        auto gi = [d](int k, int i, int j) { return (k * d + i) * d + j; };
        g[gi(0, 0, 0)] = reg;
        g[gi(1, 0, 0)] = img;
        g[gi(0, 0, 1)] = -img;
        g[gi(1, 0, 1)] = reg;
        g[gi(0, 1, 0)] = -img;
        g[gi(1, 1, 0)] = reg;
        g[gi(0, 1, 1)] = -reg;
        g[gi(1, 1, 1)] = -img;
        return from_gamma(1, std::move(g), false);
    }
    throw std::runtime_error("unknown preset '" + name + "'");
}

SymplecticConnection connection_from_json(const std::string& json_text) {
    // accept either a JSON object or plain key=value lines
    nlohmann::json j;
    size_t first = json_text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && json_text[first] == '{') {
        j = nlohmann::json::parse(json_text);
    } else {
        j = nlohmann::json::object();
        std::string line;
        for (size_t pos = 0; pos < json_text.size();) {
            size_t nl = json_text.find('\n', pos);
            line = json_text.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
            pos = nl == std::string::npos ? json_text.size() : nl + 1;
            size_t eq = line.find('=');
            if (eq == std::string::npos) continue;
            auto trim = [](std::string s) {
                size_t a = s.find_first_not_of(" \t\r");
                size_t b = s.find_last_not_of(" \t\r");
                return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
            };
            std::string key = trim(line.substr(0, eq));
            std::string val = trim(line.substr(eq + 1));
            if (key.empty() || key[0] == '#') continue;
            if (key == "n")
                j[key] = std::stoi(val);
            else
                j[key] = val;
        }
    }
    int n = j.value("n", 1);
    std::string kind = j.at("kind").get<std::string>();
    std::optional<Expr> dom;
    if (j.contains("domain")) dom = parse_expr(j["domain"].get<std::string>(), n);
    SymplecticConnection c;
    if (kind == "alpha_beta") {
        c = from_alpha_beta(parse_expr(j.at("alpha").get<std::string>(), 1),
                            parse_expr(j.at("beta").get<std::string>(), 1), dom);
    } else if (kind == "real_coeffs") {
        c = from_real_coeffs(parse_expr(j.at("a").get<std::string>(), 1),
                             parse_expr(j.at("b").get<std::string>(), 1),
                             parse_expr(j.at("c").get<std::string>(), 1),
                             parse_expr(j.at("d").get<std::string>(), 1), dom);
    } else if (kind == "constant_A") {
        std::vector<RMat> Ai;
        for (const auto& mat : j.at("A")) {
            int d = static_cast<int>(mat.size());
            RMat m(d, d);
            for (int r = 0; r < d; ++r)
                for (int col = 0; col < d; ++col) m(r, col) = mat[r][col].get<double>();
            Ai.push_back(m);
        }
        c = from_constant_A(Ai);
    } else if (kind == "general_gamma") {
        std::vector<Expr> g;
        for (const auto& s : j.at("gamma")) g.push_back(parse_expr(s.get<std::string>(), n));
        c = from_gamma(n, std::move(g), j.value("symplectic", true), dom);
    } else {
        throw std::runtime_error("unknown connection kind '" + kind + "'");
    }
    if (j.contains("box")) {
        c.box.clear();
        for (const auto& b : j["box"]) c.box.emplace_back(b[0].get<double>(), b[1].get<double>());
    }
    return c;
}

}  // namespace stw
