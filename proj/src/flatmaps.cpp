#include "stw/flatmaps.hpp"

#include <array>
#include <cmath>

namespace stw {

RMat FrameMap::value(const RVec& x) const {
    RMat g(dim, dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c)
            g(r, c) = entries[static_cast<size_t>(r) * dim + c].value(x).real();
    return g;
}

RMat FrameMap::partial(const RVec& x, int k) const {
    RMat g(dim, dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) {
            Jet j = entries[static_cast<size_t>(r) * dim + c].eval(x, 1);
            g(r, c) = j.d[k].real();
        }
    return g;
}

FrameMap frame_from_exprs(int dim, std::vector<Expr> entries) {
    FrameMap f;
    f.dim = dim;
    f.entries = std::move(entries);
    if (f.entries.size() != static_cast<size_t>(dim) * dim)
        throw std::runtime_error("frame_from_exprs: wrong entry count");
    return f;
}

FrameMap identity_frame(int dim) {
    std::vector<Expr> e;
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) e.push_back(Expr::number(r == c ? 1.0 : 0.0, dim));
    return frame_from_exprs(dim, std::move(e));
}

RMat ConstantOneForm::at(const RVec& x) const {
    const int d = dim();
    RMat b(d, d);
    for (int i = 0; i < d; ++i) b += x[i] * A[i];
    return b;
}

double ConstantOneForm::sp_residual() const {
    const int d = dim();
    RMat Om = omega_matrix(d / 2);
    double worst = 0;
    for (const auto& a : A) worst = std::max(worst, (Om * a + a.transposed() * Om).frob());
    return worst;
}

double ConstantOneForm::total_symmetry_residual() const {
    const int d = dim();
    RMat Om = omega_matrix(d / 2);
    auto low = [&](int i, int j, int k) {
        RVec u = A[i].apply(basis_vec(d, j));
        return omega(Om, u, basis_vec(d, k));
    };
    double worst = 0;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k) {
                double v = low(i, j, k);
                worst = std::max({worst, std::abs(v - low(j, i, k)), std::abs(v - low(i, k, j))});
            }
    return worst;
}

ConstantOneForm one_form_from_abcd(double a, double b, double c, double d) {
    RMat ax(2, 2), ay(2, 2);
    ax(0, 0) = b;
    ax(0, 1) = c;
    ax(1, 0) = -a;
    ax(1, 1) = -b;
    ay(0, 0) = c;
    ay(0, 1) = d;
    ay(1, 0) = -b;
    ay(1, 1) = -c;
    return ConstantOneForm{{ax, ay}};
}

double frame_flat_residual(const SymplecticConnection& conn, const FrameMap& g, const RVec& x) {
    RMat gv = g.value(x);
    RMat gi = inverse(gv);  // throws on singular g
    double worst = 0;
    for (int i = 0; i < conn.dim(); ++i) {
        RMat lhs = conn.christoffel(x, i);
        RMat rhs = -(g.partial(x, i) * gi);  // (g d g^{-1})(e_i)
        worst = std::max(worst, (lhs - rhs).max_abs());
    }
    return worst;
}

double jacobian_equation_residual(const Diffeo& sigma, const FrameMap& g, const RVec& x) {
    RVec y = sigma.apply(x);
    RMat gv = g.value(y);
    RMat J = sigma.jacobian(x);
    return (gv - J).max_abs();
}

double schwarz_residual(const FrameMap& g, const RVec& x) {
    const int d = g.dim;
    RMat gv = g.value(x);
    std::vector<RMat> dg;
    for (int k = 0; k < d; ++k) dg.push_back(g.partial(x, k));
    double worst = 0;
    for (int j = 0; j < d; ++j)
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) {
                double s = 0;
                for (int i = 0; i < d; ++i) s += dg[i](j, a) * gv(i, b);
                for (int k = 0; k < d; ++k) s -= dg[k](j, b) * gv(k, a);
                worst = std::max(worst, std::abs(s));
            }
    return worst;
}

TiFlatClass ti_flat_classify(double a, double b, double c, double d) {
    double nrm = std::sqrt(a * a + b * b + c * c + d * d);
    if (nrm == 0.0) throw std::runtime_error("ti_flat_classify: zero coefficient vector");
    a /= nrm;
    b /= nrm;
    c /= nrm;
    d /= nrm;
    TiFlatClass out;
    out.on_curve = std::abs(b * c - a * d) < 1e-12 && std::abs(b * b - a * c) < 1e-12;
    out.excluded_point = std::abs(a) < 1e-12 && std::abs(b) < 1e-12 && std::abs(d) < 1e-12 &&
                         std::abs(std::abs(c) - 1.0) < 1e-12;
    return out;
}

Diffeo ti_flat_sigma(const ConstantOneForm& A) {
    const int d = A.dim();
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            if (commutator(A.A[i], A.A[j]).max_abs() > 1e-12)
                throw std::runtime_error("ti_flat_sigma: [A(e" + std::to_string(i + 1) + "),A(e" +
                                         std::to_string(j + 1) + ")] != 0, form is not flat");
            if ((A.A[i] * A.A[j]).max_abs() > 1e-12)
                throw std::runtime_error("ti_flat_sigma: A(e" + std::to_string(i + 1) + ")A(e" +
                                         std::to_string(j + 1) + ") != 0, form is not flat");
        }
    Diffeo s;
    s.n = d / 2;
    for (int k = 0; k < d; ++k) {
        Expr fk = Expr::variable(k, d);
        Expr ik = Expr::variable(k, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                double coef = 0.5 * A.A[i](k, j);
                if (coef == 0.0) continue;
                Expr term = Expr::number(coef, d) * Expr::variable(i, d) * Expr::variable(j, d);
                fk = fk - term;
                ik = ik + term;
            }
        s.fwd.push_back(fk);
        s.inv.push_back(ik);
    }
    return s;
}

RMat expm(const RMat& b) {
    const int d = b.rows();
    if ((b * b).max_abs() < 1e-14) return RMat::identity(d) + b;
    int scale = 0;
    double nrm = b.frob();
    while (nrm > 0.5) {
        nrm /= 2;
        ++scale;
    }
    RMat s = b * std::pow(0.5, scale);
    RMat acc = RMat::identity(d);
    RMat term = RMat::identity(d);
    for (int k = 1; k <= 16; ++k) {
        term = term * s * (1.0 / k);
        acc += term;
    }
    for (int k = 0; k < scale; ++k) acc = acc * acc;
    return acc;
}

FrameMap exp_frame(const ConstantOneForm& A) {
    const int d = A.dim();
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            if ((A.A[i] * A.A[j]).max_abs() > 1e-14)
                throw std::runtime_error("exp_frame: requires A(X)A(Y) = 0");
    // nilpotent case: exp(-A(x)) = 1 - A(x), polynomial entries
    std::vector<Expr> entries;
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) {
            Expr e = Expr::number(r == c ? 1.0 : 0.0, d);
            for (int i = 0; i < d; ++i) {
                double coef = A.A[i](r, c);
                if (coef == 0.0) continue;
                e = e - Expr::number(coef, d) * Expr::variable(i, d);
            }
            entries.push_back(e);
        }
    return frame_from_exprs(d, std::move(entries));
}

std::vector<std::array<double, 4>> flat_curve_samples(int count, const Rng& rng) {
    std::vector<std::array<double, 4>> out;
    out.push_back({0, 0, 0, 1});  // the limit of the parameterization
    for (uint64_t k = 0; static_cast<int>(out.size()) < count; ++k) {
        double u = rng.uniform(k, 0.02, 0.98, 811);
        double t = std::tan(M_PI * (u - 0.5));
        std::array<double, 4> v = {1.0, t, t * t, t * t * t};
        double nrm = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2] + v[3] * v[3]);
        for (double& x : v) x /= nrm;
        out.push_back(v);
    }
    return out;
}

}  // namespace stw
