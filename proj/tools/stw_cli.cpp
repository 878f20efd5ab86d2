// Command-line front end: load a connection, run the verification suites,
// emit a machine-readable report.

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "stw/connection.hpp"
#include "stw/flatmaps.hpp"
#include "stw/hermitian.hpp"
#include "stw/levi.hpp"
#include "stw/parallel.hpp"
#include "stw/report.hpp"
#include "stw/rng.hpp"
#include "stw/twistor.hpp"

using namespace stw;

namespace {

struct Opts {
    std::string conn_file;
    std::string preset = "trivial";
    uint64_t seed = 42;
    double tol = 1.0;
    double t = 1.0;
    int samples = 200;
    bool json = false;
    bool verbose = false;
};

void add_common(CLI::App* sub, Opts& o) {
    sub->add_option("--conn", o.conn_file, "connection spec file (JSON)");
    sub->add_option("--preset", o.preset,
                    "preset name: trivial, sphere, log_example, sphere_lc, sphere_darboux");
    sub->add_option("--seed", o.seed, "sampling seed");
    sub->add_option("--tol", o.tol, "tolerance multiplier");
    sub->add_option("--t", o.t, "metric scale t");
    sub->add_option("--samples", o.samples, "sample count");
    sub->add_flag("--json", o.json, "emit the JSON report");
    sub->add_flag("--verbose", o.verbose, "include extra payloads");
}

SymplecticConnection load_connection(const Opts& o, nlohmann::json& echo) {
    if (!o.conn_file.empty()) {
        std::ifstream in(o.conn_file);
        if (!in) throw std::runtime_error("cannot open connection file " + o.conn_file);
        std::stringstream ss;
        ss << in.rdbuf();
        echo["conn_file"] = o.conn_file;
        return connection_from_json(ss.str());
    }
    echo["preset"] = o.preset;
    return preset_connection(o.preset);
}

void add_check(VerificationReport& rep, const std::string& id, const std::string& anchor,
               int samples, double resid, double tol, bool pass, const std::string& note = "") {
    rep.checks.push_back({id, anchor, samples, resid, tol, pass, note});
}

// residual sweep over indexed samples; negative results are skipped
template <class F>
std::pair<double, int> sweep(int n, F&& f) {
    std::vector<double> res(n, -1.0);
    run_for(n, [&](int k) { res[k] = f(k); });
    double worst = 0.0;
    int used = 0;
    for (double r : res)
        if (r >= 0.0) {
            worst = std::max(worst, r);
            ++used;
        }
    return {worst, used};
}

TwistorTangent random_tangent_at(const Rng& rng, uint64_t k, const TwistorPoint& p,
                                 uint64_t salt) {
    TwistorTangent u;
    const int d = static_cast<int>(p.x.size());
    u.base.resize(d);
    for (int i = 0; i < d; ++i) u.base[i] = rng.uniform(k, -1, 1, salt + i);
    auto basis = vertical_basis(p.j.j);
    u.vert = RMat(d, d);
    for (size_t i = 0; i < basis.size(); ++i)
        u.vert += rng.uniform(k, -1, 1, salt + 10 + static_cast<int>(i)) * basis[i];
    return u;
}

VerificationReport run_analyze(const SymplecticConnection& conn, const Opts& o) {
    VerificationReport rep;
    rep.command = "analyze-connection";
    Rng rng(o.seed);
    const double h = 1e-4;

    auto [torsion, n1] = sweep(o.samples, [&](int k) {
        RVec x = conn.sample_point(rng, k);
        return x.empty() ? -1.0 : conn.torsion_residual(x);
    });
    add_check(rep, "torsion_free", "Prop 2.1", n1, torsion, 1e-9 * o.tol, torsion < 1e-9 * o.tol);

    auto [sympl, n2] = sweep(o.samples, [&](int k) {
        RVec x = conn.sample_point(rng, k);
        return x.empty() ? -1.0 : conn.symplectic_residual(x);
    });
    if (conn.symplectic)
        add_check(rep, "nabla_omega", "Prop 2.1", n2, sympl, 1e-9 * o.tol, sympl < 1e-9 * o.tol);
    else
        add_check(rep, "nabla_omega", "Prop 2.1", n2, sympl, 0.0, true,
                  "reported only; connection declared non-symplectic");

    if (conn.symplectic) {
        auto [sp, n3] = sweep(o.samples, [&](int k) {
            RVec x = conn.sample_point(rng, k);
            return x.empty() ? -1.0 : conn.sp_residual(x);
        });
        add_check(rep, "sp_valued", "2.1", n3, sp, 1e-10 * o.tol, sp < 1e-10 * o.tol);
    }

    auto [fd, n4] = sweep(std::min(o.samples, 60), [&](int k) {
        RVec x = conn.sample_point(rng, k);
        if (x.empty()) return -1.0;
        auto cv = curvature_value(conn, x);
        RVec xp = x, xm = x;
        xp[0] += h;
        xm[0] -= h;
        RMat d0A1 = (conn.christoffel(xp, 1) - conn.christoffel(xm, 1)) * (1.0 / (2 * h));
        xp = x;
        xm = x;
        xp[1] += h;
        xm[1] -= h;
        RMat d1A0 = (conn.christoffel(xp, 0) - conn.christoffel(xm, 0)) * (1.0 / (2 * h));
        RMat fdr = d0A1 - d1A0 + commutator(conn.christoffel(x, 0), conn.christoffel(x, 1));
        double scale = std::max(1.0, fdr.frob());
        return (fdr - cv.R_at(0, 1)).frob() / scale;
    });
    add_check(rep, "curvature_ad_vs_fd", "R = dA + A^A", n4, fd, 1e-4 * o.tol, fd < 1e-4 * o.tol);

    double rmax = 0.0, wmax = 0.0, wtr = 0.0, feq = 0.0;
    int n5 = 0;
    for (int k = 0; k < std::min(o.samples, 80); ++k) {
        RVec x = conn.sample_point(rng, 1000 + k);
        if (x.empty()) continue;
        ++n5;
        auto cv = curvature_value(conn, x);
        for (int i = 0; i < cv.dim; ++i)
            for (int j = 0; j < cv.dim; ++j) rmax = std::max(rmax, cv.R_at(i, j).max_abs());
        for (double v : cv.W) wmax = std::max(wmax, std::abs(v));
        wtr = std::max(wtr, ricci_of_lowered(cv.W, cv.dim).frob());
        feq = std::max(feq, field_eq_residual(conn, x));
    }
    if (conn.n == 1)
        add_check(rep, "weyl_vanishes", "W = 0 in dim 2", n5, wmax, 1e-8 * o.tol,
                  wmax < 1e-8 * o.tol);
    add_check(rep, "weyl_ricci_trace", "R = E + W", n5, wtr, 1e-8 * o.tol, wtr < 1e-8 * o.tol);
    {
        char note[128];
        std::snprintf(note, sizeof note,
                      "reported only; max |R| = %.3e (cyclic nabla-Ricci has no pass criterion "
                      "for curved input)",
                      rmax);
        add_check(rep, "field_equations", "cyclic nabla r", n5, feq, 0.0, true, note);
    }
    return rep;
}

VerificationReport run_twistor_acs(const SymplecticConnection& conn, const Opts& o,
                                   const std::string& preset) {
    VerificationReport rep;
    rep.command = "twistor-acs";
    Rng rng(o.seed);

    auto [sq, n1] = sweep(o.samples, [&](int k) {
        RVec x = conn.sample_point(rng, k);
        if (x.empty()) return -1.0;
        TwistorPoint p = twistor_point(x, rng.disk(k, 0.9, 3));
        TwistorTangent u = random_tangent_at(rng, k, p, 40);
        TwistorTangent jju = acs_apply(conn, p, acs_apply(conn, p, u));
        TwistorTangent mu{{-u.base[0], -u.base[1]}, -u.vert};
        return tangent_norm(tangent_sub(jju, mu));
    });
    add_check(rep, "acs_squares_to_minus_id", "J = (J^h, J^v)", n1, sq, 1e-10 * o.tol,
              sq < 1e-10 * o.tol);

    auto [dpi, n2] = sweep(o.samples, [&](int k) {
        RVec x = conn.sample_point(rng, k);
        if (x.empty()) return -1.0;
        TwistorPoint p = twistor_point(x, rng.disk(k, 0.9, 5));
        TwistorTangent u = random_tangent_at(rng, k, p, 60);
        TwistorTangent ju = acs_apply(conn, p, u);
        RVec want = p.j.j.apply(u.base);
        double r = 0;
        for (int i = 0; i < 2; ++i) r = std::max(r, std::abs(ju.base[i] - want[i]));
        return r;
    });
    add_check(rep, "dpi_intertwines_j", "J^h", n2, dpi, 1e-12 * o.tol, dpi < 1e-12 * o.tol);

    auto [anti, n3] = sweep(o.samples, [&](int k) {
        RVec x = conn.sample_point(rng, k);
        if (x.empty()) return -1.0;
        TwistorPoint p = twistor_point(x, rng.disk(k, 0.9, 7));
        RVec X = {rng.uniform(k, -1, 1, 81), rng.uniform(k, -1, 1, 82)};
        TwistorTangent lift = horizontal_lift(conn, p, X);
        return (lift.vert * p.j.j + p.j.j * lift.vert).frob();
    });
    add_check(rep, "lift_anticommutes", "m_J", n3, anti, 1e-12 * o.tol, anti < 1e-12 * o.tol);

    if (conn.alpha && conn.beta) {
        auto [cub, n4] = sweep(o.samples, [&](int k) {
            RVec x = conn.sample_point(rng, k);
            if (x.empty()) return -1.0;
            cplx z(x[0], x[1]);
            cplx w = rng.disk(k, 0.93, 9);
            return std::abs(cubic_P(conn, z, w) - cubic_P_oracle(conn, z, w));
        });
        std::string note;
        if (preset == "sphere") {
            cplx z(0.7, 0.2), w(0.3, 0.1);
            char buf[200];
            std::snprintf(buf, sizeof buf,
                          "lift oracle retained as truth: P(z,w) = %.6f%+.6fi here; the printed "
                          "coefficient-2 variant gives %.6f%+.6fi",
                          cubic_P_oracle(conn, z, w).real(), cubic_P_oracle(conn, z, w).imag(),
                          (2.0 * w * (w * std::conj(z) - z) / (1.0 + std::norm(z))).real(),
                          (2.0 * w * (w * std::conj(z) - z) / (1.0 + std::norm(z))).imag());
            note = buf;
        }
        add_check(rep, "cubic_vs_lift_oracle", "Example 1 cubic", n4, cub, 1e-9 * o.tol,
                  cub < 1e-9 * o.tol, note);
    }

    auto self = acs_injectivity_witness(conn, conn, std::min(o.samples, 300), o.seed);
    add_check(rep, "injectivity_self_check", "Thm 1.2", std::min(o.samples, 300),
              self.found ? self.gap : 0.0, 1e-8 * o.tol, !self.found,
              self.found ? "witness found against itself" : "none found");
    return rep;
}

VerificationReport run_integrability(const SymplecticConnection& conn, const Opts& o) {
    VerificationReport rep;
    rep.command = "check-integrability";
    Rng rng(o.seed);

    auto [eq4, n1] = sweep(o.samples, [&](int k) {
        RVec x = conn.sample_point(rng, k);
        if (x.empty()) return -1.0;
        TwistorPoint p = twistor_point(x, rng.disk(k, 0.9, 3));
        RVec X = {rng.uniform(k, -1, 1, 61), rng.uniform(k, -1, 1, 62)};
        RVec Y = {rng.uniform(k, -1, 1, 63), rng.uniform(k, -1, 1, 64)};
        return integrability_residual_eq4(conn, p, X, Y);
    });
    add_check(rep, "eq4_contractions", "Eq. (4)", n1, eq4, 1e-8 * o.tol, eq4 < 1e-8 * o.tol);

    int nsamp = std::min(o.samples, 40);
    auto [nij, n2] = sweep(nsamp, [&](int k) {
        RVec x = conn.sample_point(rng, k);
        if (x.empty()) return -1.0;
        cplx w = rng.disk(k, 0.6, 5);
        RVec u(4), v(4);
        for (int i = 0; i < 4; ++i) {
            u[i] = rng.uniform(k, -1, 1, 120 + i);
            v[i] = rng.uniform(k, -1, 1, 130 + i);
        }
        return nijenhuis_residual(conn, x, w, u, v);
    });
    add_check(rep, "nijenhuis_fd", "Thm 1.1", n2, nij, 5e-4 * o.tol, nij < 5e-4 * o.tol);

    auto [comp, n3] = sweep(nsamp, [&](int k) {
        RVec x = conn.sample_point(rng, k);
        if (x.empty()) return -1.0;
        cplx w = rng.disk(k, 0.6, 7);
        RVec u(4), v(4);
        for (int i = 0; i < 4; ++i) {
            u[i] = rng.uniform(k, -1, 1, 140 + i);
            v[i] = rng.uniform(k, -1, 1, 150 + i);
        }
        return nijenhuis_residual(conn, x, w, u, v, 1e-4, true);
    });
    add_check(rep, "companion_negative_control", "Remark 2", n3, comp, 1e-2 * o.tol,
              comp > 1e-2 * o.tol, "pass requires the residual to exceed the threshold");
    return rep;
}

VerificationReport run_holo(const SymplecticConnection& conn, const Opts& o,
                            const std::string& fexpr, const std::string& sexpr) {
    VerificationReport rep;
    rep.command = "holo-residual";
    Rng rng(o.seed);
    if (!fexpr.empty()) {
        Expr f = parse_expr_ctx(fexpr, twistor_context());
        auto [res, n] = sweep(o.samples, [&](int k) {
            RVec x = conn.sample_point(rng, k);
            if (x.empty()) return -1.0;
            return holo_function_residual(conn, f, cplx(x[0], x[1]), rng.disk(k, 0.9, 3));
        });
        add_check(rep, "holo_function_residual", "Prop 3.3(i)", n, res, 1e-9 * o.tol,
                  res < 1e-9 * o.tol);
    }
    if (!sexpr.empty()) {
        Expr s = parse_expr(sexpr, 1);
        auto [res, n] = sweep(o.samples, [&](int k) {
            RVec x = conn.sample_point(rng, k);
            if (x.empty()) return -1.0;
            return holo_section_residual(conn, s, cplx(x[0], x[1]));
        });
        add_check(rep, "holo_section_residual", "Prop 3.3(ii)", n, res, 1e-9 * o.tol,
                  res < 1e-9 * o.tol);
    }
    if (rep.checks.empty()) throw CLI::ValidationError("holo-residual: provide --f or --section");
    return rep;
}

VerificationReport run_metric(const SymplecticConnection& conn, const Opts& o) {
    VerificationReport rep;
    rep.command = "metric-report";
    Rng rng(o.seed);
    MetricParams mp{o.t};
    if (conn.n != 1) throw std::runtime_error("metric-report: n = 1 charts only");

    double min_eig = 1e300, min_det = 1e300;
    double hv = 0, compat = 0;
    int n1 = 0;
    for (int k = 0; k < std::min(o.samples, 100); ++k) {
        RVec x = conn.sample_point(rng, k);
        if (x.empty()) continue;
        ++n1;
        TwistorPoint p = twistor_point(x, rng.disk(k, 0.85, 3));
        std::vector<TwistorTangent> basis;
        for (int b = 0; b < 4; ++b) basis.push_back(random_tangent_at(rng, k, p, 200 + 20 * b));
        RMat gram(4, 4), og(4, 4);
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) {
                auto mv = metric(conn, mp, p, basis[a], basis[b]);
                gram(a, b) = mv.inner;
                og(a, b) = mv.omega;
            }
        RMat gs(4, 4);
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) gs(a, b) = 0.5 * (gram(a, b) + gram(b, a));
        auto ev = jacobi_eigensolve(gs);
        min_eig = std::min(min_eig, ev.front());
        // Gram determinant of the 2-form on the same basis
        double det = og(0, 1) * og(2, 3) - og(0, 2) * og(1, 3) + og(0, 3) * og(1, 2);
        min_det = std::min(min_det, std::abs(det));  // pfaffian of the antisymmetric Gram
        RVec X = {rng.uniform(k, -1, 1, 301), rng.uniform(k, -1, 1, 302)};
        TwistorTangent hlift = horizontal_lift(conn, p, X);
        TwistorTangent vert{{0.0, 0.0}, vertical_basis(p.j.j)[0]};
        hv = std::max(hv, std::abs(metric(conn, mp, p, hlift, vert).inner));
        TwistorTangent u = random_tangent_at(rng, k, p, 320);
        TwistorTangent v = random_tangent_at(rng, k, p, 340);
        double o1 = metric(conn, mp, p, u, v).omega;
        double o2 = metric(conn, mp, p, acs_apply(conn, p, u), acs_apply(conn, p, v)).omega;
        compat = std::max(compat, std::abs(o1 - o2));
    }
    add_check(rep, "metric_positive", "Lemma 5.1", n1, std::max(0.0, -min_eig), 1e-12 * o.tol,
              min_eig > 0.0, "value is the positivity violation; minimum eigenvalue " +
                                 std::to_string(min_eig));
    add_check(rep, "h_perp_v", "H perp V", n1, hv, 1e-12 * o.tol, hv < 1e-12 * o.tol);
    add_check(rep, "form_nondegenerate", "Lemma 5.1", n1, min_det, 1e-8 * o.tol,
              min_det > 1e-8 * o.tol, "pass requires the pfaffian to stay above the tolerance");
    add_check(rep, "form_compatible", "Lemma 5.1", n1, compat, 1e-10 * o.tol,
              compat < 1e-10 * o.tol);

    double rnorm = 0.0;
    for (int k = 0; k < 30; ++k) {
        RVec x = conn.sample_point(rng, 4000 + k);
        if (!x.empty()) rnorm = std::max(rnorm, max_curvature_norm(conn, x));
    }
    bool flat = rnorm < 1e-10;

    int nd = std::min(o.samples, 50);
    auto [dtau, n2] = sweep(nd, [&](int k) {
        RVec x = conn.sample_point(rng, k);
        if (x.empty()) return -1.0;
        cplx w = rng.disk(k, 0.7, 11);
        RVec q4 = {x[0], x[1], w.real(), w.imag()};
        TwistorPoint p = chart_point(q4);
        TwistorTangent u = random_tangent_at(rng, k, p, 400);
        TwistorTangent v = random_tangent_at(rng, k, p, 420);
        TwistorTangent wt = random_tangent_at(rng, k, p, 440);
        return dtau_residual(conn, q4, u, v, wt);
    });
    double dtau_tol = (flat ? 1e-6 : 5e-4) * o.tol;
    add_check(rep, "dtau_trace_formula", "Prop 5.1", n2, dtau, dtau_tol, dtau < dtau_tol);

    auto cls = closedness_check(conn, mp, std::min(o.samples, 40), o.seed);
    bool closed_ok = (cls.max_domega < 1e-6 * o.tol && cls.max_curvature < 1e-10) ||
                     (cls.max_domega > 1e-3 && cls.max_curvature > 1e-6);
    {
        char note[170];
        std::snprintf(note, sizeof note, "max |dOmega| = %.3e, max |R| = %.3e; %s", cls.max_domega,
                      cls.max_curvature,
                      flat ? "flat case demands a closed form"
                           : "curved case demands both to stay away from zero");
        add_check(rep, "closed_iff_flat", "Thm 5.2", cls.samples, cls.max_domega, 1e-6 * o.tol,
                  closed_ok, note);
    }

    int nl = std::min(o.samples, 25);
    auto [lct, n3] = sweep(nl, [&](int k) {
        RVec x = conn.sample_point(rng, k);
        if (x.empty()) return -1.0;
        cplx w = rng.disk(k, 0.6, 13);
        RVec q4 = {x[0], x[1], w.real(), w.imag()};
        TwistorPoint p = chart_point(q4);
        RVec cu(4), cv(4);
        for (int i = 0; i < 4; ++i) {
            cu[i] = rng.uniform(k, -1, 1, 500 + i);
            cv[i] = rng.uniform(k, -1, 1, 510 + i);
        }
        ChartField fu = constant_chart_field(cu);
        ChartField fv = constant_chart_field(cv);
        TwistorTangent duv = levi_civita(conn, mp, q4, fu(q4), fv);
        TwistorTangent dvu = levi_civita(conn, mp, q4, fv(q4), fu);
        return tangent_norm(tangent_sub(duv, dvu));
    });
    add_check(rep, "lc_torsion_free", "Thm 5.3", n3, lct, 1e-6 * o.tol, lct < 1e-6 * o.tol);

    auto [lcm, n4] = sweep(nl, [&](int k) {
        RVec x = conn.sample_point(rng, k);
        if (x.empty()) return -1.0;
        cplx w = rng.disk(k, 0.6, 17);
        RVec q4 = {x[0], x[1], w.real(), w.imag()};
        TwistorPoint p = chart_point(q4);
        RVec cu(4), cy(4), cz(4);
        for (int i = 0; i < 4; ++i) {
            cu[i] = rng.uniform(k, -1, 1, 520 + i);
            cy[i] = rng.uniform(k, -1, 1, 530 + i);
            cz[i] = rng.uniform(k, -1, 1, 540 + i);
        }
        ChartField fy = constant_chart_field(cy);
        ChartField fz = constant_chart_field(cz);
        const double h = 1e-5;
        RVec hi = q4, lo = q4;
        for (int i = 0; i < 4; ++i) {
            hi[i] += h * cu[i];
            lo[i] -= h * cu[i];
        }
        double dg = (metric(conn, mp, chart_point(hi), fy(hi), fz(hi)).inner -
                     metric(conn, mp, chart_point(lo), fy(lo), fz(lo)).inner) /
                    (2 * h);
        TwistorTangent u0 = constant_chart_field(cu)(q4);
        TwistorTangent dy = levi_civita(conn, mp, q4, u0, fy, h);
        TwistorTangent dz = levi_civita(conn, mp, q4, u0, fz, h);
        double want =
            metric(conn, mp, p, dy, fz(q4)).inner + metric(conn, mp, p, fy(q4), dz).inner;
        return std::abs(dg - want);
    });
    add_check(rep, "lc_metric_compatible", "Thm 5.3", n4, lcm, 1e-6 * o.tol, lcm < 1e-6 * o.tol);

    auto [geo, n5] = sweep(nl, [&](int k) {
        RVec x = conn.sample_point(rng, k);
        if (x.empty()) return -1.0;
        cplx w = rng.disk(k, 0.6, 19);
        RVec q4 = {x[0], x[1], w.real(), w.imag()};
        RVec cu = {0.0, 0.0, rng.uniform(k, -1, 1, 550), rng.uniform(k, -1, 1, 551)};
        RVec cv = {0.0, 0.0, rng.uniform(k, -1, 1, 552), rng.uniform(k, -1, 1, 553)};
        TwistorTangent duv =
            levi_civita(conn, mp, q4, constant_chart_field(cu)(q4), constant_chart_field(cv));
        return std::abs(duv.base[0]) + std::abs(duv.base[1]);
    });
    add_check(rep, "fibres_totally_geodesic", "Thm 5.3(ii)", n5, geo, 1e-6 * o.tol,
              geo < 1e-6 * o.tol);

    if (flat) {
        auto [dj, n6] = sweep(nl, [&](int k) {
            RVec x = conn.sample_point(rng, k);
            if (x.empty()) return -1.0;
            cplx w = rng.disk(k, 0.6, 23);
            RVec q4 = {x[0], x[1], w.real(), w.imag()};
            TwistorPoint p = chart_point(q4);
            RVec cu(4), cw(4);
            for (int i = 0; i < 4; ++i) {
                cu[i] = rng.uniform(k, -1, 1, 560 + i);
                cw[i] = rng.uniform(k, -1, 1, 570 + i);
            }
            ChartField fw = constant_chart_field(cw);
            ChartField jfw = [&conn, fw](const RVec& q) {
                return acs_apply(conn, chart_point(q), fw(q));
            };
            TwistorTangent u0 = constant_chart_field(cu)(q4);
            TwistorTangent lhs = levi_civita(conn, mp, q4, u0, jfw);
            TwistorTangent rhs = acs_apply(conn, p, levi_civita(conn, mp, q4, u0, fw));
            return tangent_norm(tangent_sub(lhs, rhs));
        });
        add_check(rep, "structure_parallel_flat", "Thm 5.3(iii)", n6, dj, 1e-6 * o.tol,
                  dj < 1e-6 * o.tol);

        // curvature signs on the flat chart
        double sign_viol = 0.0;
        int n7 = 0;
        for (int k = 0; k < 25; ++k) {
            cplx w = rng.disk(k, 0.7, 29);
            RMat j = fibre_to_matrix(w).j;
            RMat Om = omega_matrix(1);
            RVec X = {rng.uniform(k, 0.2, 1, 601), rng.uniform(k, -1, 1, 602)};
            double nx = std::sqrt(mp.t * omega(Om, X, j.apply(X)));
            for (double& c : X) c /= nx;
            RVec Y = j.apply(X);
            double kh = sectional_curvature(mp, j, X, Y, RMat(2, 2), RMat(2, 2));
            auto vb = vertical_basis(j);
            RMat A = 2.0 * vb[0], B = 2.0 * vb[1];
            double kv = sectional_curvature(mp, j, {0, 0}, {0, 0}, A, B);
            if (kh <= 0.0) sign_viol = std::max(sign_viol, -kh + 1.0);
            if (kv >= 0.0) sign_viol = std::max(sign_viol, kv + 1.0);
            ++n7;
        }
        add_check(rep, "curvature_sign_pattern", "5.1", n7, sign_viol, 1e-12, sign_viol == 0.0,
                  "horizontal planes positive, vertical planes negative");
    }
    return rep;
}

VerificationReport run_flat_solve(const std::string& abcd, const Opts& o) {
    VerificationReport rep;
    rep.command = "flat-solve";
    double v[4];
    std::stringstream ss(abcd);
    std::string tok;
    int idx = 0;
    while (std::getline(ss, tok, ',') && idx < 4) v[idx++] = std::stod(tok);
    if (idx != 4) throw CLI::ValidationError("--abcd expects four comma-separated numbers");
    rep.input["abcd"] = {v[0], v[1], v[2], v[3]};

    auto cls = ti_flat_classify(v[0], v[1], v[2], v[3]);
    add_check(rep, "curve_classification", "2.1 curve", 1, 0.0, 0.0, true,
              std::string("on_curve = ") + (cls.on_curve ? "true" : "false") +
                  ", excluded_point = " + (cls.excluded_point ? "true" : "false"));

    auto A = one_form_from_abcd(v[0], v[1], v[2], v[3]);
    double sym = std::max(A.sp_residual(), A.total_symmetry_residual());
    add_check(rep, "sp_and_symmetry", "Prop 2.1", 1, sym, 1e-12 * o.tol, sym < 1e-12 * o.tol);

    double prod = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) prod = std::max(prod, (A.A[i] * A.A[j]).max_abs());
    add_check(rep, "nilpotency", "Thm 2.3", 4, prod, 1e-12 * o.tol, prod < 1e-12 * o.tol,
              "A(X)A(Y) = 0 characterizes the flat translation-invariant forms");
    if (prod >= 1e-12 * o.tol) return rep;  // remaining steps require flatness

    auto conn = from_constant_A(A.A);
    double rn = max_curvature_norm(conn, {0.3, -0.2});
    add_check(rep, "curvature_zero", "Thm 2.3", 1, rn, 1e-10 * o.tol, rn < 1e-10 * o.tol);

    Diffeo s = ti_flat_sigma(A);
    rep.input["sigma"] = {s.fwd[0].str(), s.fwd[1].str()};
    double jac = 0.0;
    for (double x = -1.0; x <= 1.0; x += 0.5)
        for (double y = -1.0; y <= 1.0; y += 0.5) {
            RVec p = {x, y};
            RMat want = RMat::identity(2) - A.at(s.apply(p));
            jac = std::max(jac, (want - s.jacobian(p)).max_abs());
        }
    add_check(rep, "sigma_jacobian_identity", "Thm 2.3", 25, jac, 1e-13 * o.tol,
              jac < 1e-13 * o.tol,
              "sigma = (" + s.fwd[0].str() + ", " + s.fwd[1].str() + ")");

    auto pulled = pullback(s, preset_connection("trivial"));
    Rng rng(o.seed);
    double pb = 0.0;
    for (uint64_t k = 0; k < 20; ++k) {
        RVec p = {rng.uniform(k, -1.2, 1.2, 21), rng.uniform(k, -1.2, 1.2, 22)};
        for (int i = 0; i < 2; ++i)
            pb = std::max(pb, (pulled.christoffel(p, i) - A.A[i]).max_abs());
    }
    add_check(rep, "sigma_pullback_matches", "Thm 2.3", 20, pb, 1e-9 * o.tol, pb < 1e-9 * o.tol);

    FrameMap g = exp_frame(A);
    double tri = 0.0;
    for (uint64_t k = 0; k < 10; ++k) {
        RVec p = {rng.uniform(k, -1, 1, 31), rng.uniform(k, -1, 1, 32)};
        tri = std::max(tri, frame_flat_residual(conn, g, p));
        tri = std::max(tri, jacobian_equation_residual(s, g, p));
    }
    add_check(rep, "frame_triangle", "Prop 2.2", 10, tri, 1e-8 * o.tol, tri < 1e-8 * o.tol);
    return rep;
}

struct LeviOpts {
    std::string phi = "oka:1";
    std::string wref;
    std::string psi;
    bool stein = false;
    std::string base_grid = "15x15";
    int fibre_grid = 12;
    double wmax = 0.95;
    std::string base_box;
};

VerificationReport run_levi(const Opts& o, const LeviOpts& lo) {
    VerificationReport rep;
    rep.command = "levi-scan";
    ExhaustionSpec spec;
    ScanGrid grid;
    int required = 1;
    if (lo.stein) {
        spec = stein_exhaustion();
        grid.base_lo = -0.9;
        grid.base_hi = 0.9;
        required = 2;
        rep.input["psi"] = "abs2(xi) + h(w)";
    } else if (!lo.psi.empty()) {
        spec = custom_exhaustion(parse_expr_ctx(lo.psi, chart_context()));
        rep.input["psi"] = lo.psi;
    } else if (lo.phi.rfind("oka:", 0) == 0) {
        double eps = std::stod(lo.phi.substr(4));
        spec = default_exhaustion(eps);
        grid.base_lo = -0.65 * eps;
        grid.base_hi = 0.65 * eps;
        rep.input["phi"] = lo.phi;
    } else {
        spec.phi = parse_expr(lo.phi, 1);
        spec.w_ref = Expr::number(0.0, 2);
        rep.input["phi"] = lo.phi;
    }
    if (!lo.wref.empty()) {
        spec.w_ref = parse_expr(lo.wref, 1);
        rep.input["wref"] = lo.wref;
    }
    auto xpos = lo.base_grid.find('x');
    grid.base_n = std::stoi(lo.base_grid.substr(0, xpos));
    grid.fibre_n = lo.fibre_grid;
    grid.wmax = lo.wmax;
    if (!lo.base_box.empty()) {
        auto cpos = lo.base_box.find(':');
        if (cpos == std::string::npos)
            throw CLI::ValidationError("--base-box expects lo:hi");
        grid.base_lo = std::stod(lo.base_box.substr(0, cpos));
        grid.base_hi = std::stod(lo.base_box.substr(cpos + 1));
    }
    rep.input["base_grid"] = grid.base_n;
    rep.input["fibre_grid"] = grid.fibre_n;
    rep.input["wmax"] = grid.wmax;

    auto scan = completeness_scan(spec, grid, o.verbose);
    char note[200];
    std::snprintf(note, sizeof note,
                  "min positive count %d, max %d over %d points; min eigenvalue %.3e; max psi %.3e",
                  scan.min_positive_count, scan.max_positive_count, scan.grid_points,
                  scan.min_eigenvalue_seen, scan.max_psi);
    add_check(rep, "positive_count_certificate", "Thm 6.2", scan.grid_points,
              static_cast<double>(scan.min_positive_count), static_cast<double>(required),
              scan.min_positive_count >= required, note);
    add_check(rep, "stein_strength", "Example 1.1", scan.grid_points,
              static_cast<double>(scan.min_positive_count), 2.0, true,
              scan.stein ? "Stein-strength count achieved"
                         : "reported only; count below the Stein threshold");
    if (o.verbose) {
        nlohmann::json evs = nlohmann::json::array();
        for (double e : scan.eigenvalues_flat) evs.push_back(e);
        rep.payload["eigenvalues"] = evs;
    }
    return rep;
}

int finish(VerificationReport& rep, const Opts& o,
           std::chrono::steady_clock::time_point start) {
    rep.seed = o.seed;
    rep.tol_scale = o.tol;
    rep.t = o.t;
    rep.samples = o.samples;
    rep.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                            start)
                      .count();
    if (o.json)
        std::cout << rep.to_json().dump(2) << "\n";
    else
        std::cout << rep.human_table();
    if (rep.overall_pass()) return 0;
    for (const auto& c : rep.checks)
        if (!c.pass) {
            std::cerr << "failed check: " << c.id << " (residual " << c.max_residual
                      << ", tolerance " << c.tolerance << ")\n";
            break;
        }
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"symplectic twistor geometry workbench"};
    app.require_subcommand(1);

    Opts o;
    std::string abcd, fexpr, sexpr;
    LeviOpts lo;

    auto* analyze = app.add_subcommand("analyze-connection", "structural residuals and curvature");
    add_common(analyze, o);
    auto* flats = app.add_subcommand("flat-solve", "flat translation-invariant classification");
    add_common(flats, o);
    flats->add_option("--abcd", abcd, "constant coefficients a,b,c,d")->required();
    auto* acs = app.add_subcommand("twistor-acs", "induced structure checks");
    add_common(acs, o);
    auto* integ = app.add_subcommand("check-integrability", "Eq. (4) and Nijenhuis residuals");
    add_common(integ, o);
    auto* holo = app.add_subcommand("holo-residual", "holomorphic function/section residuals");
    add_common(holo, o);
    holo->add_option("--f", fexpr, "function of (z, zb, w, wb)");
    holo->add_option("--section", sexpr, "section w(z) of (z, zb)");
    auto* met = app.add_subcommand("metric-report", "Hermitian structure residual suite");
    add_common(met, o);
    auto* levi = app.add_subcommand("levi-scan", "Levi-form positivity scan");
    add_common(levi, o);
    levi->add_option("--phi", lo.phi, "base exhaustion: oka:EPS or an expression of (x, y)");
    levi->add_option("--wref", lo.wref, "reference section expression of (z)");
    levi->add_option("--psi", lo.psi, "custom chart function of (xi, w)");
    levi->add_flag("--stein", lo.stein, "use the Stein witness |xi|^2 + h");
    levi->add_option("--base-grid", lo.base_grid, "base grid NxN");
    levi->add_option("--fibre-grid", lo.fibre_grid, "fibre points per base point");
    levi->add_option("--wmax", lo.wmax, "fibre radius bound");
    levi->add_option("--base-box", lo.base_box, "base box lo:hi");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    auto start = std::chrono::steady_clock::now();
    try {
        VerificationReport rep;
        if (flats->parsed()) {
            rep = run_flat_solve(abcd, o);
        } else {
            nlohmann::json echo;
            if (levi->parsed()) {
                rep = run_levi(o, lo);
            } else {
                SymplecticConnection conn = load_connection(o, echo);
                if (analyze->parsed()) rep = run_analyze(conn, o);
                if (acs->parsed()) rep = run_twistor_acs(conn, o, o.preset);
                if (integ->parsed()) rep = run_integrability(conn, o);
                if (holo->parsed()) rep = run_holo(conn, o, fexpr, sexpr);
                if (met->parsed()) rep = run_metric(conn, o);
                rep.input.update(echo);
            }
        }
        return finish(rep, o, start);
    } catch (const CLI::ValidationError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const ExprError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
