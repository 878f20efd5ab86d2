#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "stw/rng.hpp"
#include "stw/symplin.hpp"

using namespace stw;

namespace {

CMat random_symmetric(const Rng& rng, uint64_t k, int n, double scale) {
    CMat w(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b) {
            cplx v(rng.uniform(k, -1, 1, 100 + a * 7 + b), rng.uniform(k, -1, 1, 200 + a * 7 + b));
            w(a, b) = scale * v;
            w(b, a) = w(a, b);
        }
    return w;
}

CMat scale_to_opnorm(CMat w, double target) {
    auto ev = hermitian_eigenvalues(w * conj_transpose(w));
    double op = std::sqrt(std::max(0.0, ev.back()));
    if (op > 0) w *= cplx(target / op);
    return w;
}

}  // namespace

TEST_CASE("omega matrix basics") {
    RMat om = omega_matrix(2);
    CHECK(om(0, 1) == 1.0);
    CHECK(om(1, 0) == -1.0);
    CHECK((om + om.transposed()).frob() == 0.0);
    CHECK(omega(om, basis_vec(4, 0), basis_vec(4, 1)) == 1.0);
}

TEST_CASE("siegel membership: centre, boundary, random interior") {
    CMat z(1, 1);
    auto r0 = siegel_membership(z);
    CHECK(r0.inside);
    CHECK(r0.margin == doctest::Approx(1.0));

    CMat id = CMat::identity(2);
    auto r1 = siegel_membership(id);
    CHECK_FALSE(r1.inside);
    CHECK(std::abs(r1.margin) < 1e-12);

    Rng rng(21);
    for (uint64_t k = 0; k < 20; ++k) {
        CMat w = scale_to_opnorm(random_symmetric(rng, k, 2, 1.0), 0.9);
        auto r = siegel_membership(w);
        CHECK(r.inside);
    }

    CMat bad(2, 2);
    bad(0, 1) = 0.5;  // not symmetric
    CHECK_THROWS(siegel_membership(bad));
}

TEST_CASE("fibre_to_matrix at w = 0 is the standard structure") {
    CompatJ j0 = fibre_to_matrix(cplx(0, 0));
    CHECK(j0.j(0, 0) == doctest::Approx(0.0));
    CHECK(j0.j(1, 0) == doctest::Approx(1.0));   // j dx = dy
    CHECK(j0.j(0, 1) == doctest::Approx(-1.0));  // j dy = -dx
}

TEST_CASE("fibre_to_matrix eigenvector condition at w = 0.5") {
    CompatJ cj = fibre_to_matrix(cplx(0.5, 0.0));
    const cplx I(0, 1);
    // v = dzb + w dz in real components
    cplx w(0.5, 0.0);
    CVec v = {0.5 * (1.0 + w), 0.5 * I * (1.0 - w)};
    CMat jc = complexify(cj.j);
    CVec jv = jc.apply(v);
    for (int r = 0; r < 2; ++r) CHECK(std::abs(jv[r] - (-I) * v[r]) < 1e-12);
}

TEST_CASE("metric degenerates toward the rim like (1-|w|^2)") {
    for (double r : {0.9, 0.99}) {
        CompatJ cj = fibre_to_matrix(cplx(r, 0.0));
        auto res = compat_residuals(cj.j);
        // smallest eigenvalue of omega(., j.) at w = r is (1-r)/(1+r), vanishing at the rim
        CHECK(res.min_metric_eig > 0.0);
        CHECK(res.min_metric_eig == doctest::Approx((1 - r) / (1 + r)).epsilon(1e-9));
    }
}

TEST_CASE("matrix_to_fibre round trips") {
    Rng rng(31);
    for (uint64_t k = 0; k < 25; ++k) {
        cplx w = rng.disk(k, 0.93);
        CompatJ cj = fibre_to_matrix(w);
        cplx back = matrix_to_fibre_w(cj.j);
        CHECK(std::abs(back - w) < 1e-11);
        CMat W = matrix_to_fibre(cj.j);
        CHECK(std::abs(W(0, 0) - w) < 1e-10);
        CompatJ again = fibre_to_matrix(W);
        CHECK((again.j - cj.j).frob() < 1e-10);
    }
}

TEST_CASE("matrix_to_fibre round trips in n = 2") {
    Rng rng(37);
    for (uint64_t k = 0; k < 10; ++k) {
        CMat w = scale_to_opnorm(random_symmetric(rng, k, 2, 1.0), 0.8);
        CompatJ cj = fibre_to_matrix(w);
        CMat back = matrix_to_fibre(cj.j);
        CHECK((back - w).frob() < 1e-9);
    }
}

TEST_CASE("indefinite structure is rejected with a signature error") {
    // j = diag-block structure conjugated to flip signature: use -J0 which has
    // omega(., j.) negative definite
    CompatJ j0 = fibre_to_matrix(cplx(0, 0));
    RMat neg = -j0.j;
    CHECK_THROWS(matrix_to_fibre(neg));
}

TEST_CASE("type projections") {
    Rng rng(41);
    for (uint64_t k = 0; k < 15; ++k) {
        cplx w = rng.disk(k, 0.9);
        CompatJ cj = fibre_to_matrix(w);
        auto [jp, jm] = type_projections(cj.j);
        CHECK((jp + jm - CMat::identity(2)).frob() < 1e-13);
        CHECK((jp * jp - jp).frob() < 1e-12);
        CHECK((jp * jm).frob() < 1e-12);
        CMat jc = complexify(cj.j);
        CHECK((jc * jp - cplx(0, 1) * jp).frob() < 1e-12);
    }
    // j+ of J0 maps dx to the dz direction
    CompatJ j0 = fibre_to_matrix(cplx(0, 0));
    auto [jp, jm] = type_projections(j0.j);
    CVec e = {1.0, 0.0};
    CVec v = jp.apply(e);
    CHECK(std::abs(v[0] - cplx(0.5)) < 1e-14);
    CHECK(std::abs(v[1] - cplx(0, -0.5)) < 1e-14);
}

TEST_CASE("vertical basis: dimension, normalization, anticommutation") {
    Rng rng(43);
    for (int n : {1, 2}) {
        for (uint64_t k = 0; k < 6; ++k) {
            CMat w = scale_to_opnorm(random_symmetric(rng, k * 10 + n, n, 1.0), 0.7);
            CompatJ cj = fibre_to_matrix(w);
            auto basis = vertical_basis(cj.j);
            CHECK(static_cast<int>(basis.size()) == n * (n + 1));
            RMat Om = omega_matrix(n);
            for (size_t a = 0; a < basis.size(); ++a) {
                const RMat& A = basis[a];
                CHECK((Om * A + A.transposed() * Om).frob() < 1e-9);
                CHECK((A * cj.j + cj.j * A).frob() < 1e-9);
                CHECK(0.5 * (A * A).trace() == doctest::Approx(1.0).epsilon(1e-9));
                for (size_t b = a + 1; b < basis.size(); ++b)
                    CHECK(std::abs(0.5 * (A * basis[b]).trace()) < 1e-9);
                // orthogonality of m_J and the commuting part
                CHECK(std::abs((A * cj.j).trace()) < 1e-9);
            }
        }
    }
}

TEST_CASE("n=1, j=J0: vertical basis spans symmetric traceless matrices") {
    CompatJ j0 = fibre_to_matrix(cplx(0, 0));
    auto basis = vertical_basis(j0.j);
    REQUIRE(basis.size() == 2);
    for (const auto& A : basis) {
        CHECK(std::abs(A.trace()) < 1e-10);
        CHECK(std::abs(A(0, 1) - A(1, 0)) < 1e-10);
    }
}

TEST_CASE("[m,m] stays in the commuting part") {
    Rng rng(47);
    for (uint64_t k = 0; k < 10; ++k) {
        cplx w = rng.disk(k, 0.85);
        CompatJ cj = fibre_to_matrix(w);
        auto basis = vertical_basis(cj.j);
        RMat c = commutator(basis[0], basis[1]);
        CHECK((c * cj.j - cj.j * c).frob() < 1e-10);
    }
}

TEST_CASE("J+ A J+ B = 0 for vertical A, B") {
    Rng rng(53);
    for (uint64_t k = 0; k < 10; ++k) {
        cplx w = rng.disk(k, 0.85);
        CompatJ cj = fibre_to_matrix(w);
        auto basis = vertical_basis(cj.j);
        auto [jp, jm] = type_projections(cj.j);
        CMat A = complexify(basis[0]), B = complexify(basis[1]);
        CHECK((jp * A * jp * B).frob() < 1e-10);
    }
}

TEST_CASE("fibre chart derivatives at the origin") {
    FibreChart fc = fibre_chart(cplx(0, 0), 2);
    CHECK((fc.j - fibre_to_matrix(cplx(0, 0)).j).frob() < 1e-13);
    // dj/du at 0 = [[0,-2],[-2,0]], dj/dv at 0 = [[2,0],[0,-2]]
    CHECK(fc.dj[0](0, 1) == doctest::Approx(-2.0));
    CHECK(fc.dj[0](1, 0) == doctest::Approx(-2.0));
    CHECK(fc.dj[1](0, 0) == doctest::Approx(2.0));
    CHECK(fc.dj[1](1, 1) == doctest::Approx(-2.0));
}

TEST_CASE("fibre chart matches fibre_to_matrix away from origin") {
    Rng rng(59);
    for (uint64_t k = 0; k < 20; ++k) {
        cplx w = rng.disk(k, 0.9);
        FibreChart fc = fibre_chart(w, 0);
        CHECK((fc.j - fibre_to_matrix(w).j).frob() < 1e-11);
    }
}

TEST_CASE("dw functional inverts the chart differentials") {
    Rng rng(61);
    for (uint64_t k = 0; k < 20; ++k) {
        cplx w = rng.disk(k, 0.9);
        FibreChart fc = fibre_chart(w, 1);
        RMat j = fc.j;
        CHECK(std::abs(dw_of(j, complexify(fc.dj[0])) - cplx(1, 0)) < 1e-11);
        CHECK(std::abs(dw_of(j, complexify(fc.dj[1])) - cplx(0, 1)) < 1e-11);
        CHECK(std::abs(dwbar_of(j, complexify(fc.dj[0])) - cplx(1, 0)) < 1e-11);
        CHECK(std::abs(dwbar_of(j, complexify(fc.dj[1])) - cplx(0, -1)) < 1e-11);
        CHECK(std::abs(matrix_to_fibre_w(j) - w) < 1e-11);
    }
}
