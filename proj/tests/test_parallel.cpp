#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>

#include "stw/levi.hpp"
#include "stw/parallel.hpp"
#include "stw/rng.hpp"

using namespace stw;

TEST_CASE("parallel and serial drivers produce identical slot writes") {
    const int n = 10000;
    std::vector<double> a(n), b(n);
    Rng rng(7);
    auto kernel = [&rng](std::vector<double>& out) {
        return [&out, &rng](int i) { out[i] = rng.normal(i) * rng.uniform(i, 0.5, 2.0, 3); };
    };
    serial_for(n, kernel(a));
    parallel_for(n, kernel(b));
    for (int i = 0; i < n; ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("counter rng is order-independent") {
    Rng rng(123);
    std::vector<double> fwd(64), bwd(64);
    for (int i = 0; i < 64; ++i) fwd[i] = rng.uniform(i);
    for (int i = 63; i >= 0; --i) bwd[i] = rng.uniform(i);
    for (int i = 0; i < 64; ++i) CHECK(fwd[i] == bwd[i]);
}

TEST_CASE("levi scan kernel: parallel run matches a hand-rolled serial pass") {
    ScanGrid grid;
    grid.base_n = 6;
    grid.fibre_n = 6;
    grid.base_lo = -0.5;
    grid.base_hi = 0.5;
    auto spec = default_exhaustion(1.0);

    // the scan dispatches through run_for (OpenMP when available); replaying
    // the same per-point computation serially must give identical payloads
    auto rep = completeness_scan(spec, grid, true);
    Expr psi = spec.chart_expr();
    auto fibres = fibre_grid(grid.fibre_n, grid.wmax);
    size_t cursor = 0;
    int min_count = 3;
    for (int ix = 0; ix < grid.base_n; ++ix)
        for (int iy = 0; iy < grid.base_n; ++iy)
            for (int f = 0; f < grid.fibre_n; ++f) {
                double fx = ix / double(grid.base_n - 1);
                double fy = iy / double(grid.base_n - 1);
                cplx z(grid.base_lo + (grid.base_hi - grid.base_lo) * fx,
                       grid.base_lo + (grid.base_hi - grid.base_lo) * fy);
                cplx w = fibres[f];
                cplx xi = chart_xi(z, w);
                LeviValue lv = levi_form(psi, {xi.real(), xi.imag(), w.real(), w.imag()});
                REQUIRE(cursor + 1 < rep.eigenvalues_flat.size() + 1);
                CHECK(rep.eigenvalues_flat[cursor] == lv.eigenvalues[0]);
                CHECK(rep.eigenvalues_flat[cursor + 1] == lv.eigenvalues[1]);
                cursor += 2;
                min_count = std::min(min_count, lv.positive_count);
            }
    CHECK(min_count == rep.min_positive_count);
}
