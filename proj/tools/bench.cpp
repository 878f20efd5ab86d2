// Benchmark: serial reference versus the OpenMP drivers on the two hottest
// sweep kernels (Levi grid scan, Eq.-(4) residual sweep).

#include <chrono>
#include <cstdio>
#include <vector>

#include "stw/connection.hpp"
#include "stw/levi.hpp"
#include "stw/parallel.hpp"
#include "stw/rng.hpp"
#include "stw/twistor.hpp"

using namespace stw;
using clock_type = std::chrono::steady_clock;

namespace {

double ms_since(clock_type::time_point t0) {
    return std::chrono::duration<double, std::milli>(clock_type::now() - t0).count();
}

template <class Driver>
double time_levi(Driver&& driver, const Expr& psi, const ScanGrid& grid,
                 std::vector<int>& counts) {
    auto fibres = fibre_grid(grid.fibre_n, grid.wmax);
    const int total = grid.base_n * grid.base_n * grid.fibre_n;
    counts.assign(total, 0);
    auto t0 = clock_type::now();
    driver(total, [&](int idx) {
        int f = idx % grid.fibre_n;
        int rem = idx / grid.fibre_n;
        int iy = rem % grid.base_n;
        int ix = rem / grid.base_n;
        double fx = ix / double(grid.base_n - 1);
        double fy = iy / double(grid.base_n - 1);
        cplx z(grid.base_lo + (grid.base_hi - grid.base_lo) * fx,
               grid.base_lo + (grid.base_hi - grid.base_lo) * fy);
        cplx w = fibres[f];
        cplx xi = chart_xi(z, w);
        counts[idx] =
            levi_form(psi, {xi.real(), xi.imag(), w.real(), w.imag()}).positive_count;
    });
    return ms_since(t0);
}

template <class Driver>
double time_eq4(Driver&& driver, const SymplecticConnection& conn, int n,
                std::vector<double>& out) {
    Rng rng(42);
    out.assign(n, 0.0);
    auto t0 = clock_type::now();
    driver(n, [&](int k) {
        RVec x = conn.sample_point(rng, k);
        if (x.empty()) return;
        TwistorPoint p = twistor_point(x, rng.disk(k, 0.9, 3));
        RVec X = {rng.uniform(k, -1, 1, 61), rng.uniform(k, -1, 1, 62)};
        RVec Y = {rng.uniform(k, -1, 1, 63), rng.uniform(k, -1, 1, 64)};
        out[k] = integrability_residual_eq4(conn, p, X, Y);
    });
    return ms_since(t0);
}

}  // namespace

int main() {
    ScanGrid grid;
    grid.base_n = 28;
    grid.fibre_n = 24;
    grid.base_lo = -0.6;
    grid.base_hi = 0.6;
    Expr psi = default_exhaustion(1.0).chart_expr();

    std::vector<int> c_serial, c_par;
    double t_serial = time_levi([](int n, auto&& f) { serial_for(n, f); }, psi, grid, c_serial);
    double t_par = time_levi([](int n, auto&& f) { parallel_for(n, f); }, psi, grid, c_par);
    bool same = c_serial == c_par;
    std::printf("levi scan  %5d pts : serial %8.2f ms | parallel %8.2f ms | speedup %.2fx | %s\n",
                grid.base_n * grid.base_n * grid.fibre_n, t_serial, t_par, t_serial / t_par,
                same ? "identical results" : "RESULTS DIFFER");

    auto sph = preset_connection("sphere");
    std::vector<double> r_serial, r_par;
    double e_serial = time_eq4([](int n, auto&& f) { serial_for(n, f); }, sph, 1500, r_serial);
    double e_par = time_eq4([](int n, auto&& f) { parallel_for(n, f); }, sph, 1500, r_par);
    bool same2 = r_serial == r_par;
    std::printf("eq4 sweep  %5d pts : serial %8.2f ms | parallel %8.2f ms | speedup %.2fx | %s\n",
                1500, e_serial, e_par, e_serial / e_par, same2 ? "identical results" : "RESULTS DIFFER");
    return (same && same2) ? 0 : 1;
}
