#pragma once

#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace stw {

// Per-index kernels write to disjoint slots, so the parallel and serial
// drivers produce bit-identical results; the serial one is kept as the
// reference implementation for tests and as the fallback without OpenMP.

template <class F>
void serial_for(int n, F&& body) {
    for (int i = 0; i < n; ++i) body(i);
}

template <class F>
void parallel_for(int n, F&& body) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) body(i);
#else
    serial_for(n, body);
#endif
}

inline bool parallel_enabled() {
    static const bool off = std::getenv("STW_SERIAL") != nullptr;
    return !off;
}

// Dispatch honoring the STW_SERIAL environment switch.
template <class F>
void run_for(int n, F&& body) {
    if (parallel_enabled())
        parallel_for(n, body);
    else
        serial_for(n, body);
}

}  // namespace stw
