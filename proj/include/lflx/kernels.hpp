#pragma once

#include <complex>
#include <cstddef>

// Data-parallel inner loops behind the field operations: one scalar
// reference implementation and an AVX2/FMA variant selected at runtime.
// Both backends are exposed so the test suite can check equivalence.

namespace lflx::kern {

using cplx = std::complex<double>;

struct Backend {
    const char* name;

    // complex pointwise (real multiplier tables act on both re and im)
    void (*scale_table)(cplx* x, const double* m, std::size_t n);  // x *= m
    // out = e*(x + s*k)
    void (*ef_scale_add)(cplx* out, const double* e, const cplx* x, double s, const cplx* k,
                         std::size_t n);
    // out = e*x + s*k
    void (*ef_axpb)(cplx* out, const double* e, const cplx* x, double s, const cplx* k,
                    std::size_t n);
    // out = e2*x + s*(eh*k)
    void (*ef_axpb2)(cplx* out, const double* e2, const cplx* x, double s, const double* eh,
                     const cplx* k, std::size_t n);
    // u = e2*u + (dt/6)*(e2*k1 + 2*eh*(k2 + k3) + k4)
    void (*rk4_combine)(cplx* u, const double* eh, const double* e2, const cplx* k1,
                        const cplx* k2, const cplx* k3, const cplx* k4, double dt, std::size_t n);

    // real pointwise
    void (*mul)(double* w, const double* a, const double* b, std::size_t n);    // w = a*b
    void (*fmadd)(double* w, const double* a, const double* b, std::size_t n);  // w += a*b
    void (*fmsub)(double* w, const double* a, const double* b, std::size_t n);  // w -= a*b
    void (*mag_sq_d2)(double* w, const double* x, const double* y, std::size_t n);
    void (*mag_sq_d3)(double* w, const double* x, const double* y, const double* z,
                      std::size_t n);

    // reductions
    double (*sum)(const double* a, std::size_t n);
    double (*sum_abs)(const double* a, std::size_t n);
    double (*sum_sq)(const double* a, std::size_t n);
    double (*sum_abs_cube)(const double* a, std::size_t n);
    double (*sum_sqrt)(const double* a, std::size_t n);     // sum of sqrt(a), a >= 0
    double (*sum_x_sqrtx)(const double* a, std::size_t n);  // sum of a*sqrt(a), a >= 0
    double (*dot)(const double* a, const double* b, std::size_t n);
    double (*max_val)(const double* a, std::size_t n);
    double (*max_abs)(const double* a, std::size_t n);

    // spectral reductions (weights are per-mode real tables)
    double (*sum_sq_mag)(const cplx* a, std::size_t n);
    double (*sum_wsq_mag)(const cplx* a, const double* w, std::size_t n);
    // sum of w * Re(conj(a) * b)
    double (*sum_wdot)(const cplx* a, const cplx* b, const double* w, std::size_t n);

    // structure-function accumulators: sum over points of |a - b|^p with the
    // Euclidean magnitude over components, p in {2, 3}
    double (*incr_sq_d2)(const double* ax, const double* ay, const double* bx, const double* by,
                         std::size_t n);
    double (*incr_cube_d2)(const double* ax, const double* ay, const double* bx, const double* by,
                           std::size_t n);
    double (*incr_sq_d3)(const double* ax, const double* ay, const double* az, const double* bx,
                         const double* by, const double* bz, std::size_t n);
    double (*incr_cube_d3)(const double* ax, const double* ay, const double* az, const double* bx,
                           const double* by, const double* bz, std::size_t n);
};

const Backend& scalar_backend();
const Backend& avx2_backend();  // only valid when avx2_available()
bool avx2_available();

/// Active backend: AVX2 when the CPU supports it, else scalar.
/// LFLX_SIMD=scalar|avx2 in the environment overrides the default.
const Backend& active();

/// Force a backend by name ("scalar", "avx2", "auto"); throws if unavailable.
void set_backend(const char* name);

}  // namespace lflx::kern
