#include <cmath>

#include "lflx/kernels.hpp"

#if defined(__x86_64__) || defined(__i386__)
#define LFLX_X86 1
#include <immintrin.h>
#else
#define LFLX_X86 0
#endif

// AVX2/FMA variants of the reference kernels. Complex arrays are treated as
// interleaved doubles, two complex values (one 256-bit lane group) per
// iteration; per-mode real tables are duplicated across re/im slots.
// Compiled with -mavx2 -mfma; callers must gate on avx2_available().

namespace lflx::kern {

bool avx2_available() {
#if LFLX_X86
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

}  // namespace lflx::kern

#if LFLX_X86

namespace lflx::kern::avx2 {

namespace {

// (m0, m1) -> (m0, m0, m1, m1)
inline __m256d dup2(const double* m) {
    return _mm256_permute4x64_pd(_mm256_castpd128_pd256(_mm_loadu_pd(m)), 0x50);
}

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

inline double hmax(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_max_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_max_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

inline __m256d abs_pd(__m256d v) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v); }

}  // namespace

void scale_table(cplx* x, const double* m, std::size_t n) {
    double* xd = reinterpret_cast<double*>(x);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d v = _mm256_loadu_pd(xd + 2 * i);
        _mm256_storeu_pd(xd + 2 * i, _mm256_mul_pd(v, dup2(m + i)));
    }
    for (; i < n; ++i) x[i] *= m[i];
}

void ef_scale_add(cplx* out, const double* e, const cplx* x, double s, const cplx* k,
                  std::size_t n) {
    double* od = reinterpret_cast<double*>(out);
    const double* xd = reinterpret_cast<const double*>(x);
    const double* kd = reinterpret_cast<const double*>(k);
    const __m256d sv = _mm256_set1_pd(s);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d xv = _mm256_loadu_pd(xd + 2 * i);
        __m256d kv = _mm256_loadu_pd(kd + 2 * i);
        __m256d r = _mm256_mul_pd(dup2(e + i), _mm256_fmadd_pd(sv, kv, xv));
        _mm256_storeu_pd(od + 2 * i, r);
    }
    for (; i < n; ++i) out[i] = e[i] * (x[i] + s * k[i]);
}

void ef_axpb(cplx* out, const double* e, const cplx* x, double s, const cplx* k, std::size_t n) {
    double* od = reinterpret_cast<double*>(out);
    const double* xd = reinterpret_cast<const double*>(x);
    const double* kd = reinterpret_cast<const double*>(k);
    const __m256d sv = _mm256_set1_pd(s);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d xv = _mm256_loadu_pd(xd + 2 * i);
        __m256d kv = _mm256_loadu_pd(kd + 2 * i);
        __m256d r = _mm256_fmadd_pd(dup2(e + i), xv, _mm256_mul_pd(sv, kv));
        _mm256_storeu_pd(od + 2 * i, r);
    }
    for (; i < n; ++i) out[i] = e[i] * x[i] + s * k[i];
}

void ef_axpb2(cplx* out, const double* e2, const cplx* x, double s, const double* eh,
              const cplx* k, std::size_t n) {
    double* od = reinterpret_cast<double*>(out);
    const double* xd = reinterpret_cast<const double*>(x);
    const double* kd = reinterpret_cast<const double*>(k);
    const __m256d sv = _mm256_set1_pd(s);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d xv = _mm256_loadu_pd(xd + 2 * i);
        __m256d kv = _mm256_loadu_pd(kd + 2 * i);
        __m256d ekv = _mm256_mul_pd(dup2(eh + i), kv);
        __m256d r = _mm256_fmadd_pd(dup2(e2 + i), xv, _mm256_mul_pd(sv, ekv));
        _mm256_storeu_pd(od + 2 * i, r);
    }
    for (; i < n; ++i) out[i] = e2[i] * x[i] + s * (eh[i] * k[i]);
}

void rk4_combine(cplx* u, const double* eh, const double* e2, const cplx* k1, const cplx* k2,
                 const cplx* k3, const cplx* k4, double dt, std::size_t n) {
    double* ud = reinterpret_cast<double*>(u);
    const double* k1d = reinterpret_cast<const double*>(k1);
    const double* k2d = reinterpret_cast<const double*>(k2);
    const double* k3d = reinterpret_cast<const double*>(k3);
    const double* k4d = reinterpret_cast<const double*>(k4);
    const double w = dt / 6.0;
    const __m256d wv = _mm256_set1_pd(w);
    const __m256d two = _mm256_set1_pd(2.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d e2v = dup2(e2 + i);
        __m256d ehv = dup2(eh + i);
        __m256d uv = _mm256_loadu_pd(ud + 2 * i);
        __m256d k1v = _mm256_loadu_pd(k1d + 2 * i);
        __m256d k2v = _mm256_loadu_pd(k2d + 2 * i);
        __m256d k3v = _mm256_loadu_pd(k3d + 2 * i);
        __m256d k4v = _mm256_loadu_pd(k4d + 2 * i);
        __m256d mid = _mm256_mul_pd(two, _mm256_mul_pd(ehv, _mm256_add_pd(k2v, k3v)));
        __m256d acc = _mm256_fmadd_pd(e2v, k1v, mid);
        acc = _mm256_add_pd(acc, k4v);
        __m256d r = _mm256_fmadd_pd(e2v, uv, _mm256_mul_pd(wv, acc));
        _mm256_storeu_pd(ud + 2 * i, r);
    }
    for (; i < n; ++i)
        u[i] = e2[i] * u[i] + w * (e2[i] * k1[i] + 2.0 * eh[i] * (k2[i] + k3[i]) + k4[i]);
}

void mul(double* w, const double* a, const double* b, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(w + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    for (; i < n; ++i) w[i] = a[i] * b[i];
}

void fmadd(double* w, const double* a, const double* b, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d r = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i),
                                    _mm256_loadu_pd(w + i));
        _mm256_storeu_pd(w + i, r);
    }
    for (; i < n; ++i) w[i] += a[i] * b[i];
}

void fmsub(double* w, const double* a, const double* b, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d r = _mm256_fnmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i),
                                     _mm256_loadu_pd(w + i));
        _mm256_storeu_pd(w + i, r);
    }
    for (; i < n; ++i) w[i] -= a[i] * b[i];
}

void mag_sq_d2(double* w, const double* x, const double* y, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d xv = _mm256_loadu_pd(x + i);
        __m256d yv = _mm256_loadu_pd(y + i);
        _mm256_storeu_pd(w + i, _mm256_fmadd_pd(xv, xv, _mm256_mul_pd(yv, yv)));
    }
    for (; i < n; ++i) w[i] = x[i] * x[i] + y[i] * y[i];
}

void mag_sq_d3(double* w, const double* x, const double* y, const double* z, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d xv = _mm256_loadu_pd(x + i);
        __m256d yv = _mm256_loadu_pd(y + i);
        __m256d zv = _mm256_loadu_pd(z + i);
        __m256d r = _mm256_fmadd_pd(xv, xv, _mm256_fmadd_pd(yv, yv, _mm256_mul_pd(zv, zv)));
        _mm256_storeu_pd(w + i, r);
    }
    for (; i < n; ++i) w[i] = x[i] * x[i] + y[i] * y[i] + z[i] * z[i];
}

double sum(const double* a, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + i));
    double s = hsum(acc);
    for (; i < n; ++i) s += a[i];
    return s;
}

double sum_abs(const double* a, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, abs_pd(_mm256_loadu_pd(a + i)));
    double s = hsum(acc);
    for (; i < n; ++i) s += std::fabs(a[i]);
    return s;
}

double sum_sq(const double* a, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d v = _mm256_loadu_pd(a + i);
        acc = _mm256_fmadd_pd(v, v, acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += a[i] * a[i];
    return s;
}

double sum_abs_cube(const double* a, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d v = abs_pd(_mm256_loadu_pd(a + i));
        acc = _mm256_fmadd_pd(_mm256_mul_pd(v, v), v, acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) {
        double m = std::fabs(a[i]);
        s += m * m * m;
    }
    return s;
}

double sum_sqrt(const double* a, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_sqrt_pd(_mm256_loadu_pd(a + i)));
    double s = hsum(acc);
    for (; i < n; ++i) s += std::sqrt(a[i]);
    return s;
}

double sum_x_sqrtx(const double* a, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d v = _mm256_loadu_pd(a + i);
        acc = _mm256_fmadd_pd(v, _mm256_sqrt_pd(v), acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += a[i] * std::sqrt(a[i]);
    return s;
}

double dot(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
    double s = hsum(acc);
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

double max_val(const double* a, std::size_t n) {
    if (n == 0) return 0.0;
    double m = a[0];
    std::size_t i = 0;
    if (n >= 4) {
        __m256d acc = _mm256_loadu_pd(a);
        for (i = 4; i + 4 <= n; i += 4) acc = _mm256_max_pd(acc, _mm256_loadu_pd(a + i));
        m = hmax(acc);
    }
    for (; i < n; ++i) m = a[i] > m ? a[i] : m;
    return m;
}

double max_abs(const double* a, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_max_pd(acc, abs_pd(_mm256_loadu_pd(a + i)));
    double m = hmax(acc);
    for (; i < n; ++i) {
        double v = std::fabs(a[i]);
        m = v > m ? v : m;
    }
    return m;
}

double sum_sq_mag(const cplx* a, std::size_t n) {
    const double* ad = reinterpret_cast<const double*>(a);
    return sum_sq(ad, 2 * n);
}

double sum_wsq_mag(const cplx* a, const double* w, std::size_t n) {
    const double* ad = reinterpret_cast<const double*>(a);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d v = _mm256_loadu_pd(ad + 2 * i);
        acc = _mm256_fmadd_pd(_mm256_mul_pd(v, v), dup2(w + i), acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += w[i] * std::norm(a[i]);
    return s;
}

double sum_wdot(const cplx* a, const cplx* b, const double* w, std::size_t n) {
    const double* ad = reinterpret_cast<const double*>(a);
    const double* bd = reinterpret_cast<const double*>(b);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d av = _mm256_loadu_pd(ad + 2 * i);
        __m256d bv = _mm256_loadu_pd(bd + 2 * i);
        acc = _mm256_fmadd_pd(_mm256_mul_pd(av, bv), dup2(w + i), acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i)
        s += w[i] * (a[i].real() * b[i].real() + a[i].imag() * b[i].imag());
    return s;
}

double incr_sq_d2(const double* ax, const double* ay, const double* bx, const double* by,
                  std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(ax + i), _mm256_loadu_pd(bx + i));
        __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ay + i), _mm256_loadu_pd(by + i));
        acc = _mm256_add_pd(acc, _mm256_fmadd_pd(dx, dx, _mm256_mul_pd(dy, dy)));
    }
    double s = hsum(acc);
    for (; i < n; ++i) {
        double dx = ax[i] - bx[i], dy = ay[i] - by[i];
        s += dx * dx + dy * dy;
    }
    return s;
}

double incr_cube_d2(const double* ax, const double* ay, const double* bx, const double* by,
                    std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(ax + i), _mm256_loadu_pd(bx + i));
        __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ay + i), _mm256_loadu_pd(by + i));
        __m256d m2 = _mm256_fmadd_pd(dx, dx, _mm256_mul_pd(dy, dy));
        acc = _mm256_fmadd_pd(m2, _mm256_sqrt_pd(m2), acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) {
        double dx = ax[i] - bx[i], dy = ay[i] - by[i];
        double m2 = dx * dx + dy * dy;
        s += m2 * std::sqrt(m2);
    }
    return s;
}

double incr_sq_d3(const double* ax, const double* ay, const double* az, const double* bx,
                  const double* by, const double* bz, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(ax + i), _mm256_loadu_pd(bx + i));
        __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ay + i), _mm256_loadu_pd(by + i));
        __m256d dz = _mm256_sub_pd(_mm256_loadu_pd(az + i), _mm256_loadu_pd(bz + i));
        __m256d m2 = _mm256_fmadd_pd(dx, dx, _mm256_fmadd_pd(dy, dy, _mm256_mul_pd(dz, dz)));
        acc = _mm256_add_pd(acc, m2);
    }
    double s = hsum(acc);
    for (; i < n; ++i) {
        double dx = ax[i] - bx[i], dy = ay[i] - by[i], dz = az[i] - bz[i];
        s += dx * dx + dy * dy + dz * dz;
    }
    return s;
}

double incr_cube_d3(const double* ax, const double* ay, const double* az, const double* bx,
                    const double* by, const double* bz, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(ax + i), _mm256_loadu_pd(bx + i));
        __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ay + i), _mm256_loadu_pd(by + i));
        __m256d dz = _mm256_sub_pd(_mm256_loadu_pd(az + i), _mm256_loadu_pd(bz + i));
        __m256d m2 = _mm256_fmadd_pd(dx, dx, _mm256_fmadd_pd(dy, dy, _mm256_mul_pd(dz, dz)));
        acc = _mm256_fmadd_pd(m2, _mm256_sqrt_pd(m2), acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) {
        double dx = ax[i] - bx[i], dy = ay[i] - by[i], dz = az[i] - bz[i];
        double m2 = dx * dx + dy * dy + dz * dz;
        s += m2 * std::sqrt(m2);
    }
    return s;
}

}  // namespace lflx::kern::avx2

namespace lflx::kern {

const Backend& avx2_backend() {
    static const Backend b = {
        "avx2",
        avx2::scale_table,
        avx2::ef_scale_add,
        avx2::ef_axpb,
        avx2::ef_axpb2,
        avx2::rk4_combine,
        avx2::mul,
        avx2::fmadd,
        avx2::fmsub,
        avx2::mag_sq_d2,
        avx2::mag_sq_d3,
        avx2::sum,
        avx2::sum_abs,
        avx2::sum_sq,
        avx2::sum_abs_cube,
        avx2::sum_sqrt,
        avx2::sum_x_sqrtx,
        avx2::dot,
        avx2::max_val,
        avx2::max_abs,
        avx2::sum_sq_mag,
        avx2::sum_wsq_mag,
        avx2::sum_wdot,
        avx2::incr_sq_d2,
        avx2::incr_cube_d2,
        avx2::incr_sq_d3,
        avx2::incr_cube_d3,
    };
    return b;
}

}  // namespace lflx::kern

#else  // !LFLX_X86

namespace lflx::kern {

const Backend& avx2_backend() { return scalar_backend(); }

}  // namespace lflx::kern

#endif
