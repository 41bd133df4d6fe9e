#include <cmath>

#include "lflx/kernels.hpp"

// Reference kernels. Plain loops, no intrinsics; the AVX2 backend is
// equivalence-tested against these.

namespace lflx::kern::scalar {

void scale_table(cplx* x, const double* m, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= m[i];
}

void ef_scale_add(cplx* out, const double* e, const cplx* x, double s, const cplx* k,
                  std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = e[i] * (x[i] + s * k[i]);
}

void ef_axpb(cplx* out, const double* e, const cplx* x, double s, const cplx* k, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = e[i] * x[i] + s * k[i];
}

void ef_axpb2(cplx* out, const double* e2, const cplx* x, double s, const double* eh,
              const cplx* k, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = e2[i] * x[i] + s * (eh[i] * k[i]);
}

void rk4_combine(cplx* u, const double* eh, const double* e2, const cplx* k1, const cplx* k2,
                 const cplx* k3, const cplx* k4, double dt, std::size_t n) {
    const double w = dt / 6.0;
    for (std::size_t i = 0; i < n; ++i)
        u[i] = e2[i] * u[i] + w * (e2[i] * k1[i] + 2.0 * eh[i] * (k2[i] + k3[i]) + k4[i]);
}

void mul(double* w, const double* a, const double* b, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) w[i] = a[i] * b[i];
}

void fmadd(double* w, const double* a, const double* b, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) w[i] += a[i] * b[i];
}

void fmsub(double* w, const double* a, const double* b, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) w[i] -= a[i] * b[i];
}

void mag_sq_d2(double* w, const double* x, const double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) w[i] = x[i] * x[i] + y[i] * y[i];
}

void mag_sq_d3(double* w, const double* x, const double* y, const double* z, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) w[i] = x[i] * x[i] + y[i] * y[i] + z[i] * z[i];
}

double sum(const double* a, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i];
    return s;
}

double sum_abs(const double* a, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::fabs(a[i]);
    return s;
}

double sum_sq(const double* a, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * a[i];
    return s;
}

double sum_abs_cube(const double* a, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double m = std::fabs(a[i]);
        s += m * m * m;
    }
    return s;
}

double sum_sqrt(const double* a, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::sqrt(a[i]);
    return s;
}

double sum_x_sqrtx(const double* a, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * std::sqrt(a[i]);
    return s;
}

double dot(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

double max_val(const double* a, std::size_t n) {
    double m = n ? a[0] : 0.0;
    for (std::size_t i = 1; i < n; ++i) m = a[i] > m ? a[i] : m;
    return m;
}

double max_abs(const double* a, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double v = std::fabs(a[i]);
        m = v > m ? v : m;
    }
    return m;
}

double sum_sq_mag(const cplx* a, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::norm(a[i]);
    return s;
}

double sum_wsq_mag(const cplx* a, const double* w, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += w[i] * std::norm(a[i]);
    return s;
}

double sum_wdot(const cplx* a, const cplx* b, const double* w, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        s += w[i] * (a[i].real() * b[i].real() + a[i].imag() * b[i].imag());
    return s;
}

double incr_sq_d2(const double* ax, const double* ay, const double* bx, const double* by,
                  std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double dx = ax[i] - bx[i], dy = ay[i] - by[i];
        s += dx * dx + dy * dy;
    }
    return s;
}

double incr_cube_d2(const double* ax, const double* ay, const double* bx, const double* by,
                    std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double dx = ax[i] - bx[i], dy = ay[i] - by[i];
        double m2 = dx * dx + dy * dy;
        s += m2 * std::sqrt(m2);
    }
    return s;
}

double incr_sq_d3(const double* ax, const double* ay, const double* az, const double* bx,
                  const double* by, const double* bz, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double dx = ax[i] - bx[i], dy = ay[i] - by[i], dz = az[i] - bz[i];
        s += dx * dx + dy * dy + dz * dz;
    }
    return s;
}

double incr_cube_d3(const double* ax, const double* ay, const double* az, const double* bx,
                    const double* by, const double* bz, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double dx = ax[i] - bx[i], dy = ay[i] - by[i], dz = az[i] - bz[i];
        double m2 = dx * dx + dy * dy + dz * dz;
        s += m2 * std::sqrt(m2);
    }
    return s;
}

}  // namespace lflx::kern::scalar

namespace lflx::kern {

const Backend& scalar_backend() {
    static const Backend b = {
        "scalar",
        scalar::scale_table,
        scalar::ef_scale_add,
        scalar::ef_axpb,
        scalar::ef_axpb2,
        scalar::rk4_combine,
        scalar::mul,
        scalar::fmadd,
        scalar::fmsub,
        scalar::mag_sq_d2,
        scalar::mag_sq_d3,
        scalar::sum,
        scalar::sum_abs,
        scalar::sum_sq,
        scalar::sum_abs_cube,
        scalar::sum_sqrt,
        scalar::sum_x_sqrtx,
        scalar::dot,
        scalar::max_val,
        scalar::max_abs,
        scalar::sum_sq_mag,
        scalar::sum_wsq_mag,
        scalar::sum_wdot,
        scalar::incr_sq_d2,
        scalar::incr_cube_d2,
        scalar::incr_sq_d3,
        scalar::incr_cube_d3,
    };
    return b;
}

}  // namespace lflx::kern
