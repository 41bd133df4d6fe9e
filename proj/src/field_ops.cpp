#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>

#include "lflx/fft.hpp"
#include "lflx/field_ops.hpp"
#include "lflx/kernels.hpp"

namespace lflx {

namespace {

// flat index decomposition: row-major, last axis fastest
inline void check_grid(const Grid& a, const Grid& b, const char* what) {
    if (a != b) throw std::invalid_argument(std::string(what) + ": grid mismatch");
}

std::vector<int> axis_wavenumbers(const Grid& g) {
    std::vector<int> wn(g.n());
    for (int i = 0; i < g.n(); ++i) wn[i] = g.wavenumber(i);
    return wn;
}

}  // namespace

RealField to_real(const SpectralField& f) {
    const Grid& g = f.grid();
    RealField out(g, f.components());
    std::vector<cplx> scratch(g.points());
    for (int c = 0; c < f.components(); ++c) {
        fft_execute(g, f.comp(c), scratch.data(), +1);
        double* v = out.comp(c);
        for (std::int64_t i = 0; i < g.points(); ++i) v[i] = scratch[i].real();
    }
    return out;
}

SpectralField to_spectral(const RealField& v) {
    const Grid& g = v.grid();
    SpectralField out(g, v.components());
    std::vector<cplx> scratch(g.points());
    const double inv = 1.0 / static_cast<double>(g.points());
    for (int c = 0; c < v.components(); ++c) {
        const double* x = v.comp(c);
        for (std::int64_t i = 0; i < g.points(); ++i) scratch[i] = cplx(x[i], 0.0);
        fft_execute(g, scratch.data(), out.comp(c), -1);
        cplx* o = out.comp(c);
        for (std::int64_t i = 0; i < g.points(); ++i) o[i] *= inv;
    }
    hermitian_symmetrize(out);
    return out;
}

void hermitian_symmetrize(SpectralField& f) {
    const Grid& g = f.grid();
    const int n = g.n();
    auto conj_idx1 = [n](int i) { return i == 0 ? 0 : n - i; };
    for (int c = 0; c < f.components(); ++c) {
        cplx* a = f.comp(c);
        if (g.dim() == 2) {
            for (int i = 0; i < n; ++i) {
                const int ci = conj_idx1(i);
                for (int j = 0; j < n; ++j) {
                    const int cj = conj_idx1(j);
                    const std::int64_t idx = static_cast<std::int64_t>(i) * n + j;
                    const std::int64_t cdx = static_cast<std::int64_t>(ci) * n + cj;
                    if (idx < cdx) {
                        cplx avg = 0.5 * (a[idx] + std::conj(a[cdx]));
                        a[idx] = avg;
                        a[cdx] = std::conj(avg);
                    } else if (idx == cdx) {
                        a[idx] = cplx(a[idx].real(), 0.0);
                    }
                }
            }
        } else {
            for (int i = 0; i < n; ++i) {
                const int ci = conj_idx1(i);
                for (int j = 0; j < n; ++j) {
                    const int cj = conj_idx1(j);
                    for (int k = 0; k < n; ++k) {
                        const int ck = conj_idx1(k);
                        const std::int64_t idx = (static_cast<std::int64_t>(i) * n + j) * n + k;
                        const std::int64_t cdx = (static_cast<std::int64_t>(ci) * n + cj) * n + ck;
                        if (idx < cdx) {
                            cplx avg = 0.5 * (a[idx] + std::conj(a[cdx]));
                            a[idx] = avg;
                            a[cdx] = std::conj(avg);
                        } else if (idx == cdx) {
                            a[idx] = cplx(a[idx].real(), 0.0);
                        }
                    }
                }
            }
        }
    }
}

SpectralField derivative(const SpectralField& f, int axis) {
    const Grid& g = f.grid();
    if (axis < 0 || axis >= g.dim()) throw std::invalid_argument("derivative: axis out of range");
    SpectralField out(g, f.components());
    const int n = g.n();
    const auto wn = axis_wavenumbers(g);
    for (int c = 0; c < f.components(); ++c) {
        const cplx* a = f.comp(c);
        cplx* o = out.comp(c);
        if (g.dim() == 2) {
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) {
                    const std::int64_t idx = static_cast<std::int64_t>(i) * n + j;
                    int ka = axis == 0 ? wn[i] : wn[j];
                    if (ka == -n / 2) ka = 0;
                    o[idx] = cplx(-ka * a[idx].imag(), ka * a[idx].real());
                }
            }
        } else {
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) {
                    for (int k = 0; k < n; ++k) {
                        const std::int64_t idx = (static_cast<std::int64_t>(i) * n + j) * n + k;
                        int ka = axis == 0 ? wn[i] : (axis == 1 ? wn[j] : wn[k]);
                        if (ka == -n / 2) ka = 0;
                        o[idx] = cplx(-ka * a[idx].imag(), ka * a[idx].real());
                    }
                }
            }
        }
    }
    return out;
}

SpectralField laplacian(const SpectralField& f) {
    const Grid& g = f.grid();
    SpectralField out = f;
    const auto k2 = mode_k2_table(g);
    for (int c = 0; c < f.components(); ++c) {
        cplx* o = out.comp(c);
        for (std::int64_t i = 0; i < g.points(); ++i) o[i] *= -k2[i];
    }
    return out;
}

void leray_project_inplace(SpectralField& u) {
    const Grid& g = u.grid();
    const int d = g.dim();
    if (u.components() != d)
        throw std::invalid_argument("leray_project: vector field with dim components required");
    const int n = g.n();
    const auto wn = axis_wavenumbers(g);
    cplx* ux = u.comp(0);
    cplx* uy = u.comp(1);
    cplx* uz = d == 3 ? u.comp(2) : nullptr;
    if (d == 2) {
        for (int i = 0; i < n; ++i) {
            const double ki = wn[i];
            for (int j = 0; j < n; ++j) {
                const double kj = wn[j];
                const double k2 = ki * ki + kj * kj;
                if (k2 == 0.0) continue;
                const std::int64_t idx = static_cast<std::int64_t>(i) * n + j;
                const cplx kdotu = ki * ux[idx] + kj * uy[idx];
                const cplx s = kdotu / k2;
                ux[idx] -= ki * s;
                uy[idx] -= kj * s;
            }
        }
    } else {
        for (int i = 0; i < n; ++i) {
            const double ki = wn[i];
            for (int j = 0; j < n; ++j) {
                const double kj = wn[j];
                for (int k = 0; k < n; ++k) {
                    const double kk = wn[k];
                    const double k2 = ki * ki + kj * kj + kk * kk;
                    if (k2 == 0.0) continue;
                    const std::int64_t idx = (static_cast<std::int64_t>(i) * n + j) * n + k;
                    const cplx kdotu = ki * ux[idx] + kj * uy[idx] + kk * uz[idx];
                    const cplx s = kdotu / k2;
                    ux[idx] -= ki * s;
                    uy[idx] -= kj * s;
                    uz[idx] -= kk * s;
                }
            }
        }
    }
}

SpectralField leray_project(const SpectralField& u) {
    SpectralField out = u;
    leray_project_inplace(out);
    return out;
}

void dealias_inplace(SpectralField& f) {
    const Grid& g = f.grid();
    const int n = g.n();
    const int kc = g.dealias_cutoff();
    const auto wn = axis_wavenumbers(g);
    std::vector<bool> cut(n);
    for (int i = 0; i < n; ++i) cut[i] = std::abs(wn[i]) > kc;
    for (int c = 0; c < f.components(); ++c) {
        cplx* a = f.comp(c);
        if (g.dim() == 2) {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (cut[i] || cut[j]) a[static_cast<std::int64_t>(i) * n + j] = 0.0;
        } else {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int k = 0; k < n; ++k)
                        if (cut[i] || cut[j] || cut[k])
                            a[(static_cast<std::int64_t>(i) * n + j) * n + k] = 0.0;
        }
    }
}

SpectralField dealias(const SpectralField& f) {
    SpectralField out = f;
    dealias_inplace(out);
    return out;
}

double lp_norm(const RealField& v, double p) {
    if (p < 1.0) throw std::invalid_argument("lp_norm: p < 1");
    const auto& k = kern::active();
    const Grid& g = v.grid();
    const std::size_t n = static_cast<std::size_t>(g.points());
    const double vol = g.cell_volume();
    const int nc = v.components();
    const bool is_inf = std::isinf(p);

    if (nc == 1) {
        const double* a = v.comp(0);
        if (is_inf) return k.max_abs(a, n);
        if (p == 1.0) return k.sum_abs(a, n) * vol;
        if (p == 2.0) return std::sqrt(k.sum_sq(a, n) * vol);
        if (p == 3.0) return std::cbrt(k.sum_abs_cube(a, n) * vol);
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += std::pow(std::fabs(a[i]), p);
        return std::pow(s * vol, 1.0 / p);
    }

    if (p == 2.0 && !is_inf) {
        double s = 0.0;
        for (int c = 0; c < nc; ++c) s += k.sum_sq(v.comp(c), n);
        return std::sqrt(s * vol);
    }
    std::vector<double> m2(n);
    if (nc == 2) {
        k.mag_sq_d2(m2.data(), v.comp(0), v.comp(1), n);
    } else if (nc == 3) {
        k.mag_sq_d3(m2.data(), v.comp(0), v.comp(1), v.comp(2), n);
    } else {
        std::fill(m2.begin(), m2.end(), 0.0);
        for (int c = 0; c < nc; ++c) k.fmadd(m2.data(), v.comp(c), v.comp(c), n);
    }
    if (is_inf) return std::sqrt(k.max_val(m2.data(), n));
    if (p == 1.0) return k.sum_sqrt(m2.data(), n) * vol;
    if (p == 3.0) return std::cbrt(k.sum_x_sqrtx(m2.data(), n) * vol);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::pow(m2[i], 0.5 * p);
    return std::pow(s * vol, 1.0 / p);
}

double lp_norm(const SpectralField& f, double p) {
    if (p < 1.0) throw std::invalid_argument("lp_norm: p < 1");
    return lp_norm(to_real(f), p);
}

double l2_norm_spectral(const SpectralField& f) {
    const auto& k = kern::active();
    double s = 0.0;
    for (int c = 0; c < f.components(); ++c)
        s += k.sum_sq_mag(f.comp(c), static_cast<std::size_t>(f.points()));
    return std::sqrt(s * f.grid().volume());
}

double inner_product(const SpectralField& a, const SpectralField& b) {
    check_grid(a.grid(), b.grid(), "inner_product");
    if (a.components() != b.components())
        throw std::invalid_argument("inner_product: component mismatch");
    const auto& k = kern::active();
    const std::size_t n = static_cast<std::size_t>(a.points());
    std::vector<double> ones(n, 1.0);
    double s = 0.0;
    for (int c = 0; c < a.components(); ++c) s += k.sum_wdot(a.comp(c), b.comp(c), ones.data(), n);
    return s * a.grid().volume();
}

double max_divergence(const SpectralField& u) {
    const Grid& g = u.grid();
    const int d = g.dim();
    if (u.components() != d) throw std::invalid_argument("max_divergence: vector field required");
    const int n = g.n();
    const auto wn = axis_wavenumbers(g);
    double m = 0.0;
    const cplx* ux = u.comp(0);
    const cplx* uy = u.comp(1);
    const cplx* uz = d == 3 ? u.comp(2) : nullptr;
    if (d == 2) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const std::int64_t idx = static_cast<std::int64_t>(i) * n + j;
                m = std::max(m, std::abs(double(wn[i]) * ux[idx] + double(wn[j]) * uy[idx]));
            }
    } else {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    const std::int64_t idx = (static_cast<std::int64_t>(i) * n + j) * n + k;
                    m = std::max(m, std::abs(double(wn[i]) * ux[idx] + double(wn[j]) * uy[idx] + double(wn[k]) * uz[idx]));
                }
    }
    return m;
}

double max_magnitude(const RealField& v) {
    const auto& k = kern::active();
    const std::size_t n = static_cast<std::size_t>(v.points());
    if (v.components() == 1) return k.max_abs(v.comp(0), n);
    std::vector<double> m2(n);
    if (v.components() == 2)
        k.mag_sq_d2(m2.data(), v.comp(0), v.comp(1), n);
    else
        k.mag_sq_d3(m2.data(), v.comp(0), v.comp(1), v.comp(2), n);
    return std::sqrt(k.max_val(m2.data(), n));
}

SpectralField pad_spectrum(const SpectralField& f, const Grid& fine) {
    const Grid& g = f.grid();
    if (fine.dim() != g.dim() || fine.n() < g.n())
        throw std::invalid_argument("pad_spectrum: fine grid must refine the source grid");
    SpectralField out(fine, f.components());
    const int n = g.n();
    const int nf = fine.n();
    auto fidx = [nf](int k) { return k >= 0 ? k : k + nf; };
    // source Nyquist modes land as pure negative frequencies on the fine grid;
    // fields passed here are dealias-band-limited, so those modes are zero.
    for (int c = 0; c < f.components(); ++c) {
        const cplx* a = f.comp(c);
        cplx* o = out.comp(c);
        if (g.dim() == 2) {
            for (int i = 0; i < n; ++i) {
                const int fi = fidx(g.wavenumber(i));
                for (int j = 0; j < n; ++j) {
                    const int fj = fidx(g.wavenumber(j));
                    o[static_cast<std::int64_t>(fi) * nf + fj] =
                        a[static_cast<std::int64_t>(i) * n + j];
                }
            }
        } else {
            for (int i = 0; i < n; ++i) {
                const int fi = fidx(g.wavenumber(i));
                for (int j = 0; j < n; ++j) {
                    const int fj = fidx(g.wavenumber(j));
                    for (int k = 0; k < n; ++k) {
                        const int fk = fidx(g.wavenumber(k));
                        o[(static_cast<std::int64_t>(fi) * nf + fj) * nf + fk] =
                            a[(static_cast<std::int64_t>(i) * n + j) * n + k];
                    }
                }
            }
        }
    }
    return out;
}

RealField subsample(const RealField& fine, const Grid& coarse) {
    const Grid& gf = fine.grid();
    if (gf.dim() != coarse.dim() || gf.n() % coarse.n() != 0)
        throw std::invalid_argument("subsample: incompatible grids");
    const int stride = gf.n() / coarse.n();
    const int n = coarse.n();
    const int nf = gf.n();
    RealField out(coarse, fine.components());
    for (int c = 0; c < fine.components(); ++c) {
        const double* a = fine.comp(c);
        double* o = out.comp(c);
        if (gf.dim() == 2) {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    o[static_cast<std::int64_t>(i) * n + j] =
                        a[static_cast<std::int64_t>(i) * stride * nf + j * stride];
        } else {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int k = 0; k < n; ++k)
                        o[(static_cast<std::int64_t>(i) * n + j) * n + k] =
                            a[(static_cast<std::int64_t>(i) * stride * nf + j * stride) * nf +
                              k * stride];
        }
    }
    return out;
}

RealField circular_shift(const RealField& v, const std::array<int, 3>& offset) {
    const Grid& g = v.grid();
    const int n = g.n();
    auto wrap = [n](int x) {
        int r = x % n;
        return r < 0 ? r + n : r;
    };
    RealField out(g, v.components());
    const int o0 = wrap(offset[0]);
    const int o1 = wrap(offset[1]);
    const int o2 = g.dim() == 3 ? wrap(offset[2]) : 0;
    for (int c = 0; c < v.components(); ++c) {
        const double* a = v.comp(c);
        double* o = out.comp(c);
        if (g.dim() == 2) {
            for (int i = 0; i < n; ++i) {
                const double* src = a + static_cast<std::int64_t>(wrap(i + o0)) * n;
                double* dst = o + static_cast<std::int64_t>(i) * n;
                std::memcpy(dst, src + o1, sizeof(double) * (n - o1));
                std::memcpy(dst + (n - o1), src, sizeof(double) * o1);
            }
        } else {
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) {
                    const double* src =
                        a + (static_cast<std::int64_t>(wrap(i + o0)) * n + wrap(j + o1)) * n;
                    double* dst = o + (static_cast<std::int64_t>(i) * n + j) * n;
                    std::memcpy(dst, src + o2, sizeof(double) * (n - o2));
                    std::memcpy(dst + (n - o2), src, sizeof(double) * o2);
                }
            }
        }
    }
    return out;
}

std::vector<double> mode_k2_table(const Grid& g) {
    const int n = g.n();
    const auto wn = axis_wavenumbers(g);
    std::vector<double> k2(static_cast<std::size_t>(g.points()));
    if (g.dim() == 2) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                k2[static_cast<std::int64_t>(i) * n + j] =
                    double(wn[i]) * wn[i] + double(wn[j]) * wn[j];
    } else {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    k2[(static_cast<std::int64_t>(i) * n + j) * n + k] =
                        double(wn[i]) * wn[i] + double(wn[j]) * wn[j] + double(wn[k]) * wn[k];
    }
    return k2;
}

SpectralField product_tensor_dealiased(const SpectralField& g, const SpectralField& h) {
    check_grid(g.grid(), h.grid(), "product_tensor_dealiased");
    const Grid& grid = g.grid();
    const int d = grid.dim();
    if (g.components() != d || h.components() != d)
        throw std::invalid_argument("product_tensor_dealiased: vector fields required");
    const bool same = &g == &h;
    RealField gr = to_real(g);
    RealField hr = same ? gr : to_real(h);
    const std::size_t np = static_cast<std::size_t>(grid.points());
    SpectralField out(grid, d * d);
    RealField buf(grid, 1);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            if (same && j < i) continue;
            kern::active().mul(buf.comp(0), gr.comp(i), hr.comp(j), np);
            SpectralField w = to_spectral(buf);
            std::memcpy(out.comp(i * d + j), w.comp(0), np * sizeof(cplx));
        }
    }
    if (same) {
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < i; ++j)
                std::memcpy(out.comp(i * d + j), out.comp(j * d + i), np * sizeof(cplx));
    }
    dealias_inplace(out);
    return out;
}

void axpy(SpectralField& y, double a, const SpectralField& x) {
    check_grid(y.grid(), x.grid(), "axpy");
    if (y.components() != x.components()) throw std::invalid_argument("axpy: component mismatch");
    cplx* yd = y.raw().data();
    const cplx* xd = x.raw().data();
    for (std::size_t i = 0; i < y.raw().size(); ++i) yd[i] += a * xd[i];
}

void scale(SpectralField& f, double a) {
    for (auto& c : f.raw()) c *= a;
}

}  // namespace lflx
