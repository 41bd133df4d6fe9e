#include <cmath>
#include <stdexcept>

#include "lflx/field_ops.hpp"
#include "lflx/synthetic.hpp"

namespace lflx {

namespace {

// SplitMix64 (Steele, Lea, Flood 2014); fully specified, platform-stable.
struct SplitMix64 {
    std::uint64_t state;
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

struct Vec3 {
    double x, y, z;
};

Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

Vec3 normalize(const Vec3& a) {
    const double n = std::sqrt(a.x * a.x + a.y * a.y + a.z * a.z);
    return {a.x / n, a.y / n, a.z / n};
}

bool canonical_halfspace(int k0, int k1, int k2) {
    if (k0 != 0) return k0 > 0;
    if (k1 != 0) return k1 > 0;
    return k2 > 0;
}

}  // namespace

SpectralField random_besov_field(const Grid& grid, const SyntheticSpec& spec) {
    const int d = grid.dim();
    const int n = grid.n();
    const int kmax = spec.k_max > 0 ? spec.k_max : grid.dealias_cutoff();
    if (!(spec.sigma > 0.0 && spec.sigma < 1.0))
        throw std::invalid_argument("random_besov_field: sigma must be in (0,1)");
    if (spec.k_min < 1 || kmax < spec.k_min || kmax > grid.dealias_cutoff())
        throw std::invalid_argument("random_besov_field: band must satisfy 1 <= k_min <= k_max <= n/3");

    // per-mode |u_hat| ~ |k|^-(sigma + d/2): shell-summed energy ~ k^-(2*sigma+1)
    const double amp_exp = -(spec.sigma + 0.5 * d);

    // In 2D the power-law band stops at k_band and the rest of the tail energy
    // (integrated k^-(2 sigma + 1) from k_band to infinity) rides on isotropic
    // pair-waves near k_max; see below. The spectral gap in between keeps
    // base-times-wave beat products outside the filter pass band.
    const bool compensate = d == 2 && kmax >= 16;
    const int k_band = compensate ? std::max(spec.k_min, (13 * kmax) / 25) : kmax;

    SpectralField u(grid, d);
    SplitMix64 rng{spec.seed};
    const double lo2 = static_cast<double>(spec.k_min) * spec.k_min;
    const double hi2 = static_cast<double>(k_band) * k_band;

    auto fill_mode = [&](std::int64_t idx, std::int64_t cidx, int k0, int k1, int k2) {
        const double k2abs = double(k0) * k0 + double(k1) * k1 + double(k2) * k2;
        // two draws per canonical mode, consumed regardless of band membership
        // so the stream layout is independent of the band
        const double t1 = rng.uniform();
        const double t2 = rng.uniform();
        if (k2abs < lo2 || k2abs > hi2) return;
        const double kmag = std::sqrt(k2abs);
        const double amp = std::pow(kmag, amp_exp);
        const double theta = kTwoPi * t1;
        const cplx phase = amp * cplx(std::cos(theta), std::sin(theta));
        if (d == 2) {
            // transverse polarization (-ky, kx)/|k|
            const double ex = -k1 / kmag, ey = k0 / kmag;
            u.comp(0)[idx] = phase * ex;
            u.comp(1)[idx] = phase * ey;
            u.comp(0)[cidx] = std::conj(u.comp(0)[idx]);
            u.comp(1)[cidx] = std::conj(u.comp(1)[idx]);
        } else {
            const Vec3 kv{double(k0), double(k1), double(k2)};
            const Vec3 ref = std::abs(k0) <= std::abs(k1) && std::abs(k0) <= std::abs(k2)
                                 ? Vec3{1, 0, 0}
                                 : (std::abs(k1) <= std::abs(k2) ? Vec3{0, 1, 0} : Vec3{0, 0, 1});
            const Vec3 e1 = normalize(cross(kv, ref));
            const Vec3 e2 = normalize(cross(kv, e1));
            const double phi = kTwoPi * t2;
            const double c = std::cos(phi), s = std::sin(phi);
            const Vec3 pol{c * e1.x + s * e2.x, c * e1.y + s * e2.y, c * e1.z + s * e2.z};
            u.comp(0)[idx] = phase * pol.x;
            u.comp(1)[idx] = phase * pol.y;
            u.comp(2)[idx] = phase * pol.z;
            for (int cc = 0; cc < 3; ++cc) u.comp(cc)[cidx] = std::conj(u.comp(cc)[idx]);
        }
    };

    if (d == 2) {
        for (int i = 0; i < n; ++i) {
            const int k0 = grid.wavenumber(i);
            for (int j = 0; j < n; ++j) {
                const int k1 = grid.wavenumber(j);
                if (!canonical_halfspace(k0, k1, 0)) continue;
                const std::int64_t idx = static_cast<std::int64_t>(i) * n + j;
                const int ci = k0 == 0 ? 0 : n - i;
                const int cj = k1 == 0 ? 0 : n - j;
                fill_mode(idx, static_cast<std::int64_t>(ci) * n + cj, k0, k1, 0);
            }
        }
    } else {
        for (int i = 0; i < n; ++i) {
            const int k0 = grid.wavenumber(i);
            for (int j = 0; j < n; ++j) {
                const int k1 = grid.wavenumber(j);
                for (int k = 0; k < n; ++k) {
                    const int k2 = grid.wavenumber(k);
                    if (!canonical_halfspace(k0, k1, k2)) continue;
                    const std::int64_t idx = (static_cast<std::int64_t>(i) * n + j) * n + k;
                    const int ci = k0 == 0 ? 0 : n - i;
                    const int cj = k1 == 0 ? 0 : n - j;
                    const int ck = k2 == 0 ? 0 : n - k;
                    fill_mode(idx, (static_cast<std::int64_t>(ci) * n + cj) * n + ck, k0, k1, k2);
                }
            }
        }
    }

    // A sharply truncated band misses the saturation energy of the k > k_band
    // tail, which steepens every increment statistic at small sigma (the bias
    // scales like k_band^(-2 sigma), unfixable by resolution). Restore it with
    // isotropic pair-waves near k_max: each pair, a cos(kappa.x) transverse
    // wave plus its 90-degree rotation at equal amplitude, contributes exactly
    // (a^2/2) Id to the filtered product tensor. That supplies the missing S_2
    // saturation and cumulant trace while being invisible to the energy flux
    // (grad u : Id = div u = 0 pointwise). Pair directions are spread 30
    // degrees apart and the gap below keeps every beat wavenumber high enough
    // for the filter to remove it.
    if (compensate && k_band < kmax) {
        const double twosig = 2.0 * spec.sigma;
        const double e_tail =
            std::pow(static_cast<double>(k_band), -twosig) / twosig * kTwoPi;
        const int npairs = 3;  // 60 degrees apart: cross-pair beats stay high
        const double a2 = e_tail / npairs;  // sum of |coeff|^2 per pair
        const int n2 = grid.n();
        auto add_wave = [&](int kx, int ky, double phase, double px, double py) {
            auto wrap = [n2](int q) { return q >= 0 ? q : q + n2; };
            const std::int64_t ip = static_cast<std::int64_t>(wrap(kx)) * n2 + wrap(ky);
            const std::int64_t im = static_cast<std::int64_t>(wrap(-kx)) * n2 + wrap(-ky);
            const cplx c = 0.5 * std::sqrt(a2) * cplx(std::cos(phase), std::sin(phase));
            u.comp(0)[ip] += c * px;
            u.comp(1)[ip] += c * py;
            u.comp(0)[im] += std::conj(c) * px;
            u.comp(1)[im] += std::conj(c) * py;
        };
        for (int i = 0; i < npairs; ++i) {
            const double radius = 0.995 * kmax;  // as far from the band as possible
            const double angle = 0.13 + i * (kTwoPi / 2.0) / npairs;
            const int kx = static_cast<int>(std::lround(radius * std::cos(angle)));
            const int ky = static_cast<int>(std::lround(radius * std::sin(angle)));
            const double km = std::sqrt(double(kx) * kx + double(ky) * ky);
            const double phi = kTwoPi * rng.uniform();
            const double psi = kTwoPi * rng.uniform();
            // wave along kappa polarized along rot90(kappa), and vice versa
            add_wave(kx, ky, phi, -ky / km, kx / km);
            add_wave(-ky, kx, psi, -kx / km, -ky / km);
        }
    }

    leray_project_inplace(u);  // transverse by construction; removes roundoff
    const double norm = l2_norm_spectral(u);
    if (norm > 0.0) scale(u, spec.amplitude / norm);
    return u;
}

namespace {

SpectralField from_pointwise(const Grid& grid, int ncomp,
                             double (*f)(int comp, double x, double y, double z)) {
    RealField v(grid, ncomp);
    const int n = grid.n();
    const double h = grid.spacing();
    for (int c = 0; c < ncomp; ++c) {
        double* a = v.comp(c);
        if (grid.dim() == 2) {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    a[static_cast<std::int64_t>(i) * n + j] = f(c, i * h, j * h, 0.0);
        } else {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int k = 0; k < n; ++k)
                        a[(static_cast<std::int64_t>(i) * n + j) * n + k] =
                            f(c, i * h, j * h, k * h);
        }
    }
    return to_spectral(v);
}

}  // namespace

SpectralField taylor_green(const Grid& grid) {
    if (grid.dim() == 2) {
        return from_pointwise(grid, 2, [](int c, double x, double y, double) {
            return c == 0 ? std::sin(x) * std::cos(y) : -std::cos(x) * std::sin(y);
        });
    }
    return from_pointwise(grid, 3, [](int c, double x, double y, double z) {
        if (c == 0) return std::sin(x) * std::cos(y) * std::cos(z);
        if (c == 1) return -std::cos(x) * std::sin(y) * std::cos(z);
        return 0.0;
    });
}

SpectralField shear(const Grid& grid) {
    return from_pointwise(grid, grid.dim(), [](int c, double, double y, double) {
        return c == 0 ? std::sin(y) : 0.0;
    });
}

SpectralField single_mode(const Grid& grid, const std::array<int, 3>& k, int axis,
                          double amplitude) {
    const int d = grid.dim();
    if (axis < 0 || axis >= d) throw std::invalid_argument("single_mode: axis out of range");
    if (k[axis] != 0)
        throw std::invalid_argument("single_mode: k[axis] must vanish for a solenoidal mode");
    if (d == 2 && k[2] != 0) throw std::invalid_argument("single_mode: k[2] must be 0 in 2D");
    for (int a = 0; a < d; ++a)
        if (std::abs(k[a]) >= grid.n() / 2)
            throw std::invalid_argument("single_mode: wavevector outside grid");

    // sin(k.x) = (e^{ik.x} - e^{-ik.x}) / 2i: coefficients -+ i/2
    SpectralField u(grid, d);
    const int n = grid.n();
    auto index_of = [&](int kx, int ky, int kz) {
        auto wrap = [n](int q) { return q >= 0 ? q : q + n; };
        if (grid.dim() == 2) return static_cast<std::int64_t>(wrap(kx)) * n + wrap(ky);
        return (static_cast<std::int64_t>(wrap(kx)) * n + wrap(ky)) * n + wrap(kz);
    };
    u.comp(axis)[index_of(k[0], k[1], k[2])] = cplx(0.0, -0.5 * amplitude);
    u.comp(axis)[index_of(-k[0], -k[1], -k[2])] = cplx(0.0, 0.5 * amplitude);
    return u;
}

SpectralField synthesize(const Grid& grid, const SyntheticSpec& spec) {
    switch (spec.kind) {
        case SyntheticSpec::Kind::RandomBesov:
            return random_besov_field(grid, spec);
        case SyntheticSpec::Kind::SingleMode:
            return single_mode(grid, spec.k, spec.axis, spec.amplitude);
        case SyntheticSpec::Kind::Shear:
            return shear(grid);
        case SyntheticSpec::Kind::TaylorGreen:
            return taylor_green(grid);
    }
    throw std::logic_error("synthesize: unknown kind");
}

ShellSpectrum shell_energy(const SpectralField& u) {
    const Grid& grid = u.grid();
    const auto k2 = mode_k2_table(grid);
    const int nshell = grid.n() / 2 + 1;
    ShellSpectrum out;
    out.energy.assign(nshell, 0.0);
    out.mean_k.assign(nshell, 0.0);
    out.count.assign(nshell, 0.0);
    for (int c = 0; c < u.components(); ++c) {
        const cplx* a = u.comp(c);
        for (std::int64_t i = 0; i < grid.points(); ++i) {
            const double kmag = std::sqrt(k2[i]);
            const int s = static_cast<int>(kmag);
            if (s >= nshell) continue;
            const double e = std::norm(a[i]);
            out.energy[s] += e;
            out.mean_k[s] += e * kmag;
            if (c == 0) out.count[s] += 1.0;
        }
    }
    const double f = 0.5 * grid.volume();
    for (int s = 0; s < nshell; ++s) {
        if (out.energy[s] > 0.0) out.mean_k[s] /= out.energy[s];
        out.energy[s] *= f;
    }
    return out;
}

}  // namespace lflx
