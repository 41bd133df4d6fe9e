#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "lflx/kernels.hpp"

using namespace lflx;

namespace {

struct Rng {
    std::uint64_t s = 0x9E3779B97F4A7C15ull;
    double operator()() {
        std::uint64_t z = (s += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        z ^= z >> 31;
        return static_cast<double>(z >> 11) * 0x1.0p-53 * 2.0 - 1.0;
    }
};

std::vector<double> rand_vec(std::size_t n, Rng& r) {
    std::vector<double> v(n);
    for (auto& x : v) x = r();
    return v;
}

std::vector<kern::cplx> rand_cvec(std::size_t n, Rng& r) {
    std::vector<kern::cplx> v(n);
    for (auto& x : v) x = {r(), r()};
    return v;
}

bool close(double a, double b, double tol = 2e-12) {
    return std::fabs(a - b) <= tol * std::max({1.0, std::fabs(a), std::fabs(b)});
}

}  // namespace

TEST_CASE("scalar and avx2 backends agree on real kernels") {
    if (!kern::avx2_available()) return;  // nothing to compare on this host
    const auto& s = kern::scalar_backend();
    const auto& x = kern::avx2_backend();
    Rng rng;

    for (std::size_t n : {std::size_t(1), std::size_t(7), std::size_t(64), std::size_t(1003)}) {
        auto a = rand_vec(n, rng), b = rand_vec(n, rng), c = rand_vec(n, rng);
        auto pos = a;
        for (auto& v : pos) v = std::fabs(v) + 0.1;

        CHECK(close(s.sum(a.data(), n), x.sum(a.data(), n)));
        CHECK(close(s.sum_abs(a.data(), n), x.sum_abs(a.data(), n)));
        CHECK(close(s.sum_sq(a.data(), n), x.sum_sq(a.data(), n)));
        CHECK(close(s.sum_abs_cube(a.data(), n), x.sum_abs_cube(a.data(), n)));
        CHECK(close(s.sum_sqrt(pos.data(), n), x.sum_sqrt(pos.data(), n)));
        CHECK(close(s.sum_x_sqrtx(pos.data(), n), x.sum_x_sqrtx(pos.data(), n)));
        CHECK(close(s.dot(a.data(), b.data(), n), x.dot(a.data(), b.data(), n)));
        CHECK(s.max_val(a.data(), n) == x.max_val(a.data(), n));
        CHECK(s.max_abs(a.data(), n) == x.max_abs(a.data(), n));

        auto w1 = c, w2 = c;
        s.mul(w1.data(), a.data(), b.data(), n);
        x.mul(w2.data(), a.data(), b.data(), n);
        CHECK(w1 == w2);
        w1 = c;
        w2 = c;
        s.fmadd(w1.data(), a.data(), b.data(), n);
        x.fmadd(w2.data(), a.data(), b.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(close(w1[i], w2[i], 1e-15));
        w1 = c;
        w2 = c;
        s.fmsub(w1.data(), a.data(), b.data(), n);
        x.fmsub(w2.data(), a.data(), b.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(close(w1[i], w2[i], 1e-15));

        s.mag_sq_d2(w1.data(), a.data(), b.data(), n);
        x.mag_sq_d2(w2.data(), a.data(), b.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(close(w1[i], w2[i], 1e-15));
        s.mag_sq_d3(w1.data(), a.data(), b.data(), c.data(), n);
        x.mag_sq_d3(w2.data(), a.data(), b.data(), c.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(close(w1[i], w2[i], 1e-15));

        CHECK(close(s.incr_sq_d2(a.data(), b.data(), c.data(), pos.data(), n),
                    x.incr_sq_d2(a.data(), b.data(), c.data(), pos.data(), n)));
        CHECK(close(s.incr_cube_d2(a.data(), b.data(), c.data(), pos.data(), n),
                    x.incr_cube_d2(a.data(), b.data(), c.data(), pos.data(), n)));
        CHECK(close(s.incr_sq_d3(a.data(), b.data(), c.data(), pos.data(), b.data(), a.data(), n),
                    x.incr_sq_d3(a.data(), b.data(), c.data(), pos.data(), b.data(), a.data(), n)));
        CHECK(close(
            s.incr_cube_d3(a.data(), b.data(), c.data(), pos.data(), b.data(), a.data(), n),
            x.incr_cube_d3(a.data(), b.data(), c.data(), pos.data(), b.data(), a.data(), n)));
    }
}

TEST_CASE("complex kernels agree between backends") {
    if (!kern::avx2_available()) return;
    const auto& s = kern::scalar_backend();
    const auto& x = kern::avx2_backend();
    Rng rng;
    const std::size_t n = 257;
    auto u = rand_cvec(n, rng), k1 = rand_cvec(n, rng), k2 = rand_cvec(n, rng),
         k3 = rand_cvec(n, rng), k4 = rand_cvec(n, rng);
    auto eh = rand_vec(n, rng), ef = rand_vec(n, rng), w = rand_vec(n, rng);
    for (auto& v : eh) v = std::fabs(v);
    for (auto& v : ef) v = std::fabs(v);

    auto a1 = u, a2 = u;
    s.scale_table(a1.data(), eh.data(), n);
    x.scale_table(a2.data(), eh.data(), n);
    CHECK(a1 == a2);

    std::vector<kern::cplx> o1(n), o2(n);
    s.ef_scale_add(o1.data(), eh.data(), u.data(), 0.37, k1.data(), n);
    x.ef_scale_add(o2.data(), eh.data(), u.data(), 0.37, k1.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(o1[i] - o2[i]) < 1e-15);
    s.ef_axpb(o1.data(), eh.data(), u.data(), 0.37, k1.data(), n);
    x.ef_axpb(o2.data(), eh.data(), u.data(), 0.37, k1.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(o1[i] - o2[i]) < 1e-15);
    s.ef_axpb2(o1.data(), ef.data(), u.data(), 0.37, eh.data(), k1.data(), n);
    x.ef_axpb2(o2.data(), ef.data(), u.data(), 0.37, eh.data(), k1.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(o1[i] - o2[i]) < 1e-15);

    auto u1 = u, u2 = u;
    s.rk4_combine(u1.data(), eh.data(), ef.data(), k1.data(), k2.data(), k3.data(), k4.data(),
                  1e-3, n);
    x.rk4_combine(u2.data(), eh.data(), ef.data(), k1.data(), k2.data(), k3.data(), k4.data(),
                  1e-3, n);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(u1[i] - u2[i]) < 1e-15);

    CHECK(close(s.sum_sq_mag(u.data(), n), x.sum_sq_mag(u.data(), n)));
    CHECK(close(s.sum_wsq_mag(u.data(), w.data(), n), x.sum_wsq_mag(u.data(), w.data(), n)));
    CHECK(close(s.sum_wdot(u.data(), k1.data(), w.data(), n),
                x.sum_wdot(u.data(), k1.data(), w.data(), n)));
}

TEST_CASE("backend selection") {
    kern::set_backend("scalar");
    CHECK(std::string(kern::active().name) == "scalar");
    if (kern::avx2_available()) {
        kern::set_backend("avx2");
        CHECK(std::string(kern::active().name) == "avx2");
    }
    CHECK_THROWS_AS(kern::set_backend("sse9"), std::invalid_argument);
    kern::set_backend("auto");
}
