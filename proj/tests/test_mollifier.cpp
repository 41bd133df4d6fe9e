#include <doctest.h>

#include <cmath>
#include <thread>

#include "lflx/mollifier.hpp"

using namespace lflx;

TEST_CASE("multiplier is 1 at k = 0 and decays") {
    Mollifier m;
    Grid g(2, 32);
    auto table = m.multiplier(g, 0.3);
    CHECK((*table)[0] == 1.0);
    for (double v : *table) {
        CHECK(std::isfinite(v));
        CHECK(v <= 1.0 + 1e-12);
    }
    // high-|k| entries are small: bump transform decays fast
    CHECK(std::fabs(m.transform_value(2, 60.0)) < 1e-3);
}

TEST_CASE("multiplier depends on ell*|k| only (scaling symmetry)") {
    Mollifier m;
    for (int dim : {2, 3}) {
        const double a = m.transform_value(dim, 0.2 * 2.0);
        const double b = m.transform_value(dim, 0.4 * 1.0);
        CHECK(std::fabs(a - b) < 1e-12);
        const double c = m.transform_value(dim, 0.15 * 8.0);
        const double d = m.transform_value(dim, 1.2);
        CHECK(std::fabs(c - d) < 1e-12);
    }
}

TEST_CASE("2D transform matches a brute-force lattice quadrature at ell|k| = 1") {
    // Independent oracle: self-normalized midpoint sum of the unnormalized
    // bump over its support, 2048^2 points, ell = 1, k = (1, 0).
    const int nq = 2048;
    const double ell = 1.0;
    double mass = 0.0, osc = 0.0;
    for (int i = 0; i < nq; ++i) {
        const double x = -ell + 2.0 * ell * (i + 0.5) / nq;
        for (int j = 0; j < nq; ++j) {
            const double y = -ell + 2.0 * ell * (j + 0.5) / nq;
            const double r2 = (x * x + y * y) / (ell * ell);
            if (r2 >= 1.0) continue;
            const double gval = std::exp(-1.0 / (1.0 - r2));
            mass += gval;
            osc += gval * std::cos(x);  // k = (1, 0)
        }
    }
    const double oracle = osc / mass;
    Mollifier m;
    CHECK(std::fabs(m.transform_value(2, 1.0) - oracle) < 1e-9);
}

TEST_CASE("transform tends to 1 as ell -> 0 at fixed k") {
    Mollifier m;
    for (int dim : {2, 3}) {
        CHECK(std::fabs(m.transform_value(dim, 1e-6 * 5.0) - 1.0) < 1e-8);
        CHECK(m.transform_value(dim, 0.5) < 1.0);
    }
}

TEST_CASE("multiplier argument validation and caching") {
    Mollifier m;
    Grid g(2, 16);
    CHECK_THROWS_AS(m.multiplier(g, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(m.multiplier(g, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(m.multiplier(g, 7.0), std::invalid_argument);
    auto a = m.multiplier(g, 0.5);
    auto b = m.multiplier(g, 0.5);
    CHECK(a.get() == b.get());  // served from the cache
}

TEST_CASE("multiplier cache is safe under concurrent read/insert") {
    Mollifier m;
    Grid g(2, 64);
    std::vector<std::thread> workers;
    std::vector<std::shared_ptr<const std::vector<double>>> results(8);
    for (int t = 0; t < 8; ++t)
        workers.emplace_back([&, t]() {
            // half the threads race on the same scale, half insert new ones
            const double ell = t % 2 == 0 ? 0.37 : 0.11 + 0.05 * t;
            results[t] = m.multiplier(g, ell);
        });
    for (auto& w : workers) w.join();
    for (int t = 0; t < 8; t += 2) {
        CHECK(results[t]->size() == static_cast<std::size_t>(g.points()));
        CHECK((*results[t])[0] == 1.0);
        CHECK(*results[t] == *results[0]);  // same scale, same table
    }
}

TEST_CASE("gaussian cross-check kernel") {
    Mollifier m(Mollifier::Kind::Gaussian);
    CHECK(m.transform_value(2, 0.0) == 1.0);
    // exp(-s^2/8) at s = 2
    CHECK(std::fabs(m.transform_value(2, 2.0) - std::exp(-0.5)) < 1e-14);
    Grid g(2, 16);
    auto t = m.multiplier(g, 0.25);
    CHECK((*t)[0] == 1.0);
}
