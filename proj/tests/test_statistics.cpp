#include <doctest.h>

#include <cmath>

#include "lflx/field_ops.hpp"
#include "lflx/solver.hpp"
#include "lflx/statistics.hpp"
#include "lflx/synthetic.hpp"
#include "test_util.hpp"

using namespace lflx;

TEST_CASE("structure functions: constants, closed form, lattice symmetries") {
    Grid g(2, 64);
    std::vector<double> orders{2.0, 3.0};
    SUBCASE("constant field has vanishing increments") {
        RealField c(g, 2);
        for (auto& x : c.raw()) x = 2.0;
        auto dirs = default_directions(2);
        auto seps = dyadic_separations(g.n());
        auto t = structure_function(c, orders, seps, dirs);
        for (const auto& row : t.values)
            for (double v : row) CHECK(v == 0.0);
        CHECK(t.moments[0] == doctest::Approx(8.0));  // |u|^2 = 2^2 + 2^2
    }
    SUBCASE("u = (0, sin x) along x: S_2(r) = 1 - cos r at every lattice separation") {
        SpectralField u = single_mode(g, {1, 0, 0}, 1);
        std::vector<int> seps;
        for (int m = 0; m < g.n(); ++m) seps.push_back(m);
        std::vector<std::array<int, 3>> dirs{{1, 0, 0}};
        auto t = structure_function(u, orders, seps, dirs);
        double err = 0.0;
        for (std::size_t e = 0; e < t.entries.size(); ++e)
            err = std::max(err, std::fabs(t.values[0][e] - (1.0 - std::cos(t.entries[e].r))));
        CHECK(err < 1e-12);
        CHECK(t.values[0][0] == 0.0);  // S_p(0) = 0
    }
    SUBCASE("reversed shifts give identical direction-averaged values") {
        SpectralField u = to_spectral(test::random_real_field(g, 2, 3));
        std::vector<int> seps{1, 3, 7};
        std::vector<std::array<int, 3>> fwd{{1, 0, 0}, {1, 1, 0}};
        std::vector<std::array<int, 3>> rev{{-1, 0, 0}, {-1, -1, 0}};
        auto tf = structure_function(u, orders, seps, fwd);
        auto tr = structure_function(u, orders, seps, rev);
        for (std::size_t oi = 0; oi < orders.size(); ++oi)
            for (std::size_t e = 0; e < tf.values[oi].size(); ++e)
                CHECK(tf.values[oi][e] ==
                      doctest::Approx(tr.values[oi][e]).epsilon(1e-14));
    }
    SUBCASE("increment triangle bound S_p <= 2^p <|u|^p>") {
        SpectralField u = to_spectral(test::random_real_field(g, 2, 4));
        auto dirs = default_directions(2);
        auto seps = dyadic_separations(g.n());
        auto t = structure_function(to_real(u), orders, seps, dirs);
        for (std::size_t oi = 0; oi < orders.size(); ++oi) {
            const double bound = std::pow(2.0, orders[oi]) * t.moments[oi];
            for (double v : t.values[oi]) CHECK(v <= bound * (1.0 + 1e-12));
        }
    }
    SUBCASE("off-lattice separations are rejected") {
        RealField c(g, 2);
        std::vector<int> seps{g.n()};
        std::vector<std::array<int, 3>> dirs{{1, 0, 0}};
        CHECK_THROWS_AS(structure_function(c, orders, seps, dirs), std::invalid_argument);
        std::vector<std::array<int, 3>> zero{{0, 0, 0}};
        std::vector<int> ok{1};
        CHECK_THROWS_AS(structure_function(c, orders, ok, zero), std::invalid_argument);
    }
}

TEST_CASE("besov estimate: zero field, closed-form maximization, monotonicity") {
    Grid g(2, 64);
    std::vector<double> orders{2.0};
    std::vector<std::array<int, 3>> dirs{{1, 0, 0}};
    std::vector<int> seps;
    for (int m = 1; m <= 16; ++m) seps.push_back(m);

    SUBCASE("zero field gives zero constants") {
        RealField z(g, 2);
        auto t = structure_function(z, orders, seps, dirs);
        BesovEstimate b = besov_estimate(t, 0, 0.5, kTwoPi);
        CHECK(b.c0 == 0.0);
        CHECK(b.c1 == 0.0);
        CHECK(b.norm == 0.0);
    }
    SpectralField u = single_mode(g, {1, 0, 0}, 1);
    auto t = structure_function(u, orders, seps, dirs);
    SUBCASE("C1 equals the direct maximization of (1 - cos r)(2 pi / r)^2") {
        BesovEstimate b = besov_estimate(t, 0, 1.0, kTwoPi);
        double expect = 0.0;
        for (int m = 1; m <= 16; ++m) {
            const double r = m * g.spacing();
            expect = std::max(expect, (1.0 - std::cos(r)) * std::pow(kTwoPi / r, 2.0));
        }
        CHECK(b.c1 == doctest::Approx(expect).epsilon(1e-12));
        CHECK(b.c0 == doctest::Approx(0.5).epsilon(1e-12));  // <|u|^2> = <sin^2> = 1/2
        CHECK(b.norm == doctest::Approx(std::sqrt(b.c0 + b.c1)).epsilon(1e-12));
    }
    SUBCASE("the sup bound holds at every tabulated r with equality at the arg-max") {
        for (double sigma : {0.3, 0.7, 1.0}) {
            BesovEstimate b = besov_estimate(t, 0, sigma, kTwoPi);
            auto series = t.averaged(0);
            bool hit = false;
            for (std::size_t i = 0; i < series.r.size(); ++i) {
                if (series.r[i] <= 0.0 || series.r[i] > kTwoPi) continue;
                const double bound = b.c1 * std::pow(series.r[i] / kTwoPi, 2.0 * sigma);
                CHECK(series.s[i] <= bound * (1.0 + 1e-12));
                if (series.r[i] == b.argmax_r) {
                    CHECK(series.s[i] == doctest::Approx(bound).epsilon(1e-12));
                    hit = true;
                }
            }
            CHECK(hit);
        }
    }
    SUBCASE("C1 is nondecreasing in sigma") {
        double prev = 0.0;
        for (double sigma : {0.2, 0.4, 0.6, 0.8, 1.0}) {
            BesovEstimate b = besov_estimate(t, 0, sigma, kTwoPi);
            CHECK(b.c1 >= prev);
            prev = b.c1;
        }
    }
    SUBCASE("sigma domain is enforced") {
        CHECK_THROWS_AS(besov_estimate(t, 0, 0.0, kTwoPi), std::invalid_argument);
        CHECK_THROWS_AS(besov_estimate(t, 0, 1.5, kTwoPi), std::invalid_argument);
    }
}

TEST_CASE("c0 ratio diagnostic") {
    Grid g(2, 64);
    std::vector<double> orders{2.0};
    std::vector<std::array<int, 3>> dirs{{1, 0, 0}};
    std::vector<int> seps{1, 2, 4, 8, 16};
    SUBCASE("smooth single mode at sigma = 0.5: ratio decreases toward r -> 0") {
        SpectralField u = single_mode(g, {1, 0, 0}, 1);
        auto t = structure_function(u, orders, seps, dirs);
        C0RatioSeries s = c0_ratio(t, 0, 0.5);
        // S_2 = 1 - cos r ~ r^2/2, so ratio ~ r^(1/2): increasing in r
        for (std::size_t i = 1; i < s.ratio.size(); ++i) CHECK(s.ratio[i] > s.ratio[i - 1]);
    }
    SUBCASE("zero field: all ratios zero") {
        RealField z(g, 2);
        auto t = structure_function(z, orders, seps, dirs);
        C0RatioSeries s = c0_ratio(t, 0, 0.5);
        for (double v : s.ratio) CHECK(v == 0.0);
    }
    SUBCASE("field of regularity sigma: ratio flat within a factor 2") {
        Grid g2(2, 256);
        SyntheticSpec spec;
        spec.sigma = 0.5;
        spec.seed = 5;
        auto dirs2 = default_directions(2);
        std::vector<int> seps2{4, 8, 16, 32};
        auto t = structure_function(random_besov_field(g2, spec), orders, seps2, dirs2);
        C0RatioSeries s = c0_ratio(t, 0, spec.sigma);
        const auto [lo, hi] = std::minmax_element(s.ratio.begin(), s.ratio.end());
        CHECK(*hi / *lo < 2.0);
    }
}

TEST_CASE("exponent calculus of the critical regularity") {
    CHECK(sigma_of_alpha(0.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(alpha_of_sigma(1.0) == doctest::Approx(1.0).epsilon(1e-15));
    for (double a : {0.0, 0.25, 0.5, 0.9})
        CHECK(std::fabs(alpha_of_sigma(sigma_of_alpha(a)) - a) < 1e-14);
    // strictly increasing maps
    double prev = -1.0;
    for (int i = 0; i < 100; ++i) {
        const double s = sigma_of_alpha(i / 100.0);
        CHECK(s > prev);
        prev = s;
    }
    CHECK_THROWS_AS(sigma_of_alpha(-0.1), std::domain_error);
    CHECK_THROWS_AS(sigma_of_alpha(1.0), std::domain_error);
    CHECK_THROWS_AS(alpha_of_sigma(0.0), std::domain_error);
    CHECK_THROWS_AS(alpha_of_sigma(1.1), std::domain_error);
}

TEST_CASE("dissipation length and the two-term balance") {
    CHECK(dissipation_length(1e-4, 1.0) == doctest::Approx(1e-2).epsilon(1e-14));
    CHECK(dissipation_length(1e-4, 1.0 / 3.0) == doctest::Approx(1e-3).epsilon(1e-14));
    test::Rng rng(77);
    for (int i = 0; i < 20; ++i) {
        const double nu = std::pow(10.0, -5.0 + 4.0 * std::fabs(rng()));
        const double sigma = 0.05 + 0.95 * std::fabs(rng());
        const double ell = dissipation_length(nu, sigma);
        const double lhs = std::pow(ell, 3.0 * sigma - 1.0);
        const double rhs = nu * std::pow(ell, 2.0 * (sigma - 1.0));
        CHECK(std::fabs(lhs - rhs) <= 1e-14 * std::max(std::fabs(lhs), std::fabs(rhs)));
    }
    CHECK_THROWS_AS(dissipation_length(0.0, 0.5), std::domain_error);
    CHECK_THROWS_AS(dissipation_length(1e-3, 0.0), std::domain_error);
}

TEST_CASE("scaling fit: exact power laws, drift detection, validation") {
    std::vector<double> xs, ys;
    for (int i = 1; i <= 10; ++i) {
        xs.push_back(std::pow(2.0, -i));
        ys.push_back(std::pow(xs.back(), 0.5));
    }
    ScalingFit fit = scaling_fit(xs, ys);
    CHECK(std::fabs(fit.slope - 0.5) < 1e-12);
    CHECK(fit.r_squared == doctest::Approx(1.0));
    for (double s : fit.local_slopes) CHECK(std::fabs(s - 0.5) < 1e-12);
    CHECK(!fit.drift_flag);

    std::vector<double> ys2;
    for (double x : xs) ys2.push_back(std::pow(x, 0.5) * std::log(1.0 / x));
    ScalingFit fit2 = scaling_fit(xs, ys2);
    CHECK(std::fabs(fit2.slope - 0.5) < 0.35);  // global slope still near 1/2
    CHECK(fit2.drift_flag);                     // but local slopes drift monotonically

    std::vector<double> two_x{1.0, 2.0}, two_y{1.0, 2.0};
    CHECK_THROWS_AS(scaling_fit(two_x, two_y), std::invalid_argument);
    std::vector<double> bad_x{1.0, 2.0, -3.0}, bad_y{1.0, 2.0, 3.0};
    CHECK_THROWS_AS(scaling_fit(bad_x, bad_y), std::invalid_argument);
}

TEST_CASE("flux scaling report: degenerate input and smooth-field slopes") {
    Mollifier m;
    Grid g(2, 128);
    std::vector<double> ells{kTwoPi / 32.0, kTwoPi / 16.0, kTwoPi / 8.0, kTwoPi / 4.0};
    SUBCASE("constant fields are reported degenerate") {
        RealField c(g, 2);
        for (auto& x : c.raw()) x = 1.0;
        std::vector<SpectralField> fields{to_spectral(c)};
        FluxScalingReport rep = flux_scaling_report(fields, ells, m);
        CHECK(rep.degenerate);
    }
    SUBCASE("band-limited smooth fields saturate the sigma = 1 exponents") {
        SyntheticSpec spec;
        spec.sigma = 0.5;  // irrelevant over so narrow a band; field is smooth
        spec.k_min = 1;
        spec.k_max = 4;
        spec.seed = 13;
        std::vector<SpectralField> fields{random_besov_field(g, spec), taylor_green(g)};
        FluxScalingReport rep = flux_scaling_report(fields, ells, m);
        CHECK(!rep.degenerate);
        CHECK(rep.mean_flux_slope >= 1.8);  // ell^2 up to filter-shape corrections
        CHECK(std::fabs(rep.mean_cumulant_slope - 2.0) < 0.3);
    }
    SUBCASE("out-of-range ell rejected") {
        std::vector<SpectralField> fields{taylor_green(g)};
        std::vector<double> bad{kTwoPi / 128.0, kTwoPi / 64.0, kTwoPi / 32.0};
        CHECK_THROWS_AS(flux_scaling_report(fields, bad, m), std::invalid_argument);
    }
}

namespace {

SweepMemberSummary shear_member(double nu) {
    SolverConfig sc;
    sc.grid = Grid(2, 32);
    sc.nu = nu;
    sc.dt = 2e-3;
    sc.t_end = 1.0;
    sc.snapshot_stride = 100;
    sc.initial.kind = InitialSpec::Kind::Shear;
    RunResult r = run(sc);
    SweepMemberSummary mb;
    mb.nu = nu;
    mb.total_dissipation = r.budgets.cum_dissipation.back();
    mb.energy_initial = r.budgets.kinetic_energy.front();
    mb.energy_final = r.budgets.kinetic_energy.back();
    mb.total_injection = r.budgets.cum_injection.back();
    mb.balance_residual_rel = r.budgets.balance_residual_rel();
    std::vector<double> orders{2.0, 3.0};
    auto dirs = default_directions(2);
    auto seps = dyadic_separations(sc.grid.n());
    for (const auto& s : r.snapshots) {
        mb.table_times.push_back(s.t);
        mb.tables.push_back(structure_function(s.u, orders, seps, dirs));
    }
    return mb;
}

}  // namespace

TEST_CASE("onsager report: laminar shear sweep has alpha near 1 and consistent margin") {
    std::vector<SweepMemberSummary> members;
    for (double nu : {0.1, 0.05, 0.025, 0.0125}) members.push_back(shear_member(nu));

    // closed-form check of the dissipation totals: E0 (1 - exp(-2 nu T))
    const double e0 = members[0].energy_initial;
    for (const auto& mb : members) {
        const double expect = e0 * (1.0 - std::exp(-2.0 * mb.nu * 1.0));
        CHECK(std::fabs(mb.total_dissipation - expect) < 1e-5 * expect);
    }

    ReportOptions opt;
    opt.grid_spacing = kTwoPi / 32.0;
    OnsagerReport rep = onsager_report(members, opt);
    CHECK(std::fabs(rep.alpha_hat - 1.0) < 0.1);
    CHECK(rep.sigma_hat > 0.8);
    CHECK(rep.consistency_ok);
    CHECK(rep.consistency_margin > -0.05);
    for (double b : rep.besov_norms) CHECK(std::isfinite(b));
}

TEST_CASE("onsager report: synthetic dissipation injection recovers alpha exactly") {
    Grid g(2, 32);
    std::vector<double> orders{2.0, 3.0};
    std::vector<std::array<int, 3>> dirs{{1, 0, 0}};
    std::vector<int> seps{1, 2, 3, 4, 5, 6, 7, 8};  // dense enough for the fit window
    auto table = structure_function(single_mode(g, {1, 0, 0}, 1), orders, seps, dirs);

    std::vector<SweepMemberSummary> members;
    for (double nu : {1e-2, 5e-3, 2.5e-3, 1.25e-3}) {
        SweepMemberSummary mb;
        mb.nu = nu;
        mb.total_dissipation = std::sqrt(nu);  // alpha = 1/2 by construction
        mb.table_times = {0.0};
        mb.tables = {table};
        members.push_back(mb);
    }
    ReportOptions opt;
    opt.grid_spacing = g.spacing();
    OnsagerReport rep = onsager_report(members, opt);
    CHECK(std::fabs(rep.alpha_hat - 0.5) < 1e-10);

    SUBCASE("too few or non-monotone viscosities are rejected") {
        std::vector<SweepMemberSummary> three(members.begin(), members.begin() + 3);
        CHECK_THROWS_AS(onsager_report(three, opt), std::invalid_argument);
        std::swap(members[0], members[1]);
        CHECK_THROWS_AS(onsager_report(members, opt), std::invalid_argument);
    }
}

TEST_CASE("time averaging of tables uses simpson weights") {
    Grid g(2, 32);
    std::vector<double> orders{2.0};
    std::vector<std::array<int, 3>> dirs{{1, 0, 0}};
    std::vector<int> seps{1, 2};
    std::vector<StructureFunctionTable> tables;
    std::vector<double> times;
    // tables from a field scaled by exp(-t): S_2 scales by exp(-2t)
    for (int i = 0; i <= 16; ++i) {
        const double t = i / 16.0;
        SpectralField u = single_mode(g, {1, 0, 0}, 1, std::exp(-t));
        tables.push_back(structure_function(u, orders, seps, dirs));
        times.push_back(t);
    }
    StructureFunctionTable avg = time_average_tables(tables, times);
    // (1/T) int_0^1 exp(-2t) dt * S(0), up to the Simpson error of the sampling
    const double factor = (1.0 - std::exp(-2.0)) / 2.0;
    for (std::size_t e = 0; e < avg.values[0].size(); ++e)
        CHECK(avg.values[0][e] ==
              doctest::Approx(factor * tables[0].values[0][e]).epsilon(1e-4));
}
