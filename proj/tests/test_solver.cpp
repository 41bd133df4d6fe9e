#include <doctest.h>

#include <cmath>

#include "lflx/field_ops.hpp"
#include "lflx/solver.hpp"
#include "test_util.hpp"

using namespace lflx;

TEST_CASE("zero initial data with no forcing stays exactly zero") {
    SolverConfig sc;
    sc.grid = Grid(2, 16);
    sc.nu = 0.1;
    sc.dt = 1e-2;
    sc.t_end = 0.2;
    sc.initial.kind = InitialSpec::Kind::Zero;
    RunResult r = run(sc);
    for (const auto& s : r.snapshots)
        for (const auto& z : s.u.raw()) CHECK(z == cplx(0.0, 0.0));
    for (double e : r.budgets.kinetic_energy) CHECK(e == 0.0);
    CHECK(r.budgets.cum_dissipation.back() == 0.0);
}

TEST_CASE("shear decay is exact to the integrating factor") {
    SolverConfig sc;
    sc.grid = Grid(2, 32);
    sc.nu = 0.1;
    sc.dt = 1e-3;
    sc.t_end = 1.0;
    sc.snapshot_stride = 250;
    sc.initial.kind = InitialSpec::Kind::Shear;
    RunResult r = run(sc);
    const Snapshot& last = r.snapshots.back();
    CHECK(last.t == doctest::Approx(1.0));
    RealField v = to_real(last.u);
    const double decay = std::exp(-sc.nu * last.t);
    double err = 0.0;
    const int n = sc.grid.n();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            err = std::max(err,
                           std::fabs(v.comp(0)[i * n + j] - decay * std::sin(j * sc.grid.spacing())));
            err = std::max(err, std::fabs(v.comp(1)[i * n + j]));
        }
    CHECK(err < 1e-10);
}

TEST_CASE("taylor-green decay: pointwise closed form and energy law") {
    SolverConfig sc;
    sc.grid = Grid(2, 64);
    sc.nu = 0.05;
    sc.dt = 1e-3;
    sc.t_end = 1.0;
    sc.snapshot_stride = 100;
    sc.initial.kind = InitialSpec::Kind::TaylorGreen;
    RunResult r = run(sc);

    const Snapshot& last = r.snapshots.back();
    RealField v = to_real(last.u);
    const double decay = std::exp(-2.0 * sc.nu * last.t);
    const int n = sc.grid.n();
    const double h = sc.grid.spacing();
    double err = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double x = i * h, y = j * h;
            err = std::max(err,
                           std::fabs(v.comp(0)[i * n + j] - decay * std::sin(x) * std::cos(y)));
            err = std::max(err,
                           std::fabs(v.comp(1)[i * n + j] + decay * std::cos(x) * std::sin(y)));
        }
    CHECK(err < 1e-8);

    // E(t) = pi^2 exp(-4 nu t)
    for (std::size_t i = 0; i < r.budgets.t.size(); ++i) {
        const double expect = M_PI * M_PI * std::exp(-4.0 * sc.nu * r.budgets.t[i]);
        CHECK(std::fabs(r.budgets.kinetic_energy[i] - expect) < 1e-6 * expect);
    }
    CHECK(r.budgets.balance_residual_rel() < 1e-5);

    // divergence-free along the whole trajectory
    for (const auto& s : r.snapshots)
        CHECK(max_divergence(s.u) / std::max(1.0, l2_norm_spectral(s.u)) < 1e-12);
}

TEST_CASE("pressure solve: shear, taylor-green, and the Laplacian residual oracle") {
    Grid g(2, 64);
    SUBCASE("shear has zero pressure") {
        SpectralField p = solve_pressure(shear(g));
        double m = 0.0;
        for (const auto& z : p.raw()) m = std::max(m, std::abs(z));
        CHECK(m < 1e-14);
    }
    SUBCASE("taylor-green pressure matches the hand-derived closed form") {
        SpectralField u = taylor_green(g);
        RealField p = to_real(solve_pressure(u));
        const int n = g.n();
        const double h = g.spacing();
        double err = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                err = std::max(err, std::fabs(p.comp(0)[i * n + j] -
                                              0.25 * (std::cos(2 * i * h) + std::cos(2 * j * h))));
        CHECK(err < 1e-12);
        CHECK(p.comp(0)[0] == doctest::Approx(0.25 * 2.0 * std::cos(0.0) - 0.5).epsilon(1));
    }
    SUBCASE("random solenoidal field: apply the Laplacian back") {
        SyntheticSpec spec;
        spec.seed = 9;
        SpectralField u = random_besov_field(g, spec);
        SpectralField p = solve_pressure(u);
        CHECK(std::abs(p.comp(0)[0]) == 0.0);  // mean-free

        SpectralField w = product_tensor_dealiased(u, u);
        SpectralField resid = laplacian(p);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                SpectralField wij(g, 1);
                std::copy(w.comp(i * 2 + j), w.comp(i * 2 + j) + g.points(), wij.comp(0));
                SpectralField dd = derivative(derivative(wij, i), j);
                for (std::int64_t q = 0; q < g.points(); ++q)
                    resid.comp(0)[q] += dd.comp(0)[q];
            }
        const double u3 = lp_norm(u, 3.0);
        CHECK(l2_norm_spectral(resid) / (u3 * u3) < 1e-12);
    }
}

TEST_CASE("viscosity-time rescaling of the exact shear solution") {
    auto final_state = [](double nu, double t_end) {
        SolverConfig sc;
        sc.grid = Grid(2, 32);
        sc.nu = nu;
        sc.dt = 1e-3;
        sc.t_end = t_end;
        sc.snapshot_stride = 1000000;  // endpoints only
        sc.initial.kind = InitialSpec::Kind::Shear;
        return run(sc).snapshots.back().u;
    };
    SpectralField a = final_state(0.2, 0.5);
    SpectralField b = final_state(0.1, 1.0);
    CHECK(test::max_abs_diff(a, b) < 1e-12);
}

TEST_CASE("integrator self-convergence on perturbed taylor-green is fourth order") {
    auto final_state = [](double dt) {
        SolverConfig sc;
        sc.grid = Grid(2, 32);
        sc.nu = 0.01;
        sc.dt = dt;
        sc.t_end = 0.1;
        sc.snapshot_stride = 1 << 20;
        sc.initial.kind = InitialSpec::Kind::TaylorGreenPerturbed;
        sc.initial.synth.k_min = 2;
        sc.initial.synth.k_max = 8;
        sc.initial.perturbation = 0.2;  // strong enough for a measurable dt error
        return run(sc).snapshots.back().u;
    };
    SpectralField u1 = final_state(5e-3);
    SpectralField u2 = final_state(2.5e-3);
    SpectralField u4 = final_state(1.25e-3);
    SpectralField u8 = final_state(6.25e-4);

    SpectralField d1 = u1, d2 = u2;
    axpy(d1, -1.0, u4);
    axpy(d2, -1.0, u8);
    const double e1 = l2_norm_spectral(d1);
    const double e2 = l2_norm_spectral(d2);
    const double ratio = e1 / e2;
    CHECK(ratio > 12.0);
    CHECK(ratio < 20.0);
}

TEST_CASE("forced run reaches a statistically steady energy plateau") {
    SolverConfig sc;
    sc.grid = Grid(2, 32);
    sc.nu = 0.25;
    sc.dt = 5e-3;
    sc.t_end = 20.0;
    sc.snapshot_stride = 1 << 20;
    sc.initial.kind = InitialSpec::Kind::Zero;
    sc.forcing.kind = ForcingSpec::Kind::FixedLowMode;
    sc.forcing.amplitude = 0.25;
    sc.forcing.k_f = 1;
    RunResult r = run(sc);

    const auto& b = r.budgets;
    const std::size_t half = b.t.size() / 2;
    double inj_avg = 0.0;
    for (std::size_t i = half; i < b.t.size(); ++i) inj_avg += b.injection_rate[i];
    inj_avg /= (b.t.size() - half);
    const double dEdt_avg = std::fabs(b.kinetic_energy.back() - b.kinetic_energy[half]) /
                            (b.t.back() - b.t[half]);
    CHECK(inj_avg > 0.0);
    CHECK(dEdt_avg < 0.05 * inj_avg);
    CHECK(b.balance_residual_rel() < 1e-5);
}

TEST_CASE("guards: CFL violation, blow-up, non-finite state") {
    SUBCASE("oversized dt trips the CFL check") {
        SolverConfig sc;
        sc.grid = Grid(2, 32);
        sc.nu = 0.05;
        sc.dt = 0.2;  // limit is about 0.1 for |u| ~ 1
        sc.t_end = 1.0;
        sc.initial.kind = InitialSpec::Kind::TaylorGreen;
        CHECK_THROWS_AS(run(sc), CflError);
    }
    SUBCASE("forced growth past the blow-up factor aborts") {
        SolverConfig sc;
        sc.grid = Grid(2, 16);
        sc.nu = 0.01;
        sc.dt = 0.01;
        sc.t_end = 50.0;
        sc.blowup_factor = 2.0;
        sc.initial.kind = InitialSpec::Kind::Zero;
        sc.forcing.kind = ForcingSpec::Kind::FixedLowMode;
        sc.forcing.amplitude = 1.0;
        CHECK_THROWS_AS(run(sc), BlowupError);
    }
    SUBCASE("non-finite velocity is detected") {
        SolverConfig sc;
        sc.grid = Grid(2, 16);
        sc.nu = 0.1;
        sc.dt = 1e-3;
        TimeStepper ts(sc);
        SpectralField u = initial_field(sc.grid, sc.initial);
        u.comp(0)[3] = cplx(std::nan(""), 0.0);
        double t = 0.0;
        CHECK_THROWS_AS(ts.step(u, t), BlowupError);
    }
}

TEST_CASE("single-step helper agrees with the stepper") {
    SolverConfig sc;
    sc.grid = Grid(2, 32);
    sc.nu = 0.02;
    sc.dt = 2e-3;
    Snapshot s0 = make_snapshot(0.0, taylor_green(sc.grid));
    Snapshot s1 = step(s0, sc);
    CHECK(s1.t == doctest::Approx(sc.dt));

    TimeStepper ts(sc);
    SpectralField u = s0.u;
    double t = 0.0;
    ts.step(u, t);
    CHECK(test::max_abs_diff(u, s1.u) == 0.0);
}

TEST_CASE("3D: z-independent taylor-green decays exactly, config limits enforced") {
    Grid g(3, 16);
    RealField v(g, 3);
    const int n = g.n();
    const double h = g.spacing();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                const std::int64_t q = (static_cast<std::int64_t>(i) * n + j) * n + k;
                v.comp(0)[q] = std::sin(i * h) * std::cos(j * h);
                v.comp(1)[q] = -std::cos(i * h) * std::sin(j * h);
                v.comp(2)[q] = 0.0;
            }
    SolverConfig sc;
    sc.grid = g;
    sc.nu = 0.05;
    sc.dt = 1e-3;
    sc.t_end = 0.25;
    TimeStepper ts(sc);
    SpectralField u = to_spectral(v);
    double t = 0.0;
    for (int s = 0; s < 250; ++s) ts.step(u, t);
    const double decay = std::exp(-2.0 * sc.nu * t);
    RealField w = to_real(u);
    double err = 0.0;
    for (std::size_t q = 0; q < w.raw().size(); ++q)
        err = std::max(err, std::fabs(w.raw()[q] - decay * v.raw()[q]));
    CHECK(err < 1e-8);

    SolverConfig bad;
    bad.grid = Grid(3, 128);
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
