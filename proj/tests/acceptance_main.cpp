// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Each criterion pins its tolerances in code; several also carry a
// wall-clock budget that is asserted.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lflx/cli.hpp"
#include "lflx/coarse_grain.hpp"
#include "lflx/config.hpp"
#include "lflx/field_ops.hpp"
#include "lflx/snapshot_io.hpp"
#include "lflx/solver.hpp"
#include "lflx/statistics.hpp"
#include "lflx/synthetic.hpp"

namespace fs = std::filesystem;
using namespace lflx;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;
std::vector<double> g_balance_residuals;  // criterion 2 collects from every run

void report(int index, const std::string& name, bool ok, const std::string& detail) {
    std::printf("[%s] C%-2d %-38s %s\n", ok ? "PASS" : "FAIL", index, name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

RunResult solve(const SolverConfig& sc) {
    RunResult r = run(sc);
    g_balance_residuals.push_back(r.budgets.balance_residual_rel());
    return r;
}

std::string fmt(double v) { return format_double(v); }

// ------------------------------------------------------------------ C1

void criterion_1() {
    const auto t0 = Clock::now();
    SolverConfig tg;
    tg.grid = Grid(2, 64);
    tg.nu = 0.05;
    tg.dt = 1e-3;
    tg.t_end = 1.0;
    tg.snapshot_stride = 1000;
    tg.initial.kind = InitialSpec::Kind::TaylorGreen;
    RunResult rtg = solve(tg);
    RealField v = to_real(rtg.snapshots.back().u);
    const double decay = std::exp(-2.0 * tg.nu * 1.0);
    const int n = tg.grid.n();
    const double h = tg.grid.spacing();
    double tg_err = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double x = i * h, y = j * h;
            tg_err = std::max(tg_err, std::fabs(v.comp(0)[i * n + j] -
                                                decay * std::sin(x) * std::cos(y)));
            tg_err = std::max(tg_err, std::fabs(v.comp(1)[i * n + j] +
                                                decay * std::cos(x) * std::sin(y)));
        }

    SolverConfig sh = tg;
    sh.nu = 0.1;
    sh.initial.kind = InitialSpec::Kind::Shear;
    RunResult rsh = solve(sh);
    RealField w = to_real(rsh.snapshots.back().u);
    const double sdecay = std::exp(-sh.nu * 1.0);
    double sh_err = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            sh_err = std::max(sh_err,
                              std::fabs(w.comp(0)[i * n + j] - sdecay * std::sin(j * h)));
            sh_err = std::max(sh_err, std::fabs(w.comp(1)[i * n + j]));
        }

    const double dt_wall = seconds_since(t0);
    const bool ok = tg_err < 1e-8 && sh_err < 1e-10 && dt_wall < 60.0;
    report(1, "exact-solution regression", ok,
           "TG err " + fmt(tg_err) + " (<1e-8), shear err " + fmt(sh_err) +
               " (<1e-10), wall " + fmt(dt_wall) + "s (<60)");
}

// ------------------------------------------------------------------ C3 + C4

std::vector<Snapshot> g_ptg_snapshots;  // perturbed-TG trajectory shared with C5

void criterion_3() {
    const auto t0 = Clock::now();
    SolverConfig sc;
    sc.grid = Grid(2, 128);
    sc.nu = 1e-3;
    sc.dt = 1e-3;
    sc.t_end = 1.0;
    sc.snapshot_stride = 10;
    sc.initial.kind = InitialSpec::Kind::TaylorGreenPerturbed;
    sc.initial.synth.k_min = 3;
    sc.initial.synth.k_max = 10;
    sc.initial.synth.seed = 2024;
    sc.initial.perturbation = 0.01;
    RunResult r = solve(sc);
    g_ptg_snapshots = std::move(r.snapshots);

    Mollifier m;
    bool ok = true;
    std::string detail;
    for (double ell : {0.1, 0.3, 0.6}) {
        FluxBudget b = global_identity(g_ptg_snapshots, sc.nu, ell, m);
        const double rel = b.relative_residual();
        detail += "ell=" + fmt(ell) + ": " + fmt(rel) + "  ";
        ok = ok && rel < 1e-5;
    }
    const double dt_wall = seconds_since(t0);
    ok = ok && dt_wall < 300.0;
    report(3, "global dissipation identity closure", ok,
           detail + "(<1e-5 each), wall " + fmt(dt_wall) + "s (<300)");
}

void criterion_4() {
    // stencil-order convergence on the analytically sampled shear decay
    Grid g(2, 64);
    Mollifier m;
    const double nu = 0.5, ell = 0.5;
    auto make_traj = [&](double h, int count) {
        std::vector<Snapshot> traj;
        SpectralField base = shear(g);
        for (int s = 0; s < count; ++s) {
            SpectralField u = base;
            scale(u, std::exp(-nu * s * h));
            traj.push_back(Snapshot{s * h, u, SpectralField(g, 1)});
        }
        return traj;
    };
    auto coarse = resolved_balance_residual(make_traj(0.1, 7), nu, ell, m);
    auto fine = resolved_balance_residual(make_traj(0.05, 13), nu, ell, m);
    const double ratio = coarse[1].residual_l2 / fine[4].residual_l2;  // both at t = 0.3

    // numerically solved Taylor-Green run, stride 10
    SolverConfig sc;
    sc.grid = Grid(2, 128);
    sc.nu = 0.05;
    sc.dt = 1e-3;
    sc.t_end = 0.2;
    sc.snapshot_stride = 10;
    sc.initial.kind = InitialSpec::Kind::TaylorGreen;
    RunResult r = solve(sc);
    auto rows = resolved_balance_residual(r.snapshots, sc.nu, 0.3, m);
    double worst = 0.0;
    for (const auto& row : rows) worst = std::max(worst, row.residual_l2 / row.scale_l2);

    const bool ok = ratio > 12.0 && ratio < 20.0 && worst < 1e-5;
    report(4, "resolved local balance", ok,
           "stride-halving ratio " + fmt(ratio) + " (in [12,20]), TG residual " + fmt(worst) +
               " (<1e-5 rel)");
}

// ------------------------------------------------------------------ C5

void criterion_5() {
    Mollifier m;
    Grid g(2, 64);
    double worst = 0.0;  // most negative min trace normalized by max|u|^2
    auto check_field = [&](const SpectralField& u, double ell) {
        RealField tau = cumulant(u, u, ell, m, ProductMode::Exact);
        RealField ur = to_real(u);
        double umax2 = 0.0;
        const std::size_t np = static_cast<std::size_t>(u.grid().points());
        for (std::size_t q = 0; q < np; ++q) {
            double s = 0.0;
            for (int c = 0; c < u.components(); ++c) s += ur.comp(c)[q] * ur.comp(c)[q];
            umax2 = std::max(umax2, s);
        }
        if (umax2 == 0.0) return;
        const int d = u.grid().dim();
        double mn = 0.0;
        for (std::size_t q = 0; q < np; ++q) {
            double tr = 0.0;
            for (int c = 0; c < d; ++c) tr += tau.comp(c * d + c)[q];
            mn = std::min(mn, tr);
        }
        worst = std::min(worst, mn / umax2);
    };

    for (int seed = 1; seed <= 100; ++seed) {
        SyntheticSpec spec;
        spec.sigma = 0.2 + 0.6 * ((seed * 7) % 11) / 10.0;
        spec.seed = static_cast<std::uint64_t>(seed);
        SpectralField u = random_besov_field(g, spec);
        check_field(u, 0.15);
        check_field(u, 0.6);
    }
    check_field(taylor_green(g), 0.4);
    check_field(shear(g), 0.4);
    check_field(single_mode(g, {2, 0, 0}, 1), 0.4);
    if (!g_ptg_snapshots.empty()) {
        check_field(g_ptg_snapshots.front().u, 0.3);
        check_field(g_ptg_snapshots.back().u, 0.3);
    }

    const bool ok = worst >= -1e-12;
    report(5, "cumulant trace convexity", ok,
           "min tr tau / max|u|^2 = " + fmt(worst) + " (>= -1e-12)");
}

// ------------------------------------------------------------------ C6 + C7

void criteria_6_7() {
    const auto t0 = Clock::now();
    Mollifier m;
    Grid g(2, 256);
    const std::vector<double> ells{kTwoPi / 64.0, kTwoPi / 32.0, kTwoPi / 16.0, kTwoPi / 8.0};
    bool ok6 = true, ok7 = true;
    std::string d6, d7;
    for (double sigma : {0.2, 1.0 / 3.0, 0.5}) {
        std::vector<SpectralField> fields;
        for (int seed = 1; seed <= 8; ++seed) {
            SyntheticSpec spec;
            spec.sigma = sigma;
            spec.seed = static_cast<std::uint64_t>(seed);
            spec.k_min = 1;
            fields.push_back(random_besov_field(g, spec));
        }
        FluxScalingReport rep = flux_scaling_report(fields, ells, m, 1.0);
        const double flux_dev = rep.mean_flux_slope - (3.0 * sigma - 1.0);
        const double cum_dev = rep.mean_cumulant_slope - 2.0 * sigma;
        const double dis_dev = rep.mean_dissipation_slope - 2.0 * (sigma - 1.0);
        d6 += "s=" + fmt(sigma) + ": " + fmt(flux_dev) + "  ";
        d7 += "s=" + fmt(sigma) + ": tau " + fmt(cum_dev) + ", diss " + fmt(dis_dev) + "  ";
        ok6 = ok6 && std::fabs(flux_dev) < 0.15;
        ok7 = ok7 && std::fabs(cum_dev) < 0.15 && std::fabs(dis_dev) < 0.15;
    }
    const double dt_wall = seconds_since(t0);
    ok6 = ok6 && dt_wall < 600.0;
    report(6, "CET flux scaling", ok6,
           "slope dev " + d6 + "(each <0.15), wall " + fmt(dt_wall) + "s (<600)");
    report(7, "cumulant and resolved-dissipation scaling", ok7, "dev " + d7 + "(each <0.15)");
}

// ------------------------------------------------------------------ C8

void criterion_8() {
    Grid g(2, 64);
    SpectralField u = single_mode(g, {1, 0, 0}, 1);
    std::vector<double> orders{2.0};
    std::vector<int> all;
    for (int m2 = 0; m2 < g.n(); ++m2) all.push_back(m2);
    std::vector<std::array<int, 3>> xdir{{1, 0, 0}};
    auto t = structure_function(u, orders, all, xdir);
    double err = 0.0;
    for (std::size_t e = 0; e < t.entries.size(); ++e)
        err = std::max(err, std::fabs(t.values[0][e] - (1.0 - std::cos(t.entries[e].r))));

    // synthetic ensembles: zeta_2 = 2 sigma +- 0.1
    Grid g256(2, 256);
    auto dirs = default_directions(2);
    std::vector<int> seps{4, 8, 16, 32};
    bool zeta_ok = true;
    std::string dz;
    for (double sigma : {0.2, 1.0 / 3.0, 0.5}) {
        StructureFunctionTable mean;
        for (int seed = 1; seed <= 8; ++seed) {
            SyntheticSpec spec;
            spec.sigma = sigma;
            spec.seed = static_cast<std::uint64_t>(seed);
            auto tab = structure_function(random_besov_field(g256, spec), orders, seps, dirs);
            if (seed == 1) {
                mean = tab;
            } else {
                for (std::size_t e = 0; e < mean.values[0].size(); ++e)
                    mean.values[0][e] += tab.values[0][e];
            }
        }
        for (auto& v : mean.values[0]) v /= 8.0;
        ScalingFit fit = zeta_fit(mean, 0, kTwoPi / 64.0, kTwoPi / 8.0);
        dz += "s=" + fmt(sigma) + ": " + fmt(fit.slope - 2.0 * sigma) + "  ";
        zeta_ok = zeta_ok && std::fabs(fit.slope - 2.0 * sigma) < 0.1;
    }
    const bool ok = err < 1e-12 && zeta_ok;
    report(8, "structure-function oracle", ok,
           "sin closed-form err " + fmt(err) + " (<1e-12), zeta_2 dev " + dz + "(each <0.1)");
}

// ------------------------------------------------------------------ C9 + C10

void criterion_9() {
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double a = i / 100.0;
        worst = std::max(worst, std::fabs(alpha_of_sigma(sigma_of_alpha(a)) - a));
    }
    const bool exact_third = sigma_of_alpha(0.0) == 1.0 / 3.0;
    const bool ok = worst < 1e-14 && exact_third;
    report(9, "exponent calculus", ok,
           "round-trip err " + fmt(worst) + " (<1e-14), sigma_0 == 1/3 " +
               (exact_third ? "exactly" : "VIOLATED"));
}

void criterion_10() {
    std::uint64_t state = 99;
    auto uniform = [&state]() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        z ^= z >> 31;
        return static_cast<double>(z >> 11) * 0x1.0p-53;
    };
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const double nu = std::pow(10.0, -6.0 + 5.0 * uniform());
        const double sigma = 0.05 + 0.95 * uniform();
        const double ell = dissipation_length(nu, sigma);
        const double lhs = std::pow(ell, 3.0 * sigma - 1.0);
        const double rhs = nu * std::pow(ell, 2.0 * (sigma - 1.0));
        worst = std::max(worst, std::fabs(lhs - rhs) / std::max(std::fabs(lhs), std::fabs(rhs)));
    }
    report(10, "dissipation-length balancing", worst <= 1e-14,
           "max relative mismatch " + fmt(worst) + " (<=1e-14)");
}

// ------------------------------------------------------------------ C11

void criterion_11() {
    const auto t0 = Clock::now();
    fs::path dir = fs::temp_directory_path() / "lflx_acceptance_sweep";
    fs::remove_all(dir);
    fs::create_directories(dir);

    ExperimentConfig cfg;
    cfg.solver.grid = Grid(2, 256);
    cfg.solver.dt = 5e-3;
    cfg.solver.t_end = 2.0;
    cfg.solver.snapshot_stride = 10;
    cfg.solver.initial.kind = InitialSpec::Kind::RandomBesov;
    cfg.solver.initial.synth.sigma = 0.5;
    cfg.solver.initial.synth.seed = 1;
    cfg.analysis.ell_list = {0.1, 0.3, 0.6};
    cfg.sweep.nu_list = {1e-3, 5e-4, 2.5e-4, 1.25e-4};
    cfg.output_dir = (dir / "out").string();
    const std::string cfg_path = (dir / "sweep.cfg").string();
    std::ofstream(cfg_path) << cfg.serialize();

    const char* argv[] = {"lflx", "sweep", "--config", cfg_path.c_str(), "--quiet"};
    const int rc = cli_main(5, argv);

    bool ok = rc == 0;
    std::string detail = "exit " + std::to_string(rc);
    if (ok) {
        std::ifstream f(cfg.output_dir + "/sweep_summary.json");
        nlohmann::json j = nlohmann::json::parse(f, nullptr, false);
        ok = !j.is_discarded() && j["alpha_hat"].is_number() && j["sigma_hat"].is_number() &&
             j["consistency_margin"].is_number() && j["besov_trend"].is_string();
        if (ok) {
            const double margin = j["consistency_margin"].get<double>();
            ok = margin >= -0.2;
            detail = "alpha_hat " + fmt(j["alpha_hat"].get<double>()) + ", sigma_hat " +
                     fmt(j["sigma_hat"].get<double>()) + ", margin " + fmt(margin) +
                     " (>= -0.2), trend " + j["besov_trend"].get<std::string>();
            for (const auto& mb : j["members"])
                g_balance_residuals.push_back(mb["balance_residual_rel"].get<double>());
        } else {
            detail = "summary JSON failed schema validation";
        }
    }
    const double dt_wall = seconds_since(t0);
    ok = ok && dt_wall < 1800.0;
    report(11, "end-to-end viscosity sweep", ok, detail + ", wall " + fmt(dt_wall) + "s (<1800)");
}

// ------------------------------------------------------------------ C12

void criterion_12() {
    fs::path dir = fs::temp_directory_path() / "lflx_acceptance_io";
    fs::remove_all(dir);
    fs::create_directories(dir);
    Grid g(2, 32);
    Snapshot s = make_snapshot(0.5, taylor_green(g));
    const std::string p1 = (dir / "a.lflx").string();
    const std::string p2 = (dir / "b.lflx").string();
    save_snapshot(p1, s, 0.01);
    write_snapshot_file(p2, read_snapshot_file(p1));
    auto slurp = [](const std::string& p) {
        std::ifstream f(p, std::ios::binary);
        return std::string((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    };
    const std::string b1 = slurp(p1);
    const bool bitexact = !b1.empty() && b1 == slurp(p2);

    bool typed = true;
    {
        std::string bad = b1;
        bad[0] = 'Z';
        std::ofstream(dir / "magic.lflx", std::ios::binary) << bad;
        try {
            load_snapshot((dir / "magic.lflx").string());
            typed = false;
        } catch (const SnapshotIoError& e) {
            typed = typed && e.code == SnapshotIoError::Code::BadMagic;
        } catch (...) {
            typed = false;
        }
    }
    {
        std::string bad = b1;
        bad[4] = 42;
        std::ofstream(dir / "version.lflx", std::ios::binary) << bad;
        try {
            load_snapshot((dir / "version.lflx").string());
            typed = false;
        } catch (const SnapshotIoError& e) {
            typed = typed && e.code == SnapshotIoError::Code::BadVersion;
        } catch (...) {
            typed = false;
        }
    }
    {
        std::ofstream(dir / "trunc.lflx", std::ios::binary) << b1.substr(0, b1.size() / 3);
        try {
            load_snapshot((dir / "trunc.lflx").string());
            typed = false;
        } catch (const SnapshotIoError& e) {
            typed = typed && e.code == SnapshotIoError::Code::Truncated;
        } catch (...) {
            typed = false;
        }
    }
    report(12, "snapshot persistence", bitexact && typed,
           std::string("round trip ") + (bitexact ? "bit-exact" : "DIFFERS") +
               ", corrupted fixtures " + (typed ? "raise typed errors" : "MISBEHAVED"));
}

void criterion_2_summary() {
    double worst = 0.0;
    for (double r : g_balance_residuals) worst = std::max(worst, r);
    const bool ok = !g_balance_residuals.empty() && worst < 1e-5;
    report(2, "global energy balance on all runs", ok,
           "max residual over " + std::to_string(g_balance_residuals.size()) + " runs: " +
               fmt(worst) + " (<1e-5)");
}

}  // namespace

int main() {
    const auto t0 = Clock::now();
    criterion_1();
    criterion_3();
    criterion_4();
    criterion_5();
    criteria_6_7();
    criterion_8();
    criterion_9();
    criterion_10();
    criterion_11();
    criterion_12();
    criterion_2_summary();
    std::printf("acceptance total wall time: %.1fs, %d failure(s)\n", seconds_since(t0),
                g_failures);
    return g_failures ? 1 : 0;
}
