#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <future>
#include <optional>
#include <thread>

#include <CLI11.hpp>

#include "lflx/cli.hpp"
#include "lflx/quadrature.hpp"
#include "lflx/field_ops.hpp"
#include "lflx/kernels.hpp"
#include "lflx/reports.hpp"
#include "lflx/snapshot_io.hpp"
#include "lflx/statistics.hpp"
#include "lflx/synthetic.hpp"

namespace fs = std::filesystem;

namespace lflx {

namespace {

struct CliOptions {
    std::string config_path;
    std::string out_dir;
    std::vector<double> nu_override;
    std::vector<double> ell_override;
    long long seed_override = -1;
    bool quiet = false;
};

ExperimentConfig resolve_config(const CliOptions& o) {
    ExperimentConfig cfg =
        o.config_path.empty() ? ExperimentConfig{} : ExperimentConfig::parse_file(o.config_path);
    if (!o.out_dir.empty()) cfg.output_dir = o.out_dir;
    if (!o.nu_override.empty()) {
        cfg.sweep.nu_list = o.nu_override;
        cfg.solver.nu = o.nu_override.front();
    }
    if (!o.ell_override.empty()) cfg.analysis.ell_list = o.ell_override;
    if (o.seed_override >= 0) {
        cfg.solver.initial.synth.seed = static_cast<std::uint64_t>(o.seed_override);
        cfg.sweep.seed_list = {static_cast<std::uint64_t>(o.seed_override)};
    }
    return cfg;
}

Mollifier make_mollifier(const ExperimentConfig& cfg) {
    return Mollifier(cfg.analysis.mollifier == "gaussian" ? Mollifier::Kind::Gaussian
                                                          : Mollifier::Kind::Bump);
}

std::vector<std::array<int, 3>> directions_from(const ExperimentConfig& cfg) {
    auto dirs = default_directions(cfg.solver.grid.dim());
    if (cfg.analysis.directions == "axes") dirs.resize(cfg.solver.grid.dim());
    return dirs;
}

std::vector<int> separations_from(const ExperimentConfig& cfg) {
    return cfg.analysis.separations.empty() ? dyadic_separations(cfg.solver.grid.n())
                                            : cfg.analysis.separations;
}

std::vector<double> orders_with_three(const ExperimentConfig& cfg) {
    auto orders = cfg.analysis.p_list;
    if (std::none_of(orders.begin(), orders.end(),
                     [](double p) { return std::fabs(p - 3.0) < 1e-12; }))
        orders.push_back(3.0);
    return orders;
}

int max_threads() {
    if (const char* env = std::getenv("LFLX_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

void say(bool quiet, const std::string& msg) {
    if (!quiet) std::fputs((msg + "\n").c_str(), stdout);
}

std::string snapshot_name(int index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "snap_%06d.lflx", index);
    return buf;
}

struct LoadedTrajectory {
    std::vector<Snapshot> snaps;
    double nu = 0.0;
    bool divergence_warning = false;
};

LoadedTrajectory load_trajectory(const std::string& dir) {
    std::vector<fs::path> paths;
    if (!fs::is_directory(dir)) throw std::runtime_error("no snapshot directory: " + dir);
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().extension() == ".lflx") paths.push_back(e.path());
    if (paths.empty()) throw std::runtime_error("no .lflx snapshots in " + dir);
    std::sort(paths.begin(), paths.end());
    LoadedTrajectory out;
    for (const auto& p : paths) {
        LoadedSnapshot ls = load_snapshot(p.string());
        out.nu = ls.nu;
        out.divergence_warning = out.divergence_warning || ls.divergence_warning;
        out.snaps.push_back(std::move(ls.snap));
    }
    std::sort(out.snaps.begin(), out.snaps.end(),
              [](const Snapshot& a, const Snapshot& b) { return a.t < b.t; });
    return out;
}

// ------------------------------------------------------------------ simulate

int cmd_simulate(const ExperimentConfig& cfg, bool quiet) {
    fs::create_directories(cfg.output_dir + "/snapshots");
    const std::string prov = provenance_block(cfg);
    {
        std::ofstream f(cfg.output_dir + "/config.cfg");
        f << cfg.serialize();
    }
    int index = 0;
    RunResult res = run(
        cfg.solver,
        [&](const Snapshot& s) {
            save_snapshot(cfg.output_dir + "/snapshots/" + snapshot_name(index), s,
                          cfg.solver.nu);
            ++index;
        },
        false);
    write_budget_csv(cfg.output_dir + "/budget.csv", prov, res.budgets);
    say(quiet, "simulate: wrote " + std::to_string(index) + " snapshots, E(T) = " +
                   format_double(res.budgets.kinetic_energy.back()) +
                   ", balance residual = " +
                   format_double(res.budgets.balance_residual_rel()));
    return 0;
}

// ------------------------------------------------------------------ budget

int cmd_budget(const ExperimentConfig& cfg, bool quiet) {
    LoadedTrajectory traj = load_trajectory(cfg.output_dir + "/snapshots");
    if (traj.divergence_warning)
        say(quiet, "budget: warning, loaded data exceeds the divergence threshold");
    const double nu = traj.nu > 0.0 ? traj.nu : cfg.solver.nu;
    Mollifier m = make_mollifier(cfg);
    const std::string prov = provenance_block(cfg);

    const bool forced = cfg.solver.forcing.kind != ForcingSpec::Kind::None;
    if (forced && traj.snaps.front().u.grid() != cfg.solver.grid)
        throw std::runtime_error("budget: forcing grid in the config does not match the snapshots");
    SpectralField f = forcing_field(traj.snaps.front().u.grid(), cfg.solver.forcing);

    std::vector<FluxBudget> budgets;
    for (double ell : cfg.analysis.ell_list)
        budgets.push_back(global_identity(traj.snaps, nu, ell, m, forced ? &f : nullptr));
    write_flux_budget_csv(cfg.output_dir + "/flux_budget.csv", prov, budgets);

    std::map<double, std::vector<BalanceResidualSample>> residuals;
    if (traj.snaps.size() >= 5) {
        residuals[0.0] = unfiltered_balance_residual(traj.snaps, nu, forced ? &f : nullptr);
        for (double ell : cfg.analysis.ell_list)
            residuals[ell] = resolved_balance_residual(traj.snaps, nu, ell, m,
                                                       forced ? &f : nullptr);
        write_residual_csv(cfg.output_dir + "/residuals.csv", prov, residuals);
    } else {
        say(quiet, "budget: fewer than 5 snapshots, balance residual series skipped");
    }

    for (const auto& b : budgets)
        say(quiet, "budget: ell = " + format_double(b.ell) +
                       "  relative closure residual = " + format_double(b.relative_residual()));
    return 0;
}

// ------------------------------------------------------------------ structure

int cmd_structure(const ExperimentConfig& cfg, bool quiet) {
    LoadedTrajectory traj = load_trajectory(cfg.output_dir + "/snapshots");
    const std::string prov = provenance_block(cfg);
    const auto dirs = directions_from(cfg);
    const auto seps = separations_from(cfg);
    const auto orders = orders_with_three(cfg);

    std::vector<StructureFunctionTable> tables;
    std::vector<double> times;
    for (std::size_t i = 0; i < traj.snaps.size(); i += cfg.analysis.analysis_stride) {
        tables.push_back(structure_function(traj.snaps[i].u, orders, seps, dirs));
        times.push_back(traj.snaps[i].t);
    }
    StructureFunctionTable avg = time_average_tables(tables, times);
    write_structure_csv(cfg.output_dir + "/structure.csv", prov, avg);

    std::vector<BesovRow> rows;
    std::vector<RatioRow> ratios;
    for (double p : cfg.analysis.p_list) {
        const std::size_t oi = avg.order_index(p);
        for (double sigma : cfg.analysis.sigma_list) {
            BesovEstimate b = besov_estimate(avg, oi, sigma, cfg.analysis.ell0);
            rows.push_back(BesovRow{p, sigma, b.c0, b.c1, b.norm, b.argmax_r});
            C0RatioSeries s = c0_ratio(avg, oi, sigma);
            for (std::size_t i = 0; i < s.r.size(); ++i)
                ratios.push_back(RatioRow{p, sigma, s.r[i], s.ratio[i]});
        }
    }
    write_besov_csv(cfg.output_dir + "/besov.csv", prov, rows);
    write_ratio_csv(cfg.output_dir + "/structure_ratios.csv", prov, ratios);

    const double r_min = cfg.analysis.fit_r_min > 0.0 ? cfg.analysis.fit_r_min
                                                      : 4.0 * cfg.solver.grid.spacing();
    const double r_max =
        cfg.analysis.fit_r_max > 0.0 ? cfg.analysis.fit_r_max : cfg.analysis.ell0 / 4.0;
    for (double p : cfg.analysis.p_list) {
        try {
            ScalingFit fit = zeta_fit(avg, avg.order_index(p), r_min, r_max);
            say(quiet, "structure: zeta_" + format_double(p) + " = " + format_double(fit.slope) +
                           (fit.drift_flag ? "  [local-slope drift]" : ""));
        } catch (const std::exception&) {
            say(quiet, "structure: zeta fit for p = " + format_double(p) +
                           " skipped (degenerate data in window)");
        }
    }
    return 0;
}

// ------------------------------------------------------------------ flux-scaling

int cmd_flux_scaling(const ExperimentConfig& cfg, bool quiet) {
    fs::create_directories(cfg.output_dir);
    Mollifier m = make_mollifier(cfg);
    std::vector<SpectralField> fields;
    for (std::uint64_t seed : cfg.sweep.seed_list) {
        SyntheticSpec spec = cfg.solver.initial.synth;
        spec.kind = SyntheticSpec::Kind::RandomBesov;
        spec.seed = seed;
        fields.push_back(random_besov_field(cfg.solver.grid, spec));
    }
    FluxScalingReport rep =
        flux_scaling_report(fields, cfg.analysis.ell_list, m, cfg.solver.nu);
    const std::string prov = provenance_block(cfg);
    write_flux_scaling_csv(cfg.output_dir + "/flux_scaling.csv", prov, rep);
    write_flux_scaling_json(cfg.output_dir + "/flux_scaling_summary.json", cfg, rep,
                            cfg.solver.initial.synth.sigma);
    if (rep.degenerate) {
        say(quiet, "flux-scaling: degenerate input, fits skipped");
    } else {
        say(quiet, "flux-scaling: slopes  flux = " + format_double(rep.mean_flux_slope) +
                       "  cumulant = " + format_double(rep.mean_cumulant_slope) +
                       "  dissipation = " + format_double(rep.mean_dissipation_slope));
    }
    return 0;
}

// ------------------------------------------------------------------ sweep

struct MemberResult {
    SweepMemberSummary summary;
    std::vector<FluxBudget> budgets;
};

MemberResult run_member(const ExperimentConfig& cfg, double nu) {
    SolverConfig sc = cfg.solver;
    sc.nu = nu;
    sc.initial.synth.seed = cfg.sweep.seed_list.front();

    Mollifier m = make_mollifier(cfg);
    const auto dirs = directions_from(cfg);
    const auto seps = separations_from(cfg);
    const auto orders = orders_with_three(cfg);
    const auto& ells = cfg.analysis.ell_list;

    SpectralField f = forcing_field(sc.grid, sc.forcing);
    const bool forced = sc.forcing.kind != ForcingSpec::Kind::None;

    MemberResult out;
    auto& mb = out.summary;
    mb.nu = nu;

    struct EllSeries {
        std::vector<double> flux, resolved, lhs, forcing;
        double first_trace = 0.0, last_trace = 0.0;
    };
    std::vector<EllSeries> series(ells.size());
    std::vector<double> ts;

    int emitted = 0;
    RunResult res = run(
        sc,
        [&](const Snapshot& s) {
            if (emitted++ % cfg.analysis.analysis_stride != 0) return;
            ts.push_back(s.t);
            mb.table_times.push_back(s.t);
            mb.tables.push_back(structure_function(s.u, orders, seps, dirs));
            for (std::size_t e = 0; e < ells.size(); ++e) {
                FluxRates r = flux_rates(s.u, nu, ells[e], m, forced ? &f : nullptr);
                series[e].flux.push_back(r.flux);
                series[e].resolved.push_back(r.resolved_dissipation);
                series[e].lhs.push_back(r.total_dissipation);
                series[e].forcing.push_back(r.forcing_trace);
                if (ts.size() == 1) series[e].first_trace = r.cumulant_trace;
                series[e].last_trace = r.cumulant_trace;
            }
        },
        false);

    for (std::size_t e = 0; e < ells.size(); ++e) {
        FluxBudget b;
        b.ell = ells[e];
        b.flux_integral = simpson(ts, series[e].flux);
        b.resolved_dissipation = simpson(ts, series[e].resolved);
        b.lhs_total_dissipation = simpson(ts, series[e].lhs);
        b.forcing_cumulant = simpson(ts, series[e].forcing);
        b.initial_cumulant = 0.5 * series[e].first_trace;
        b.final_cumulant = 0.5 * series[e].last_trace;
        out.budgets.push_back(b);
    }

    mb.energy_initial = res.budgets.kinetic_energy.front();
    mb.energy_final = res.budgets.kinetic_energy.back();
    mb.total_dissipation = res.budgets.cum_dissipation.back();
    mb.total_injection = res.budgets.cum_injection.back();
    mb.balance_residual_rel = res.budgets.balance_residual_rel();
    return out;
}

int cmd_sweep(const ExperimentConfig& cfg, bool quiet) {
    fs::create_directories(cfg.output_dir);
    const auto& nus = cfg.sweep.nu_list;
    if (nus.size() < 4) throw ConfigError("sweep: need at least 4 viscosities");

    const int threads = std::max(1, std::min<int>(max_threads(), static_cast<int>(nus.size())));
    std::vector<MemberResult> results(nus.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= nus.size()) return;
            results[i] = run_member(cfg, nus[i]);
        }
    };
    {
        std::vector<std::future<void>> futs;
        for (int w = 0; w < threads; ++w) futs.push_back(std::async(std::launch::async, worker));
        for (auto& fu : futs) fu.get();
    }

    SweepOutputs out;
    for (auto& r : results) {
        out.members.push_back(std::move(r.summary));
        out.flux_budgets.push_back(std::move(r.budgets));
    }
    ReportOptions opt;
    opt.grid_spacing = cfg.solver.grid.spacing();
    opt.ell0 = cfg.analysis.ell0;
    opt.fit_r_min = cfg.analysis.fit_r_min;
    opt.fit_r_max = cfg.analysis.fit_r_max;
    opt.epsilon = cfg.analysis.epsilon;
    opt.consistency_tol = cfg.analysis.consistency_tol;
    out.report = onsager_report(out.members, opt);

    const std::string prov = provenance_block(cfg);
    write_sweep_csvs(cfg.output_dir, prov, out);
    write_sweep_json(cfg.output_dir + "/sweep_summary.json", cfg, out);

    say(quiet, "sweep: alpha_hat = " + format_double(out.report.alpha_hat) +
                   "  sigma_hat = " + format_double(out.report.sigma_hat) +
                   "  consistency_margin = " + format_double(out.report.consistency_margin) +
                   (out.report.consistency_ok ? "  (holds)" : "  (violated)"));
    say(quiet, "sweep: besov trend (nu -> 0): " + out.report.besov_trend);
    return 0;
}

// ------------------------------------------------------------------ synth

int cmd_synth(const ExperimentConfig& cfg, bool quiet) {
    fs::create_directories(cfg.output_dir);
    SpectralField u = initial_field(cfg.solver.grid, cfg.solver.initial);
    Snapshot s{0.0, u, SpectralField(cfg.solver.grid, 1)};
    save_snapshot(cfg.output_dir + "/field.lflx", s, 0.0, false);
    say(quiet, "synth: ||u||_2 = " + format_double(l2_norm_spectral(u)) +
                   ", max divergence = " + format_double(max_divergence(u)));
    return 0;
}

// ------------------------------------------------------------------ check

int cmd_check(bool quiet) {
    (void)quiet;
    struct Check {
        std::string name;
        std::function<std::optional<std::string>()> fn;
    };
    auto expect = [](bool ok, const std::string& detail) -> std::optional<std::string> {
        if (ok) return std::nullopt;
        return detail;
    };

    std::vector<Check> checks;
    checks.push_back({"fft_round_trip", [&]() {
        Grid g(2, 64);
        SyntheticSpec spec;
        spec.seed = 7;
        SpectralField u = random_besov_field(g, spec);
        RealField v = to_real(u);
        SpectralField u2 = to_spectral(v);
        double err = 0.0;
        for (std::size_t i = 0; i < u.raw().size(); ++i)
            err = std::max(err, std::abs(u.raw()[i] - u2.raw()[i]));
        return expect(err < 1e-12, "round-trip error " + format_double(err));
    }});
    checks.push_back({"sin_mode_coefficients", [&]() {
        Grid g(2, 16);
        SpectralField u = single_mode(g, {1, 0, 0}, 1);
        const cplx plus = u.comp(1)[static_cast<std::int64_t>(1) * 16];
        const cplx minus = u.comp(1)[static_cast<std::int64_t>(15) * 16];
        double err = std::abs(plus - cplx(0, -0.5)) + std::abs(minus - cplx(0, 0.5));
        return expect(err < 1e-14, "coefficient error " + format_double(err));
    }});
    checks.push_back({"derivative_sin", [&]() {
        Grid g(2, 32);
        SpectralField u = single_mode(g, {1, 0, 0}, 1);
        RealField d = to_real(derivative(u, 0));
        double err = 0.0;
        const double h = g.spacing();
        for (int i = 0; i < 32; ++i)
            for (int j = 0; j < 32; ++j)
                err = std::max(err,
                               std::fabs(d.comp(1)[i * 32 + j] - std::cos(i * h)));
        return expect(err < 1e-13, "max error " + format_double(err));
    }});
    checks.push_back({"leray_projection", [&]() {
        Grid g(2, 32);
        SyntheticSpec spec;
        spec.seed = 3;
        SpectralField u = random_besov_field(g, spec);
        SpectralField pu = leray_project(u);
        double div = max_divergence(pu) / l2_norm_spectral(pu);
        SpectralField ppu = leray_project(pu);
        double idem = 0.0;
        for (std::size_t i = 0; i < pu.raw().size(); ++i)
            idem = std::max(idem, std::abs(pu.raw()[i] - ppu.raw()[i]));
        return expect(div < 1e-13 && idem < 1e-13,
                      "div " + format_double(div) + " idem " + format_double(idem));
    }});
    checks.push_back({"parseval", [&]() {
        Grid g(2, 64);
        SyntheticSpec spec;
        spec.seed = 5;
        SpectralField u = random_besov_field(g, spec);
        const double a = lp_norm(u, 2.0);
        const double b = l2_norm_spectral(u);
        return expect(std::fabs(a - b) < 1e-12 * b, "collocation vs Parseval mismatch");
    }});
    checks.push_back({"shear_decay", [&]() {
        SolverConfig sc;
        sc.grid = Grid(2, 32);
        sc.nu = 0.1;
        sc.dt = 1e-3;
        sc.t_end = 0.5;
        sc.initial.kind = InitialSpec::Kind::Shear;
        RunResult r = run(sc);
        RealField v = to_real(r.snapshots.back().u);
        const double decay = std::exp(-sc.nu * r.snapshots.back().t);
        double err = 0.0;
        const double h = sc.grid.spacing();
        for (int i = 0; i < 32; ++i)
            for (int j = 0; j < 32; ++j) {
                err = std::max(err, std::fabs(v.comp(0)[i * 32 + j] - decay * std::sin(j * h)));
                err = std::max(err, std::fabs(v.comp(1)[i * 32 + j]));
            }
        return expect(err < 1e-10, "max error " + format_double(err));
    }});
    checks.push_back({"taylor_green_decay", [&]() {
        SolverConfig sc;
        sc.grid = Grid(2, 32);
        sc.nu = 0.05;
        sc.dt = 1e-3;
        sc.t_end = 0.5;
        sc.initial.kind = InitialSpec::Kind::TaylorGreen;
        RunResult r = run(sc);
        RealField v = to_real(r.snapshots.back().u);
        const double decay = std::exp(-2.0 * sc.nu * r.snapshots.back().t);
        double err = 0.0;
        const double h = sc.grid.spacing();
        for (int i = 0; i < 32; ++i)
            for (int j = 0; j < 32; ++j) {
                const double x = i * h, y = j * h;
                err = std::max(err, std::fabs(v.comp(0)[i * 32 + j] -
                                              decay * std::sin(x) * std::cos(y)));
                err = std::max(err, std::fabs(v.comp(1)[i * 32 + j] +
                                              decay * std::cos(x) * std::sin(y)));
            }
        return expect(err < 1e-8, "max error " + format_double(err));
    }});
    checks.push_back({"pressure_taylor_green", [&]() {
        Grid g(2, 32);
        SpectralField u = taylor_green(g);
        RealField p = to_real(solve_pressure(u));
        double err = 0.0;
        const double h = g.spacing();
        for (int i = 0; i < 32; ++i)
            for (int j = 0; j < 32; ++j)
                err = std::max(err, std::fabs(p.comp(0)[i * 32 + j] -
                                              0.25 * (std::cos(2 * i * h) + std::cos(2 * j * h))));
        return expect(err < 1e-12, "max error " + format_double(err));
    }});
    checks.push_back({"mollifier_unit_mass_and_scaling", [&]() {
        Mollifier m;
        Grid g(2, 32);
        auto t1 = m.multiplier(g, 0.2);
        const bool unit = (*t1)[0] == 1.0;
        const double a = m.transform_value(2, 0.2 * 2.0);
        const double b = m.transform_value(2, 0.4 * 1.0);
        return expect(unit && std::fabs(a - b) < 1e-12, "unit-mass/scaling failure");
    }});
    checks.push_back({"shear_flux_zero", [&]() {
        Grid g(2, 32);
        Mollifier m;
        RealField pi = flux(shear(g), 0.5, m);
        double err = 0.0;
        for (double v : pi.raw()) err = std::max(err, std::fabs(v));
        return expect(err < 1e-13, "max |Pi| " + format_double(err));
    }});
    checks.push_back({"global_identity_taylor_green", [&]() {
        SolverConfig sc;
        sc.grid = Grid(2, 32);
        sc.nu = 0.02;
        sc.dt = 2e-3;
        sc.t_end = 0.4;
        sc.snapshot_stride = 10;
        sc.initial.kind = InitialSpec::Kind::TaylorGreen;
        RunResult r = run(sc);
        Mollifier m;
        FluxBudget b = global_identity(r.snapshots, sc.nu, 0.5, m);
        return expect(b.relative_residual() < 1e-6,
                      "relative residual " + format_double(b.relative_residual()));
    }});
    checks.push_back({"structure_function_sin", [&]() {
        Grid g(2, 64);
        SpectralField u = single_mode(g, {1, 0, 0}, 1);  // (0, sin x)
        std::vector<double> orders{2.0};
        std::vector<int> seps;
        for (int m2 = 0; m2 < 64; ++m2) seps.push_back(m2);
        std::vector<std::array<int, 3>> dirs{{1, 0, 0}};
        auto t = structure_function(u, orders, seps, dirs);
        double err = 0.0;
        for (std::size_t e = 0; e < t.entries.size(); ++e)
            err = std::max(err, std::fabs(t.values[0][e] - (1.0 - std::cos(t.entries[e].r))));
        return expect(err < 1e-12, "max error " + format_double(err));
    }});
    checks.push_back({"exponent_inverses", [&]() {
        for (int i = 0; i < 100; ++i) {
            const double a = i / 100.0;
            if (std::fabs(alpha_of_sigma(sigma_of_alpha(a)) - a) > 1e-14)
                return expect(false, "round trip failed at alpha = " + format_double(a));
        }
        return expect(std::fabs(sigma_of_alpha(0.0) - 1.0 / 3.0) < 1e-16, "sigma_0 != 1/3");
    }});
    checks.push_back({"dissipation_length_balance", [&]() {
        const double nu = 3.7e-4, sigma = 0.41;
        const double ell = dissipation_length(nu, sigma);
        const double lhs = std::pow(ell, 3.0 * sigma - 1.0);
        const double rhs = nu * std::pow(ell, 2.0 * (sigma - 1.0));
        return expect(std::fabs(lhs - rhs) < 1e-14 * std::fabs(lhs), "terms differ");
    }});
    checks.push_back({"snapshot_io_round_trip", [&]() {
        Grid g(2, 16);
        Snapshot s = make_snapshot(0.25, taylor_green(g));
        const std::string p1 = fs::temp_directory_path() / "lflx_check_a.lflx";
        const std::string p2 = fs::temp_directory_path() / "lflx_check_b.lflx";
        save_snapshot(p1, s, 0.01);
        SnapshotFileData d1 = read_snapshot_file(p1);
        write_snapshot_file(p2, d1);
        std::ifstream f1(p1, std::ios::binary), f2(p2, std::ios::binary);
        std::string b1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
        std::string b2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
        return expect(!b1.empty() && b1 == b2, "bytes differ after round trip");
    }});
    checks.push_back({"config_round_trip", [&]() {
        ExperimentConfig c;
        c.solver.nu = 1.2345678901234567e-3;
        ExperimentConfig c2 = ExperimentConfig::parse(c.serialize());
        return expect(c.serialize() == c2.serialize(), "serialization mismatch");
    }});
    checks.push_back({"kernel_backends_agree", [&]() {
        if (!kern::avx2_available()) return expect(true, "");
        std::vector<double> a(1001), b(1001);
        std::uint64_t st = 42;
        auto rnd = [&st]() {
            std::uint64_t z = (st += 0x9E3779B97F4A7C15ull);
            z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
            z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
            z ^= z >> 31;
            return static_cast<double>(z >> 11) * 0x1.0p-53 - 0.5;
        };
        for (auto& v : a) v = rnd();
        for (auto& v : b) v = rnd();
        const auto& s = kern::scalar_backend();
        const auto& x = kern::avx2_backend();
        const double d1 = std::fabs(s.dot(a.data(), b.data(), a.size()) -
                                    x.dot(a.data(), b.data(), a.size()));
        const double d2 = std::fabs(s.sum_sq(a.data(), a.size()) - x.sum_sq(a.data(), a.size()));
        return expect(d1 < 1e-10 && d2 < 1e-10, "backend mismatch");
    }});

    int failures = 0;
    for (auto& c : checks) {
        std::optional<std::string> err;
        try {
            err = c.fn();
        } catch (const std::exception& e) {
            err = std::string("exception: ") + e.what();
        }
        if (err) {
            ++failures;
            std::printf("FAIL  %-34s %s\n", c.name.c_str(), err->c_str());
        } else {
            std::printf("PASS  %s\n", c.name.c_str());
        }
    }
    if (failures) std::printf("%d check(s) failed\n", failures);
    return failures ? 1 : 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"pseudo-spectral Navier-Stokes solver with scale-resolved energy budgets"};
    app.require_subcommand(1);

    CliOptions opt;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config_path, "config file (key = value format)");
        sub->add_option("--out", opt.out_dir, "output directory override");
        sub->add_option("--nu", opt.nu_override, "viscosity list override")->delimiter(',');
        sub->add_option("--ell", opt.ell_override, "filter scale list override")->delimiter(',');
        sub->add_option("--seed", opt.seed_override, "seed override");
        sub->add_flag("--quiet", opt.quiet, "suppress progress output");
    };

    auto* sim = app.add_subcommand("simulate", "run the solver, write snapshots and budget CSV");
    auto* bud = app.add_subcommand("budget", "evaluate resolved/global energy balances on stored snapshots");
    auto* str = app.add_subcommand("structure", "structure functions and Besov estimates from snapshots");
    auto* fsc = app.add_subcommand("flux-scaling", "filter-scale scaling report on synthetic ensembles");
    auto* swp = app.add_subcommand("sweep", "viscosity sweep with consistency report");
    auto* syn = app.add_subcommand("synth", "write a generated field as a snapshot file");
    auto* chk = app.add_subcommand("check", "run the built-in exact-solution regression suite");
    for (auto* s : {sim, bud, str, fsc, swp, syn, chk}) add_common(s);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (chk->parsed()) return cmd_check(opt.quiet);
        ExperimentConfig cfg = resolve_config(opt);
        fs::create_directories(cfg.output_dir);
        if (sim->parsed()) return cmd_simulate(cfg, opt.quiet);
        if (bud->parsed()) return cmd_budget(cfg, opt.quiet);
        if (str->parsed()) return cmd_structure(cfg, opt.quiet);
        if (fsc->parsed()) return cmd_flux_scaling(cfg, opt.quiet);
        if (swp->parsed()) return cmd_sweep(cfg, opt.quiet);
        if (syn->parsed()) return cmd_synth(cfg, opt.quiet);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}

}  // namespace lflx
