#include <cmath>
#include <cstring>

#include "lflx/field_ops.hpp"
#include "lflx/kernels.hpp"
#include "lflx/quadrature.hpp"
#include "lflx/solver.hpp"

namespace lflx {

void SolverConfig::validate() const {
    if (!(nu > 0.0)) throw std::invalid_argument("SolverConfig: nu must be > 0");
    if (!(dt > 0.0)) throw std::invalid_argument("SolverConfig: dt must be > 0");
    if (t_end < 0.0) throw std::invalid_argument("SolverConfig: t_end must be >= 0");
    if (snapshot_stride < 1) throw std::invalid_argument("SolverConfig: snapshot_stride >= 1");
    if (!(cfl_safety > 0.0)) throw std::invalid_argument("SolverConfig: cfl_safety must be > 0");
    if (grid.dim() == 3 && grid.n() > 64)
        throw std::invalid_argument("SolverConfig: d = 3 supported only up to n = 64");
}

SpectralField forcing_field(const Grid& grid, const ForcingSpec& spec) {
    SpectralField f(grid, grid.dim());
    if (spec.kind == ForcingSpec::Kind::None || spec.amplitude == 0.0) return f;
    const int kf = spec.k_f;
    if (kf < 1 || kf > grid.dealias_cutoff())
        throw std::invalid_argument("forcing_field: k_f outside resolvable band");
    const double a = spec.amplitude;
    if (grid.dim() == 2) {
        f = single_mode(grid, {0, kf, 0}, 0, a);           // (sin k_f y, 0)
        axpy(f, 1.0, single_mode(grid, {kf, 0, 0}, 1, a)); // (0, sin k_f x)
    } else {
        f = single_mode(grid, {0, 0, kf}, 0, a);
        axpy(f, 1.0, single_mode(grid, {kf, 0, 0}, 1, a));
        axpy(f, 1.0, single_mode(grid, {0, kf, 0}, 2, a));
    }
    return f;
}

SpectralField initial_field(const Grid& grid, const InitialSpec& spec) {
    SpectralField u(grid, grid.dim());
    switch (spec.kind) {
        case InitialSpec::Kind::Zero:
            break;
        case InitialSpec::Kind::Shear:
            u = shear(grid);
            break;
        case InitialSpec::Kind::TaylorGreen:
            u = taylor_green(grid);
            break;
        case InitialSpec::Kind::TaylorGreenPerturbed: {
            u = taylor_green(grid);
            SyntheticSpec ps = spec.synth;
            ps.kind = SyntheticSpec::Kind::RandomBesov;
            ps.amplitude = 1.0;
            SpectralField pert = random_besov_field(grid, ps);
            axpy(u, spec.perturbation * l2_norm_spectral(u), pert);
            break;
        }
        case InitialSpec::Kind::RandomBesov:
            u = random_besov_field(grid, spec.synth);
            break;
        case InitialSpec::Kind::SingleMode:
            u = single_mode(grid, spec.synth.k, spec.synth.axis, spec.synth.amplitude);
            break;
    }
    dealias_inplace(u);
    leray_project_inplace(u);
    hermitian_symmetrize(u);
    return u;
}

SpectralField solve_pressure(const SpectralField& u) {
    const Grid& grid = u.grid();
    const int d = grid.dim();
    if (u.components() != d) throw std::invalid_argument("solve_pressure: vector field required");
    SpectralField w = product_tensor_dealiased(u, u);
    SpectralField p(grid, 1);
    const int n = grid.n();
    auto set_mode = [&](std::int64_t idx, const double* kv, double k2) {
        if (k2 == 0.0) {
            p.comp(0)[idx] = 0.0;
            return;
        }
        cplx s(0.0, 0.0);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) s += kv[i] * kv[j] * w.comp(i * d + j)[idx];
        p.comp(0)[idx] = -s / k2;
    };
    if (d == 2) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double kv[2] = {double(grid.wavenumber(i)), double(grid.wavenumber(j))};
                set_mode(static_cast<std::int64_t>(i) * n + j, kv, kv[0] * kv[0] + kv[1] * kv[1]);
            }
    } else {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    double kv[3] = {double(grid.wavenumber(i)), double(grid.wavenumber(j)),
                                    double(grid.wavenumber(k))};
                    set_mode((static_cast<std::int64_t>(i) * n + j) * n + k, kv,
                             kv[0] * kv[0] + kv[1] * kv[1] + kv[2] * kv[2]);
                }
    }
    return p;
}

Snapshot make_snapshot(double t, const SpectralField& u) {
    return Snapshot{t, u, solve_pressure(u)};
}

struct TimeStepper::Impl {
    SolverConfig cfg;
    SpectralField fhat;
    std::vector<double> k2;
    std::vector<double> e_half, e_full;  // for cfg.dt
    double table_dt = 0.0;
    double last_maxu = 0.0;
    double blowup_ref = -1.0;  // set on first step
    // stages
    SpectralField n1, n2, n3, n4, tmp;

    explicit Impl(const SolverConfig& c)
        : cfg(c), fhat(c.grid, c.grid.dim()), n1(c.grid, c.grid.dim()), n2(c.grid, c.grid.dim()),
          n3(c.grid, c.grid.dim()), n4(c.grid, c.grid.dim()), tmp(c.grid, c.grid.dim()) {
        cfg.validate();
        fhat = forcing_field(cfg.grid, cfg.forcing);
        dealias_inplace(fhat);
        leray_project_inplace(fhat);
        k2 = mode_k2_table(cfg.grid);
        build_tables(cfg.dt);
    }

    void build_tables(double dt) {
        const std::size_t np = k2.size();
        e_half.resize(np);
        e_full.resize(np);
        for (std::size_t i = 0; i < np; ++i) {
            e_half[i] = std::exp(-cfg.nu * k2[i] * dt * 0.5);
            e_full[i] = e_half[i] * e_half[i];
        }
        table_dt = dt;
    }

    /// out = -P div T_K(u x u) + f ; optionally records max |u|.
    void eval_nonlinear(const SpectralField& u, SpectralField& out, double* maxu) {
        const Grid& grid = cfg.grid;
        const int d = grid.dim();
        const int n = grid.n();
        RealField vr = to_real(u);
        if (maxu) *maxu = max_magnitude(vr);

        SpectralField w(grid, d * (d + 1) / 2);  // packed upper triangle
        {
            RealField buf(grid, 1);
            const std::size_t np = static_cast<std::size_t>(grid.points());
            int slot = 0;
            for (int i = 0; i < d; ++i)
                for (int j = i; j < d; ++j, ++slot) {
                    kern::active().mul(buf.comp(0), vr.comp(i), vr.comp(j), np);
                    SpectralField ws = to_spectral(buf);
                    std::memcpy(w.comp(slot), ws.comp(0), np * sizeof(cplx));
                }
        }
        auto slot_of = [d](int i, int j) {
            if (i > j) std::swap(i, j);
            // packed upper-triangle offset
            return i * d - i * (i - 1) / 2 + (j - i);
        };

        auto mode = [&](std::int64_t idx, const double* kv, double kk2) {
            cplx g[3];
            for (int i = 0; i < d; ++i) {
                cplx div_i(0.0, 0.0);
                for (int j = 0; j < d; ++j) {
                    const cplx wij = w.comp(slot_of(i, j))[idx];
                    div_i += cplx(-kv[j] * wij.imag(), kv[j] * wij.real());  // i k_j w_ij
                }
                g[i] = -div_i;
            }
            if (kk2 != 0.0) {
                cplx kdotg(0.0, 0.0);
                for (int i = 0; i < d; ++i) kdotg += kv[i] * g[i];
                kdotg /= kk2;
                for (int i = 0; i < d; ++i) g[i] -= kv[i] * kdotg;
            }
            for (int i = 0; i < d; ++i) out.comp(i)[idx] = g[i] + fhat.comp(i)[idx];
        };
        if (d == 2) {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    double kv[2] = {double(grid.wavenumber(i)), double(grid.wavenumber(j))};
                    mode(static_cast<std::int64_t>(i) * n + j, kv, kv[0] * kv[0] + kv[1] * kv[1]);
                }
        } else {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int k = 0; k < n; ++k) {
                        double kv[3] = {double(grid.wavenumber(i)), double(grid.wavenumber(j)),
                                        double(grid.wavenumber(k))};
                        mode((static_cast<std::int64_t>(i) * n + j) * n + k, kv,
                             kv[0] * kv[0] + kv[1] * kv[1] + kv[2] * kv[2]);
                    }
        }
        dealias_inplace(out);
    }

    void step(SpectralField& u, double& t, double dt_override) {
        const double dt = dt_override > 0.0 ? dt_override : cfg.dt;
        if (dt != table_dt) build_tables(dt);
        const std::size_t np = static_cast<std::size_t>(cfg.grid.points());
        const int d = cfg.grid.dim();
        const auto& k = kern::active();

        double maxu = 0.0;
        eval_nonlinear(u, n1, &maxu);
        last_maxu = maxu;
        if (!std::isfinite(maxu)) throw BlowupError("solver: non-finite velocity");
        if (blowup_ref < 0.0) blowup_ref = std::max(maxu, max_magnitude(to_real(fhat)));
        if (blowup_ref > 0.0 && maxu > cfg.blowup_factor * blowup_ref)
            throw BlowupError("solver: velocity grew past the blow-up guard (under-resolution)");
        if (maxu > 0.0) {
            const double dt_cfl = cfg.cfl_safety * cfg.grid.spacing() / maxu;
            if (dt > dt_cfl)
                throw CflError("solver: CFL violation, dt = " + std::to_string(dt) +
                               " exceeds limit " + std::to_string(dt_cfl));
        }

        for (int c = 0; c < d; ++c) {
            k.ef_scale_add(tmp.comp(c), e_half.data(), u.comp(c), 0.5 * dt, n1.comp(c), np);
        }
        eval_nonlinear(tmp, n2, nullptr);
        for (int c = 0; c < d; ++c)
            k.ef_axpb(tmp.comp(c), e_half.data(), u.comp(c), 0.5 * dt, n2.comp(c), np);
        eval_nonlinear(tmp, n3, nullptr);
        for (int c = 0; c < d; ++c)
            k.ef_axpb2(tmp.comp(c), e_full.data(), u.comp(c), dt, e_half.data(), n3.comp(c), np);
        eval_nonlinear(tmp, n4, nullptr);
        for (int c = 0; c < d; ++c)
            k.rk4_combine(u.comp(c), e_half.data(), e_full.data(), n1.comp(c), n2.comp(c),
                          n3.comp(c), n4.comp(c), dt, np);
        hermitian_symmetrize(u);
        t += dt;
    }
};

TimeStepper::TimeStepper(const SolverConfig& cfg) : impl_(std::make_unique<Impl>(cfg)) {}
TimeStepper::~TimeStepper() = default;

void TimeStepper::step(SpectralField& u, double& t, double dt_override) {
    impl_->step(u, t, dt_override);
}

double TimeStepper::last_max_velocity() const { return impl_->last_maxu; }
const SpectralField& TimeStepper::forcing() const { return impl_->fhat; }

Snapshot step(const Snapshot& s, const SolverConfig& cfg) {
    TimeStepper ts(cfg);
    SpectralField u = s.u;
    double t = s.t;
    ts.step(u, t);
    return make_snapshot(t, u);
}

void BudgetSeries::finalize() {
    cum_dissipation = cumulative_simpson(t, dissipation_rate);
    cum_injection = cumulative_simpson(t, injection_rate);
}

double BudgetSeries::balance_residual_rel() const {
    if (t.size() < 2) return 0.0;
    const double de = kinetic_energy.back() - kinetic_energy.front();
    const double diss = cum_dissipation.back();
    const double inj = cum_injection.back();
    const double num = std::fabs(de + diss - inj);
    if (diss == 0.0) return num == 0.0 ? 0.0 : HUGE_VAL;
    return num / diss;
}

namespace {

struct BudgetRecorder {
    const Grid& grid;
    double nu;
    const SpectralField& fhat;
    std::vector<double> k2;
    std::vector<double> ones;

    BudgetRecorder(const Grid& g, double nu_, const SpectralField& f)
        : grid(g), nu(nu_), fhat(f), k2(mode_k2_table(g)),
          ones(static_cast<std::size_t>(g.points()), 1.0) {}

    void record(BudgetSeries& b, double t, const SpectralField& u) const {
        const auto& k = kern::active();
        const std::size_t np = static_cast<std::size_t>(grid.points());
        double e = 0.0, d = 0.0, inj = 0.0;
        for (int c = 0; c < u.components(); ++c) {
            e += k.sum_sq_mag(u.comp(c), np);
            d += k.sum_wsq_mag(u.comp(c), k2.data(), np);
            inj += k.sum_wdot(u.comp(c), fhat.comp(c), ones.data(), np);
        }
        const double vol = grid.volume();
        b.t.push_back(t);
        b.kinetic_energy.push_back(0.5 * e * vol);
        b.dissipation_rate.push_back(nu * d * vol);
        b.injection_rate.push_back(inj * vol);
    }
};

}  // namespace

RunResult run(const SolverConfig& cfg, const SnapshotObserver& observer, bool keep_snapshots) {
    cfg.validate();
    RunResult result;
    SpectralField u = initial_field(cfg.grid, cfg.initial);
    TimeStepper ts(cfg);
    BudgetRecorder rec(cfg.grid, cfg.nu, ts.forcing());

    double t = 0.0;
    auto emit = [&](double tt, const SpectralField& uu) {
        Snapshot s = make_snapshot(tt, uu);
        if (observer) observer(s);
        if (keep_snapshots) result.snapshots.push_back(std::move(s));
    };

    rec.record(result.budgets, t, u);
    emit(t, u);

    const double t_end = cfg.t_end;
    const auto nsteps = static_cast<std::int64_t>(std::floor((t_end + 1e-12) / cfg.dt));
    const double tail_dt = t_end - static_cast<double>(nsteps) * cfg.dt;
    const bool has_tail = tail_dt > 1e-9 * std::max(1.0, t_end);
    for (std::int64_t istep = 1; istep <= nsteps; ++istep) {
        ts.step(u, t);
        rec.record(result.budgets, t, u);
        if (istep % cfg.snapshot_stride == 0 || (istep == nsteps && !has_tail)) emit(t, u);
    }
    if (has_tail) {
        ts.step(u, t, tail_dt);
        rec.record(result.budgets, t, u);
        emit(t, u);
    }
    result.budgets.finalize();
    return result;
}

RunResult run(const SolverConfig& cfg) { return run(cfg, nullptr, true); }

}  // namespace lflx
