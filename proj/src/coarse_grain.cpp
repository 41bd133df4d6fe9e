#include <cmath>
#include <cstring>
#include <stdexcept>

#include "lflx/coarse_grain.hpp"
#include "lflx/field_ops.hpp"
#include "lflx/kernels.hpp"
#include "lflx/quadrature.hpp"

namespace lflx {

namespace {

void require_vector(const SpectralField& f, const char* what) {
    if (f.components() != f.grid().dim())
        throw std::invalid_argument(std::string(what) + ": vector field required");
}

void require_same_grid(const SpectralField& a, const SpectralField& b, const char* what) {
    if (a.grid() != b.grid()) throw std::invalid_argument(std::string(what) + ": grid mismatch");
}

/// Collocation samples of filt(g_i h_j) with the product evaluated alias-free
/// on a 2x padded grid; sampled back on the base grid.
RealField filtered_product_exact(const SpectralField& g, const SpectralField& h, double ell,
                                 const Mollifier& m) {
    const Grid& grid = g.grid();
    const int d = grid.dim();
    const bool same = &g == &h;
    const Grid fine(grid.dim(), 2 * grid.n());
    RealField gr = to_real(pad_spectrum(g, fine));
    RealField hr = same ? gr : to_real(pad_spectrum(h, fine));
    auto mult = m.multiplier(fine, ell);
    const std::size_t npf = static_cast<std::size_t>(fine.points());

    RealField out(grid, d * d);
    RealField buf(fine, 1);
    const std::size_t np = static_cast<std::size_t>(grid.points());
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            if (same && j < i) continue;
            kern::active().mul(buf.comp(0), gr.comp(i), hr.comp(j), npf);
            SpectralField w = to_spectral(buf);
            kern::active().scale_table(w.comp(0), mult->data(), npf);
            RealField filtered = subsample(to_real(w), grid);
            std::memcpy(out.comp(i * d + j), filtered.comp(0), np * sizeof(double));
        }
    }
    if (same) {
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < i; ++j)
                std::memcpy(out.comp(i * d + j), out.comp(j * d + i), np * sizeof(double));
    }
    return out;
}

RealField filtered_product_dealiased(const SpectralField& g, const SpectralField& h, double ell,
                                     const Mollifier& m) {
    SpectralField w = product_tensor_dealiased(g, h);
    return to_real(filter(w, ell, m));
}

}  // namespace

SpectralField filter(const SpectralField& f, double ell, const Mollifier& m) {
    auto mult = m.multiplier(f.grid(), ell);
    SpectralField out = f;
    const std::size_t np = static_cast<std::size_t>(f.points());
    for (int c = 0; c < f.components(); ++c)
        kern::active().scale_table(out.comp(c), mult->data(), np);
    return out;
}

RealField cumulant(const SpectralField& g, const SpectralField& h, double ell, const Mollifier& m,
                   ProductMode mode) {
    require_same_grid(g, h, "cumulant");
    require_vector(g, "cumulant");
    require_vector(h, "cumulant");
    const Grid& grid = g.grid();
    const int d = grid.dim();
    const std::size_t np = static_cast<std::size_t>(grid.points());
    const bool same = &g == &h;

    RealField tau = mode == ProductMode::Exact ? filtered_product_exact(g, h, ell, m)
                                               : filtered_product_dealiased(g, h, ell, m);
    RealField gf = to_real(filter(g, ell, m));
    RealField hf = same ? gf : to_real(filter(h, ell, m));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            kern::active().fmsub(tau.comp(i * d + j), gf.comp(i), hf.comp(j), np);
    return tau;
}

RealField flux(const SpectralField& u, double ell, const Mollifier& m, ProductMode mode) {
    require_vector(u, "flux");
    const Grid& grid = u.grid();
    const int d = grid.dim();
    const std::size_t np = static_cast<std::size_t>(grid.points());

    RealField tau = cumulant(u, u, ell, m, mode);
    SpectralField uf = filter(u, ell, m);
    RealField pi(grid, 1);
    for (int j = 0; j < d; ++j) {
        RealField du_j = to_real(derivative(uf, j));  // component i holds d_j u_i
        for (int i = 0; i < d; ++i)
            kern::active().fmsub(pi.comp(0), du_j.comp(i), tau.comp(i * d + j), np);
    }
    return pi;
}

CurrentTerms current_terms(const SpectralField& u, const SpectralField& p, double nu, double ell,
                           const Mollifier& m, ProductMode mode) {
    require_vector(u, "current");
    require_same_grid(u, p, "current");
    if (p.components() != 1) throw std::invalid_argument("current: scalar pressure required");
    const Grid& grid = u.grid();
    const int d = grid.dim();
    const std::size_t np = static_cast<std::size_t>(grid.points());
    const auto& k = kern::active();

    SpectralField uf = filter(u, ell, m);
    RealField ur = to_real(uf);
    RealField pr = to_real(filter(p, ell, m));
    RealField tau = cumulant(u, u, ell, m, mode);

    // e = |filt u|^2 / 2 + filt p
    RealField head(grid, 1);
    if (d == 2)
        k.mag_sq_d2(head.comp(0), ur.comp(0), ur.comp(1), np);
    else
        k.mag_sq_d3(head.comp(0), ur.comp(0), ur.comp(1), ur.comp(2), np);
    for (std::size_t i = 0; i < np; ++i) head.comp(0)[i] = 0.5 * head.comp(0)[i] + pr.comp(0)[i];

    CurrentTerms terms{RealField(grid, d), RealField(grid, d), RealField(grid, d)};
    for (int i = 0; i < d; ++i) k.mul(terms.transport.comp(i), head.comp(0), ur.comp(i), np);

    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            k.fmadd(terms.subgrid.comp(i), ur.comp(j), tau.comp(j * d + i), np);

    // -nu * d_i(|filt u|^2/2) = -nu * u_j d_i u_j, all factors band-limited
    for (int i = 0; i < d; ++i) {
        RealField du_i = to_real(derivative(uf, i));
        for (int j = 0; j < d; ++j) k.fmadd(terms.viscous.comp(i), ur.comp(j), du_i.comp(j), np);
        double* v = terms.viscous.comp(i);
        for (std::size_t q = 0; q < np; ++q) v[q] *= -nu;
    }
    return terms;
}

RealField current(const SpectralField& u, const SpectralField& p, double nu, double ell,
                  const Mollifier& m, ProductMode mode) {
    CurrentTerms terms = current_terms(u, p, nu, ell, m, mode);
    RealField j = terms.transport;
    const std::size_t total = j.raw().size();
    for (std::size_t i = 0; i < total; ++i)
        j.raw()[i] += terms.subgrid.raw()[i] + terms.viscous.raw()[i];
    return j;
}

double cumulant_trace_integral(const SpectralField& g, const SpectralField& h, double ell,
                               const Mollifier& m) {
    require_same_grid(g, h, "cumulant_trace_integral");
    if (g.components() != h.components())
        throw std::invalid_argument("cumulant_trace_integral: component mismatch");
    auto mult = m.multiplier(g.grid(), ell);
    const std::size_t np = static_cast<std::size_t>(g.points());
    std::vector<double> w(np);
    for (std::size_t i = 0; i < np; ++i) w[i] = 1.0 - (*mult)[i] * (*mult)[i];
    double s = 0.0;
    for (int c = 0; c < g.components(); ++c)
        s += kern::active().sum_wdot(g.comp(c), h.comp(c), w.data(), np);
    return s * g.grid().volume();
}

double flux_integral(const SpectralField& u, double ell, const Mollifier& m) {
    require_vector(u, "flux_integral");
    const Grid& grid = u.grid();
    const int d = grid.dim();
    const int n = grid.n();
    auto mult = m.multiplier(grid, ell);
    SpectralField w = product_tensor_dealiased(u, u);

    // int Pi dx = <G^2 u, div(u x u)> with the dealiased tensor; identical to
    // quadrature of the exact-product flux because G^2 u is band-limited.
    double acc = 0.0;
    auto mode_term = [&](std::int64_t idx, const double* kvec) {
        const double g2 = (*mult)[idx] * (*mult)[idx];
        double re = 0.0;
        for (int i = 0; i < d; ++i) {
            cplx div_i(0.0, 0.0);
            for (int j = 0; j < d; ++j) {
                const cplx wij = w.comp(i * d + j)[idx];
                div_i += cplx(-kvec[j] * wij.imag(), kvec[j] * wij.real());
            }
            const cplx ui = u.comp(i)[idx];
            re += ui.real() * div_i.real() + ui.imag() * div_i.imag();
        }
        acc += g2 * re;
    };
    if (d == 2) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double kvec[2] = {double(grid.wavenumber(i)), double(grid.wavenumber(j))};
                mode_term(static_cast<std::int64_t>(i) * n + j, kvec);
            }
    } else {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    double kvec[3] = {double(grid.wavenumber(i)), double(grid.wavenumber(j)),
                                      double(grid.wavenumber(k))};
                    mode_term((static_cast<std::int64_t>(i) * n + j) * n + k, kvec);
                }
    }
    return acc * grid.volume();
}

FluxRates flux_rates(const SpectralField& u, double nu, double ell, const Mollifier& m,
                     const SpectralField* forcing) {
    require_vector(u, "flux_rates");
    const Grid& grid = u.grid();
    const double vol = grid.volume();
    const std::size_t np = static_cast<std::size_t>(grid.points());
    auto mult = m.multiplier(grid, ell);
    const auto k2 = mode_k2_table(grid);
    const auto& k = kern::active();

    std::vector<double> w_res(np), w_tau(np);
    for (std::size_t i = 0; i < np; ++i) {
        const double g2 = (*mult)[i] * (*mult)[i];
        w_res[i] = k2[i] * g2;
        w_tau[i] = 1.0 - g2;
    }
    FluxRates r;
    for (int c = 0; c < u.components(); ++c) {
        r.total_dissipation += k.sum_wsq_mag(u.comp(c), k2.data(), np);
        r.resolved_dissipation += k.sum_wsq_mag(u.comp(c), w_res.data(), np);
        r.cumulant_trace += k.sum_wsq_mag(u.comp(c), w_tau.data(), np);
        if (forcing) r.forcing_trace += k.sum_wdot(u.comp(c), forcing->comp(c), w_tau.data(), np);
    }
    r.total_dissipation *= nu * vol;
    r.resolved_dissipation *= nu * vol;
    r.cumulant_trace *= vol;
    r.forcing_trace *= vol;
    r.flux = flux_integral(u, ell, m);
    return r;
}

namespace {

void check_uniform_times(std::span<const Snapshot> traj, const char* what) {
    const double h0 = traj[1].t - traj[0].t;
    for (std::size_t i = 1; i + 1 < traj.size(); ++i) {
        const double h = traj[i + 1].t - traj[i].t;
        if (std::fabs(h - h0) > 1e-9 * std::max(1.0, std::fabs(h0)))
            throw std::invalid_argument(std::string(what) + ": non-uniform snapshot stride");
    }
}

RealField half_mag_sq(const RealField& ur) {
    const Grid& grid = ur.grid();
    const std::size_t np = static_cast<std::size_t>(grid.points());
    RealField e(grid, 1);
    if (ur.components() == 2)
        kern::active().mag_sq_d2(e.comp(0), ur.comp(0), ur.comp(1), np);
    else
        kern::active().mag_sq_d3(e.comp(0), ur.comp(0), ur.comp(1), ur.comp(2), np);
    for (std::size_t i = 0; i < np; ++i) e.comp(0)[i] *= 0.5;
    return e;
}

/// Shared stencil-residual driver; ell <= 0 means unfiltered.
std::vector<BalanceResidualSample> balance_residual_impl(std::span<const Snapshot> traj, double nu,
                                                         double ell, const Mollifier* m,
                                                         const SpectralField* forcing) {
    if (traj.size() < 5)
        throw std::invalid_argument("balance residual: need at least 5 snapshots");
    check_uniform_times(traj, "balance residual");
    const Grid& grid = traj[0].u.grid();
    const int d = grid.dim();
    const std::size_t np = static_cast<std::size_t>(grid.points());
    const double h = traj[1].t - traj[0].t;
    const auto& k = kern::active();
    const bool filtered = ell > 0.0;

    auto apply_filter = [&](const SpectralField& f) {
        return filtered ? filter(f, ell, *m) : f;
    };

    // resolved energy fields for the time stencil
    std::vector<RealField> e_fields;
    e_fields.reserve(traj.size());
    for (const Snapshot& s : traj) e_fields.push_back(half_mag_sq(to_real(apply_filter(s.u))));

    RealField fbar(grid, d);
    if (forcing) fbar = to_real(apply_filter(*forcing));

    std::vector<BalanceResidualSample> out;
    for (std::size_t c = 2; c + 2 < traj.size(); ++c) {
        const Snapshot& s = traj[c];
        SpectralField uf = apply_filter(s.u);
        RealField ur = to_real(uf);
        RealField pr = to_real(apply_filter(s.p));

        std::vector<RealField> du;  // du[j].comp(i) = d_j(filt u_i)
        du.reserve(d);
        for (int j = 0; j < d; ++j) du.push_back(to_real(derivative(uf, j)));
        RealField lap = to_real(laplacian(uf));
        std::vector<RealField> gradp;
        gradp.reserve(d);
        {
            SpectralField pf = apply_filter(s.p);
            for (int i = 0; i < d; ++i) gradp.push_back(to_real(derivative(pf, i)));
        }

        // dealiased tensor Q = T_K(u x u), filtered
        SpectralField qhat = product_tensor_dealiased(s.u, s.u);
        if (filtered) qhat = filter(qhat, ell, *m);
        RealField qbar = to_real(qhat);
        std::vector<RealField> divq;  // divq[i] = sum_j d_j Qbar_ij
        divq.reserve(d);
        for (int i = 0; i < d; ++i) {
            RealField acc(grid, 1);
            for (int j = 0; j < d; ++j) {
                SpectralField qij(grid, 1);
                std::memcpy(qij.comp(0), qhat.comp(i * d + j), np * sizeof(cplx));
                RealField dq = to_real(derivative(qij, j));
                for (std::size_t q = 0; q < np; ++q) acc.comp(0)[q] += dq.comp(0)[q];
            }
            divq.push_back(std::move(acc));
        }

        // tau_ij samples = Qbar_ij - u_i u_j  (filtered fields throughout)
        RealField tau = qbar;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) k.fmsub(tau.comp(i * d + j), ur.comp(i), ur.comp(j), np);

        // Pi and nu|grad u|^2 fields
        RealField pi(grid, 1);
        RealField gradsq(grid, 1);
        for (int j = 0; j < d; ++j)
            for (int i = 0; i < d; ++i) {
                k.fmsub(pi.comp(0), du[j].comp(i), tau.comp(i * d + j), np);
                k.fmadd(gradsq.comp(0), du[j].comp(i), du[j].comp(i), np);
            }

        // residual = d_t e + div J + Pi + nu|grad u|^2 - u.f
        RealField r(grid, 1);
        {
            const double* e0 = e_fields[c - 2].comp(0);
            const double* e1 = e_fields[c - 1].comp(0);
            const double* e3 = e_fields[c + 1].comp(0);
            const double* e4 = e_fields[c + 2].comp(0);
            double* rr = r.comp(0);
            const double w = 1.0 / (12.0 * h);
            for (std::size_t q = 0; q < np; ++q)
                rr[q] = w * (-e4[q] + 8.0 * e3[q] - 8.0 * e1[q] + e0[q]);
        }
        // div J pieces
        // u_i u_j d_j u_i  (transport of resolved energy)
        {
            RealField tmp(grid, 1);
            for (int i = 0; i < d; ++i) {
                std::fill(tmp.raw().begin(), tmp.raw().end(), 0.0);
                for (int j = 0; j < d; ++j) k.fmadd(tmp.comp(0), ur.comp(j), du[j].comp(i), np);
                k.fmadd(r.comp(0), ur.comp(i), tmp.comp(0), np);
            }
        }
        // u . grad p
        for (int i = 0; i < d; ++i) k.fmadd(r.comp(0), ur.comp(i), gradp[i].comp(0), np);
        // div(u . tau) = d_j u_i tau_ij + u_i (divQ_i - u_j d_j u_i)
        for (int j = 0; j < d; ++j)
            for (int i = 0; i < d; ++i) k.fmadd(r.comp(0), du[j].comp(i), tau.comp(i * d + j), np);
        for (int i = 0; i < d; ++i) {
            RealField tmp(grid, 1);
            std::memcpy(tmp.comp(0), divq[i].comp(0), np * sizeof(double));
            for (int j = 0; j < d; ++j) k.fmsub(tmp.comp(0), ur.comp(j), du[j].comp(i), np);
            k.fmadd(r.comp(0), ur.comp(i), tmp.comp(0), np);
        }
        // -nu (|grad u|^2 + u . lap u)
        {
            RealField tmp = gradsq;
            for (int i = 0; i < d; ++i) k.fmadd(tmp.comp(0), ur.comp(i), lap.comp(i), np);
            double* rr = r.comp(0);
            const double* tt = tmp.comp(0);
            for (std::size_t q = 0; q < np; ++q) rr[q] -= nu * tt[q];
        }
        // + Pi + nu |grad u|^2 - u.f
        {
            double* rr = r.comp(0);
            const double* pp = pi.comp(0);
            const double* gg = gradsq.comp(0);
            for (std::size_t q = 0; q < np; ++q) rr[q] += pp[q] + nu * gg[q];
        }
        if (forcing)
            for (int i = 0; i < d; ++i) k.fmsub(r.comp(0), ur.comp(i), fbar.comp(i), np);

        BalanceResidualSample row;
        row.t = s.t;
        row.residual_l2 = lp_norm(r, 2.0);
        RealField nugrad = gradsq;
        for (auto& v : nugrad.raw()) v *= nu;
        row.scale_l2 = lp_norm(pi, 2.0) + lp_norm(nugrad, 2.0);
        out.push_back(row);
    }
    return out;
}

}  // namespace

std::vector<BalanceResidualSample> resolved_balance_residual(std::span<const Snapshot> traj,
                                                             double nu, double ell,
                                                             const Mollifier& m,
                                                             const SpectralField* forcing) {
    if (!(ell > 0.0)) throw std::invalid_argument("resolved_balance_residual: ell must be > 0");
    return balance_residual_impl(traj, nu, ell, &m, forcing);
}

std::vector<BalanceResidualSample> unfiltered_balance_residual(std::span<const Snapshot> traj,
                                                               double nu,
                                                               const SpectralField* forcing) {
    return balance_residual_impl(traj, nu, 0.0, nullptr, forcing);
}

double FluxBudget::relative_residual() const {
    const double denom = std::fabs(lhs_total_dissipation);
    if (denom == 0.0) return residual() == 0.0 ? 0.0 : HUGE_VAL;
    return std::fabs(residual()) / denom;
}

FluxBudget global_identity(std::span<const Snapshot> traj, double nu, double ell,
                           const Mollifier& m, const SpectralField* forcing,
                           FluxBudgetSeries* series) {
    if (traj.size() < 2) throw std::invalid_argument("global_identity: need >= 2 snapshots");
    const Grid& grid = traj[0].u.grid();
    const double vol = grid.volume();
    const std::size_t np = static_cast<std::size_t>(grid.points());
    auto mult = m.multiplier(grid, ell);
    const auto k2 = mode_k2_table(grid);

    std::vector<double> w_lhs(np), w_res(np), w_tau(np);
    for (std::size_t i = 0; i < np; ++i) {
        const double g2 = (*mult)[i] * (*mult)[i];
        w_lhs[i] = k2[i];
        w_res[i] = k2[i] * g2;
        w_tau[i] = 1.0 - g2;
    }

    const auto& k = kern::active();
    auto weighted_sq = [&](const SpectralField& f, const std::vector<double>& w) {
        double s = 0.0;
        for (int c = 0; c < f.components(); ++c) s += k.sum_wsq_mag(f.comp(c), w.data(), np);
        return s * vol;
    };

    std::vector<double> t, lhs_rate, res_rate, flux_rate, forc_rate;
    for (const Snapshot& s : traj) {
        t.push_back(s.t);
        lhs_rate.push_back(nu * weighted_sq(s.u, w_lhs));
        res_rate.push_back(nu * weighted_sq(s.u, w_res));
        flux_rate.push_back(flux_integral(s.u, ell, m));
        double fr = 0.0;
        if (forcing)
            for (int c = 0; c < grid.dim(); ++c)
                fr += k.sum_wdot(s.u.comp(c), forcing->comp(c), w_tau.data(), np);
        forc_rate.push_back(fr * vol);
    }

    FluxBudget b;
    b.ell = ell;
    b.lhs_total_dissipation = simpson(t, lhs_rate);
    b.resolved_dissipation = simpson(t, res_rate);
    b.flux_integral = simpson(t, flux_rate);
    b.forcing_cumulant = simpson(t, forc_rate);
    b.initial_cumulant = 0.5 * weighted_sq(traj.front().u, w_tau);
    b.final_cumulant = 0.5 * weighted_sq(traj.back().u, w_tau);

    if (series) {
        series->t = t;
        series->flux_rate = flux_rate;
        series->resolved_rate = res_rate;
        series->lhs_rate = lhs_rate;
        series->forcing_rate = forc_rate;
    }
    return b;
}

}  // namespace lflx
