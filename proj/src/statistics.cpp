#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "lflx/coarse_grain.hpp"
#include "lflx/field_ops.hpp"
#include "lflx/kernels.hpp"
#include "lflx/quadrature.hpp"
#include "lflx/statistics.hpp"

namespace lflx {

StructureFunctionTable::Series StructureFunctionTable::averaged(std::size_t order_idx) const {
    std::map<double, std::pair<double, int>> groups;  // r -> (sum, count)
    for (std::size_t e = 0; e < entries.size(); ++e) {
        auto& g = groups[entries[e].r];
        g.first += values[order_idx][e];
        g.second += 1;
    }
    Series s;
    for (const auto& [r, acc] : groups) {
        s.r.push_back(r);
        s.s.push_back(acc.first / acc.second);
    }
    return s;
}

std::size_t StructureFunctionTable::order_index(double p) const {
    for (std::size_t i = 0; i < orders.size(); ++i)
        if (std::fabs(orders[i] - p) < 1e-12) return i;
    throw std::invalid_argument("StructureFunctionTable: order not tabulated");
}

std::vector<std::array<int, 3>> default_directions(int dim) {
    if (dim == 2) return {{1, 0, 0}, {0, 1, 0}, {1, 1, 0}, {1, -1, 0}};
    return {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 1}, {1, -1, 1}, {1, 1, -1}, {1, -1, -1}};
}

std::vector<int> dyadic_separations(int n) {
    std::vector<int> m;
    for (int v = 1; v <= n / 4; v *= 2) m.push_back(v);
    return m;
}

StructureFunctionTable structure_function(const RealField& u, std::span<const double> orders,
                                          std::span<const int> seps,
                                          std::span<const std::array<int, 3>> dirs) {
    const Grid& grid = u.grid();
    const int d = grid.dim();
    const int nc = u.components();
    const std::size_t np = static_cast<std::size_t>(grid.points());
    const double h = grid.spacing();
    const auto& k = kern::active();

    for (const auto& dir : dirs) {
        if (dir[0] == 0 && dir[1] == 0 && dir[2] == 0)
            throw std::invalid_argument("structure_function: zero direction");
        if (d == 2 && dir[2] != 0)
            throw std::invalid_argument("structure_function: 3D direction on a 2D grid");
    }
    for (int m : seps)
        if (m < 0 || m >= grid.n())
            throw std::invalid_argument("structure_function: separation off the lattice");

    StructureFunctionTable t;
    t.orders.assign(orders.begin(), orders.end());

    // <|u|^p>
    std::vector<double> m2(np);
    if (nc == 2)
        k.mag_sq_d2(m2.data(), u.comp(0), u.comp(1), np);
    else if (nc == 3)
        k.mag_sq_d3(m2.data(), u.comp(0), u.comp(1), u.comp(2), np);
    else
        k.mul(m2.data(), u.comp(0), u.comp(0), np);
    for (double p : orders) {
        if (p == 2.0)
            t.moments.push_back(k.sum(m2.data(), np) / np);
        else if (p == 3.0)
            t.moments.push_back(k.sum_x_sqrtx(m2.data(), np) / np);
        else {
            double s = 0.0;
            for (std::size_t q = 0; q < np; ++q) s += std::pow(m2[q], 0.5 * p);
            t.moments.push_back(s / np);
        }
    }

    t.values.assign(orders.size(), {});
    for (const auto& dir : dirs) {
        const double dirlen = std::sqrt(double(dir[0]) * dir[0] + double(dir[1]) * dir[1] +
                                        double(dir[2]) * dir[2]);
        for (int m : seps) {
            t.entries.push_back(SfEntry{dir, m, m * h * dirlen});
            RealField shifted = circular_shift(u, {m * dir[0], m * dir[1], m * dir[2]});
            for (std::size_t oi = 0; oi < orders.size(); ++oi) {
                const double p = orders[oi];
                double acc;
                if (p == 2.0) {
                    acc = nc == 2 ? k.incr_sq_d2(shifted.comp(0), shifted.comp(1), u.comp(0),
                                                 u.comp(1), np)
                                  : k.incr_sq_d3(shifted.comp(0), shifted.comp(1), shifted.comp(2),
                                                 u.comp(0), u.comp(1), u.comp(2), np);
                } else if (p == 3.0) {
                    acc = nc == 2 ? k.incr_cube_d2(shifted.comp(0), shifted.comp(1), u.comp(0),
                                                   u.comp(1), np)
                                  : k.incr_cube_d3(shifted.comp(0), shifted.comp(1),
                                                   shifted.comp(2), u.comp(0), u.comp(1),
                                                   u.comp(2), np);
                } else {
                    acc = 0.0;
                    for (std::size_t q = 0; q < np; ++q) {
                        double s2 = 0.0;
                        for (int c = 0; c < nc; ++c) {
                            const double dv = shifted.comp(c)[q] - u.comp(c)[q];
                            s2 += dv * dv;
                        }
                        acc += std::pow(s2, 0.5 * p);
                    }
                }
                t.values[oi].push_back(acc / np);
            }
        }
    }
    return t;
}

StructureFunctionTable structure_function(const SpectralField& u, std::span<const double> orders,
                                          std::span<const int> seps,
                                          std::span<const std::array<int, 3>> dirs) {
    return structure_function(to_real(u), orders, seps, dirs);
}

StructureFunctionTable time_average_tables(std::span<const StructureFunctionTable> tables,
                                           std::span<const double> times) {
    if (tables.empty() || tables.size() != times.size())
        throw std::invalid_argument("time_average_tables: size mismatch");
    if (tables.size() == 1) return tables[0];
    const double span_t = times.back() - times.front();
    auto w = simpson_weights(times);
    StructureFunctionTable avg = tables[0];
    for (auto& row : avg.values) std::fill(row.begin(), row.end(), 0.0);
    std::fill(avg.moments.begin(), avg.moments.end(), 0.0);
    for (std::size_t s = 0; s < tables.size(); ++s) {
        const double f = w[s] / span_t;
        for (std::size_t oi = 0; oi < avg.values.size(); ++oi) {
            if (tables[s].values[oi].size() != avg.values[oi].size())
                throw std::invalid_argument("time_average_tables: layout mismatch");
            for (std::size_t e = 0; e < avg.values[oi].size(); ++e)
                avg.values[oi][e] += f * tables[s].values[oi][e];
            avg.moments[oi] += f * tables[s].moments[oi];
        }
    }
    return avg;
}

BesovEstimate besov_estimate(const StructureFunctionTable& t, std::size_t order_idx, double sigma,
                             double ell0) {
    if (!(sigma > 0.0) || sigma > 1.0)
        throw std::invalid_argument("besov_estimate: sigma must be in (0, 1]");
    if (!(ell0 > 0.0)) throw std::invalid_argument("besov_estimate: ell0 must be > 0");
    const double p = t.orders.at(order_idx);
    BesovEstimate b;
    b.sigma = sigma;
    b.c0 = t.moments.at(order_idx);
    auto series = t.averaged(order_idx);
    for (std::size_t i = 0; i < series.r.size(); ++i) {
        const double r = series.r[i];
        if (r <= 0.0 || r > ell0) continue;
        const double c = series.s[i] * std::pow(r / ell0, -sigma * p);
        if (c > b.c1) {
            b.c1 = c;
            b.argmax_r = r;
        }
    }
    b.norm = std::pow(b.c0 + b.c1, 1.0 / p);
    return b;
}

C0RatioSeries c0_ratio(const StructureFunctionTable& t, std::size_t order_idx, double sigma) {
    if (!(sigma > 0.0) || sigma > 1.0)
        throw std::invalid_argument("c0_ratio: sigma must be in (0, 1]");
    const double p = t.orders.at(order_idx);
    auto series = t.averaged(order_idx);
    C0RatioSeries out;
    for (std::size_t i = 0; i < series.r.size(); ++i) {
        const double r = series.r[i];
        if (r <= 0.0) continue;
        out.r.push_back(r);
        out.ratio.push_back(std::pow(series.s[i], 1.0 / p) / std::pow(r, sigma));
    }
    return out;
}

double sigma_of_alpha(double alpha) {
    if (alpha < 0.0 || alpha >= 1.0)
        throw std::domain_error("sigma_of_alpha: alpha must be in [0, 1)");
    return (1.0 + alpha) / (3.0 - alpha);
}

double alpha_of_sigma(double sigma) {
    if (!(sigma > 0.0) || sigma > 1.0)
        throw std::domain_error("alpha_of_sigma: sigma must be in (0, 1]");
    return (3.0 * sigma - 1.0) / (sigma + 1.0);
}

double dissipation_length(double nu, double sigma) {
    if (!(nu > 0.0)) throw std::domain_error("dissipation_length: nu must be > 0");
    if (!(sigma > 0.0) || sigma > 1.0)
        throw std::domain_error("dissipation_length: sigma must be in (0, 1]");
    return std::pow(nu, 1.0 / (sigma + 1.0));
}

ScalingFit scaling_fit(std::span<const double> xs, std::span<const double> ys, double drift_tol) {
    if (xs.size() != ys.size()) throw std::invalid_argument("scaling_fit: size mismatch");
    if (xs.size() < 3) throw std::invalid_argument("scaling_fit: need at least 3 points");
    const std::size_t n = xs.size();
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(xs[i] > 0.0) || !(ys[i] > 0.0))
            throw std::invalid_argument("scaling_fit: values must be positive");
        lx[i] = std::log(xs[i]);
        ly[i] = std::log(ys[i]);
    }
    auto ls = [](std::span<const double> x, std::span<const double> y, double& slope,
                 double& icpt) {
        const std::size_t m = x.size();
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < m; ++i) {
            sx += x[i];
            sy += y[i];
            sxx += x[i] * x[i];
            sxy += x[i] * y[i];
        }
        const double det = m * sxx - sx * sx;
        slope = (m * sxy - sx * sy) / det;
        icpt = (sy - slope * sx) / m;
    };

    ScalingFit fit;
    ls(lx, ly, fit.slope, fit.intercept);

    double ss_res = 0, ss_tot = 0, mean_y = 0;
    for (double v : ly) mean_y += v;
    mean_y /= n;
    for (std::size_t i = 0; i < n; ++i) {
        const double pred = fit.intercept + fit.slope * lx[i];
        ss_res += (ly[i] - pred) * (ly[i] - pred);
        ss_tot += (ly[i] - mean_y) * (ly[i] - mean_y);
    }
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;

    for (std::size_t i = 0; i + 3 <= n; ++i) {
        double s, c;
        ls(std::span<const double>(lx).subspan(i, 3), std::span<const double>(ly).subspan(i, 3), s,
           c);
        fit.local_slopes.push_back(s);
    }
    if (fit.local_slopes.size() >= 2) {
        fit.drift = fit.local_slopes.back() - fit.local_slopes.front();
        bool inc = true, dec = true;
        for (std::size_t i = 1; i < fit.local_slopes.size(); ++i) {
            const double dd = fit.local_slopes[i] - fit.local_slopes[i - 1];
            if (dd < -1e-12) inc = false;
            if (dd > 1e-12) dec = false;
        }
        fit.drift_flag = (inc || dec) && std::fabs(fit.drift) > drift_tol;
    }
    return fit;
}

ScalingFit zeta_fit(const StructureFunctionTable& t, std::size_t order_idx, double r_min,
                    double r_max) {
    auto series = t.averaged(order_idx);
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < series.r.size(); ++i) {
        if (series.r[i] < r_min || series.r[i] > r_max) continue;
        if (!(series.s[i] > 0.0)) continue;
        xs.push_back(series.r[i]);
        ys.push_back(series.s[i]);
    }
    return scaling_fit(xs, ys);
}

FluxScalingReport flux_scaling_report(std::span<const SpectralField> fields,
                                      std::span<const double> ells, const Mollifier& m,
                                      double nu) {
    if (fields.empty()) throw std::invalid_argument("flux_scaling_report: no fields");
    const Grid& grid = fields[0].grid();
    const double ell_lo = 4.0 * kTwoPi / grid.n();
    const double ell_hi = kTwoPi / 4.0;  // pi/2
    for (double ell : ells)
        if (ell < ell_lo * (1.0 - 1e-12) || ell > ell_hi * (1.0 + 1e-12))
            throw std::invalid_argument(
                "flux_scaling_report: ell outside the resolvable range [4*2pi/n, pi/2]");

    FluxScalingReport rep;
    rep.ells.assign(ells.begin(), ells.end());
    rep.nu = nu;
    const std::size_t np = static_cast<std::size_t>(grid.points());
    const int d = grid.dim();
    const double vol = grid.cell_volume();
    const auto k2 = mode_k2_table(grid);
    const auto& k = kern::active();

    bool any_nonzero = false;
    for (std::size_t fi = 0; fi < fields.size(); ++fi) {
        const SpectralField& u = fields[fi];
        if (u.grid() != grid)
            throw std::invalid_argument("flux_scaling_report: inconsistent grids");
        for (double ell : ells) {
            FluxScalingRow row;
            row.field_index = static_cast<int>(fi);
            row.ell = ell;

            RealField pi_field = flux(u, ell, m, ProductMode::Exact);
            row.flux_l1 = k.sum_abs(pi_field.comp(0), np) * vol;

            RealField tau = cumulant(u, u, ell, m, ProductMode::Exact);
            std::vector<double> trace(np, 0.0);
            for (int i = 0; i < d; ++i)
                for (std::size_t q = 0; q < np; ++q) trace[q] += tau.comp(i * d + i)[q];
            row.cumulant_trace_l1 = k.sum_abs(trace.data(), np) * vol;

            auto mult = m.multiplier(grid, ell);
            std::vector<double> w(np);
            for (std::size_t q = 0; q < np; ++q) w[q] = k2[q] * (*mult)[q] * (*mult)[q];
            double gsq = 0.0;
            for (int c = 0; c < d; ++c) gsq += k.sum_wsq_mag(u.comp(c), w.data(), np);
            row.resolved_grad_sq = nu * gsq * grid.volume();

            if (row.flux_l1 != 0.0 || row.cumulant_trace_l1 != 0.0 || row.resolved_grad_sq != 0.0)
                any_nonzero = true;
            rep.rows.push_back(row);
        }
    }

    if (!any_nonzero || ells.size() < 3) {
        rep.degenerate = true;
        return rep;
    }

    const std::size_t ne = ells.size();
    double sf = 0, sc = 0, sd = 0;
    int nfit = 0;
    for (std::size_t fi = 0; fi < fields.size(); ++fi) {
        std::vector<double> fl(ne), cu(ne), di(ne);
        bool positive = true;
        for (std::size_t e = 0; e < ne; ++e) {
            const auto& row = rep.rows[fi * ne + e];
            fl[e] = row.flux_l1;
            cu[e] = row.cumulant_trace_l1;
            di[e] = row.resolved_grad_sq;
            positive = positive && fl[e] > 0.0 && cu[e] > 0.0 && di[e] > 0.0;
        }
        if (!positive) continue;
        rep.flux_fits.push_back(scaling_fit(rep.ells, fl));
        rep.cumulant_fits.push_back(scaling_fit(rep.ells, cu));
        rep.dissipation_fits.push_back(scaling_fit(rep.ells, di));
        sf += rep.flux_fits.back().slope;
        sc += rep.cumulant_fits.back().slope;
        sd += rep.dissipation_fits.back().slope;
        ++nfit;
    }
    if (nfit == 0) {
        rep.degenerate = true;
        return rep;
    }
    rep.mean_flux_slope = sf / nfit;
    rep.mean_cumulant_slope = sc / nfit;
    rep.mean_dissipation_slope = sd / nfit;
    return rep;
}

OnsagerReport onsager_report(std::span<const SweepMemberSummary> members,
                             const ReportOptions& opt) {
    if (members.size() < 4)
        throw std::invalid_argument("onsager_report: need at least 4 viscosities");
    bool dec = true, inc = true;
    for (std::size_t i = 1; i < members.size(); ++i) {
        if (members[i].nu >= members[i - 1].nu) dec = false;
        if (members[i].nu <= members[i - 1].nu) inc = false;
    }
    if (!dec && !inc) throw std::invalid_argument("onsager_report: nu list must be monotone");

    const double r_min = opt.fit_r_min > 0.0 ? opt.fit_r_min : 4.0 * opt.grid_spacing;
    const double r_max = opt.fit_r_max > 0.0 ? opt.fit_r_max : opt.ell0 / 4.0;
    if (!(r_min > 0.0) || !(r_max > r_min))
        throw std::invalid_argument("onsager_report: invalid fit window");

    OnsagerReport rep;
    rep.tolerance = opt.consistency_tol;

    std::vector<double> nus, diss;
    for (const auto& mb : members) {
        nus.push_back(mb.nu);
        diss.push_back(mb.total_dissipation);
    }
    rep.nus = nus;
    rep.alpha_fit = scaling_fit(nus, diss);
    rep.alpha_hat = rep.alpha_fit.slope;

    std::size_t smallest = 0;
    for (std::size_t i = 1; i < members.size(); ++i)
        if (members[i].nu < members[smallest].nu) smallest = i;

    for (const auto& mb : members) {
        if (mb.tables.empty()) throw std::invalid_argument("onsager_report: missing tables");
        StructureFunctionTable avg = time_average_tables(mb.tables, mb.table_times);
        const std::size_t oi = avg.order_index(3.0);
        const double zeta3 = zeta_fit(avg, oi, r_min, r_max).slope;
        rep.sigma_hat_per_nu.push_back(std::clamp(zeta3 / 3.0, 1e-6, 1.0));
    }
    rep.sigma_hat = rep.sigma_hat_per_nu[smallest];

    rep.consistency_margin = rep.alpha_hat - alpha_of_sigma(rep.sigma_hat);
    rep.consistency_ok = rep.consistency_margin >= -opt.consistency_tol;

    const double alpha_clamped = std::clamp(rep.alpha_hat, 0.0, 1.0 - 1e-9);
    rep.sigma_test = std::min(sigma_of_alpha(alpha_clamped) + opt.epsilon, 1.0);

    for (const auto& mb : members) {
        // L^3-in-time norm: (int (C0 + C1) dt)^(1/3)
        std::vector<double> vals;
        for (const auto& tab : mb.tables) {
            const std::size_t oi = tab.order_index(3.0);
            BesovEstimate b = besov_estimate(tab, oi, rep.sigma_test, opt.ell0);
            vals.push_back(b.c0 + b.c1);
        }
        double integral = mb.tables.size() > 1 ? simpson(mb.table_times, vals)
                                               : vals.front();
        rep.besov_norms.push_back(std::cbrt(std::max(integral, 0.0)));
    }

    bool positive = true;
    for (double v : rep.besov_norms) positive = positive && v > 0.0;
    if (positive) {
        rep.besov_trend_slope = scaling_fit(nus, rep.besov_norms).slope;
        rep.besov_trend = rep.besov_trend_slope < -0.05
                              ? "growing"
                              : (rep.besov_trend_slope > 0.05 ? "decreasing" : "flat");
    } else {
        rep.besov_trend = "degenerate";
    }

    rep.note =
        "finite-viscosity diagnostic: exponents are fits over a desk-scale sweep, "
        "not a limit statement";
    return rep;
}

}  // namespace lflx
