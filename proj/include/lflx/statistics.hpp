#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "lflx/field.hpp"
#include "lflx/mollifier.hpp"

namespace lflx {

// ---------------------------------------------------------------- structure functions

struct SfEntry {
    std::array<int, 3> dir;  // lattice direction
    int m;                   // shift multiple
    double r;                // physical separation |m * h * dir|
};

struct StructureFunctionTable {
    std::vector<double> orders;               // p values
    std::vector<SfEntry> entries;
    std::vector<std::vector<double>> values;  // [order][entry]
    std::vector<double> moments;              // <|u|^p> per order

    struct Series {
        std::vector<double> r;
        std::vector<double> s;
    };
    /// Direction-averaged S_p grouped by equal separation, r ascending.
    Series averaged(std::size_t order_idx) const;

    std::size_t order_index(double p) const;  // throws if absent
};

/// Axis directions plus diagonals (2D: (1,1), (1,-1); 3D: body diagonals).
std::vector<std::array<int, 3>> default_directions(int dim);

/// 1, 2, 4, ..., n/4.
std::vector<int> dyadic_separations(int n);

/// S_p(r) = <|u(x+r) - u(x)|^p> averaged over the lattice, for every
/// (direction, multiple) pair; increments are exact circular shifts.
StructureFunctionTable structure_function(const RealField& u, std::span<const double> orders,
                                          std::span<const int> seps,
                                          std::span<const std::array<int, 3>> dirs);
StructureFunctionTable structure_function(const SpectralField& u, std::span<const double> orders,
                                          std::span<const int> seps,
                                          std::span<const std::array<int, 3>> dirs);

/// Simpson-weighted time average of tables sharing one layout.
StructureFunctionTable time_average_tables(std::span<const StructureFunctionTable> tables,
                                           std::span<const double> times);

// ---------------------------------------------------------------- Besov estimates

struct BesovEstimate {
    double sigma = 0.0;
    double c0 = 0.0;       // <|u|^p>
    double c1 = 0.0;       // sup_{r <= ell0} S_p(r) (r/ell0)^(-sigma p)
    double norm = 0.0;     // (c0 + c1)^(1/p)
    double argmax_r = 0.0;
};
BesovEstimate besov_estimate(const StructureFunctionTable& t, std::size_t order_idx, double sigma,
                             double ell0);

struct C0RatioSeries {
    std::vector<double> r;
    std::vector<double> ratio;  // S_p(r)^(1/p) / r^sigma
};
C0RatioSeries c0_ratio(const StructureFunctionTable& t, std::size_t order_idx, double sigma);

// ---------------------------------------------------------------- exponent calculus

/// sigma_alpha = (1 + alpha) / (3 - alpha), alpha in [0, 1).
double sigma_of_alpha(double alpha);
/// alpha_sigma = (3 sigma - 1) / (sigma + 1), sigma in (0, 1].
double alpha_of_sigma(double sigma);
/// nu^(1/(sigma+1)), the scale where nonlinear flux and viscous dissipation
/// balance (prefactor 1 by convention).
double dissipation_length(double nu, double sigma);

// ---------------------------------------------------------------- scaling fits

struct ScalingFit {
    double slope = 0.0;
    double intercept = 0.0;  // in log-log coordinates
    double r_squared = 0.0;
    std::vector<double> local_slopes;  // least squares over 3-point windows
    double drift = 0.0;                // last local slope - first
    bool drift_flag = false;           // monotone drift beyond tolerance
};
ScalingFit scaling_fit(std::span<const double> xs, std::span<const double> ys,
                       double drift_tol = 0.05);

/// Log-log slope of the direction-averaged S_p over [r_min, r_max].
ScalingFit zeta_fit(const StructureFunctionTable& t, std::size_t order_idx, double r_min,
                    double r_max);

// ---------------------------------------------------------------- flux scaling report

struct FluxScalingRow {
    int field_index;
    double ell;
    double flux_l1;            // int |Pi_ell|
    double cumulant_trace_l1;  // int |tr tau_ell|
    double resolved_grad_sq;   // nu int |grad filt u|^2
};

struct FluxScalingReport {
    std::vector<double> ells;
    std::vector<FluxScalingRow> rows;  // field-major
    double nu = 1.0;
    bool degenerate = false;  // all norms vanished, fits skipped
    std::vector<ScalingFit> flux_fits, cumulant_fits, dissipation_fits;  // per field
    double mean_flux_slope = 0.0, mean_cumulant_slope = 0.0, mean_dissipation_slope = 0.0;
};

FluxScalingReport flux_scaling_report(std::span<const SpectralField> fields,
                                      std::span<const double> ells, const Mollifier& m,
                                      double nu = 1.0);

// ---------------------------------------------------------------- viscosity sweep report

struct SweepMemberSummary {
    double nu = 0.0;
    double total_dissipation = 0.0;  // int int nu |grad u|^2
    double energy_initial = 0.0, energy_final = 0.0, total_injection = 0.0;
    double balance_residual_rel = 0.0;
    std::vector<double> table_times;
    std::vector<StructureFunctionTable> tables;  // per analysis time, orders include p = 3
};

struct ReportOptions {
    double grid_spacing = 0.0;  // used for fit-window defaults
    double ell0 = kTwoPi;
    double fit_r_min = 0.0;  // 0 -> 4 * grid_spacing
    double fit_r_max = 0.0;  // 0 -> ell0 / 4
    double epsilon = 0.05;   // Besov exponent bump above sigma_alpha_hat
    double consistency_tol = 0.2;
};

struct OnsagerReport {
    double alpha_hat = 0.0;
    ScalingFit alpha_fit;
    double sigma_hat = 0.0;  // zeta_3 / 3 of the smallest-nu member
    std::vector<double> sigma_hat_per_nu;
    double consistency_margin = 0.0;  // alpha_hat - (3 sig - 1)/(sig + 1)
    bool consistency_ok = false;
    double tolerance = 0.2;
    std::vector<double> nus;
    std::vector<double> besov_norms;  // L^3-in-time B_3^{sigma_test} norm per nu
    double sigma_test = 0.0;
    double besov_trend_slope = 0.0;
    std::string besov_trend;  // "growing" | "flat" | "decreasing" (as nu -> 0)
    std::string note;
};

OnsagerReport onsager_report(std::span<const SweepMemberSummary> members,
                             const ReportOptions& opt);

}  // namespace lflx
