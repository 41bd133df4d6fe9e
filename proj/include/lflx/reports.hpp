#pragma once

#include <map>
#include <string>

#include "lflx/coarse_grain.hpp"
#include "lflx/config.hpp"
#include "lflx/solver.hpp"
#include "lflx/statistics.hpp"

namespace lflx {

/// Resolved config as '#'-prefixed comment lines; every CSV/JSON output
/// carries it so runs are reproducible from outputs alone.
std::string provenance_block(const ExperimentConfig& cfg);

void write_budget_csv(const std::string& path, const std::string& provenance,
                      const BudgetSeries& b);

void write_flux_budget_csv(const std::string& path, const std::string& provenance,
                           std::span<const FluxBudget> budgets);

/// Balance residual rows; ell = 0 marks the unfiltered (Duchon-Robert) check.
void write_residual_csv(const std::string& path, const std::string& provenance,
                        const std::map<double, std::vector<BalanceResidualSample>>& rows);

void write_structure_csv(const std::string& path, const std::string& provenance,
                         const StructureFunctionTable& table);

struct BesovRow {
    double p, sigma, c0, c1, norm, argmax_r;
};
void write_besov_csv(const std::string& path, const std::string& provenance,
                     std::span<const BesovRow> rows);

struct RatioRow {
    double p, sigma, r, ratio;  // S_p(r)^(1/p) / r^sigma
};
void write_ratio_csv(const std::string& path, const std::string& provenance,
                     std::span<const RatioRow> rows);

void write_flux_scaling_csv(const std::string& path, const std::string& provenance,
                            const FluxScalingReport& rep);
void write_flux_scaling_json(const std::string& path, const ExperimentConfig& cfg,
                             const FluxScalingReport& rep, double sigma);

struct SweepOutputs {
    OnsagerReport report;
    std::vector<SweepMemberSummary> members;
    std::vector<std::vector<FluxBudget>> flux_budgets;  // [member][ell]
};
void write_sweep_csvs(const std::string& dir, const std::string& provenance,
                      const SweepOutputs& out);
void write_sweep_json(const std::string& path, const ExperimentConfig& cfg,
                      const SweepOutputs& out);

}  // namespace lflx
